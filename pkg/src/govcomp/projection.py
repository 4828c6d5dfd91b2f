"""Local protocols: projection of global protocols and the structural queries
used by composite type extraction."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from .core import Comm, DistributionBinder, End, Protocol, Rec, Transit, Var


@dataclass(frozen=True)
class Recv:
    port: str
    btype: str
    cont: LocalProtocol


@dataclass(frozen=True)
class Send:
    port: str
    btype: str
    cont: LocalProtocol


LocalProtocol = Union[Recv, Send, Rec, Var, End]


class ProjectionError(Exception):
    pass


class MissingBinder(ProjectionError):
    pass


class MissingType(ProjectionError):
    pass


def project(
    g: Protocol,
    role: str,
    binders: Sequence[DistributionBinder],
    label_types: Mapping[str, str],
) -> LocalProtocol:
    def btype(label):
        if label not in label_types:
            raise MissingType(label)
        return label_types[label]

    def sender_port(label):
        for d in binders:
            if d.label == label:
                return d.sender_port
        raise MissingBinder(label)

    def receiver_port(label):
        for d in binders:
            if d.label == label and d.receiver_role == role:
                return d.receiver_port
        raise MissingBinder(label)

    def go(g: Protocol) -> LocalProtocol:
        if isinstance(g, Comm):
            if g.sender == role:
                return Send(sender_port(g.label), btype(g.label), go(g.cont))
            if role in g.receivers:
                return Recv(receiver_port(g.label), btype(g.label), go(g.cont))
            return go(g.cont)
        if isinstance(g, Transit):
            # the output already happened; only pending receivers still see the message
            if role in g.remaining:
                return Recv(receiver_port(g.label), btype(g.label), go(g.cont))
            return go(g.cont)
        if isinstance(g, Rec):
            body = go(g.body)
            return Rec(g.var, body) if _mentions_role(g.body, role) else End()
        if isinstance(g, Var):
            return Var(g.name)
        return End()

    return go(g)


def _mentions_role(g: Protocol, role: str) -> bool:
    while isinstance(g, (Comm, Transit, Rec)):
        if isinstance(g, Comm) and (g.sender == role or role in g.receivers):
            return True
        if isinstance(g, Transit) and role in g.remaining:
            return True
        g = g.body if isinstance(g, Rec) else g.cont
    return False


def step_local(lp: LocalProtocol) -> LocalProtocol:
    """Drop the head action of ``lp``, unfolding recursion if needed."""
    while isinstance(lp, Rec):
        lp = _subst(lp.body, lp.var, lp)
    if not isinstance(lp, (Recv, Send)):
        raise ValueError("local protocol has no action")
    return lp.cont


def _subst(lp: LocalProtocol, var: str, rep_: LocalProtocol) -> LocalProtocol:
    if isinstance(lp, (Recv, Send)):
        return type(lp)(lp.port, lp.btype, _subst(lp.cont, var, rep_))
    if isinstance(lp, Rec):
        return lp if lp.var == var else Rec(lp.var, _subst(lp.body, var, rep_))
    if isinstance(lp, Var) and lp.name == var:
        return rep_
    return lp


def _flatten(lp: LocalProtocol) -> tuple[list[Union[Recv, Send]], list[Union[Recv, Send]]]:
    """Split into actions before the recursion and actions inside its body."""
    prefix: list = []
    body: list = []
    current = prefix
    while True:
        if isinstance(lp, (Recv, Send)):
            current.append(lp)
            lp = lp.cont
        elif isinstance(lp, Rec):
            current = body
            lp = lp.body
        else:
            return prefix, body


def fp(lp: LocalProtocol) -> frozenset[str]:
    prefix, body = _flatten(lp)
    return frozenset(a.port for a in (*prefix, *body))


def rep(lp: LocalProtocol) -> frozenset[str]:
    _, body = _flatten(lp)
    return frozenset(a.port for a in body)


CASE1, CASE2, CASE3 = 1, 2, 3


def _index(actions, kind, port) -> Optional[int]:
    for i, a in enumerate(actions):
        if isinstance(a, kind) and a.port == port:
            return i
    return None


def match_dep(lp: LocalProtocol, out_port: str, in_port: str) -> Optional[int]:
    """Which way (if any) the output on ``out_port`` precedes the input on ``in_port``.

    1: both outside the recursion; 2: only the input repeats; 3: both repeat.
    """
    prefix, body = _flatten(lp)
    repeated = {a.port for a in body}
    if out_port in repeated:
        i = _index(body, Send, out_port)
        j = _index(body, Recv, in_port)
        if i is not None and j is not None and i < j:
            return CASE3
        return None
    i = _index(prefix, Send, out_port)
    if i is None:
        return None
    if in_port in repeated:
        return CASE2 if _index(body, Recv, in_port) is not None else None
    j = _index(prefix, Recv, in_port)
    if j is not None and i < j:
        return CASE1
    return None


def value_flowing(lp: LocalProtocol, in_port: str, out_port: str) -> int:
    """1 when a value sent on ``out_port`` is on its way to ``in_port`` inside the recursion."""
    if match_dep(lp, out_port, in_port) != CASE3:
        return 0
    prefix, _ = _flatten(lp)
    for a in prefix:
        if a.port == in_port:
            return 1 if isinstance(a, Recv) else 0
        if a.port == out_port:
            return 0
    return 0


def show_local(lp: LocalProtocol) -> str:
    if isinstance(lp, Recv):
        return f"{lp.port}?:{lp.btype} . {show_local(lp.cont)}"
    if isinstance(lp, Send):
        return f"{lp.port}!:{lp.btype} . {show_local(lp.cont)}"
    if isinstance(lp, Rec):
        return f"rec {lp.var} . {show_local(lp.body)}"
    if isinstance(lp, Var):
        return lp.name
    return "end"
