"""Labelled transition system of governed components.

Base components step through their local binders; composites step through
forwarders (external I/O), subcomponent internal moves and protocol-mediated
communication between subcomponents.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence, Union

from .core import (
    IN,
    OUT,
    BaseComponent,
    Comm,
    Component,
    FunctionSig,
    LocalBinder,
    Literal,
    Protocol,
    Store,
    Transit,
    Value,
    apply_function,
    unfold,
)


# -- labels ---------------------------------------------------------------------

@dataclass(frozen=True)
class Input:
    port: str
    value: Value

    def __str__(self) -> str:
        return f"{self.port}?{self.value}"


@dataclass(frozen=True)
class Output:
    port: str
    value: Value

    def __str__(self) -> str:
        return f"{self.port}!{self.value}"


@dataclass(frozen=True)
class Tau:
    def __str__(self) -> str:
        return "tau"


TransitionLabel = Union[Input, Output, Tau]
TAU = Tau()


@dataclass(frozen=True)
class ProtoOut:
    role: str
    label: str
    value: Value


@dataclass(frozen=True)
class ProtoIn:
    role: str
    label: str
    value: Value


ProtocolLabel = Union[ProtoOut, ProtoIn]


@dataclass(frozen=True)
class Transition:
    label: TransitionLabel
    target: Component
    rule: str = ""


class Blocked(Exception):
    pass


def fresh_value(btype: str, n: int = 0) -> Literal:
    return Literal(f"fresh_{btype}#{n}", btype)


def component_hash(k: Component) -> str:
    return hashlib.sha256(repr(k).encode()).hexdigest()[:12]


# -- local binders ----------------------------------------------------------------

def binder_input(binders: Sequence[LocalBinder], x: str, v: Value) -> tuple[LocalBinder, ...]:
    return tuple(_store_value(b, x, v) for b in binders)


def _store_value(b: LocalBinder, x: str, v: Value) -> LocalBinder:
    if x not in b.params:
        return b
    queue = list(b.queue)
    for i, store in enumerate(queue):
        if x not in store:
            queue[i] = store.with_entry(x, v)
            break
    else:
        queue.append(Store.of({x: v}))
    return replace(b, queue=tuple(queue))


def binder_outputs(
    binders: Sequence[LocalBinder],
    sigs: Mapping[str, FunctionSig],
    interp: Optional[Mapping] = None,
) -> list[tuple[str, Value, tuple[LocalBinder, ...]]]:
    ready = []
    for i, b in enumerate(binders):
        if b.params:
            if not b.queue or any(x not in b.queue[0] for x in b.params):
                continue
            args = tuple(b.queue[0][x] for x in b.params)
            popped = replace(b, queue=b.queue[1:])
        else:
            args = ()
            popped = b
        v = apply_function(sigs[b.fn], args, interp)
        ready.append((b.out, v, (*binders[:i], popped, *binders[i + 1:])))
    return ready


# -- protocol --------------------------------------------------------------------

def protocol_step(g: Protocol, label: ProtocolLabel) -> Protocol:
    head = unfold(g)
    if isinstance(label, ProtoOut):
        if isinstance(head, Comm) and head.sender == label.role and head.label == label.label:
            return Transit(head.sender, head.label, label.value, head.receivers, head.cont)
        raise Blocked(label)
    if isinstance(head, Transit) and head.label == label.label and label.role in head.remaining:
        if head.value != label.value:
            raise Blocked(label)
        remaining = tuple(q for q in head.remaining if q != label.role)
        if not remaining:
            return head.cont
        return replace(head, remaining=remaining)
    raise Blocked(label)


# -- component steps -------------------------------------------------------------

class Semantics:
    """Steps components under fixed function signatures (and optional concrete
    function implementations)."""

    def __init__(self, sigs: Mapping[str, FunctionSig], interp: Optional[Mapping] = None):
        self.sigs = sigs
        self.interp = interp

    def input(self, k: Component, x: str, v: Value) -> Component:
        if isinstance(k, BaseComponent):
            if x not in {p.name for p in k.inputs}:
                raise KeyError(x)
            return replace(k, binders=binder_input(k.binders, x, v))
        for f in k.forwarders:
            if f.kind == IN and f.outer == x:
                sub = k.role(k.interface)
                return k.with_role(k.interface, self.input(sub, f.inner, v))
        raise KeyError(x)

    def outputs(self, k: Component) -> list[tuple[str, Value, Component]]:
        if isinstance(k, BaseComponent):
            exposed = {p.name for p in k.outputs}
            return [
                (y, v, replace(k, binders=bs))
                for y, v, bs in binder_outputs(k.binders, self.sigs, self.interp)
                if y in exposed
            ]
        result = []
        fwd = {f.inner: f.outer for f in k.forwarders if f.kind == OUT}
        for z, v, sub in self.outputs(k.role(k.interface)):
            if z in fwd:
                result.append((fwd[z], v, k.with_role(k.interface, sub)))
        return result

    def internal(self, k: Component) -> list[tuple[str, Component]]:
        """All τ-successors of ``k`` with the name of the rule that produced them."""
        if isinstance(k, BaseComponent):
            return []
        result = []
        for role, sub in k.roles:
            for rule, sub2 in self.internal(sub):
                result.append((f"Internal/{rule}", k.with_role(role, sub2)))
        for role, sub in k.roles:
            for u, v, sub2 in self.outputs(sub):
                d = next((d for d in k.binders if d.sender_role == role and d.sender_port == u), None)
                if d is None:
                    continue
                try:
                    g2 = protocol_step(k.protocol, ProtoOut(role, d.label, v))
                except Blocked:
                    continue
                result.append(("OutChor", k.with_role(role, sub2).with_protocol(g2)))
        head = unfold(k.protocol)
        if isinstance(head, Transit):
            for q in head.remaining:
                d = k.label_receiver(head.label, q)
                if d is None:
                    continue
                g2 = protocol_step(k.protocol, ProtoIn(q, head.label, head.value))
                sub2 = self.input(k.role(q), d.receiver_port, head.value)
                result.append(("InpChor", k.with_role(q, sub2).with_protocol(g2)))
        return result

    def enumerate(self, k: Component, fresh: int = 0) -> list[Transition]:
        """Every one-step transition of ``k``; inputs use one fresh value per port."""
        result = []
        inp_rule = "InpBase" if isinstance(k, BaseComponent) else "InpComp"
        out_rule = "OutBase" if isinstance(k, BaseComponent) else "OutComp"
        for p in k.inputs:
            v = fresh_value(p.btype, fresh)
            result.append(Transition(Input(p.name, v), self.input(k, p.name, v), inp_rule))
        for y, v, k2 in self.outputs(k):
            result.append(Transition(Output(y, v), k2, out_rule))
        for rule, k2 in self.internal(k):
            result.append(Transition(TAU, k2, rule))
        return result
