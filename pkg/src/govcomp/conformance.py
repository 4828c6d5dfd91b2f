"""Conformance of (modified) types to local protocols, and well-typedness."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .core import BaseComponent, Component, FunctionSig, Rec, Var
from .extraction import ExtractionError, GammaEnv, extract_base, extract_composite, local_protocol
from .projection import LocalProtocol, ProjectionError, Recv, Send, show_local
from .typesys import ComponentType, ModifiedType, NotAnInput, NotEnabled, modify, type_input, type_output


def leq(t1: ModifiedType, t2: ModifiedType) -> bool:
    """Whether ``t2`` is reachable from ``t1`` by a sequence of inputs."""
    if t1.inputs != t2.inputs:
        return False
    if {(c.port, c.btype, c.bound) for c in t1.constraints} != {(c.port, c.btype, c.bound) for c in t2.constraints}:
        return False
    current = t1
    for x, _ in sorted(t1.inputs):
        needed = _inputs_needed(t1, t2, x)
        if needed is None:
            return False
        for _ in range(needed):
            _, current = type_input(current, x)
    return current == t2


def _inputs_needed(t1: ModifiedType, t2: ModifiedType, x: str) -> Optional[int]:
    needed = 0
    for c1 in t1.constraints:
        d1, d2 = c1.dep(x), t2.constraint(c1.port).dep(x)
        if d1 is None:
            continue
        if d1.initial:
            if d2 is None:
                needed = max(needed, 1)
            continue
        if d2 is None or d2.initial:
            return None
        diff = d2.amount - d1.amount
        if d1.amount == float("inf") or d2.amount == float("inf"):
            continue
        if diff < 0:
            return None
        needed = max(needed, int(diff))
    return needed


@dataclass
class Step:
    rule: str
    protocol: str
    type: str
    note: str = ""


@dataclass
class Derivation:
    ok: bool
    steps: list[Step] = field(default_factory=list)
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def render(self) -> str:
        lines = []
        for depth, s in enumerate(self.steps):
            note = f"  ({s.note})" if s.note else ""
            lines.append(f"{'  ' * depth}[{s.rule}] {s.type} ⋈ {s.protocol}{note}")
        if not self.ok:
            lines.append(f"{'  ' * len(self.steps)}FAILED: {self.reason}")
        return "\n".join(lines)


def conforms(env: Mapping[str, ModifiedType], t: ModifiedType, lp: LocalProtocol) -> Derivation:
    env = dict(env)
    steps: list[Step] = []
    while True:
        shown = show_local(lp)
        if isinstance(lp, Recv):
            try:
                b, t2 = type_input(t, lp.port)
            except NotAnInput as e:
                return Derivation(False, steps, f"InpConf: {e}")
            if b != lp.btype:
                return Derivation(False, steps, f"InpConf: {lp.port} carries {b}, protocol expects {lp.btype}")
            steps.append(Step("InpConf", shown, str(t)))
            t, lp = t2, lp.cont
        elif isinstance(lp, Send):
            try:
                b, t2 = type_output(t, lp.port)
            except NotEnabled as e:
                return Derivation(False, steps, f"OutConf: {e}")
            if b != lp.btype:
                return Derivation(False, steps, f"OutConf: {lp.port} carries {b}, protocol expects {lp.btype}")
            steps.append(Step("OutConf", shown, str(t)))
            t, lp = t2, lp.cont
        elif isinstance(lp, Rec):
            steps.append(Step("RecConf", shown, str(t), f"{lp.var} : recorded"))
            env[lp.var] = t
            lp = lp.body
        elif isinstance(lp, Var):
            if lp.name not in env:
                return Derivation(False, steps, f"VarConf: unbound {lp.name}")
            ok = leq(env[lp.name], t)
            steps.append(Step("VarConf", shown, str(t), f"{env[lp.name]} <= current: {ok}"))
            if not ok:
                return Derivation(False, steps, f"VarConf: {env[lp.name]} cannot reach {t} by inputs")
            return Derivation(True, steps)
        else:
            steps.append(Step("EndConf", shown, str(t)))
            return Derivation(True, steps)


class IllTyped(Exception):
    def __init__(self, clause: str, where: str, detail: str = "", derivation: Optional[Derivation] = None):
        super().__init__(f"{clause} failed at {where}" + (f": {detail}" if detail else ""))
        self.clause = clause
        self.where = where
        self.derivation = derivation


class Typer:
    """Computes ``K ⇓ T`` with memoisation on (hashable) components."""

    def __init__(self, sigs: Mapping[str, FunctionSig]):
        self.sigs = sigs
        self._memo: dict[Component, ComponentType] = {}

    def __call__(self, k: Component) -> ComponentType:
        t = self._memo.get(k)
        if t is None:
            t = self._memo[k] = self._typeof(k)
        return t

    def extract(self, k: Component) -> ComponentType:
        """The extracted type of ``k`` without checking its own roles' conformance."""
        if isinstance(k, BaseComponent):
            return self(k)
        try:
            return extract_composite(k, self(k.role(k.interface)))
        except ProjectionError as e:
            raise IllTyped("projection", k.name, repr(e)) from e

    def _typeof(self, k: Component) -> ComponentType:
        if isinstance(k, BaseComponent):
            try:
                return extract_base(k, GammaEnv.for_component(k, self.sigs))
            except ExtractionError as e:
                raise IllTyped("extraction", k.name, str(e)) from e
        sub_types = {role: self(sub) for role, sub in k.roles}
        try:
            t = extract_composite(k, sub_types[k.interface])
            for role, _ in k.roles:
                lp = local_protocol(k, role)
                d = conforms({}, modify(k.forwarders, sub_types[role]), lp)
                if not d:
                    raise IllTyped("conformance", f"{k.name}.{role}", d.reason, d)
        except ProjectionError as e:
            raise IllTyped("projection", k.name, repr(e)) from e
        return t


def typeof(k: Component, sigs: Mapping[str, FunctionSig]) -> ComponentType:
    return Typer(sigs)(k)
