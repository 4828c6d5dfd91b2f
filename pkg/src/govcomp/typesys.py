"""Component types ``<X_b; C>`` and their labelled transitions.

Counts and bounds are extended naturals: plain ``int`` or ``INF``.
Modified types (where forwarded inputs are assumed always available) use the
same classes; they simply admit ``INF`` as a per-each-value count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional, Union

from .core import IN, Forwarder

INF = math.inf


class _Omega:
    """Marker for an initial dependency (``x:Ω``)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "OMEGA"

    def __str__(self) -> str:
        return "Ω"

    def __reduce__(self):
        return (_Omega, ())


OMEGA = _Omega()

Amount = Union[int, float, _Omega]


def show_nat(n) -> str:
    return "∞" if n == INF else str(int(n))


@dataclass(frozen=True, order=False)
class Dependency:
    port: str
    amount: Amount

    @property
    def initial(self) -> bool:
        return self.amount is OMEGA

    def __str__(self) -> str:
        return f"{self.port}:{'Ω' if self.initial else show_nat(self.amount)}"


@dataclass(frozen=True)
class Constraint:
    port: str
    btype: str
    bound: Union[int, float]
    deps: frozenset[Dependency] = frozenset()

    def dep(self, port: str) -> Optional[Dependency]:
        for d in self.deps:
            if d.port == port:
                return d
        return None

    def __str__(self) -> str:
        deps = ", ".join(str(d) for d in sorted(self.deps, key=lambda d: d.port))
        return f"{self.port}({self.btype}):{show_nat(self.bound)}:[{deps}]"


@dataclass(frozen=True)
class ComponentType:
    inputs: frozenset[tuple[str, str]]
    constraints: frozenset[Constraint]

    @classmethod
    def of(cls, inputs: Mapping[str, str] | Iterable[tuple[str, str]], constraints: Iterable[Constraint]) -> ComponentType:
        items = inputs.items() if isinstance(inputs, Mapping) else inputs
        return cls(frozenset(items), frozenset(constraints))

    def input_type(self, port: str) -> Optional[str]:
        for x, b in self.inputs:
            if x == port:
                return b
        return None

    def constraint(self, port: str) -> Optional[Constraint]:
        for c in self.constraints:
            if c.port == port:
                return c
        return None

    def __str__(self) -> str:
        xs = ", ".join(f"{x}({b})" for x, b in sorted(self.inputs))
        cs = ", ".join(str(c) for c in sorted(self.constraints, key=lambda c: c.port))
        return f"<{{{xs}}}; {{{cs}}}>"


ModifiedType = ComponentType


def deps(**amounts: Amount) -> frozenset[Dependency]:
    return frozenset(Dependency(x, m) for x, m in amounts.items())


# -- transitions ----------------------------------------------------------------

class TypeStepError(Exception):
    pass


class NotAnInput(TypeStepError):
    def __init__(self, port: str):
        super().__init__(f"{port} is not an input of the type")
        self.port = port


class NotEnabled(TypeStepError):
    """Output not enabled; ``reason`` is one of the class constants."""

    NO_CONSTRAINT = "no-constraint"
    INITIAL_DEP = "initial-dep-present"
    ZERO_COUNT = "zero-count"
    ZERO_BOUND = "zero-bound"

    def __init__(self, port: str, reason: str):
        super().__init__(f"{port}! not enabled: {reason}")
        self.port = port
        self.reason = reason


def constraint_input(c: Constraint, x: str) -> Constraint:
    d = c.dep(x)
    if d is None:
        return c
    rest = c.deps - {d}
    if d.initial:
        return replace(c, deps=rest)
    return replace(c, deps=rest | {Dependency(x, d.amount + 1)})


def type_input(t: ComponentType, x: str) -> tuple[str, ComponentType]:
    b = t.input_type(x)
    if b is None:
        raise NotAnInput(x)
    return b, replace(t, constraints=frozenset(constraint_input(c, x) for c in t.constraints))


def output_blocker(t: ComponentType, y: str) -> Optional[str]:
    c = t.constraint(y)
    if c is None:
        return NotEnabled.NO_CONSTRAINT
    if any(d.initial for d in c.deps):
        return NotEnabled.INITIAL_DEP
    if any(d.amount < 1 for d in c.deps):
        return NotEnabled.ZERO_COUNT
    if not c.bound > 0:
        return NotEnabled.ZERO_BOUND
    return None


def type_output(t: ComponentType, y: str) -> tuple[str, ComponentType]:
    reason = output_blocker(t, y)
    if reason is not None:
        raise NotEnabled(y, reason)
    c = t.constraint(y)
    stepped = Constraint(
        c.port, c.btype, c.bound - 1,
        frozenset(Dependency(d.port, d.amount - 1) for d in c.deps),
    )
    return c.btype, replace(t, constraints=(t.constraints - {c}) | {stepped})


def enabled_outputs(t: ComponentType) -> list[str]:
    return sorted(c.port for c in t.constraints if output_blocker(t, c.port) is None)


def modify(forwarders: Iterable[Forwarder], t: ComponentType) -> ModifiedType:
    """Assume unlimited supply on the externally fed ports of ``t``."""
    fed = {f.inner for f in forwarders if f.kind == IN}
    constraints = set()
    for c in t.constraints:
        new = set()
        for d in c.deps:
            if d.port not in fed:
                new.add(d)
            elif not d.initial:
                new.add(Dependency(d.port, INF))
        constraints.add(replace(c, deps=frozenset(new)))
    return replace(t, constraints=frozenset(constraints))
