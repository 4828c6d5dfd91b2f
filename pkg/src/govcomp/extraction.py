"""Type extraction for base and composite components."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .core import (
    IN,
    OUT,
    BaseComponent,
    CompositeComponent,
    Forwarder,
    FunctionSig,
    Store,
    label_types,
    port_types,
)
from .projection import CASE1, CASE2, LocalProtocol, fp, match_dep, project, rep, value_flowing
from .typesys import INF, OMEGA, ComponentType, Constraint, Dependency


class ExtractionError(Exception):
    """Inconsistent basic types in a component; ``kind`` says which check failed."""

    RETURN_MISMATCH = "ReturnMismatch"
    PARAM_MISMATCH = "ParamMismatch"
    UNDECLARED_FUNCTION = "UndeclaredFunction"

    def __init__(self, kind: str, binder: str, detail: str = ""):
        super().__init__(f"{kind} in binder for {binder}" + (f": {detail}" if detail else ""))
        self.kind = kind
        self.binder = binder


class InternalInconsistency(Exception):
    pass


class UnmappedPort(Exception):
    pass


@dataclass
class GammaEnv:
    port_types: dict[str, str] = field(default_factory=dict)
    fn_types: dict[str, FunctionSig] = field(default_factory=dict)
    label_types: dict[str, str] = field(default_factory=dict)

    @classmethod
    def for_component(cls, k, sigs: Mapping[str, FunctionSig]) -> GammaEnv:
        labels = label_types(k) if isinstance(k, CompositeComponent) else {}
        return cls(port_types(k), dict(sigs), labels)


def count(x: str, queue: Sequence[Store]) -> int:
    j = 0
    while j < len(queue) and x in queue[j]:
        j += 1
    if any(x in s for s in queue[j:]):
        return 0
    return j


def extract_base(k: BaseComponent, gamma: GammaEnv) -> ComponentType:
    for b in k.binders:
        sig = gamma.fn_types.get(b.fn)
        if sig is None:
            raise ExtractionError(ExtractionError.UNDECLARED_FUNCTION, b.out, b.fn)
        if sig.ret != gamma.port_types[b.out]:
            raise ExtractionError(ExtractionError.RETURN_MISMATCH, b.out, f"{sig.ret} vs {gamma.port_types[b.out]}")
        actual = tuple(gamma.port_types[x] for x in b.params)
        if sig.params != actual:
            raise ExtractionError(ExtractionError.PARAM_MISMATCH, b.out, f"{sig.params} vs {actual}")
    return ComponentType.of(
        [(p.name, gamma.port_types[p.name]) for p in k.inputs],
        [
            Constraint(b.out, gamma.port_types[b.out], INF,
                       frozenset(Dependency(x, count(x, b.queue)) for x in b.params))
            for b in k.binders
        ],
    )


# -- composite extraction -----------------------------------------------------------

def _fed(forwarders: Iterable[Forwarder]) -> frozenset[str]:
    return frozenset(f.inner for f in forwarders if f.kind == IN)


def _exposed(forwarders: Iterable[Forwarder]) -> frozenset[str]:
    return frozenset(f.inner for f in forwarders if f.kind == OUT)


def _lookup(constraints: Iterable[Constraint], y: str) -> Optional[Constraint]:
    return next((c for c in constraints if c.port == y), None)


def direct_deps(constraints: Iterable[Constraint], forwarders: Sequence[Forwarder], y: str) -> list[Dependency]:
    if y not in _exposed(forwarders):
        return []
    c = _lookup(constraints, y)
    if c is None:
        return []
    fed = _fed(forwarders)
    return [d for d in c.deps if d.port in fed]


def transitive_deps(
    constraints: Iterable[Constraint],
    forwarders: Sequence[Forwarder],
    lp: LocalProtocol,
    y: str,
) -> list[Dependency]:
    constraints = list(constraints)
    if y not in _exposed(forwarders):
        return []
    c = _lookup(constraints, y)
    if c is None:
        return []
    fed = _fed(forwarders)
    ports = fp(lp)
    found = []
    for via_in in c.deps:
        if via_in.port not in ports:
            continue
        for c2 in constraints:
            if c2.port == y or c2.port not in ports:
                continue
            case = match_dep(lp, c2.port, via_in.port)
            if case is None:
                continue
            for ext in c2.deps:
                if ext.port not in fed:
                    continue
                found.extend(_chain(case, ext.amount, via_in.amount, ext.port,
                                    value_flowing(lp, via_in.port, c2.port)))
    return found


def _chain(case: int, m, m_prime, x: str, vf: int) -> list[Dependency]:
    # m: dependency of the intermediate output on the external input x;
    # m_prime: dependency of y on the intermediate input.
    if case in (CASE1, CASE2):
        if m is OMEGA or m == 0:
            return [Dependency(x, OMEGA)]
        return []
    if m is OMEGA or (m_prime is OMEGA and m == 0 and vf == 0):
        return [Dependency(x, OMEGA)]
    if m is not OMEGA and m_prime is not OMEGA:
        return [Dependency(x, m + m_prime + vf)]
    return []


def prioritize(ds: Iterable[Dependency]) -> frozenset[Dependency]:
    by_port: dict[str, list[Dependency]] = defaultdict(list)
    for d in ds:
        by_port[d.port].append(d)
    result = set()
    for x, group in by_port.items():
        counts = {d.amount for d in group if not d.initial}
        if len(counts) > 1:
            raise InternalInconsistency(f"per-each dependencies on {x} disagree: {sorted(counts)}")
        result.add(Dependency(x, counts.pop() if counts else OMEGA))
    return frozenset(result)


def boundary(
    y: str,
    lp: LocalProtocol,
    constraints: Iterable[Constraint],
    forwarders: Sequence[Forwarder] = (),
):
    c = _lookup(constraints, y)
    fed = _fed(forwarders)
    ports, repeated = fp(lp), rep(lp)
    candidates = [c.bound]
    for d in c.deps:
        if d.port in fed:
            continue
        if d.port not in ports:
            candidates.append(0 if d.initial else d.amount)
        elif d.port not in repeated and not d.initial:
            candidates.append(d.amount + 1)
    return min(candidates)


def rename(forwarders: Sequence[Forwarder], t: ComponentType) -> ComponentType:
    names = {f.inner: f.outer for f in forwarders}

    def ren(p):
        if p not in names:
            raise UnmappedPort(p)
        return names[p]

    return ComponentType.of(
        [(ren(x), b) for x, b in t.inputs],
        [
            Constraint(ren(c.port), c.btype, c.bound, frozenset(Dependency(ren(d.port), d.amount) for d in c.deps))
            for c in t.constraints
        ],
    )


def local_protocol(k: CompositeComponent, role: str) -> LocalProtocol:
    return project(k.protocol, role, k.binders, label_types(k))


def extract_composite(k: CompositeComponent, interface_type: ComponentType) -> ComponentType:
    lp = local_protocol(k, k.interface)
    fed, exposed = k.inner_inputs(), k.inner_outputs()
    inner = interface_type.constraints
    inputs = [(x, b) for x, b in interface_type.inputs if x in fed]
    constraints = []
    for c in inner:
        if c.port not in exposed:
            continue
        ds = prioritize([*direct_deps(inner, k.forwarders, c.port),
                         *transitive_deps(inner, k.forwarders, lp, c.port)])
        constraints.append(Constraint(c.port, c.btype, boundary(c.port, lp, inner, k.forwarders), ds))
    return rename(k.forwarders, ComponentType.of(inputs, constraints))
