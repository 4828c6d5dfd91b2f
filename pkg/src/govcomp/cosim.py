"""Random generation of well-typed components and co-simulation of the component
LTS against the type LTS (subject reduction and progress)."""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Mapping, Optional

from .conformance import IllTyped, Typer
from .core import (
    IN,
    OUT,
    BaseComponent,
    Comm,
    Component,
    CompositeComponent,
    DistributionBinder,
    End,
    Forwarder,
    FunctionSig,
    Literal,
    LocalBinder,
    Port,
    Rec,
    Store,
    Var,
    validate,
)
from .dsl import SourceProgram
from .semantics import Input, Output, Semantics, Transition, component_hash, fresh_value
from .typesys import ComponentType, NotEnabled, enabled_outputs, type_input, type_output

BASIC_TYPES = ("int", "str", "bool")


@dataclass(frozen=True)
class GenConfig:
    max_ports: int = 2
    max_binders: int = 2
    max_protocol_length: int = 4
    recursion_probability: float = 0.5
    depth_bound: int = 2
    tau_budget: int = 16
    composite_probability: float = 0.6
    max_attempts: int = 50

    def check(self) -> None:
        bounds = (self.max_ports, self.max_binders, self.max_protocol_length, self.depth_bound, self.max_attempts)
        if min(bounds) <= 0 or self.tau_budget < 0:
            raise Unsatisfiable(f"non-positive bound in {self}")
        if not (0 <= self.recursion_probability <= 1 and 0 <= self.composite_probability <= 1):
            raise Unsatisfiable("probabilities must lie in [0, 1]")


class Unsatisfiable(Exception):
    pass


# -- generation ---------------------------------------------------------------------

class _Generator:
    def __init__(self, rng: random.Random, cfg: GenConfig):
        self.rng = rng
        self.cfg = cfg
        self.n = 0
        self.types: set[str] = set()
        self.functions: dict[str, FunctionSig] = {}
        self.components: dict[str, Component] = {}

    def fresh(self, prefix: str) -> str:
        self.n += 1
        return f"{prefix}{self.n}"

    def btype(self) -> str:
        b = self.rng.choice(BASIC_TYPES)
        self.types.add(b)
        return b

    def function(self, params: tuple[str, ...], ret: str) -> str:
        same = [s.name for s in self.functions.values() if s.params == params and s.ret == ret]
        if same and self.rng.random() < 0.5:
            return self.rng.choice(same)
        sig = FunctionSig(self.fresh("f"), params, ret)
        self.functions[sig.name] = sig
        return sig.name

    def params(self, candidates: list[str]) -> tuple[str, ...]:
        k = self.rng.randint(0, min(2, len(candidates)))
        return tuple(self.rng.sample(candidates, k))

    def component(self, depth: int, ins: list[tuple[str, str]], outs: list[tuple[str, str, tuple]]) -> Component:
        if depth > 1 and (ins or outs) and self.rng.random() < self.cfg.composite_probability:
            return self.composite(depth - 1, ins, outs)
        return self.base(ins, outs)

    def base(self, ins, outs, prefill: bool = False) -> BaseComponent:
        # queued values only at top level: inside a composite, an initial
        # configuration starts with empty queues
        types = dict(ins)
        binders = []
        for y, b, params in outs:
            fn = self.function(tuple(types[x] for x in params), b)
            queue = ()
            if prefill and params and self.rng.random() < 0.3:
                queue = tuple(
                    Store.of({x: Literal(f"v{self.fresh('')}", types[x]) for x in params})
                    for _ in range(self.rng.randint(1, 2))
                )
            binders.append(LocalBinder(y, fn, params, queue))
        k = BaseComponent(
            self.fresh("B"),
            tuple(Port(x, IN, b) for x, b in ins),
            tuple(Port(y, OUT, b) for y, b, _ in outs),
            tuple(binders),
        )
        self.components[k.name] = k
        return k

    def messages(self, roles: list[str]) -> list[tuple[str, tuple[str, ...], str, str]]:
        rng = self.rng
        for _ in range(20):
            length = rng.randint(max(1, len(roles) - 1), max(self.cfg.max_protocol_length, len(roles) - 1))
            msgs = []
            for _ in range(length):
                sender = rng.choice(roles)
                others = [r for r in roles if r != sender]
                count = 2 if len(others) > 1 and rng.random() < 0.2 else 1
                msgs.append((sender, tuple(rng.sample(others, count)), self.fresh("l"), self.btype()))
            used = {m[0] for m in msgs} | {r for m in msgs for r in m[1]}
            if used == set(roles):
                return msgs
        return [(roles[0], tuple(roles[1:]), self.fresh("l"), self.btype())]

    def composite(self, depth: int, ins, outs) -> CompositeComponent:
        rng = self.rng
        roles = [f"R{i}" for i in range(rng.choice((2, 3)))]
        msgs = self.messages(roles)
        cut = rng.randint(0, len(msgs) - 1) if rng.random() < self.cfg.recursion_probability else len(msgs)
        role_ins: dict[str, list] = {r: [] for r in roles}
        role_outs: dict[str, list] = {r: [] for r in roles}
        received: dict[str, dict[int, list[str]]] = {r: {0: [], 1: []} for r in roles}
        dbinders = []
        fwd_in = {x: self.fresh("x") for x, _ in ins}
        for i, (sender, receivers, label, b) in enumerate(msgs):
            seg = 0 if i < cut else 1
            y = self.fresh("y")
            candidates = list(received[sender][seg])
            if sender == roles[0]:
                candidates += list(fwd_in.values())
            role_outs[sender].append((y, b, self.params(candidates)))
            for q in receivers:
                x = self.fresh("x")
                role_ins[q].append((x, b))
                received[q][seg].append(x)
                dbinders.append(DistributionBinder(label, q, x, sender, y))
        iface = roles[0]
        role_ins[iface] += [(fwd_in[x], b) for x, b in ins]
        forwarders = [Forwarder(IN, fwd_in[x], x) for x, _ in ins]
        protocol_inputs = received[iface][0] + received[iface][1]
        for y, b, params in outs:
            inner = self.fresh("y")
            ps = tuple(fwd_in[x] for x in params)
            if protocol_inputs and rng.random() < 0.6:
                extra = rng.choice(protocol_inputs)
                if extra not in ps:
                    ps += (extra,)
            role_outs[iface].append((inner, b, ps))
            forwarders.append(Forwarder(OUT, inner, y))
        subs = tuple((r, self.component(depth, role_ins[r], role_outs[r])) for r in roles)

        g = Var("X") if cut < len(msgs) else End()
        for i in reversed(range(len(msgs))):
            sender, receivers, label, _ = msgs[i]
            g = Comm(sender, label, receivers, g)
            if i == cut:
                g = Rec("X", g)
        k = CompositeComponent(
            self.fresh("C"),
            tuple(Port(x, IN, b) for x, b in ins),
            tuple(Port(y, OUT, b) for y, b, _ in outs),
            g,
            subs,
            tuple(dbinders),
            iface,
            tuple(forwarders),
        )
        self.components[k.name] = k
        return k

    def top(self) -> Component:
        rng = self.rng
        ins = [(self.fresh("x"), self.btype()) for _ in range(rng.randint(1, self.cfg.max_ports))]
        names = [x for x, _ in ins]
        n_out = rng.randint(1, min(self.cfg.max_ports, self.cfg.max_binders))
        outs = [(self.fresh("y"), self.btype(), self.params(names)) for _ in range(n_out)]
        if self.cfg.depth_bound > 1 and self.rng.random() < self.cfg.composite_probability:
            return self.composite(self.cfg.depth_bound - 1, ins, outs)
        return self.base(ins, outs, prefill=True)


def generate(seed: int, cfg: GenConfig = GenConfig()) -> SourceProgram:
    """A validated, well-typed program drawn deterministically from ``seed``."""
    cfg.check()
    rng = random.Random(seed)
    for _ in range(cfg.max_attempts):
        gen = _Generator(rng, cfg)
        k = gen.top()
        if validate(k, gen.functions):
            continue
        try:
            Typer(gen.functions)(k)
        except IllTyped:
            continue
        return SourceProgram(sorted(gen.types), gen.functions, gen.components, k.name)
    raise Unsatisfiable(f"no well-typed component after {cfg.max_attempts} attempts")


# -- reports ---------------------------------------------------------------------

SUBJECT_REDUCTION = "SubjectReduction"
PROGRESS = "Progress"
BUDGET_EXCEEDED = "BudgetExceeded"


@dataclass
class Violation:
    check: str
    configuration: str
    transition: str
    expected: str
    actual: str

    def __str__(self) -> str:
        return f"{self.check} at {self.configuration} on {self.transition}: expected {self.expected}, got {self.actual}"


@dataclass
class CosimReport:
    seeds: int = 0
    states: int = 0
    edges: int = 0
    violations: list[Violation] = field(default_factory=list)
    budget_exceeded: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def merge(self, other: CosimReport) -> CosimReport:
        return CosimReport(
            self.seeds + other.seeds,
            self.states + other.states,
            self.edges + other.edges,
            self.violations + other.violations,
            self.budget_exceeded + other.budget_exceeded,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    def render(self) -> str:
        lines = [
            f"seeds: {self.seeds}",
            f"states explored: {self.states}",
            f"edges checked: {self.edges}",
            f"violations: {len(self.violations)}",
            f"budget exceeded: {len(self.budget_exceeded)}",
        ]
        lines += [f"  {v}" for v in self.violations]
        lines += [f"  {v}" for v in self.budget_exceeded]
        return "\n".join(lines)


# -- checks ----------------------------------------------------------------------

def _type_move(t: ComponentType, label) -> ComponentType:
    if isinstance(label, Input):
        b, t2 = type_input(t, label.port)
    elif isinstance(label, Output):
        b, t2 = type_output(t, label.port)
    else:
        return t
    if b != label.value.btype:
        raise NotEnabled(label.port, f"value of type {label.value.btype} where {b} is expected")
    return t2


def _reachable(k: Component, depth: int, sem: Semantics) -> tuple[list[Component], list[tuple[Component, Transition]]]:
    seen = {k}
    order = [k]
    edges = []
    frontier = [k]
    for _ in range(depth):
        nxt = []
        for s in frontier:
            for tr in sem.enumerate(s):
                edges.append((s, tr))
                if tr.target not in seen:
                    seen.add(tr.target)
                    order.append(tr.target)
                    nxt.append(tr.target)
        frontier = nxt
    return order, edges


def _safe(typer: Callable[[Component], ComponentType], k: Component):
    try:
        return typer(k)
    except IllTyped as e:
        return e


def check_subject_reduction(
    k: Component,
    depth: int,
    sigs: Mapping[str, FunctionSig],
    typer: Optional[Callable[[Component], ComponentType]] = None,
    interp: Optional[Mapping] = None,
) -> CosimReport:
    """Explore ``k`` breadth-first to ``depth``; every edge must be mirrored by the type."""
    typer = typer or Typer(sigs)
    sem = Semantics(sigs, interp)
    states, edges = _reachable(k, depth, sem)
    report = CosimReport(states=len(states), edges=len(edges))
    for s, tr in edges:
        t = _safe(typer, s)
        if isinstance(t, IllTyped):
            report.violations.append(Violation(SUBJECT_REDUCTION, component_hash(s), "-", "well-typed", str(t)))
            continue
        try:
            expected = _type_move(t, tr.label)
        except (NotEnabled, KeyError, ValueError) as e:
            report.violations.append(
                Violation(SUBJECT_REDUCTION, component_hash(s), f"{tr.label} [{tr.rule}]", "type step", repr(e)))
            continue
        actual = _safe(typer, tr.target)
        if actual != expected:
            report.violations.append(
                Violation(SUBJECT_REDUCTION, component_hash(s), f"{tr.label} [{tr.rule}]", str(expected), str(actual)))
    return report


def _tau_closure(sem: Semantics, k: Component, budget: int):
    """Yield states reachable by at most ``budget`` τ-steps; the final item is
    True when the search was cut short by the budget."""
    seen = {k}
    layer = [k]
    for step in range(budget + 1):
        yield from layer
        nxt = []
        for c in layer:
            for _, c2 in sem.internal(c):
                if c2 not in seen:
                    seen.add(c2)
                    nxt.append(c2)
        if not nxt:
            yield False
            return
        if step == budget:
            yield True
            return
        layer = nxt


def _weak(sem: Semantics, typer, k: Component, label, expected: ComponentType, budget: int) -> Optional[bool]:
    """Search ``k ==label==> k'`` with ``typeof(k') == expected``.

    Returns True on success, False when no such move exists, None when the τ
    budget ran out first."""
    truncated = False
    for c in _tau_closure(sem, k, budget):
        if isinstance(c, bool):
            truncated = truncated or c
            break
        if isinstance(label, Input):
            v = fresh_value(label.value.btype)
            candidates = [sem.input(c, label.port, v)]
        else:
            candidates = [c2 for y, v, c2 in sem.outputs(c) if y == label.port and v.btype == label.value.btype]
        for c2 in candidates:
            for c3 in _tau_closure(sem, c2, budget):
                if isinstance(c3, bool):
                    truncated = truncated or c3
                    break
                if _safe(typer, c3) == expected:
                    return True
    return None if truncated else False


def check_progress(
    k: Component,
    depth: int,
    tau_budget: int,
    sigs: Mapping[str, FunctionSig],
    typer: Optional[Callable[[Component], ComponentType]] = None,
    interp: Optional[Mapping] = None,
) -> CosimReport:
    """Every I/O move enabled by the type of a reachable state must be realisable
    by the component through a weak transition."""
    typer = typer or Typer(sigs)
    sem = Semantics(sigs, interp)
    states, _ = _reachable(k, depth, sem)
    report = CosimReport(states=len(states))
    for s in states:
        t = _safe(typer, s)
        if isinstance(t, IllTyped):
            report.violations.append(Violation(PROGRESS, component_hash(s), "-", "well-typed", str(t)))
            continue
        moves = []
        for x, b in sorted(t.inputs):
            moves.append((Input(x, fresh_value(b)), type_input(t, x)[1]))
        for y in sorted(enabled_outputs(t)):
            b, t2 = type_output(t, y)
            moves.append((Output(y, fresh_value(b)), t2))
        for label, expected in moves:
            report.edges += 1
            found = _weak(sem, typer, s, label, expected, tau_budget)
            if found:
                continue
            kind = BUDGET_EXCEEDED if found is None else PROGRESS
            v = Violation(kind, component_hash(s), _show_label(label), str(expected), "no weak transition")
            (report.budget_exceeded if found is None else report.violations).append(v)
    return report


def _show_label(label) -> str:
    if isinstance(label, Input):
        return f"{label.port}?({label.value.btype})"
    if isinstance(label, Output):
        return f"{label.port}!({label.value.btype})"
    return "tau"


def cosim_programs(
    programs: Iterable[SourceProgram],
    depth: int,
    tau_budget: Optional[int] = None,
    progress_depth: Optional[int] = None,
) -> CosimReport:
    """Subject reduction (and progress when ``tau_budget`` is given) over several programs."""
    report = CosimReport()
    for p in programs:
        typer = Typer(p.functions)
        k = p.entry_component
        r = check_subject_reduction(k, depth, p.functions, typer)
        if tau_budget is not None:
            r = r.merge(check_progress(k, progress_depth if progress_depth is not None else depth,
                                       tau_budget, p.functions, typer))
        r.seeds = 1
        report = report.merge(r)
    return report
