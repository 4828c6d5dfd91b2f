"""Syntax of governed components: values, binders, protocols and components.

Every class here is a frozen dataclass so configurations can be hashed,
compared structurally and shared freely between explorations.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator, Mapping, Optional, Union

IN = "in"
OUT = "out"


# -- values -----------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    lexeme: str
    btype: str

    def __str__(self) -> str:
        return f'"{self.lexeme}":{self.btype}'


@dataclass(frozen=True)
class Apply:
    fn: str
    args: tuple[Value, ...]
    btype: str

    def __str__(self) -> str:
        return f"{self.fn}({', '.join(map(str, self.args))})"


Value = Union[Literal, Apply]


@dataclass(frozen=True)
class FunctionSig:
    name: str
    params: tuple[str, ...]
    ret: str

    def __str__(self) -> str:
        return f"{self.name}: ({', '.join(self.params)}) -> {self.ret}"


def apply_function(sig: FunctionSig, args: tuple[Value, ...], interp: Optional[Mapping] = None) -> Value:
    """Compute ``sig.name(args)``.

    Functions are abstract, so the result is the symbolic term unless
    ``interp`` supplies a concrete implementation for the name.
    """
    if interp and sig.name in interp:
        result = interp[sig.name](*args)
        if result.btype != sig.ret:
            raise ValueError(f"{sig.name} returned {result.btype}, declared {sig.ret}")
        return result
    return Apply(sig.name, tuple(args), sig.ret)


def identity(v: Value) -> Value:
    return v


def constant(lexeme: str, btype: str):
    return lambda *args: Literal(lexeme, btype)


# -- base components --------------------------------------------------------

@dataclass(frozen=True)
class Port:
    name: str
    direction: str
    btype: str

    def __str__(self) -> str:
        return f"{self.name}: {self.btype}"


@dataclass(frozen=True)
class Store:
    """Partial map from input ports to received values."""

    entries: tuple[tuple[str, Value], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[str, Value]) -> Store:
        return cls(tuple(sorted(mapping.items())))

    def __contains__(self, port: str) -> bool:
        return any(p == port for p, _ in self.entries)

    def __getitem__(self, port: str) -> Value:
        for p, v in self.entries:
            if p == port:
                return v
        raise KeyError(port)

    def __len__(self) -> int:
        return len(self.entries)

    def ports(self) -> frozenset[str]:
        return frozenset(p for p, _ in self.entries)

    def with_entry(self, port: str, value: Value) -> Store:
        return Store.of({**dict(self.entries), port: value})


@dataclass(frozen=True)
class LocalBinder:
    out: str
    fn: str
    params: tuple[str, ...]
    queue: tuple[Store, ...] = ()


@dataclass(frozen=True)
class BaseComponent:
    name: str
    inputs: tuple[Port, ...]
    outputs: tuple[Port, ...]
    binders: tuple[LocalBinder, ...]


# -- protocols ----------------------------------------------------------------

@dataclass(frozen=True)
class Comm:
    sender: str
    label: str
    receivers: tuple[str, ...]
    cont: Protocol


@dataclass(frozen=True)
class Transit:
    """Runtime form: the sender already emitted ``value``; ``remaining`` still must receive it."""

    sender: str
    label: str
    value: Value
    remaining: tuple[str, ...]
    cont: Protocol


@dataclass(frozen=True)
class Rec:
    var: str
    body: Protocol


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class End:
    pass


Protocol = Union[Comm, Transit, Rec, Var, End]


def substitute(g: Protocol, var: str, replacement: Protocol) -> Protocol:
    if isinstance(g, Comm):
        return Comm(g.sender, g.label, g.receivers, substitute(g.cont, var, replacement))
    if isinstance(g, Transit):
        return Transit(g.sender, g.label, g.value, g.remaining, substitute(g.cont, var, replacement))
    if isinstance(g, Rec):
        if g.var == var:
            return g
        return Rec(g.var, substitute(g.body, var, replacement))
    if isinstance(g, Var):
        return replacement if g.name == var else g
    return g


def unfold(g: Protocol) -> Protocol:
    """Unfold leading recursion binders until a prefix or ``end``/variable shows."""
    seen = 0
    while isinstance(g, Rec):
        g = substitute(g.body, g.var, g)
        seen += 1
        if seen > 64:
            raise ValueError("unguarded recursion")
    return g


def protocol_roles(g: Protocol) -> set[str]:
    roles: set[str] = set()
    while True:
        if isinstance(g, Comm):
            roles.add(g.sender)
            roles.update(g.receivers)
            g = g.cont
        elif isinstance(g, Transit):
            roles.add(g.sender)
            roles.update(g.remaining)
            g = g.cont
        elif isinstance(g, Rec):
            g = g.body
        else:
            return roles


def protocol_labels(g: Protocol) -> list[str]:
    labels = []
    while True:
        if isinstance(g, (Comm, Transit)):
            labels.append(g.label)
            g = g.cont
        elif isinstance(g, Rec):
            g = g.body
        else:
            return labels


# -- composite components -----------------------------------------------------

@dataclass(frozen=True)
class DistributionBinder:
    """``label : receiver_role.receiver_port <- sender_role.sender_port``"""

    label: str
    receiver_role: str
    receiver_port: str
    sender_role: str
    sender_port: str


@dataclass(frozen=True)
class Forwarder:
    """``inner <- outer`` for inputs (kind IN), ``outer <- inner`` for outputs (kind OUT)."""

    kind: str
    inner: str
    outer: str

    def __str__(self) -> str:
        if self.kind == IN:
            return f"{self.inner} <- {self.outer}"
        return f"{self.outer} <- {self.inner}"


@dataclass(frozen=True)
class CompositeComponent:
    name: str
    inputs: tuple[Port, ...]
    outputs: tuple[Port, ...]
    protocol: Protocol
    roles: tuple[tuple[str, Component], ...]
    binders: tuple[DistributionBinder, ...]
    interface: str
    forwarders: tuple[Forwarder, ...]

    def role(self, name: str) -> Component:
        for r, k in self.roles:
            if r == name:
                return k
        raise KeyError(name)

    def with_role(self, name: str, k: Component) -> CompositeComponent:
        roles = tuple((r, k if r == name else sub) for r, sub in self.roles)
        return replace(self, roles=roles)

    def with_protocol(self, g: Protocol) -> CompositeComponent:
        return replace(self, protocol=g)

    def inner_inputs(self) -> frozenset[str]:
        """Ports of the interfacing subcomponent fed from outside (F^i)."""
        return frozenset(f.inner for f in self.forwarders if f.kind == IN)

    def inner_outputs(self) -> frozenset[str]:
        """Ports of the interfacing subcomponent exposed outside (F^o)."""
        return frozenset(f.inner for f in self.forwarders if f.kind == OUT)

    def label_sender(self, label: str) -> Optional[DistributionBinder]:
        for d in self.binders:
            if d.label == label:
                return d
        return None

    def label_receiver(self, label: str, role: str) -> Optional[DistributionBinder]:
        for d in self.binders:
            if d.label == label and d.receiver_role == role:
                return d
        return None


Component = Union[BaseComponent, CompositeComponent]


def port_types(k: Component) -> dict[str, str]:
    return {p.name: p.btype for p in (*k.inputs, *k.outputs)}


def subcomponents(k: Component) -> Iterator[Component]:
    """Yield ``k`` and every nested component, depth first."""
    yield k
    if isinstance(k, CompositeComponent):
        for _, sub in k.roles:
            yield from subcomponents(sub)


def label_types(k: CompositeComponent) -> dict[str, str]:
    """Basic type of each message label, read off the sender ports."""
    types = {}
    for d in k.binders:
        try:
            types[d.label] = port_types(k.role(d.sender_role))[d.sender_port]
        except KeyError:
            continue
    return types


# -- well-formedness ----------------------------------------------------------

@dataclass(frozen=True)
class WellFormednessError:
    kind: str
    where: str
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.kind}({self.where})"
        return f"{text}: {self.detail}" if self.detail else text


def validate(k: Component, sigs: Optional[Mapping[str, FunctionSig]] = None) -> list[WellFormednessError]:
    """Collect every violated well-formedness condition of ``k`` (and its subcomponents)."""
    errors: list[WellFormednessError] = []
    _validate(k, sigs, errors)
    owners: dict[str, str] = {}
    for sub in subcomponents(k):
        for p in (*sub.inputs, *sub.outputs):
            owner = owners.setdefault(p.name, sub.name)
            if owner != sub.name:
                errors.append(WellFormednessError("PortClash", p.name, f"declared by {owner} and {sub.name}"))
    return errors


def _ports_unique(k: Component, errors: list) -> None:
    names = [p.name for p in (*k.inputs, *k.outputs)]
    for name in sorted({n for n in names if names.count(n) > 1}):
        errors.append(WellFormednessError("DuplicatePort", f"{k.name}.{name}"))
    for p in k.inputs:
        if p.direction != IN:
            errors.append(WellFormednessError("PortDirection", f"{k.name}.{p.name}"))
    for p in k.outputs:
        if p.direction != OUT:
            errors.append(WellFormednessError("PortDirection", f"{k.name}.{p.name}"))


def _validate(k: Component, sigs, errors: list) -> None:
    _ports_unique(k, errors)
    if isinstance(k, BaseComponent):
        _validate_base(k, sigs, errors)
    else:
        _validate_composite(k, sigs, errors)


def _validate_base(k: BaseComponent, sigs, errors: list) -> None:
    inputs = {p.name: p.btype for p in k.inputs}
    outputs = {p.name for p in k.outputs}
    bound = [b.out for b in k.binders]
    for y in sorted(outputs - set(bound)):
        errors.append(WellFormednessError("MissingBinder", y))
    for y in sorted({y for y in bound if bound.count(y) > 1}):
        errors.append(WellFormednessError("DuplicateBinder", y))
    for b in k.binders:
        where = f"{k.name}.{b.out}"
        if b.out not in outputs:
            errors.append(WellFormednessError("UnusedBinder", b.out, "no such output port"))
        if len(set(b.params)) != len(b.params):
            errors.append(WellFormednessError("DuplicateParam", where))
        for x in b.params:
            if x not in inputs:
                errors.append(WellFormednessError("UnknownParam", where, x))
        if sigs is not None:
            sig = sigs.get(b.fn)
            if sig is None:
                errors.append(WellFormednessError("UnknownFunction", where, b.fn))
            elif len(sig.params) != len(b.params):
                errors.append(WellFormednessError("ArityMismatch", where, b.fn))
        _validate_queue(b, inputs, where, errors)


def _validate_queue(b: LocalBinder, inputs: Mapping[str, str], where: str, errors: list) -> None:
    for store in b.queue:
        for x in store.ports():
            if x not in b.params:
                errors.append(WellFormednessError("QueuePort", where, x))
            elif inputs.get(x) is not None and store[x].btype != inputs[x]:
                errors.append(WellFormednessError("ValueType", where, x))
    for x in b.params:
        holding = [x in s for s in b.queue]
        if holding and False in holding and True in holding[holding.index(False):]:
            errors.append(WellFormednessError("QueueShape", where, f"gap in values for {x}"))
    if b.queue and len(b.queue[-1]) == 0 and len(b.queue) > 1:
        errors.append(WellFormednessError("QueueShape", where, "empty store after a non-empty one"))


def _validate_composite(k: CompositeComponent, sigs, errors: list) -> None:
    roles = [r for r, _ in k.roles]
    for r in sorted({r for r in roles if roles.count(r) > 1}):
        errors.append(WellFormednessError("DuplicateRole", f"{k.name}.{r}"))
    for _, sub in k.roles:
        _validate(sub, sigs, errors)
    if k.interface not in roles:
        errors.append(WellFormednessError("UnknownInterfaceRole", k.name, k.interface))
    used = protocol_roles(k.protocol)
    for r in sorted(used - set(roles)):
        errors.append(WellFormednessError("UnassignedRole", f"{k.name}.{r}"))
    for r in sorted(set(roles) - used):
        errors.append(WellFormednessError("UnusedRole", f"{k.name}.{r}"))
    _validate_protocol(k, errors)
    _validate_dist_binders(k, errors)
    _validate_forwarders(k, errors)


def _validate_protocol(k: CompositeComponent, errors: list) -> None:
    where = k.name
    recs = 0
    bound_vars: list[str] = []
    outside: list[str] = []
    body: list[str] = []
    g = k.protocol
    guarded = True
    first = True
    while True:
        if isinstance(g, (Comm, Transit)):
            if isinstance(g, Transit) and not first:
                errors.append(WellFormednessError("TransitNotHead", where, g.label))
            receivers = g.receivers if isinstance(g, Comm) else g.remaining
            if not receivers and isinstance(g, Comm):
                errors.append(WellFormednessError("NoReceivers", where, g.label))
            if g.sender in receivers:
                errors.append(WellFormednessError("SelfMessage", where, g.label))
            if len(set(receivers)) != len(receivers):
                errors.append(WellFormednessError("DuplicateReceiver", where, g.label))
            (body if recs else outside).append(g.label)
            guarded = True
            g = g.cont
        elif isinstance(g, Rec):
            recs += 1
            if recs > 1:
                errors.append(WellFormednessError("MultipleRecursion", where, g.var))
            bound_vars.append(g.var)
            guarded = False
            g = g.body
        elif isinstance(g, Var):
            if g.name not in bound_vars:
                errors.append(WellFormednessError("UnboundVariable", where, g.name))
            elif not guarded:
                errors.append(WellFormednessError("UnguardedRecursion", where, g.name))
            break
        else:
            break
        first = False
    for label in _duplicate_labels(outside, body):
        errors.append(WellFormednessError("DuplicateLabel", label))


def _duplicate_labels(outside: list[str], body: list[str]) -> list[str]:
    # A prefix may repeat the tail of the recursion body: that is a partial unfolding.
    dups = {l for l in outside if outside.count(l) > 1} | {l for l in body if body.count(l) > 1}
    k = 0
    while k < min(len(outside), len(body)) and outside[len(outside) - 1 - k] == body[len(body) - 1 - k]:
        k += 1
    head = outside[: len(outside) - k]
    dups |= set(head) & set(body)
    return sorted(dups)


def _validate_dist_binders(k: CompositeComponent, errors: list) -> None:
    subs = dict(k.roles)
    senders: dict[str, tuple[str, str]] = {}
    receivers: dict[tuple[str, str], str] = {}
    port_labels: dict[tuple[str, str], str] = {}
    for d in k.binders:
        where = f"{k.name}.{d.label}"
        for role, port, direction in ((d.receiver_role, d.receiver_port, IN), (d.sender_role, d.sender_port, OUT)):
            sub = subs.get(role)
            if sub is None:
                errors.append(WellFormednessError("BadDistributionBinder", where, f"unknown role {role}"))
                continue
            ports = sub.inputs if direction == IN else sub.outputs
            if port not in {p.name for p in ports}:
                errors.append(WellFormednessError("BadDistributionBinder", where, f"{role} has no {direction} port {port}"))
        if senders.setdefault(d.label, (d.sender_role, d.sender_port)) != (d.sender_role, d.sender_port):
            errors.append(WellFormednessError("NonBijectiveLabel", where, "several sender ports"))
        if receivers.setdefault((d.label, d.receiver_role), d.receiver_port) != d.receiver_port:
            errors.append(WellFormednessError("NonBijectiveLabel", where, "several receiver ports"))
        for key in ((d.sender_role, d.sender_port), (d.receiver_role, d.receiver_port)):
            if port_labels.setdefault(key, d.label) != d.label:
                errors.append(WellFormednessError("NonBijectiveLabel", where, f"port {key[1]} carries two labels"))
        if d.sender_role in subs and d.receiver_role in subs:
            st = port_types(subs[d.sender_role]).get(d.sender_port)
            rt = port_types(subs[d.receiver_role]).get(d.receiver_port)
            if st and rt and st != rt:
                errors.append(WellFormednessError("LabelTypeMismatch", where, f"{st} vs {rt}"))
    g = k.protocol
    while True:
        if isinstance(g, (Comm, Transit)):
            receivers_of = g.receivers if isinstance(g, Comm) else g.remaining
            where = f"{k.name}.{g.label}"
            sd = k.label_sender(g.label)
            if sd is None:
                errors.append(WellFormednessError("MissingDistributionBinder", where))
            elif sd.sender_role != g.sender:
                errors.append(WellFormednessError("BadDistributionBinder", where, f"sender is {g.sender}"))
            for q in receivers_of:
                if k.label_receiver(g.label, q) is None:
                    errors.append(WellFormednessError("MissingDistributionBinder", where, f"receiver {q}"))
            g = g.cont
        elif isinstance(g, Rec):
            g = g.body
        else:
            break


def _validate_forwarders(k: CompositeComponent, errors: list) -> None:
    subs = dict(k.roles)
    sub = subs.get(k.interface)
    outer = port_types(k)
    inner = port_types(sub) if sub is not None else {}
    inner_in = {p.name for p in sub.inputs} if sub is not None else set()
    inner_out = {p.name for p in sub.outputs} if sub is not None else set()
    outer_seen: set[str] = set()
    for f in k.forwarders:
        where = f"{k.name}[{f}]"
        if f.outer in outer_seen:
            errors.append(WellFormednessError("DuplicateForwarder", where, f.outer))
        outer_seen.add(f.outer)
        outer_ports = {p.name for p in (k.inputs if f.kind == IN else k.outputs)}
        if f.outer not in outer_ports:
            errors.append(WellFormednessError("ForwarderUnknownPort", where, f.outer))
        if f.inner not in (inner_in if f.kind == IN else inner_out):
            errors.append(WellFormednessError("ForwarderUnknownPort", where, f.inner))
        if f.outer in outer and f.inner in inner and outer[f.outer] != inner[f.inner]:
            errors.append(WellFormednessError("ForwarderTypeMismatch", where))
    for p in (*k.inputs, *k.outputs):
        if p.name not in outer_seen:
            errors.append(WellFormednessError("UnforwardedPort", f"{k.name}.{p.name}"))
