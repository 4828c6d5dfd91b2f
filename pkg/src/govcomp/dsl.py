"""Reader and printer for ``.gc`` programs, plus the TypeReport document format.

Example::

    type image
    fn f_u(image) -> image
    base K {
      in x: image
      out y: image
      bind y = f_u(x)
    }
    entry K
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any

from .core import (
    IN,
    OUT,
    Apply,
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
    Protocol,
    Rec,
    Store,
    Transit,
    Value,
    Var,
    validate,
)
from .typesys import INF, OMEGA, ComponentType, Constraint, Dependency

KEYWORDS = {
    "type", "fn", "base", "composite", "in", "out", "bind", "queue", "protocol",
    "roles", "binders", "interface", "entry", "rec", "end", "transit",
}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*'*)
  | (?P<sym>->|<-|[{}()\[\],:;.=])
    """,
    re.VERBOSE,
)


class DslError(Exception):
    pass


class ParseError(DslError):
    def __init__(self, message: str, line: int, col: int, expected: frozenset[str] = frozenset()):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.expected = expected


class ResolveError(DslError):
    def __init__(self, name: str, what: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: unknown {what} {name}")
        self.name = name
        self.what = what
        self.line = line
        self.col = col


class ValidationError(DslError):
    def __init__(self, errors):
        super().__init__("; ".join(map(str, errors)))
        self.errors = list(errors)


@dataclass
class SourceProgram:
    types: list[str] = field(default_factory=list)
    functions: dict[str, FunctionSig] = field(default_factory=dict)
    components: dict[str, Component] = field(default_factory=dict)
    entry: str = ""

    @property
    def entry_component(self) -> Component:
        return self.components[self.entry]


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind != "ws":
            word = m.group()
            if kind == "ident" and word in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, word, line, pos - start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - start + 1))
    return tokens


def _describe(tok: Token) -> str:
    return "end of input" if tok.kind == "eof" else repr(tok.text)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.types: list[str] = []
        self.functions: dict[str, FunctionSig] = {}
        self.raw: dict[str, tuple] = {}
        self.order: list[str] = []

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, n: int = 1) -> Token:
        return self.toks[min(self.i + n, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("kw", "sym") and self.tok.text == text

    def fail(self, message: str, *expected: str):
        raise ParseError(message, self.tok.line, self.tok.col, frozenset(expected))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {_describe(self.tok)}", text)
        tok = self.tok
        self.i += 1
        return tok

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident":
            self.fail(f"expected {what}, found {_describe(self.tok)}", "IDENT")
        tok = self.tok
        self.i += 1
        return tok

    def basic_type(self) -> str:
        tok = self.ident("basic type")
        if tok.text not in self.types:
            raise ResolveError(tok.text, "type", tok.line, tok.col)
        return tok.text

    # -- program

    def program(self) -> SourceProgram:
        while not self.at("entry"):
            if self.at("type"):
                self.i += 1
                name = self.ident("type name").text
                if name not in self.types:
                    self.types.append(name)
            elif self.at("fn"):
                self.fnsig()
            elif self.at("base") or self.at("composite"):
                self.compdecl()
            else:
                self.fail("expected declaration", "type", "fn", "base", "composite", "entry")
        self.i += 1
        entry = self.ident("entry component")
        if self.tok.kind != "eof":
            self.fail(f"unexpected {_describe(self.tok)} after entry", "end of input")
        components = {}
        building: set[str] = set()

        def build(name: str, tok: Token) -> Component:
            if name in components:
                return components[name]
            if name not in self.raw:
                raise ResolveError(name, "component", tok.line, tok.col)
            if name in building:
                raise ResolveError(name, "component (cyclic nesting)", tok.line, tok.col)
            building.add(name)
            components[name] = self.finish(self.raw[name], build)
            building.discard(name)
            return components[name]

        for name in self.order:
            build(name, self.raw[name][1])
        if entry.text not in components:
            raise ResolveError(entry.text, "component", entry.line, entry.col)
        program = SourceProgram(self.types, self.functions, components, entry.text)
        errors = validate(program.entry_component, self.functions)
        if errors:
            raise ValidationError(errors)
        return program

    def fnsig(self):
        self.expect("fn")
        name = self.ident("function name").text
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.basic_type())
            while self.at(","):
                self.i += 1
                params.append(self.basic_type())
        self.expect(")")
        self.expect("->")
        self.functions[name] = FunctionSig(name, tuple(params), self.basic_type())

    def portlist(self, direction: str) -> tuple[Port, ...]:
        ports = []
        if self.tok.kind != "ident":
            return ()
        while True:
            name = self.ident("port name").text
            self.expect(":")
            ports.append(Port(name, direction, self.basic_type()))
            if not self.at(","):
                return tuple(ports)
            self.i += 1

    def compdecl(self):
        kind = self.tok.text
        self.i += 1
        name_tok = self.ident("component name")
        if name_tok.text in self.raw:
            raise ParseError(f"component {name_tok.text} declared twice", name_tok.line, name_tok.col)
        self.expect("{")
        self.expect("in")
        inputs = self.portlist(IN)
        self.expect("out")
        outputs = self.portlist(OUT)
        if kind == "base":
            binders = []
            while self.at("bind"):
                binders.append(self.binder(inputs))
            self.expect("}")
            raw = ("base", name_tok, inputs, outputs, tuple(binders))
        else:
            self.expect("protocol")
            g = self.proto()
            self.expect("roles")
            roles = []
            while True:
                role = self.ident("role").text
                self.expect("=")
                roles.append((role, self.ident("component name")))
                if not (self.tok.kind == "ident" and self.peek().text == "="):
                    break
            self.expect("binders")
            dbinds = [self.dbind()]
            while self.tok.kind == "ident":
                dbinds.append(self.dbind())
            self.expect("interface")
            iface = self.ident("interfacing role").text
            self.expect("[")
            fwds = [self.fwd()]
            while self.at(","):
                self.i += 1
                fwds.append(self.fwd())
            self.expect("]")
            self.expect("}")
            raw = ("composite", name_tok, inputs, outputs, g, roles, tuple(dbinds), iface, fwds)
        self.raw[name_tok.text] = raw
        self.order.append(name_tok.text)

    def binder(self, inputs) -> LocalBinder:
        self.expect("bind")
        out = self.ident("output port").text
        self.expect("=")
        fn_tok = self.ident("function name")
        if fn_tok.text not in self.functions:
            raise ResolveError(fn_tok.text, "function", fn_tok.line, fn_tok.col)
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.ident("input port").text)
            while self.at(","):
                self.i += 1
                params.append(self.ident("input port").text)
        self.expect(")")
        queue = []
        if self.at("queue"):
            self.i += 1
            self.expect("[")
            if not self.at("]"):
                queue.append(self.store())
                while self.at(","):
                    self.i += 1
                    queue.append(self.store())
            self.expect("]")
        return LocalBinder(out, fn_tok.text, tuple(params), tuple(queue))

    def store(self) -> Store:
        self.expect("{")
        entries = {}
        if not self.at("}"):
            while True:
                port = self.ident("port name").text
                self.expect("=")
                entries[port] = self.value()
                if not self.at(","):
                    break
                self.i += 1
        self.expect("}")
        return Store.of(entries)

    def value(self) -> Value:
        if self.tok.kind == "string":
            lexeme = _unquote(self.tok.text)
            self.i += 1
            self.expect(":")
            return Literal(lexeme, self.basic_type())
        fn_tok = self.ident("value")
        sig = self.functions.get(fn_tok.text)
        if sig is None:
            raise ResolveError(fn_tok.text, "function", fn_tok.line, fn_tok.col)
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.value())
            while self.at(","):
                self.i += 1
                args.append(self.value())
        self.expect(")")
        return Apply(sig.name, tuple(args), sig.ret)

    def proto(self) -> Protocol:
        # prefixes are collected first and folded afterwards to avoid deep recursion
        frames: list = []
        while True:
            if self.at("end"):
                self.i += 1
                g: Protocol = End()
                break
            if self.at("rec"):
                self.i += 1
                var = self.ident("recursion variable").text
                self.expect(".")
                frames.append(("rec", var))
                continue
            if self.at("transit"):
                self.i += 1
                sender = self.ident("role").text
                self.expect("->")
                self.expect("{")
                remaining = []
                while self.tok.kind == "ident":
                    remaining.append(self.ident().text)
                self.expect("}")
                self.expect(":")
                label = self.ident("message label").text
                self.expect("(")
                v = self.value()
                self.expect(")")
                self.expect(";")
                frames.append(("transit", sender, tuple(remaining), label, v))
                continue
            if self.tok.kind == "ident" and self.peek().text == "->":
                sender = self.ident().text
                self.expect("->")
                receivers = [self.ident("role").text]
                while self.at(","):
                    self.i += 1
                    receivers.append(self.ident("role").text)
                self.expect(":")
                label = self.ident("message label").text
                self.expect(";")
                frames.append(("comm", sender, tuple(receivers), label))
                continue
            if self.tok.kind == "ident":
                g = Var(self.ident().text)
                break
            self.fail(f"expected protocol, found {_describe(self.tok)}", "end", "rec", "transit", "IDENT")
        for frame in reversed(frames):
            if frame[0] == "rec":
                g = Rec(frame[1], g)
            elif frame[0] == "comm":
                g = Comm(frame[1], frame[3], frame[2], g)
            else:
                g = Transit(frame[1], frame[3], frame[4], frame[2], g)
        return g

    def dbind(self) -> DistributionBinder:
        label = self.ident("message label").text
        self.expect(":")
        rrole = self.ident("role").text
        self.expect(".")
        rport = self.ident("port").text
        self.expect("<-")
        srole = self.ident("role").text
        self.expect(".")
        sport = self.ident("port").text
        return DistributionBinder(label, rrole, rport, srole, sport)

    def fwd(self) -> tuple[Token, Token]:
        left = self.ident("port")
        self.expect("<-")
        return left, self.ident("port")

    # -- resolution

    def finish(self, raw, build) -> Component:
        if raw[0] == "base":
            _, name_tok, inputs, outputs, binders = raw
            return BaseComponent(name_tok.text, inputs, outputs, binders)
        _, name_tok, inputs, outputs, g, roles, dbinds, iface, fwds = raw
        resolved_roles = tuple((role, build(tok.text, tok)) for role, tok in roles)
        outer_in = {p.name for p in inputs}
        outer_out = {p.name for p in outputs}
        forwarders = []
        for left, right in fwds:
            if right.text in outer_in:
                forwarders.append(Forwarder(IN, left.text, right.text))
            elif left.text in outer_out:
                forwarders.append(Forwarder(OUT, right.text, left.text))
            else:
                raise ResolveError(f"{left.text} <- {right.text}", "forwarder port", left.line, left.col)
        return CompositeComponent(name_tok.text, inputs, outputs, g, resolved_roles, dbinds, iface, tuple(forwarders))


def _unquote(text: str) -> str:
    return re.sub(r"\\(.)", r"\1", text[1:-1])


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def parse(text: str) -> SourceProgram:
    """Parse, resolve and validate a program; raises a :class:`DslError` otherwise."""
    try:
        return _Parser(text).program()
    except RecursionError:
        raise ParseError("nesting too deep", 0, 0) from None


# -- printing -------------------------------------------------------------------

def show_value(v: Value) -> str:
    if isinstance(v, Literal):
        return f"{_quote(v.lexeme)}:{v.btype}"
    return f"{v.fn}({', '.join(show_value(a) for a in v.args)})"


def show_protocol(g: Protocol) -> str:
    parts = []
    while True:
        if isinstance(g, Comm):
            parts.append(f"{g.sender} -> {', '.join(g.receivers)} : {g.label} ; ")
            g = g.cont
        elif isinstance(g, Transit):
            parts.append(f"transit {g.sender} -> {{{' '.join(g.remaining)}}} : {g.label}({show_value(g.value)}) ; ")
            g = g.cont
        elif isinstance(g, Rec):
            parts.append(f"rec {g.var} . ")
            g = g.body
        elif isinstance(g, Var):
            parts.append(g.name)
            return "".join(parts)
        else:
            parts.append("end")
            return "".join(parts)


def _ports(ports) -> str:
    return ", ".join(f"{p.name}: {p.btype}" for p in ports)


def show_component(k: Component) -> str:
    head = "base" if isinstance(k, BaseComponent) else "composite"
    lines = [f"{head} {k.name} {{", f"  in {_ports(k.inputs)}".rstrip(), f"  out {_ports(k.outputs)}".rstrip()]
    if isinstance(k, BaseComponent):
        for b in k.binders:
            line = f"  bind {b.out} = {b.fn}({', '.join(b.params)})"
            if b.queue:
                stores = ", ".join(
                    "{" + ", ".join(f"{x} = {show_value(v)}" for x, v in s.entries) + "}" for s in b.queue
                )
                line += f" queue [{stores}]"
            lines.append(line)
    else:
        lines.append(f"  protocol {show_protocol(k.protocol)}")
        lines.append("  roles " + " ".join(f"{r} = {sub.name}" for r, sub in k.roles))
        lines.append("  binders")
        for d in k.binders:
            lines.append(f"    {d.label} : {d.receiver_role}.{d.receiver_port} <- {d.sender_role}.{d.sender_port}")
        lines.append(f"  interface {k.interface} [{', '.join(str(f) for f in k.forwarders)}]")
    lines.append("}")
    return "\n".join(lines)


def unparse(program: SourceProgram) -> str:
    """Canonical text of ``program``; ``parse(unparse(p)) == p``."""
    out = [f"type {t}" for t in program.types]
    out += [f"fn {s.name}({', '.join(s.params)}) -> {s.ret}" for s in program.functions.values()]
    out += [show_component(k) for k in program.components.values()]
    out.append(f"entry {program.entry}")
    return "\n".join(out) + "\n"


# -- type reports -------------------------------------------------------------------

def _nat(n):
    return "inf" if n == INF else int(n)


def _unnat(n):
    return INF if n == "inf" else int(n)


def type_report(t: ComponentType) -> dict[str, Any]:
    constraints = []
    for c in sorted(t.constraints, key=lambda c: c.port):
        ds = []
        for d in sorted(c.deps, key=lambda d: d.port):
            if d.initial:
                ds.append({"port": d.port, "kind": "initial"})
            else:
                ds.append({"port": d.port, "kind": "each", "count": _nat(d.amount)})
        constraints.append({"port": c.port, "basicType": c.btype, "bound": _nat(c.bound), "deps": ds})
    return {
        "inputs": [{"port": x, "basicType": b} for x, b in sorted(t.inputs)],
        "constraints": constraints,
    }


def type_from_report(doc: dict[str, Any]) -> ComponentType:
    constraints = []
    for c in doc["constraints"]:
        ds = frozenset(
            Dependency(d["port"], OMEGA if d["kind"] == "initial" else _unnat(d["count"])) for d in c["deps"]
        )
        constraints.append(Constraint(c["port"], c["basicType"], _unnat(c["bound"]), ds))
    return ComponentType.of([(i["port"], i["basicType"]) for i in doc["inputs"]], constraints)


def dumps_report(t: ComponentType) -> str:
    return json.dumps(type_report(t), indent=2)


def loads_report(text: str) -> ComponentType:
    return type_from_report(json.loads(text))


def render_type(t: ComponentType) -> str:
    """Human-readable multi-line rendering of a type."""
    lines = ["inputs:"]
    lines += [f"  {x}({b})" for x, b in sorted(t.inputs)] or ["  (none)"]
    lines.append("constraints:")
    lines += [f"  {c}" for c in sorted(t.constraints, key=lambda c: c.port)] or ["  (none)"]
    return "\n".join(lines)
