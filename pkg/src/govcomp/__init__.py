"""Governed components: reactive components coordinated by choice-free protocols,
with type extraction, protocol conformance and co-simulation checks."""
from .conformance import Derivation, IllTyped, Typer, conforms, leq, typeof
from .core import (
    BaseComponent,
    Comm,
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
    Transit,
    Var,
    validate,
)
from .dsl import ParseError, ResolveError, SourceProgram, ValidationError, parse, unparse
from .extraction import extract_base, extract_composite, local_protocol
from .projection import Recv, Send, project, show_local
from .semantics import Semantics
from .typesys import INF, OMEGA, ComponentType, Constraint, Dependency, modify, type_input, type_output

__all__ = [name for name in dir() if not name.startswith("_")]
