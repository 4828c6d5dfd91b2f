import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from govcomp import fixtures
from govcomp.core import Apply, Literal, Transit
from govcomp.cosim import GenConfig, generate
from govcomp.dsl import (
    DslError,
    ParseError,
    ResolveError,
    ValidationError,
    dumps_report,
    loads_report,
    parse,
    type_from_report,
    type_report,
    unparse,
)
from govcomp.typesys import INF, OMEGA, ComponentType, Constraint, Dependency


def test_fixture_entry(irs):
    assert irs.entry == "K_IRS"
    assert [p.name for p in irs.entry_component.outputs] == ["y", "y'"]
    assert irs.types == ["image", "class", "version"]


@pytest.mark.parametrize("name", fixtures.NAMES)
def test_fixture_round_trip(name):
    p = fixtures.load(name)
    assert parse(unparse(p)) == p


def test_empty_file():
    with pytest.raises(ParseError) as e:
        parse("")
    assert e.value.message == "expected declaration"
    assert (e.value.line, e.value.col) == (1, 1)
    assert "entry" in e.value.expected


def test_undeclared_function():
    text = fixtures.source("irs").replace("fn classify(image) -> class\n", "")
    with pytest.raises(ResolveError) as e:
        parse(text)
    assert e.value.name == "classify"


def test_unknown_component_and_type():
    with pytest.raises(ResolveError):
        parse("entry K")
    with pytest.raises(ResolveError) as e:
        parse("base K { in x: blob out } entry K")
    assert e.value.name == "blob"


def test_validation_error():
    text = "type t\nbase K {\n  in x: t\n  out y: t\n}\nentry K\n"
    with pytest.raises(ValidationError) as e:
        parse(text)
    assert [err.kind for err in e.value.errors] == ["MissingBinder"]


def test_syntax_error_position():
    with pytest.raises(ParseError) as e:
        parse("type t\nbase K {\n  in x t\n}")
    assert e.value.line == 3


def test_minimal_base():
    p = parse("base K { in out } entry K")
    assert unparse(p) == "base K {\n  in\n  out\n}\nentry K\n"
    assert parse(unparse(p)) == p


def test_recursion_prints_as_rec(irs_rec):
    text = unparse(irs_rec)
    assert "rec X . Portal -> RE : image ; RE -> Portal : class ; X" in text


def test_runtime_forms_round_trip(irs):
    text = fixtures.source("irs").replace(
        "bind y_re = classify(x_re)",
        'bind y_re = classify(x_re) queue [{x_re = f_u("a\\"b":image)}, {x_re = "c":image}]',
    ).replace(
        "protocol Portal -> RE : image ;",
        'protocol transit Portal -> {RE} : image(f_u("a":image)) ;',
    )
    p = parse(text)
    k = p.entry_component
    assert isinstance(k.protocol, Transit)
    assert k.protocol.value == Apply("f_u", (Literal("a", "image"),), "image")
    queue = k.role("RE").binders[0].queue
    assert queue[0]["x_re"].args[0].lexeme == 'a"b'
    assert parse(unparse(p)) == p


def test_forward_reference_between_components():
    text = fixtures.source("irs")
    composite = text[text.index("composite"):text.index("entry")]
    reordered = text.replace(composite, "").replace("base K_Portal", composite + "base K_Portal")
    assert parse(reordered).entry_component == parse(text).entry_component


def test_cyclic_nesting_is_rejected():
    text = fixtures.source("irs").replace("RE = K_RE", "RE = K_IRS")
    with pytest.raises(ResolveError):
        parse(text)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_generated_programs_round_trip(seed):
    p = generate(seed, GenConfig())
    assert parse(unparse(p)) == p


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet=string.printable + "Ω∞", max_size=200))
def test_parsing_is_total(text):
    try:
        parse(text)
    except DslError:
        pass


tokens = st.sampled_from([
    "type", "fn", "base", "composite", "in", "out", "bind", "queue", "protocol", "roles",
    "binders", "interface", "entry", "rec", "end", "transit", "K", "x", "t", "f", "->",
    "<-", "{", "}", "(", ")", "[", "]", ",", ":", ";", ".", "=", '"v"', "\n",
])


@settings(max_examples=300, deadline=None)
@given(st.lists(tokens, max_size=60))
def test_parsing_is_total_on_token_soup(parts):
    try:
        parse(" ".join(parts))
    except DslError:
        pass


def test_deep_nesting_is_a_diagnostic():
    value = "f(" * 5000 + '"v":t' + ")" * 5000
    text = f"type t\nfn f(t) -> t\nbase K {{ in x: t out y: t bind y = f(x) queue [{{x = {value}}}] }}\nentry K"
    with pytest.raises(DslError):
        parse(text)


nats = st.one_of(st.integers(min_value=0, max_value=20), st.just(INF))
ports = st.sampled_from(["x", "x'", "x1", "x2", "z"])


@st.composite
def component_types(draw):
    inputs = draw(st.dictionaries(ports, st.sampled_from(["a", "b"]), max_size=4))
    constraints = []
    for y in draw(st.sets(st.sampled_from(["y", "y'", "y2"]), max_size=3)):
        dep_ports = draw(st.sets(st.sampled_from(sorted(inputs) or ["x"]), max_size=3)) if inputs else set()
        ds = frozenset(Dependency(x, draw(st.one_of(nats, st.just(OMEGA)))) for x in dep_ports)
        constraints.append(Constraint(y, draw(st.sampled_from(["a", "b"])), draw(nats), ds))
    return ComponentType.of(inputs, constraints)


@given(component_types())
def test_type_report_round_trip(t):
    assert type_from_report(type_report(t)) == t
    assert loads_report(dumps_report(t)) == t


def test_type_report_shape(irs):
    from govcomp import typeof

    doc = type_report(typeof(irs.entry_component, irs.functions))
    assert doc["inputs"] == [{"port": "x", "basicType": "image"}]
    y = doc["constraints"][0]
    assert y == {"port": "y", "basicType": "class", "bound": 1, "deps": [{"port": "x", "kind": "initial"}]}
    assert doc["constraints"][1]["bound"] == "inf"
