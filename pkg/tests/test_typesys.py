import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from govcomp.core import IN, OUT, Forwarder
from govcomp.typesys import (
    INF,
    OMEGA,
    ComponentType,
    Constraint,
    Dependency,
    NotAnInput,
    NotEnabled,
    constraint_input,
    deps,
    enabled_outputs,
    modify,
    type_input,
    type_output,
)


def c(port, btype, bound, **amounts):
    return Constraint(port, btype, bound, deps(**amounts))


def test_constraint_input_rules():
    assert constraint_input(c("y", "c", 1, x=OMEGA), "x") == c("y", "c", 1)
    assert constraint_input(c("v", "v", 1), "x") == c("v", "v", 1)
    assert constraint_input(c("y", "b", INF, x=2), "x") == c("y", "b", INF, x=3)


def test_type_input_example():
    t = ComponentType.of({"x": "i"}, [c("y", "c", 1, x=OMEGA), c("v", "v", 1)])
    b, t2 = type_input(t, "x")
    assert b == "i"
    assert t2 == ComponentType.of({"x": "i"}, [c("y", "c", 1), c("v", "v", 1)])


def test_not_an_input():
    with pytest.raises(NotAnInput):
        type_input(ComponentType.of({}, []), "x")


def test_infinite_count_absorbs_input():
    t = ComponentType.of({"x": "i"}, [c("y", "c", INF, x=INF)])
    assert type_input(t, "x")[1] == t


@pytest.mark.parametrize("constraint, reason", [
    (c("y", "c", 1, x=OMEGA), NotEnabled.INITIAL_DEP),
    (c("y", "c", 1, x=0), NotEnabled.ZERO_COUNT),
    (c("y", "c", 0, x=3), NotEnabled.ZERO_BOUND),
])
def test_not_enabled_reasons(constraint, reason):
    t = ComponentType.of({"x": "i"}, [constraint])
    with pytest.raises(NotEnabled) as e:
        type_output(t, "y")
    assert e.value.reason == reason


def test_output_without_constraint():
    with pytest.raises(NotEnabled) as e:
        type_output(ComponentType.of({}, []), "y")
    assert e.value.reason == NotEnabled.NO_CONSTRAINT


def test_type_output_arithmetic():
    t = ComponentType.of({"x": "i"}, [c("y", "b", 2, x=1)])
    assert type_output(t, "y") == ("b", ComponentType.of({"x": "i"}, [c("y", "b", 1, x=0)]))
    free = ComponentType.of({}, [c("v", "version", INF)])
    assert type_output(free, "v") == ("version", free)


def test_modify_portal(irs):
    from govcomp import typeof

    t_portal = typeof(irs.components["K_Portal"], irs.functions)
    fwds = irs.entry_component.forwarders
    m = modify(fwds, t_portal)
    assert m.constraint("y_p").dep("x_p") == Dependency("x_p", INF)
    assert m.constraint("y_p'") == t_portal.constraint("y_p'")
    t_re = typeof(irs.components["K_RE"], irs.functions)
    assert modify(fwds, t_re) == t_re


def test_modify_drops_initial_dependency():
    t = ComponentType.of({"x": "i"}, [c("y", "c", 1, x=OMEGA)])
    assert modify([Forwarder(IN, "x", "outer")], t).constraint("y").deps == frozenset()
    assert modify([Forwarder(OUT, "y", "outer")], t) == t


# -- properties -------------------------------------------------------------------

amounts = st.one_of(st.integers(min_value=0, max_value=5), st.just(OMEGA))
bounds = st.one_of(st.integers(min_value=0, max_value=5), st.just(INF))


@st.composite
def types(draw, infinite=False):
    xs = ["x1", "x2", "x3"]
    inputs = {x: "b" for x in xs}
    extra = [st.just(INF)] if infinite else []
    constraints = []
    for y in draw(st.sets(st.sampled_from(["y1", "y2", "y3"]), min_size=1)):
        ports = draw(st.sets(st.sampled_from(xs), max_size=3))
        ds = frozenset(Dependency(x, draw(st.one_of(amounts, *extra))) for x in ports)
        constraints.append(Constraint(y, "b", draw(bounds), ds))
    return ComponentType.of(inputs, constraints)


def walk(draw, t, n):
    for _ in range(n):
        moves = [("in", x) for x, _ in sorted(t.inputs)] + [("out", y) for y in enabled_outputs(t)]
        kind, p = draw(st.sampled_from(moves))
        t = type_input(t, p)[1] if kind == "in" else type_output(t, p)[1]
    return t


@given(st.data(), types(infinite=True))
def test_input_receptive_in_every_reachable_state(data, t):
    t = walk(data.draw, t, data.draw(st.integers(0, 6)))
    for x, b in t.inputs:
        assert type_input(t, x)[0] == b


def _count(d):
    return -1 if d.initial else d.amount


@given(types(infinite=True), st.sampled_from(["x1", "x2", "x3"]))
def test_input_is_monotone(t, x):
    _, t2 = type_input(t, x)
    for c1 in t.constraints:
        c2 = t2.constraint(c1.port)
        assert c2.bound == c1.bound
        for d1 in c1.deps:
            d2 = c2.dep(d1.port)
            if d2 is not None:
                assert _count(d2) >= _count(d1)


@given(types(), st.sampled_from(["x1", "x2", "x3"]))
def test_output_and_independent_input_commute(t, x):
    for y in enabled_outputs(t):
        assume(t.constraint(y).dep(x) is None)
        a = type_input(type_output(t, y)[1], x)[1]
        b = type_output(type_input(t, x)[1], y)[1]
        assert a == b


@given(types(infinite=True))
def test_enabled_outputs_step(t):
    for y in enabled_outputs(t):
        b, t2 = type_output(t, y)
        assert b == t.constraint(y).btype
        assert t2.constraint(y).bound == t.constraint(y).bound - 1
