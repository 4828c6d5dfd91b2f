import pytest

from govcomp.conformance import Typer
from govcomp.core import BaseComponent, CompositeComponent, validate
from govcomp.cosim import (
    BUDGET_EXCEEDED,
    GenConfig,
    Unsatisfiable,
    check_progress,
    check_subject_reduction,
    cosim_programs,
    generate,
)
from govcomp.typesys import ComponentType, Constraint, Dependency


def test_generate_is_deterministic():
    assert generate(7) == generate(7)


def test_generated_components_are_valid():
    seen = set()
    for seed in range(30):
        p = generate(seed)
        assert validate(p.entry_component, p.functions) == []
        Typer(p.functions)(p.entry_component)
        seen.add(type(p.entry_component))
    assert seen == {BaseComponent, CompositeComponent}


def test_generate_base_only():
    p = generate(0, GenConfig(depth_bound=1))
    assert isinstance(p.entry_component, BaseComponent)


@pytest.mark.parametrize("cfg", [GenConfig(max_ports=0), GenConfig(max_protocol_length=-1),
                                 GenConfig(recursion_probability=2.0)])
def test_unsatisfiable_config(cfg):
    with pytest.raises(Unsatisfiable):
        generate(0, cfg)


def test_subject_reduction_one_shot(irs):
    r = check_subject_reduction(irs.entry_component, 6, irs.functions)
    assert r.ok and r.edges > 0 and r.states > 1


def test_subject_reduction_base(irs):
    r = check_subject_reduction(irs.components["K_Portal"], 4, irs.functions)
    assert r.ok


def corrupt(typer):
    def typeof(k):
        t = typer(k)
        # ignore queued values: counts no longer follow inputs
        return ComponentType(t.inputs, frozenset(
            Constraint(c.port, c.btype, c.bound,
                       frozenset(d if d.initial else Dependency(d.port, 0) for d in c.deps))
            for c in t.constraints))
    return typeof


def test_corrupted_typeof_is_detected(irs_rec):
    typer = Typer(irs_rec.functions)
    r = check_subject_reduction(irs_rec.entry_component, 6, irs_rec.functions, corrupt(typer))
    assert not r.ok
    assert any(v.transition.startswith("x?") for v in r.violations)


def test_progress_fixtures(all_fixtures):
    for p in all_fixtures.values():
        r = check_progress(p.entry_component, 6, 16, p.functions)
        assert r.ok and not r.budget_exceeded


def test_progress_needs_protocol_steps(irs):
    from govcomp.core import Literal
    from govcomp.semantics import Semantics

    k = Semantics(irs.functions).input(irs.entry_component, "x", Literal("i", "image"))
    r = check_progress(k, 0, 0, irs.functions)
    assert r.ok
    assert [v.transition for v in r.budget_exceeded] == ["y!(class)"]
    assert r.budget_exceeded[0].check == BUDGET_EXCEEDED
    assert not check_progress(k, 0, 4, irs.functions).budget_exceeded


def test_progress_immediate_output(irs):
    r = check_progress(irs.entry_component, 0, 0, irs.functions)
    assert r.ok and not r.budget_exceeded
    assert r.edges == 2  # x? and y'!


def test_reports_are_deterministic():
    ps = [generate(s) for s in range(5)]
    a = cosim_programs(ps, 4, 8)
    b = cosim_programs([generate(s) for s in range(5)], 4, 8)
    assert a == b
    assert a.seeds == 5
    assert "violations: 0" in a.render()
    assert a.to_dict()["violations"] == []
