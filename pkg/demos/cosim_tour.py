"""Generate random well-typed components and co-simulate them against their types.

A typer that forgets queued values is caught immediately, which shows the
harness is sensitive to wrong types."""
from govcomp import fixtures, parse, unparse
from govcomp.conformance import Typer
from govcomp.cosim import GenConfig, check_progress, check_subject_reduction, generate
from govcomp.typesys import ComponentType, Constraint, Dependency

cfg = GenConfig()
program = generate(3, cfg)
print(unparse(program))
assert parse(unparse(program)) == program

for seed in range(10):
    p = generate(seed, cfg)
    sr = check_subject_reduction(p.entry_component, 6, p.functions)
    pr = check_progress(p.entry_component, 4, cfg.tau_budget, p.functions)
    print(f"seed {seed}: {type(p.entry_component).__name__:<19} states={sr.states:<5} "
          f"edges={sr.edges:<5} violations={len(sr.violations) + len(pr.violations)}")


def forgetful(typer):
    def typeof(k):
        t = typer(k)
        return ComponentType(t.inputs, frozenset(
            Constraint(c.port, c.btype, c.bound,
                       frozenset(d if d.initial else Dependency(d.port, 0) for d in c.deps))
            for c in t.constraints))
    return typeof


p = fixtures.load("irs_rec")
report = check_subject_reduction(p.entry_component, 4, p.functions, forgetful(Typer(p.functions)))
print()
print(report.render().splitlines()[3])
print(report.violations[0])
