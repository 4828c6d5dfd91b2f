import io
import json
import subprocess
import sys

import pytest

from govcomp import fixtures
from govcomp.cli import main
from govcomp.dsl import loads_report
from govcomp.typesys import INF, OMEGA


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def irs_path():
    return str(fixtures.path("irs"))


def test_type(irs_path):
    code, out, _ = run("type", irs_path)
    assert code == 0
    assert "y(class):1:[x:Ω]" in out and "y'(version):∞:[]" in out


def test_type_json(irs_path):
    code, out, _ = run("type", irs_path, "--json")
    t = loads_report(out)
    assert t.constraint("y").bound == 1
    assert t.constraint("y").dep("x").amount is OMEGA
    assert t.constraint("y'").bound == INF


def test_type_of_named_component(irs_path):
    code, out, _ = run("type", irs_path, "--component", "K_RE")
    assert code == 0 and "y_re(class):∞:[x_re:0]" in out
    assert run("type", irs_path, "--component", "Nope")[0] == 1


def test_project(irs_path):
    code, out, _ = run("project", irs_path, "--role", "Portal")
    assert (code, out) == (0, "y_p!:image . x_p'?:class . end\n")
    assert run("project", irs_path, "--role", "Nobody")[0] == 1


def test_check_ok(irs_path):
    code, out, _ = run("check", irs_path)
    assert code == 0 and "constraints:" in out


def test_check_ill_typed(tmp_path):
    # RE waits on a second image that the protocol never delivers
    text = fixtures.source("irs").replace("fn classify(image) -> class", "fn classify(image, image) -> class")
    text = text.replace("in x_re: image", "in x_re: image, x_re2: image")
    text = text.replace("bind y_re = classify(x_re)", "bind y_re = classify(x_re, x_re2)")
    path = tmp_path / "bad.gc"
    path.write_text(text)
    code, out, _ = run("check", str(path))
    assert code == 1
    assert "ill-typed: conformance failed at K_IRS.RE" in out
    assert "[InpConf]" in out and "FAILED: OutConf" in out


def test_constant_classifier_is_well_typed(tmp_path):
    text = fixtures.source("irs").replace("fn classify(image) -> class", "fn classify(image) -> class\nfn c0() -> class")
    text = text.replace("bind y_re = classify(x_re)", "bind y_re = c0()")
    path = tmp_path / "ok.gc"
    path.write_text(text)
    assert run("check", str(path))[0] == 0


def test_parse_error_is_a_diagnostic(tmp_path):
    path = tmp_path / "empty.gc"
    path.write_text("")
    code, _, err = run("check", str(path))
    assert code == 1 and "expected declaration" in err


def test_missing_file():
    assert run("check", "/nonexistent.gc")[0] == 1


def test_simulate(irs_path):
    code, out, _ = run("simulate", irs_path, "--steps", "8", "--seed", "3")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 8
    assert all(line.startswith(f"STEP {i} ") and " ;; " in line for i, line in enumerate(lines, 1))
    assert out == run("simulate", irs_path, "--steps", "8", "--seed", "3")[1]


def test_cosim_file(irs_path):
    code, out, _ = run("cosim", irs_path, "--depth", "4", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["violations"] == [] and doc["seeds"] == 1


def test_cosim_generate():
    code, out, _ = run("cosim", "--generate", "--seeds", "100", "--depth", "6")
    assert code == 0 and "violations: 0" in out


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["project", "x.gc"], ["cosim"], ["simulate", "x.gc"]])
def test_usage_errors(argv, irs_path):
    code, _, err = run(*argv)
    assert code == 2


def test_module_entry_point(irs_path):
    proc = subprocess.run([sys.executable, "-m", "govcomp", "project", irs_path, "--role", "RE"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "x_re?:image . y_re!:class . end"
