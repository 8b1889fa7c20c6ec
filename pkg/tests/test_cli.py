import json
import subprocess
import sys

import pytest

from lpsasakian.builtin import EXAMPLE3
from lpsasakian.cli import EXIT_FAIL, EXIT_INTERNAL, EXIT_OK, EXIT_USAGE, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spec_example_all_pass(capsys):
    code, out, _ = run(
        ["verify", "example3", "--suites", "axioms,connection,curvature", "--alpha", "1", "--beta", "0", "--seed", "7"],
        capsys,
    )
    assert code == EXIT_OK
    assert "0 failed" in out


def test_unknown_suite_is_usage_error(capsys):
    code, _, err = run(["verify", "example3", "--suites", "nosuch"], capsys)
    assert code == EXIT_USAGE
    assert "unknown suite" in err


def test_failure_exit_code_and_fail_rows(capsys):
    code, out, _ = run(["verify", "example3", "--suites", "curvature", "--alpha", "0", "--beta", "1"], capsys)
    assert code == EXIT_FAIL
    assert "closed_form" in out and "FAIL" in out


def test_json_is_byte_identical_across_runs_and_workers(tmp_path):
    outs = []
    for workers in ("1", "1", "3"):
        path = tmp_path / f"r{len(outs)}.json"
        main(["verify", "example3-leaf", "--format", "json", "--out", str(path), "--workers", workers,
              "--samples", "16"])
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_json_schema_contents(tmp_path):
    path = tmp_path / "r.json"
    code = main(["verify", "example3-leaf", "--format", "json", "--out", str(path), "--samples", "16"])
    doc = json.loads(path.read_text())
    assert code == EXIT_FAIL  # printed closed forms fail off beta(beta - alpha) = 0
    assert doc["schema"] == 1
    assert doc["config"]["seed"] == 0
    assert [(p["alpha"], p["beta"]) for p in doc["per_grid_point"]] == [
        (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.7, -1.3)
    ]
    s = doc["summary"]
    assert s["vacuous"] > 0 and s["not_applicable"] > 0 and s["measured"] > 0
    flags = {f["id"] for f in doc["flags"]}
    assert {"curvature_minus_a_read_as_alpha", "torsion_model_phiY_read_as_phiU"} <= flags
    statuses = {e["status"] for p in doc["per_grid_point"] for r in p["reports"] for e in r["entries"]}
    assert statuses <= {"pass", "fail", "vacuous", "not_applicable", "measured"}


def test_grid_is_cartesian_product(tmp_path):
    path = tmp_path / "r.json"
    main(["verify", "example3", "--suites", "axioms", "--alpha", "0", "--alpha", "1", "--beta", "2",
          "--beta", "3", "--format", "json", "--out", str(path), "--samples", "8"])
    doc = json.loads(path.read_text())
    assert [(p["alpha"], p["beta"]) for p in doc["per_grid_point"]] == [(0, 2), (0, 3), (1, 2), (1, 3)]


def test_square_grid_has_25_points(tmp_path):
    path = tmp_path / "r.json"
    main(["verify", "example3", "--suites", "torsion", "--grid", "square", "--format", "json", "--out", str(path),
          "--samples", "8"])
    assert len(json.loads(path.read_text())["per_grid_point"]) == 25


def test_tolerance_override(capsys):
    code, out, _ = run(["verify", "example3", "--suites", "curvature", "--tol", "curvature=10"], capsys)
    assert code == EXIT_OK
    code, _, err = run(["verify", "example3", "--tol", "curvature"], capsys)
    assert code == EXIT_USAGE


def test_samples_lower_bound(capsys):
    assert run(["verify", "example3", "--samples", "7"], capsys)[0] == EXIT_USAGE


def test_submanifold_suite_needs_section(capsys):
    assert run(["verify", "example3", "--suites", "lemma54"], capsys)[0] == EXIT_USAGE


def test_missing_manifest_path(capsys):
    assert run(["verify", "/nonexistent/x.manifest"], capsys)[0] == EXIT_USAGE


def test_manifest_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.manifest"
    bad.write_text(EXAMPLE3.replace("0, exp(z), 0", "0, e^^z, 0"))
    code, _, err = run(["manifest", "check", str(bad)], capsys)
    assert code == EXIT_USAGE
    assert "line 7" in err


def test_manifest_check_ok(tmp_path, capsys):
    good = tmp_path / "good.manifest"
    good.write_text(EXAMPLE3)
    code, out, _ = run(["manifest", "check", str(good)], capsys)
    assert code == EXIT_OK
    assert "dimension 3" in out


def test_report_subcommand_renders_saved_json(tmp_path, capsys):
    path = tmp_path / "r.json"
    main(["verify", "example3", "--suites", "axioms", "--format", "json", "--out", str(path), "--samples", "8"])
    code, out, _ = run(["report", str(path)], capsys)
    assert code == EXIT_OK
    assert "axioms" in out and "summary:" in out
    code, out2, _ = run(["report", str(path), "--format", "json"], capsys)
    assert out2 == path.read_text()


def test_report_rejects_other_schema(tmp_path, capsys):
    path = tmp_path / "r.json"
    path.write_text('{"schema": 99}')
    assert run(["report", str(path)], capsys)[0] == EXIT_USAGE


def test_internal_errors_exit_3(monkeypatch, capsys):
    import lpsasakian.cli as cli

    def boom(*a, **k):
        raise RuntimeError("boom")

    monkeypatch.setitem(cli.SUITES, "axioms", boom)
    assert run(["verify", "example3", "--suites", "axioms"], capsys)[0] == EXIT_INTERNAL


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lpsasakian", "verify", "example3", "--suites", "axioms"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "eta_xi" in proc.stdout


@pytest.mark.parametrize("argv", [[], ["verify"], ["manifest"], ["verify", "example3", "--format", "xml"]])
def test_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == EXIT_USAGE
