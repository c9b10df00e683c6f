import json

import numpy as np
import pytest

from cli_flows import FLOWS, SEEDED, body, prepare, run
from kframekit import cli


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    prepare(d)
    return d


def test_parseval_kframe_check_on_generated(work):
    proc = run(["check", "parseval-kframe", "--k", "k.json", "--frame", "f.json"], work)
    assert proc.returncode == 0
    out = body(proc)
    assert out["passed"] and out["residual"] <= 1e-10
    assert out["tolerance"]["eq_abs"] == 1e-9


def test_trace_eigen_report_diag(work):
    proc = run(["gen", "parseval-kframe", "--n", 2, "--m", 4, "--k-spec", "diag:1,0.5", "--seed", 0,
                "--out", "td.json", "--k-out", "tk.json"], work)
    assert proc.returncode == 0
    proc = run(["report", "trace-eigen", "--k", "tk.json", "--frame", "td.json"], work)
    assert proc.returncode == 0
    out = body(proc)
    assert out["sum_norms_sq"] == pytest.approx(1.25)
    assert out["eigen_claim_holds"] is False


def test_equal_norm_dual_zero_a(work):
    proc = run(["construct", "equal-norm-dual", "--k", "ref_k.json", "--frame", "ref_f.json", "--a", 0,
                "--u", "ref_u.json"], work)
    assert proc.returncode == 2
    assert json.loads(proc.stderr)["error"] == "InvalidInput"
    assert proc.stdout == ""


def test_equal_norm_dual_search_needs_seed(work):
    proc = run(["construct", "equal-norm-dual", "--k", "ref_k.json", "--frame", "ref_f.json", "--a", 1], work)
    assert proc.returncode == 2


def test_failed_check_exits_one(work):
    proc = run(["check", "parseval", "--frame", "rf.json"], work)
    assert proc.returncode == 1
    assert body(proc)["passed"] is False


def test_hypothesis_violation_exits_one(work):
    # non-Parseval input to the K-dilation
    proc = run(["construct", "k-dilate", "--k", "i.json", "--frame", "rf.json"], work)
    assert proc.returncode in (1, 2)
    proc = run(["construct", "canonical-parseval", "--k", "k.json", "--frame", "rf.json"], work)
    out = body(proc)
    assert proc.returncode == 1 and "hypothesis" in out


def test_isometry_search_failure_is_reported(work, tmp_path):
    from kframekit.codec import codec_save, frame_doc, operator_doc
    from kframekit import FrameSystem

    codec_save(operator_doc(np.eye(1)), tmp_path / "k1.json")
    codec_save(frame_doc(FrameSystem(np.array([[1.0, 1.0]]) / np.sqrt(2))), tmp_path / "f1.json")
    proc = run(["construct", "equal-norm-dual", "--k", tmp_path / "k1.json", "--frame", tmp_path / "f1.json",
                "--a", 1, "--seed", 0], work)
    assert proc.returncode == 1
    assert body(proc)["error"] == "IsometrySearchFailed"


def test_schema_violation_exits_two(work):
    (work / "bad.json").write_text(json.dumps({"kind": "frame", "dim": 0, "vectors": [[]]}))
    proc = run(["check", "frame", "--frame", "bad.json"], work)
    assert proc.returncode == 2
    assert json.loads(proc.stderr)["error"] == "CodecError"


def test_usage_error_is_json(work):
    proc = run(["check", "nonsense"], work)
    assert proc.returncode == 2
    assert "message" in json.loads(proc.stderr)


def test_error_identity_needs_seed(work):
    proc = run(["report", "error-identity", "--k", "i.json", "--frame", "pf.json", "--dual", "pf.json"], work)
    assert proc.returncode == 2


def test_bounds(work):
    out = body(run(["bounds", "frame", "--frame", "pf.json"], work))
    assert out["lower"] == pytest.approx(1.0) and out["upper"] == pytest.approx(1.0)
    out = body(run(["bounds", "kframe", "--k", "k.json", "--frame", "f.json"], work))
    assert out["lower"] == pytest.approx(1.0, rel=1e-9)


@pytest.mark.parametrize("cmd", SEEDED, ids=lambda c: " ".join(map(str, c[:2])))
def test_seeded_commands_are_deterministic(work, cmd):
    a, b = run(cmd, work), run(cmd, work)
    assert a.returncode == 0, a.stderr
    assert a.stdout == b.stdout


@pytest.mark.parametrize("flow", FLOWS, ids=lambda f: f[0][1])
def test_construct_then_check(work, flow):
    construct, checks = flow
    proc = run(construct, work)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    for check in checks:
        proc = run(check, work)
        assert proc.returncode == 0, proc.stdout + proc.stderr


def test_main_in_process(work, capsys, monkeypatch):
    monkeypatch.chdir(work)
    assert cli.main(["check", "frame", "--frame", "rf.json"]) == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True
