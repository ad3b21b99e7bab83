import io
import json
import subprocess
import sys

import pytest

from rotospec.cli import EXIT_OK, EXIT_PRECISION, EXIT_UNDETERMINED, EXIT_USAGE, main, read_config

GOLDEN = "surd:(-1+1*sqrt(5))/2"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


# exit-code matrix: (argv, expected exit code, expected verdict or None)
MATRIX = [
    (["classify", "--x", "rational:1/3", "--lambda", "complex:2,0"], EXIT_OK, "NotInSpectrum"),
    (["classify", "--x", "rational:1/3", "--lambda", "angle:rational:1/2"], EXIT_OK, "NotInSpectrum"),
    (["classify", "--x", "rational:1/3", "--lambda", "orbit:2"], EXIT_OK, "Eigenvalue"),
    (["classify", "--x", "liouville:2,3", "--lambda", "angle:rational:0/1", "--space", "H0"], EXIT_OK,
     "InSpectrum"),
    (["classify", "--x", GOLDEN, "--lambda", "angle:rational:1/3", "--n", "50"], EXIT_UNDETERMINED,
     "Undetermined"),
    (["classify", "--x", GOLDEN, "--lambda", "angle:rational:1/3", "--space", "H", "--n", "50"],
     EXIT_UNDETERMINED, "Undetermined"),
    (["classify", "--x", "nonsense", "--lambda", "orbit:1"], EXIT_USAGE, None),
    (["classify", "--lambda", "orbit:1"], EXIT_USAGE, None),
    (["classify", "--x", "rational:1/3", "--lambda", "orbit:1", "--space", "Q"], EXIT_USAGE, None),
    (["classify", "--x", "rational:1/3", "--lambda", "orbit:1", "--precision", "8"], EXIT_USAGE, None),
    (["frobnicate"], EXIT_USAGE, None),
    ([], EXIT_USAGE, None),
]


@pytest.mark.parametrize("argv, code, verdict", MATRIX)
def test_exit_code_matrix(argv, code, verdict):
    got, out, err = run(*argv)
    assert got == code, err
    if verdict:
        assert json.loads(out)["verdict"] == verdict
    else:
        assert "rotospec:" in err


def test_precision_failure_exit_code():
    # 3x ranges over [0.7, 1.3] for this ball, so |r^3 - 1| cannot be enclosed away from zero
    code, _, err = run("criterion", "--x", "ball:1/3±1/10", "--lambda", "angle:rational:0/1", "--n", "5")
    assert code == EXIT_PRECISION and "precision" in err
    code, out, _ = run("classify", "--x", "ball:1/3±1/10", "--lambda", "angle:rational:0/1", "--n", "5")
    assert code == EXIT_UNDETERMINED
    assert run("construct", "--m", "1")[0] == EXIT_USAGE


def test_golden_classify_not_in_spectrum():
    code, out, _ = run("classify", "--x", GOLDEN, "--lambda", "angle:rational:0/1", "--n", "300",
                       "--cert-c", "0.35", "--cert-q", "10000")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["evidence"]["type"] == "DiophantineTailBound"
    assert doc["evidence"]["cert"]["c"] == "7/20"


def test_construct_text():
    code, out, _ = run("construct", "--m", "2", "--depth", "3", "--format", "text")
    assert code == EXIT_OK
    assert out.splitlines() == ["q = 2, 4, 256", "sums = 1/2, 3/4, 193/256"]


def test_construct_json():
    code, out, _ = run("construct", "--m", "2", "--depth", "3")
    doc = json.loads(out)
    assert doc["q_sequence"] == [2, 4, 256]
    assert doc["partial_sums"] == ["1/2", "3/4", "193/256"]
    assert doc["chain"] == [False, True, True]


def test_orbit_text_matches_sort_oracle():
    code, out, _ = run("orbit", "--x", GOLDEN, "--n", "5", "--format", "text")
    assert code == EXIT_OK
    assert "gaps {0.14590×2, 0.23607×3}" in out


def test_divisors_and_criterion_and_resolvent():
    code, out, _ = run("divisors", "--x", "rational:1/3", "--lambda", "orbit:2", "--n", "3", "--format", "csv")
    assert out.splitlines()[2] == "2,-inf,-inf"
    code, out, _ = run("criterion", "--x", "liouville:2,3", "--n", "300", "--alpha-grid", "1/2",
                       "--beta-rule", "1/2:7/10")
    doc = json.loads(out)
    assert doc["results"][0]["overall"] == "UnboundedWitness" and doc["results"][0]["witness_n"] == 256
    code, out, _ = run("resolvent", "--x", "rational:1/2", "--lambda", "complex:3,0", "--n", "3")
    doc = json.loads(out)
    assert [e["b_exact"][0] for e in doc["entries"]] == ["-1/4", "-1/2", "-1/4"]
    code, out, _ = run("resolvent", "--x", "rational:1/3", "--lambda", "complex:2,0", "--n", "3",
                       "--format", "csv")
    assert out.startswith("n,re,im,divisor_log2_lo,divisor_log2_hi,b_n_log2_magnitude")
    code, _, err = run("resolvent", "--x", "rational:1/3", "--lambda", "angle:rational:0/1", "--n", "4")
    assert code == EXIT_USAGE and "eigen-collision" in err


def test_lambda_grid_is_ordered_and_deterministic():
    argv = ["classify", "--x", "rational:1/4", "--lambda-grid", "8", "--workers", "4"]
    code, out1, _ = run(*argv)
    _, out2, _ = run(*argv)
    assert code == EXIT_OK and out1 == out2
    lams = [d["input"]["lambda"] for d in json.loads(out1)]
    assert lams[:3] == ["angle:rational:0/1", "angle:rational:1/8", "angle:rational:1/4"]


def test_byte_identical_repeated_runs():
    argv = ["classify", "--x", "liouville:2,3", "--lambda", "angle:rational:0/1"]
    assert run(*argv)[1] == run(*argv)[1]


def test_precision_sources(tmp_path, monkeypatch):
    base = ["classify", "--x", "rational:1/3", "--lambda", "angle:rational:1/2"]
    assert json.loads(run(*base)[1])["precision_bits"] == 128
    monkeypatch.setenv("ROTOSPEC_PRECISION_BITS", "64")
    assert json.loads(run(*base)[1])["precision_bits"] == 64
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# settings\nprecision = 96\nhorizon = 40\n")
    doc = json.loads(run(*base, "--config", str(cfg))[1])
    assert doc["precision_bits"] == 96 and doc["horizon"] == 40
    assert json.loads(run(*base, "--config", str(cfg), "--precision", "80")[1])["precision_bits"] == 80
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert run(*base, "--config", str(bad))[0] == EXIT_USAGE
    assert read_config(str(cfg)) == {"precision": "96", "horizon": "40"}


def test_timing_flag_fills_runtime():
    code, out, _ = run("classify", "--x", "rational:1/3", "--lambda", "complex:2,0", "--timing")
    assert isinstance(json.loads(out)["runtime_ms"], float)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rotospec", "construct", "--m", "2", "--format", "text"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert proc.stdout.startswith("q = 2, 4, 256")
