import csv
import math

import numpy as np
import pytest

from attcone import crtf
from attcone.cli import main
from attcone.config import ExperimentConfig, parse_text


def run(tmp_path, *argv, sub="out"):
    out = tmp_path / sub
    code = main(list(argv) + ["--out", str(out)])
    return code, out


def report(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    return rows[0]


def test_roundtrip_example(tmp_path):
    code, out = run(tmp_path, "roundtrip", "--dim", "1", "--mu", "1", "--psi", "0.7854", "--grid", "256,256")
    assert code == 0
    assert float(report(out / "roundtrip_report.csv")["rel_l2_error"]) <= 1e-3
    f = crtf.read(out / "roundtrip.crtf")
    assert f.spec.dims == (256, 256)


def test_config_echo_reproduces_outputs(tmp_path):
    code, a = run(tmp_path, "roundtrip", "--dim", "1", "--mu", "1.5", "--grid", "64,96", "--extent", "-2,2",
                  sub="a")
    assert code == 0
    code, b = run(tmp_path, "roundtrip", "--config", str(a / "config.txt"), sub="b")
    assert code == 0
    for name in ("roundtrip.crtf", "roundtrip_report.csv", "config.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_negative_extent_value(tmp_path):
    code, out = run(tmp_path, "phantom", "--dim", "1", "--grid", "8,8", "--extent", "-1,1,-3,2")
    assert code == 0
    assert crtf.read(out / "phantom.crtf").spec.origin == (-1.0, -3.0)


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("params.mu = 3.0\nparams.n = 1\ngrid.dims = 32,32\n")
    code, out = run(tmp_path, "phantom", "--config", str(cfg), "--mu", "0.5")
    assert code == 0
    echoed = ExperimentConfig.resolve(parse_text((out / "config.txt").read_text()))
    assert echoed.params.mu == 0.5 and echoed.grid.dims == (32, 32)


def test_forward_zero_phantom_is_zero_file(tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("params.n = 1\ngrid.dims = 32,32\nphantom.bump.0.center = 0,0\n"
                   "phantom.bump.0.radius = 0.5\nphantom.bump.0.amplitude = 0\n")
    for method in ("spectral", "direct"):
        code, out = run(tmp_path, "forward", "--config", str(cfg), "--method", method, sub=method)
        assert code == 0
        assert np.all(crtf.read(out / "forward.crtf").values == 0)


def test_range_check_failure_is_data_not_crash(tmp_path):
    code, out = run(tmp_path, "phantom", "--dim", "1", "--grid", "64,64", sub="ph")
    assert code == 0
    # raw phantom as data: the moment condition fails but the command succeeds
    code, out = run(tmp_path, "range-check", "--dim", "1", "--grid", "64,64",
                    "--input", str(out / "phantom.crtf"), sub="rc")
    assert code == 0
    row = report(out / "range_report.csv")
    assert row["passed"] == "false" and float(row["moment_residual"]) >= 0.1
    assert list(row)[:3] == ["theorem", "passed", "support_ok"]


def test_range_check_of_generated_data_passes(tmp_path):
    code, out = run(tmp_path, "range-check", "--dim", "1", "--mu", "1", "--grid", "256,256",
                    "--eps-support", "1e-3")
    assert code == 0
    assert report(out / "range_report.csv")["passed"] == "true"


def test_forward_full_then_invert_from_file(tmp_path):
    code, fw = run(tmp_path, "forward", "--dim", "1", "--mu", "1", "--grid", "64,64", "--full", sub="fw")
    assert code == 0
    code, inv = run(tmp_path, "invert", "--dim", "1", "--mu", "1", "--input", str(fw / "forward.crtf"),
                    sub="inv")
    assert code == 0
    row = report(inv / "invert_report.csv")
    assert row["theorem"] == "c-odd" and row["rel_l2_error"] == ""


def test_apply_L_constant(tmp_path):
    from attcone.fields import GridSpec, ScalarField

    s = GridSpec.from_extent((9, 9), -1, 1)
    path = tmp_path / "c.crtf"
    crtf.write(path, ScalarField(s, np.full(s.dims, 2.0)))
    code, out = run(tmp_path, "apply-L", "--dim", "1", "--mu", "1", "--psi", str(math.pi / 4),
                    "--input", str(path), "--scheme", "fd")
    assert code == 0
    np.testing.assert_allclose(crtf.read(out / "apply_L.crtf").values, 2.0 * 2.0, rtol=1e-13)


def test_verify_identities(tmp_path):
    code, out = run(tmp_path, "verify-identities")
    assert code == 0
    with open(out / "identities.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows and max(float(r["rel_error"]) for r in rows) <= 1e-8


def test_slice_output(tmp_path):
    code, out = run(tmp_path, "phantom", "--dim", "2", "--grid", "16,16,16", "--slice", "x1=0", "--slice", "z=0")
    assert code == 0
    with open(out / "phantom_slice.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x1", "x2", "z", "value"]
    assert len(rows) == 1 + 16
    assert all(float(r[0]) == 0.0 and float(r[2]) == 0.0 for r in rows[1:])


@pytest.mark.parametrize("argv", [
    ["phantom", "--mu", "-1"],
    ["phantom", "--psi", "2.0"],
    ["roundtrip", "--dim", "1", "--theorem", "a-odd", "--grid", "16,16"],
    ["frobnicate"],
    ["phantom", "--grid", "abc"],
])
def test_validation_errors_exit_1(tmp_path, argv, capsys):
    with pytest.raises(SystemExit) as exc:
        code = main(argv + ["--out", str(tmp_path)])
        raise SystemExit(code)
    assert exc.value.code == 1
    assert capsys.readouterr().err


def test_unknown_config_key_exits_1(tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("params.nu = 1\n")
    assert main(["phantom", "--config", str(cfg), "--out", str(tmp_path)]) == 1


def test_io_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.crtf"
    bad.write_bytes(b"not a crtf file at all")
    assert main(["invert", "--dim", "1", "--input", str(bad), "--out", str(tmp_path)]) == 2
    assert main(["invert", "--dim", "1", "--input", str(tmp_path / "missing.crtf"),
                 "--out", str(tmp_path)]) == 2
    assert main(["phantom", "--config", str(tmp_path / "nope.txt"), "--out", str(tmp_path)]) == 2


def test_outputs_independent_of_thread_setting(tmp_path):
    argv = ["forward", "--dim", "1", "--mu", "1", "--grid", "48,48", "--method", "direct"]
    code1, a = run(tmp_path, *argv, "--threads", "1", sub="t1")
    code2, b = run(tmp_path, *argv, "--threads", "3", sub="t3")
    assert code1 == code2 == 0
    assert (a / "forward.crtf").read_bytes() == (b / "forward.crtf").read_bytes()
