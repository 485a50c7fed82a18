import math
import subprocess
import sys

import numpy as np
import pytest

from rydfac import units
from rydfac.hilbert import BLOCKADE, FULL
from rydfac.model import AUTO_ANTIBLOCKADE, SimParams
from rydfac.sweeps import (
    CSV_HEADER, ConfigError, SweepSpec, default_spec, emit_csv,
    emit_dynamics_csv, load_config, point_params, run_sweep,
)

FAST = dict(N=2, M=4, t_final=1.0, record_dt=0.02, T=0.0)


def write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


# --- config parsing ---------------------------------------------------------

def test_empty_config_resolves_defaults(tmp_path):
    spec = load_config(write(tmp_path, ""))
    base = spec.base
    assert spec.kind == "single_run"
    assert spec.with_and_without_control
    assert base.Omega_c == pytest.approx(units.mhz(6.06))
    assert base.Delta == pytest.approx(units.mhz(121.2))
    assert base.Gamma_e == pytest.approx(units.mhz(6.06))
    assert base.Gamma_r == pytest.approx(units.khz(2.0))
    assert base.gamma_ge == pytest.approx(units.khz(12.12))
    assert base.gamma_er == pytest.approx(units.khz(12.12))
    assert base.C6 == pytest.approx(units.ghz_um6(50.0))
    assert base.r0 == 3.062
    assert base.omega_trap == pytest.approx(units.khz(100.0))
    assert base.T == 1.0
    assert base.N == 3
    assert base.M == 300
    assert base.delta == AUTO_ANTIBLOCKADE
    assert spec.grid == (pytest.approx(2.0),)


def test_seed_only_override(tmp_path):
    spec = load_config(write(tmp_path, "seed = 99\n"))
    assert spec.base.seed == 99
    assert spec.base.with_(seed=default_spec().base.seed) == default_spec().base


def test_negative_rate_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "Gamma_e = -6.06 MHz\n"))


def test_unknown_key_reports_line(tmp_path):
    path = write(tmp_path, "# comment\nN = 3\nfrobnicate = 7\n")
    with pytest.raises(ConfigError, match="line 3"):
        load_config(path)


def test_bad_unit_reports_line(tmp_path):
    path = write(tmp_path, "Omega_c = 6.06 THz\n")
    with pytest.raises(ConfigError, match="line 1.*THz"):
        load_config(path)


def test_missing_unit_rejected(tmp_path):
    with pytest.raises(ConfigError, match="line 1"):
        load_config(write(tmp_path, "r0 = 3.062\n"))


def test_grid_forms(tmp_path):
    spec = load_config(write(tmp_path, "kind = probe_ratio\ngrid = 0.4, 1.0, 2.0\n"))
    assert spec.grid == (0.4, 1.0, 2.0)
    spec = load_config(write(tmp_path, "kind = distance\ngrid = 2.0:9.0:15\n"))
    assert len(spec.grid) == 15
    assert spec.grid[0] == 2.0 and spec.grid[-1] == 9.0


def test_grid_must_increase(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "kind = probe_ratio\ngrid = 1.0, 0.5\n"))


def test_control_modes(tmp_path):
    spec = load_config(write(tmp_path, "control = without\n"))
    assert not spec.with_and_without_control
    assert not spec.base.control_present


def test_atom_grid_integers(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "kind = atom_number\ngrid = 1.5, 2.5\n"))


def test_unitful_values_scale(tmp_path):
    spec = load_config(write(tmp_path,
                             "Omega_p = 3.3 MHz\nC6 = 50 GHz.um6\nsigma = 14.3 nm\n"
                             "t_final = 20 us\nT = 5 uK\n"))
    assert spec.base.Omega_p == pytest.approx(units.mhz(3.3))
    assert spec.base.C6 == pytest.approx(units.ghz_um6(50.0))
    assert spec.base.sigma_override == pytest.approx(0.0143)
    assert spec.base.t_final == 20.0
    assert spec.base.T == 5.0


# --- point parameter derivation ---------------------------------------------

def test_point_params_kinds():
    base = SimParams(**FAST)
    ratio = point_params(SweepSpec("probe_ratio", (0.7,), base), 0.7)
    assert ratio.Omega_p == pytest.approx(0.7 * base.Omega_c)
    atoms = point_params(SweepSpec("atom_number", (4,), base), 4)
    assert atoms.N == 4
    temp = point_params(SweepSpec("temperature", (20.0,), base), 20.0)
    assert temp.T == 20.0
    fixed_delta = base.with_(delta=-units.mhz(5.0))
    dist = point_params(SweepSpec("distance", (5.0,), fixed_delta), 5.0)
    assert dist.r0 == 5.0
    assert dist.delta == AUTO_ANTIBLOCKADE  # forced back to the sentinel


# --- sweep execution and CSV -------------------------------------------------

@pytest.fixture(scope="module")
def tiny_sweep():
    base = SimParams(**FAST)
    spec = SweepSpec("probe_ratio", (0.5, 2.0), base)
    return run_sweep(spec, workers=1)


def test_sweep_values_in_range(tiny_sweep):
    for p in tiny_sweep.points:
        for value in (p.fr_with, p.fr_without):
            assert 0.0 <= value <= 1.0
        assert p.fr_with_err >= 0.0 and p.fr_without_err >= 0.0
        assert p.pmulti_max >= 0.0


def test_csv_golden_shape(tiny_sweep, tmp_path):
    out = tmp_path / "sweep.csv"
    emit_csv(tiny_sweep, out)
    lines = out.read_bytes().decode("utf-8").split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 4  # header + 2 points + empty tail from final LF
    assert lines[-1] == ""
    first = lines[1].split(",")
    assert float(first[0]) == 0.5
    # full-precision round trip
    point = tiny_sweep.points[0]
    assert float(first[1]) == point.fr_with
    assert float(first[3]) == point.fr_without
    assert first[5] in ("true", "false")


def test_single_point_sweep_two_lines(tmp_path):
    base = SimParams(**FAST)
    result = run_sweep(SweepSpec("single_run", (2.0,), base,
                                 with_and_without_control=False))
    out = tmp_path / "one.csv"
    emit_csv(result, out)
    text = out.read_text(encoding="utf-8")
    assert len(text.rstrip("\n").split("\n")) == 2
    assert math.isnan(result.points[0].fr_without)  # only the with-control side ran


def test_rerun_is_byte_identical(tiny_sweep, tmp_path):
    base = SimParams(**FAST)
    spec = SweepSpec("probe_ratio", (0.5, 2.0), base)
    again = run_sweep(spec, workers=2)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(tiny_sweep, a)
    emit_csv(again, b)
    assert a.read_bytes() == b.read_bytes()


def test_distance_sweep_marks_blockade_violations():
    base = SimParams(N=1, M=2, t_final=1.0, record_dt=0.02, T=0.0)
    spec = SweepSpec("distance", (1.2, 5.0), base,
                     with_and_without_control=False)
    result = run_sweep(spec, use_oracle=False)
    assert result.points[0].below_blockade_radius
    assert not result.points[1].below_blockade_radius


def test_oracle_path_deterministic_zero_stderr():
    base = SimParams(N=1, M=2, t_final=4.0, record_dt=0.05, T=0.0,
                     basis_mode=FULL)
    spec = SweepSpec("single_run", (2.0,), base)
    result = run_sweep(spec, use_oracle=True)
    p = result.points[0]
    assert p.fr_with_err == 0.0 and p.fr_without_err == 0.0
    again = run_sweep(spec, use_oracle=True)
    assert again.points[0] == p


def test_dynamics_csv_schema(tmp_path):
    from rydfac import mcwf
    params = SimParams(**FAST)
    series = mcwf.run_observables(params)
    out = tmp_path / "dyn.csv"
    emit_dynamics_csv(series, out)
    lines = out.read_text(encoding="utf-8").rstrip("\n").split("\n")
    assert lines[0] == ("time,P_gc,P_gc_err,P_rc,P_rc_err,P_gcG,P_gcG_err,"
                        "P_multi,P_multi_err")
    assert len(lines) == 1 + len(series.times)
    row = [float(x) for x in lines[1].split(",")]
    assert row[0] == 0.0 and row[5] == 1.0  # starts in the collective ground state


# --- CLI --------------------------------------------------------------------

def run_cli(args):
    return subprocess.run([sys.executable, "-m", "rydfac.cli"] + args,
                          capture_output=True, text=True)


CLI_FAST_CFG = """
N = 2
M = 4
t_final = 1 us
record_dt = 0.02 us
T = 0 uK
kind = probe_ratio
grid = 0.5, 2.0
"""


def test_cli_success_and_determinism(tmp_path):
    cfg = write(tmp_path, CLI_FAST_CFG)
    out1, out2 = tmp_path / "w1.csv", tmp_path / "w2.csv"
    r1 = run_cli(["--config", str(cfg), "--out", str(out1), "--workers", "1"])
    r2 = run_cli(["--config", str(cfg), "--out", str(out2), "--workers", "2"])
    assert r1.returncode == 0, r1.stderr
    assert r2.returncode == 0, r2.stderr
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_input_error(tmp_path):
    cfg = write(tmp_path, "nonsense = 42\n")
    result = run_cli(["--config", str(cfg), "--out", str(tmp_path / "x.csv")])
    assert result.returncode == 1
    assert result.stderr != ""


def test_cli_missing_config(tmp_path):
    result = run_cli(["--config", str(tmp_path / "absent.cfg"),
                      "--out", str(tmp_path / "x.csv")])
    assert result.returncode == 1


def test_cli_unconverged_exit_code(tmp_path):
    # a deterministic oracle run cut off mid-transient cannot converge
    cfg = write(tmp_path, "N = 1\nM = 2\nt_final = 0.5 us\nrecord_dt = 0.01 us\n"
                          "T = 0 uK\nbasis = full\n")
    result = run_cli(["--config", str(cfg), "--out", str(tmp_path / "x.csv"),
                      "--oracle"])
    assert result.returncode == 2, result.stderr


def test_cli_no_control_flag(tmp_path):
    cfg = write(tmp_path, CLI_FAST_CFG)
    out = tmp_path / "noctl.csv"
    result = run_cli(["--config", str(cfg), "--out", str(out), "--no-control"])
    assert result.returncode == 0, result.stderr
    rows = out.read_text().rstrip("\n").split("\n")[1:]
    for row in rows:
        assert row.split(",")[1] == "nan"  # fr_with column empty


def test_cli_dynamics_out(tmp_path):
    cfg = write(tmp_path, "N = 2\nM = 4\nt_final = 1 us\nrecord_dt = 0.02 us\n"
                          "T = 0 uK\ncontrol = with\n")
    out = tmp_path / "single.csv"
    dyn = tmp_path / "dyn.csv"
    result = run_cli(["--config", str(cfg), "--out", str(out),
                      "--dynamics-out", str(dyn)])
    assert result.returncode == 0, result.stderr
    assert dyn.exists()
