import math
import textwrap

import pytest

from psgsbell import bell, cli, sweep
from psgsbell.quasiprob import DarkMix, KimConditional, LossyPsgs, PurePsgs, Scs, Vacuum
from psgsbell.sweep import (
    CSV_HEADER,
    ConfigError,
    Scenario,
    SweepRow,
    build_model,
    emit_csv,
    figure,
    figure_scenario,
    load_config,
    parse_grid,
    read_csv,
    run_scenario,
    scenario_from_mapping,
)

CONFIG = """\
[kim-ch]
state = kim
functional = ch
axis = T
grid = 0.8, 0.9, 0.95
r = 0.3
starts = 2
seed = 4

[psgs-chsh]
state = psgs
functional = chsh
axis = alpha
grid = 0.4:0.6:0.1
starts = 2
"""


def small(state="kim", functional="ch", axis="T", grid=(0.8, 0.9, 0.95), params=None, **extra):
    params = {"r": 0.3} if params is None and not extra else {**(params or {}), **extra}
    return Scenario("t", state, functional, axis, tuple(grid), params, starts=2, seed=1)


def sample_row(**kw):
    base = dict(
        axis_value=0.1,
        bell_value=2.123456789012345,
        success_prob=None,
        argmax=tuple(i / 7 for i in range(8)),
        converged=True,
    )
    base.update(kw)
    return SweepRow(**base)


# --- config -------------------------------------------------------------------


def test_parse_grid_forms():
    assert parse_grid("") == ()
    assert parse_grid("0.1, 0.5,2") == (0.1, 0.5, 2.0)
    assert parse_grid("0.5:0.6:0.05") == (0.5, 0.55, 0.6)
    assert len(parse_grid("0.5:0.99:0.01")) == 50
    with pytest.raises(ConfigError):
        parse_grid("0.1:0.2:0")
    with pytest.raises(ConfigError):
        parse_grid("a,b")


def test_load_config(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text(CONFIG)
    kim, psgs = load_config(str(path))
    assert kim.name == "kim-ch" and kim.params == {"r": 0.3}
    assert kim.grid == (0.8, 0.9, 0.95) and kim.seed == 4
    assert psgs.grid == (0.4, 0.5, 0.6)


def test_unknown_key_is_an_error(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("[x]\nstate = kim\nfunctional = ch\naxis = T\nr = 0.3\nepsilonn = 0.5\n")
    with pytest.raises(ConfigError, match="epsilonn"):
        load_config(str(path))


@pytest.mark.parametrize(
    "mapping",
    [
        {"state": "cat", "functional": "ch", "axis": "T"},
        {"state": "kim", "functional": "bell", "axis": "T"},
        {"state": "kim", "functional": "ch", "axis": "time"},
        {"state": "scs", "functional": "ch", "axis": "T"},
        {"state": "lossy", "functional": "ch", "axis": "variance_scale"},
        {"state": "kim", "functional": "ch"},
        {"state": "kim", "functional": "ch", "axis": "T", "r": "abc"},
        {"state": "kim", "functional": "ch", "axis": "T", "scaling": "cubic"},
    ],
)
def test_invalid_scenarios(mapping):
    with pytest.raises(ConfigError):
        scenario_from_mapping("bad", mapping)


def test_missing_file_is_config_error(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.ini"))


# --- models -------------------------------------------------------------------


def test_build_model_variants():
    m, ps = build_model(small(), 0.9)
    assert isinstance(m, KimConditional) and 0 < ps < 1
    m, ps = build_model(small("psgs", "chsh", "alpha", params={}), 1.0)
    assert isinstance(m, PurePsgs) and ps is None and m.r == pytest.approx(-0.31257, abs=1e-5)
    m, _ = build_model(small("scs", "ch", "alpha", params={}), 1.0)
    assert m == Scs(1.0, "odd")
    m, ps = build_model(small("lossy", "ch", "T", r=0.3, epsilon=0.6), 0.95)
    assert isinstance(m, LossyPsgs) and ps > 0
    m, _ = build_model(small("dark", "ch", "pm", r=0.3, T=0.99, epsilon=0.6), 0.5)
    assert isinstance(m, DarkMix) and m.pm == 0.5
    m, _ = build_model(Scenario("v", "vacuum", "chsh", "alpha", (0.0,)), 0.0)
    assert m == Vacuum()


def test_variance_scaling_readings():
    mult = sweep.kim_variances({"r": 0.3, "variance_scale": 1.01})
    add = sweep.kim_variances({"r": 0.3, "variance_scale": 1.01, "scaling": "additive"})
    assert mult.A == pytest.approx(1.01 * math.exp(0.6))
    assert add.A == pytest.approx(math.exp(0.6) + 0.01)
    db = sweep.kim_variances({"db_a": 2.65, "db_b": -2.56})
    assert db.product == pytest.approx(1.021, abs=1e-3)


def test_figure_presets_follow_captions():
    s = figure_scenario(5, "eps0.6")
    assert (s.state, s.functional, s.axis, s.params) == ("lossy", bell.CHSH, "T", {"r": 0.3, "epsilon": 0.6})
    s = figure_scenario(4, "experimental")
    assert s.params == {"db_a": 4.26, "db_b": -3.57} and s.functional == bell.CH
    s = figure_scenario(3, "mixed")
    assert s.params == {"db_a": 2.65, "db_b": -2.56} and s.functional == bell.CHSH
    s = figure_scenario(7, "T0.99")
    assert s.params == {"r": 0.3, "T": 0.99, "epsilon": 0.6} and s.axis == "pm"
    with pytest.raises(ValueError):
        figure_scenario(2, "c-psgs")
    with pytest.raises(ValueError):
        figure_scenario(8)


def test_figure_one_is_fidelity_curve(tmp_path):
    pairs = figure(1)
    assert pairs[0][0] == pytest.approx(0.01) and pairs[-1][0] == pytest.approx(2.5)
    out = tmp_path / "f1.csv"
    figure(1, out=str(out))
    lines = out.read_text().splitlines()
    assert lines[0] == "alpha,F"
    assert all(len(line.split(",")) == 2 for line in lines)


# --- CSV ----------------------------------------------------------------------


def test_one_row_two_lines(tmp_path):
    out = tmp_path / "r.csv"
    emit_csv([sample_row()], str(out))
    data = out.read_bytes()
    assert b"\r" not in data
    lines = data.decode().splitlines()
    assert len(lines) == 2 and lines[0] == ",".join(CSV_HEADER)


def test_csv_round_trip(tmp_path):
    rows = [sample_row(), sample_row(axis_value=0.2, success_prob=0.0123456789, converged=False)]
    out = tmp_path / "r.csv"
    emit_csv(rows, str(out))
    back = read_csv(str(out))
    for a, b in zip(rows, back):
        assert sweep.row_fields(a) == sweep.row_fields(b)
        assert b.bell_value == float(format(a.bell_value, ".12g"))
    assert back[0].success_prob is None and not back[1].converged


def test_csv_write_error_names_path(tmp_path):
    bad = tmp_path / "nodir" / "x.csv"
    with pytest.raises(OSError, match="nodir"):
        emit_csv([], str(bad))


# --- running ------------------------------------------------------------------


def test_empty_grid_gives_empty_output(tmp_path):
    out = tmp_path / "e.csv"
    assert run_scenario(small(grid=()), out=str(out)) == []
    assert out.read_text() == ",".join(CSV_HEADER) + "\n"


def test_rows_in_axis_order_and_bounded():
    rows = run_scenario(small(grid=(0.95, 0.8, 0.9)))
    assert [r.axis_value for r in rows] == [0.95, 0.8, 0.9]
    assert all(-1 - 1e-9 <= r.bell_value <= bell.CH_CAP for r in rows)


def test_determinism_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_scenario(small(), out=str(a))
    run_scenario(small(), out=str(b))
    assert a.read_bytes() == b.read_bytes()


def test_resume_matches_uninterrupted_run(tmp_path):
    full, part = tmp_path / "full.csv", tmp_path / "part.csv"
    run_scenario(small(), out=str(full))
    lines = full.read_text().splitlines(keepends=True)
    # header, one complete row and half of the next
    part.write_text(lines[0] + lines[1] + lines[2][:10])
    calls = []
    orig = sweep.evaluate_point

    def spy(s, v):
        calls.append(v)
        return orig(s, v)

    sweep.evaluate_point = spy
    try:
        run_scenario(small(), out=str(part))
    finally:
        sweep.evaluate_point = orig
    assert calls == [0.9, 0.95]
    assert part.read_bytes() == full.read_bytes()


def test_parallel_equals_serial():
    s = small()
    assert run_scenario(s, jobs=2) == run_scenario(s, jobs=1)


def test_kim_chsh_falls_as_T_decreases():
    # pure r = 0.3 input: violation grows towards T = 1 and is lost at small T
    rows = run_scenario(Scenario("f3", "kim", "chsh", "T", (0.5, 0.7, 0.9, 0.99), {"r": 0.3}))
    values = [r.bell_value for r in rows]
    assert values == sorted(values)
    assert values[0] < 2 < values[-1]


# --- command line -----------------------------------------------------------------


def test_cli_fidelity(capsys):
    assert cli.main(["fidelity", "--grid", "0.5,1.0"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "alpha,F" and len(out) == 3


def test_cli_bell_vacuum(tmp_path):
    out = tmp_path / "b.csv"
    assert cli.main(["bell", "chsh", "--state", "vacuum", "--starts", "2", "--out", str(out)]) == 0
    row = read_csv(str(out))[0]
    assert row.bell_value == pytest.approx(2.0, abs=1e-6)


def test_cli_config_error(capsys):
    assert cli.main(["bell", "ch", "--state", "kim", "--set", "T=0.9"]) == cli.EXIT_CONFIG
    assert cli.main(["bell", "ch", "--state", "kim", "--set", "bogus"]) == cli.EXIT_CONFIG
    assert cli.main(["fig", "2", "zz"]) == cli.EXIT_CONFIG


def test_cli_physics_error():
    code = cli.main(["bell", "ch", "--state", "kim", "--set", "r=0.3", "--set", "T=1"])
    assert code == cli.EXIT_PHYSICS


def test_cli_sweep_to_directory(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text(textwrap.dedent(CONFIG).replace("0.8, 0.9, 0.95", "0.9"))
    outdir = tmp_path / "out"
    assert cli.main(["sweep", str(cfg), "--out", str(outdir)]) == 0
    assert len(read_csv(str(outdir / "kim-ch.csv"))) == 1
    assert len(read_csv(str(outdir / "psgs-chsh.csv"))) == 3


def test_cli_nonconvergence_exit(monkeypatch, tmp_path):
    real = bell.optimize

    def never(*a, **kw):
        res = real(*a, **kw)
        return bell.BellResult(res.value, res.argmax, res.starts_used, False)

    monkeypatch.setattr(bell, "optimize", never)
    code = cli.main(["bell", "chsh", "--state", "vacuum", "--starts", "2", "--out", str(tmp_path / "x.csv")])
    assert code == cli.EXIT_NOT_CONVERGED


def test_cli_oracle_check(monkeypatch, capsys):
    from psgsbell import checks

    monkeypatch.setattr(checks, "run_all", lambda cutoff, normalization: checks.single_mode_checks(cutoff)[:2])
    monkeypatch.setattr(checks, "click_probability_check", lambda cutoff: checks.CheckResult("c", 0.0, 1e-8))
    assert cli.main(["oracle", "check", "--cutoff", "30"]) == 0
    assert "PASS" in capsys.readouterr().out
