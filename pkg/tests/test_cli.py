import csv
import json

import numpy as np
import pytest

from rabi_bloch import __version__
from rabi_bloch.analytic import gamma
from rabi_bloch.bessel import j0_zero
from rabi_bloch.cli import (
    PRESETS,
    RunConfig,
    build_parser,
    compare_report,
    load_config,
    main,
    parse_config_text,
    preset_config,
    run_evolve,
    run_sweep_L,
)


def read_csv(path):
    with open(path) as fh:
        first = fh.readline()
        assert first.startswith("# params: ")
        params = json.loads(first[len("# params: "):])
        rows = list(csv.reader(fh))
    return params, rows[0], np.array(rows[1:], dtype=float) if len(rows) > 1 else None


SHORT = dict(L=28.89, t_max_periods=2.0, samples_per_period=8)


def test_config_parsing(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# fig 2 style run\nL = 28.89\nalpha = 0.1  # packet width\n"
                    "schedule = rectangular\nphi0_over_T = 0.25\nstrict = yes\n"
                    "outputs = overlaps, centers\nwindow_halfwidth = 200\n")
    config = load_config(path)
    assert config.L == 28.89 and config.alpha == 0.1
    assert config.schedule == "rectangular" and config.phi0_over_T == 0.25
    assert config.strict is True
    assert config.outputs == ("overlaps", "centers")
    assert config.window_halfwidth == 200


@pytest.mark.parametrize("text, message", [
    ("bogus = 1", "unknown key"),
    ("L = 1\nL = 2", "duplicate"),
    ("just words", "expected"),
    ("strict = maybe", "boolean"),
])
def test_config_errors(text, message):
    with pytest.raises(ValueError, match=message):
        parse_config_text(text)


def test_config_g_and_L_exclusive():
    with pytest.raises(ValueError, match="not both"):
        RunConfig(L=28.89, omega_ratio_g=-0.07)
    assert RunConfig(omega_ratio_g=-0.07).L is None


@pytest.mark.parametrize("kwargs", [dict(samples_per_period=4), dict(t_max_periods=250.0),
                                    dict(t_max_periods=0.0), dict(outputs="heatmap")])
def test_config_guards(kwargs):
    with pytest.raises(ValueError):
        RunConfig(**kwargs)


def test_presets_match_captions():
    assert preset_config("fig2").L == 28.89
    config = preset_config("fig2")
    assert (config.n_bar, config.alpha, config.omega_atom) == (1.01e4, 0.1, 1.0)
    assert config.t_max_periods == 12.0
    assert [PRESETS[f"fig4{c}"]["L"] for c in "abcd"] == [24.31, 25.73, 27.50, 28.89]
    for name, schedule, phase in [("fig5a", "rectangular", 0.0), ("fig5b", "rectangular", 0.25),
                                  ("fig5c", "sinusoidal", 0.0), ("fig5d", "sinusoidal", 0.25)]:
        config = preset_config(name)
        assert (config.L, config.schedule, config.phi0_over_T) == (28.89, schedule, phase)
        assert config.t_max_periods == 20.0
        assert config.notes


def test_unknown_preset():
    with pytest.raises(ValueError):
        preset_config("fig9")


def test_run_evolve_outputs(tmp_path):
    config = RunConfig(**SHORT)
    written = run_evolve(config, tmp_path)
    assert set(written) == {"distribution", "centers", "overlaps", "analytic", "validity",
                            "metadata"}
    params, header, data = read_csv(written["distribution"])
    assert header[0] == "t_over_TB"
    n_lo, n_hi = params["window"]
    assert header[1:] == [str(n) for n in range(n_lo, n_hi + 1)]
    np.testing.assert_allclose(data[:, 0], np.arange(17) / 8)
    np.testing.assert_allclose(data[:, 1:].sum(axis=1), 1.0, atol=1e-12)
    meta = json.loads(written["metadata"].read_text())
    for key in ("L", "gamma", "T_B", "dt", "validity", "code_version", "g", "window"):
        assert key in meta
    assert meta["code_version"] == __version__
    assert meta["gamma"] == pytest.approx(gamma(1.0, 28.89))
    _, header, data = read_csv(written["overlaps"])
    assert header[:6] == ["t_over_TB", "omega_atom", "P_a", "P_b", "P_a_pred", "P_b_pred"]
    np.testing.assert_allclose(data[:, 4] + data[:, 5], 1.0)


def test_run_is_reconstructible_from_metadata(tmp_path):
    config = RunConfig(**SHORT, outputs="overlaps")
    run_evolve(config, tmp_path / "a")
    meta = json.loads((tmp_path / "a" / "metadata.json").read_text())
    rebuilt = RunConfig(**{k: v for k, v in meta["config"].items()
                           if k not in ("outputs", "notes")},
                        outputs=tuple(meta["config"]["outputs"]))
    run_evolve(rebuilt, tmp_path / "b")
    assert ((tmp_path / "a" / "overlaps.csv").read_bytes()
            == (tmp_path / "b" / "overlaps.csv").read_bytes())


def test_runs_are_bit_identical(tmp_path):
    config = RunConfig(L=20.0, alpha=0.2, schedule="sinusoidal", t_max_periods=1.0,
                       samples_per_period=8)
    run_evolve(config, tmp_path / "a")
    run_evolve(config, tmp_path / "b")
    for name in ("distribution.csv", "centers.csv", "overlaps.csv", "metadata.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_compare_zero_drive():
    report = compare_report(RunConfig(**SHORT, omega_atom=0.0))
    assert report["p_a_max_deviation"] < 1e-9
    assert report["center_max_deviation"] < 0.5


def test_sweep_marks_minima(tmp_path):
    config = RunConfig(t_max_periods=6.0, samples_per_period=8)
    summary = run_sweep_L((23.0, 26.0), 13, config, tmp_path)
    _, header, data = read_csv(tmp_path / "sweep_L.csv")
    assert header[:4] == ["L", "g", "gamma", "max_P_b"]
    assert np.all(np.diff(data[:, 0]) > 0)
    np.testing.assert_allclose(data[:, 2], [gamma(1.0, L) for L in data[:, 0]], rtol=1e-12)
    assert len(summary["minima"]) == 1
    minimum = summary["minima"][0]
    assert minimum["nearest_j0_zero"] == j0_zero(8)
    assert abs(minimum["L"] - j0_zero(8)) < 0.5


def test_main_evolve_and_strict(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("L = 28.89\nn_bar = 1000\nt_max_periods = 1\nsamples_per_period = 8\n")
    assert main(["evolve", "--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "metadata.json").exists()
    code = main(["evolve", "--config", str(cfg), "--out-dir", str(tmp_path / "s"), "--strict"])
    assert code == 2
    assert "aborted" in capsys.readouterr().err


def test_main_fig3(tmp_path):
    assert main(["preset", "fig3", "--out-dir", str(tmp_path)]) == 0
    points = json.loads((tmp_path / "fig3_points.json").read_text())["points"]
    assert points["a"]["nearest_j0_zero"] == pytest.approx(24.3524715307, abs=1e-9)
    assert points["c"]["nearest_j0_zero"] == pytest.approx(27.4934791320, abs=1e-9)


def test_main_analytic_and_compare(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("L = 28.89\nt_max_periods = 2\nsamples_per_period = 8\n")
    assert main(["analytic", "--config", str(cfg), "--out-dir", str(tmp_path / "a")]) == 0
    _, header, data = read_csv(tmp_path / "a" / "analytic_series.csv")
    assert header == ["t_over_TB", "n_a", "n_b", "P_a", "P_b"]
    assert main(["compare", "--config", str(cfg), "--out-dir", str(tmp_path / "c"),
                 "--chain", "effective", "--seedless-deterministic"]) == 0
    report = json.loads((tmp_path / "c" / "compare.json").read_text())
    assert report["cross_model_chain"] == "equivalent"
    assert "p_a_max_deviation" in capsys.readouterr().out


def test_parser_rejects_unknown_subcommand():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["plot"])
