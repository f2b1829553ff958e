import math
import warnings

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from rabi_bloch.analytic import gamma
from rabi_bloch.estimators import (
    AnalyticBlochPredictor,
    BlochZenerSimulator,
    check_times,
    resolve_params,
)
from rabi_bloch.exceptions import InvalidWindowError, ValidityError
from rabi_bloch.propagate import DEFAULT_STEPS_PER_PERIOD


def test_get_params_round_trip():
    sim = BlochZenerSimulator(L=24.31, alpha=0.1, schedule="sinusoidal", phi0_over_T=0.25)
    params = sim.get_params()
    assert params["L"] == 24.31 and params["schedule"] == "sinusoidal"
    assert params["dt_per_period"] == 1.0 / DEFAULT_STEPS_PER_PERIOD
    copy = clone(sim)
    assert copy.get_params() == params
    copy.set_params(L=27.5)
    assert copy.L == 27.5 and sim.L == 24.31


def test_clone_of_predictor():
    pred = AnalyticBlochPredictor(L=28.89)
    assert clone(pred).get_params() == pred.get_params()


def test_exactly_one_of_L_and_g():
    with pytest.raises(ValueError, match="exactly one"):
        resolve_params()
    with pytest.raises(ValueError, match="exactly one"):
        resolve_params(L=1.0, g=-0.01)
    params = resolve_params(L=28.89, n_bar=1.01e4)
    assert params.g == pytest.approx(-28.89 / (4 * math.sqrt(1.01e4)))
    assert resolve_params(g=-0.07, n_bar=1e4).L == pytest.approx(28.0)


def test_window_halfwidth():
    params = resolve_params(L=28.89, n_bar=1.01e4, window_halfwidth=150)
    assert params.window == (10100 - 150, 10100 + 150)


def test_check_times():
    np.testing.assert_array_equal(check_times([0, 1, 2]), [0.0, 1.0, 2.0])
    np.testing.assert_array_equal(check_times(np.array([[0.5], [1.5]])), [0.5, 1.5])
    with pytest.raises(ValueError):
        check_times([1.0, 0.5])
    with pytest.raises(ValueError):
        check_times([-1.0, 0.5])
    with pytest.raises(ValueError):
        check_times(np.zeros((3, 2)))
    with pytest.raises(ValueError):
        check_times([0.0, np.nan])


def test_not_fitted():
    with pytest.raises(NotFittedError):
        BlochZenerSimulator(L=28.89).transform([0.0, 1.0])
    with pytest.raises(NotFittedError):
        AnalyticBlochPredictor(L=28.89).predict([0.0])


def test_simulator_outputs():
    sim = BlochZenerSimulator(L=28.89).fit()
    times = np.arange(0, 41) / 8
    table = sim.transform(times)
    assert table.shape == (times.size, sim.params_.size)
    np.testing.assert_allclose(table.sum(axis=1), 1.0, atol=1e-12)
    probs = sim.predict(times)
    assert probs.shape == (times.size, 2)
    assert probs[0, 0] == pytest.approx(1.0, abs=1e-12)
    result = sim.simulate(times)
    np.testing.assert_allclose(result.sector_weights, 0.5, atol=1e-12)
    assert result.norm_drift < 1e-10
    np.testing.assert_allclose(result.times_tb, times)


def test_fit_transform_matches_transform():
    times = [0.0, 0.5, 1.0]
    a = BlochZenerSimulator(L=20.0, alpha=0.2).fit_transform(times)
    b = BlochZenerSimulator(L=20.0, alpha=0.2).fit().transform(times)
    np.testing.assert_array_equal(a, b)


def test_driven_times_must_be_on_mesh():
    sim = BlochZenerSimulator(L=10.0, alpha=0.3, schedule="rectangular").fit()
    with pytest.raises(ValueError, match="multiples"):
        sim.simulate([0.0, 1.0 / 3.0])


def test_validity_warning_and_strict():
    kwargs = dict(L=28.89, n_bar=1e3)
    with pytest.warns(RuntimeWarning, match="sqrt_deviation"):
        BlochZenerSimulator(**kwargs).fit()
    with pytest.raises(ValidityError):
        BlochZenerSimulator(**kwargs, strict=True).fit()


def test_leakage_monitor():
    sim = BlochZenerSimulator(L=28.89, alpha=0.1, window_halfwidth=109,
                              schedule="rectangular", strict=True).fit()
    with pytest.raises(ValidityError, match="leakage"):
        sim.simulate(np.arange(0, 21))


def test_narrow_window_rejected():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(InvalidWindowError):
            BlochZenerSimulator(L=5.0, alpha=0.05, window_halfwidth=60).fit()


def test_analytic_predictor_outputs():
    pred = AnalyticBlochPredictor(L=28.89).fit()
    times = np.linspace(0.0, 10.0, 21)
    probs = pred.predict(times)
    np.testing.assert_array_equal(probs.sum(axis=1), 1.0)
    gam = pred.prediction_.gamma
    np.testing.assert_allclose(probs[:, 0], np.cos(gam * 2 * np.pi * times) ** 2)
    table = pred.transform(times)
    np.testing.assert_allclose(table.sum(axis=1), 1.0, atol=1e-10)
    centers = pred.centers(times)
    np.testing.assert_allclose(centers[:, 0] - centers[:, 1],
                               28.89 * np.cos(2 * np.pi * times), atol=1e-9)


@pytest.mark.parametrize("schedule, mean", [("constant", 1.0), ("rectangular", 0.2),
                                            ("sinusoidal", 0.5)])
@pytest.mark.parametrize("phase", [0.0, 0.25])
def test_predictor_uses_mean_drive(schedule, mean, phase):
    pred = AnalyticBlochPredictor(L=28.89, schedule=schedule, phi0_over_T=phase).fit()
    assert pred.prediction_.gamma == pytest.approx(gamma(mean, 28.89), rel=1e-3)


def test_simulator_tracks_predictor_at_whole_periods():
    sim = BlochZenerSimulator(L=28.89).fit()
    pred = AnalyticBlochPredictor(L=28.89).fit()
    times = np.arange(1, 11, dtype=float)
    dev = np.abs(sim.predict(times)[:, 0] - pred.predict(times)[:, 0])
    assert dev.max() < 0.1
