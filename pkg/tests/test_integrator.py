import math

import numpy as np
import pytest

from inls_lab import ConfigurationError, Grid, IFRK4, ModelParams, StepperConfig, integrate, order_check, step
from inls_lab.experiments import gaussian_data, periodic_static_soliton
from inls_lab.invariants import mass
from inls_lab.spectral_core import free_evolve

G = Grid(512, 40.0)


@pytest.mark.parametrize("kw", [dict(dt=0.0, t_end=1.0), dict(dt=1e-3, t_end=-1.0),
                                 dict(dt=1e-3, t_end=1.0, record_every=0),
                                 dict(dt=1e-3, t_end=1.0, record_every=1.5),
                                 dict(dt=math.nan, t_end=1.0)])
def test_stepper_config_validation(kw):
    with pytest.raises(ConfigurationError):
        StepperConfig(**kw)


def test_linear_step_is_exact():
    u = gaussian_data(G, 1.0, 1.0, 2.0)
    out = step(u, G, ModelParams(math.inf, 0.0, 0.0), 0.01)
    np.testing.assert_allclose(out, free_evolve(u, G, 0.01), atol=1e-13)


def test_zero_step_is_identity():
    u = gaussian_data(G, 1.0, 1.0)
    np.testing.assert_allclose(step(u, G, ModelParams(1.0, 1.0, 1.0), 0.0), u, atol=1e-15)


def test_zero_duration_gives_one_snapshot():
    u = gaussian_data(G)
    tr = integrate(u, G, ModelParams(), StepperConfig(1e-3, 0.0))
    assert tr.completed and list(tr.times) == [0.0]
    np.testing.assert_array_equal(tr.snapshots[0], u)


def test_records_stride_and_final_state():
    tr = integrate(gaussian_data(G), G, ModelParams(), StepperConfig(1e-2, 0.25, 10))
    np.testing.assert_allclose(tr.times, [0.0, 0.1, 0.2, 0.25])
    assert np.all(np.diff(tr.times) > 0)
    assert len(tr.uniform().times) == 3
    assert tr.record_dt == pytest.approx(0.1)


def test_linear_mass_drift_over_many_steps():
    g = Grid(128, 20.0)
    u = gaussian_data(g, 1.0, 1.0, 1.0)
    tr = integrate(u, g, ModelParams(math.inf, 0.0, 0.0), StepperConfig(1e-3, 10.0, 10000))
    assert abs(mass(tr.snapshots[-1], g) - mass(u, g)) / mass(u, g) <= 1e-13


def test_mass_drift_with_cubic_term():
    u = gaussian_data(G, 1.0, 1.0)
    tr = integrate(u, G, ModelParams(1.0, 1.0, 0.5), StepperConfig(1e-3, 1.0, 100))
    m = [mass(v, G) for v in tr.snapshots]
    assert max(abs(x - m[0]) for x in m) / m[0] <= 1e-9


def test_static_soliton_over_unit_time():
    g = Grid(1024, 40.0)
    R = periodic_static_soliton(g)
    tr = integrate(R, g, ModelParams(math.inf, -1.0, 0.0), StepperConfig(1e-3, 1.0, 1000))
    assert np.linalg.norm(tr.snapshots[-1] - R) / np.linalg.norm(R) <= 1e-4


def test_determinism():
    u = gaussian_data(G, 1.0, 1.0, 0.3)
    p = ModelParams(2.0, -1.0, 0.5)
    a = integrate(u, G, p, StepperConfig(1e-3, 0.1, 50))
    b = integrate(u, G, p, StepperConfig(1e-3, 0.1, 50))
    np.testing.assert_array_equal(a.snapshots, b.snapshots)


def test_blowup_returns_partial_trajectory():
    g = Grid(256, 20.0)
    u = gaussian_data(g, 6.0, 1.0)
    tr = integrate(u, g, ModelParams(math.inf, -1.0, 0.0), StepperConfig(1e-2, 1.0, 1))
    assert tr.status == "aborted" and not tr.completed
    assert tr.abort_time is not None and tr.abort_time < 1.0
    assert np.all(np.isfinite(tr.snapshots))


def test_stepper_matches_free_function():
    u = gaussian_data(G)
    p = ModelParams(1.0, 1.0, 0.0)
    s = IFRK4(G, p, 1e-3)
    np.testing.assert_allclose(s.step(u), step(u, G, p, 1e-3), atol=1e-15)


def test_order_linear_is_skipped():
    rep = order_check(gaussian_data(G), G, ModelParams(math.inf, 0.0, 0.0), 0.1, [0.02, 0.01, 0.005])
    assert rep.skipped and rep.passed


@pytest.mark.parametrize("params", [ModelParams(math.inf, -1.0, 0.0), ModelParams(1.0, 1.0, 1.0)])
def test_order_is_four(params):
    rep = order_check(gaussian_data(G), G, params, 0.5, [0.02, 0.01, 0.005])
    assert rep.monotone and 3.7 <= rep.slope <= 4.3


@pytest.mark.parametrize("dts", [[0.02, 0.01], [0.02, 0.01, 0.004]])
def test_order_check_input_validation(dts):
    with pytest.raises(ConfigurationError):
        order_check(gaussian_data(G), G, ModelParams(), 0.1, dts)
