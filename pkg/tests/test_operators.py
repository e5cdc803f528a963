import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import erf

from inls_lab import ConfigurationError, Grid
from inls_lab.checks import g_h_supremum, operator_suite, poisson_pair, smooth_corpus
from inls_lab.operators import (
    check_depth,
    coth,
    cotlar_residual,
    dx_pi_plus,
    g_h,
    hilbert,
    j_h,
    k_h,
    pi_plus,
    q_h,
    sign_convolution,
    symbol_values,
    tilbert,
    tilbert_dx,
    tilbert_line,
)
from inls_lab.spectral_core import derivative, fft, inner, project_sign

G = Grid(4096, 40.0)


@pytest.mark.parametrize("h", [0, -1, "deep", math.nan])
def test_check_depth_rejects(h):
    with pytest.raises(ConfigurationError):
        check_depth(h)


def test_check_depth_accepts_inf():
    assert math.isinf(check_depth(math.inf))
    assert check_depth("2") == 2.0


def test_coth_is_stable():
    assert coth(np.array([1e-8]))[0] == pytest.approx(1e8)
    assert coth(np.array([1e3]))[0] == 1.0
    assert coth(np.array([-2.0]))[0] == pytest.approx(-1 / math.tanh(2.0))


@pytest.mark.parametrize("h", [0.5, 1.0, 3.0])
def test_tilbert_on_trig(h):
    g = Grid(64, math.pi)
    xi = 3.0
    out = tilbert(np.sin(xi * g.x), g, h)
    np.testing.assert_allclose(out, -np.cos(xi * g.x) / math.tanh(h * xi), atol=1e-12)
    np.testing.assert_allclose(hilbert(np.cos(xi * g.x), g), np.sin(xi * g.x), atol=1e-12)


def test_tilbert_tends_to_hilbert():
    # u_hat vanishes to second order at 0, so the coth - sgn gap closes like 1/h^3.
    u = derivative(np.exp(-G.x**2), G, 2)
    d = [np.abs(tilbert(u, G, h) - hilbert(u, G)).max() for h in (2.0, 4.0, 8.0, 16.0)]
    assert all(a > 6 * b for a, b in zip(d, d[1:]))
    assert d[-1] < 1e-4


def test_g_h_norm_is_one_over_h():
    for h in (1.0, 2.0, 10.0):
        assert g_h_supremum(h) == pytest.approx(1 / h, abs=1e-6)
        assert np.abs(symbol_values("g_h", G, h)).max() <= 1 / h + 1e-15


def test_g_h_vanishes_at_infinite_depth():
    assert not np.any(g_h(np.ones(G.n), G, math.inf))
    assert not np.any(j_h(np.ones(G.n), G, math.inf))


def test_k_h_is_uniformly_bounded():
    for h in (0.1, 1.0, 100.0, math.inf):
        assert np.abs(symbol_values("k_h", G, h)).max() <= 1.0


def test_sign_convolution_of_gaussian_is_erf():
    # int sgn(x - y) exp(-y^2) dy = sqrt(pi) erf(x)
    out = sign_convolution(np.exp(-G.x**2), G)
    np.testing.assert_allclose(out, math.sqrt(math.pi) * erf(G.x), atol=1e-12)


@pytest.mark.parametrize("h", [0.5, 2.0])
def test_j_h_inverts_derivative(h):
    phi = np.exp(-(G.x - 1) ** 2)
    np.testing.assert_allclose(j_h(derivative(phi, G), G, h), phi / h, atol=1e-12)


@pytest.mark.parametrize("h", [1.0, 3.0])
def test_tilbert_dx_zero_mode(h):
    assert symbol_values("tilbert_dx", G, h)[0] == pytest.approx(1 / h)
    phi = np.exp(-G.x**2)
    lhs = tilbert_dx(phi, G, h)
    rhs = tilbert(derivative(phi, G), G, h) + fft(phi)[0] / h
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_tilbert_line_of_derivative_is_tilbert_dx():
    # On the line T_h d/dx has symbol xi coth(h xi), including the 1/h at 0.
    phi = np.exp(-G.x**2)
    for h in (1.0, 2.0):
        np.testing.assert_allclose(tilbert_line(derivative(phi, G), G, h), tilbert_dx(phi, G, h), atol=1e-12)


def test_tilbert_line_keeps_tails():
    h = 2.0
    out = tilbert_line(np.exp(-G.x**2), G, h).real
    # Far from the bump T_h g -> +-(1/2h) int g on the line.
    assert out[-10] == pytest.approx(math.sqrt(math.pi) / (2 * h), rel=1e-2)
    assert out[10] == pytest.approx(-math.sqrt(math.pi) / (2 * h), rel=1e-2)


def test_hilbert_of_poisson_kernel():
    P, Q = poisson_pair(G)
    np.testing.assert_allclose(hilbert(P, G), Q, atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([0.7, 1.0, 2.0]))
def test_cotlar_identity(seed, h):
    r = np.random.default_rng(seed)
    x = G.x
    f = np.exp(-((x - r.uniform(-2, 2)) / r.uniform(0.7, 2)) ** 2) * np.cos(r.uniform(0, 3) * x)
    g = np.exp(-((x - r.uniform(-2, 2)) / r.uniform(0.7, 2)) ** 2)
    assert cotlar_residual(f, g, G, h) <= 1e-8


def test_cotlar_literal_reading_is_not_an_identity():
    c = smooth_corpus(G)
    assert cotlar_residual(c["gauss"], c["shifted"], G, 1.0, reading="literal") > 1e-2
    with pytest.raises(ValueError):
        cotlar_residual(c["gauss"], c["gauss"], G, 1.0, reading="other")
    with pytest.raises(ConfigurationError):
        cotlar_residual(c["gauss"], c["gauss"], G, math.inf)


def test_real_data_stays_real():
    u = np.exp(-G.x**2) * (1 + G.x)
    for out in (tilbert(u, G, 1.0), hilbert(u, G), k_h(u, G, 1.0), j_h(u, G, 1.0), g_h(u, G, 1.0)):
        assert np.abs(out.imag).max() < 1e-13


def test_pi_plus_infinite_depth_on_hardy_data():
    u = project_sign(np.exp(-G.x**2) * np.exp(3j * G.x), G, "+")
    np.testing.assert_allclose(pi_plus(u, G, math.inf), u, atol=1e-14)
    v = project_sign(u.conj(), G, "-")
    assert np.abs(pi_plus(v, G, math.inf)).max() < 1e-14


def test_pi_plus_finite_depth_tends_to_szego():
    u = np.exp(-G.x**2) * np.exp(1j * G.x)
    ref = pi_plus(u, G, math.inf)
    gaps = [np.linalg.norm(pi_plus(u, G, h) - ref) for h in (2.0, 8.0, 32.0)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_pi_plus_form_is_real():
    r = np.random.default_rng(5)
    u = np.exp(-(G.x / 3) ** 2) * (r.standard_normal(G.n) + 1j * r.standard_normal(G.n))
    f = np.exp(-(G.x / 2) ** 2) * (r.standard_normal(G.n) + 1j * r.standard_normal(G.n))
    for h in (1.0, math.inf):
        q = inner(f, u * pi_plus(np.conj(u) * f, G, h), G)
        assert abs(q.imag) <= 1e-10 * abs(q)


def test_dx_pi_plus_symbol():
    u = np.exp(-G.x**2) * np.exp(0.5j * G.x)
    np.testing.assert_allclose(dx_pi_plus(u, G, math.inf), derivative(pi_plus(u, G, math.inf), G), atol=1e-12)
    h = 2.0
    periodic = derivative(0.5 * (u + 1j * tilbert(u, G, h)), G) + 0.5j * fft(u)[0] / h
    np.testing.assert_allclose(dx_pi_plus(u, G, h), periodic, atol=1e-12)


def test_q_h():
    u = np.exp(-G.x**2)
    np.testing.assert_allclose(q_h(u, G, math.inf, 1.0, 2.0), 2j * u)
    np.testing.assert_allclose(q_h(u, G, 1.0, 1.0, 0.0), -1j * g_h(u, G, 1.0))


def test_unknown_symbol():
    with pytest.raises(ValueError):
        symbol_values("nope", G, 1.0)


def test_operator_suite_passes():
    failed = [r for r in operator_suite() if not r.passed]
    assert not failed, failed
