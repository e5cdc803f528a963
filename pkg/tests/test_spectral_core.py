import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inls_lab import ConfigurationError, Grid
from inls_lab.spectral_core import (
    ComplexField,
    Symbol,
    apply_symbol,
    bump,
    derivative,
    fft,
    free_evolve,
    ifft,
    inner,
    lebesgue_norm,
    pad_spectrum,
    project_dyadic,
    project_HI,
    project_hi,
    project_LO,
    project_lo,
    project_sign,
    projector_values,
    sobolev_norm,
    truncate_spectrum,
    ws4_norm,
)


def test_grid_geometry():
    g = Grid(64, 10.0)
    assert g.x[0] == -10.0
    assert g.dx == pytest.approx(20 / 64)
    assert g.x[-1] == pytest.approx(10 - 20 / 64)
    assert g.xi[1] == pytest.approx(math.pi / 10)
    assert g.xi[g.nyquist_index] < 0


@pytest.mark.parametrize("n", [0, 3, 100, 8])
def test_grid_rejects_bad_sizes(n):
    with pytest.raises(ConfigurationError):
        Grid(n, 1.0)


@pytest.mark.parametrize("L", [0.0, -1.0, math.inf, math.nan])
def test_grid_rejects_bad_width(L):
    with pytest.raises(ConfigurationError):
        Grid(64, L)


def test_grid_is_hashable_and_equal():
    assert Grid(64, 2.0) == Grid(64, 2.0)
    assert len({Grid(64, 2.0), Grid(64, 2.0)}) == 1


def test_complex_field_validates():
    g = Grid(16, 1.0)
    with pytest.raises(ConfigurationError):
        ComplexField(g, np.zeros(8))
    with pytest.raises(ConfigurationError):
        ComplexField(g, np.full(16, np.nan))
    assert ComplexField(g, np.ones(16)).values.dtype == complex


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_parseval(seed):
    g = Grid(128, 3.0)
    r = np.random.default_rng(seed)
    u = r.standard_normal(g.n) + 1j * r.standard_normal(g.n)
    assert np.sum(np.abs(u) ** 2) * g.dx == pytest.approx(g.length * np.sum(np.abs(fft(u)) ** 2))
    np.testing.assert_allclose(ifft(fft(u)), u, atol=1e-13)


def test_derivative_of_plane_wave():
    g = Grid(64, math.pi)
    u = np.exp(3j * g.x)
    np.testing.assert_allclose(derivative(u, g), 3j * u, atol=1e-12)
    np.testing.assert_allclose(derivative(u, g, 2), -9 * u, atol=1e-11)


def test_derivative_of_gaussian():
    g = Grid(512, 20.0)
    u = np.exp(-g.x**2)
    np.testing.assert_allclose(derivative(u, g), -2 * g.x * u, atol=1e-12)


def test_odd_derivative_drops_nyquist():
    g = Grid(16, 1.0)
    u = np.cos(math.pi * 8 * g.x / 1.0)  # pure Nyquist mode
    assert np.abs(derivative(u, g)).max() < 1e-12


def test_symbol_validation_and_nyquist():
    g = Grid(32, 1.0)
    s = Symbol(lambda xi: np.sign(xi) * 1j, 0.0, odd=True, name="isgn")
    vals = s.on(g)
    assert vals[g.nyquist_index] == 0
    assert vals[0] == 0
    bad = Symbol(lambda xi: 1 / (xi - xi), 0.0, name="bad")
    with np.errstate(divide="ignore", invalid="ignore"), pytest.raises(Exception):
        bad.on(g)
    u = np.exp(1j * math.pi * g.x)
    np.testing.assert_allclose(apply_symbol(u, g, s), 1j * u, atol=1e-13)


def test_pad_truncate_roundtrip():
    r = np.random.default_rng(0)
    c = fft(r.standard_normal(32) + 1j * r.standard_normal(32))
    c[16] = 0
    back = truncate_spectrum(pad_spectrum(c, 64), 32)
    np.testing.assert_allclose(back, c, atol=1e-15)
    # Padding is exact interpolation: the values on the coarse points agree.
    fine = ifft(pad_spectrum(c, 64))
    np.testing.assert_allclose(fine[::2], ifft(c), atol=1e-13)


def test_inner_is_sesquilinear():
    g = Grid(64, 2.0)
    f = np.exp(1j * g.x)
    assert inner(f, 2j * f, g) == pytest.approx(2j * g.length)


def test_bump_profile():
    t = np.linspace(-3, 3, 601)
    b = bump(t)
    assert np.all(b[np.abs(t) <= 1] == 1)
    assert np.all(b[np.abs(t) >= 2] == 0)
    assert np.all((b >= 0) & (b <= 1))
    np.testing.assert_allclose(b, b[::-1])


def test_dyadic_partition_of_unity():
    g = Grid(4096, 40.0)
    total = projector_values(g, "dyadic", 1).copy()
    N = 2
    while N <= 2 ** 12:
        total += projector_values(g, "dyadic", N)
        N *= 2
    np.testing.assert_allclose(total, 1.0, atol=1e-14)


def test_hi_lo_split_and_sign_split():
    g = Grid(256, 10.0)
    r = np.random.default_rng(1)
    u = r.standard_normal(g.n) + 1j * r.standard_normal(g.n)
    np.testing.assert_allclose(project_hi(u, g) + project_lo(u, g), u, atol=1e-13)
    np.testing.assert_allclose(project_HI(u, g) + project_LO(u, g), u, atol=1e-13)
    zero_mode = fft(u)[0]
    np.testing.assert_allclose(project_sign(u, g, "+") + project_sign(u, g, "-") + zero_mode, u, atol=1e-13)
    with pytest.raises(ValueError):
        project_sign(u, g, "0")
    with pytest.raises(ValueError):
        project_dyadic(u, g, 3)


def test_projectors_are_contractive():
    g = Grid(256, 10.0)
    u = np.random.default_rng(2).standard_normal(g.n).astype(complex)
    for op in (project_hi, project_lo, project_HI, project_LO):
        assert np.linalg.norm(op(u, g)) <= np.linalg.norm(u) * (1 + 1e-12)


def test_sobolev_norm_of_plane_wave():
    g = Grid(64, math.pi)
    u = np.exp(2j * g.x)
    assert sobolev_norm(u, g, 0.0) == pytest.approx(math.sqrt(2 * math.pi))
    assert sobolev_norm(u, g, 1.0) == pytest.approx(math.sqrt(2 * math.pi * 5))
    with pytest.raises(ConfigurationError):
        sobolev_norm(u, g, 5.0)


def test_lebesgue_norms():
    g = Grid(512, 20.0)
    u = np.exp(-g.x**2 / 2)
    assert lebesgue_norm(u, g, 2) ** 2 == pytest.approx(math.sqrt(math.pi))
    assert lebesgue_norm(u, g, 4) ** 4 == pytest.approx(math.sqrt(math.pi / 2))
    assert lebesgue_norm(u, g, np.inf) == pytest.approx(1.0)
    assert ws4_norm(u, g, 0.0) == pytest.approx(lebesgue_norm(u, g, 4))
    with pytest.raises(ConfigurationError):
        lebesgue_norm(u, g, 1)


def test_free_evolve_matches_gaussian_spreading():
    # u_t + i u_xx = 0 from exp(-x^2/2): u = (1 - 2it)^{-1/2} exp(-x^2 / (2(1 - 2it))).
    g = Grid(2048, 60.0)
    t = 0.7
    exact = (1 - 2j * t) ** -0.5 * np.exp(-g.x**2 / (2 * (1 - 2j * t)))
    np.testing.assert_allclose(free_evolve(np.exp(-g.x**2 / 2), g, t), exact, atol=1e-12)


def test_free_evolve_group_and_unitarity():
    g = Grid(128, 5.0)
    u = np.random.default_rng(3).standard_normal(g.n) + 0j
    a = free_evolve(free_evolve(u, g, 0.3), g, 0.4)
    np.testing.assert_allclose(a, free_evolve(u, g, 0.7), atol=1e-12)
    assert np.linalg.norm(a) == pytest.approx(np.linalg.norm(u))


def test_stacked_fields_are_handled_per_row():
    g = Grid(64, 2.0)
    u = np.vstack([np.exp(1j * g.x * k * math.pi / 2) for k in range(3)])
    d = derivative(u, g)
    for row, k in zip(d, range(3)):
        np.testing.assert_allclose(row, 1j * k * math.pi / 2 * u[k], atol=1e-12)
