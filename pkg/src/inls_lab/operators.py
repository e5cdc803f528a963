"""The coth-kernel operator family and its relatives.

Depth ``h`` is a positive float, with ``math.inf`` selecting the Hilbert
transform limit. Zero-mode conventions (value of each symbol at ``xi = 0``):

==============  ======================  ==========
operator        symbol                  ``m(0)``
==============  ======================  ==========
tilbert         ``-i coth(h xi)``       0
hilbert         ``-i sgn(xi)``          0
tilbert_dx      ``xi coth(h xi)``       ``1/h``
g_h             ``xi(sgn xi - coth)``   ``-1/h``
k_h             ``-i(coth - 1/(h xi))`` 0
==============  ======================  ==========

The derivative composites carry the limits that make them agree with the
operators on the line (``J_h d/dx = Id/h``). ``j_h`` is not a multiplier on
the box: it is the sign-kernel convolution, computed exactly for band-limited
data by zero-padding to a box of twice the length.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError
from .spectral_core import Grid, apply_multiplier, fft, ifft, inner

__all__ = [
    "check_depth",
    "coth",
    "tilbert",
    "hilbert",
    "tilbert_dx",
    "g_h",
    "k_h",
    "j_h",
    "sign_convolution",
    "tilbert_line",
    "pi_plus",
    "dx_pi_plus",
    "q_h",
    "cotlar_residual",
    "symbol_values",
]


def check_depth(h) -> float:
    try:
        h = float(h)
    except (TypeError, ValueError):
        raise ConfigurationError(f"depth must be a positive number or inf, got {h!r}") from None
    if not h > 0 or math.isnan(h):
        raise ConfigurationError(f"depth must be positive, got {h}")
    return h


def coth(x):
    """``coth`` for nonzero ``x``, stable near 0 and overflow-free for large ``|x|``."""
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    with np.errstate(over="ignore"):
        return np.sign(x) * (1.0 + 2.0 / np.expm1(2.0 * a))


def _coth_minus_inverse(x):
    # coth(x) - 1/x; the series branch avoids cancellation for small |x|.
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-2
    xs = np.where(small, x, 0.0)
    series = xs / 3 - xs**3 / 45 + 2 * xs**5 / 945
    xl = np.where(small, 1.0, x)
    return np.where(small, series, coth(xl) - 1.0 / xl)


@lru_cache(maxsize=256)
def symbol_values(name: str, grid: Grid, h: float) -> np.ndarray:
    """Lattice values of the named multiplier at depth ``h``."""
    xi = grid.xi
    a = np.abs(xi)
    nz = xi != 0
    out = np.zeros(grid.n, dtype=complex)
    inf = math.isinf(h)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        if name == "tilbert":
            out[nz] = -1j * (np.sign(xi[nz]) if inf else coth(h * xi[nz]))
        elif name == "tilbert_dx":
            out[nz] = a[nz] if inf else a[nz] * coth(h * a[nz])
            out[~nz] = 0.0 if inf else 1.0 / h
        elif name == "g_h":
            if not inf:
                out[nz] = -2.0 * a[nz] / np.expm1(2.0 * h * a[nz])
                out[~nz] = -1.0 / h
        elif name == "k_h":
            out[nz] = -1j * (np.sign(xi[nz]) if inf else _coth_minus_inverse(h * xi[nz]))
        elif name == "dx_pi_plus":
            # d/dx Pi_{+,h} = (i/2)(xi + xi coth(h xi)), value i/(2h) at 0.
            out[nz] = 0.5j * (xi[nz] + (a[nz] if inf else a[nz] * coth(h * a[nz])))
            out[~nz] = 0.0 if inf else 0.5j / h
        elif name == "pi_plus_inf":
            out[:] = 0.5 * (1.0 + np.sign(xi))
        else:
            raise ValueError(f"unknown symbol {name!r}")
    if name in ("tilbert", "k_h"):
        out[grid.nyquist_index] = 0.0
    out.setflags(write=False)
    return out


def tilbert(u, grid: Grid, h):
    """Periodic multiplier ``-i coth(h xi)`` (``h = inf``: Hilbert transform)."""
    return apply_multiplier(u, symbol_values("tilbert", grid, check_depth(h)))


def hilbert(u, grid: Grid):
    return apply_multiplier(u, symbol_values("tilbert", grid, math.inf))


def tilbert_dx(g, grid: Grid, h):
    """The composite ``T_h d/dx`` as a single multiplier."""
    return apply_multiplier(g, symbol_values("tilbert_dx", grid, check_depth(h)))


def g_h(g, grid: Grid, h):
    """``(H - T_h) d/dx``; identically zero at infinite depth."""
    h = check_depth(h)
    if math.isinf(h):
        return np.zeros_like(np.asarray(g, dtype=complex))
    return apply_multiplier(g, symbol_values("g_h", grid, h))


def k_h(g, grid: Grid, h):
    """Regular part of ``T_h`` after removing the sign kernel."""
    return apply_multiplier(g, symbol_values("k_h", grid, check_depth(h)))


@lru_cache(maxsize=64)
def _sign_kernel_values(grid: Grid) -> np.ndarray:
    # Fourier coefficients of the 4L-periodic square wave sgn(z), |z| < 2L.
    m = 2 * grid.n
    k = np.fft.fftfreq(m, 1.0 / m).astype(np.int64)
    eta = np.pi * k / (2.0 * grid.half_width)
    out = np.zeros(m, dtype=complex)
    odd = k % 2 == 1
    out[odd] = -4j / eta[odd]
    out.setflags(write=False)
    return out


def sign_convolution(g, grid: Grid):
    """``int_{-L}^{L} sgn(x - y) g(y) dy`` at the grid points.

    Exact for the trigonometric interpolant of ``g``: the box is embedded in
    one of length ``4L`` on which ``sgn(x - y)`` is a square wave.
    """
    g = np.asarray(g)
    n = grid.n
    gp = np.zeros(g.shape[:-1] + (2 * n,), dtype=complex)
    gp[..., :n] = g
    return ifft(_sign_kernel_values(grid) * fft(gp))[..., :n]


def j_h(g, grid: Grid, h):
    """``(1/2h) int sgn(x - y) g(y) dy``; zero at infinite depth."""
    h = check_depth(h)
    if math.isinf(h):
        return np.zeros_like(np.asarray(g, dtype=complex))
    return sign_convolution(g, grid) / (2.0 * h)


def tilbert_line(g, grid: Grid, h):
    """``T_h`` realized as ``K_h + J_h`` (faithful to the line for decaying data).

    Unlike :func:`tilbert`, this keeps the non-periodic tails ``±(1/2h) int g``
    that ``T_h g`` has when ``g`` has nonzero integral.
    """
    h = check_depth(h)
    if math.isinf(h):
        return hilbert(g, grid)
    return k_h(g, grid, h) + j_h(g, grid, h)


def pi_plus(g, grid: Grid, h):
    """``(1 + i T_h)/2``.

    Finite depth uses ``(i/2) J_h + (1 + i K_h)/2``; infinite depth is the
    multiplier ``(1 + sgn xi)/2`` with weight 1/2 on the zero mode.
    """
    h = check_depth(h)
    if math.isinf(h):
        return apply_multiplier(g, symbol_values("pi_plus_inf", grid, h))
    g = np.asarray(g, dtype=complex)
    return 0.5j * j_h(g, grid, h) + 0.5 * (g + 1j * k_h(g, grid, h))


def dx_pi_plus(g, grid: Grid, h):
    """``d/dx Pi_{+,h}`` as one multiplier (no boundary jump from ``J_h``)."""
    return apply_multiplier(g, symbol_values("dx_pi_plus", grid, check_depth(h)))


def q_h(g, grid: Grid, h, beta: float, gamma: float):
    """``-i beta G_h + i gamma Id``."""
    g = np.asarray(g, dtype=complex)
    return -1j * beta * g_h(g, grid, h) + 1j * gamma * g


def cotlar_residual(f, g, grid: Grid, h, reading: str = "symmetric") -> float:
    """Normalized residual of ``T[f Tg + g Tf] = Tf Tg - fg - M_f M_g``.

    ``reading="literal"`` replaces ``g Tf`` by ``g Tg``. That variant is *not*
    an identity and is kept only for comparison.
    """
    h = check_depth(h)
    if math.isinf(h):
        raise ConfigurationError("the Cotlar identity is checked at finite depth only")
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    nf = np.sqrt(inner(f, f, grid).real)
    ng = np.sqrt(inner(g, g, grid).real)
    if nf == 0 or ng == 0:
        return 0.0
    Tf = tilbert_line(f, grid, h)
    Tg = tilbert_line(g, grid, h)
    if reading == "symmetric":
        inside = f * Tg + g * Tf
    elif reading == "literal":
        inside = f * Tg + g * Tg
    else:
        raise ValueError(f"unknown reading {reading!r}")
    Mf = np.sum(f) * grid.dx / (2 * h)
    Mg = np.sum(g) * grid.dx / (2 * h)
    diff = tilbert_line(inside, grid, h) - (Tf * Tg - f * g - Mf * Mg)
    return float(np.sqrt(inner(diff, diff, grid).real) / (nf * ng))
