"""Periodic grids, Fourier multipliers, projectors and norms.

All fields are complex numpy arrays whose *last* axis runs over the grid
points, so every routine here also acts column-wise on stacks of fields.

The forward transform carries the ``1/n`` factor (``norm="forward"``), so
``fft(u)[k]`` approximates the Fourier-series coefficient of ``u`` on the
box ``[-L, L)`` and

    sum_j |u_j|^2 dx == 2L * sum_k |fft(u)_k|^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError, OperatorError

__all__ = [
    "Grid",
    "ComplexField",
    "Symbol",
    "make_grid",
    "fft",
    "ifft",
    "apply_symbol",
    "apply_multiplier",
    "derivative",
    "project_sign",
    "project_dyadic",
    "project_hi",
    "project_lo",
    "project_HI",
    "project_LO",
    "bump",
    "sobolev_norm",
    "lebesgue_norm",
    "ws4_norm",
    "free_evolve",
    "inner",
    "pad_spectrum",
    "truncate_spectrum",
    "zero_nyquist",
]


def fft(u):
    return sfft.fft(u, axis=-1, norm="forward")


def ifft(a):
    return sfft.ifft(a, axis=-1, norm="forward")


@dataclass(frozen=True)
class Grid:
    """Uniform periodic discretization of ``[-half_width, half_width)``."""

    n: int
    half_width: float

    def __post_init__(self):
        n = self.n
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise ConfigurationError(f"grid.n must be an integer, got {n!r}")
        if n < 16 or n & (n - 1):
            raise ConfigurationError(f"grid.n must be a power of two >= 16, got {n}")
        L = float(self.half_width)
        if not np.isfinite(L) or L <= 0:
            raise ConfigurationError(f"grid.half_width must be positive, got {self.half_width!r}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "half_width", L)

    @property
    def length(self) -> float:
        return 2.0 * self.half_width

    @property
    def dx(self) -> float:
        return self.length / self.n

    @cached_property
    def x(self) -> np.ndarray:
        x = -self.half_width + np.arange(self.n) * self.dx
        x.setflags(write=False)
        return x

    @cached_property
    def k(self) -> np.ndarray:
        """Integer mode numbers in FFT order; ``k = -n/2`` is the Nyquist mode."""
        k = sfft.fftfreq(self.n, 1.0 / self.n).astype(np.int64)
        k.setflags(write=False)
        return k

    @cached_property
    def xi(self) -> np.ndarray:
        xi = np.pi * self.k / self.half_width
        xi.setflags(write=False)
        return xi

    @property
    def nyquist_index(self) -> int:
        return self.n // 2

    def padded(self, factor: int = 2) -> "Grid":
        """Same box with ``factor`` times as many points."""
        return Grid(self.n * factor, self.half_width)

    def zeros(self):
        return np.zeros(self.n, dtype=complex)


def make_grid(n, half_width) -> Grid:
    return Grid(n, half_width)


@dataclass(frozen=True)
class ComplexField:
    """A complex state sampled on a grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n,):
            raise ConfigurationError(
                f"field has shape {v.shape}, grid expects ({self.grid.n},)"
            )
        if not np.all(np.isfinite(v)):
            raise ConfigurationError("field contains NaN or Inf samples")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class Symbol:
    """Fourier multiplier ``xi -> m(xi)`` with an explicit value at ``xi = 0``.

    ``rule`` is only ever called on nonzero frequencies. Odd symbols have the
    Nyquist mode removed, since its sign is not defined on the lattice.
    """

    rule: Callable[[np.ndarray], np.ndarray]
    at_zero: complex
    odd: bool = False
    name: str = ""

    def on(self, grid: Grid) -> np.ndarray:
        return _symbol_values(self, grid)


@lru_cache(maxsize=256)
def _symbol_values(symbol: Symbol, grid: Grid) -> np.ndarray:
    xi = grid.xi
    out = np.empty(grid.n, dtype=complex)
    nz = xi != 0
    with np.errstate(over="ignore"):
        out[nz] = symbol.rule(xi[nz])
    out[~nz] = symbol.at_zero
    if symbol.odd:
        out[grid.nyquist_index] = 0.0
    if not np.all(np.isfinite(out)):
        raise OperatorError(f"symbol {symbol.name or symbol.rule!r} is not finite on the lattice")
    out.setflags(write=False)
    return out


def apply_multiplier(u, values):
    """Apply precomputed lattice values of a multiplier to ``u``."""
    return ifft(values * fft(u))


def apply_symbol(u, grid: Grid, symbol: Symbol):
    return apply_multiplier(u, symbol.on(grid))


@lru_cache(maxsize=64)
def _derivative_values(grid: Grid, order: int):
    m = (1j * grid.xi) ** order
    if order % 2:
        m[grid.nyquist_index] = 0.0
    m.setflags(write=False)
    return m


def derivative(u, grid: Grid, order: int = 1):
    """Spectral derivative; the Nyquist mode is dropped for odd orders."""
    return apply_multiplier(u, _derivative_values(grid, order))


def zero_nyquist(u_hat, grid: Grid):
    u_hat = np.array(u_hat, copy=True)
    u_hat[..., grid.nyquist_index] = 0.0
    return u_hat


def pad_spectrum(u_hat, n_big: int):
    """Embed FFT-ordered coefficients into a larger lattice (Nyquist dropped)."""
    n = u_hat.shape[-1]
    h = n // 2
    out = np.zeros(u_hat.shape[:-1] + (n_big,), dtype=complex)
    out[..., :h] = u_hat[..., :h]
    out[..., n_big - h + 1:] = u_hat[..., h + 1:]
    return out


def truncate_spectrum(u_hat, n_small: int):
    """Keep the modes ``|k| < n_small/2``; the small-grid Nyquist is zero."""
    h = n_small // 2
    out = np.zeros(u_hat.shape[:-1] + (n_small,), dtype=complex)
    out[..., :h] = u_hat[..., :h]
    out[..., h + 1:] = u_hat[..., -h + 1:]
    return out


def inner(f, g, grid: Grid):
    """Quadrature ``<f, g> = int conj(f) g dx`` over the last axis."""
    return np.sum(np.conj(f) * g, axis=-1) * grid.dx


# --- projectors ----------------------------------------------------------

def _smooth_step(s):
    # C-infinity transition from 0 (s <= 0) to 1 (s >= 1) built from exp(-1/s).
    s = np.asarray(s, dtype=float)
    a = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
    b = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
    return a / (a + b)


def bump(t):
    """Smooth even bump: 1 on ``|t| <= 1``, 0 on ``|t| >= 2``."""
    return 1.0 - _smooth_step(np.abs(t) - 1.0)


@lru_cache(maxsize=128)
def _dyadic_values(grid: Grid, kind: str, N: int = 1):
    xi = grid.xi
    if kind == "dyadic":
        m = bump(xi) if N == 1 else bump(xi / N) - bump(2 * xi / N)
    elif kind == "hi":
        m = 1.0 - bump(xi)
    elif kind == "lo":
        m = bump(xi)
    elif kind == "HI":
        m = 1.0 - bump(xi / 4)
    elif kind == "LO":
        m = bump(xi / 4)
    elif kind == "+":
        m = (xi > 0).astype(float)
    elif kind == "-":
        m = (xi < 0).astype(float)
    else:
        raise ValueError(kind)
    m = np.asarray(m, dtype=float)
    m.setflags(write=False)
    return m


def project_sign(u, grid: Grid, sign: str):
    """Sharp projector onto ``sign*xi > 0``; the zero mode is killed by both."""
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    return apply_multiplier(u, _dyadic_values(grid, sign))


def project_dyadic(u, grid: Grid, N: int):
    """Littlewood-Paley piece ``P_N`` (``N = 1`` is the low block)."""
    N = int(N)
    if N < 1 or N & (N - 1):
        raise ValueError(f"N must be a dyadic integer >= 1, got {N}")
    return apply_multiplier(u, _dyadic_values(grid, "dyadic", N))


def project_hi(u, grid: Grid):
    return apply_multiplier(u, _dyadic_values(grid, "hi"))


def project_lo(u, grid: Grid):
    return apply_multiplier(u, _dyadic_values(grid, "lo"))


def project_HI(u, grid: Grid):
    return apply_multiplier(u, _dyadic_values(grid, "HI"))


def project_LO(u, grid: Grid):
    return apply_multiplier(u, _dyadic_values(grid, "LO"))


def projector_values(grid: Grid, kind: str, N: int = 1):
    """Lattice values of a named projector (``'hi'``, ``'+'``, ``'dyadic'``...)."""
    return _dyadic_values(grid, kind, N)


# --- norms ---------------------------------------------------------------

def sobolev_norm(u, grid: Grid, s: float) -> float:
    """``||<xi>^s u_hat||`` with the Plancherel weight of the box."""
    if not -2.0 <= s <= 4.0:
        raise ConfigurationError(f"sobolev regularity must lie in [-2, 4], got {s}")
    w = (1.0 + grid.xi**2) ** s
    return float(np.sqrt(grid.length * np.sum(w * np.abs(fft(u)) ** 2, axis=-1)))


def lebesgue_norm(u, grid: Grid, p) -> float:
    a = np.abs(u)
    if p == np.inf or p == "inf":
        return float(np.max(a))
    if p not in (2, 3, 4):
        raise ConfigurationError(f"p must be one of 2, 3, 4, inf; got {p!r}")
    return float((np.sum(a**p) * grid.dx) ** (1.0 / p))


def ws4_norm(u, grid: Grid, s: float) -> float:
    """``L^4`` norm of ``<D>^s u``."""
    if not -2.0 <= s <= 4.0:
        raise ConfigurationError(f"sobolev regularity must lie in [-2, 4], got {s}")
    return lebesgue_norm(apply_multiplier(u, (1.0 + grid.xi**2) ** (s / 2)), grid, 4)


def free_evolve(u, grid: Grid, t: float):
    """Linear flow of ``u_t + i u_xx = 0`` (multiplier ``exp(i xi^2 t)``)."""
    return apply_multiplier(u, np.exp(1j * grid.xi**2 * t))
