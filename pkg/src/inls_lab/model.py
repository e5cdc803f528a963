"""Right-hand side of the intermediate NLS in its two equivalent forms.

    u_t + i u_xx = beta u (1 + i T_h) d/dx |u|^2 + i gamma |u|^2 u          (direct)
                 = 2 beta u P_+ d/dx |u|^2 + u Q_h |u|^2                    (split)

Every pointwise product is formed on a grid with ``2n`` points and truncated
back, which removes all aliasing of cubic terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, StateError
from .operators import check_depth, symbol_values
from .spectral_core import (
    Grid,
    fft,
    ifft,
    inner,
    pad_spectrum,
    project_sign,
    projector_values,
    truncate_spectrum,
)

__all__ = [
    "ModelParams",
    "rhs_direct",
    "rhs_split",
    "nonlinear_hat",
    "linear_symbol",
    "pde_residual",
    "hardy_leak",
    "check_state",
    "DEFAULT_MAX_AMP",
]

DEFAULT_MAX_AMP = 1e6


@dataclass(frozen=True)
class ModelParams:
    """Depth ``h`` (``math.inf`` for CCM), dispersion-coupling ``beta``, cubic ``gamma``.

    ``beta < 0`` is focusing, ``beta > 0`` defocusing.
    """

    h: float = math.inf
    beta: float = -1.0
    gamma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "h", check_depth(self.h))
        for name in ("beta", "gamma"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ConfigurationError(f"model.{name} must be finite, got {v}")
            object.__setattr__(self, name, v)

    @property
    def is_ccm(self) -> bool:
        return math.isinf(self.h) and self.gamma == 0.0

    @property
    def focusing(self) -> bool:
        return self.beta < 0

    def with_(self, **changes) -> "ModelParams":
        d = {"h": self.h, "beta": self.beta, "gamma": self.gamma}
        d.update(changes)
        return ModelParams(**d)


def check_state(u, max_amp=DEFAULT_MAX_AMP, time=None):
    a = np.abs(u)
    if not np.all(np.isfinite(a)):
        raise StateError("state contains NaN or Inf", time)
    if a.size and a.max() > max_amp:
        raise StateError(f"amplitude {a.max():.3e} exceeds blow-up threshold {max_amp:.1e}", time)


@lru_cache(maxsize=64)
def linear_symbol(grid: Grid) -> np.ndarray:
    """Symbol of ``-i d_xx``, i.e. ``i xi^2``."""
    m = 1j * grid.xi**2
    m.setflags(write=False)
    return m


@lru_cache(maxsize=64)
def _direct_symbol(big: Grid, h: float) -> np.ndarray:
    # (1 + i T_h) d/dx = d/dx + i T_h d/dx, with T_h d/dx(0) = 1/h.
    m = 1j * big.xi + 1j * symbol_values("tilbert_dx", big, h)
    m[big.nyquist_index] = 0.0
    m.setflags(write=False)
    return m


def _padded(u_hat, grid):
    big = grid.padded(2)
    return big, ifft(pad_spectrum(u_hat, big.n))


def nonlinear_hat(u_hat, grid: Grid, params: ModelParams):
    """Fourier coefficients of the dealiased nonlinearity (direct form)."""
    big, up = _padded(u_hat, grid)
    rho = np.abs(up) ** 2
    w = ifft(_direct_symbol(big, params.h) * fft(rho))
    prod = params.beta * up * w
    if params.gamma:
        prod = prod + 1j * params.gamma * rho * up
    return truncate_spectrum(fft(prod), grid.n)


def rhs_direct(u, grid: Grid, params: ModelParams, max_amp=DEFAULT_MAX_AMP):
    check_state(u, max_amp)
    u_hat = fft(u)
    return ifft(linear_symbol(grid) * u_hat + nonlinear_hat(u_hat, grid, params))


def rhs_split(u, grid: Grid, params: ModelParams, max_amp=DEFAULT_MAX_AMP):
    """Same vector field assembled from ``P_+``, ``d/dx`` and ``Q_h``."""
    check_state(u, max_amp)
    u_hat = fft(u)
    big, up = _padded(u_hat, grid)
    rho = np.abs(up) ** 2
    rho_hat = fft(rho)
    dx = 1j * big.xi
    dx[big.nyquist_index] = 0.0
    p_plus_d = ifft(projector_values(big, "+") * dx * rho_hat)
    q = 1j * params.gamma * rho
    if not math.isinf(params.h):
        q = q - 1j * params.beta * ifft(symbol_values("g_h", big, params.h) * rho_hat)
    prod = up * (2.0 * params.beta * p_plus_d + q)
    nl = truncate_spectrum(fft(prod), grid.n)
    return ifft(linear_symbol(grid) * u_hat + nl)


def pde_residual(u_prev, u_mid, u_next, dt, grid: Grid, params: ModelParams,
                 window: float | None = None) -> float:
    """``L^2`` norm of the central-difference defect at the middle snapshot.

    ``window`` restricts the norm to ``|x| <= window``, for states whose
    periodization is not smooth at the box edge.
    """
    dudt = (np.asarray(u_next) - np.asarray(u_prev)) / (2.0 * dt)
    r = dudt - rhs_direct(u_mid, grid, params)
    if window is not None:
        r = np.where(np.abs(grid.x) <= window, r, 0.0)
    return float(np.sqrt(inner(r, r, grid).real))


def hardy_leak(u, grid: Grid) -> float:
    """Fraction of ``L^2`` mass on negative frequencies (0 for the zero field)."""
    total = np.sum(np.abs(u) ** 2)
    if total == 0:
        return 0.0
    return float(np.sum(np.abs(project_sign(u, grid, "-")) ** 2) / total)
