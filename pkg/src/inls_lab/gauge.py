"""Primitive of the density, the gauged variables and their checks.

    F(x) = int_{-L}^x |u|^2,   v = P_{+,hi}(e^{i beta F} u),   w = P_{-,hi} u

``e^{i beta F}`` is not periodic. Every projector below acts on grid samples
through the DFT, so the recovery formula is an exact identity of discrete
projector algebra; it never needs the phase to be periodic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .model import ModelParams
from .operators import q_h, sign_convolution
from .spectral_core import (
    Grid,
    derivative,
    fft,
    ifft,
    pad_spectrum,
    project_HI,
    project_hi,
    project_lo,
    project_sign,
    truncate_spectrum,
)

__all__ = [
    "GaugeState",
    "primitive",
    "gauge_v",
    "gauge_w",
    "gauge_state",
    "recovery_residual",
    "gauged_equation_residual",
    "GaugeResidual",
    "boundary_mass",
]

log = logging.getLogger(__name__)

BOUNDARY_MASS_TOL = 1e-8


def boundary_mass(u, grid: Grid, fraction: float = 0.02) -> float:
    """Share of ``|u|^2`` carried by the outermost ``fraction`` of the box on each side."""
    rho = np.abs(u) ** 2
    total = rho.sum()
    if total == 0:
        return 0.0
    edge = np.abs(grid.x) >= (1.0 - fraction) * grid.half_width
    return float(rho[edge].sum() / total)


def primitive(u, grid: Grid, warn: bool = True):
    """``F(x) = int_{-L}^x |u|^2 dy``, spectrally accurate for the interpolant of ``|u|^2``."""
    rho = np.abs(u) ** 2
    if warn and boundary_mass(u, grid) > BOUNDARY_MASS_TOL:
        log.warning("boundary mass %.2e exceeds %.0e; primitive is not line-faithful",
                    boundary_mass(u, grid), BOUNDARY_MASS_TOL)
    total = rho.sum(axis=-1, keepdims=True) * grid.dx
    return 0.5 * (sign_convolution(rho, grid).real + total)


def _p_plus_hi(f, grid):
    return project_sign(project_hi(f, grid), grid, "+")


def _p_minus_hi(f, grid):
    return project_sign(project_hi(f, grid), grid, "-")


def gauge_v(u, grid: Grid, beta: float, F=None):
    if F is None:
        F = primitive(u, grid)
    return _p_plus_hi(np.exp(1j * beta * F) * u, grid)


def gauge_w(u, grid: Grid):
    return _p_minus_hi(u, grid)


@dataclass
class GaugeState:
    F: np.ndarray
    v: np.ndarray
    w: np.ndarray
    beta: float


def gauge_state(u, grid: Grid, beta: float) -> GaugeState:
    F = primitive(u, grid)
    return GaugeState(F, gauge_v(u, grid, beta, F), gauge_w(u, grid), beta)


def recovery_residual(u, grid: Grid, beta: float) -> float:
    """Relative defect of reconstructing ``P_HI u`` from ``v``, ``w`` and the phase."""
    u = np.asarray(u, dtype=complex)
    norm = np.linalg.norm(u)
    if norm == 0:
        return 0.0
    F = primitive(u, grid)
    ep = np.exp(1j * beta * F)
    em = np.conj(ep)
    z = ep * u
    v = _p_plus_hi(z, grid)
    w = gauge_w(u, grid)

    def p_plus_HI(f):
        return project_sign(project_HI(f, grid), grid, "+")

    rhs = (p_plus_HI(em * v)
           + p_plus_HI(project_hi(em, grid) * project_lo(z, grid))
           + p_plus_HI(em * _p_minus_hi(z, grid))
           + project_HI(w, grid))
    return float(np.linalg.norm(project_HI(u, grid) - rhs) / norm)


def _product(a, b, grid):
    # Dealiased pointwise product of two band-limited fields.
    big = grid.padded(2)
    pa = ifft(pad_spectrum(fft(a), big.n))
    pb = ifft(pad_spectrum(fft(b), big.n))
    return ifft(truncate_spectrum(fft(pa * pb), grid.n))


def _gauged_rhs(u, grid, params, complete=False):
    rho = np.abs(u) ** 2
    drho = derivative(rho, grid)
    q = q_h(rho, grid, params.h, params.beta, params.gamma)
    F = primitive(u, grid, warn=False)
    z = np.exp(1j * params.beta * F) * u
    v = _p_plus_hi(z, grid)
    w = gauge_w(u, grid)
    b = params.beta
    rv = -2 * b * _p_plus_hi(_product(v, project_sign(drho, grid, "-"), grid), grid) \
        + _p_plus_hi(z * q, grid)
    rw = 2 * b * _p_minus_hi(_product(w, project_sign(drho, grid, "+"), grid), grid) \
        + _p_minus_hi(u * q, grid)
    if complete:
        # Low-frequency cross terms. They vanish only for a sharp cutoff at
        # |xi| = 1; with the smooth bump P_lo reaches |xi| = 2.
        rv = rv - 2 * b * _p_plus_hi(
            _product(project_lo(z, grid), project_sign(drho, grid, "-"), grid), grid)
        rw = rw + 2 * b * _p_minus_hi(
            _product(project_sign(project_lo(u, grid), grid, "-"),
                     project_sign(drho, grid, "+"), grid), grid)
    return v, w, rv, rw


def _schrodinger(f, grid):
    return 1j * derivative(f, grid, 2)


@dataclass
class GaugeResidual:
    times: np.ndarray
    residual_v: np.ndarray
    residual_w: np.ndarray

    @property
    def max_v(self) -> float:
        return float(self.residual_v.max())

    @property
    def max_w(self) -> float:
        return float(self.residual_w.max())


FORMS = ("reduced", "complete")


def gauged_equation_residual(traj, params: ModelParams | None = None,
                             form: str = "reduced") -> GaugeResidual:
    """``L^2`` defects of both gauged equations at every interior record time.

    ``form="reduced"`` uses the right-hand sides

        -2 beta P_{+,hi}[v P_- d|u|^2] + P_{+,hi}[e^{i beta F} u Q_h |u|^2]
         2 beta P_{-,hi}[w P_+ d|u|^2] + P_{-,hi}[u Q_h |u|^2]

    which drop ``P_{+,hi}[P_lo(e^{i beta F} u) P_- d|u|^2]`` (and its mirror for
    ``w``). ``form="complete"`` keeps those terms and is an exact consequence
    of the equation, so its defect is pure time-differencing error.
    """
    if form not in FORMS:
        raise ConfigurationError(f"form must be one of {FORMS}, got {form!r}")
    traj = traj.uniform()
    if len(traj.times) < 3:
        raise ConfigurationError("gauged_equation_residual needs at least three snapshots")
    params = params or traj.params
    grid = traj.grid
    dt = traj.record_dt
    if boundary_mass(traj.snapshots[0], grid) > BOUNDARY_MASS_TOL:
        log.warning("initial boundary mass exceeds %.0e", BOUNDARY_MASS_TOL)
    beta = params.beta
    vs, ws = [], []
    for u in traj.snapshots:
        F = primitive(u, grid, warn=False)
        vs.append(gauge_v(u, grid, beta, F))
        ws.append(gauge_w(u, grid))
    out_v, out_w = [], []
    for i in range(1, len(traj.times) - 1):
        v, w, rv, rw = _gauged_rhs(traj.snapshots[i], grid, params, form == "complete")
        dv = (vs[i + 1] - vs[i - 1]) / (2 * dt) + _schrodinger(v, grid) - rv
        dw = (ws[i + 1] - ws[i - 1]) / (2 * dt) + _schrodinger(w, grid) - rw
        out_v.append(np.sqrt(np.sum(np.abs(dv) ** 2) * grid.dx))
        out_w.append(np.sqrt(np.sum(np.abs(dw) ** 2) * grid.dx))
    return GaugeResidual(np.asarray(traj.times[1:-1]), np.array(out_v), np.array(out_w))
