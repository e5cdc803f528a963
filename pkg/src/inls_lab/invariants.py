"""Conserved quantities and the Lax pair.

The Lax operator and its companion

    L_u f = -i f' + beta u Pi_{+,h}(conj(u) f)
    P_u f = -i f'' + 2 beta u (d/dx Pi_{+,h})(conj(u) f)

are applied matrix-free. Matrices live on the retained Fourier modes
``-m/2 <= k < m/2`` with the orthonormal basis ``exp(i xi_k x)/sqrt(2L)``;
their columns are obtained by applying the operators above to each basis
vector on the full grid, so no product is ever truncated to ``m`` modes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, NumericalError, OperatorError
from .model import ModelParams
from .operators import dx_pi_plus, pi_plus
from .spectral_core import Grid, derivative, fft, inner, sobolev_norm

__all__ = [
    "mass",
    "momentum",
    "apply_lax",
    "apply_peter",
    "energy_k",
    "LaxMatrix",
    "lax_matrix",
    "peter_matrix",
    "lax_square_form",
    "lax_pair_residual",
    "lax_spectrum",
    "SpectrumReport",
    "isospectral_drift",
    "fractional_energy",
    "mono_check",
    "kappa_threshold",
    "energy_limit_study",
    "EnergyLimitTable",
]

log = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-8


def mass(u, grid: Grid) -> float:
    return float(np.sum(np.abs(u) ** 2, axis=-1) * grid.dx)


def momentum(u, grid: Grid, beta: float) -> float:
    """``int i u conj(u)' dx + (beta/2) int |u|^4 dx`` (real part)."""
    du_bar = np.conj(derivative(u, grid))
    p = np.sum(1j * u * du_bar) * grid.dx + 0.5 * beta * np.sum(np.abs(u) ** 4) * grid.dx
    return float(p.real)


def apply_lax(u, f, grid: Grid, params: ModelParams):
    """``L_u f``; ``f`` may be a stack of fields along leading axes."""
    f = np.asarray(f, dtype=complex)
    return -1j * derivative(f, grid) + params.beta * u * pi_plus(np.conj(u) * f, grid, params.h)


def apply_peter(u, f, grid: Grid, params: ModelParams):
    f = np.asarray(f, dtype=complex)
    return (-1j * derivative(f, grid, 2)
            + 2.0 * params.beta * u * dx_pi_plus(np.conj(u) * f, grid, params.h))


def energy_k(u, grid: Grid, params: ModelParams, k: int) -> float:
    """``<u, L_u^k u>`` by repeated application."""
    if not 0 <= k <= 8:
        raise ConfigurationError(f"energy order must lie in [0, 8], got {k}")
    v = np.asarray(u, dtype=complex)
    for _ in range(k):
        v = apply_lax(u, v, grid, params)
    e = inner(u, v, grid)
    scale = np.sqrt(inner(u, u, grid).real * inner(v, v, grid).real)
    if abs(e.imag) > 1e-9 * max(scale, 1e-300):
        log.warning("E_%d has imaginary part %.3e (scale %.3e)", k, e.imag, scale)
    return float(e.real)


# --- matrices ------------------------------------------------------------

def _retained(grid: Grid, m: int):
    if m < 2 or m % 2 or m > grid.n // 2:
        raise ConfigurationError(f"retained mode count m must be even and <= n/2, got {m}")
    k = np.arange(-m // 2, m // 2)
    return k, np.mod(k, grid.n)


def _basis(grid: Grid, k):
    # DFT plane waves exp(i xi_k (x + L)); with forward-normalized FFTs the
    # coefficient of L d_k on mode j is <d_j, L d_k>/2L, the matrix entry in
    # the orthonormal basis d_k/sqrt(2L).
    return np.exp(1j * np.pi * np.outer(k, grid.x + grid.half_width) / grid.half_width)


def _columns(op, u, grid, params, m):
    k, idx = _retained(grid, m)
    out = op(u, _basis(grid, k), grid, params)
    return fft(out)[:, idx].T


@dataclass
class LaxMatrix:
    """Hermitian matrix of ``L_u`` on the retained modes."""

    matrix: np.ndarray
    modes: np.ndarray
    xi: np.ndarray
    asymmetry: float

    @property
    def m(self) -> int:
        return self.matrix.shape[0]


def lax_matrix(u, grid: Grid, params: ModelParams, m: int) -> LaxMatrix:
    k, _ = _retained(grid, m)
    A = _columns(apply_lax, u, grid, params, m)
    asym = float(np.linalg.norm(A - A.conj().T) / max(np.linalg.norm(A), 1e-300))
    if asym > HERMITIAN_TOL:
        raise OperatorError(f"Lax matrix asymmetry {asym:.3e} exceeds {HERMITIAN_TOL:.0e}")
    H = 0.5 * (A + A.conj().T)
    return LaxMatrix(H, k, np.pi * k / grid.half_width, asym)


def peter_matrix(u, grid: Grid, params: ModelParams, m: int) -> np.ndarray:
    return _columns(apply_peter, u, grid, params, m)


def lax_square_form(u, grid: Grid, params: ModelParams, m: int) -> np.ndarray:
    """Gram matrix ``<e_j, L^2 e_k> = <L e_j, L e_k>`` on the retained modes."""
    k, _ = _retained(grid, m)
    cols = fft(apply_lax(u, _basis(grid, k), grid, params))  # (m, n)
    G = cols.conj() @ cols.T
    return 0.5 * (G + G.conj().T)


def _commutator_columns(u, grid, params, m):
    k, idx = _retained(grid, m)
    e = _basis(grid, k)
    Le = apply_lax(u, e, grid, params)
    Pe = apply_peter(u, e, grid, params)
    C = apply_peter(u, Le, grid, params) - apply_lax(u, Pe, grid, params)
    return fft(C)[:, idx].T


def _interior_indices(traj):
    if len(traj.times) < 3:
        raise ConfigurationError("need at least three snapshots")
    return range(1, len(traj.times) - 1)


def lax_pair_residual(traj, m: int) -> float:
    """max_t ||dL/dt - [P, L]||_F / ||L||_F with a central difference in time."""
    traj = traj.uniform()
    grid, params = traj.grid, traj.params
    if params.gamma != 0:
        raise ConfigurationError("the Lax pair holds for gamma = 0 only")
    idx = _interior_indices(traj)
    dt = traj.record_dt
    mats = [lax_matrix(u, grid, params, m).matrix for u in traj.snapshots]
    worst = 0.0
    for i in idx:
        C = _commutator_columns(traj.snapshots[i], grid, params, m)
        norm = np.linalg.norm(mats[i])
        if norm == 0:
            continue
        r = np.linalg.norm((mats[i + 1] - mats[i - 1]) / (2 * dt) - C) / norm
        worst = max(worst, float(r))
    return worst


def lax_spectrum(u, grid: Grid, params: ModelParams, m: int) -> np.ndarray:
    H = lax_matrix(u, grid, params, m).matrix
    try:
        return scipy.linalg.eigh(H, eigvals_only=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"Hermitian eigensolve failed: {exc}") from exc


@dataclass
class SpectrumReport:
    times: np.ndarray
    eigenvalues: np.ndarray  # (len(times), count), tracked
    drift: np.ndarray  # per tracked eigenvalue
    mismatches: int

    @property
    def max_drift(self) -> float:
        return float(self.drift.max()) if self.drift.size else 0.0


def isospectral_drift(traj, m: int, count: int = 8) -> SpectrumReport:
    """Track the ``count`` eigenvalues nearest 0 by nearest-neighbour matching."""
    if not 1 <= count <= 16:
        raise ConfigurationError(f"count must lie in [1, 16], got {count}")
    grid, params = traj.grid, traj.params
    ev0 = lax_spectrum(traj.snapshots[0], grid, params, m)
    tracked = np.sort(ev0[np.argsort(np.abs(ev0))[:count]])
    rows = [tracked]
    mismatches = 0
    prev = tracked
    for u in traj.snapshots[1:]:
        ev = lax_spectrum(u, grid, params, m)
        j = np.searchsorted(ev, prev)
        j = np.clip(j, 1, len(ev) - 1)
        left, right = ev[j - 1], ev[j]
        pick = np.where(np.abs(prev - left) <= np.abs(prev - right), left, right)
        if len(np.unique(pick)) < len(pick):
            mismatches += 1
        rows.append(pick)
        prev = pick
    ev = np.array(rows)
    return SpectrumReport(np.asarray(traj.times), ev, np.abs(ev - ev[0]).max(axis=0), mismatches)


def _retained_coefficients(u, grid, m):
    _, idx = _retained(grid, m)
    c = fft(u)
    return np.sqrt(grid.length) * c[idx]


def fractional_energy(u, grid: Grid, params: ModelParams, s: float, kappa: float, m: int) -> float:
    """``<u, (L^2 + kappa^2)^s u>`` by Hermitian functional calculus."""
    if not kappa > 0:
        raise ConfigurationError(f"kappa must be positive, got {kappa}")
    if not 0.25 <= s <= 1.0:
        raise ConfigurationError(f"s must lie in [1/4, 1], got {s}")
    if m > grid.n // 4:
        raise ConfigurationError(f"fractional energy needs m <= n/4, got m={m}, n={grid.n}")
    H = lax_matrix(u, grid, params, m).matrix
    try:
        lam, V = scipy.linalg.eigh(H)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"Hermitian eigensolve failed: {exc}") from exc
    c = V.conj().T @ _retained_coefficients(u, grid, m)
    return float(np.sum(np.abs(c) ** 2 * (lam**2 + kappa**2) ** s))


def kappa_threshold(u, grid: Grid, C: float = 10.0) -> float:
    """``C (1 + ||u||_{H^{1/4}})^4``."""
    return C * (1.0 + sobolev_norm(u, grid, 0.25)) ** 4


def mono_check(u, grid: Grid, params: ModelParams, kappa: float, m: int):
    """Smallest eigenvalues of the two gaps in ``(L0^2+k^2)/2 <= L^2+k^2 <= 3(L0^2+k^2)/2``."""
    k, _ = _retained(grid, m)
    xi2 = (np.pi * k / grid.half_width) ** 2
    L2 = lax_square_form(u, grid, params, m)
    base = np.diag(xi2 + kappa**2)
    lower = L2 + kappa**2 * np.eye(len(k)) - 0.5 * base
    upper = 1.5 * base - (L2 + kappa**2 * np.eye(len(k)))
    lo = scipy.linalg.eigh(lower, eigvals_only=True, subset_by_index=[0, 0])[0]
    up = scipy.linalg.eigh(upper, eigvals_only=True, subset_by_index=[0, 0])[0]
    return float(lo), float(up)


@dataclass
class EnergyLimitTable:
    h_list: np.ndarray
    ks: np.ndarray
    differences: np.ndarray  # (len(ks), len(h_list))
    decay: dict  # k -> fitted exponent theta (None when differences vanish)


def energy_limit_study(u, grid: Grid, beta: float, k_max: int, h_list) -> EnergyLimitTable:
    """``|E_k^h - E_k^inf|`` over ``h_list`` and the fitted decay exponent per ``k``."""
    hs = np.asarray(h_list, dtype=float)
    if len(hs) < 3 or np.any(np.diff(hs) <= 0):
        raise ConfigurationError("h_list must be increasing with at least three entries")
    ks = np.arange(k_max + 1)
    ref = {k: energy_k(u, grid, ModelParams(math.inf, beta, 0.0), int(k)) for k in ks}
    diffs = np.array([[abs(energy_k(u, grid, ModelParams(h, beta, 0.0), int(k)) - ref[k])
                       for h in hs] for k in ks])
    decay = {}
    for k, row in zip(ks, diffs):
        scale = max(abs(ref[k]), 1.0)
        if np.all(row <= 1e-12 * scale):
            decay[int(k)] = None
        else:
            decay[int(k)] = float(-np.polyfit(np.log(hs), np.log(row), 1)[0])
    return EnergyLimitTable(hs, ks, diffs, decay)
