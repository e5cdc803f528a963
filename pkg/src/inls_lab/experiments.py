"""Explicit solutions, initial data and the headline numerical studies."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, StateError
from .integrator import StepperConfig, Trajectory, integrate
from .model import ModelParams, pde_residual
from .spectral_core import (
    Grid,
    bump,
    fft,
    ifft,
    lebesgue_norm,
    pad_spectrum,
    projector_values,
    sobolev_norm,
)

__all__ = [
    "static_soliton",
    "periodic_static_soliton",
    "singular_solution",
    "blowup_solution",
    "gaussian_data",
    "gaussian_with_mass",
    "GAUSSIAN_CORPUS",
    "StudyConfig",
    "DeepWaterReport",
    "deep_water_study",
    "ScalingReport",
    "scaling_check",
    "time_cutoff",
    "strichartz_lhs",
    "strichartz_ratio",
    "StrichartzStats",
    "StrichartzStudy",
    "strichartz_study",
    "LongtimeReport",
    "small_data_longtime",
    "fit_loglog_slope",
]

log = logging.getLogger(__name__)


def static_soliton(grid: Grid):
    """Samples of ``R(x) = sqrt(2)/(x + i)``."""
    return np.sqrt(2.0) / (grid.x + 1j)


def periodic_static_soliton(grid: Grid):
    """Exact static state of focusing CCM (``beta = -1``) on the periodic box.

    With ``q = exp(i k x)``, ``k = pi/L`` and ``p = exp(-k)`` (pole at ``x = -i``
    as for ``R``)::

        u = -i sqrt(k) (1/(2 mu) + (p/mu) q/(1 - p q)),  mu^2 = (1 + p^2)/(2(1 - p^2)).

    It lies in the Hardy space and converges to ``R`` as ``L -> inf``.
    """
    kappa = math.pi / grid.half_width
    p = math.exp(-kappa)
    mu = math.sqrt((1 + p * p) / (2 * (1 - p * p)))
    q = np.exp(1j * kappa * grid.x)
    return -1j * math.sqrt(kappa) * (0.5 / mu + (p / mu) * q / (1 - p * q))


def singular_solution(grid: Grid, t: float):
    """Pseudo-conformal image of ``R``: ``t^{-1/2} exp(i x^2/4t) R(x/t)``.

    ``t`` is the time remaining until blow-up: the field solves focusing CCM
    with time running towards ``t = 0`` (see :func:`blowup_solution`).
    """
    if not t > 0:
        raise ConfigurationError(f"singular_solution needs t > 0, got {t}")
    x = grid.x
    return t**-0.5 * np.exp(1j * x**2 / (4 * t)) * np.sqrt(2.0) / (x / t + 1j)


def blowup_solution(grid: Grid, s: float, s_star: float = 1.0):
    """Forward-time solution that blows up at ``s = s_star``."""
    return singular_solution(grid, s_star - s)


def gaussian_data(grid: Grid, amplitude=1.0, width=1.0, velocity=0.0):
    if not width > 0:
        raise ConfigurationError(f"gaussian width must be positive, got {width}")
    x = grid.x
    return amplitude * np.exp(-(x / width) ** 2) * np.exp(1j * velocity * x)


def gaussian_with_mass(grid: Grid, mass: float, width=1.0, velocity=0.0):
    """Gaussian whose line mass ``a^2 w sqrt(pi/2)`` equals ``mass``."""
    amplitude = math.sqrt(mass / (width * math.sqrt(math.pi / 2)))
    return gaussian_data(grid, amplitude, width, velocity)


# (amplitude, width, velocity) of the decaying data used across the suite.
GAUSSIAN_CORPUS = (
    (1.0, 1.0, 0.0),
    (0.7, 2.0, 1.0),
    (0.5, 1.5, -2.0),
)


def fit_loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


@dataclass(frozen=True)
class StudyConfig:
    """Everything needed to rerun a study bit-for-bit."""

    scenario: str
    n: int = 4096
    half_width: float = 160.0
    beta: float = 1.0
    gamma: float = 0.0
    h: float = math.inf
    h_list: tuple = (4.0, 8.0, 16.0, 32.0)
    t_end: float = 0.5
    dt: float = 1e-3
    record_every: int = 10
    amplitude: float = 0.3
    width: float = 1.0
    seed: int = 0
    tolerances: dict = field(default_factory=dict, hash=False, compare=False)

    @property
    def grid(self) -> Grid:
        return Grid(self.n, self.half_width)

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.h, self.beta, self.gamma)

    @property
    def stepper(self) -> StepperConfig:
        return StepperConfig(self.dt, self.t_end, self.record_every)


# --- deep-water limit ----------------------------------------------------

@dataclass
class DeepWaterReport:
    h_list: np.ndarray
    errors: np.ndarray
    slope: float | None
    monotone: bool
    failed: str | None = None
    band: tuple = (0.8, 1.2)

    @property
    def passed(self) -> bool:
        if self.failed:
            return False
        if self.slope is None:
            return True
        return self.monotone and self.band[0] <= self.slope <= self.band[1]


def deep_water_study(cfg: StudyConfig, u0=None) -> DeepWaterReport:
    """``e(h) = sup_t ||u_h(t) - u_inf(t)||_{H^{1/4}}`` and its decay exponent in ``h``."""
    hs = np.asarray(cfg.h_list, dtype=float)
    if len(hs) < 3:
        raise ConfigurationError("h_list needs at least three depths")
    if cfg.gamma != 0:
        raise ConfigurationError("the deep-water study runs with gamma = 0")
    grid = cfg.grid
    if u0 is None:
        u0 = gaussian_data(grid, cfg.amplitude, cfg.width)
    step = cfg.stepper

    def run(h):
        tr = integrate(u0, grid, ModelParams(h, cfg.beta, 0.0), step)
        if not tr.completed:
            raise StateError(f"run at h={h} aborted", tr.abort_time)
        return tr.snapshots

    try:
        ref = run(math.inf)
        errors = np.array([
            max(sobolev_norm(a - b, grid, 0.25) for a, b in zip(run(h), ref)) for h in hs
        ])
    except StateError as exc:
        return DeepWaterReport(hs, np.full(len(hs), np.nan), None, False, failed=str(exc))
    scale = max(sobolev_norm(u0, grid, 0.25), 1e-300)
    if np.all(errors <= 1e-13 * scale):
        return DeepWaterReport(hs, errors, None, True)
    slope = -fit_loglog_slope(hs, errors)
    return DeepWaterReport(hs, errors, slope, bool(np.all(np.diff(errors) < 0)))


# --- scaling covariance --------------------------------------------------

@dataclass
class ScalingReport:
    lam: float
    residual: float
    reference: float
    params: ModelParams

    @property
    def passed(self) -> bool:
        return self.residual <= 1e-5 + self.reference


def _trajectory_residual(traj: Trajectory, params, dt, grid, snaps) -> float:
    worst = 0.0
    for i in range(1, len(snaps) - 1):
        r = pde_residual(snaps[i - 1], snaps[i], snaps[i + 1], dt, grid, params)
        worst = max(worst, r)
    return worst


def scaling_check(traj: Trajectory, lam: float, scale_gamma: bool = True) -> ScalingReport:
    """PDE defect of ``lam^{-1/2} u(lam^{-2} t, x/lam)`` for depth ``h lam``.

    The rescaled samples are the spectral interpolant of each snapshot on a
    grid with ``lam`` times as many points over ``[-lam L, lam L)``, so the
    spacing is unchanged. ``reference`` is the defect of the original
    trajectory, i.e. the time-differencing part of the budget.
    """
    if lam not in (1, 2, 4):
        raise ConfigurationError(f"lambda must be 1, 2 or 4, got {lam}")
    traj = traj.uniform()
    if len(traj.times) < 3:
        raise ConfigurationError("scaling_check needs at least three snapshots")
    grid, p = traj.grid, traj.params
    dt = traj.record_dt
    reference = _trajectory_residual(traj, p, dt, grid, traj.snapshots)
    lam = int(lam)
    big = Grid(grid.n * lam, grid.half_width * lam)
    snaps = lam**-0.5 * ifft(pad_spectrum(fft(traj.snapshots), big.n))
    gamma = p.gamma / lam if scale_gamma else p.gamma
    params = ModelParams(p.h * lam, p.beta, gamma)
    residual = _trajectory_residual(traj, params, lam**2 * dt, big, snaps)
    return ScalingReport(float(lam), residual, reference, params)


# --- bilinear Strichartz -------------------------------------------------

STRICHARTZ_TIMES = 129


def time_cutoff(t):
    """Smooth cutoff supported in ``[-1, 1]``, equal to 1 on ``[-1/2, 1/2]``."""
    return bump(2.0 * np.asarray(t, dtype=float))


def _time_grid():
    t = np.linspace(-1.0, 1.0, STRICHARTZ_TIMES)
    w = np.full(t.size, t[1] - t[0])
    w[[0, -1]] *= 0.5
    return t, w


def strichartz_lhs(f, g, grid: Grid, N: int) -> float:
    """``||P_N[eta S f * eta conj(S g)]||_{L^2_{t,x}}`` by trapezoid in time, Parseval in space."""
    t, w = _time_grid()
    eta2 = time_cutoff(t) ** 2
    phase = np.exp(1j * np.outer(t, grid.xi**2))
    sf = ifft(phase * fft(f))
    sg = ifft(phase * fft(g))
    prod = eta2[:, None] * sf * np.conj(sg)
    psi = projector_values(grid, "dyadic", N)
    per_time = grid.length * np.sum(np.abs(psi * fft(prod)) ** 2, axis=-1)
    return float(np.sqrt(np.sum(w * per_time)))


STRICHARTZ_GRID = Grid(16384, 160.0)


def _unit(u, grid):
    return u / lebesgue_norm(u, grid, 2)


def _packet(grid, rng, center_freq):
    x0 = rng.uniform(-2.0, 2.0)
    width = rng.uniform(0.5, 2.0)
    phase = rng.uniform(0, 2 * np.pi)
    u = np.exp(-((grid.x - x0) / width) ** 2 + 1j * (center_freq * grid.x + phase))
    return _unit(u, grid)


@dataclass
class StrichartzStats:
    N: int
    ratios: np.ndarray

    @property
    def max(self) -> float:
        return float(self.ratios.max())

    @property
    def mean(self) -> float:
        return float(self.ratios.mean())


def strichartz_ratio(N: int, trials: int, seed: int, grid: Grid = STRICHARTZ_GRID) -> StrichartzStats:
    """Distribution of ``N^{1/2} LHS`` over random unit wave-packet pairs.

    Each pair has carriers ``c +- D/2`` with ``|D|`` in ``[3N/4, 3N/2]``, so
    the product sits in the band of ``P_N``; packets start near the origin
    and the box is wide enough that nothing wraps around for ``|t| <= 1``.
    """
    N = int(N)
    if N < 8 or N & (N - 1) or N > grid.n // 8:
        raise ConfigurationError(f"N must be dyadic in [8, n/8], got {N}")
    if trials < 1:
        raise ConfigurationError("trials must be positive")
    rng = np.random.default_rng([seed, N])
    out = np.empty(trials)
    for i in range(trials):
        D = rng.choice([-1.0, 1.0]) * N * rng.uniform(0.75, 1.5)
        c = N * rng.uniform(-0.25, 0.25)
        f = _packet(grid, rng, c + D / 2)
        g = _packet(grid, rng, c - D / 2)
        out[i] = math.sqrt(N) * strichartz_lhs(f, g, grid, N)
    return StrichartzStats(N, out)


@dataclass
class StrichartzStudy:
    stats: list
    slope: float
    band: tuple = (-0.2, 0.2)

    @property
    def passed(self) -> bool:
        return self.band[0] <= self.slope <= self.band[1]


def strichartz_study(N_list=(8, 16, 32, 64), trials: int = 64, seed: int = 0,
                     grid: Grid = STRICHARTZ_GRID) -> StrichartzStudy:
    stats = [strichartz_ratio(N, trials, seed, grid) for N in N_list]
    slope = fit_loglog_slope([s.N for s in stats], [s.max for s in stats])
    return StrichartzStudy(stats, slope)


# --- long-time small data ------------------------------------------------

@dataclass
class LongtimeReport:
    initial_norm: float
    sup_norm: float
    factor: float
    status: str
    times: np.ndarray
    norms: np.ndarray

    @property
    def passed(self) -> bool:
        return self.status == "completed" and self.sup_norm <= self.factor * self.initial_norm


def small_data_longtime(u0, grid: Grid, params: ModelParams, t_end: float = 20.0,
                        dt: float = 1e-3, record_every: int = 100,
                        factor: float = 5.0, max_mass: float = 0.1) -> LongtimeReport:
    """Run small data to ``t_end`` and compare ``sup_t ||u||_{H^{1/4}}`` with ``factor ||u0||``."""
    if params.gamma != 0:
        raise ConfigurationError("the long-time study runs with gamma = 0")
    m0 = lebesgue_norm(u0, grid, 2) ** 2
    if m0 > max_mass:
        raise ConfigurationError(f"initial mass {m0:.3g} exceeds the small-data bound {max_mass}")
    tr = integrate(u0, grid, params, StepperConfig(dt, t_end, record_every))
    norms = np.array([sobolev_norm(u, grid, 0.25) for u in tr.snapshots])
    return LongtimeReport(float(norms[0]), float(norms.max()), factor, tr.status,
                          np.asarray(tr.times), norms)
