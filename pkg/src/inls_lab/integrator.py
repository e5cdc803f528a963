"""Integrating-factor RK4 time stepping and trajectory recording."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, StateError
from .model import DEFAULT_MAX_AMP, ModelParams, check_state, linear_symbol, nonlinear_hat
from .spectral_core import Grid, fft, ifft

__all__ = ["StepperConfig", "Trajectory", "IFRK4", "step", "integrate", "order_check", "OrderReport"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    t_end: float
    record_every: int = 1
    max_amp: float = DEFAULT_MAX_AMP

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigurationError(f"time.dt must be positive, got {self.dt}")
        if not (self.t_end >= 0 and math.isfinite(self.t_end)):
            raise ConfigurationError(f"time.t_end must be non-negative, got {self.t_end}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ConfigurationError(f"time.record_every must be an integer >= 1, got {self.record_every}")
        if not self.max_amp > 0:
            raise ConfigurationError(f"max_amp must be positive, got {self.max_amp}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass
class Trajectory:
    grid: Grid
    params: ModelParams
    times: np.ndarray
    snapshots: np.ndarray  # shape (len(times), n)
    status: str = "completed"
    abort_time: float | None = None
    dt: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def completed(self) -> bool:
        return self.status == "completed"

    @property
    def record_dt(self) -> float:
        """Spacing of the recorded times (uniform except possibly the last gap)."""
        if len(self.times) < 2:
            raise ConfigurationError("trajectory has fewer than two snapshots")
        return float(self.times[1] - self.times[0])

    def uniform(self) -> "Trajectory":
        """Drop a trailing snapshot whose spacing differs from the stride."""
        if len(self.times) < 3:
            return self
        gaps = np.diff(self.times)
        if abs(gaps[-1] - gaps[0]) > 1e-9 * gaps[0]:
            return Trajectory(self.grid, self.params, self.times[:-1], self.snapshots[:-1],
                              self.status, self.abort_time, self.dt, dict(self.meta))
        return self


class IFRK4:
    """Classical RK4 on ``w = exp(-i xi^2 t) u_hat``.

    The stiff dispersion is integrated exactly; only the nonlinearity is
    approximated.
    """

    def __init__(self, grid: Grid, params: ModelParams, dt: float, max_amp=DEFAULT_MAX_AMP):
        self.grid = grid
        self.params = params
        self.dt = float(dt)
        self.max_amp = max_amp
        lin = linear_symbol(grid)
        self.e_half = np.exp(0.5 * self.dt * lin)
        self.e_full = np.exp(self.dt * lin)
        self.linear_only = params.beta == 0.0 and params.gamma == 0.0

    def _n(self, v_hat, t=None):
        if not np.all(np.isfinite(v_hat)):
            raise StateError("state contains NaN or Inf", t)
        return nonlinear_hat(v_hat, self.grid, self.params)

    def step_hat(self, u_hat, t=None):
        if self.linear_only or self.dt == 0.0:
            return self.e_full * u_hat
        dt, eh, ef = self.dt, self.e_half, self.e_full
        k1 = self._n(u_hat, t)
        k2 = self._n(eh * (u_hat + 0.5 * dt * k1), t)
        k3 = self._n(eh * u_hat + 0.5 * dt * k2, t)
        k4 = self._n(ef * u_hat + dt * eh * k3, t)
        return ef * u_hat + dt / 6.0 * (ef * k1 + 2.0 * eh * (k2 + k3) + k4)

    def step(self, u, t=None):
        out = ifft(self.step_hat(fft(u), t))
        check_state(out, self.max_amp, t)
        return out


def step(u, grid: Grid, params: ModelParams, dt: float, max_amp=DEFAULT_MAX_AMP):
    """Advance ``u`` by one integrating-factor RK4 step."""
    if dt == 0:
        return np.array(u, dtype=complex, copy=True)
    return IFRK4(grid, params, dt, max_amp).step(u)


def integrate(u0, grid: Grid, params: ModelParams, cfg: StepperConfig) -> Trajectory:
    """Run ``cfg.n_steps`` steps, recording every ``record_every`` and the final state.

    A blow-up aborts the run and returns the partial trajectory.
    """
    u0 = np.asarray(u0, dtype=complex)
    check_state(u0, cfg.max_amp, 0.0)
    stepper = IFRK4(grid, params, cfg.dt, cfg.max_amp)
    nsteps = cfg.n_steps
    times = [0.0]
    snaps = [u0.copy()]
    u_hat = fft(u0)
    status, abort_time = "completed", None
    # Overflow on the way to blow-up is caught by check_state, not by numpy.
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, nsteps + 1):
            t = i * cfg.dt
            record = i % cfg.record_every == 0 or i == nsteps
            try:
                if stepper.linear_only:
                    # Exact flow from t = 0; repeated multiplication would compound rounding.
                    if not record:
                        continue
                    u_hat = np.exp(t * linear_symbol(grid)) * fft(u0)
                else:
                    u_hat = stepper.step_hat(u_hat, t)
                if record:
                    u = ifft(u_hat)
                    check_state(u, cfg.max_amp, t)
                    times.append(t)
                    snaps.append(u)
            except StateError as exc:
                status, abort_time = "aborted", t
                log.warning("run aborted at t=%.6g: %s", t, exc)
                break
    return Trajectory(grid, params, np.array(times), np.array(snaps), status, abort_time, cfg.dt)


@dataclass
class OrderReport:
    dts: np.ndarray
    errors: np.ndarray
    slope: float | None
    monotone: bool
    skipped: bool = False
    message: str = ""

    @property
    def passed(self) -> bool:
        if self.skipped:
            return True
        return self.monotone and self.slope is not None and 3.7 <= self.slope <= 4.3


def order_check(u0, grid: Grid, params: ModelParams, T: float, dt_list) -> OrderReport:
    """Self-convergence slope of the final-state error against a ``dt_min/4`` reference."""
    dts = np.sort(np.asarray(dt_list, dtype=float))[::-1]
    if len(dts) < 3:
        raise ConfigurationError("order_check needs at least three step sizes")
    if not np.allclose(dts[:-1] / dts[1:], 2.0, rtol=1e-9):
        raise ConfigurationError("order_check step sizes must halve successively")

    def final(dt):
        n = int(round(T / dt))
        if not math.isclose(n * dt, T, rel_tol=1e-9):
            raise ConfigurationError(f"T={T} is not a multiple of dt={dt}")
        s = IFRK4(grid, params, dt)
        u_hat = fft(u0)
        for _ in range(n):
            u_hat = s.step_hat(u_hat)
        return ifft(u_hat)

    ref = final(dts[-1] / 4)
    norm = np.linalg.norm(ref)
    errs = np.array([np.linalg.norm(final(dt) - ref) / norm for dt in dts])
    if np.all(errs < 1e-13):
        return OrderReport(dts, errs, None, True, skipped=True,
                           message="errors at round-off; slope test skipped")
    monotone = bool(np.all(np.diff(errs) < 0))
    slope = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])
    msg = "" if monotone else "errors are not monotone in dt"
    return OrderReport(dts, errs, slope, monotone, message=msg)
