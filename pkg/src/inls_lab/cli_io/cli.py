"""Command-line entry point: ``inls-lab <command> [--config PATH] [--out DIR] [--seed N]``.

Exit status: 0 when every contract of the command holds, 1 when one fails
(including aborted runs), 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from contextlib import nullcontext
from pathlib import Path

import numpy as np
import scipy.fft

from ..checks import operator_suite
from ..errors import ConfigurationError, InlsLabError, SnapshotError
from ..experiments import (
    StudyConfig,
    deep_water_study,
    gaussian_data,
    periodic_static_soliton,
    singular_solution,
    small_data_longtime,
    static_soliton,
    strichartz_study,
)
from ..gauge import gauged_equation_residual, recovery_residual
from ..integrator import StepperConfig, integrate, order_check
from ..invariants import (
    energy_k,
    fractional_energy,
    isospectral_drift,
    kappa_threshold,
    lax_pair_residual,
    mass,
    momentum,
)
from ..model import hardy_leak
from ..spectral_core import sobolev_norm
from .config import RunConfig, load_config
from .snapshot import read_snapshot, write_snapshot
from .tables import DIAGNOSTIC_COLUMNS, write_csv, write_summary

__all__ = ["main", "run", "COMMANDS", "initial_field"]

log = logging.getLogger("inls_lab")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def initial_field(cfg: RunConfig):
    grid = cfg.make_grid()
    p = cfg.init.typed
    kind = cfg.init.kind
    if kind == "gaussian":
        return gaussian_data(grid, p.amplitude, p.width, p.velocity)
    if kind == "static_soliton":
        return periodic_static_soliton(grid) if p.form == "periodic" else static_soliton(grid)
    if kind == "singular":
        return singular_solution(grid, p.t)
    try:
        snap = read_snapshot(p.path)
    except SnapshotError as exc:
        raise ConfigurationError(f"init.parameters.path: {exc}") from None
    if snap.grid != grid:
        raise ConfigurationError(
            f"init.parameters.path: snapshot grid (n={snap.grid.n}, L={snap.grid.half_width}) "
            f"does not match grid (n={grid.n}, L={grid.half_width})")
    return snap.values


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _trajectory(cfg):
    grid = cfg.make_grid()
    return integrate(initial_field(cfg), grid, cfg.params(), cfg.stepper())


def _status(traj):
    return {"status": traj.status, "abort_time": traj.abort_time, "records": len(traj.times)}


def _drift(values):
    values = np.asarray(values, dtype=float)
    return float(np.ptp(values) / max(abs(values[0]), 1e-300))


def cmd_simulate(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    traj = _trajectory(cfg)
    for i, (t, u) in enumerate(zip(traj.times, traj.snapshots)):
        write_snapshot(u, traj.grid, t, out / f"snap_{i:05d}.bin")
    write_summary(out / "summary.json", {"command": "simulate", **_status(traj),
                                         "passed": traj.completed})
    return EXIT_OK if traj.completed else EXIT_FAIL


def diagnostics_rows(traj):
    grid, p = traj.grid, traj.params
    rows = []
    for t, u in zip(traj.times, traj.snapshots):
        energies = [energy_k(u, grid, p, k) for k in (2, 3, 4)]
        rows.append((t, mass(u, grid), momentum(u, grid, p.beta), *energies,
                     sobolev_norm(u, grid, 0.25), hardy_leak(u, grid)))
    return rows


def cmd_invariants(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    traj = _trajectory(cfg)
    rows = diagnostics_rows(traj)
    write_csv(out / "diagnostics.csv", DIAGNOSTIC_COLUMNS, rows)
    cols = np.array(rows, dtype=float).T
    drifts = {"mass": _drift(cols[1]), "momentum": _drift(cols[2])}
    tol = {"mass": 1e-9, "momentum": 1e-9}
    if traj.params.gamma == 0:
        for k, c in zip(("E2", "E3", "E4"), cols[3:6]):
            drifts[k] = _drift(c)
            tol[k] = 1e-6
    passed = traj.completed and all(drifts[k] <= tol[k] for k in drifts)
    write_summary(out / "summary.json", {"command": "invariants", **_status(traj),
                                         "drift": drifts, "tolerance": tol, "passed": passed})
    return EXIT_OK if passed else EXIT_FAIL


def cmd_lax(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    traj = _trajectory(cfg)
    if not traj.completed:
        write_summary(out / "summary.json", {"command": "lax", **_status(traj), "passed": False})
        return EXIT_FAIL
    grid, p = traj.grid, traj.params
    m = min(256, grid.n // 4)
    rep = isospectral_drift(traj, m, 8)
    kappa = kappa_threshold(traj.snapshots[0], grid)
    frac = [fractional_energy(u, grid, p, 0.25, kappa, m) for u in traj.snapshots]
    columns = ["time"] + [f"lambda_{i}" for i in range(rep.eigenvalues.shape[1])] + ["fractional_energy"]
    rows = [(t, *ev, f) for t, ev, f in zip(traj.times, rep.eigenvalues, frac)]
    write_csv(out / "lax.csv", columns, rows)
    summary = {"command": "lax", **_status(traj), "m": m, "kappa": kappa,
               "max_eigen_drift": rep.max_drift, "mismatches": rep.mismatches,
               "fractional_drift": _drift(frac)}
    passed = rep.max_drift <= 1e-3 and summary["fractional_drift"] <= 1e-3
    if p.gamma == 0 and len(traj.uniform().times) >= 3:
        summary["lax_pair_residual"] = lax_pair_residual(traj, m)
    summary["passed"] = passed
    write_summary(out / "summary.json", summary)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_gauge_check(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    grid, params = cfg.make_grid(), cfg.params()
    u0 = initial_field(cfg)
    stride = cfg.time.record_every
    coarse = integrate(u0, grid, params, StepperConfig(cfg.time.dt, cfg.time.t_end, 2 * stride))
    fine = integrate(u0, grid, params, cfg.stepper())
    if not (coarse.completed and fine.completed):
        write_summary(out / "summary.json", {"command": "gauge-check", **_status(fine), "passed": False})
        return EXIT_FAIL
    res = {form: (gauged_equation_residual(coarse, form=form), gauged_equation_residual(fine, form=form))
           for form in ("reduced", "complete")}
    rows = [(t, rv, rw, cv, cw) for t, rv, rw, cv, cw in zip(
        res["reduced"][1].times, res["reduced"][1].residual_v, res["reduced"][1].residual_w,
        res["complete"][1].residual_v, res["complete"][1].residual_w)]
    write_csv(out / "gauge.csv", ["time", "residual_v", "residual_w",
                                  "residual_v_complete", "residual_w_complete"], rows)
    recovery = recovery_residual(u0, grid, params.beta)
    ratios = {form: [c.max_v / f.max_v, c.max_w / f.max_w] for form, (c, f) in res.items()}
    second_order = all(3.5 <= r <= 4.5 for r in ratios["reduced"])
    passed = recovery <= 1e-8 and second_order
    write_summary(out / "summary.json", {"command": "gauge-check", "recovery_residual": recovery,
                                         "halving_ratios": ratios, "passed": passed})
    return EXIT_OK if passed else EXIT_FAIL


def cmd_operator_check(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    results = operator_suite(seed=cfg.seed)
    write_csv(out / "operator_check.csv", ["check", "value", "tolerance", "passed"],
              [(r.name, r.value, r.tolerance, r.passed) for r in results])
    passed = all(r.passed for r in results)
    write_summary(out / "summary.json", {"command": "operator-check", "checks": len(results),
                                         "failed": [r.name for r in results if not r.passed],
                                         "passed": passed})
    return EXIT_OK if passed else EXIT_FAIL


def _study(cfg: RunConfig, scenario: str) -> StudyConfig:
    amp, width = 0.3, 1.0
    if cfg.init.kind == "gaussian":
        p = cfg.init.typed
        amp, width = p.amplitude, p.width
    return StudyConfig(scenario, cfg.grid.n, cfg.grid.half_width, cfg.model.beta, cfg.model.gamma,
                       t_end=cfg.time.t_end, dt=cfg.time.dt, record_every=cfg.time.record_every,
                       amplitude=amp, width=width, seed=cfg.seed)


def cmd_limit_study(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    rep = deep_water_study(_study(cfg, "deep-water"))
    write_csv(out / "limit_study.csv", ["h", "error"], list(zip(rep.h_list, rep.errors)))
    write_summary(out / "summary.json", {"command": "limit-study", "slope": rep.slope,
                                         "band": rep.band, "monotone": rep.monotone,
                                         "failed": rep.failed, "passed": rep.passed})
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_strichartz(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    study = strichartz_study(trials=64, seed=cfg.seed)
    rows = [(s.N, i, r) for s in study.stats for i, r in enumerate(s.ratios)]
    write_csv(out / "strichartz.csv", ["N", "trial", "ratio"], rows)
    write_summary(out / "summary.json", {"command": "strichartz", "seed": cfg.seed,
                                         "max_ratio": {s.N: s.max for s in study.stats},
                                         "slope": study.slope, "band": study.band,
                                         "passed": study.passed})
    return EXIT_OK if study.passed else EXIT_FAIL


def cmd_longtime(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    grid, params = cfg.make_grid(), cfg.params()
    rep = small_data_longtime(initial_field(cfg), grid, params, cfg.time.t_end, cfg.time.dt,
                              cfg.time.record_every)
    write_csv(out / "longtime.csv", ["time", "sobolev_quarter"], list(zip(rep.times, rep.norms)))
    write_summary(out / "summary.json", {"command": "longtime", "status": rep.status,
                                         "initial_norm": rep.initial_norm, "sup_norm": rep.sup_norm,
                                         "factor": rep.factor, "passed": rep.passed})
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_order_check(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    dt = cfg.time.dt
    rep = order_check(initial_field(cfg), cfg.make_grid(), cfg.params(), cfg.time.t_end,
                      [4 * dt, 2 * dt, dt])
    write_csv(out / "order_check.csv", ["dt", "error"], list(zip(rep.dts, rep.errors)))
    write_summary(out / "summary.json", {"command": "order-check", "slope": rep.slope,
                                         "monotone": rep.monotone, "skipped": rep.skipped,
                                         "message": rep.message, "passed": rep.passed})
    return EXIT_OK if rep.passed else EXIT_FAIL


COMMANDS = {
    "simulate": cmd_simulate,
    "invariants": cmd_invariants,
    "lax": cmd_lax,
    "gauge-check": cmd_gauge_check,
    "operator-check": cmd_operator_check,
    "limit-study": cmd_limit_study,
    "strichartz": cmd_strichartz,
    "longtime": cmd_longtime,
    "order-check": cmd_order_check,
}


def _threads():
    raw = os.environ.get("INLS_LAB_THREADS")
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ConfigurationError(f"INLS_LAB_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigurationError(f"INLS_LAB_THREADS must be a positive integer, got {raw!r}")
    return n


def run(command: str, cfg: RunConfig) -> int:
    if command not in COMMANDS:
        raise ConfigurationError(f"unknown command {command!r}")
    threads = _threads()
    ctx = scipy.fft.set_workers(threads) if threads else nullcontext()
    with ctx:
        return COMMANDS[command](cfg)


def _parser():
    ap = argparse.ArgumentParser(prog="inls-lab", description="Pseudospectral INLS/CCM laboratory.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON run configuration (defaults apply when omitted)")
    ap.add_argument("--out", help="output directory (overrides output.directory)")
    ap.add_argument("--seed", type=int, help="RNG seed (overrides seed)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigurationError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
        cfg = cfg.with_overrides(args.out, args.seed)
        return run(args.command, cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InlsLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
