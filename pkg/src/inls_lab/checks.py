"""Invariant suite for the operator family, shared by the CLI and the tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import (
    cotlar_residual,
    hilbert,
    j_h,
    k_h,
    pi_plus,
    symbol_values,
    tilbert,
    tilbert_dx,
)
from .spectral_core import Grid, derivative, fft, inner

__all__ = [
    "CheckResult",
    "g_h_supremum",
    "poisson_pair",
    "smooth_corpus",
    "operator_suite",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float
    relation: str = "<="

    @property
    def passed(self) -> bool:
        if self.relation == "<=":
            return self.value <= self.tolerance
        return self.value >= self.tolerance


def g_h_supremum(h: float, samples: int = 40000) -> float:
    """``sup |xi| (coth(h|xi|) - 1)`` over a dense log/linear sweep of ``xi > 0``."""
    xi = np.concatenate([np.logspace(-9, 0, samples // 2), np.linspace(1, 60 / h + 1, samples // 2)])
    with np.errstate(over="ignore"):
        return float(np.max(2 * xi / np.expm1(2 * h * xi)))


def poisson_pair(grid: Grid):
    """Periodized Poisson kernel of unit width and its periodic Hilbert transform."""
    a = math.pi / grid.half_width
    den = np.cosh(a) - np.cos(a * grid.x)
    return 0.5 * a * np.sinh(a) / den, 0.5 * a * np.sin(a * grid.x) / den


def smooth_corpus(grid: Grid):
    """Smooth real fields that decay well inside the box."""
    x = grid.x
    return {
        "gauss": np.exp(-x**2),
        "odd_gauss": x * np.exp(-x**2 / 2),
        "wide_gauss": np.exp(-(x / 3) ** 2),
        "shifted": np.exp(-(x - 2) ** 2) * np.cos(3 * x),
    }


def _rel(a, b):
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))


def operator_suite(grid: Grid | None = None, seed: int = 0) -> list[CheckResult]:
    grid = grid or Grid(4096, 40.0)
    rng = np.random.default_rng(seed)
    x = grid.x
    out = []

    for h in (1.0, 2.0, 10.0):
        out.append(CheckResult(f"g_h_norm_h{h:g}", abs(g_h_supremum(h) - 1 / h), 1e-6))
        lat = np.abs(symbol_values("g_h", grid, h)).max()
        out.append(CheckResult(f"g_h_lattice_bound_h{h:g}", lat * h - 1, 1e-12))
        out.append(CheckResult(f"k_h_lattice_bound_h{h:g}", np.abs(symbol_values("k_h", grid, h)).max() - 1, 0.0))

    corpus = smooth_corpus(grid)
    names = list(corpus)
    for h in (1.0, 2.0):
        for i, a in enumerate(names):
            for b in names[i:]:
                r = cotlar_residual(corpus[a], corpus[b], grid, h)
                out.append(CheckResult(f"cotlar_{a}_{b}_h{h:g}", r, 1e-8))

    P, Q = poisson_pair(grid)
    out.append(CheckResult("hilbert_poisson", float(np.abs(hilbert(P, grid) - Q).max()), 1e-6))

    real = np.exp(-(x / 4) ** 2) * rng.standard_normal(grid.n)
    real = np.real(np.fft.ifft(np.fft.fft(real) * (np.abs(grid.xi) < 10)))
    for name, op in (("tilbert", lambda f: tilbert(f, grid, 1.0)),
                     ("hilbert", lambda f: hilbert(f, grid)),
                     ("j_h", lambda f: j_h(f, grid, 1.0)),
                     ("k_h", lambda f: k_h(f, grid, 1.0))):
        out.append(CheckResult(f"real_to_real_{name}", float(np.abs(op(real).imag).max()), 1e-12))

    phi = np.exp(-x**2)
    for h in (1.0, 3.0):
        lhs = tilbert_dx(phi, grid, h)
        rhs = tilbert(derivative(phi, grid), grid, h) + fft(phi)[0] / h
        out.append(CheckResult(f"tilbert_dx_consistency_h{h:g}", float(np.abs(lhs - rhs).max()), 1e-12))
        g2 = derivative(phi, grid, 2)
        out.append(CheckResult(f"k_plus_j_h{h:g}", _rel(k_h(g2, grid, h) + j_h(g2, grid, h), tilbert(g2, grid, h)), 1e-8))
        out.append(CheckResult(f"j_h_of_derivative_h{h:g}", float(np.abs(j_h(derivative(phi, grid), grid, h) - phi / h).max()), 1e-10))

    u = np.exp(-(x / 3) ** 2) * (rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n))
    f = np.exp(-(x / 2) ** 2) * (rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n))
    for h in (1.0, math.inf):
        q = inner(f, u * pi_plus(np.conj(u) * f, grid, h), grid)
        scale = inner(f, f, grid).real * np.max(np.abs(u)) ** 2
        out.append(CheckResult(f"pi_plus_form_real_h{h:g}", abs(q.imag) / scale, 1e-10))
    return out
