"""Hyperinterpolation and filtered hyperinterpolation on S^2.

Both are discrete projections onto spherical polynomials computed with a
positive quadrature rule. The filtered variant damps degrees above L with
a smooth cutoff h(l / L) that vanishes from l >= a L on.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .geometry import PointSet, QuadratureRule
from .harmonics import SpectralFunction, analyze, n_coeffs, real_harmonics


def filter_h(x, a: float = 1.2):
    """Smooth low-pass filter: 1 on [0, 1], 0 on [a, inf).

    On (1, a), with y = (x - 1) / (a - 1), h = exp(2 exp(-2 / y) / (y - 1)).
    Scalar input gives a float, arrays give arrays.
    """
    if a <= 1:
        raise ValueError(f"filter endpoint a must exceed 1, got {a}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise ValueError("filter argument must be >= 0")
    out = np.where(xa <= 1.0, 1.0, 0.0)
    y = (xa - 1.0) / (a - 1.0)
    mid = (xa > 1.0) & (xa < a)
    ym = y[mid]
    vals = np.ones_like(ym)
    # exp(-2/y) underflows as y -> 0+, where the limit is 1
    ok = ym >= 1e-12
    u = np.exp(-2.0 / ym[ok])
    vals[ok] = np.exp(2.0 * u / (ym[ok] - 1.0))
    out[mid] = vals
    return float(out) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class FilterSpec:
    a: float = 1.2

    def __post_init__(self):
        if self.a <= 1:
            raise ValueError(f"filter endpoint a must exceed 1, got {self.a}")

    def __call__(self, x):
        return filter_h(x, self.a)

    def max_degree(self, L: int) -> int:
        """Highest degree kept: max(ceil(a L) - 1, L)."""
        return max(math.ceil(self.a * L) - 1, L)


@dataclass(frozen=True)
class Hyperinterpolant:
    L: int
    coeffs: SpectralFunction
    filtered: FilterSpec | None = None

    def __call__(self, x) -> np.ndarray:
        return self.coeffs(x)

    @property
    def degree(self) -> int:
        return self.coeffs.lmax

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["ell", "k", "coeff"])
            for ell in range(self.coeffs.lmax + 1):
                for k in range(1, 2 * ell + 2):
                    w.writerow([ell, k, repr(self.coeffs.coeff(ell, k))])


def _check_inputs(L: int, need: int, rule: QuadratureRule, values) -> np.ndarray:
    if L < 0:
        raise ValueError(f"degree must be >= 0, got {L}")
    if rule.exact_degree < need:
        raise ValueError(f"rule exact to degree {rule.exact_degree}, need >= {need}")
    values = np.asarray(values, dtype=float)
    if values.shape != (len(rule),):
        raise ValueError(f"need {len(rule)} values, got shape {values.shape}")
    return values


def hyperinterpolate(L: int, rule: QuadratureRule, values) -> Hyperinterpolant:
    """Discrete orthogonal projection onto degree <= L; the rule must be exact to 2L."""
    values = _check_inputs(L, 2 * L, rule, values)
    c = analyze(L, rule.nodes, rule.weights * values)
    return Hyperinterpolant(L, SpectralFunction(c, L))


def filtered_hyperinterpolate(L: int, rule: QuadratureRule, values, a: float = 1.2) -> Hyperinterpolant:
    """Filtered hyperinterpolant with coefficients h(l / L) f_hat_{lk} up to max(ceil(aL)-1, L)."""
    spec = FilterSpec(a)
    lbar = spec.max_degree(L)
    values = _check_inputs(L, 2 * lbar, rule, values)
    c = analyze(lbar, rule.nodes, rule.weights * values)
    ells = np.repeat(np.arange(lbar + 1), 2 * np.arange(lbar + 1) + 1)
    mult = spec(ells / L) if L > 0 else np.where(ells == 0, 1.0, 0.0)
    return Hyperinterpolant(L, SpectralFunction(c * mult, lbar), spec)


def design_rule(points: PointSet, degree: int, tol: float = 1e-10) -> QuadratureRule:
    """Equal-weight rule from a loaded design, after checking it integrates
    every harmonic of degree 1..``degree`` to within ``tol``."""
    if points.dim != 2:
        raise ValueError("design rules are supported on S^2 only")
    w = np.full(len(points), 1.0 / len(points)) if points.weights is None else np.asarray(points.weights)
    w = w / w.sum()
    moments = real_harmonics(degree, points.points).T @ w
    worst = float(np.max(np.abs(moments[1:]))) if n_coeffs(degree) > 1 else 0.0
    if worst > tol:
        raise ValueError(f"point set is not exact to degree {degree} (max moment {worst:.3e})")
    return QuadratureRule(points.points, w, degree)
