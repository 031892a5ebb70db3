"""Error functionals: quadrature L2, sampled L-infinity, MMSE and slope fits."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .geometry import PointSet, QuadratureRule, product_quadrature

DEFAULT_L2_DEGREE = 60
SURFACE_AREA_S2 = 4.0 * math.pi


class Measure(str, enum.Enum):
    """NORMALIZED has unit mass; SURFACE is the area measure (mass 4 pi on S^2)."""

    NORMALIZED = "normalized"
    SURFACE = "surface"


@lru_cache(maxsize=8)
def default_rule(degree: int = DEFAULT_L2_DEGREE) -> QuadratureRule:
    return product_quadrature(degree)


def _values(g, x) -> np.ndarray:
    if callable(g):
        return np.asarray(g(x), dtype=float)
    return np.broadcast_to(np.asarray(g, dtype=float), (x.shape[0],))


def l2_error(approx, f, rule: QuadratureRule | None = None,
             measure: Measure | str = Measure.NORMALIZED) -> float:
    """sqrt(sum_j w_j (approx(x_j) - f(x_j))^2).

    ``approx`` and ``f`` may be callables or constants. The default rule is
    the degree-60 product rule. With ``measure="surface"`` the result is
    scaled by sqrt(4 pi).
    """
    rule = default_rule() if rule is None else rule
    diff = _values(approx, rule.nodes) - _values(f, rule.nodes)
    err = math.sqrt(max(rule.integrate(diff * diff), 0.0))
    if Measure(measure) is Measure.SURFACE:
        err *= math.sqrt(SURFACE_AREA_S2)
    return err


def linf_error(approx, f, eval_pts: PointSet | np.ndarray) -> float:
    x = eval_pts.points if isinstance(eval_pts, PointSet) else np.atleast_2d(eval_pts)
    if x.shape[0] == 0:
        raise ValueError("need at least one evaluation point")
    return float(np.max(np.abs(_values(approx, x) - _values(f, x))))


def mmse(builder: Callable[[int], Callable], f, J: int, eval_pts: PointSet | np.ndarray,
         seeds=None) -> float:
    """max_k (1/J) sum_i (Q^{(i)} f(x_k) - f(x_k))^2 over J seeded rebuilds.

    ``builder(seed)`` returns an evaluable approximant; trial i uses
    ``seeds[i]`` (default ``range(J)``). Per-point means use ``math.fsum``
    so the result does not depend on trial order.
    """
    if J < 1:
        raise ValueError(f"J must be >= 1, got {J}")
    seeds = list(range(J)) if seeds is None else list(seeds)
    if len(seeds) != J:
        raise ValueError(f"need {J} seeds, got {len(seeds)}")
    x = eval_pts.points if isinstance(eval_pts, PointSet) else np.atleast_2d(eval_pts)
    fx = _values(f, x)
    sq = np.empty((J, x.shape[0]))
    for i, s in enumerate(seeds):
        sq[i] = (_values(builder(s), x) - fx) ** 2
    # sort per column so the compensated sum sees the same sequence for any seed order
    sq.sort(axis=0)
    means = np.array([math.fsum(col) for col in sq.T]) / J
    return float(means.max())


def fit_slope(ns, errs) -> tuple[float, float]:
    """Least-squares (slope, intercept) of log10(err) against log10(n)."""
    ns = np.asarray(ns, dtype=float)
    errs = np.asarray(errs, dtype=float)
    if ns.shape != errs.shape or ns.size < 2:
        raise ValueError("need at least two (n, err) pairs of matching length")
    if np.any(errs <= 0) or np.any(ns <= 0):
        raise ValueError("counts and errors must be positive")
    slope, intercept = np.polyfit(np.log10(ns), np.log10(errs), 1)
    return float(slope), float(intercept)


@dataclass(frozen=True)
class ErrorReport:
    n: int
    l2: float
    linf: float
    mmse: float | None = None
    wall_time_s: float = 0.0

    HEADER = ("N", "L2err", "Linferr", "MMSE", "time_s")

    def __post_init__(self):
        for name in ("l2", "linf", "wall_time_s"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.mmse is not None and self.mmse < 0:
            raise ValueError("mmse must be >= 0")

    def row(self) -> list[str]:
        return [str(self.n), repr(self.l2), repr(self.linf),
                "" if self.mmse is None else repr(self.mmse), f"{self.wall_time_s:.6f}"]
