"""Multilevel quasi-interpolation by residual correction.

Level j samples the current residual f - M_{j-1} f on its own point set
X_j, smooths it with an equal-weight quasi-interpolant at scale
rho_j = nu * sqrt(h_j) and adds the result:

    s_j = Q_{X_j, rho_j} E_{j-1} f,   M_j = M_{j-1} + s_j,   E_j = E_{j-1} - s_j.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .geometry import PointSet, fill_distance, random_points
from .kernels import RadialProfile, ZonalKernel, make_kernel
from .quasi import Approximant, NoiseModel, add_noise, qi_qmc


class InvalidScheduleError(ValueError):
    pass


class HMode(str, enum.Enum):
    EMPIRICAL = "empirical"
    NOMINAL = "nominal"


@dataclass(frozen=True)
class Level:
    sites: PointSet
    rho: float
    h: float


@dataclass(frozen=True)
class LevelSchedule:
    levels: tuple[Level, ...]
    nu: float
    delta: float
    c_delta: float = 0.9
    h_mode: HMode = HMode.NOMINAL

    def __len__(self) -> int:
        return len(self.levels)

    @property
    def h(self) -> np.ndarray:
        return np.array([lv.h for lv in self.levels])

    @property
    def rhos(self) -> np.ndarray:
        return np.array([lv.rho for lv in self.levels])

    def beta(self, sigma: float) -> float:
        """(1 + nu^(-2 sigma)) delta^(sigma/2); the level error contracts when < 1."""
        return (1.0 + self.nu ** (-2.0 * sigma)) * self.delta ** (sigma / 2.0)


def build_schedule(base_sites: Sequence[PointSet], nu: float = 1.5, h_mode: HMode | str = HMode.NOMINAL,
                   c_delta: float = 0.9, probe_factor: int = 20, probe_seed: int = 0,
                   sigma: float | None = None) -> LevelSchedule:
    """Attach fill distances and scales rho_j = nu sqrt(h_j) to point sets.

    NOMINAL mode uses h_j = N_j^(-1/d); EMPIRICAL probes with
    ``probe_factor * N_j`` random points. Ratios outside [c_delta delta, delta]
    and beta >= 1 (when ``sigma`` is given) only warn.
    """
    h_mode = HMode(h_mode)
    if not base_sites:
        raise InvalidScheduleError("need at least one level")
    if nu <= 1.0:
        raise InvalidScheduleError(f"nu must exceed 1, got {nu}")
    hs = []
    for j, sites in enumerate(base_sites):
        if h_mode is HMode.NOMINAL:
            hs.append(len(sites) ** (-1.0 / sites.dim))
        else:
            probe = random_points(probe_factor * len(sites), sites.dim, probe_seed + j)
            hs.append(fill_distance(sites, probe))
    hs = np.array(hs)
    if np.any(np.diff(hs) >= 0):
        raise InvalidScheduleError(f"fill distances must strictly decrease across levels, got {hs}")
    ratios = hs[1:] / hs[:-1]
    delta = float(ratios.max()) if ratios.size else 1.0
    if ratios.size and h_mode is HMode.EMPIRICAL and ratios.min() < c_delta * delta:
        warnings.warn(f"level ratios {ratios} fall below c_delta * delta = {c_delta * delta:.3g}")
    levels = []
    for sites, h in zip(base_sites, hs):
        rho = nu * math.sqrt(h)
        if not 0.0 < rho < 1.0:
            raise InvalidScheduleError(f"rho = {rho:.4g} outside (0, 1); reduce nu or refine level")
        levels.append(Level(sites, rho, float(h)))
    sched = LevelSchedule(tuple(levels), float(nu), delta, c_delta, h_mode)
    if sigma is not None and ratios.size and sched.beta(sigma) >= 1.0:
        warnings.warn(f"beta = {sched.beta(sigma):.3g} >= 1; geometric decay is not guaranteed")
    return sched


@dataclass
class LevelRecord:
    """Bookkeeping for one processed level (all arrays indexed by site)."""

    samples: np.ndarray
    previous: np.ndarray
    residual: np.ndarray


@dataclass
class MultilevelApproximant:
    schedule: LevelSchedule
    corrections: list[Approximant] = field(default_factory=list)
    records: list[LevelRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.corrections)

    def __call__(self, x, levels: int | None = None) -> np.ndarray:
        """M_j f(x) with j = ``levels`` (default: all)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        n = len(self.corrections) if levels is None else levels
        out = np.zeros(x.shape[0])
        for s in self.corrections[:n]:
            out += s(x)
        return out

    def partial(self, levels: int) -> Callable[[np.ndarray], np.ndarray]:
        return lambda x: self(x, levels)

    def error_recursion(self, x, f_values) -> np.ndarray:
        """E_n f(x) from E_0 = f and E_j = E_{j-1} - s_j."""
        e = np.array(f_values, dtype=float)
        for s in self.corrections:
            e = e - s(x)
        return e

    def telescoping_defect(self) -> float:
        """max |M_n + E_n - y| over the last level's sites.

        y are the recorded samples there, M_n is the summed corrections and
        E_n the stored residual minus the last correction. Zero up to
        rounding when the bookkeeping is consistent.
        """
        if not self.records:
            raise ValueError("no levels processed")
        pts = self.schedule.levels[len(self.records) - 1].sites.points
        rec = self.records[-1]
        e_n = rec.residual - self.corrections[-1](pts)
        return float(np.max(np.abs(self(pts) + e_n - rec.samples)))


def multilevel_approximate(schedule: LevelSchedule, f, profile: RadialProfile,
                           noise: NoiseModel | None = None,
                           on_level: Callable[[int, MultilevelApproximant], None] | None = None,
                           ) -> MultilevelApproximant:
    """Run the residual-correction loop over ``schedule``.

    With ``noise``, each site's measurement f(x) + eps is drawn once
    (seed offset by level index) and reused; the residual at level j is
    that measurement minus M_{j-1} at the site.
    """
    ml = MultilevelApproximant(schedule)
    for j, level in enumerate(schedule.levels):
        pts = level.sites.points
        samples = np.asarray(f(pts), dtype=float)
        if noise is not None:
            samples = add_noise(samples, noise.with_seed(noise.seed + j))
        previous = ml(pts) if ml.corrections else np.zeros(len(pts))
        residual = samples - previous
        kernel = make_kernel(profile, level.rho, level.sites.dim)
        ml.corrections.append(qi_qmc(level.sites, residual, kernel, noisy=noise is not None))
        ml.records.append(LevelRecord(samples, previous, residual))
        if on_level is not None:
            on_level(j + 1, ml)
    return ml


def _apply_q(level: Level, kernel: ZonalKernel, g) -> Approximant:
    return qi_qmc(level.sites, g(level.sites.points), kernel)


def expand_operators(schedule: LevelSchedule, f, profile: RadialProfile, n_points: int = 50,
                     seed: int = 12345) -> dict:
    """Compare the recursive M_n, E_n with their expanded operator forms.

        M_n = sum_j Q_j (I - Q_{j-1}) ... (I - Q_1),   E_n = (I - Q_n) ... (I - Q_1)

    evaluated at ``n_points`` random points. Meant for n <= 4 (cost grows
    like 2^n evaluations of the coarse levels).
    """
    n = len(schedule)
    if n > 4:
        raise ValueError("expanded-form check is limited to n <= 4 levels")
    kernels = [make_kernel(profile, lv.rho, lv.sites.dim) for lv in schedule.levels]
    x = random_points(n_points, schedule.levels[0].sites.dim, seed).points

    def residual_after(j):
        # (I - Q_j) ... (I - Q_1) f as a callable, built without the recursion
        g = f
        for lv, ker in zip(schedule.levels[:j], kernels[:j]):
            q = _apply_q(lv, ker, g)
            g = (lambda gg, qq: (lambda y: np.asarray(gg(y), dtype=float) - qq(y)))(g, q)
        return g

    expanded_m = np.zeros(n_points)
    for j in range(n):
        expanded_m += _apply_q(schedule.levels[j], kernels[j], residual_after(j))(x)
    expanded_e = residual_after(n)(x)

    ml = multilevel_approximate(schedule, f, profile)
    fx = np.asarray(f(x), dtype=float)
    recursive_m = ml(x)
    recursive_e = ml.error_recursion(x, fx)
    return {
        "levels": n,
        "m_diff": float(np.max(np.abs(recursive_m - expanded_m))),
        "e_diff": float(np.max(np.abs(recursive_e - expanded_e))),
        "e_vs_f_minus_m": float(np.max(np.abs(expanded_e - (fx - recursive_m)))),
    }
