"""Quasi-interpolants Q f(x) = sum_j a_j v_j phi_rho(x . x_j).

Evaluation has two paths. When the kernel's reach (support radius, or
the radius where a Gaussian tail drops below 1e-17) covers only part of
the sphere, a KD-tree over the sites restricts each sum to the sites in
the spherical cap around x. Otherwise a dense chunked sum is used. Both
paths reduce with numpy's pairwise summation.
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

from .geometry import PointSet, random_points
from .harmonics import SpectralFunction
from .kernels import KernelSpectrum, ZonalKernel

_DENSE_CHUNK_ELEMS = 4_000_000
_TREE_MIN_SITES = 256
_TREE_MAX_REACH = 1.2


class ApproxKind(str, enum.Enum):
    WEIGHTED = "weighted"
    QMC = "qmc"
    MC = "mc"
    NOISY = "noisy"


class Approximant:
    """Evaluable quasi-interpolant; immutable after construction."""

    def __init__(self, sites: PointSet, weights, values, kernel: ZonalKernel,
                 kind: ApproxKind = ApproxKind.WEIGHTED):
        weights = np.array(weights, dtype=float)
        values = np.array(values, dtype=float)
        n = len(sites)
        if weights.shape != (n,) or values.shape != (n,):
            raise ValueError(f"need {n} weights and values, got {weights.shape} and {values.shape}")
        if not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite")
        weights.setflags(write=False)
        values.setflags(write=False)
        self.sites = sites
        self.weights = weights
        self.values = values
        self.kernel = kernel
        self.kind = ApproxKind(kind)
        self._coef = weights * values

    def __len__(self) -> int:
        return len(self.sites)

    @property
    def coefficients(self) -> np.ndarray:
        return self._coef

    @cached_property
    def _tree(self) -> cKDTree:
        return cKDTree(self.sites.points)

    def _use_tree(self) -> bool:
        return len(self.sites) >= _TREE_MIN_SITES and self.kernel.reach < _TREE_MAX_REACH

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self._use_tree():
            return self._eval_tree(x)
        return self._eval_dense(x)

    def _eval_dense(self, x: np.ndarray) -> np.ndarray:
        pts = self.sites.points
        out = np.empty(x.shape[0])
        step = max(1, _DENSE_CHUNK_ELEMS // max(1, pts.shape[0]))
        for s in range(0, x.shape[0], step):
            t = np.clip(x[s:s + step] @ pts.T, -1.0, 1.0)
            out[s:s + step] = (self.kernel(t) * self._coef).sum(axis=1)
        return out

    def _eval_tree(self, x: np.ndarray) -> np.ndarray:
        reach = self.kernel.reach
        out = np.zeros(x.shape[0])
        step = 4096
        for s in range(0, x.shape[0], step):
            xs = x[s:s + step]
            pairs = cKDTree(xs).sparse_distance_matrix(self._tree, reach, output_type="ndarray")
            if pairs.size == 0:
                continue
            contrib = self.kernel.of_chord(pairs["v"]) * self._coef[pairs["j"]]
            out[s:s + step] = _rowwise_sum(pairs["i"], contrib, xs.shape[0])
        return out

    def to_csv(self, path) -> None:
        """Dump the sampled data as ``x,y,z,value`` rows."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "z", "value"])
            for p, v in zip(self.sites.points, self.values):
                w.writerow([repr(float(c)) for c in p] + [repr(float(v))])


def _rowwise_sum(rows: np.ndarray, vals: np.ndarray, nrows: int) -> np.ndarray:
    order = np.argsort(rows, kind="stable")
    rows = rows[order]
    vals = vals[order]
    counts = np.bincount(rows, minlength=nrows)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    cols = np.arange(rows.size) - starts[rows]
    padded = np.zeros((nrows, int(counts.max())))
    padded[rows, cols] = vals
    return padded.sum(axis=1)


def qi_weighted(sites: PointSet, weights, values, kernel: ZonalKernel) -> Approximant:
    return Approximant(sites, weights, values, kernel, ApproxKind.WEIGHTED)


def qi_qmc(sites: PointSet, values, kernel: ZonalKernel, noisy: bool = False) -> Approximant:
    """Equal-weight quasi-interpolant (1/N) sum_j v_j phi_rho(x . x_j)."""
    n = len(sites)
    kind = ApproxKind.NOISY if noisy else ApproxKind.QMC
    return Approximant(sites, np.full(n, 1.0 / n), values, kernel, kind)


def qi_mc(n: int, seed: int, f, kernel: ZonalKernel, noise: "NoiseModel | None" = None) -> Approximant:
    """Monte Carlo quasi-interpolant on n i.i.d. uniform sites."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    sites = random_points(n, kernel.dim, seed)
    values = np.asarray(f(sites.points), dtype=float)
    kind = ApproxKind.MC
    if noise is not None:
        values = add_noise(values, noise)
        kind = ApproxKind.NOISY
    return Approximant(sites, np.full(n, 1.0 / n), values, kernel, kind)


class NoiseKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class NoiseModel:
    """Zero-mean additive noise.

    ``level`` is the standard deviation for GAUSSIAN and the bound M for
    UNIFORM (draws from U[-M, M]).
    """

    kind: NoiseKind = NoiseKind.GAUSSIAN
    level: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if self.level < 0:
            raise ValueError(f"noise level must be >= 0, got {self.level}")

    def with_seed(self, seed: int) -> "NoiseModel":
        return NoiseModel(self.kind, self.level, seed)


def add_noise(values, model: NoiseModel) -> np.ndarray:
    """values + eps with eps drawn i.i.d. from ``model``; the j-th draw
    depends only on (model.seed, j)."""
    values = np.asarray(values, dtype=float)
    if model.level == 0:
        return values.copy()
    rng = np.random.default_rng(model.seed)
    if model.kind is NoiseKind.GAUSSIAN:
        eps = model.level * rng.standard_normal(values.shape)
    else:
        eps = rng.uniform(-model.level, model.level, values.shape)
    return values + eps


def convolution_reference(f_spec: SpectralFunction, spec: KernelSpectrum) -> SpectralFunction:
    """Spectral form of f * phi_rho: degree-l block scaled by phi_hat(l)."""
    if f_spec.lmax > spec.lmax:
        raise ValueError(f"kernel spectrum truncated at {spec.lmax} < {f_spec.lmax}")
    ells = np.repeat(np.arange(f_spec.lmax + 1), 2 * np.arange(f_spec.lmax + 1) + 1)
    return SpectralFunction(f_spec.coeffs * np.asarray(spec.coeffs)[ells], f_spec.lmax)
