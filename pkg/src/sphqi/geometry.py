"""Point sets and exact quadrature on the unit sphere.

All integrals use the normalized surface measure (total mass 1), so
equal-weight rules carry weights 1/N and product rules are rescaled
to sum to one.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

NORM_TOL = 1e-12
LOAD_NORM_TOL = 1e-6


class PointKind(str, enum.Enum):
    RANDOM = "random"
    SPIRAL = "spiral"
    TDESIGN = "tdesign"
    MAXDET = "maxdet"
    LOADED = "loaded"


@dataclass(frozen=True)
class PointSet:
    """Unit vectors on S^d stored as an (N, d+1) array."""

    points: np.ndarray
    kind: PointKind = PointKind.LOADED
    seed: int | None = None
    weights: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] < 2:
            raise ValueError(f"points must be a non-empty (N, d+1) array, got shape {pts.shape}")
        dev = np.abs(np.linalg.norm(pts, axis=1) - 1.0)
        if dev.max() > NORM_TOL:
            raise ValueError(f"points are not unit vectors (max deviation {dev.max():.3e})")
        if (self.kind is PointKind.RANDOM) != (self.seed is not None):
            raise ValueError("seed must be given exactly when kind is RANDOM")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (pts.shape[0],):
                raise ValueError("weights must have one entry per point")
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        """Sphere dimension d (points live in R^{d+1})."""
        return self.points.shape[1] - 1

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class QuadratureRule:
    """Positive rule on S^2 with weights normalized to sum to one."""

    nodes: np.ndarray
    weights: np.ndarray
    exact_degree: int

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        weights = np.ascontiguousarray(self.weights, dtype=float)
        if nodes.shape != (weights.shape[0], 3):
            raise ValueError("nodes must be (N, 3) with one weight per node")
        if np.any(weights <= 0):
            raise ValueError("quadrature weights must be positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {weights.sum()!r}, expected 1")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.nodes.shape[0]

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))


def random_points(n: int, d: int = 2, seed: int = 0) -> PointSet:
    """i.i.d. uniform points on S^d from normalized Gaussian vectors."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, d + 1))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return PointSet(g, PointKind.RANDOM, seed=seed)


def spiral_points(n: int) -> PointSet:
    """Generalized spiral points on S^2.

    z_j = 1 - (2j-1)/n, theta_j = arccos z_j, phi_j = 1.8 sqrt(n) theta_j mod 2 pi.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    j = np.arange(1, n + 1, dtype=float)
    z = 1.0 - (2.0 * j - 1.0) / n
    theta = np.arccos(z)
    phi = np.mod(1.8 * math.sqrt(n) * theta, 2.0 * math.pi)
    s = np.sin(theta)
    pts = np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
    # cos/sin rounding can leave |x| off by a few ulps
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return PointSet(pts, PointKind.SPIRAL)


_KIND_TAGS = {
    "tdesign": PointKind.TDESIGN,
    "t-design": PointKind.TDESIGN,
    "maxdet": PointKind.MAXDET,
    "md": PointKind.MAXDET,
    "loaded": PointKind.LOADED,
}


def load_points(path) -> PointSet:
    """Read a whitespace-separated point file (one x y z triple per line).

    Lines starting with '#' are comments. A comment of the form
    ``# kind: tdesign`` (or ``maxdet``) sets the provenance tag.
    Rows within 1e-6 of unit norm are renormalized; anything further off
    raises ``ValueError``.
    """
    path = Path(path)
    kind = PointKind.LOADED
    rows = []
    with path.open("r", newline=None) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.lower().startswith("kind:"):
                    tag = body.split(":", 1)[1].strip().lower()
                    if tag not in _KIND_TAGS:
                        raise ValueError(f"{path}:{lineno}: unknown point kind {tag!r}")
                    kind = _KIND_TAGS[tag]
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 floats, got {len(parts)} fields")
            try:
                row = [float(p) for p in parts]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            norm = math.sqrt(sum(c * c for c in row))
            if abs(norm - 1.0) > LOAD_NORM_TOL:
                raise ValueError(f"{path}:{lineno}: row norm {norm!r} deviates from 1 by more than 1e-6")
            rows.append([c / norm for c in row])
    if not rows:
        raise ValueError(f"{path}: no points found")
    return PointSet(np.array(rows), kind)


def save_points(points: PointSet, path, comment: str | None = None) -> None:
    """Write points in the format read by :func:`load_points`."""
    with open(path, "w") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        if points.kind in (PointKind.TDESIGN, PointKind.MAXDET):
            fh.write(f"# kind: {points.kind.value}\n")
        np.savetxt(fh, points.points, fmt="%.17g")


def symmetric_design_size(t: int) -> int:
    """Cardinality 2(ceil(t(t+1)/4) + 1) of a symmetric spherical t-design."""
    return 2 * (-(-t * (t + 1) // 4) + 1)


def geodesic(x, y) -> np.ndarray:
    """Great-circle distance between rows of x and y (broadcasting)."""
    dots = np.clip(np.sum(np.asarray(x) * np.asarray(y), axis=-1), -1.0, 1.0)
    return np.arccos(dots)


def _chord_to_geodesic(c):
    return 2.0 * np.arcsin(np.clip(np.asarray(c) / 2.0, 0.0, 1.0))


def fill_distance(x: PointSet, probe: PointSet) -> float:
    """Largest geodesic distance from a probe point to its nearest site in x.

    This is a lower bound on the true covering radius (and converges to it
    as the probe set densifies); use a probe with >= 20 |x| points.
    """
    if len(x) == 0:
        raise ValueError("empty point set")
    chord, _ = cKDTree(x.points).query(probe.points, k=1)
    return float(_chord_to_geodesic(chord).max())


def separation_distance(x: PointSet) -> float:
    """Half the minimum pairwise geodesic distance."""
    if len(x) < 2:
        raise ValueError("separation distance needs at least two points")
    chord, _ = cKDTree(x.points).query(x.points, k=2)
    return float(0.5 * _chord_to_geodesic(chord[:, 1]).min())


def nominal_spacing(n: int, d: int = 2) -> float:
    return float(n) ** (-1.0 / d)


def product_quadrature(degree: int) -> QuadratureRule:
    """Gauss-Legendre in z times equispaced longitudes, exact to ``degree``."""
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    nz = (degree + 2) // 2
    nphi = degree + 1
    z, wz = np.polynomial.legendre.leggauss(nz)
    phi = 2.0 * math.pi * np.arange(nphi) / nphi
    s = np.sqrt(1.0 - z * z)
    zz = np.repeat(z, nphi)
    ss = np.repeat(s, nphi)
    pp = np.tile(phi, nz)
    nodes = np.column_stack([ss * np.cos(pp), ss * np.sin(pp), zz])
    nodes /= np.linalg.norm(nodes, axis=1, keepdims=True)
    w = np.repeat(wz, nphi) / (2.0 * nphi)
    w /= w.sum()
    return QuadratureRule(nodes, w, degree)


def product_quadrature_size(degree: int) -> int:
    return ((degree + 2) // 2) * (degree + 1)


def to_spherical(x) -> tuple[np.ndarray, np.ndarray]:
    """(colatitude, longitude) of unit vectors in R^3."""
    x = np.asarray(x, dtype=float)
    theta = np.arccos(np.clip(x[..., 2], -1.0, 1.0))
    phi = np.arctan2(x[..., 1], x[..., 0])
    return theta, phi
