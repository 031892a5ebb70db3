"""Legendre polynomials and real spherical harmonics.

Harmonics are orthonormal with respect to the normalized measure on S^2,
so ``Y_{0,1} == 1`` and the addition formula reads
``sum_k Y_{lk}(x) Y_{lk}(y) = Z(2, l) P_l(3; x.y)``.

Index convention: the order index k in 1..2l+1 maps to the azimuthal
order m = k - l - 1. Negative m uses sin(|m| phi), positive m cos(m phi).
In flat arrays the (l, k) coefficient lives at position l*l + k - 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .geometry import QuadratureRule, to_spherical


def harmonic_dim(d: int, ell: int) -> int:
    """Dimension Z(d, l) of degree-l spherical harmonics on S^d (exact)."""
    if d < 1 or ell < 0:
        raise ValueError(f"need d >= 1 and ell >= 0, got d={d}, ell={ell}")
    if ell == 0:
        return 1
    num = (2 * ell + d - 1) * math.factorial(ell + d - 2)
    den = math.factorial(ell) * math.factorial(d - 1)
    return num // den


def legendre(ell: int, d: int, t):
    """Legendre polynomial P_l(d+1; t) of S^d, normalized so P_l(d+1; 1) = 1.

    Uses the three-term recurrence
    (l + d - 2) P_l = (2l + d - 3) t P_{l-1} - (l - 1) P_{l-2}.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.abs(t_arr) > 1.0):
        raise ValueError("legendre argument must lie in [-1, 1]")
    out = legendre_table(ell, d, t_arr)[ell]
    return float(out) if np.ndim(t) == 0 else out


def legendre_table(lmax: int, d: int, t) -> np.ndarray:
    """All P_l(d+1; t) for l = 0..lmax, shape (lmax+1,) + t.shape."""
    if lmax < 0 or d < 1:
        raise ValueError("need lmax >= 0 and d >= 1")
    t = np.asarray(t, dtype=float)
    out = np.empty((lmax + 1,) + t.shape)
    out[0] = 1.0
    if lmax >= 1:
        out[1] = t
    for ell in range(2, lmax + 1):
        out[ell] = ((2 * ell + d - 3) * t * out[ell - 1] - (ell - 1) * out[ell - 2]) / (ell + d - 2)
    return out


def _normalized_alf(lmax: int, z: np.ndarray, s: np.ndarray) -> Iterator[tuple[int, int, np.ndarray]]:
    """Yield (l, m, Pbar_l^m(z)) for 0 <= m <= l <= lmax, m outermost.

    Pbar uses the geodesy normalization, (1/2) int_{-1}^{1} Pbar^2 dz = 2 - delta_{m0},
    so Pbar cos(m phi) and Pbar sin(m phi) are unit vectors in L2 of the
    normalized measure. No Condon-Shortley phase. The sectoral seeds are built multiplicatively
    in sin(theta), which stays finite for l in the low hundreds.
    """
    pmm = np.ones_like(z)
    for m in range(lmax + 1):
        if m == 1:
            pmm = math.sqrt(3.0) * s
        elif m > 1:
            pmm = math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * pmm
        yield m, m, pmm
        if m == lmax:
            break
        p_prev = pmm
        p_cur = math.sqrt(2.0 * m + 3.0) * z * pmm
        yield m + 1, m, p_cur
        for ell in range(m + 2, lmax + 1):
            a = math.sqrt((4.0 * ell * ell - 1.0) / (ell * ell - m * m))
            b = math.sqrt(((ell - 1.0) ** 2 - m * m) / (4.0 * (ell - 1.0) ** 2 - 1.0))
            p_prev, p_cur = p_cur, a * (z * p_cur - b * p_prev)
            yield ell, m, p_cur


def flat_index(ell: int, k: int) -> int:
    return ell * ell + k - 1


def n_coeffs(lmax: int) -> int:
    return (lmax + 1) ** 2


def _angles(x):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    theta, phi = to_spherical(x)
    return np.cos(theta), np.sin(theta), phi


def _iter_harmonics(lmax: int, x) -> Iterator[tuple[int, np.ndarray, np.ndarray | None, int]]:
    """Yield (l, cos-part column, sin-part column or None, m) for each (l, m>=0)."""
    z, s, phi = _angles(x)
    trig = {}
    for ell, m, p in _normalized_alf(lmax, z, s):
        if m == 0:
            yield ell, p, None, 0
            continue
        if m not in trig:
            trig = {m: (np.cos(m * phi), np.sin(m * phi))}
        c, sn = trig[m]
        yield ell, p * c, p * sn, m


def real_harmonics(lmax: int, x) -> np.ndarray:
    """Matrix of all Y_{lk}(x) for l <= lmax, shape (N, (lmax+1)^2)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.empty((x.shape[0], n_coeffs(lmax)))
    for ell, ycos, ysin, m in _iter_harmonics(lmax, x):
        out[:, ell * ell + ell + m] = ycos
        if ysin is not None:
            out[:, ell * ell + ell - m] = ysin
    return out


def eval_harmonic(ell: int, k: int, x):
    """Real orthonormal harmonic Y_{lk} on S^2 at unit vector(s) x."""
    if ell < 0 or not 1 <= k <= 2 * ell + 1:
        raise ValueError(f"order index k={k} out of range 1..{2 * ell + 1} for l={ell}")
    x_arr = np.asarray(x, dtype=float)
    if x_arr.shape[-1] != 3:
        raise ValueError("eval_harmonic is defined on S^2 only")
    m = k - ell - 1
    z, s, phi = _angles(x_arr)
    p = None
    for l2, m2, pv in _normalized_alf(ell, z, s):
        if l2 == ell and m2 == abs(m):
            p = pv
            break
    if m > 0:
        val = p * np.cos(m * phi)
    elif m < 0:
        val = p * np.sin(-m * phi)
    else:
        val = np.array(p, copy=True)
    return float(val[0]) if x_arr.ndim == 1 else val


def harmonic(ell: int, k: int) -> Callable[[np.ndarray], np.ndarray]:
    """Return Y_{lk} as a vectorized callable on (N, 3) arrays."""
    if not 1 <= k <= 2 * ell + 1:
        raise ValueError(f"order index k={k} out of range for l={ell}")

    def f(x):
        return eval_harmonic(ell, k, np.atleast_2d(x))

    f.__name__ = f"Y_{ell}_{k}"
    return f


@dataclass(frozen=True)
class SpectralFunction:
    """Real Fourier-Legendre coefficients on S^2 truncated at ``lmax``.

    ``coeffs`` is flat with length (lmax+1)^2, ordered by :func:`flat_index`.
    """

    coeffs: np.ndarray
    lmax: int

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (n_coeffs(self.lmax),):
            raise ValueError(f"expected {n_coeffs(self.lmax)} coefficients, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def coeff(self, ell: int, k: int) -> float:
        return float(self.coeffs[flat_index(ell, k)])

    def degree_block(self, ell: int) -> np.ndarray:
        return self.coeffs[ell * ell:(ell + 1) ** 2]

    def __call__(self, x) -> np.ndarray:
        return synthesize(self.coeffs, self.lmax, x)

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(self.coeffs ** 2)))

    def sobolev_norm(self, sigma: float) -> float:
        """Truncated H^sigma norm with weights (1 + l)^(2 sigma)."""
        ells = np.repeat(np.arange(self.lmax + 1), 2 * np.arange(self.lmax + 1) + 1)
        return float(np.sqrt(np.sum((1.0 + ells) ** (2.0 * sigma) * self.coeffs ** 2)))

    @classmethod
    def single_mode(cls, ell: int, k: int, lmax: int | None = None, amplitude: float = 1.0):
        lmax = ell if lmax is None else lmax
        c = np.zeros(n_coeffs(lmax))
        c[flat_index(ell, k)] = amplitude
        return cls(c, lmax)


def analyze(lmax: int, nodes, weighted_values, chunk: int = 4096) -> np.ndarray:
    """Flat coefficients sum_j v_j Y_{lk}(x_j) with v already weight-multiplied."""
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    v = np.asarray(weighted_values, dtype=float)
    out = np.zeros(n_coeffs(lmax))
    for start in range(0, nodes.shape[0], chunk):
        xs = nodes[start:start + chunk]
        vs = v[start:start + chunk]
        for ell, ycos, ysin, m in _iter_harmonics(lmax, xs):
            out[ell * ell + ell + m] += ycos @ vs
            if ysin is not None:
                out[ell * ell + ell - m] += ysin @ vs
    return out


def synthesize(coeffs, lmax: int, x, chunk: int = 4096) -> np.ndarray:
    """Evaluate sum_{l,k} c_{lk} Y_{lk}(x) without materializing the basis."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    c = np.asarray(coeffs, dtype=float)
    out = np.zeros(x.shape[0])
    for start in range(0, x.shape[0], chunk):
        xs = x[start:start + chunk]
        acc = np.zeros(xs.shape[0])
        for ell, ycos, ysin, m in _iter_harmonics(lmax, xs):
            acc += c[ell * ell + ell + m] * ycos
            if ysin is not None:
                acc += c[ell * ell + ell - m] * ysin
        out[start:start + chunk] = acc
    return out


def project(f, lmax: int, rule: QuadratureRule) -> SpectralFunction:
    """Discrete Fourier-Legendre coefficients of f using ``rule``.

    Exact for polynomial f when ``rule.exact_degree >= deg f + lmax``;
    a rule of degree 2*lmax is the usual choice (not enforced here).
    """
    values = np.asarray(f(rule.nodes), dtype=float)
    return SpectralFunction(analyze(lmax, rule.nodes, rule.weights * values), lmax)
