"""Scaled zonal kernels built from radial profiles, and their spectra.

A radial profile phi(r) on the ambient space is restricted to the sphere
through the chord length |x - y| = sqrt(2 - 2 x.y), scaled by rho and
divided by Lambda so that it integrates to one against the normalized
measure.

Higher-order kernels: multiplying a profile by a polynomial q(r^2) with
q(0) = 1 whose coefficients cancel the radial moments
int phi(r) q(r^2) r^(2j) r^(d-1) dr for j = 1..m/2-1 raises the
approximation order (|1 - phi_hat(l)| = O((rho l)^m)). On S^2 the
normalized measure in the chord variable is exactly r dr, so the moment
cancellation carries over to the sphere without curvature error. For the
Gaussian this yields the Laguerre-Gaussian L_{m/2-1}^{(d/2)}(r^2) exp(-r^2).
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import mpmath
import numpy as np
from scipy import integrate

from .harmonics import legendre_table


class DegenerateKernelError(ValueError):
    pass


class Family(str, enum.Enum):
    GAUSSIAN = "gaussian"
    WENDLAND = "wendland"
    CUSTOM = "custom"


# Wendland polynomial factors p_k in powers of r, normalized so p_k(0) = 1.
def _wendland_poly(l: int, k: int) -> np.ndarray:
    if k == 0:
        return np.array([1.0])
    if k == 1:
        return np.array([1.0, l + 1.0])
    if k == 2:
        return np.array([3.0, 3.0 * l + 6.0, l * l + 4.0 * l + 3.0]) / 3.0
    if k == 3:
        return np.array([
            15.0,
            15.0 * l + 45.0,
            6.0 * l * l + 36.0 * l + 45.0,
            l ** 3 + 9.0 * l * l + 23.0 * l + 15.0,
        ]) / 15.0
    raise ValueError(f"Wendland smoothness k={k} not supported (k in 0..3)")


@dataclass(frozen=True)
class RadialProfile:
    """Radial function phi(r), r >= 0, with its family metadata.

    ``support`` is the radius beyond which phi vanishes (``inf`` for
    Gaussians). ``cutoff`` is the radius past which |phi| < 1e-17 relative
    to phi(0); evaluation may skip terms beyond it.
    """

    family: Family
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    support: float = math.inf
    cutoff: float = math.inf
    order: int = 2
    params: dict = field(default_factory=dict)

    def __call__(self, r):
        return self.func(np.asarray(r, dtype=float))

    @property
    def compact(self) -> bool:
        return math.isfinite(self.support)

    @property
    def label(self) -> str:
        if self.family is Family.WENDLAND:
            tag = f"wendland(l={self.params['l']},k={self.params['k']},m={self.order}"
            if "stretch" in self.params:
                tag += f",support={self.params['stretch']:g}"
            return tag + ")"
        return f"{self.family.value}(m={self.order})"


def _gaussian(r):
    return np.exp(-r * r)


def _base_gaussian() -> RadialProfile:
    return RadialProfile(Family.GAUSSIAN, _gaussian, cutoff=math.sqrt(-math.log(1e-17)))


def _base_wendland(l: int, k: int) -> RadialProfile:
    if l < k + 1:
        raise ValueError(f"Wendland needs l >= k + 1, got l={l}, k={k}")
    poly = _wendland_poly(l, k)
    expo = l + k

    def func(r):
        rr = np.minimum(r, 1.0)
        return np.where(r < 1.0, (1.0 - rr) ** expo * np.polyval(poly[::-1], rr), 0.0)

    return RadialProfile(Family.WENDLAND, func, support=1.0, cutoff=1.0, params={"l": l, "k": k})


def _radial_moment(profile: RadialProfile, power: float) -> float:
    upper = profile.support if profile.compact else profile.cutoff
    val, _ = integrate.quad(lambda r: float(profile(r)) * r ** power, 0.0, upper,
                            limit=200, epsabs=1e-15, epsrel=1e-13)
    return val


def raise_order(profile: RadialProfile, m: int, d: int = 2) -> RadialProfile:
    """Moment-corrected profile q(r^2) phi(r) of approximation order m on S^d.

    m must be even. The correction is exact for d = 2; for other d it
    cancels the tangent-space moments only to leading order.
    """
    if m < 2 or m % 2:
        raise ValueError(f"order m must be an even integer >= 2, got {m}")
    nterms = m // 2
    if nterms == 1:
        return RadialProfile(profile.family, profile.func, profile.support, profile.cutoff, 2,
                             dict(profile.params))
    moments = [_radial_moment(profile, 2 * j + d - 1) for j in range(2 * nterms)]
    # sum_i c_i M_{i+j} = 0 for j = 1..nterms-1, with c_0 = 1
    a = np.array([[moments[i + j] for i in range(1, nterms)] for j in range(1, nterms)])
    b = -np.array([moments[j] for j in range(1, nterms)])
    tail = np.linalg.solve(a, b)
    coef = np.concatenate([[1.0], tail])
    base = profile.func

    def func(r):
        return np.polyval(coef[::-1], r * r) * base(r)

    cutoff = profile.cutoff
    if not profile.compact:
        # polynomial growth shifts the negligible-tail radius outward
        grid = np.linspace(profile.cutoff, 3.0 * profile.cutoff, 2001)
        vals = np.abs(func(grid))
        cutoff = float(grid[np.argmax(vals < 1e-17)]) if np.any(vals < 1e-17) else 3.0 * profile.cutoff
    params = dict(profile.params)
    params["q_coeffs"] = tuple(float(c) for c in coef)
    return RadialProfile(profile.family, func, profile.support, cutoff, m, params)


def gaussian_profile(m: int = 2, d: int = 2) -> RadialProfile:
    """exp(-r^2), moment-corrected to order m (m=2 is the plain Gaussian)."""
    return raise_order(_base_gaussian(), m, d)


def wendland_profile(l: int, k: int, m: int = 2, d: int = 2) -> RadialProfile:
    """Wendland function (1-r)_+^(l+k) p_k(r) with p_k(0) = 1.

    ``m > 2`` applies the moment correction on top of the compact base.
    """
    return raise_order(_base_wendland(l, k), m, d)


def stretch(profile: RadialProfile, c: float) -> RadialProfile:
    """phi(r / c): same shape, support and cutoff multiplied by c."""
    if c <= 0:
        raise ValueError("stretch factor must be positive")
    if c == 1:
        return profile
    base = profile.func
    params = dict(profile.params, stretch=c)
    return RadialProfile(profile.family, lambda r: base(r / c), profile.support * c,
                         profile.cutoff * c, profile.order, params)


def profile_for_order(family: str, m: int, d: int = 2) -> RadialProfile:
    """Default kernel for an experiment label such as ("wendland", 4).

    Wendland labels use smoothness k = m/2 with l = k + 2 (the R^3 choice),
    raise the order to m and widen the support to radius m/2. Without the
    widening, caps at rho ~ N^(-1/4) hold too few sites for the corrected
    kernels to leave the pre-asymptotic regime at N ~ 10^4.
    """
    family = Family(family)
    if family is Family.GAUSSIAN:
        return gaussian_profile(m, d)
    if family is Family.WENDLAND:
        k = m // 2
        return stretch(wendland_profile(k + 2, k, m, d), m / 2)
    raise ValueError(f"no default profile for family {family}")


def constant_profile() -> RadialProfile:
    """phi == 1, used to calibrate the normalization."""
    return RadialProfile(Family.CUSTOM, lambda r: np.ones_like(np.asarray(r, dtype=float)))


def _sphere_constant(d: int) -> float:
    # 1 / int_0^pi sin^{d-1}
    return math.gamma(d / 2.0 + 0.5) / (math.sqrt(math.pi) * math.gamma(d / 2.0))


def _theta_rule(profile: RadialProfile, rho: float, panels: int, npts: int = 20):
    """Composite Gauss nodes in the polar angle covering the kernel's support."""
    reach = profile.support if profile.compact else profile.cutoff
    chord = reach * rho
    theta_max = math.pi if chord >= 2.0 else 2.0 * math.asin(chord / 2.0)
    # geometric grading toward theta = 0 where the kernel peaks
    edges = theta_max * (np.linspace(0.0, 1.0, panels + 1) ** 1.5)
    g, w = np.polynomial.legendre.leggauss(npts)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (g + 1.0)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def normalization_lambda(profile: RadialProfile, rho: float, d: int = 2, panels: int = 64) -> float:
    """Lambda = int_{S^d} phi(|x - y| / rho) dsigma(y) under the unit-mass measure."""
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    th, w = _theta_rule(profile, rho, panels)
    chord = 2.0 * np.sin(th / 2.0)
    val = _sphere_constant(d) * float(np.sum(w * profile(chord / rho) * np.sin(th) ** (d - 1)))
    if not val > 0.0:
        raise DegenerateKernelError(f"kernel integrates to {val!r} on the sphere")
    return val


@dataclass(frozen=True)
class ZonalKernel:
    """t -> phi(sqrt(2 - 2t) / rho) / Lambda on [-1, 1]."""

    profile: RadialProfile
    rho: float
    lam: float
    dim: int = 2

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.of_chord(np.sqrt(np.maximum(2.0 - 2.0 * t, 0.0)))

    def of_chord(self, r):
        return self.profile(np.asarray(r, dtype=float) / self.rho) / self.lam

    @property
    def reach(self) -> float:
        """Chord radius beyond which the kernel is zero or negligible."""
        return self.profile.cutoff * self.rho

    @property
    def peak(self) -> float:
        return float(self.profile(0.0)) / self.lam

    def sup_norm(self, n: int = 4001) -> float:
        r = np.linspace(0.0, min(self.reach, 2.0), n)
        return float(np.max(np.abs(self.of_chord(r))))

    def l2_norm(self, panels: int = 64) -> float:
        th, w = _theta_rule(self.profile, self.rho, panels)
        vals = self.of_chord(2.0 * np.sin(th / 2.0))
        return math.sqrt(_sphere_constant(self.dim) * float(np.sum(w * vals ** 2 * np.sin(th) ** (self.dim - 1))))

    def integral(self, panels: int = 64) -> float:
        th, w = _theta_rule(self.profile, self.rho, panels)
        vals = self.of_chord(2.0 * np.sin(th / 2.0))
        return _sphere_constant(self.dim) * float(np.sum(w * vals * np.sin(th) ** (self.dim - 1)))


def make_kernel(profile: RadialProfile, rho: float, d: int = 2, panels: int = 64) -> ZonalKernel:
    return ZonalKernel(profile, float(rho), normalization_lambda(profile, rho, d, panels), d)


class SpectrumMethod(str, enum.Enum):
    QUADRATURE = "quadrature"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class KernelSpectrum:
    rho: float
    coeffs: np.ndarray
    dim: int = 2
    method: SpectrumMethod = SpectrumMethod.QUADRATURE

    @property
    def lmax(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, ell):
        return self.coeffs[ell]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["ell", "coeff"])
            for ell, c in enumerate(self.coeffs):
                w.writerow([ell, repr(float(c))])

    @classmethod
    def identity(cls, lmax: int, rho: float = 0.0, d: int = 2):
        return cls(rho, np.ones(lmax + 1), d)


def spectrum_quadrature(kernel: ZonalKernel, lmax: int, panels: int | None = None) -> KernelSpectrum:
    """Funk-Hecke coefficients phi_hat(l), l = 0..lmax.

    phi_hat(l) = c_d int_0^pi phi_rho(cos th) P_l(d+1; cos th) sin^{d-1} th dth,
    with c_d chosen so that a unit-mass kernel has phi_hat(0) = 1.
    """
    if lmax < 0:
        raise ValueError("lmax must be >= 0")
    if panels is None:
        # ~8 (lmax + 1/rho) Gauss points, at least as fine as the Lambda rule
        panels = max(64, math.ceil(8 * (lmax + math.ceil(1.0 / kernel.rho)) / 20))
    th, w = _theta_rule(kernel.profile, kernel.rho, panels)
    vals = kernel.of_chord(2.0 * np.sin(th / 2.0)) * np.sin(th) ** (kernel.dim - 1) * w
    table = legendre_table(lmax, kernel.dim, np.cos(th))
    coeffs = _sphere_constant(kernel.dim) * (table @ vals)
    return KernelSpectrum(kernel.rho, coeffs, kernel.dim, SpectrumMethod.QUADRATURE)


def spectrum_wendland_closed(ell: int, rho: float, n: int, k: int, dps: int = 40) -> float:
    """Closed-form phi_hat(l) of the restricted Wendland kernel on S^(2n+2).

    Terminating 3F2 series
        sum_j (-(l+n))_j (l+n+1)_j (mu-1/2)_j / (((3mu-1)/2)_j (3mu/2)_j) (rho^2/4)^j / j!,
    mu = n + k + 2, summed in ``dps``-digit arithmetic. Matches the Wendland
    profile with l = n + k + 2.
    """
    if ell < 0 or n < 0 or k < 0:
        raise ValueError("ell, n, k must be non-negative")
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    with mpmath.workdps(dps):
        mu = mpmath.mpf(n + k + 2)
        x = mpmath.mpf(rho) ** 2 / 4
        a1, a2, a3 = -mpmath.mpf(ell + n), mpmath.mpf(ell + n + 1), mu - mpmath.mpf(1) / 2
        b1, b2 = (3 * mu - 1) / 2, 3 * mu / 2
        term = mpmath.mpf(1)
        total = mpmath.mpf(1)
        for j in range(ell + n):
            term *= (a1 + j) * (a2 + j) * (a3 + j) / ((b1 + j) * (b2 + j) * (j + 1)) * x
            total += term
        return float(total)


def spectrum_wendland(lmax: int, rho: float, k: int, d: int = 2) -> KernelSpectrum:
    if d % 2 or d < 2:
        raise ValueError("closed form needs an even sphere dimension d = 2n + 2")
    n = (d - 2) // 2
    coeffs = np.array([spectrum_wendland_closed(ell, rho, n, k) for ell in range(lmax + 1)])
    return KernelSpectrum(rho, coeffs, d, SpectrumMethod.CLOSED_FORM)


@dataclass(frozen=True)
class AssumptionReport:
    """Empirical constants; no pass/fail is implied."""

    ell_rho: int
    approx_ratio_max: float
    tail_max: float
    decay_min: float
    decay_max: float


def assumption_diagnostics(spec: KernelSpectrum, m: float, s: float) -> AssumptionReport:
    rho = spec.rho if spec.rho > 0 else 1.0
    ell_rho = max(int(math.floor(1.0 / rho - 1.0)), 0)
    if spec.lmax < ell_rho:
        raise ValueError(f"spectrum truncated at {spec.lmax} < l_rho = {ell_rho}")
    ells = np.arange(spec.lmax + 1, dtype=float)
    c = np.asarray(spec.coeffs)
    head = slice(1, ell_rho + 1)
    if ell_rho >= 1:
        ratio = float(np.max(np.abs(1.0 - c[head]) / (ells[head] * rho) ** m))
    else:
        ratio = 0.0
    tail = c[ell_rho + 1:]
    tail_max = float(tail.max()) if tail.size else 0.0
    decay = c[1:] * (1.0 + rho * ells[1:]) ** (2.0 * s)
    return AssumptionReport(ell_rho, ratio, tail_max,
                            float(decay.min()) if decay.size else math.nan,
                            float(decay.max()) if decay.size else math.nan)
