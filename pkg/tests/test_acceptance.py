"""Acceptance criteria, one test (and one PASS/FAIL summary line) each.

Tolerances and grids are fixed; see the README for what each checks.
"""
import math
import time
from pathlib import Path

import numpy as np
import pytest

from sphqi.baselines import filter_h
from sphqi.experiments import (ExperimentConfig, RhoRule, franke, load_config, run_convergence,
                               run_multilevel_compare, run_noise_compare)
from sphqi.geometry import random_points, spiral_points
from sphqi.harmonics import real_harmonics
from sphqi.kernels import (_theta_rule, gaussian_profile, make_kernel, spectrum_quadrature, spectrum_wendland,
                           wendland_profile)
from sphqi.metrics import default_rule, l2_error
from sphqi.multilevel import build_schedule, expand_operators, multilevel_approximate
from sphqi.quasi import qi_mc

CONFIGS = Path(__file__).parents[1] / "configs"


def _local_convolution(kernel, x, lmax, n_alpha=24, panels=24):
    """(phi_rho * Y_lk)(x) for all l <= lmax by direct quadrature in a frame centred at x.

    Polar angle: composite Gauss over the kernel support; azimuth: n_alpha
    equispaced nodes (exact for trigonometric degree < n_alpha).
    """
    th, w = _theta_rule(kernel.profile, kernel.rho, panels, npts=16)
    alpha = 2 * np.pi * np.arange(n_alpha) / n_alpha
    ref = np.array([1.0, 0.0, 0.0]) if abs(x[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(x, ref)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(x, e1)
    ct, st_ = np.cos(th)[:, None, None], np.sin(th)[:, None, None]
    dirs = np.cos(alpha)[:, None] * e1 + np.sin(alpha)[:, None] * e2
    y = (ct * x + st_ * dirs[None]).reshape(-1, 3)
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    kv = kernel.of_chord(2 * np.sin(th / 2)) * np.sin(th) * w / 2
    weights = np.repeat(kv, n_alpha) / n_alpha
    return weights @ real_harmonics(lmax, y)


class TestCriterion01FunkHecke:
    @pytest.mark.parametrize("family", ["gaussian", "wendland"])
    def test_eigenvalue_identity(self, family, verdict):
        t0 = time.perf_counter()
        profile = gaussian_profile() if family == "gaussian" else wendland_profile(3, 1)
        xs = random_points(20, 2, 101).points
        lmax = 10
        ells = np.repeat(np.arange(lmax + 1), 2 * np.arange(lmax + 1) + 1)
        worst = 0.0
        for rho in (0.05, 0.1, 0.2):
            k = make_kernel(profile, rho)
            spec = spectrum_quadrature(k, lmax)
            if family == "wendland":
                # independent check of the eigenvalues themselves
                worst = max(worst, float(np.max(np.abs(spec.coeffs - spectrum_wendland(lmax, rho, 1).coeffs))))
            for x in xs:
                lhs = _local_convolution(k, x, lmax)
                rhs = spec.coeffs[ells] * real_harmonics(lmax, x[None])[0]
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        elapsed = time.perf_counter() - t0
        ok = worst < 1e-7 and elapsed < 10
        verdict(f"criterion 1 ({family})", ok, f"max dev {worst:.2e}, {elapsed:.1f}s")
        assert ok


class TestCriterion02WendlandClosedForm:
    def test_closed_vs_quadrature(self, verdict):
        t0 = time.perf_counter()
        worst = 0.0
        for rho in (0.05, 0.1, 0.2, 0.5, 0.9):
            q = spectrum_quadrature(make_kernel(wendland_profile(3, 1), rho), 50)
            c = spectrum_wendland(50, rho, 1)
            worst = max(worst, float(np.max(np.abs(q.coeffs - c.coeffs))))
        elapsed = time.perf_counter() - t0
        ok = worst < 1e-8 and elapsed < 5
        verdict("criterion 2", ok, f"max dev {worst:.2e}, {elapsed:.2f}s")
        assert ok


class TestCriterion03NormScaling:
    @pytest.mark.parametrize("family", ["gaussian", "wendland"])
    def test_scaled_norms_bounded(self, family, verdict):
        profile = gaussian_profile() if family == "gaussian" else wendland_profile(3, 1)
        rhos = (0.4, 0.2, 0.1, 0.05)
        kernels = [make_kernel(profile, r) for r in rhos]
        sup = np.array([k.sup_norm() * r ** 2 for k, r in zip(kernels, rhos)])
        l2 = np.array([k.l2_norm() * r for k, r in zip(kernels, rhos)])
        ratios = (sup.max() / sup.min(), l2.max() / l2.min())
        ok = max(ratios) < 2.0
        verdict(f"criterion 3 ({family})", ok, f"sup ratio {ratios[0]:.3f}, L2 ratio {ratios[1]:.3f}")
        assert ok


class TestCriterion04QmcRate:
    def test_gaussian_m4_slope(self, verdict):
        cfg = ExperimentConfig(kernel="gaussian", order=4, point_kind="spiral", target=("harmonic", 6, 4),
                               n_grid=(1024, 2048, 4096, 8192, 16384), rho_rule=RhoRule(exponent=-0.25))
        res = run_convergence(cfg)
        ok = abs(res.slope_l2 + 0.96) <= 0.2
        verdict("criterion 4", ok, f"L2 slope {res.slope_l2:.3f} (target -0.96 +- 0.2)")
        assert ok


@pytest.mark.slow
class TestCriterion05MmseRate:
    def test_mc_mmse_slope(self, verdict):
        cfg = ExperimentConfig(kernel="gaussian", order=2, point_kind="random", target=("harmonic", 6, 4),
                               n_grid=(1024, 2048, 4096, 8192, 16384),
                               rho_rule=RhoRule("pow_mc", exponent=-0.25), trials=20, eval_points=5000)
        res = run_convergence(cfg)
        ok = abs(res.slope_mmse + 0.46) <= 0.2
        verdict("criterion 5", ok, f"MMSE slope {res.slope_mmse:.3f} (target -0.46 +- 0.2)")
        assert ok


@pytest.fixture(scope="module")
def table_rows():
    cfg = load_config(CONFIGS / "table_multilevel.json")
    t0 = time.perf_counter()
    rows = run_multilevel_compare(cfg)
    return rows, time.perf_counter() - t0


def _final(rows, scheme, sigma):
    last = max(r.level for r in rows)
    return next(r.l2 for r in rows if r.scheme == scheme and r.sigma == sigma and r.level == last)


@pytest.mark.slow
class TestCriterion06Multilevel:
    def test_reference_errors(self, table_rows, verdict):
        rows, elapsed = table_rows
        ml, sl = _final(rows, "multilevel", 0.01), _final(rows, "single", 0.01)
        ok = (6.82e-3 / 2 <= ml <= 2 * 6.82e-3 and 2.55e-2 / 2 <= sl <= 2 * 2.55e-2
              and sl >= 2 * ml and elapsed < 600)
        verdict("criterion 6 (sigma=0.01)", ok,
                f"ML {ml:.3e} (ref 6.82e-3), SL {sl:.3e} (ref 2.55e-2), ratio {sl / ml:.2f}, {elapsed:.0f}s")
        assert ok

    @pytest.mark.xfail(strict=True, reason="at sigma=0.1 both schemes sit on the same noise floor "
                                           "sigma*||phi_rho||_2/sqrt(N); see the decisions ledger")
    def test_advantage_at_high_noise(self, table_rows, verdict):
        rows, _ = table_rows
        ml, sl = _final(rows, "multilevel", 0.1), _final(rows, "single", 0.1)
        ok = sl >= 2 * ml
        verdict("criterion 6 (sigma=0.1)", ok, f"ML {ml:.3e}, SL {sl:.3e}, ratio {sl / ml:.2f} (need >= 2)")
        assert ok


class TestCriterion07Telescoping:
    def test_identities(self, verdict):
        profile = wendland_profile(3, 1)
        sched = build_schedule([spiral_points(n) for n in (144, 576, 2304, 9216)], nu=3.0)
        ml = multilevel_approximate(sched, franke, profile)
        tele = ml.telescoping_defect()
        worst = 0.0
        for n in (1, 2, 3):
            sub = build_schedule([lv.sites for lv in sched.levels[:n]], nu=3.0)
            rep = expand_operators(sub, franke, profile, n_points=50)
            worst = max(worst, rep["m_diff"], rep["e_diff"], rep["e_vs_f_minus_m"])
        ok = tele < 1e-10 and worst < 1e-10
        verdict("criterion 7", ok, f"telescoping {tele:.1e}, expanded forms {worst:.1e}")
        assert ok


class TestCriterion08NoiseContrast:
    def test_qi_decreases_fhi_stalls(self, verdict):
        cfg = ExperimentConfig(experiment="noise-compare", kernel="wendland", order=2, target="franke",
                               n_grid=(1024, 2048, 4096, 8192, 16384), noise_levels=(0.1,),
                               rho_rule=RhoRule(exponent=-0.25))
        res = run_noise_compare(cfg, methods=("qmcqi", "fhi"))
        qi = [r.l2 for r in res["qmcqi"]]
        fhi = [r.l2 for r in res["fhi"]]
        upper = fhi[len(fhi) // 2:]
        qi_ok = all(b < a for a, b in zip(qi, qi[1:]))
        # "fails to decrease": the last error keeps at least 90% of the upper-half start
        fhi_stalls = upper[-1] >= 0.9 * upper[0]
        ok = qi_ok and fhi_stalls
        verdict("criterion 8", ok, "QI " + " ".join(f"{e:.3g}" for e in qi) + " | FHI "
                + " ".join(f"{e:.3g}" for e in fhi))
        assert ok


@pytest.mark.slow
class TestCriterion09Concentration:
    def test_failure_frequency(self, verdict):
        f = lambda x: real_harmonics(6, x)[:, 36 + 3]
        rule = default_rule(60)
        ns = (256, 1024, 4096)
        errs = {}
        for n in ns:
            k = make_kernel(gaussian_profile(), n ** -0.25)
            errs[n] = np.array([l2_error(qi_mc(n, 7_000_000 + 1000 * n + s, f, k), f, rule) for s in range(200)])
        med = float(np.median(errs[ns[1]]))
        freq = [float(np.mean(errs[n] >= 2 * med)) for n in ns]
        # the errors concentrate tightly, so also track a threshold the smallest N crosses
        freq1 = [float(np.mean(errs[n] >= med)) for n in ns]
        ok = all(b <= a for a, b in zip(freq, freq[1:])) and all(b <= a for a, b in zip(freq1, freq1[1:]))
        verdict("criterion 9", ok, f"eps {2 * med:.3g}: freq " + " ".join(f"{p:.3f}" for p in freq)
                + f" | eps {med:.3g}: freq " + " ".join(f"{p:.3f}" for p in freq1))
        assert ok


class TestCriterion10Filter:
    def test_shape(self, verdict):
        x = np.linspace(0, 1, 1001)
        h = filter_h(np.linspace(1, 1.2, 10_001), 1.2)
        ok = (np.all(filter_h(x, 1.2) == 1.0) and np.all(filter_h(np.linspace(1.2, 10, 1001), 1.2) == 0.0)
              and bool(np.all(np.diff(h) <= 0)))
        verdict("criterion 10 (shape)", ok, "1 on [0,1], 0 on [a,inf), monotone on [1,a]")
        assert ok

    @pytest.mark.xfail(strict=True, reason="the reference 0.929258 disagrees with exp(-4 e^-4) = 0.9293568 "
                                           "by 1e-4; see the decisions ledger")
    def test_reference_value(self, verdict):
        v = filter_h(1.1, 1.2)
        ok = abs(v - 0.929258) < 1e-6
        verdict("criterion 10 (value)", ok, f"h(1.1) = {v:.7f}, reference 0.929258")
        assert ok
