import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sphqi.geometry import random_points
from sphqi.harmonics import SpectralFunction, harmonic
from sphqi.metrics import ErrorReport, default_rule, fit_slope, l2_error, linf_error, mmse


class TestL2:
    def test_constant_offset(self):
        f = harmonic(2, 3)
        assert l2_error(lambda x: f(x) + 0.5, f) == pytest.approx(0.5, abs=1e-12)

    def test_surface_scale(self):
        assert l2_error(1.0, 0.0, measure="surface") == pytest.approx(math.sqrt(4 * math.pi))

    def test_parseval(self, rng):
        c = rng.standard_normal(36)
        s = SpectralFunction(c, 5)
        assert l2_error(s, 0.0) == pytest.approx(np.linalg.norm(c), rel=1e-12)

    def test_zero(self):
        f = harmonic(4, 4)
        assert l2_error(f, f) == 0.0

    def test_rule_cached(self):
        assert default_rule() is default_rule()

    def test_below_linf(self):
        f = harmonic(6, 2)
        g = lambda x: 0.8 * f(x)
        rule = default_rule()
        assert l2_error(g, f) <= linf_error(g, f, rule.nodes) + 1e-12


class TestLinf:
    def test_value(self):
        x = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
        assert linf_error(lambda y: y[:, 2], 0.0, x) == 1.0

    def test_empty(self):
        with pytest.raises(ValueError):
            linf_error(0.0, 0.0, np.zeros((0, 3)))


class TestMMSE:
    def test_exact_builder(self):
        f = harmonic(1, 1)
        assert mmse(lambda s: f, f, 5, random_points(100, 2, 0)) == 0.0

    def test_constant_bias(self):
        f = harmonic(1, 1)
        val = mmse(lambda s: (lambda x: f(x) + 0.3), f, 4, random_points(10, 2, 0))
        assert val == pytest.approx(0.09)

    def test_order_invariant(self):
        pts = random_points(200, 2, 1)

        def builder(seed):
            r = np.random.default_rng(seed).standard_normal(3)
            return lambda x: x @ r

        a = mmse(builder, 0.0, 12, pts, seeds=range(12))
        b = mmse(builder, 0.0, 12, pts, seeds=list(range(11, -1, -1)))
        assert a == b

    @pytest.mark.parametrize("J,seeds", [(0, None), (3, [1, 2])])
    def test_rejects(self, J, seeds):
        with pytest.raises(ValueError):
            mmse(lambda s: 0.0, 0.0, J, random_points(3, 2, 0), seeds)


class TestFitSlope:
    def test_exact(self):
        ns = np.array([1024, 4096, 16384])
        s, b = fit_slope(ns, 10.31 * ns ** -0.96)
        assert s == pytest.approx(-0.96, abs=1e-12)
        assert 10 ** b == pytest.approx(10.31)

    def test_constant(self):
        assert fit_slope([1, 10, 100], [2, 2, 2])[0] == pytest.approx(0.0, abs=1e-12)

    @given(st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None)
    def test_noisy(self, seed):
        ns = np.array([1024, 2048, 4096, 8192, 16384])
        noise = np.random.default_rng(seed).uniform(-0.05, 0.05, ns.size)
        s, _ = fit_slope(ns, 10.31 * ns ** -0.96 * (1 + noise))
        assert abs(s + 0.96) < 0.1

    @pytest.mark.parametrize("ns,errs", [([1], [1]), ([1, 2], [1, 0]), ([1, 2], [1])])
    def test_rejects(self, ns, errs):
        with pytest.raises(ValueError):
            fit_slope(ns, errs)


class TestErrorReport:
    def test_row(self):
        r = ErrorReport(100, 0.5, 1.0, None, 0.25)
        assert r.row() == ["100", "0.5", "1.0", "", "0.250000"]
        assert len(ErrorReport.HEADER) == len(r.row())

    def test_negative(self):
        with pytest.raises(ValueError):
            ErrorReport(1, -1.0, 0.0)
