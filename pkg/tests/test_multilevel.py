import math
import warnings

import numpy as np
import pytest

from sphqi.experiments import franke
from sphqi.geometry import random_points, spiral_points
from sphqi.harmonics import harmonic
from sphqi.kernels import make_kernel, profile_for_order
from sphqi.metrics import l2_error
from sphqi.multilevel import (HMode, InvalidScheduleError, LevelSchedule, build_schedule, expand_operators,
                              multilevel_approximate)
from sphqi.quasi import NoiseModel, qi_qmc

WEND = profile_for_order("wendland", 2)


def spiral_levels(*ns):
    return [spiral_points(n) for n in ns]


class TestSchedule:
    def test_nominal_values(self):
        s = build_schedule(spiral_levels(144, 576, 2304), nu=2.0)
        np.testing.assert_allclose(s.h, [1 / 12, 1 / 24, 1 / 48])
        np.testing.assert_allclose(s.rhos, 2.0 * np.sqrt(s.h))
        assert s.delta == pytest.approx(0.5)
        assert len(s) == 3 and s.h_mode is HMode.NOMINAL

    def test_beta(self):
        s = build_schedule(spiral_levels(144, 576), nu=2.0)
        assert s.beta(2.0) == pytest.approx((1 + 2.0 ** -4) * 0.5)

    def test_single_level_delta(self):
        s = build_schedule(spiral_levels(400), nu=1.5)
        assert s.delta == 1.0

    def test_increasing_h_rejected(self):
        with pytest.raises(InvalidScheduleError, match="decrease"):
            build_schedule(spiral_levels(576, 144))

    def test_nu_rejected(self):
        with pytest.raises(InvalidScheduleError):
            build_schedule(spiral_levels(144), nu=1.0)

    def test_rho_out_of_range(self):
        with pytest.raises(InvalidScheduleError, match="rho"):
            build_schedule(spiral_levels(16), nu=3.0)

    def test_empty(self):
        with pytest.raises(InvalidScheduleError):
            build_schedule([])

    def test_empirical_mode(self):
        s = build_schedule(spiral_levels(200, 800), nu=1.2, h_mode="empirical", probe_factor=10)
        assert s.h_mode is HMode.EMPIRICAL
        assert s.h[1] < s.h[0]
        assert 0.3 < s.delta < 0.7

    def test_beta_warning(self):
        with pytest.warns(UserWarning, match="beta"):
            build_schedule(spiral_levels(400, 420), nu=1.5, sigma=0.5)

    def test_frozen(self):
        s = build_schedule(spiral_levels(144))
        assert isinstance(s, LevelSchedule)
        with pytest.raises(AttributeError):
            s.nu = 3.0


class TestMultilevel:
    def test_one_level_is_qi(self):
        s = build_schedule(spiral_levels(900), nu=1.5)
        ml = multilevel_approximate(s, franke, WEND)
        k = make_kernel(WEND, s.rhos[0])
        pts = s.levels[0].sites
        x = random_points(100, 2, 1).points
        np.testing.assert_allclose(ml(x), qi_qmc(pts, franke(pts.points), k)(x), atol=1e-14)

    def test_zero_function(self):
        s = build_schedule(spiral_levels(144, 576), nu=2.0)
        ml = multilevel_approximate(s, lambda x: np.zeros(len(x)), WEND)
        assert np.all(ml(random_points(40, 2, 0).points) == 0.0)

    def test_callback_and_partial(self):
        seen = []
        s = build_schedule(spiral_levels(144, 576, 2304), nu=2.0)
        ml = multilevel_approximate(s, franke, WEND, on_level=lambda j, m: seen.append((j, len(m))))
        assert seen == [(1, 1), (2, 2), (3, 3)]
        x = random_points(20, 2, 4).points
        np.testing.assert_allclose(ml.partial(1)(x), ml.corrections[0](x))

    def test_clean_franke_decreases(self):
        s = build_schedule(spiral_levels(144, 576, 2304, 9216), nu=3.0)
        ml = multilevel_approximate(s, franke, WEND)
        errs = [l2_error(ml.partial(j), franke) for j in range(1, 5)]
        assert all(b < a for a, b in zip(errs, errs[1:]))

    def test_telescoping(self):
        s = build_schedule(spiral_levels(144, 576, 2304), nu=3.0)
        ml = multilevel_approximate(s, franke, WEND)
        assert ml.telescoping_defect() < 1e-12
        x = s.levels[-1].sites.points
        e = ml.error_recursion(x, franke(x))
        np.testing.assert_allclose(ml(x) + e, franke(x), atol=1e-12)

    def test_telescoping_needs_levels(self):
        from sphqi.multilevel import MultilevelApproximant
        with pytest.raises(ValueError):
            MultilevelApproximant(build_schedule(spiral_levels(144))).telescoping_defect()

    def test_noise_drawn_once_per_level(self):
        s = build_schedule(spiral_levels(144, 576), nu=2.0)
        noise = NoiseModel(level=0.1, seed=5)
        a = multilevel_approximate(s, franke, WEND, noise)
        b = multilevel_approximate(s, franke, WEND, noise)
        for ra, rb in zip(a.records, b.records):
            np.testing.assert_array_equal(ra.samples, rb.samples)
        # levels use different draws
        d0 = a.records[0].samples - franke(s.levels[0].sites.points)
        d1 = a.records[1].samples[:144] - franke(s.levels[1].sites.points[:144])
        assert not np.allclose(d0, d1)
        assert a.corrections[0].kind.value == "noisy"


class TestExpandedForm:
    @pytest.mark.parametrize("ns", [(144, 576), (144, 576, 2304)])
    def test_matches_recursion(self, ns):
        s = build_schedule(spiral_levels(*ns), nu=3.0)
        rep = expand_operators(s, harmonic(3, 2), WEND, n_points=30)
        assert rep["levels"] == len(ns)
        assert rep["m_diff"] < 1e-10
        assert rep["e_diff"] < 1e-10
        assert rep["e_vs_f_minus_m"] < 1e-10

    def test_limit(self):
        s = build_schedule(spiral_levels(100, 200, 400, 800, 1600), nu=1.5)
        with pytest.raises(ValueError):
            expand_operators(s, franke, WEND)
