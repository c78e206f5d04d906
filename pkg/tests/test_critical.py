import math

import numpy as np
import pytest

import momentmap as mm
from momentmap.critical import bisect_sign_change, max_bisection_steps, numerical_rank

from conftest import random_factor

CRITICAL_L0 = [[4.3901, 0.6713], [0.6713, 0.5589]]
CRITICAL_L1 = [[-1.5930, -1.3940], [0.7793, -0.1155]]


class TestSegmentPath:
    def test_endpoints(self, scenario_path, lam0, lam1):
        np.testing.assert_array_equal(scenario_path.at(0.0).matrix, lam0.matrix)
        np.testing.assert_allclose(scenario_path.at(1.0).matrix, lam1.matrix, atol=1e-14)

    def test_direction(self, scenario_path, lam0, lam1):
        np.testing.assert_allclose(scenario_path.direction.coords, lam1.coords - lam0.coords)


class TestDetScan:
    def test_scenario_path(self, scenario_problem, scenario_path):
        scan = mm.det_scan(scenario_path, 11, scenario_problem)
        assert scan.dets[0] == pytest.approx(10.6871, rel=5e-3)
        assert scan.dets[-1] == pytest.approx(-326.6439, rel=5e-3)
        assert scan.brackets == [(0.0, 0.1)]
        assert len(scan.rows()) == 11

    def test_constant_path(self, scenario_problem, lam0):
        scan = mm.det_scan(mm.SegmentPath(lam0, lam0), 5, scenario_problem)
        assert np.all(scan.dets == scan.dets[0])
        assert scan.brackets == []

    @pytest.mark.parametrize("seed", range(2))
    def test_scalar_prior_has_no_bracket(self, identity_problem, basis, seed):
        rng = np.random.default_rng(seed + 40)
        a = mm.lambda_from_factor(random_factor(rng), basis)
        b = mm.lambda_from_factor(random_factor(rng), basis)
        scan = mm.det_scan(mm.SegmentPath(a, b), 6, identity_problem)
        # negative definite 7x7 Jacobian: det < 0 everywhere
        assert np.all(scan.dets < 0) and scan.brackets == []

    def test_infeasible_point_reports_t(self, scenario_problem, lam0):
        path = mm.SegmentPath(lam0, -1.0 * lam0)
        with pytest.raises(mm.InfeasibleLambdaError) as info:
            mm.det_scan(path, 3, scenario_problem)
        assert info.value.t == 0.5

    def test_needs_two_samples(self, scenario_problem, scenario_path):
        with pytest.raises(ValueError):
            mm.det_scan(scenario_path, 1, scenario_problem)


class TestBisection:
    def test_linear_function(self):
        lo, hi, it = bisect_sign_change(lambda t: t - 0.25, 0.0, 1.0, 1e-8)
        assert hi - lo <= 1e-8 and lo <= 0.25 <= hi
        assert it <= max_bisection_steps(0.0, 1.0, 1e-8)

    def test_exact_midpoint_hit(self):
        lo, hi, it = bisect_sign_change(lambda t: t - 0.5, 0.0, 1.0, 1e-8)
        assert lo == hi == 0.5 and it == 1

    def test_midpoints_stay_nested(self):
        visited = []

        def f(t):
            visited.append(t)
            return math.cos(3 * t)

        lo, hi, it = bisect_sign_change(f, 0.0, 1.0, 1e-6)
        steps = np.abs(np.diff(visited[2:]))
        assert np.all(steps[1:] <= steps[:-1] + 1e-15)
        assert lo <= math.pi / 6 <= hi
        assert it <= math.ceil(math.log2(1 / 1e-6))

    def test_no_sign_change(self):
        with pytest.raises(mm.NoSignChangeError, match="no sign change"):
            bisect_sign_change(lambda t: 1 + t, 0.0, 1.0)

    def test_numerical_rank(self):
        assert numerical_rank(np.array([3.0, 1.0, 1e-9])) == 2
        assert numerical_rank(np.array([3.0, 1.0, 1e-7])) == 3
        assert numerical_rank(np.zeros(3)) == 0


class TestScenarioCriticalPoint:
    def test_location(self, scenario_critical):
        assert scenario_critical.t_c == pytest.approx(0.0459, abs=5e-4)
        assert scenario_critical.bracket[1] - scenario_critical.bracket[0] <= 1e-8
        assert scenario_critical.iterations <= max_bisection_steps(0.0, 0.1, 1e-8)

    def test_blocks(self, scenario_critical):
        L0, L1 = scenario_critical.lambda_c.blocks(2)
        np.testing.assert_allclose(L0, CRITICAL_L0, atol=5e-3)
        np.testing.assert_allclose(L1, CRITICAL_L1, atol=5e-3)

    def test_singular_values(self, scenario_critical):
        s = scenario_critical.singular_values
        assert s[-1] < 1e-8 * s[0]
        assert s[-2] == pytest.approx(0.0573, rel=0.05)
        assert scenario_critical.rank_deficiency == 1

    def test_determinant_vanishes(self, scenario_critical):
        assert abs(scenario_critical.det_at_c) < 1e-6 * 326.6439

    def test_find_critical_points(self, scenario_problem, scenario_path, scenario_critical):
        scan, found = mm.find_critical_points(scenario_path, scenario_problem)
        assert len(found) == 1
        assert found[0].t_c == scenario_critical.t_c
