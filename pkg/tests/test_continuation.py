import numpy as np
import pytest

import momentmap as mm
from momentmap.continuation import CONVERGED, DIVERGED, INFEASIBLE

from conftest import random_factor


@pytest.fixture(scope="module")
def round_trips(identity_problem, basis):
    out = []
    for seed in range(10):
        lam_true = mm.lambda_from_factor(random_factor(np.random.default_rng(1000 + seed)), basis)
        target = mm.h_map(identity_problem, lam_true)
        out.append((lam_true, target, mm.continuation_solve(target, np.eye(4), identity_problem)))
    return out


@pytest.fixture(scope="module")
def scenario_trace(scenario_problem, lam0, lam1):
    return mm.continuation_solve(mm.h_map(scenario_problem, lam1), lam0, scenario_problem)


class TestRoundTrips:
    def test_all_converge_to_truth(self, round_trips):
        for lam_true, _, trace in round_trips:
            assert trace.converged, trace.message
            assert np.linalg.norm(trace.solution.matrix - lam_true.matrix) < 1e-6

    def test_residual_contract(self, round_trips):
        for _, target, trace in round_trips:
            assert trace.final_residual < 1e-8 * np.linalg.norm(target)

    def test_t_strictly_increasing(self, round_trips):
        for _, _, trace in round_trips:
            ts = [s.t for s in trace.steps]
            assert np.all(np.diff(ts) > 0) and ts[-1] == 1.0

    def test_newton_is_quadratic(self, round_trips):
        for _, _, trace in round_trips:
            for step in trace.steps:
                r = step.corrector_residuals
                if len(r) >= 3:
                    assert r[-1] / r[-2] < 0.3
                    # once in the basin the error exponent roughly doubles
                    assert r[-1] <= 10 * r[-2] ** 2 / r[-3] + 1e-14


def test_zero_steps_when_target_is_start_image(scenario_problem, lam0):
    trace = mm.continuation_solve(mm.h_map(scenario_problem, lam0), lam0, scenario_problem)
    assert trace.converged and trace.steps == []
    np.testing.assert_array_equal(trace.solution.matrix, lam0.matrix)


class TestScenarioInstance:
    def test_outcome_is_reported(self, scenario_trace, scenario_problem, lam1):
        assert scenario_trace.status in (CONVERGED, DIVERGED)
        if scenario_trace.converged:
            residual = np.linalg.norm(mm.h_map(scenario_problem, scenario_trace.solution)
                                      - mm.h_map(scenario_problem, lam1))
            assert residual < 1e-8 * np.linalg.norm(mm.h_map(scenario_problem, lam1))
        else:
            assert scenario_trace.message
            assert scenario_trace.solution is None
            assert 0 < scenario_trace.last_t < 1

    def test_condition_guard_respected(self, scenario_trace):
        assert all(s.cond <= 1e10 for s in scenario_trace.steps)


def test_condition_guard(identity_problem, basis, lam1):
    target = mm.h_map(identity_problem, lam1)
    opts = mm.ContinuationOptions(cond_max=1.0)
    trace = mm.continuation_solve(target, np.eye(4), identity_problem, opts)
    assert trace.status == DIVERGED and "condition" in trace.message
    assert trace.steps == []


class TestTargetValidation:
    def test_not_symmetric(self, identity_problem):
        X = np.eye(4)
        X[0, 1] = 0.3
        with pytest.raises(ValueError, match="symmetric"):
            mm.continuation_solve(X, np.eye(4), identity_problem)

    def test_not_positive(self, identity_problem):
        with pytest.raises(ValueError, match="positive"):
            mm.continuation_solve(-np.eye(4), np.eye(4), identity_problem)

    def test_not_in_range(self, identity_problem):
        with pytest.raises(ValueError, match="range"):
            mm.continuation_solve(np.diag([1.0, 1.0, 2.0, 2.0]), np.eye(4), identity_problem)


class TestOdeMode:
    def test_scalar_prior(self, identity_problem, lam1):
        target = mm.h_map(identity_problem, lam1)
        trace = mm.ode_solve(target, np.eye(4), identity_problem)
        assert trace.status in (CONVERGED, mm.continuation.APPROXIMATE)
        assert np.linalg.norm(trace.solution.matrix - lam1.matrix) < 1e-4

    @pytest.mark.slow
    def test_scenario_instance_stops(self, scenario_problem, lam0, lam1):
        trace = mm.ode_solve(mm.h_map(scenario_problem, lam1), lam0, scenario_problem)
        assert trace.status in (DIVERGED, INFEASIBLE, mm.continuation.APPROXIMATE)
        assert trace.last_t < 1
