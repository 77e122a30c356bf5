"""Expected impulse responses, seeded simulation and the commitment recursion"""

import numpy as np
import pytest

from nkpc_policy.mechanism.nkpc import close_loop
from nkpc_policy.models.data_structures import (InstrumentConvention, PolicyRule, PolicySolution,
                                                SolverMode)
from nkpc_policy.models.errors import InvalidParams
from nkpc_policy.simulation.irf_engine import (expected_irf, foc_recursion_check, simulate,
                                               simulate_batch, write_path_csv)
from nkpc_policy.solvers.policy_solvers import solve
from tests.conftest import draw_params

FORWARD_RULE = PolicyRule(f_pi=-6.0, convention=InstrumentConvention.forward_looking)


def _transition(params, solution: PolicySolution) -> np.ndarray:
    return close_loop(params, solution.rule, solution.discount).base.transition


class TestExpectedIRF:

    def test_ramsey_initial_vector(self, table2_params) -> None:
        path = expected_irf(table2_params, 'ramsey', z0=1.0, horizon=40)
        assert path.horizon == 40 and len(path.pi) == 40
        assert path.pi[0] == pytest.approx(0.65, abs=0.005)
        assert path.x[0] == pytest.approx(-3.90, abs=0.01)
        assert path.z[1] == pytest.approx(0.8)
        assert abs(path.pi[-1]) < 1e-3

    def test_ramsey_first_step(self, table2_params) -> None:
        path = expected_irf(table2_params, 'ramsey', z0=1.0, horizon=2)
        transition = _transition(table2_params, solve(table2_params, 'ramsey'))
        assert path.z[1] == pytest.approx(0.8)
        assert path.pi[1] == pytest.approx(transition[0, 0] * path.pi[0] + transition[0, 1])
        assert path.pi[1] == pytest.approx(0.1495, abs=1e-3)

    def test_zero_shock_is_the_steady_state(self, table2_params) -> None:
        path = expected_irf(table2_params, 'predetermined', PolicyRule(f_pi=2.0, f_z=-1.0),
                            z0=0.0, x0=0.0, horizon=10)
        assert set(path.pi) == set(path.x) == set(path.z) == {0.0}

    def test_discretion_stays_on_projection(self, table2_params) -> None:
        path = expected_irf(table2_params, SolverMode.discretion, z0=2.0, horizon=30)
        g = solve(table2_params, 'discretion').g
        assert np.allclose(path.pi, g * np.asarray(path.z), rtol=1e-6)
        assert path.rule.f_pi == -6.0

    def test_forward_with_solution(self, table2_params) -> None:
        solution = solve(table2_params, 'forward', FORWARD_RULE)
        path = expected_irf(table2_params, 'forward', solution, horizon=5)
        assert path.pi[0] == pytest.approx(solution.g)

    def test_predetermined_anchors_inflation(self, table2_params) -> None:
        path = expected_irf(table2_params, 'predetermined', PolicyRule(f_pi=2.0, f_z=-1.0),
                            z0=1.0, x0=1.0, horizon=3)
        assert path.pi[0] == pytest.approx(1.0)
        assert path.x[0] == pytest.approx(1.0)

    def test_predetermined_needs_x0(self, table2_params) -> None:
        with pytest.raises(InvalidParams):
            expected_irf(table2_params, 'predetermined', PolicyRule(f_pi=2.0))

    def test_zero_horizon_is_rejected(self, table2_params) -> None:
        with pytest.raises(InvalidParams):
            expected_irf(table2_params, 'ramsey', horizon=0)

    def test_single_period(self, table2_params) -> None:
        path = expected_irf(table2_params, 'ramsey', horizon=1)
        assert path.z == (1.0,)
        assert foc_recursion_check(path, table2_params) == 0.0

    def test_ramsey_ignores_given_x0(self, table2_params, caplog) -> None:
        path = expected_irf(table2_params, 'ramsey', x0=5.0, horizon=2)
        assert path.x[0] == pytest.approx(-3.90, abs=0.01)
        assert 'ignoring x0' in caplog.text


class TestMatrixPowers:

    @pytest.mark.parametrize('mode,rule,x0', [
        (SolverMode.ramsey, None, None),
        (SolverMode.predetermined, PolicyRule(f_pi=2.0, f_z=-1.0), 0.5),
    ])
    def test_recursion_equals_matrix_power(self, table2_params, mode, rule, x0) -> None:
        path = expected_irf(table2_params, mode, rule, z0=1.0, x0=x0, horizon=101)
        transition = _transition(table2_params, solve(table2_params, mode, rule, x0))
        initial = np.array([path.pi[0], path.z[0]])
        for t in range(101):
            pi_t, z_t = np.linalg.matrix_power(transition, t) @ initial
            assert path.pi[t] == pytest.approx(pi_t, abs=1e-10)
            assert path.z[t] == pytest.approx(z_t, abs=1e-10)

    @pytest.mark.parametrize('mode,rule,x0', [
        (SolverMode.ramsey, None, None),
        (SolverMode.predetermined, PolicyRule(f_pi=2.0, f_z=-1.0), 0.5),
        (SolverMode.predetermined, PolicyRule(f_pi=10.0), 1.0),
    ])
    def test_geometric_decay(self, table2_params, mode, rule, x0) -> None:
        """pi_t = A*lambda^t + B*rho^t, so |pi_t| <= (|A| + |B|)*max(|lambda|, rho)^t."""
        path = expected_irf(table2_params, mode, rule, z0=1.0, x0=x0, horizon=100)
        (lam, c), (_, rho) = _transition(table2_params, solve(table2_params, mode, rule, x0))
        b = c / (rho - lam)
        bound = abs(path.pi[0] - b) + abs(b)
        rate = max(abs(lam), rho)
        assert rate < 1
        for t, pi_t in enumerate(path.pi):
            assert abs(pi_t) <= bound * rate ** t * (1 + 1e-9) + 1e-15


class TestCommitmentRecursion:

    def test_ramsey_paths_satisfy_recursion(self, rng) -> None:
        for _ in range(100):
            params = draw_params(rng)
            path = expected_irf(params, 'ramsey', horizon=40)
            assert foc_recursion_check(path, params) <= 1e-8

    def test_discretion_violates_recursion(self, table2_params) -> None:
        path = expected_irf(table2_params, 'discretion', horizon=40)
        assert foc_recursion_check(path, table2_params, strict=False) > 0.01
        with pytest.raises(InvalidParams):
            foc_recursion_check(path, table2_params)


class TestSimulation:

    def test_zero_volatility_returns_expected_path(self, table2_params) -> None:
        params = table2_params.replace(sigma_eps=0.0)
        simulated = simulate(params, 'ramsey', horizon=20, seed=7)
        expected = expected_irf(params, 'ramsey', horizon=20)
        assert simulated.pi == expected.pi and simulated.x == expected.x
        assert simulated.seed == 7

    def test_same_seed_same_path(self, table2_params) -> None:
        first = simulate(table2_params, 'ramsey', horizon=20, seed=42)
        second = simulate(table2_params, 'ramsey', horizon=20, seed=42)
        other = simulate(table2_params, 'ramsey', horizon=20, seed=43)
        assert first == second
        assert first.z != other.z
        assert write_path_csv(first) == write_path_csv(second)

    def test_forward_regime_stays_on_projection(self, table2_params) -> None:
        path = simulate(table2_params, 'forward', FORWARD_RULE, horizon=30, seed=3)
        g = solve(table2_params, 'forward', FORWARD_RULE).g
        assert np.allclose(path.pi, g * np.asarray(path.z))

    def test_stochastic_ramsey_keeps_recursion(self, table2_params) -> None:
        path = simulate(table2_params, 'ramsey', horizon=30, seed=11)
        assert foc_recursion_check(path, table2_params) <= 1e-8

    def test_batch_rows_are_reproducible(self, table2_params) -> None:
        first = simulate_batch(table2_params, 'ramsey', horizon=8, n_paths=10, seed=5)
        second = simulate_batch(table2_params, 'ramsey', horizon=8, n_paths=10, seed=5)
        assert first.pi.shape == (10, 8)
        assert np.array_equal(first.pi, second.pi)

    def test_monte_carlo_mean_matches_expected_path(self, table2_params) -> None:
        n_paths = 100_000
        batch = simulate_batch(table2_params, 'ramsey', horizon=8, n_paths=n_paths, seed=20240611)
        expected = np.asarray(expected_irf(table2_params, 'ramsey', horizon=8).pi)
        # every path starts from the same initial vector
        assert np.all(batch.pi[:, 0] == expected[0])
        mean = batch.pi[:, 1:].mean(axis=0)
        standard_error = batch.pi[:, 1:].std(axis=0, ddof=1) / np.sqrt(n_paths)
        assert np.all(np.abs(mean - expected[1:]) <= 3 * standard_error)

    def test_batch_needs_paths(self, table2_params) -> None:
        with pytest.raises(InvalidParams):
            simulate_batch(table2_params, 'ramsey', n_paths=0)


class TestPathCSV:

    def test_header_and_line_endings(self, table2_params, tmp_path) -> None:
        path = expected_irf(table2_params, 'ramsey', horizon=3)
        output = tmp_path / 'irf.csv'
        text = write_path_csv(path, output)
        assert text.splitlines()[0] == 't,pi,x,z'
        assert '\r' not in text and text.endswith('\n')
        assert len(text.splitlines()) == 4
        assert output.read_text() == text
