import numpy as np
import pytest

from nkpc_policy.analysis.robustness_lab import (STRESS_CSV_COLUMNS, compensating_kappa,
                                                 misspecification_stress, misspecified_path,
                                                 write_stress_csv)
from nkpc_policy.models.data_structures import (FeedbackClass, InstrumentConvention, KappaFormula,
                                                PolicyRule, SolverMode)
from nkpc_policy.models.errors import InvalidParams
from nkpc_policy.solvers.policy_solvers import solve

FORWARD_RULE = PolicyRule(f_pi=-6.0, convention=InstrumentConvention.forward_looking)


class TestCompensatingKappa:

    def test_recovers_nominal_kappa(self, table2_params) -> None:
        g = solve(table2_params, 'discretion').g
        kappa = compensating_kappa(-6.0, g, table2_params.rho, table2_params.beta)
        assert kappa == pytest.approx(table2_params.kappa, rel=1e-12)

    def test_printed_variant_has_opposite_sign(self, table2_params) -> None:
        g = solve(table2_params, 'discretion').g
        corrected = compensating_kappa(-6.0, g, 0.8, 0.99)
        printed = compensating_kappa(-6.0, g, 0.8, 0.99, KappaFormula.printed)
        assert printed == pytest.approx(-corrected)

    def test_degenerate_inputs(self) -> None:
        with pytest.raises(InvalidParams) as excinfo:
            compensating_kappa(0.0, 0.0, 0.8, 0.99)
        assert len(excinfo.value.violations) == 2


class TestMisspecifiedPath:

    def test_compensated_forward_solution_stays_on_projection(self, table2_params) -> None:
        solution = solve(table2_params, 'forward', FORWARD_RULE)
        for drho in (-0.01, 0.005, 0.01):
            rho = table2_params.rho + drho
            kappa = compensating_kappa(-6.0, solution.g, rho, table2_params.beta)
            true_params = table2_params.replace(rho=rho, kappa=kappa)
            path = misspecified_path(true_params, solution, table2_params, horizon=20)
            assert np.nanmax(path.gap) <= 1e-8

    def test_uncompensated_gap_grows_at_unstable_root(self, table2_params) -> None:
        solution = solve(table2_params, 'discretion')
        true_params = table2_params.replace(kappa=table2_params.kappa + 0.01)
        path = misspecified_path(true_params, solution, table2_params, horizon=30)
        assert path.lambda_sr == pytest.approx((1 + 6 * 0.1375) / 0.99)
        assert path.gap[-1] / path.gap[-2] == pytest.approx(path.lambda_sr, rel=0.01)

    def test_off_manifold_gap_grows_monotonically(self, table2_params) -> None:
        solution = solve(table2_params, 'discretion')
        true_params = table2_params.replace(kappa=table2_params.kappa + 0.01)
        gap = misspecified_path(true_params, solution, table2_params, horizon=30).gap
        assert gap[0] == 0.0
        assert np.all(np.diff(gap) > 0)

    def test_predetermined_path_starts_at_anchored_shock(self, table2_params) -> None:
        solution = solve(table2_params, 'predetermined', PolicyRule(f_pi=2.0, f_z=-1.0),
                         x0=0.5, z0=2.0)
        path = misspecified_path(table2_params, solution, table2_params, horizon=10)
        assert (path.pi[0], path.z[0]) == (solution.pi0, 2.0)
        assert np.nanmax(path.gap) <= 1e-12

    def test_threshold_stops_propagation(self, table2_params) -> None:
        solution = solve(table2_params, 'discretion')
        true_params = table2_params.replace(kappa=0.14)
        path = misspecified_path(true_params, solution, table2_params, horizon=200, threshold=1.0)
        last = int(np.flatnonzero(~np.isnan(path.gap))[-1])
        assert path.gap[last] > 1.0
        assert np.all(path.gap[:last] <= 1.0)
        assert np.isnan(path.pi[last + 1:]).all()

    def test_ramsey_rule_stays_bounded(self, table2_params) -> None:
        solution = solve(table2_params, 'ramsey')
        true_params = table2_params.replace(kappa=0.1375, rho=0.81)
        path = misspecified_path(true_params, solution, table2_params, horizon=200)
        assert abs(path.lambda_sr) < 1
        assert np.nanmax(path.gap) < 1.0
        assert path.gap[-1] < 1e-6


class TestStress:

    def test_ramsey_is_robust(self, table2_params) -> None:
        report = misspecification_stress(table2_params, solve(table2_params, 'ramsey'), 0.01, 3, 200)
        assert report.stable_fraction == 1.0
        assert report.regime == FeedbackClass.negative_feedback
        assert len(report.points) == 27
        assert not all(p.valid for p in report.points)

    def test_predetermined_rule_is_robust(self, table2_params) -> None:
        solution = solve(table2_params, 'predetermined', PolicyRule(f_pi=2.0), x0=1.0)
        report = misspecification_stress(table2_params, solution, 0.01, 3, 200)
        assert report.stable_fraction == 1.0

    def test_predetermined_threshold_scales_with_shock(self, table2_params) -> None:
        solution = solve(table2_params, 'predetermined', PolicyRule(f_pi=2.0, f_z=-1.0),
                         x0=0.5, z0=2.0)
        report = misspecification_stress(table2_params, solution, 0.01, 3, 200)
        assert report.threshold == pytest.approx(10 * 1.25)
        assert report.stable_fraction == 1.0

    @pytest.mark.parametrize('mode', [SolverMode.discretion, SolverMode.forward])
    def test_forward_solution_is_fragile(self, table2_params, mode) -> None:
        rule = FORWARD_RULE if mode == SolverMode.forward else None
        report = misspecification_stress(table2_params, solve(table2_params, mode, rule), 0.01, 3, 200)
        assert report.regime == FeedbackClass.positive_feedback
        off_manifold = [p for p in report.points if p.valid and not p.on_manifold]
        assert off_manifold
        for point in off_manifold:
            assert point.diverged
            assert point.growth_ratio == pytest.approx(abs(point.lambda_sr), rel=0.01)
        origin = next(p for p in report.points if (p.dbeta, p.dkappa, p.drho) == (0.0, 0.0, 0.0))
        assert origin.on_manifold and not origin.diverged
        assert report.stable_fraction == pytest.approx(1 / sum(p.valid for p in report.points))

    def test_zero_radius_is_a_single_point(self, table2_params) -> None:
        report = misspecification_stress(table2_params, solve(table2_params, 'discretion'), 0.0, 5, 50)
        assert report.perturbation_grid == [(0.0, 0.0, 0.0)]
        assert report.divergence_horizon == [None]
        assert report.stable_fraction == 1.0

    def test_invalid_arguments(self, table2_params) -> None:
        with pytest.raises(InvalidParams) as excinfo:
            misspecification_stress(table2_params, solve(table2_params, 'ramsey'), -1.0, 0, 1, -2.0)
        assert len(excinfo.value.violations) == 4

    def test_csv(self, table2_params, tmp_path) -> None:
        report = misspecification_stress(table2_params, solve(table2_params, 'discretion'), 0.01, 3, 200)
        output = tmp_path / 'stress.csv'
        text = write_stress_csv(report, output)
        lines = text.splitlines()
        assert lines[0] == ','.join(STRESS_CSV_COLUMNS)
        assert len(lines) == 28
        assert output.read_text() == text
