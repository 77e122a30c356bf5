import logging

import pytest

from nkpc_policy.lre_core.linear_system import controllability_rank, eigenvalues, is_stabilizable
from nkpc_policy.mechanism.nkpc import build_open_loop, close_loop, closed_loop_inflation_eigenvalue
from nkpc_policy.models.data_structures import InstrumentConvention, ModelParams, PolicyRule
from nkpc_policy.models.errors import IdentificationError, InvalidParams
from tests.conftest import draw_params


class TestModelParams:

    def test_collects_every_violation(self) -> None:
        with pytest.raises(InvalidParams) as excinfo:
            ModelParams(beta=1.2, kappa=-1.0, rho=0.8, epsilon=1.0)
        messages = ' '.join(excinfo.value.violations)
        assert 'beta must lie in (0,1)' in messages
        assert 'kappa' in messages
        assert 'epsilon must exceed 1' in messages
        assert len(excinfo.value.violations) == 3

    def test_q_zero_is_rejected(self) -> None:
        with pytest.raises(InvalidParams, match='q must lie'):
            ModelParams(beta=0.99, kappa=0.1275, rho=0.8, epsilon=6.0, q=0.0)

    def test_replace_revalidates(self, table2_params) -> None:
        assert table2_params.replace(kappa=0.2).kappa == 0.2
        with pytest.raises(InvalidParams):
            table2_params.replace(beta=1.0)

    def test_derived_quantities(self, table2_params) -> None:
        assert table2_params.alpha == pytest.approx(0.1275 / 6)
        assert table2_params.replace(q=0.5).credibility_discount == pytest.approx(0.495)


class TestOpenLoop:

    def test_kalman_canonical_form(self, table2_params) -> None:
        system = build_open_loop(table2_params)
        beta = table2_params.beta
        assert system.transition.tolist() == [[1 / beta, -1 / beta], [0.0, 0.8]]
        assert system.impact[:, 0].tolist() == [-0.1275 / beta, 0.0]
        assert (system.n_predetermined, system.m_nonpredetermined) == (1, 1)
        assert system.labels == ('pi', 'z')


class TestCloseLoop:

    def test_ramsey_rule_transition(self, table2_params) -> None:
        rule = PolicyRule(f_pi=4.5108, f_z=-6.8335)
        closed = close_loop(table2_params, rule)
        transition = closed.base.transition
        assert transition[0, 0] == pytest.approx(0.43, abs=0.005)
        assert transition[0, 1] == pytest.approx(-0.13, abs=0.005)
        assert transition[1, 0] == 0.0
        assert transition[1, 1] == 0.8

    def test_forward_rule_transition(self, table2_params) -> None:
        rule = PolicyRule(f_pi=-6.0, convention=InstrumentConvention.forward_looking)
        closed = close_loop(table2_params, rule)
        assert closed.lambda_sr == pytest.approx(1.78, abs=0.005)
        assert closed.base.transition[0, 1] == pytest.approx(-1.01, abs=0.005)
        assert (closed.base.n_predetermined, closed.base.m_nonpredetermined) == (1, 1)

    def test_predetermined_instrument_leaves_no_jump_variable(self, table2_params) -> None:
        closed = close_loop(table2_params, PolicyRule(f_pi=2.0))
        assert (closed.base.n_predetermined, closed.base.m_nonpredetermined) == (2, 0)

    def test_discount_enters_the_root(self, table2_params) -> None:
        params = table2_params.replace(q=0.5)
        lam = closed_loop_inflation_eigenvalue(params, 2.0, params.credibility_discount)
        assert lam == pytest.approx((1 - 0.1275 * 2.0) / 0.495)
        closed = close_loop(params, PolicyRule(f_pi=2.0, f_z=1.0), params.credibility_discount)
        assert closed.base.transition[0, 1] == pytest.approx((-1 - 0.1275) / 0.495)

    def test_zero_feedback_warns(self, table2_params, caplog) -> None:
        with caplog.at_level(logging.WARNING):
            closed = close_loop(table2_params, PolicyRule(f_pi=0.0))
        assert 'cannot anchor' in caplog.text
        assert closed.lambda_sr == pytest.approx(1 / 0.99)

    def test_forward_instrument_cannot_respond_to_shock(self) -> None:
        with pytest.raises(IdentificationError):
            PolicyRule(f_pi=-6.0, f_z=1.0, convention=InstrumentConvention.forward_looking)


class TestRandomCalibrations:

    def test_open_loop_has_rank_one_and_is_stabilizable(self, rng) -> None:
        for _ in range(200):
            system = build_open_loop(draw_params(rng))
            assert controllability_rank(system.transition, system.impact) == 1
            assert is_stabilizable(system)

    def test_closed_loop_spectrum(self, rng) -> None:
        for _ in range(200):
            params = draw_params(rng)
            convention = InstrumentConvention(rng.choice([c.value for c in InstrumentConvention]))
            f_z = rng.uniform(-10, 10) if convention == InstrumentConvention.predetermined else 0.0
            rule = PolicyRule(f_pi=rng.uniform(-20, 30), f_z=f_z, convention=convention)
            closed = close_loop(params, rule)
            report = eigenvalues(closed.base)
            assert sorted(ev.real for ev in report.eigenvalues) == pytest.approx(
                sorted([closed.lambda_sr, params.rho]), abs=1e-12)
            assert all(ev.imag == 0 for ev in report.eigenvalues)

    def test_zero_rule_reproduces_open_loop(self, rng) -> None:
        for _ in range(20):
            params = draw_params(rng)
            closed = close_loop(params, PolicyRule(f_pi=0.0, f_z=0.0))
            assert closed.base.transition.tolist() == build_open_loop(params).transition.tolist()
