import pytest

from nkpc_policy.data_logic.reports import TABLE2_PUBLISHED, PolicyReports


class TestPolicyReports:

    def test_defaults_to_calibration(self) -> None:
        params = PolicyReports().params
        assert (params.beta, params.kappa, params.rho, params.epsilon) == (0.99, 0.1275, 0.8, 6.0)

    def test_table2_reproduction_passes(self) -> None:
        frame = PolicyReports().table2_reproduction()
        assert len(frame) == len(TABLE2_PUBLISHED)
        assert frame['passed'].all()
        discretion = frame.set_index('quantity').loc['discretion f_pi']
        assert discretion['abs_diff'] == 0.0

    def test_table2_fails_for_other_calibration(self, table2_params) -> None:
        frame = PolicyReports(table2_params.replace(kappa=0.3)).table2_reproduction()
        assert not frame['passed'].all()

    def test_classification_table(self, table2_params) -> None:
        table = PolicyReports(table2_params).classification_table(4.51).set_index('quantity')['value']
        assert table['feedback'] == 'negative_feedback'
        assert table['determinacy predetermined'] == 'determinate'
        assert table['determinacy forward_looking'] == 'indeterminate'
        assert table['D_NF lower'] == pytest.approx(0.0784, abs=1e-3)
