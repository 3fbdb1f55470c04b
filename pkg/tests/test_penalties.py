import numpy as np
import pytest

from gapshrink.errors import DimensionError, UnsupportedPenaltyError
from gapshrink.penalties import (
    GeneralizedL1,
    GroupL2,
    Halfspace,
    L1,
    NormBall,
    Nuclear,
    Quadratic,
    Sum,
    conjugate_value,
    halfspace_support,
    operator_norm,
    penalty_value,
    support_function,
)


class TestPenaltyValue:
    def test_l1(self):
        assert penalty_value(L1(2.0), [1.0, -1.0]) == 4.0

    def test_generalized_l1_fused_pair(self):
        spec = GeneralizedL1([[1.0, -1.0]], 1.0)
        assert penalty_value(spec, [0.5, 0.5]) == 0.0
        assert penalty_value(spec, [1.0, 0.0]) == 1.0

    def test_ball_indicator(self):
        ball = NormBall("l1", 1.0)
        assert penalty_value(ball, [0.8, 0.5]) == np.inf
        assert penalty_value(ball, [0.5, 0.5]) == 0.0

    def test_group_l2_indicator(self):
        spec = GroupL2(((0, 1), (2,)), (1.0, 2.0))
        assert penalty_value(spec, [0.6, 0.6, 0.0]) == 0.0
        assert penalty_value(spec, [1.0, 1.0, 0.0]) == np.inf

    def test_quadratic(self):
        spec = Quadratic(np.diag([2.0, 4.0]))
        assert penalty_value(spec, [1.0, 1.0]) == pytest.approx(3.0)

    def test_nuclear_is_singular_value_sum(self):
        spec = Nuclear(2.0, (2, 2))
        assert penalty_value(spec, np.diag([3.0, 1.0])) == pytest.approx(8.0)

    def test_sum_adds_parts_and_propagates_inf(self):
        spec = Sum((L1(1.0), NormBall("linf", 1.0)))
        assert penalty_value(spec, [0.5, -0.5]) == pytest.approx(1.0)
        assert penalty_value(spec, [2.0, 0.0]) == np.inf

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            penalty_value(Quadratic(np.eye(2)), [1.0, 2.0, 3.0])
        with pytest.raises(DimensionError):
            penalty_value(Nuclear(1.0, (2, 3)), np.zeros((3, 2)))


class TestConjugate:
    def test_l1_box(self):
        assert conjugate_value(L1(2.0), [2.0, 0.0]) == 0.0
        assert conjugate_value(L1(2.0), [3.0, 0.0]) == np.inf

    def test_quadratic(self):
        assert conjugate_value(Quadratic(np.eye(2)), [2.0, 0.0]) == pytest.approx(2.0)

    def test_ball_gives_support(self):
        assert conjugate_value(NormBall("l1", 1.0), [3.0, -1.0]) == pytest.approx(3.0)

    def test_nuclear_operator_ball(self):
        spec = Nuclear(2.0, (2, 2))
        assert conjugate_value(spec, np.diag([2.0, 1.0])) == 0.0
        assert conjugate_value(spec, np.diag([2.5, 0.0])) == np.inf

    def test_sum_unsupported(self):
        with pytest.raises(UnsupportedPenaltyError):
            conjugate_value(Sum((L1(1.0), L1(1.0))), [0.0, 0.0])

    def test_generalized_l1_unsupported(self):
        with pytest.raises(UnsupportedPenaltyError):
            conjugate_value(GeneralizedL1([[1.0, -1.0]], 1.0), [0.0, 0.0])


class TestSupportFunction:
    def test_l1_ball_dual_is_linf(self):
        assert support_function(NormBall("l1", 1.0), [3.0, -1.0]) == pytest.approx(3.0)

    def test_l2_ball(self):
        assert support_function(NormBall("l2", 2.0), [3.0, 4.0]) == pytest.approx(10.0)

    def test_group_l2_single_group(self):
        spec = GroupL2(((0, 1),), (1.0,))
        assert support_function(spec, [3.0, 4.0]) == pytest.approx(5.0)

    def test_group_l2_partition_sums(self):
        spec = GroupL2(((0, 1), (2,)), (1.0, 2.0))
        assert support_function(spec, [3.0, 4.0, -1.0]) == pytest.approx(7.0)

    def test_overlapping_groups_rejected(self):
        spec = GroupL2(((0, 1), (1, 2)), (1.0, 1.0))
        with pytest.raises(UnsupportedPenaltyError):
            support_function(spec, [1.0, 1.0, 1.0])

    def test_non_ball_rejected(self):
        with pytest.raises(UnsupportedPenaltyError):
            support_function(L1(1.0), [1.0])


class TestHalfspaceSupport:
    def test_cone_direction(self):
        hs = Halfspace([1.0, 0.0], 0.5)
        assert halfspace_support(hs, [2.0, 0.0]) == pytest.approx(1.0)
        assert halfspace_support(hs, [0.0, 0.0]) == 0.0

    def test_off_cone_is_infinite(self):
        hs = Halfspace([1.0, 0.0], 0.5)
        assert halfspace_support(hs, [0.0, 1.0]) == np.inf
        assert halfspace_support(hs, [-1.0, 0.0]) == np.inf


class TestOperatorNorm:
    def test_matches_svd(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            M = rng.normal(size=(5, 4))
            top = np.linalg.svd(M, compute_uv=False)[0]
            assert operator_norm(M) == pytest.approx(top, rel=1e-7)

    def test_zero_matrix(self):
        assert operator_norm(np.zeros((3, 3))) == 0.0


class TestValidation:
    def test_negative_scalars_rejected(self):
        with pytest.raises(ValueError):
            L1(-1.0)
        with pytest.raises(ValueError):
            NormBall("l2", -0.5)

    def test_asymmetric_quadratic_rejected(self):
        with pytest.raises(ValueError):
            Quadratic([[1.0, 2.0], [0.0, 1.0]])

    def test_empty_sum_rejected(self):
        with pytest.raises(ValueError):
            Sum(())
