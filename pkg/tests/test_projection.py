import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from conftest import random_channel
from srm_benchmark.errors import DegenerateScaleError, InfeasibleInstanceError, InvalidArgumentError
from srm_benchmark.geometry.batch import ConstraintBatch, backward_batch, project_batch
from srm_benchmark.geometry.checks import (chain_residuals, factor_residuals, indices_stable,
                                           numerical_jacobian, relative_error)
from srm_benchmark.geometry.constraints import ConstraintSet
from srm_benchmark.geometry.projection import (backward_C_wrt_d, backward_D_wrt_C, backward_D_wrt_phat,
                                               backward_E_wrt_D, epsilon_star, project_forward,
                                               projection_backward)
from srm_benchmark.geometry.qp import l2_projection
from srm_benchmark.geometry.rates import grad_neg_sum_rate, sinr


@pytest.fixture
def worked(identity_set):
    return project_forward(identity_set, [0.1, 0.9], [0.25, 0.25])


class TestForward:
    def test_epsilon_star(self, identity_set):
        eps, k_eps, active, feasible_input = epsilon_star(identity_set, [0.1, 0.9], [0.75, 0.75])
        assert eps == pytest.approx(0.4 / 0.65)
        assert k_eps == 0
        assert active == (0,)
        assert not feasible_input

    def test_feasible_inputs(self, identity_set):
        assert epsilon_star(identity_set, [0.75, 0.75], [0.75, 0.75]) == (0.0, None, (), True)
        assert epsilon_star(identity_set, [0.6, 0.9], [0.75, 0.75])[3]

    def test_worked_instance(self, worked):
        assert np.allclose(worked.p_C, [0.75, 0.75])
        assert np.allclose(worked.p_D, [0.5, 0.8076923076923077])
        assert np.allclose(worked.p_E, [0.6190476190476191, 1.0])
        assert worked.k_max == 1

    def test_uniform_scaling(self, identity_set):
        tape = project_forward(identity_set, [0.5, 0.5], [0.1, 0.1])
        assert tape.feasible_input
        assert np.allclose(tape.p_E, [1.0, 1.0])
        assert tape.k_max == 0

    def test_heuristic_uses_fixed_distances(self, coupled_set):
        tape = project_forward(coupled_set, [0.0, 0.9], heuristic=True)
        assert np.array_equal(tape.d, np.full(2, coupled_set.d_max_star))
        assert np.max(tape.p_C) == pytest.approx(1.0)

    def test_degenerate_scale(self):
        cs = ConstraintSet.from_matrices(np.eye(2), [0.0, 0.0], 1.0)
        with pytest.raises(DegenerateScaleError):
            project_forward(cs, [0.0, 0.0], [0.0, 0.0])

    @pytest.mark.parametrize("p_hat, d", [([1.1, 0.2], [0.1, 0.1]), ([0.2, 0.2], [0.6, 0.1]), ([0.2], [0.1])])
    def test_boxes(self, identity_set, p_hat, d):
        with pytest.raises(InvalidArgumentError):
            project_forward(identity_set, p_hat, d)

    def test_infeasible_instance(self):
        cs = ConstraintSet.from_matrices(np.eye(2), [2.0, 2.0], 1.0)
        with pytest.raises(InvalidArgumentError):
            project_forward(cs, [0.2, 0.2], heuristic=True)

    @settings(max_examples=200, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), size=st.integers(2, 6), heuristic=st.booleans())
    def test_output_is_feasible(self, seed, size, heuristic):
        rng = np.random.default_rng(seed)
        ch, cs = random_channel(rng, size=size, rate=rng.uniform(0.1, 1.0))
        p_hat = rng.uniform(0.0, cs.p_max, size)
        d = rng.uniform(0.0, cs.d_max_star, size)
        tape = project_forward(cs, p_hat, d, heuristic=heuristic)
        assert np.all(cs.B @ tape.p_E >= cs.q - 1e-8 * np.max(np.abs(cs.q)))
        assert np.all(tape.p_E >= 0)
        assert np.all(tape.p_E <= cs.p_max * (1 + 1e-12))
        assert np.max(tape.p_E) == pytest.approx(cs.p_max)
        assert np.all(sinr(ch, tape.p_E) >= sinr(ch, tape.p_D) * (1 - 1e-12))
        if not tape.feasible_input:
            assert 0 < tape.eps_star <= 1
            k = tape.k_eps
            assert cs.B[k] @ tape.p_D == pytest.approx(cs.q[k], rel=1e-9)
            shorter = tape.p_hat + 0.99 * tape.eps_star * (tape.p_C - tape.p_hat)
            assert np.any(cs.B @ shorter < cs.q)

    @settings(max_examples=100, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), size=st.integers(2, 5))
    def test_not_closer_than_l2(self, seed, size):
        rng = np.random.default_rng(seed)
        _, cs = random_channel(rng, size=size)
        p_hat = rng.uniform(0.0, cs.p_max, size)
        tape = project_forward(cs, p_hat, rng.uniform(0.0, cs.d_max_star, size))
        nearest = l2_projection(cs, p_hat)
        assert np.linalg.norm(tape.p_D - p_hat) >= np.linalg.norm(nearest - p_hat) - 1e-8


class TestFactors:
    def test_scaling(self, worked):
        numeric = numerical_jacobian(lambda p: (1.0 / p[1]) * p, worked.p_D)
        assert relative_error(backward_E_wrt_D(worked), numeric) < 1e-6
        # p_E[k_max] is pinned at p_max, the other entries shrink as p_D[k_max] grows
        row = backward_E_wrt_D(worked)[1]
        assert row[1] == 0.0
        assert row[0] < 0

    def test_single_cell(self):
        cs = ConstraintSet.from_matrices([[1.0]], [0.2], 1.0)
        tape = project_forward(cs, [0.1], [0.4])
        assert np.allclose(backward_E_wrt_D(tape), 0.0)

    def test_worked_residuals(self, identity_set, worked):
        residuals = factor_residuals(None, identity_set, worked)
        assert set(residuals) == {"dp_E/dp_D", "dp_C/dd", "dp_D/dp_hat", "dp_D/dp_C"}
        assert max(residuals.values()) < 1e-5

    def test_feasible_input_factors(self, identity_set):
        tape = project_forward(identity_set, [0.6, 0.9], [0.25, 0.25])
        assert np.array_equal(backward_D_wrt_phat(tape, identity_set), np.eye(2))
        assert np.array_equal(backward_D_wrt_C(tape, identity_set), np.zeros((2, 2)))

    def test_interior_map(self, identity_set, coupled_set):
        assert np.allclose(backward_C_wrt_d(identity_set), np.eye(2))
        scaled = ConstraintSet.from_matrices(2.0 * coupled_set.B, coupled_set.q, 1.0)
        assert np.allclose(backward_C_wrt_d(scaled), backward_C_wrt_d(coupled_set))

    def test_joint_direction(self, identity_set, worked):
        direction = worked.p_C - worked.p_hat
        combined = (backward_D_wrt_phat(worked, identity_set) + backward_D_wrt_C(worked, identity_set)).T @ direction

        def point_D(t):
            p_hat = worked.p_hat + t * direction
            p_C = worked.p_C + t * direction
            eps = (identity_set.q[0] - p_hat[0]) / (p_C[0] - p_hat[0])
            return p_hat + eps * (p_C - p_hat)

        h = 1e-6
        numeric = (point_D(h) - point_D(-h)) / (2 * h)
        assert np.allclose(combined, numeric, atol=1e-6)

    def test_feasible_input_has_no_distance_gradient(self, rng):
        ch, cs = random_channel(rng)
        tape = project_forward(cs, np.full(3, cs.p_max * 0.999), np.full(3, cs.d_max_star / 2))
        assert tape.feasible_input
        _, grad_d = projection_backward(tape, cs, grad_neg_sum_rate(ch, tape.p_E))
        assert np.array_equal(grad_d, np.zeros(3))

    def test_heuristic_has_no_distance_gradient(self, rng):
        ch, cs = random_channel(rng)
        tape = project_forward(cs, rng.uniform(0.0, cs.p_max, 3), heuristic=True)
        _, grad_d = projection_backward(tape, cs, grad_neg_sum_rate(ch, tape.p_E))
        assert np.array_equal(grad_d, np.zeros(3))

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), size=st.integers(2, 4), heuristic=st.booleans())
    def test_gradients_match_differences(self, seed, size, heuristic):
        rng = np.random.default_rng(seed)
        ch, cs = random_channel(rng, size=size, rate=0.5)
        p_hat = rng.uniform(0.05, 0.95, size) * cs.p_max
        d = rng.uniform(0.05, 0.95, size) * cs.d_max_star
        tape = project_forward(cs, p_hat, d, heuristic=heuristic)
        assume(indices_stable(cs, tape))
        residuals = factor_residuals(ch, cs, tape)
        assert max(residuals.values()) <= 1e-5, residuals


class TestBatch:
    @pytest.mark.parametrize("heuristic", [False, True])
    def test_matches_per_instance(self, rng, heuristic):
        pairs = [random_channel(rng, size=3) for _ in range(16)]
        batch = ConstraintBatch.from_sets([cs for _, cs in pairs])
        p_hat = np.stack([rng.uniform(0.0, cs.p_max, 3) for _, cs in pairs])
        d = np.stack([rng.uniform(0.0, cs.d_max_star, 3) for _, cs in pairs])
        tape = project_batch(batch, p_hat, d, heuristic=heuristic)
        upstream = np.stack([grad_neg_sum_rate(ch, p) for (ch, _), p in zip(pairs, tape.p_E)])
        grad_hat, grad_d = backward_batch(batch, tape, upstream)
        for m, (ch, cs) in enumerate(pairs):
            single = project_forward(cs, p_hat[m], d[m], heuristic=heuristic)
            assert np.allclose(tape.p_E[m], single.p_E, rtol=1e-12, atol=1e-15)
            assert tape.feasible_input[m] == single.feasible_input
            hat, dist = projection_backward(single, cs, upstream[m])
            assert np.allclose(grad_hat[m], hat, rtol=1e-9, atol=1e-12)
            assert np.allclose(grad_d[m], dist, rtol=1e-9, atol=1e-12)

    def test_rejects_infeasible(self, identity_set):
        bad = ConstraintSet.from_matrices(np.eye(2), [2.0, 2.0], 1.0)
        with pytest.raises(InfeasibleInstanceError) as info:
            ConstraintBatch.from_sets([identity_set, bad])
        assert info.value.index == 1

    def test_chain_from_a_weak_output(self, rng):
        ch, cs = random_channel(rng, size=2)
        tape = project_forward(cs, [0.01, 0.02], np.full(2, cs.d_max_star / 2))
        error_hat, error_d = chain_residuals(ch, cs, tape)
        assert error_hat < 1e-5
        assert error_d < 1e-5
