import numpy as np
from django.test import SimpleTestCase

from coding_app.domain.bp import BPConfig, BPState, Problem, Task
from coding_app.domain.channels import ChannelParams, SourceModel
from coding_app.domain.networks import NetworkKind, NetworkSpec
from coding_app.domain.spins import SeededStream
from coding_app.exceptions import NumericalBreakdownError
from coding_app.patterns.problem_factory import ProblemFactory
from coding_app.services.bp_service import BeliefPropagationService
from coding_app.services.network_service import NetworkService
from coding_app.services.spin_service import SpinService

NETWORKS = [
    NetworkSpec(NetworkKind.PTH, 3, k=0.9),
    NetworkSpec(NetworkKind.CTH, 3, k=0.7),
    NetworkSpec(NetworkKind.CTO, 2, k=0.01),
]


def ecc_problem(spec, N=30, M=60, seed=1, channel=ChannelParams(0.1, 0.2)):
    return ProblemFactory.create_ecc_problem(spec, N, M, channel, SeededStream(seed, ('ecc',)))


def lc_problem(spec, N=30, M=60, seed=1, bias=0.5):
    return ProblemFactory.create_lc_problem(spec, N, M, SourceModel(bias), SeededStream(seed, ('lc',)))


class BPConfigTests(SimpleTestCase):

    def test_validation(self):
        with self.assertRaises(ValueError):
            BPConfig(gamma=1.0)
        with self.assertRaises(ValueError):
            BPConfig(iterations=-1)
        with self.assertRaises(ValueError):
            BPConfig(beta=0.0)

    def test_from_settings(self):
        self.assertEqual(BPConfig.from_settings(Task.ECC).iterations, 100)
        self.assertEqual(BPConfig.from_settings(Task.LC).iterations, 35)
        cfg = BPConfig.from_settings(Task.LC, gamma=0.45, iterations=None)
        self.assertEqual((cfg.gamma, cfg.iterations), (0.45, 35))


class ZeroFixedPointTests(SimpleTestCase):

    def test_all_zero_state_is_fixed(self):
        cfg = BPConfig(iterations=1, gamma=0.45, beta=2.0)
        for spec in NETWORKS:
            for problem in (ecc_problem(spec), lc_problem(spec)):
                state = BPState(m=np.zeros((spec.K, 30 // spec.K)), phi_prev=np.zeros((60, spec.K)))
                updated = BeliefPropagationService.bp_step(state, problem, cfg)
                np.testing.assert_array_equal(updated.m, 0.0, err_msg=f'{spec} {problem.task}')
                self.assertEqual(updated.t, 1)


class EngineTests(SimpleTestCase):

    def test_zero_iterations_returns_initial_signs(self):
        spec = NETWORKS[0]
        problem = ecc_problem(spec)
        cfg = BPConfig(iterations=0)
        stream = SeededStream(2)
        estimate, trace = BeliefPropagationService.run(problem, cfg, stream)
        initial = BeliefPropagationService.init_state(problem, cfg, stream)
        self.assertEqual(estimate, BeliefPropagationService.mpm_estimate(initial))
        self.assertEqual(trace, ())

    def test_mpm_tie_is_plus_one(self):
        state = BPState(m=np.array([[0.0, -0.2], [0.3, 0.0]]), phi_prev=np.zeros((4, 2)))
        np.testing.assert_array_equal(BeliefPropagationService.mpm_estimate(state).values, [1, -1, 1, 1])

    def test_runs_are_deterministic(self):
        for spec in NETWORKS:
            problem = lc_problem(spec)
            cfg = BPConfig(iterations=10, gamma=0.4, beta=2.0)
            first = BeliefPropagationService.run(problem, cfg, SeededStream(5, ('init',)))
            second = BeliefPropagationService.run(problem, cfg, SeededStream(5, ('init',)))
            self.assertEqual(first[0], second[0])
            self.assertEqual(first[1], second[1])

    def test_block_gauge_covariance(self):
        for spec in NETWORKS[:2]:
            problem = ecc_problem(spec, seed=3)
            gauged = Problem(
                task=problem.task,
                spec=spec,
                codebook=problem.codebook.with_blocks_negated([1]),
                observed=problem.observed,
                channel=problem.channel,
            )
            cfg = BPConfig(iterations=1)
            state = BeliefPropagationService.init_state(problem, cfg, SeededStream(3, ('init',)))
            other = state
            for _ in range(8):
                state = BeliefPropagationService.bp_step(state, problem, cfg)
                other = BeliefPropagationService.bp_step(other, gauged, cfg)
                np.testing.assert_array_equal(state.m, other.m)

    def test_state_shape_mismatch(self):
        problem = ecc_problem(NETWORKS[0])
        state = BPState(m=np.zeros((3, 5)), phi_prev=np.zeros((60, 3)))
        with self.assertRaises(ValueError):
            BeliefPropagationService.bp_step(state, problem, BPConfig())

    def test_breakdown_reports_step(self):
        problem = ecc_problem(NETWORKS[0])
        cfg = BPConfig(iterations=5, v_floor=5.0)
        with self.assertRaises(NumericalBreakdownError) as caught:
            BeliefPropagationService.run(problem, cfg, SeededStream(1))
        self.assertEqual(caught.exception.step, 1)
        self.assertIn('крок 1', str(caught.exception))

    def test_early_stop(self):
        problem = ecc_problem(NETWORKS[0])
        _, trace = BeliefPropagationService.run(problem, BPConfig(iterations=50, early_stop_tol=10.0), SeededStream(1))
        self.assertEqual(len(trace), 1)
        _, trace = BeliefPropagationService.run(problem, BPConfig(iterations=5), SeededStream(1))
        self.assertEqual(len(trace), 5)

    def test_best_distortion_selection(self):
        spec = NetworkSpec(NetworkKind.PTH, 1, k=0.6745)
        problem = lc_problem(spec, N=30, M=60)
        cfg = BPConfig(iterations=15, gamma=0.45, beta=2.0, select_best_distortion=True)
        estimate, trace = BeliefPropagationService.run(problem, cfg, SeededStream(4))
        best = SpinService.hamming_distortion(problem.observed, NetworkService.encode(spec, estimate, problem.codebook))

        last, _ = BeliefPropagationService.run(problem, cfg.evolve(select_best_distortion=False), SeededStream(4))
        final = SpinService.hamming_distortion(problem.observed, NetworkService.encode(spec, last, problem.codebook))
        self.assertLessEqual(best, final)
        self.assertEqual(len(trace), 15)


class EasyDecodingTests(SimpleTestCase):

    def test_recovers_planted_message(self):
        spec = NetworkSpec(NetworkKind.PTH, 1, k=0.6744897501960817)
        channel = ChannelParams(0.01, 0.01)
        cfg = BPConfig(iterations=100)
        recovered = 0
        for seed in range(10):
            problem = ProblemFactory.create_ecc_problem(spec, 64, 512, channel, SeededStream(seed, ('easy',)))
            estimate, _ = BeliefPropagationService.run(problem, cfg, SeededStream(seed, ('easy', 'init')))
            if SpinService.blockwise_abs_overlap(estimate, problem.planted, spec.K) == 1.0:
                recovered += 1
        self.assertGreaterEqual(recovered, 8)


class FiniteSizeCavityTests(SimpleTestCase):
    """Збіжний стан не скидається в нульову нерухому точку"""

    def test_cap_keeps_cavity_variance(self):
        self.assertAlmostEqual(BeliefPropagationService.q_cap(BPConfig(), 1, 64), 1 - 1 / 64, places=15)
        self.assertEqual(BeliefPropagationService.q_cap(BPConfig(q_clamp=0.5), 1, 64), 0.5)

    def test_converged_state_is_kept(self):
        spec = NetworkSpec(NetworkKind.PTH, 1, k=0.6744897501960817)
        problem = ProblemFactory.create_ecc_problem(spec, 64, 512, ChannelParams(0.01, 0.01), SeededStream(0, ('easy',)))
        cfg = BPConfig(iterations=30)
        estimate, trace = BeliefPropagationService.run(problem, cfg, SeededStream(0, ('easy', 'init')))
        self.assertEqual(len(trace), 30)
        self.assertTrue(all(max(entry.q) <= 1 - 1 / 64 for entry in trace))
        self.assertGreater(trace[-1].mean_abs_m, 0.9)
        self.assertEqual(SpinService.blockwise_abs_overlap(estimate, problem.planted, spec.K), 1.0)


class DampingTests(SimpleTestCase):

    def test_damped_step_mixes_previous_state(self):
        problem = ecc_problem(NETWORKS[0])
        cfg = BPConfig(iterations=1)
        state = BeliefPropagationService.init_state(problem, cfg, SeededStream(6, ('init',)))
        plain = BeliefPropagationService.bp_step(state, problem, cfg)
        damped = BeliefPropagationService.bp_step(state, problem, cfg.evolve(damping=0.3))
        np.testing.assert_allclose(damped.m, 0.7 * plain.m + 0.3 * state.m, rtol=0, atol=1e-12)
        np.testing.assert_array_equal(damped.phi_prev, plain.phi_prev)
        with self.assertRaises(ValueError):
            BPConfig(damping=1.0)
