import unittest
from math import sqrt

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase

from coding_app.domain.bp import BPConfig, EnumerationBudget, Problem
from coding_app.domain.channels import ChannelParams, SourceModel
from coding_app.domain.networks import NetworkKind, NetworkSpec
from coding_app.domain.spins import SeededStream, SpinVector
from coding_app.exceptions import EnumerationBudgetError
from coding_app.patterns.problem_factory import ProblemFactory
from coding_app.services.bp_service import BeliefPropagationService
from coding_app.services.network_service import NetworkService
from coding_app.services.oracle_service import OracleService
from coding_app.services.spin_service import SpinService

WINDOW_K = 0.6744897501960817


class ExactMarginalTests(SimpleTestCase):

    def test_noiseless_parity_tree_is_block_symmetric(self):
        spec = NetworkSpec(NetworkKind.PTH, 3, k=WINDOW_K)
        problem = ProblemFactory.create_ecc_problem(spec, 12, 24, ChannelParams(0.0, 0.0), SeededStream(1))
        marginals = OracleService.exact_marginals(problem)
        np.testing.assert_array_equal(marginals, 0.0)

    def test_result_does_not_depend_on_workers(self):
        spec = NetworkSpec(NetworkKind.CTH, 3, k=0.7)
        problem = ProblemFactory.create_ecc_problem(spec, 15, 30, ChannelParams(0.1, 0.2), SeededStream(2))
        serial = OracleService.exact_marginals(problem)
        parallel = OracleService.exact_marginals(problem, n_jobs=2)
        np.testing.assert_array_equal(serial, parallel)
        self.assertTrue(np.all(np.abs(serial) <= 1.0))

    def test_lossy_marginals_vanish_at_small_beta(self):
        spec = NetworkSpec(NetworkKind.PTH, 1, k=WINDOW_K)
        problem = ProblemFactory.create_lc_problem(spec, 10, 20, SourceModel(0.5), SeededStream(3))
        marginals = OracleService.exact_marginals(problem, beta=1e-9)
        self.assertLess(float(np.max(np.abs(marginals))), 1e-6)

    def test_relabeling_factors_keeps_marginals(self):
        spec = NetworkSpec(NetworkKind.CTO, 2, k=0.01)
        problem = ProblemFactory.create_ecc_problem(spec, 8, 16, ChannelParams(0.1, 0.2), SeededStream(7))
        order = SeededStream(7, ('order',)).generator().permutation(problem.M)
        relabeled = Problem(
            task=problem.task,
            spec=spec,
            codebook=problem.codebook.permuted(order),
            observed=SpinVector(problem.observed.values[order]),
            channel=problem.channel,
        )
        np.testing.assert_allclose(
            OracleService.exact_marginals(relabeled), OracleService.exact_marginals(problem), rtol=0, atol=1e-12,
        )

    def test_budget(self):
        spec = NetworkSpec(NetworkKind.PTH, 1, k=WINDOW_K)
        problem = ProblemFactory.create_lc_problem(spec, 12, 24, SourceModel(0.5), SeededStream(4))
        with self.assertRaises(EnumerationBudgetError):
            OracleService.exact_marginals(problem, budget=EnumerationBudget(max_bits=10))
        with self.assertRaises(EnumerationBudgetError):
            OracleService.exhaustive_lc_encode(problem, budget=EnumerationBudget(max_bits=10))
        with self.assertRaises(ValueError):
            EnumerationBudget(max_bits=0)


class ExhaustiveEncodingTests(SimpleTestCase):

    def test_exhaustive_distortion_bounds_bp(self):
        spec = NetworkSpec(NetworkKind.PTH, 1, k=WINDOW_K)
        cfg = BPConfig(iterations=35, gamma=0.45, beta=2.0)
        for seed in range(3):
            problem = ProblemFactory.create_lc_problem(spec, 12, 24, SourceModel(0.5), SeededStream(seed, ('lc',)))
            best = OracleService.exhaustive_lc_encode(problem)
            optimum = SpinService.hamming_distortion(problem.observed, NetworkService.encode(spec, best, problem.codebook))
            estimate, _ = BeliefPropagationService.run(problem, cfg, SeededStream(seed, ('init',)))
            found = SpinService.hamming_distortion(problem.observed, NetworkService.encode(spec, estimate, problem.codebook))
            self.assertLessEqual(optimum, found)

    def test_ties_resolve_to_smallest_code(self):
        spec = NetworkSpec(NetworkKind.PTH, 1, k=WINDOW_K)
        problem = ProblemFactory.create_lc_problem(spec, 4, 8, SourceModel(0.5), SeededStream(5))
        best = OracleService.exhaustive_lc_encode(problem)
        # вихід парної передавальної функції не змінюється при s -> -s,
        # тож оптимум з першою координатою -1 завжди існує
        self.assertEqual(int(best.values[0]), -1)


class FullBeliefPropagationTests(SimpleTestCase):

    def _problem(self, seed, N=64):
        spec = NetworkSpec(NetworkKind.PTH, 1, k=WINDOW_K)
        return ProblemFactory.create_ecc_problem(
            spec, N, 8 * N, ChannelParams(0.01, 0.01), SeededStream(seed, ('dense',)),
        )

    def test_full_and_reduced_marginals_agree(self):
        N = 64
        cfg = BPConfig(iterations=5)
        for seed in range(10):
            problem = self._problem(seed, N)
            state = BeliefPropagationService.init_state(problem, cfg, SeededStream(seed, ('init',)))
            dense = OracleService.init_dense_state(problem, state.flat)
            for _ in range(5):
                state = BeliefPropagationService.bp_step(state, problem, cfg)
                dense = OracleService.full_bp_step(dense, problem, cfg)
            self.assertLessEqual(float(np.max(np.abs(state.flat - dense.m))), 5 / sqrt(N), msg=f'seed {seed}')

    def test_factor_messages_scale_as_inverse_sqrt_n(self):
        N = 64
        problem = self._problem(0, N)
        cfg = BPConfig(iterations=3)
        state = BeliefPropagationService.init_state(problem, cfg, SeededStream(0, ('init',)))
        dense = OracleService.init_dense_state(problem, state.flat)
        for _ in range(3):
            dense = OracleService.full_bp_step(dense, problem, cfg)
            self.assertTrue(np.all(np.isfinite(dense.m_hat)))
            self.assertLess(float(np.max(np.abs(dense.m_hat))) * sqrt(N), 100.0)
        self.assertEqual(dense.t, 3)

    def test_init_dense_state_validates_length(self):
        with self.assertRaises(ValueError):
            OracleService.init_dense_state(self._problem(0, 16), np.zeros(5))


@unittest.skipUnless(settings.BPCODE.get('SLOW_TESTS'), 'BPCODE_SLOW_TESTS вимкнено')
class GibbsSamplerTests(SimpleTestCase):

    def test_gibbs_matches_enumeration(self):
        spec = NetworkSpec(NetworkKind.PTH, 1, k=WINDOW_K)
        problem = ProblemFactory.create_lc_problem(spec, 10, 20, SourceModel(0.5), SeededStream(6))
        exact = OracleService.exact_marginals(problem, beta=0.5)
        sampled = OracleService.gibbs_marginals(problem, SeededStream(6, ('gibbs',)), beta=0.5, sweeps=20000, burn_in=500)
        np.testing.assert_allclose(sampled, exact, atol=0.05)
