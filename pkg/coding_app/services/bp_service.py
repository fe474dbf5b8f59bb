"""
Service Layer для редукованої ітерації поширення переконань
Один крок коштує Θ(N·M) плюс Θ(M·K·2^K) на ядра
"""
import logging
from math import sqrt

import numpy as np

from coding_app.domain.bp import BPConfig, BPState, Problem, StepTrace, Task
from coding_app.domain.kernels import KernelInput
from coding_app.domain.spins import SeededStream, SpinVector
from coding_app.exceptions import NumericalBreakdownError
from coding_app.numerics import sgn
from coding_app.services.kernel_service import KernelService
from coding_app.services.network_service import NetworkService
from coding_app.services.spin_service import SpinService

logger = logging.getLogger(__name__)


class BeliefPropagationService:
    """
    Декодування (ECC) та кодування зі втратами (LC) редукованим BP
    з інерційним апріорним членом e^{s atanh(γ m)}.
    """

    @staticmethod
    def init_state(problem: Problem, cfg: BPConfig, stream: SeededStream) -> BPState:
        """
        Початковий стан: m_il ~ Uniform(-δ, δ), Φ = 0.

        Args:
            problem: Задача
            cfg: Конфігурація (δ = cfg.init_scale)
            stream: Потік випадкових чисел цього перезапуску

        Returns:
            BPState з t = 0
        """
        delta = cfg.init_scale
        m = stream.generator().uniform(-delta, delta, size=problem.N) if delta > 0 else np.zeros(problem.N)
        return BPState(
            m=m.reshape(problem.K, problem.N // problem.K),
            phi_prev=np.zeros((problem.M, problem.K)),
        )

    @staticmethod
    def kernel_input(problem: Problem, cfg: BPConfig, a: np.ndarray, q: np.ndarray) -> KernelInput:
        if problem.task is Task.ECC:
            return KernelInput(spec=problem.spec, a=a, q=q, y=problem.y, channel=problem.channel)
        return KernelInput(spec=problem.spec, a=a, q=q, y=problem.y, beta=cfg.beta)

    @staticmethod
    def q_cap(cfg: BPConfig, K: int, N: int) -> float:
        """Верхня межа q_l: min(q_clamp, 1 - K/N)"""
        return min(cfg.q_clamp, 1.0 - K / N)

    @staticmethod
    def bp_step(state: BPState, problem: Problem, cfg: BPConfig) -> BPState:
        """
        Один крок редукованого BP.

        Args:
            state: Поточний стан
            problem: Задача
            cfg: Конфігурація

        Returns:
            Новий стан з Φ цього кроку в phi_prev

        Raises:
            ValueError: Якщо розміри стану не відповідають задачі
            NumericalBreakdownError: Якщо ядро вироджується (з номером кроку)
        """
        K, N = problem.K, problem.N
        if state.m.shape != (K, N // K) or state.phi_prev.shape != (problem.M, K):
            raise ValueError("Розміри стану BP не відповідають задачі")
        step = state.t + 1
        scale = sqrt(K / N)
        patterns = problem.codebook.blocked_float

        # кавітаційна дисперсія скінченного N: 1 - q_l не менша за K/N
        q = np.minimum(state.q, BeliefPropagationService.q_cap(cfg, K, N))
        lam_bar = scale * np.einsum('mki,ki->mk', patterns, state.m)
        lam_hat = state.phi_prev * (1.0 - q)
        kin = BeliefPropagationService.kernel_input(problem, cfg, lam_bar - lam_hat, q)
        try:
            out = KernelService.evaluate(kin, cfg.v_floor)
            phi, gain_terms = KernelService.phi_and_gain(out, cfg.v_floor)
        except NumericalBreakdownError as error:
            raise NumericalBreakdownError(str(error), step=step) from error

        gain = (K / N) * np.sum(gain_terms, axis=0)
        field = (
            scale * np.einsum('mki,mk->ki', patterns, phi)
            + state.m * gain[:, None]
            + np.arctanh(cfg.gamma * state.m)
        )
        m = np.tanh(field)
        if cfg.damping > 0:
            m = (1.0 - cfg.damping) * m + cfg.damping * state.m
        if not np.all(np.isfinite(m)):
            raise NumericalBreakdownError("магнетизації стали нескінченними", step=step)
        m = np.clip(m, -cfg.m_clamp, cfg.m_clamp)

        entry = StepTrace(
            mean_abs_m=float(np.mean(np.abs(m))),
            q=tuple(float(value) for value in q),
            max_delta=float(np.max(np.abs(m - state.m))),
        )
        logger.debug(
            "Крок %d: <|m|>=%.4f max|Δm|=%.3e q=%s",
            step, entry.mean_abs_m, entry.max_delta, np.round(q, 4).tolist(),
        )
        return BPState(m=m, phi_prev=phi, t=step, trace=state.trace + (entry,))

    @staticmethod
    def mpm_estimate(state: BPState) -> SpinVector:
        """Оцінка максимуму апостеріорного маргіналу s_il = sgn(m_il), sgn(0) = +1"""
        return SpinVector(sgn(state.flat))

    @staticmethod
    def run(problem: Problem, cfg: BPConfig, stream: SeededStream) -> tuple[SpinVector, tuple]:
        """
        Повний прогін: ініціалізація, T кроків, MPM-оцінка останнього стану.

        Для LC з cfg.select_best_distortion повертається оцінка з найменшим
        спотворенням серед усіх кроків; cfg.early_stop_tol зупиняє ітерацію,
        щойно max|Δm| падає нижче порогу.

        Returns:
            Кортеж (estimate, trace)
        """
        state = BeliefPropagationService.init_state(problem, cfg, stream)
        track_best = cfg.select_best_distortion and problem.task is Task.LC
        best_estimate, best_distortion = None, np.inf
        if track_best:
            best_estimate, best_distortion = BeliefPropagationService._scored(state, problem)

        for _ in range(cfg.iterations):
            state = BeliefPropagationService.bp_step(state, problem, cfg)
            if track_best:
                estimate, distortion = BeliefPropagationService._scored(state, problem)
                if distortion < best_distortion:
                    best_estimate, best_distortion = estimate, distortion
            if cfg.early_stop_tol is not None and state.trace[-1].max_delta < cfg.early_stop_tol:
                logger.debug("Рання зупинка на кроці %d", state.t)
                break

        estimate = best_estimate if track_best else BeliefPropagationService.mpm_estimate(state)
        return estimate, state.trace

    @staticmethod
    def _scored(state: BPState, problem: Problem) -> tuple[SpinVector, float]:
        estimate = BeliefPropagationService.mpm_estimate(state)
        decoded = NetworkService.encode(problem.spec, estimate, problem.codebook)
        return estimate, SpinService.hamming_distortion(problem.observed, decoded)
