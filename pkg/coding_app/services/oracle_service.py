"""
Service Layer для еталонних обчислень малого розміру:
точні маргінали, вичерпне кодування, повний (нередукований) BP,
Монте-Карло оцінки ядер та семплер Гіббса
"""
import logging
from math import sqrt
from typing import Optional

import numpy as np
from joblib import Parallel, delayed

from coding_app.domain.bp import BPConfig, DenseBPState, EnumerationBudget, Problem, Task
from coding_app.domain.kernels import KernelEstimate, KernelInput
from coding_app.domain.spins import SeededStream, SpinVector
from coding_app.numerics import codes_to_spins, gray_codes
from coding_app.patterns.factor_strategy import ChannelFactor, DistortionFactor, FactorStrategyFactory
from coding_app.patterns.network_strategy import NetworkStrategyFactory
from coding_app.services.kernel_service import KernelService

logger = logging.getLogger(__name__)

CHUNK_BITS = 12
MESSAGE_CLAMP = 1.0 - 1e-12


def _state_log_weights(problem: Problem, spins: np.ndarray, beta: float) -> np.ndarray:
    """Логарифм ваги Π_μ G_μ для кожного рядка spins форми (C, N)"""
    K, N = problem.K, problem.N
    blocks = spins.reshape(len(spins), K, N // K)
    fields = sqrt(K / N) * np.einsum('mki,cki->cmk', problem.codebook.blocked_float, blocks)
    outputs = NetworkStrategyFactory.create_strategy(problem.spec).forward(fields)
    factor = FactorStrategyFactory.create_factor(problem, beta)
    return np.sum(factor.log_weight(problem.y[None, :], outputs), axis=1)


def _marginal_chunk(problem: Problem, beta: float, start: int, stop: int):
    spins = codes_to_spins(gray_codes(start, stop), problem.N)
    log_weights = _state_log_weights(problem, spins, beta)
    peak = float(np.max(log_weights))
    if not np.isfinite(peak):
        return -np.inf, 0.0, np.zeros(problem.N)
    weights = np.exp(log_weights - peak)
    return peak, float(np.sum(weights)), weights @ spins


def _encode_chunk(problem: Problem, start: int, stop: int):
    codes = gray_codes(start, stop)
    spins = codes_to_spins(codes, problem.N)
    K, N = problem.K, problem.N
    fields = sqrt(K / N) * np.einsum(
        'mki,cki->cmk', problem.codebook.blocked_float, spins.reshape(len(spins), K, N // K)
    )
    outputs = NetworkStrategyFactory.create_strategy(problem.spec).forward(fields)
    mismatches = np.count_nonzero(outputs != problem.observed.values[None, :], axis=1)
    best = int(np.min(mismatches))
    return best, int(np.min(codes[mismatches == best]))


class OracleService:
    """Еталонні реалізації для перевірки редукованого BP"""

    @staticmethod
    def _chunks(N: int):
        size = 2 ** min(N, CHUNK_BITS)
        return [(start, start + size) for start in range(0, 2 ** N, size)]

    @staticmethod
    def exact_marginals(
        problem: Problem,
        beta: float = 1.0,
        budget: Optional[EnumerationBudget] = None,
        n_jobs: int = 1,
    ) -> np.ndarray:
        """
        Точні апостеріорні маргінали m_i перебором усіх 2^N станів.

        Стани перебираються в порядку коду Грея блоками; блоки зводяться
        в фіксованому порядку, тож результат не залежить від n_jobs.

        Args:
            problem: Задача ECC або LC
            beta: Обернена температура (степінь фактора каналу для ECC)
            budget: Межа перебору (за замовчуванням ENUMERATION_MAX_BITS)
            n_jobs: Кількість процесів joblib

        Returns:
            Масив довжини N

        Raises:
            EnumerationBudgetError: Якщо N перевищує бюджет
            ArithmeticError: Якщо жоден стан не має ненульової ваги
        """
        budget = budget or EnumerationBudget.from_settings()
        budget.check(problem.N)
        parts = Parallel(n_jobs=n_jobs)(
            delayed(_marginal_chunk)(problem, beta, start, stop)
            for start, stop in OracleService._chunks(problem.N)
        )
        peak = max(part[0] for part in parts)
        if not np.isfinite(peak):
            raise ArithmeticError("Усі стани мають нульову апостеріорну вагу")
        total, moments = 0.0, np.zeros(problem.N)
        for part_peak, part_total, part_moments in parts:
            if not np.isfinite(part_peak):
                continue
            scale = np.exp(part_peak - peak)
            total += scale * part_total
            moments += scale * part_moments
        return moments / total

    @staticmethod
    def exhaustive_lc_encode(
        problem: Problem,
        budget: Optional[EnumerationBudget] = None,
        n_jobs: int = 1,
    ) -> SpinVector:
        """
        Кодове повідомлення s з мінімальним спотворенням d(y, вихід(s)).

        Серед рівноцінних обирається лексикографічно найменше
        (-1 < +1, перша координата старша).
        """
        budget = budget or EnumerationBudget.from_settings()
        budget.check(problem.N)
        parts = Parallel(n_jobs=n_jobs)(
            delayed(_encode_chunk)(problem, start, stop)
            for start, stop in OracleService._chunks(problem.N)
        )
        best, code = min(parts)
        logger.debug("Вичерпне кодування: %d розбіжностей із %d", best, problem.M)
        return SpinVector(codes_to_spins(np.array([code]), problem.N)[0].astype(np.int8))

    @staticmethod
    def init_dense_state(problem: Problem, m0: np.ndarray) -> DenseBPState:
        """Площини повідомлень m_{μil} = m0_il, m̂ = 0"""
        m0 = np.asarray(m0, dtype=np.float64).reshape(-1)
        if m0.size != problem.N:
            raise ValueError("Початкові магнетизації мають довжину N")
        return DenseBPState(
            m_msg=np.broadcast_to(m0, (problem.M, problem.N)),
            m_hat=np.zeros((problem.M, problem.N)),
            m=m0,
        )

    @staticmethod
    def full_bp_step(dense: DenseBPState, problem: Problem, cfg: Optional[BPConfig] = None) -> DenseBPState:
        """
        Один крок повного BP з кавітаційними статистиками для кожної трійки (μ, i, l).

        Вимагає O(N·M) обчислень ядра; призначений лише для малих задач.
        """
        cfg = cfg or BPConfig(iterations=1)
        K, N, M = problem.K, problem.N, problem.M
        n = N // K
        scale = sqrt(K / N)
        patterns = problem.codebook.blocked_float
        messages = dense.m_msg.reshape(M, K, n)

        lam_full = scale * np.einsum('mki,mki->mk', patterns, messages)
        q_full = (K / N) * np.sum(messages ** 2, axis=2)

        # a[μ, l, i, l'] - поле гілки l' у факторі μ без змінної (i, l)
        a = np.broadcast_to(lam_full[:, None, None, :], (M, K, n, K)).copy()
        q = np.broadcast_to(q_full[:, None, None, :], (M, K, n, K)).copy()
        branch = np.arange(K)
        a[:, branch, :, branch] -= np.moveaxis(scale * messages * patterns, 1, 0)
        q[:, branch, :, branch] -= np.moveaxis((K / N) * messages ** 2, 1, 0)
        q = np.clip(q, 0.0, cfg.q_clamp)

        y = np.broadcast_to(problem.y[:, None, None], (M, K, n))
        if problem.task is Task.ECC:
            kin = KernelInput(spec=problem.spec, a=a, q=q, y=y, channel=problem.channel)
        else:
            kin = KernelInput(spec=problem.spec, a=a, q=q, y=y, beta=cfg.beta)
        out = KernelService.evaluate(kin, cfg.v_floor)
        phi, _ = KernelService.phi_and_gain(out, cfg.v_floor)
        own_phi = phi[:, branch, :, branch]
        own_phi = np.moveaxis(own_phi, 0, 1)

        m_hat = np.clip(scale * patterns * own_phi, -MESSAGE_CLAMP, MESSAGE_CLAMP)
        incoming = np.arctanh(m_hat)
        prior = np.arctanh(cfg.gamma * dense.m.reshape(K, n))
        total = np.sum(incoming, axis=0) + prior
        m = np.clip(np.tanh(total), -cfg.m_clamp, cfg.m_clamp)
        m_msg = np.clip(np.tanh(total[None, :, :] - incoming), -cfg.m_clamp, cfg.m_clamp)
        return DenseBPState(
            m_msg=m_msg.reshape(M, N),
            m_hat=m_hat.reshape(M, N),
            m=m.reshape(N),
            t=dense.t + 1,
        )

    @staticmethod
    def mc_kernel_oracle(
        kin: KernelInput,
        samples: int,
        stream: SeededStream,
        h: float = 1e-3,
        chunk: int = 2 ** 16,
    ) -> KernelEstimate:
        """
        Монте-Карло оцінка V = E[G] та U_l = ∂E[G]/∂a_l для одного фактора.

        Похідна - центральна скінченна різниця з кроком h на спільних
        випадкових числах.

        Args:
            kin: Вхід одного фактора (a форми (K,), y - скаляр)
            samples: Кількість вибірок, не менше 10^4
            stream: Потік випадкових чисел
            h: Крок скінченної різниці

        Returns:
            KernelEstimate
        """
        if samples < 10 ** 4:
            raise ValueError("Монте-Карло оракул потребує щонайменше 10^4 вибірок")
        if kin.a.ndim != 1:
            raise ValueError("Монте-Карло оракул працює з одним фактором")
        K = kin.spec.K
        strategy = NetworkStrategyFactory.create_strategy(kin.spec)
        factor = ChannelFactor(kin.channel) if kin.channel is not None else DistortionFactor(kin.beta)
        y = float(kin.y)
        sigma = kin.sigma
        rng = stream.generator()

        sum_v = sum_v2 = 0.0
        sum_u = np.zeros(K)
        sum_u2 = np.zeros(K)
        shifts = h * np.eye(K)
        drawn = 0
        while drawn < samples:
            size = min(chunk, samples - drawn)
            fields = kin.a + sigma * rng.standard_normal((size, K))
            values = factor.value(y, strategy.forward(fields))
            sum_v += float(np.sum(values))
            sum_v2 += float(np.sum(values ** 2))
            for l in range(K):
                upper = factor.value(y, strategy.forward(fields + shifts[l]))
                lower = factor.value(y, strategy.forward(fields - shifts[l]))
                diff = (upper - lower) / (2.0 * h)
                sum_u[l] += float(np.sum(diff))
                sum_u2[l] += float(np.sum(diff ** 2))
            drawn += size

        V = sum_v / samples
        U = sum_u / samples
        V_stderr = sqrt(max(sum_v2 / samples - V ** 2, 0.0) / samples)
        U_stderr = np.sqrt(np.maximum(sum_u2 / samples - U ** 2, 0.0) / samples)
        return KernelEstimate(U=U, V=V, U_stderr=U_stderr, V_stderr=V_stderr, samples=samples)

    @staticmethod
    def gibbs_marginals(
        problem: Problem,
        stream: SeededStream,
        beta: float = 1.0,
        sweeps: int = 10 ** 5,
        burn_in: int = 10 ** 3,
    ) -> np.ndarray:
        """
        Оцінка маргіналів послідовним семплером Гіббса.

        Returns:
            Середні значення s_i після burn_in розгорток
        """
        K, N = problem.K, problem.N
        n = N // K
        scale = sqrt(K / N)
        rng = stream.generator()
        patterns = problem.codebook.blocked_float
        strategy = NetworkStrategyFactory.create_strategy(problem.spec)
        factor = FactorStrategyFactory.create_factor(problem, beta)
        y = problem.y

        spins = np.where(rng.random(N) < 0.5, 1.0, -1.0).reshape(K, n)
        fields = scale * np.einsum('mki,ki->mk', patterns, spins)
        totals = np.zeros((K, n))
        for sweep in range(burn_in + sweeps):
            for l in range(K):
                for i in range(n):
                    shift = 2.0 * scale * spins[l, i] * patterns[:, l, i]
                    flipped = fields.copy()
                    flipped[:, l] -= shift
                    current = np.sum(factor.log_weight(y, strategy.forward(fields)))
                    proposed = np.sum(factor.log_weight(y, strategy.forward(flipped)))
                    with np.errstate(invalid='ignore', over='ignore'):
                        accept = 1.0 / (1.0 + np.exp(current - proposed))
                    if rng.random() < np.nan_to_num(accept, nan=0.0):
                        spins[l, i] = -spins[l, i]
                        fields = flipped
            if sweep >= burn_in:
                totals += spins
        return (totals / sweeps).reshape(N)
