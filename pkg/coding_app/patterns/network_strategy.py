"""
GoF Pattern: Strategy
Кожен тип деревоподібної мережі (PTH, CTH, CTO) інкапсулює свою
функцію виходу, моменти прихованих елементів та зсув виходу.
"""
from abc import ABC, abstractmethod
from math import ceil, sqrt

import numpy as np
from scipy.special import erfc
from scipy.stats import binom

from coding_app.domain.kernels import KernelInput
from coding_app.domain.networks import NetworkKind, NetworkSpec
from coding_app.numerics import compensated_sum, exclusive_products, sgn, tau_pairs

_INV_SQRT_2PI = 1.0 / sqrt(2.0 * np.pi)


def gaussian_tail(u) -> np.ndarray:
    """H(u) = P(z > u) для стандартної нормальної z"""
    return 0.5 * erfc(np.asarray(u, dtype=np.float64) / sqrt(2.0))


def gaussian_density(u) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    return _INV_SQRT_2PI * np.exp(-0.5 * u * u)


def window(x, k: float) -> np.ndarray:
    """Немонотонна передавальна функція: +1 при |x| <= k, інакше -1"""
    return np.where(np.abs(np.asarray(x, dtype=np.float64)) <= k, 1, -1).astype(np.int8)


class NetworkStrategy(ABC):
    """Абстрактна стратегія мережі"""

    kind: NetworkKind

    def __init__(self, spec: NetworkSpec):
        if spec.kind is not self.kind:
            raise ValueError(f"Стратегія {self.kind.label} не підходить для мережі {spec.kind.label}")
        self.spec = spec

    @abstractmethod
    def hidden_units(self, fields: np.ndarray) -> np.ndarray:
        """Значення прихованих елементів τ для локальних полів форми (..., K)"""
        pass

    @abstractmethod
    def combine(self, tau: np.ndarray) -> np.ndarray:
        """Вихідний елемент без урахування полярності"""
        pass

    @abstractmethod
    def unit_moments(self, kin: KernelInput) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Середнє E[τ_l], його похідна та мінус друга похідна за зсувом поля.

        Args:
            kin: Кавітаційні поля

        Returns:
            Кортеж (mean, slope, curvature) масивів форми (..., K)
        """
        pass

    @abstractmethod
    def raw_output_bias(self) -> float:
        """P(вихід = +1) при незалежних стандартних нормальних полях"""
        pass

    def forward(self, fields: np.ndarray) -> np.ndarray:
        return (self.spec.polarity * self.combine(self.hidden_units(fields))).astype(np.int8)

    def output_bias(self) -> float:
        bias = float(self.raw_output_bias())
        return bias if self.spec.polarity == 1 else 1.0 - bias

    def threshold_breakpoints(self):
        """Точки розриву зсуву як функції k (None для неперервного випадку)"""
        return None

    def branch_expectations(self, mean: np.ndarray, tau_order=None) -> tuple[np.ndarray, np.ndarray]:
        """
        E[F(τ)] та похідні D_l = ∂E[F]/∂mean_l при незалежних τ_l.

        Загальна реалізація перебирає пари (τ, -τ) з компенсованим
        підсумовуванням; tau_order задає порядок перебору пар.
        """
        rows = tau_pairs(self.spec.K)
        if tau_order is not None:
            rows = rows[np.asarray(tau_order)]
        output_pos = self.combine(rows).astype(np.float64)
        output_neg = self.combine(-rows).astype(np.float64)

        scaled = rows * mean[..., None, :]
        factors_pos = 0.5 * (1.0 + scaled)
        factors_neg = 0.5 * (1.0 - scaled)
        excl_pos = exclusive_products(factors_pos)
        excl_neg = exclusive_products(factors_neg)
        prob_pos = excl_pos[..., 0] * factors_pos[..., 0]
        prob_neg = excl_neg[..., 0] * factors_neg[..., 0]

        expected = compensated_sum(output_pos * prob_pos + output_neg * prob_neg, axis=-1)
        pair_terms = 0.5 * rows * (
            output_pos[:, None] * excl_pos - output_neg[:, None] * excl_neg
        )
        derivatives = compensated_sum(pair_terms, axis=-2)
        return expected, derivatives


class _WindowUnitsStrategy(NetworkStrategy):
    """Приховані елементи з немонотонною функцією f_k (PTH, CTH)"""

    def hidden_units(self, fields):
        return window(fields, self.spec.k)

    def unit_moments(self, kin):
        sigma = kin.sigma
        w_plus, w_minus = kin.w_plus, kin.w_minus
        density_plus, density_minus = gaussian_density(w_plus), gaussian_density(w_minus)
        mean = 1.0 - 2.0 * (gaussian_tail(w_plus) + gaussian_tail(w_minus))
        slope = 2.0 * (density_plus - density_minus) / sigma
        curvature = 2.0 * (w_plus * density_plus + w_minus * density_minus) / sigma ** 2
        return mean, slope, curvature

    def window_probability(self) -> float:
        """P(|z| <= k)"""
        return float(1.0 - 2.0 * gaussian_tail(self.spec.k))


class ParityTreeStrategy(_WindowUnitsStrategy):
    """PTH: добуток виходів прихованих елементів"""

    kind = NetworkKind.PTH

    def combine(self, tau):
        return np.prod(tau, axis=-1).astype(np.int8)

    def branch_expectations(self, mean, tau_order=None):
        # Замкнена форма: E[Πτ] = Π mean, D_l = Π_{l'≠l} mean
        return np.prod(mean, axis=-1), exclusive_products(mean)

    def raw_output_bias(self):
        a = self.window_probability()
        return 0.5 * (1.0 + (2.0 * a - 1.0) ** self.spec.K)


class CommitteeTreeStrategy(_WindowUnitsStrategy):
    """CTH: знак суми виходів прихованих елементів (K непарне)"""

    kind = NetworkKind.CTH

    def combine(self, tau):
        return sgn(np.sum(tau, axis=-1))

    def raw_output_bias(self):
        K = self.spec.K
        return float(binom.sf(ceil(K / 2) - 1, K, self.window_probability()))


class CommitteeOutputStrategy(NetworkStrategy):
    """CTO: знакові приховані елементи та немонотонний вихідний елемент"""

    kind = NetworkKind.CTO

    def hidden_units(self, fields):
        return sgn(fields)

    def combine(self, tau):
        return window(np.sum(tau, axis=-1) / sqrt(self.spec.K), self.spec.k)

    def unit_moments(self, kin):
        sigma = kin.sigma
        w = kin.w
        density = gaussian_density(w)
        mean = 1.0 - 2.0 * gaussian_tail(w)
        slope = 2.0 * density / sigma
        curvature = 2.0 * w * density / sigma ** 2
        return mean, slope, curvature

    def output_atoms(self) -> tuple[np.ndarray, np.ndarray]:
        """Значення |Σ sgn| / √K та їхні ймовірності"""
        K = self.spec.K
        j = np.arange(K + 1)
        return np.abs(2 * j - K) / sqrt(K), binom.pmf(j, K, 0.5)

    def raw_output_bias(self):
        atoms, weights = self.output_atoms()
        return float(np.sum(weights[atoms <= self.spec.k]))

    def threshold_breakpoints(self):
        atoms, _ = self.output_atoms()
        return np.unique(atoms)


class NetworkStrategyFactory:
    """Factory для створення стратегій мереж"""

    STRATEGIES = {
        NetworkKind.PTH: ParityTreeStrategy,
        NetworkKind.CTH: CommitteeTreeStrategy,
        NetworkKind.CTO: CommitteeOutputStrategy,
    }

    @classmethod
    def create_strategy(cls, spec: NetworkSpec) -> NetworkStrategy:
        """Створює стратегію для заданої мережі"""
        strategy_class = cls.STRATEGIES[spec.kind]
        return strategy_class(spec)
