"""
Service Layer для гаусових ядер фактора (U, V, Ũ, Ṽ)
Поєднує Strategy мережі зі Strategy фактора задачі
"""
import logging

import numpy as np

from coding_app.domain.kernels import KernelInput, KernelOutput
from coding_app.exceptions import NumericalBreakdownError
from coding_app.numerics import tau_pairs
from coding_app.patterns.factor_strategy import ChannelFactor, DistortionFactor
from coding_app.patterns.network_strategy import NetworkStrategyFactory, gaussian_tail

logger = logging.getLogger(__name__)

DEFAULT_V_FLOOR = 1e-12
# Максимальна кількість елементів проміжного масиву τ-перебору
CHUNK_ELEMENTS = 2 ** 22


class KernelService:
    """
    Ядра фактора для шести комбінацій {PTH, CTH, CTO} x {ECC, LC}.

    Фактор має вигляд G = c0(y) + c1 y F(τ), тож усі ядра виражаються
    через E[F], похідні D_l = ∂E[F]/∂E[τ_l] та моменти прихованих елементів.
    """

    @staticmethod
    def gauss_H(u):
        """
        Верхній гаусів хвіст H(u) = ∫_u^∞ Dx через erfc.
        """
        value = gaussian_tail(u)
        return float(value) if np.ndim(value) == 0 else value

    @staticmethod
    def cavity_w(k: float, lam_bar, lam_hat, q_l, cto: bool = False):
        """
        Нормовані кавітаційні поля.

        Args:
            k: Поріг
            lam_bar: ∧̄
            lam_hat: ∧̂
            q_l: Перекриття блоку, 0 <= q_l < 1
            cto: Повернути поле знакового елемента (a / √(1 - q_l))

        Returns:
            (w_plus, w_minus) або w для cto=True

        Raises:
            ValueError: Якщо q_l поза [0, 1)
        """
        q_l = np.asarray(q_l, dtype=np.float64)
        if np.any(q_l < 0) or np.any(q_l >= 1):
            raise ValueError("Перекриття q_l має лежати в [0, 1); рушій має обмежити його заздалегідь")
        sigma = np.sqrt(1.0 - q_l)
        shift = np.asarray(lam_bar, dtype=np.float64) - np.asarray(lam_hat, dtype=np.float64)
        if cto:
            return shift / sigma
        return (k + shift) / sigma, (k - shift) / sigma

    @staticmethod
    def kernel_ecc(kin: KernelInput, v_floor: float = DEFAULT_V_FLOOR, tau_order=None) -> KernelOutput:
        """
        Ядра декодування (β = 1) для фактора P(y | y0) каналу.

        Raises:
            ValueError: Якщо вхід не містить параметрів каналу
            NumericalBreakdownError: Якщо V <= v_floor
        """
        if kin.channel is None:
            raise ValueError("Ядро ECC потребує параметрів каналу")
        return KernelService._evaluate(kin, ChannelFactor(kin.channel), v_floor, tau_order)

    @staticmethod
    def kernel_lc(kin: KernelInput, v_floor: float = DEFAULT_V_FLOOR, tau_order=None) -> KernelOutput:
        """
        Ядра кодування зі втратами для фактора e^{-β} + (1 - e^{-β}) Θ(y F).

        Raises:
            ValueError: Якщо вхід не містить beta
            NumericalBreakdownError: Якщо V <= v_floor
        """
        if kin.beta is None:
            raise ValueError("Ядро LC потребує оберненої температури beta")
        return KernelService._evaluate(kin, DistortionFactor(kin.beta), v_floor, tau_order)

    @staticmethod
    def evaluate(kin: KernelInput, v_floor: float = DEFAULT_V_FLOOR, tau_order=None) -> KernelOutput:
        """Обирає ядро ECC або LC за вмістом KernelInput"""
        if kin.is_lossy:
            return KernelService.kernel_lc(kin, v_floor, tau_order)
        return KernelService.kernel_ecc(kin, v_floor, tau_order)

    @staticmethod
    def phi_and_gain(out: KernelOutput, v_floor: float = DEFAULT_V_FLOOR) -> tuple[np.ndarray, np.ndarray]:
        """
        Відношення Φ = U / V та доданок підсилення (ŨV - ṼU) / V².

        Raises:
            NumericalBreakdownError: Якщо V <= v_floor
        """
        V = out.V
        KernelService._check_floor(V, v_floor)
        phi = out.U / V
        gain_term = (out.U_tilde * V - out.V_tilde * out.U) / V ** 2
        if np.ndim(phi) == 0:
            return float(phi), float(gain_term)
        return phi, gain_term

    @staticmethod
    def _check_floor(V, v_floor: float):
        V = np.asarray(V)
        if not np.all(np.isfinite(V)):
            raise NumericalBreakdownError("V ядра не є скінченним")
        if np.any(V <= v_floor):
            raise NumericalBreakdownError(
                f"V ядра {float(np.min(V)):.3e} не перевищує нижньої межі {v_floor:.1e}"
            )

    @staticmethod
    def _evaluate(kin, factor, v_floor, tau_order):
        spec = kin.spec
        strategy = NetworkStrategyFactory.create_strategy(spec)
        mean, slope, curvature = strategy.unit_moments(kin)

        K = spec.K
        batch_shape = mean.shape[:-1]
        flat_mean = mean.reshape(-1, K)
        rows_per_chunk = max(1, CHUNK_ELEMENTS // (len(tau_pairs(K)) * K))
        expected_parts, derivative_parts = [], []
        for start in range(0, max(len(flat_mean), 1), rows_per_chunk):
            expected, derivatives = strategy.branch_expectations(
                flat_mean[start:start + rows_per_chunk], tau_order
            )
            expected_parts.append(expected)
            derivative_parts.append(derivatives)
        expected = np.concatenate(expected_parts).reshape(batch_shape)
        derivatives = np.concatenate(derivative_parts).reshape(batch_shape + (K,))

        c0, c1 = factor.coefficients(kin.y)
        gain = c1 * spec.polarity * kin.y
        V = c0 + gain * expected
        U = gain[..., None] * slope * derivatives
        U_tilde = gain[..., None] * curvature * derivatives
        V = np.broadcast_to(V[..., None], U.shape)
        KernelService._check_floor(V, v_floor)
        return KernelOutput(U=U, V=V, U_tilde=U_tilde, V_tilde=-U)
