"""
Service Layer для каналу, джерела та теоретичних меж
"""
import logging
from math import log

import numpy as np
from scipy.optimize import bisect, brentq, minimize_scalar
from scipy.special import entr

from coding_app.domain.channels import ChannelParams, SourceModel
from coding_app.domain.networks import NetworkSpec
from coding_app.domain.spins import SeededStream, SpinVector
from coding_app.exceptions import UnattainableBiasError
from coding_app.patterns.network_strategy import NetworkStrategyFactory

logger = logging.getLogger(__name__)

BIAS_TOLERANCE = 1e-9
THRESHOLD_GRID_POINTS = 2001
PLATEAU_OFFSET = 0.01


class ChannelService:
    """Операції бінарного асиметричного каналу та зміщеного джерела"""

    @staticmethod
    def likelihood(y, y0, ch: ChannelParams):
        """
        Умовна ймовірність P(y | y0) = ½ + (y/2)[(1 - r - p) y0 + (r - p)].

        Працює як зі скалярами, так і з масивами.
        """
        y = np.asarray(y, dtype=np.float64)
        y0 = np.asarray(y0, dtype=np.float64)
        value = 0.5 + 0.5 * y * ((1.0 - ch.r - ch.p) * y0 + (ch.r - ch.p))
        return float(value) if value.ndim == 0 else value

    @staticmethod
    def transmit(y0: SpinVector, ch: ChannelParams, stream: SeededStream) -> SpinVector:
        """
        Передає кодове слово через канал.

        Символ +1 інвертується з ймовірністю p, символ -1 з ймовірністю r
        (так, як це задає формула P(y | y0)).
        """
        if ch.is_noiseless:
            return y0
        draws = stream.generator().random(len(y0))
        flip_probability = np.where(y0.values == 1, ch.p, ch.r)
        return SpinVector(np.where(draws < flip_probability, -y0.values, y0.values))

    @staticmethod
    def sample_source(M: int, src, stream: SeededStream) -> SpinVector:
        """
        Незалежні символи джерела з P(+1) = bias.

        Args:
            M: Довжина повідомлення
            src: SourceModel або ймовірність +1 у [0, 1]
            stream: Потік випадкових чисел

        Raises:
            ValueError: Якщо M <= 0 або ймовірність поза [0, 1]
        """
        if M <= 0:
            raise ValueError("Довжина повідомлення джерела має бути додатною")
        bias = src.bias if isinstance(src, SourceModel) else float(src)
        if not 0.0 <= bias <= 1.0:
            raise ValueError("Ймовірність символу +1 має лежати в [0, 1]")
        draws = stream.generator().random(M)
        return SpinVector(np.where(draws < bias, 1, -1))

    @staticmethod
    def binary_entropy(q):
        """
        Двійкова ентропія H₂(q) у бітах, 0 log 0 = 0.

        Raises:
            ValueError: Якщо q поза [0, 1]
        """
        q = np.asarray(q, dtype=np.float64)
        if np.any(q < 0) or np.any(q > 1):
            raise ValueError("Аргумент двійкової ентропії має лежати в [0, 1]")
        value = (entr(q) + entr(1.0 - q)) / log(2.0)
        return float(value) if value.ndim == 0 else value

    @staticmethod
    def mutual_information(ch: ChannelParams, input_bias: float) -> float:
        """I(X; Y) для P(X = +1) = input_bias"""
        H2 = ChannelService.binary_entropy
        output_bias = input_bias * (1.0 - ch.p) + (1.0 - input_bias) * ch.r
        noise = input_bias * H2(ch.p) + (1.0 - input_bias) * H2(ch.r)
        return H2(output_bias) - noise

    @staticmethod
    def bac_capacity(ch: ChannelParams) -> tuple[float, float]:
        """
        Пропускна здатність каналу та оптимальний зсув входу.

        Returns:
            Кортеж (capacity, input_bias)
        """
        if ch.is_symmetric:
            return 1.0 - ChannelService.binary_entropy(ch.p), 0.5
        result = minimize_scalar(
            lambda b: -ChannelService.mutual_information(ch, b),
            bounds=(0.0, 1.0),
            method='bounded',
            options={'xatol': 1e-10},
        )
        input_bias = float(result.x)
        capacity = ChannelService.mutual_information(ch, input_bias)
        logger.debug("Пропускна здатність p=%s r=%s: %.6f при зсуві %.6f", ch.p, ch.r, capacity, input_bias)
        return capacity, input_bias

    @staticmethod
    def shannon_distortion(src: SourceModel, R: float) -> float:
        """
        Мінімальне спотворення D для швидкості R: H₂(p) - H₂(D) = R.

        Raises:
            ValueError: Якщо R <= 0 або R > H₂(p)
        """
        H2 = ChannelService.binary_entropy
        source_entropy = H2(src.bias)
        if R <= 0:
            raise ValueError("Швидкість R має бути додатною")
        if abs(R - source_entropy) <= 1e-12:
            return 0.0
        if R > source_entropy:
            raise ValueError(
                f"Швидкість R={R} перевищує ентропію джерела {source_entropy:.6f}; межа D=0"
            )
        upper = min(src.bias, 1.0 - src.bias)
        return float(bisect(lambda D: source_entropy - H2(D) - R, 0.0, upper, xtol=1e-10))

    @staticmethod
    def rate_distortion(src: SourceModel, D: float) -> float:
        """R(D) = H₂(p) - H₂(D) для D <= min(p, 1 - p), інакше 0"""
        H2 = ChannelService.binary_entropy
        if D < 0:
            raise ValueError("Спотворення не може бути від'ємним")
        if D >= min(src.bias, 1.0 - src.bias):
            return 0.0
        return float(H2(src.bias) - H2(D))

    @staticmethod
    def tune_threshold(
        spec: NetworkSpec,
        target_bias: float,
        k_max: float = 10.0,
        strict: bool = True,
    ) -> float:
        """
        Найменший поріг k, за якого зсув виходу мережі дорівнює target_bias.

        Для CTO зсув є ступінчастою функцією k; повертається ліва межа
        першого відповідного плато плюс min(0.01, половина його ширини).

        Args:
            spec: Мережа (поле k ігнорується)
            target_bias: Бажана ймовірність виходу +1
            k_max: Верхня межа пошуку
            strict: Якщо False, замість помилки повертається найближчий досяжний поріг

        Returns:
            Поріг k

        Raises:
            UnattainableBiasError: Якщо цільовий зсув недосяжний і strict=True
        """
        strategy = NetworkStrategyFactory.create_strategy(spec.with_threshold(0.0))
        breakpoints = strategy.threshold_breakpoints()
        if breakpoints is not None:
            return ChannelService._tune_plateau(spec, target_bias, breakpoints, strict)
        return ChannelService._tune_continuous(spec, target_bias, k_max, strict)

    @staticmethod
    def _bias_at(spec: NetworkSpec, k: float) -> float:
        return NetworkStrategyFactory.create_strategy(spec.with_threshold(k)).output_bias()

    @staticmethod
    def _tune_continuous(spec, target_bias, k_max, strict):
        grid = np.linspace(0.0, k_max, THRESHOLD_GRID_POINTS)
        gaps = np.array([ChannelService._bias_at(spec, k) - target_bias for k in grid])
        if 0.0 < target_bias < 1.0:
            for index, gap in enumerate(gaps):
                if abs(gap) <= BIAS_TOLERANCE:
                    return float(grid[index])
                if index + 1 < len(gaps) and gap * gaps[index + 1] < 0:
                    return float(brentq(
                        lambda k: ChannelService._bias_at(spec, k) - target_bias,
                        grid[index], grid[index + 1], xtol=1e-14,
                    ))
        message = f"Зсув {target_bias} недосяжний для {spec.kind.label} з K={spec.K} на [0, {k_max}]"
        if strict:
            raise UnattainableBiasError(message)
        nearest = float(grid[int(np.argmin(np.abs(gaps)))])
        logger.warning("%s; використано найближчий поріг k=%.6f", message, nearest)
        return nearest

    @staticmethod
    def _tune_plateau(spec, target_bias, breakpoints, strict):
        edges = [float(b) for b in breakpoints]
        if edges[0] > 0.0:
            edges.insert(0, 0.0)
        plateaus = []
        for index, left in enumerate(edges):
            width = edges[index + 1] - left if index + 1 < len(edges) else np.inf
            k = left + min(PLATEAU_OFFSET, width / 2.0)
            plateaus.append((k, ChannelService._bias_at(spec, left)))
        for k, bias in plateaus:
            if abs(bias - target_bias) <= BIAS_TOLERANCE:
                return k
        message = f"Зсув {target_bias} недосяжний для {spec.kind.label} з K={spec.K}"
        if strict:
            raise UnattainableBiasError(message)
        k, bias = min(plateaus, key=lambda item: abs(item[1] - target_bias))
        logger.warning("%s; використано найближче плато k=%.6f зі зсувом %.6f", message, k, bias)
        return k
