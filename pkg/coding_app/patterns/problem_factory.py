"""
GoF Pattern: Factory Method
Інкапсулює створення задач декодування та кодування зі втратами
"""
import logging
from typing import Optional

from coding_app.domain.bp import Problem, Task
from coding_app.domain.channels import ChannelParams, SourceModel
from coding_app.domain.networks import Codebook, NetworkSpec
from coding_app.domain.spins import SeededStream, SpinVector
from coding_app.services.channel_service import ChannelService
from coding_app.services.network_service import NetworkService
from coding_app.services.spin_service import SpinService

logger = logging.getLogger(__name__)


class ProblemFactory:
    """Фабрика для створення задач BP"""

    @staticmethod
    def _validate_sizes(spec: NetworkSpec, N: int, M: int):
        if N <= 0 or M <= 0:
            raise ValueError("N та M мають бути додатними")
        if N % spec.K != 0:
            raise ValueError(f"K={spec.K} не ділить N={N}")

    @staticmethod
    def create_ecc_problem(
        spec: NetworkSpec,
        N: int,
        M: int,
        channel: ChannelParams,
        stream: SeededStream,
        message: Optional[SpinVector] = None,
        codebook: Optional[Codebook] = None,
    ) -> Problem:
        """
        Створює задачу декодування з відомим вихідним повідомленням.

        Повідомлення, кодова книга та шум каналу беруться з окремих
        дочірніх потоків, тож кожен розіграш відтворюваний незалежно.

        Args:
            spec: Мережа з уже налаштованим порогом
            N: Довжина повідомлення
            M: Довжина кодового слова
            channel: Параметри каналу
            stream: Потік прогону
            message: Вихідне повідомлення (за замовчуванням випадкове)
            codebook: Кодова книга (за замовчуванням випадкова)

        Returns:
            Задача ECC з planted = s⁰

        Raises:
            ValueError: Якщо розміри некоректні
        """
        ProblemFactory._validate_sizes(spec, N, M)
        if message is None:
            message = SpinService.draw_uniform_spins(N, stream.child('message'))
        if codebook is None:
            codebook = Codebook.random(M, N, spec.K, stream.child('codebook'))
        codeword = NetworkService.encode(spec, message, codebook)
        received = ChannelService.transmit(codeword, channel, stream.child('channel'))
        return Problem(
            task=Task.ECC,
            spec=spec,
            codebook=codebook,
            observed=received,
            channel=channel,
            planted=message,
        )

    @staticmethod
    def create_lc_problem(
        spec: NetworkSpec,
        N: int,
        M: int,
        source: SourceModel,
        stream: SeededStream,
        observed: Optional[SpinVector] = None,
        codebook: Optional[Codebook] = None,
    ) -> Problem:
        """
        Створює задачу стиснення зі втратами для повідомлення джерела довжини M.

        Raises:
            ValueError: Якщо розміри некоректні
        """
        ProblemFactory._validate_sizes(spec, N, M)
        if observed is None:
            observed = ChannelService.sample_source(M, source, stream.child('source'))
        if codebook is None:
            codebook = Codebook.random(M, N, spec.K, stream.child('codebook'))
        return Problem(task=Task.LC, spec=spec, codebook=codebook, observed=observed, source=source)
