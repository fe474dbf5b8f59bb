"""
Service Layer для пакетних експериментів
Прогони та перезапуски виконуються через joblib і збираються
у фіксованому порядку (прогін, перезапуск)
"""
import logging
import time
from dataclasses import replace

import numpy as np
from django.conf import settings
from joblib import Parallel, delayed

from coding_app.domain.bp import BPConfig, Task
from coding_app.domain.experiments import (
    ExperimentConfig,
    ExperimentKind,
    ExperimentOutcome,
    HistogramResult,
    ResultRow,
)
from coding_app.domain.networks import NetworkSpec
from coding_app.domain.spins import SeededStream
from coding_app.exceptions import NumericalBreakdownError
from coding_app.patterns.problem_factory import ProblemFactory
from coding_app.services.bp_service import BeliefPropagationService
from coding_app.services.channel_service import ChannelService
from coding_app.services.network_service import NetworkService
from coding_app.services.spin_service import SpinService

logger = logging.getLogger(__name__)

ECC_METRICS = ('blockwise_abs_overlap', 'overlap')
RD_GRID_POINTS = 51


def _bpcode(name, default):
    return getattr(settings, 'BPCODE', {}).get(name, default)


def _trial_stream(config: ExperimentConfig, point: int, run: int) -> SeededStream:
    return SeededStream.for_trial(config.seed, config.kind.value, point, run)


def _bp_config(task: Task, config: ExperimentConfig, gamma: float, beta: float = 1.0) -> BPConfig:
    return BPConfig.from_settings(
        task,
        iterations=config.iterations,
        gamma=gamma,
        beta=beta,
        init_scale=config.delta,
    )


def _ecc_trial(spec, config, M, cfg, point, run, restarts):
    """Одне повідомлення ECC: задача та BP з кожного перезапуску"""
    stream = _trial_stream(config, point, run)
    problem = ProblemFactory.create_ecc_problem(spec, config.N, M, config.channel, stream)
    estimates = []
    try:
        for restart in range(restarts):
            estimate, _ = BeliefPropagationService.run(problem, cfg, stream.child('init', restart))
            estimates.append(estimate)
    except NumericalBreakdownError as error:
        return {'aborted': f"прогін {run}: {error}"}
    return {'planted': problem.planted, 'estimates': estimates}


def _lc_trial(spec, config, M, cfg, point, run, restarts):
    """Одне повідомлення джерела LC: кодування BP з кожного перезапуску"""
    stream = _trial_stream(config, point, run)
    problem = ProblemFactory.create_lc_problem(spec, config.N, M, config.source, stream)
    estimates, distortions = [], []
    try:
        for restart in range(restarts):
            estimate, _ = BeliefPropagationService.run(problem, cfg, stream.child('init', restart))
            decoded = NetworkService.encode(spec, estimate, problem.codebook)
            estimates.append(estimate)
            distortions.append(SpinService.hamming_distortion(problem.observed, decoded))
    except NumericalBreakdownError as error:
        return {'aborted': f"прогін {run}: {error}"}
    return {'estimates': estimates, 'distortions': distortions}


def _aggregate(params: dict, metric: str, values, aborted: int, wall_time: float, reasons=()) -> ResultRow:
    values = np.asarray(values, dtype=np.float64)
    count = int(values.size)
    return ResultRow(
        params=params,
        metric=metric,
        mean=float(np.mean(values)) if count else float('nan'),
        std=float(np.std(values, ddof=1)) if count > 1 else 0.0,
        count=count,
        aborted=aborted,
        wall_time=wall_time,
        abort_reasons=tuple(reasons),
    )


class ExperimentService:
    """Пакетні експерименти: криві за швидкістю, гістограми перекриттів, теоретичні межі"""

    @staticmethod
    def execute(config: ExperimentConfig) -> ExperimentOutcome:
        """
        Виконує експеримент відповідного типу.

        Returns:
            ExperimentOutcome з рядками результатів та вибірками гістограм
        """
        started = time.perf_counter()
        logger.info("Старт експерименту %s (seed=%s)", config.kind.value, config.seed)
        samples = ()
        if config.kind is ExperimentKind.ECC_SWEEP:
            rows = ExperimentService.sweep_ecc(config)
        elif config.kind is ExperimentKind.LC_SWEEP:
            rows = ExperimentService.sweep_lc(config)
        elif config.kind is ExperimentKind.BOUNDS:
            rows = ExperimentService.bounds(config)
        else:
            run = ExperimentService.hist_ecc if config.kind is ExperimentKind.ECC_HIST else ExperimentService.hist_lc
            histograms = run(config)
            rows = [row for histogram in histograms for row in histogram.rows]
            samples = tuple(value for histogram in histograms for value in histogram.samples)
        wall_time = time.perf_counter() - started
        logger.info("Експеримент %s завершено за %.1f с, рядків: %d", config.kind.value, wall_time, len(rows))
        return ExperimentOutcome(config=config, rows=tuple(rows), samples=samples, wall_time=wall_time)

    @staticmethod
    def ecc_spec(config: ExperimentConfig) -> NetworkSpec:
        """
        Мережа для ECC: поріг з конфігурації або налаштований на зсув,
        що досягає пропускної здатності каналу.
        """
        spec = NetworkSpec(config.network, config.K)
        if config.k is not None:
            return spec.with_threshold(config.k)
        _, input_bias = ChannelService.bac_capacity(config.channel)
        k = ChannelService.tune_threshold(
            spec, input_bias, k_max=_bpcode('K_MAX_THRESHOLD', 10.0), strict=False
        )
        return spec.with_threshold(k)

    @staticmethod
    def lc_spec(config: ExperimentConfig) -> NetworkSpec:
        """
        Мережа для LC: полярність за зсувом джерела, поріг з конфігурації
        або налаштований на зсув джерела.
        """
        source = config.source
        spec = NetworkSpec(config.network, config.K, polarity=source.preferred_polarity)
        if config.k is not None:
            return spec.with_threshold(config.k)
        k = ChannelService.tune_threshold(
            spec, source.bias, k_max=_bpcode('K_MAX_THRESHOLD', 10.0), strict=False
        )
        return spec.with_threshold(k)

    @staticmethod
    def _params(config: ExperimentConfig, spec: NetworkSpec, M: int, rate: float, gamma, beta) -> dict:
        task = config.kind.task
        return {
            'experiment': config.kind.value,
            'network': spec.kind.value,
            'K': spec.K,
            'N': config.N,
            'M': M,
            'rate': config.rate_for(rate),
            'p': config.p if task is Task.ECC else None,
            'r': config.r if task is Task.ECC else None,
            'bias': config.bias if task is Task.LC else None,
            'gamma': gamma,
            'beta': beta,
            'k': spec.k,
            'polarity': spec.polarity,
            'iterations': _bp_config(task, config, gamma).iterations,
            'delta': config.delta,
            'seed': config.seed,
        }

    @staticmethod
    def sweep_ecc(config: ExperimentConfig) -> list[ResultRow]:
        """
        Крива декодування: для кожної пари (γ, R) середнє блокове |перекриття|
        та знакове перекриття з вихідним повідомленням.

        Returns:
            Рядки з метриками blockwise_abs_overlap та overlap
        """
        spec = ExperimentService.ecc_spec(config)
        rows = []
        for point, (gamma, rate) in enumerate(config.points()):
            started = time.perf_counter()
            M = config.M_for(rate)
            cfg = _bp_config(Task.ECC, config, gamma)
            trials = Parallel(n_jobs=config.workers)(
                delayed(_ecc_trial)(spec, config, M, cfg, point, run, 1)
                for run in range(config.runs)
            )
            reasons = [trial['aborted'] for trial in trials if 'aborted' in trial]
            for reason in reasons:
                logger.warning("Перерваний прогін: %s", reason)
            finished = [trial for trial in trials if 'aborted' not in trial]
            values = {
                'blockwise_abs_overlap': [
                    SpinService.blockwise_abs_overlap(t['estimates'][0], t['planted'], spec.K) for t in finished
                ],
                'overlap': [SpinService.overlap(t['estimates'][0], t['planted']) for t in finished],
            }
            wall_time = time.perf_counter() - started
            params = ExperimentService._params(config, spec, M, rate, gamma, None)
            for metric in ECC_METRICS:
                rows.append(_aggregate(params, metric, values[metric], len(reasons), wall_time, reasons))
            logger.info(
                "ECC γ=%s R=%s M=%d: <|overlap|>=%.4f (%d прогонів, перервано %d)",
                gamma, rate, M, rows[-2].mean, rows[-2].count, len(reasons),
            )
        return rows

    @staticmethod
    def hist_ecc(config: ExperimentConfig) -> list[HistogramResult]:
        """
        Гістограма попарних знакових перекриттів між оцінками з різних
        перезапусків для кожного вихідного повідомлення.

        Returns:
            HistogramResult для кожної пари (γ, R)
        """
        spec = ExperimentService.ecc_spec(config)
        results = []
        for point, (gamma, rate) in enumerate(config.points()):
            started = time.perf_counter()
            M = config.M_for(rate)
            cfg = _bp_config(Task.ECC, config, gamma)
            trials = Parallel(n_jobs=config.workers)(
                delayed(_ecc_trial)(spec, config, M, cfg, point, message, config.restarts)
                for message in range(config.messages)
            )
            params = ExperimentService._params(config, spec, M, rate, gamma, None)
            results.append(ExperimentService._histogram(
                params, trials, started,
                per_message=lambda trial: [
                    SpinService.overlap(estimate, trial['planted']) for estimate in trial['estimates']
                ],
                metric='message_overlap',
            ))
        return results

    @staticmethod
    def sweep_lc(config: ExperimentConfig) -> list[ResultRow]:
        """
        Крива стиснення: середнє спотворення Геммінга для кожної пари (γ, R).
        Якщо задано кілька β, у точці залишається β з найменшим середнім
        спотворенням.

        Returns:
            Рядки з метриками distortion та shannon_distortion
        """
        spec = ExperimentService.lc_spec(config)
        rows = []
        for point, (gamma, rate) in enumerate(config.points()):
            M = config.M_for(rate)
            base_cfg = _bp_config(Task.LC, config, gamma)
            candidates = []
            for beta in config.betas:
                started = time.perf_counter()
                cfg = base_cfg.evolve(beta=beta)
                trials = Parallel(n_jobs=config.workers)(
                    delayed(_lc_trial)(spec, config, M, cfg, point, run, 1)
                    for run in range(config.runs)
                )
                reasons = [trial['aborted'] for trial in trials if 'aborted' in trial]
                for reason in reasons:
                    logger.warning("Перерваний прогін: %s", reason)
                distortions = [trial['distortions'][0] for trial in trials if 'aborted' not in trial]
                params = ExperimentService._params(config, spec, M, rate, gamma, beta)
                row = _aggregate(
                    params, 'distortion', distortions, len(reasons), time.perf_counter() - started, reasons
                )
                logger.info("LC γ=%s R=%s β=%s: <D>=%.4f", gamma, rate, beta, row.mean)
                candidates.append(row)
            finished = [row for row in candidates if row.count] or candidates
            best = min(finished, key=lambda row: row.mean)
            if len(candidates) > 1:
                best = replace(
                    best,
                    aborted=sum(row.aborted for row in candidates),
                    abort_reasons=tuple(reason for row in candidates for reason in row.abort_reasons),
                    aborted_share=max(row.aborted_fraction for row in candidates),
                )
            rows.append(best)
            rows.append(ExperimentService._shannon_row(config, best.params, best.params['rate']))
        return rows

    @staticmethod
    def hist_lc(config: ExperimentConfig) -> list[HistogramResult]:
        """
        Гістограма попарних перекриттів кодових повідомлень з різних
        перезапусків для кожного повідомлення джерела (β - перше значення сітки).
        """
        spec = ExperimentService.lc_spec(config)
        beta = config.betas[0]
        results = []
        for point, (gamma, rate) in enumerate(config.points()):
            started = time.perf_counter()
            M = config.M_for(rate)
            cfg = _bp_config(Task.LC, config, gamma, beta)
            trials = Parallel(n_jobs=config.workers)(
                delayed(_lc_trial)(spec, config, M, cfg, point, message, config.restarts)
                for message in range(config.messages)
            )
            params = ExperimentService._params(config, spec, M, rate, gamma, beta)
            results.append(ExperimentService._histogram(
                params, trials, started,
                per_message=lambda trial: trial['distortions'],
                metric='message_distortion',
            ))
        return results

    @staticmethod
    def _histogram(params, trials, started, per_message, metric) -> HistogramResult:
        reasons = [trial['aborted'] for trial in trials if 'aborted' in trial]
        for reason in reasons:
            logger.warning("Перерване повідомлення: %s", reason)
        samples, rows, pooled = [], [], []
        for message, trial in enumerate(trials):
            if 'aborted' in trial:
                continue
            samples.extend(SpinService.pairwise_overlaps(trial['estimates']))
            values = per_message(trial)
            pooled.extend(values)
            rows.append(_aggregate({**params, 'message': message}, metric, values, 0, 0.0))
        wall_time = time.perf_counter() - started
        rows.append(_aggregate(params, metric, pooled, len(reasons), wall_time, reasons))
        rows.append(_aggregate(params, 'pairwise_overlap', samples, len(reasons), wall_time, reasons))
        logger.info(
            "Гістограма R=%s γ=%s: %d попарних перекриттів, перервано %d",
            params['rate'], params['gamma'], len(samples), len(reasons),
        )
        return HistogramResult(
            params=params, samples=tuple(samples), rows=tuple(rows),
            aborted=len(reasons), wall_time=wall_time,
        )

    @staticmethod
    def _shannon_row(config: ExperimentConfig, params: dict, rate: float) -> ResultRow:
        source = config.source
        if rate >= ChannelService.binary_entropy(source.bias):
            bound = 0.0
        else:
            bound = ChannelService.shannon_distortion(source, rate)
        return ResultRow(params=params, metric='shannon_distortion', mean=bound, std=0.0, count=1)

    @staticmethod
    def bounds(config: ExperimentConfig) -> list[ResultRow]:
        """
        Теоретичні межі: пропускна здатність каналу (p, r), крива R(D)
        для зсуву джерела та D(R) для заданих швидкостей.
        """
        started = time.perf_counter()
        channel, source = config.channel, config.source
        base = {'experiment': config.kind.value, 'seed': config.seed}
        capacity, input_bias = ChannelService.bac_capacity(channel)
        channel_params = {**base, 'p': channel.p, 'r': channel.r}
        rows = [
            ResultRow(params=channel_params, metric='capacity', mean=capacity, std=0.0, count=1),
            ResultRow(params=channel_params, metric='capacity_input_bias', mean=input_bias, std=0.0, count=1),
        ]
        source_params = {**base, 'bias': source.bias}
        for level in np.linspace(0.0, min(source.bias, 1.0 - source.bias), RD_GRID_POINTS):
            rows.append(ResultRow(
                params={**source_params, 'distortion_level': float(level)},
                metric='rate_distortion',
                mean=ChannelService.rate_distortion(source, float(level)),
                std=0.0,
                count=1,
            ))
        for rate in config.rates:
            rows.append(ExperimentService._shannon_row(config, {**source_params, 'rate': rate}, rate))
        wall_time = time.perf_counter() - started
        logger.info("Межі: C(p=%s, r=%s)=%.6f при зсуві входу %.6f", channel.p, channel.r, capacity, input_bias)
        return [replace(row, wall_time=wall_time) for row in rows]
