"""
Service Layer для збереження запусків у базі даних
"""
import logging
import math
from collections import defaultdict

from django.db import transaction

from coding_app.domain.experiments import ExperimentOutcome
from coding_app.models import ExperimentRun, ResultRecord

logger = logging.getLogger(__name__)


def _finite_or_none(value: float):
    return value if value is not None and math.isfinite(value) else None


class RecordService:
    """Журнал експериментів"""

    @staticmethod
    @transaction.atomic
    def record_run(outcome: ExperimentOutcome, version: str, output_paths, degraded: bool = False) -> ExperimentRun:
        """
        Зберігає запуск разом з усіма рядками результатів.

        Args:
            outcome: Результат виконання експерименту
            version: Рядок версії коду
            output_paths: Шляхи до записаних файлів
            degraded: Чи перевищено допустиму частку перерваних прогонів

        Returns:
            Створений ExperimentRun
        """
        config = outcome.config
        run = ExperimentRun.objects.create(
            kind=config.kind.value,
            network=config.network.value,
            K=config.K,
            N=config.N,
            seed=config.seed,
            config=config.echo(),
            version=version,
            status='degraded' if degraded else 'completed',
            wall_time=outcome.wall_time,
            aborted=outcome.aborted,
            output_paths=[str(path) for path in output_paths],
        )
        ResultRecord.objects.bulk_create([
            ResultRecord(
                run=run,
                params=row.params,
                metric=row.metric,
                mean=_finite_or_none(row.mean),
                std=_finite_or_none(row.std) or 0.0,
                count=row.count,
                aborted=row.aborted,
                wall_time=row.wall_time,
            )
            for row in outcome.rows
        ])
        logger.info("Запуск #%d збережено (%d рядків)", run.pk, len(outcome.rows))
        return run

    @staticmethod
    def metric_summary(run: ExperimentRun) -> dict:
        """
        Групує результати запуску за показником.

        Returns:
            Словник {показник: [{params, mean, std, count}, ...]}
        """
        summary = defaultdict(list)
        for record in run.results.all():
            summary[record.metric].append({
                'params': record.params,
                'mean': record.mean,
                'std': record.std,
                'count': record.count,
            })
        return dict(summary)
