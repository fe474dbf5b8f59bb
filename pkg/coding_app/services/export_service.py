"""
Service Layer для запису результатів: CSV, JSON-підсумок та вибірки гістограм
"""
import csv
import logging
import math
import subprocess
from pathlib import Path

from rest_framework.renderers import JSONRenderer

import coding_app
from coding_app.domain.experiments import ExperimentOutcome
from coding_app.serializers import ExperimentSummarySerializer

logger = logging.getLogger(__name__)

# Фіксований порядок колонок CSV; wall_time завжди остання
CSV_COLUMNS = [
    'experiment', 'network', 'K', 'N', 'M', 'rate', 'message',
    'p', 'r', 'bias', 'gamma', 'beta', 'k', 'polarity',
    'iterations', 'delta', 'seed', 'distortion_level',
    'metric', 'mean', 'std', 'count', 'aborted', 'wall_time',
]


def format_value(value) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return 'nan' if math.isnan(value) else f'{value:.12g}'
    return str(value)


class ExportService:
    """Запис результатів експерименту у файли"""

    @staticmethod
    def version_string() -> str:
        """Версія у стилі git describe або версія пакета, якщо git недоступний"""
        try:
            described = subprocess.run(
                ['git', 'describe', '--tags', '--always', '--dirty'],
                cwd=Path(coding_app.__file__).resolve().parent,
                capture_output=True,
                text=True,
                timeout=5,
                check=True,
            ).stdout.strip()
        except (OSError, subprocess.SubprocessError):
            described = ''
        return described or f'v{coding_app.__version__}'

    @staticmethod
    def csv_rows(outcome: ExperimentOutcome) -> list[dict]:
        rows = []
        for row in outcome.rows:
            record = {column: format_value(row.params.get(column)) for column in CSV_COLUMNS}
            record.update({
                'metric': row.metric,
                'mean': format_value(float(row.mean)),
                'std': format_value(float(row.std)),
                'count': str(row.count),
                'aborted': str(row.aborted),
                'wall_time': f'{row.wall_time:.3f}',
            })
            rows.append(record)
        return rows

    @staticmethod
    def write_csv(outcome: ExperimentOutcome, path: Path) -> Path:
        """Записує рядки результатів з колонками CSV_COLUMNS"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open('w', newline='', encoding='utf-8') as handle:
            writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS, lineterminator='\n')
            writer.writeheader()
            writer.writerows(ExportService.csv_rows(outcome))
        return path

    @staticmethod
    def write_json(outcome: ExperimentOutcome, path: Path, version: str) -> Path:
        """Записує JSON-підсумок через ExperimentSummarySerializer"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        summary = ExperimentSummarySerializer({
            'version': version,
            'config': outcome.config.echo(),
            'wall_time': outcome.wall_time,
            'aborted': outcome.aborted,
            'sample_count': len(outcome.samples),
            'rows': [
                {
                    'params': row.params,
                    'metric': row.metric,
                    'mean': row.mean,
                    'std': row.std,
                    'count': row.count,
                    'aborted': row.aborted,
                    'wall_time': row.wall_time,
                    'abort_reasons': list(row.abort_reasons),
                }
                for row in outcome.rows
            ],
        })
        path.write_bytes(JSONRenderer().render(summary.data, renderer_context={'indent': 2}))
        return path

    @staticmethod
    def write_samples(samples, path: Path) -> Path:
        """Одне значення на рядок"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(''.join(f'{value:.12g}\n' for value in samples), encoding='utf-8')
        return path

    @staticmethod
    def write_all(outcome: ExperimentOutcome, base: Path, version: str) -> list[Path]:
        """
        Записує <base>.csv, <base>.json та, для гістограм, <base>.samples.txt.

        Returns:
            Список записаних шляхів
        """
        base = Path(base)
        paths = [
            ExportService.write_csv(outcome, base.with_name(base.name + '.csv')),
            ExportService.write_json(outcome, base.with_name(base.name + '.json'), version),
        ]
        if outcome.config.kind.is_histogram:
            paths.append(ExportService.write_samples(outcome.samples, base.with_name(base.name + '.samples.txt')))
        for path in paths:
            logger.info("Записано %s", path)
        return paths
