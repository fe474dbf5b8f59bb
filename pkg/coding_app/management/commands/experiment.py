"""
Команда для запуску експериментів кодування та стиснення.

Використання:
    python manage.py experiment ecc-sweep --network pth --K 1 --N 1000 --rates 0.15,0.25,0.4 --seed 1
    python manage.py experiment lc-hist --N 1000 --rates 0.4 --bias 0.5 --seed 7
    python manage.py experiment bounds --p 0.1 --r 0.2 --bias 0.5 --rates 0.4 --seed 0 --no-record
"""
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from coding_app.domain.experiments import ExperimentKind
from coding_app.domain.networks import NetworkKind
from coding_app.forms import ExperimentConfigForm
from coding_app.services.experiment_service import ExperimentService
from coding_app.services.export_service import ExportService
from coding_app.services.record_service import RecordService

CONFIG_ERROR = 2
BREAKDOWN_ERROR = 3


class Command(BaseCommand):
    help = 'Запускає експеримент BP-декодування, стиснення або обчислення теоретичних меж'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='subcommand', required=True)
        for kind in ExperimentKind:
            subparser = subparsers.add_parser(kind.value, help=f'Експеримент {kind.value}')
            self._add_common_arguments(subparser)

    @staticmethod
    def _add_common_arguments(parser):
        parser.add_argument('--network', choices=[kind.value for kind in NetworkKind], help='Тип мережі')
        parser.add_argument('--K', type=int, help='Кількість прихованих елементів')
        parser.add_argument('--N', type=int, help='Довжина повідомлення')
        parser.add_argument('--rates', help='Швидкості через кому')
        parser.add_argument('--M', type=int, help='Фіксована довжина кодового слова')
        parser.add_argument('--p', type=float, help='Ймовірність інверсії +1')
        parser.add_argument('--r', type=float, help='Ймовірність інверсії -1')
        parser.add_argument('--bias', type=float, help='Зсув джерела')
        parser.add_argument('--gamma', help='Значення γ через кому')
        parser.add_argument('--beta', help='Значення β через кому')
        parser.add_argument('--k', type=float, help='Поріг передавальної функції')
        parser.add_argument('--runs', type=int, help='Кількість прогонів')
        parser.add_argument('--restarts', type=int, help='Перезапуски для гістограм')
        parser.add_argument('--messages', type=int, help='Повідомлення для гістограм')
        parser.add_argument('--iters', type=int, help='Кількість ітерацій BP')
        parser.add_argument('--delta', type=float, help='Масштаб початкових повідомлень')
        parser.add_argument('--seed', type=int, help='Початкове зерно')
        parser.add_argument('--out', help='Базовий шлях для результатів')
        parser.add_argument('--paper-scale', action='store_true', default=None, help='Повний масштаб прогонів')
        parser.add_argument('--config', help='Файл конфігурації key=value')
        parser.add_argument('--workers', type=int, help='Кількість процесів joblib')
        parser.add_argument(
            '--no-record', dest='record', action='store_false', default=None, help='Не зберігати запуск у базі',
        )

    def handle(self, *args, **options):
        values = {name: options.get(name) for name in ExperimentConfigForm.field_names()}
        values['kind'] = options['subcommand']
        try:
            config = ExperimentConfigForm.from_sources(values, options.get('config')).to_config()
        except ValueError as error:
            raise CommandError(str(error), returncode=CONFIG_ERROR) from error

        self.stdout.write(f'Експеримент {config.kind.value}: {config.network.value} K={config.K} N={config.N}')
        outcome = ExperimentService.execute(config)

        bpcode = getattr(settings, 'BPCODE', {})
        base = Path(config.out)
        if not base.is_absolute():
            base = Path(bpcode.get('OUTPUT_DIR', 'results')) / base
        version = ExportService.version_string()
        paths = ExportService.write_all(outcome, base, version)

        degraded = outcome.aborted > 0 and outcome.worst_aborted_fraction >= bpcode.get('ABORT_FRACTION', 0.5)
        if config.record:
            run = RecordService.record_run(outcome, version, paths, degraded=degraded)
            self.stdout.write(f'Запуск #{run.pk} збережено')
        for path in paths:
            self.stdout.write(f'  {path}')

        if degraded:
            raise CommandError(
                f'Числовий збій у {outcome.worst_aborted_fraction:.0%} прогонів '
                f'(перервано {outcome.aborted})',
                returncode=BREAKDOWN_ERROR,
            )
        self.stdout.write(self.style.SUCCESS(
            f'Готово: {len(outcome.rows)} рядків за {outcome.wall_time:.1f} с'
        ))
