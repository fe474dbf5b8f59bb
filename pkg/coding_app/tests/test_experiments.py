import csv
import json
import math
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from coding_app.domain.experiments import ExperimentConfig, ExperimentKind, ExperimentOutcome, ResultRow
from coding_app.domain.networks import NetworkKind
from coding_app.models import ExperimentRun, ResultRecord
from coding_app.services.experiment_service import ExperimentService
from coding_app.services.export_service import CSV_COLUMNS, ExportService, format_value
from coding_app.services.record_service import RecordService

SMALL = {'N': 30, 'runs': 2, 'restarts': 2, 'messages': 2, 'iterations': 5, 'rates': (0.5,)}


def small_config(kind, **overrides):
    return ExperimentConfig(kind=kind, seed=11, **{**SMALL, **overrides})


class ExperimentServiceTests(SimpleTestCase):

    def test_ecc_sweep_rows(self):
        outcome = ExperimentService.execute(small_config(ExperimentKind.ECC_SWEEP, gammas=(0.0, 0.45), p=0.1, r=0.1))
        self.assertEqual([row.metric for row in outcome.rows], ['blockwise_abs_overlap', 'overlap'] * 2)
        row = outcome.rows[0]
        self.assertEqual(row.count, 2)
        self.assertEqual(row.params['M'], 60)
        self.assertAlmostEqual(row.params['k'], 0.6745, delta=1e-3)
        self.assertEqual(row.params['iterations'], 5)
        self.assertTrue(0.0 <= row.mean <= 1.0)

    def test_ecc_histogram_samples(self):
        outcome = ExperimentService.execute(small_config(ExperimentKind.ECC_HIST))
        self.assertEqual(len(outcome.samples), 2)
        metrics = [row.metric for row in outcome.rows]
        self.assertEqual(metrics, ['message_overlap', 'message_overlap', 'message_overlap', 'pairwise_overlap'])
        self.assertEqual(outcome.rows[0].params['message'], 0)

    def test_lc_sweep_keeps_best_beta(self):
        config = small_config(ExperimentKind.LC_SWEEP, bias=0.8, betas=(1.0, 4.0), network=NetworkKind.CTH, K=3)
        rows = ExperimentService.execute(config).rows
        self.assertEqual([row.metric for row in rows], ['distortion', 'shannon_distortion'])
        self.assertIn(rows[0].params['beta'], (1.0, 4.0))
        self.assertEqual(rows[0].params['polarity'], 1)
        self.assertGreater(rows[1].mean, 0.0)

    def test_lc_low_bias_uses_negated_output(self):
        outcome = ExperimentService.execute(small_config(ExperimentKind.LC_HIST, bias=0.2))
        self.assertEqual(outcome.rows[-1].params['polarity'], -1)
        self.assertEqual(outcome.rows[-1].metric, 'pairwise_overlap')

    def test_bounds(self):
        config = ExperimentConfig(kind=ExperimentKind.BOUNDS, seed=0, p=0.1, r=0.2, bias=0.5, rates=(0.4,))
        rows = ExperimentService.execute(config).rows
        by_metric = {}
        for row in rows:
            by_metric.setdefault(row.metric, []).append(row)
        self.assertTrue(0.38 <= by_metric['capacity'][0].mean <= 0.41)
        self.assertEqual(len(by_metric['rate_distortion']), 51)
        self.assertAlmostEqual(by_metric['rate_distortion'][0].mean, 1.0, places=12)
        self.assertEqual(by_metric['rate_distortion'][-1].mean, 0.0)
        self.assertAlmostEqual(by_metric['shannon_distortion'][0].mean, 0.1461, delta=0.0005)

    def test_same_seed_same_rows(self):
        config = small_config(ExperimentKind.ECC_SWEEP, network=NetworkKind.CTO, K=2)
        first = ExperimentService.execute(config).rows
        second = ExperimentService.execute(config).rows
        self.assertEqual([(r.metric, r.mean, r.std) for r in first], [(r.metric, r.mean, r.std) for r in second])

    def test_fixed_codeword_length_reports_actual_rate(self):
        outcome = ExperimentService.execute(small_config(ExperimentKind.ECC_SWEEP, M=45, p=0.1, r=0.1))
        self.assertEqual(outcome.rows[0].params['M'], 45)
        self.assertAlmostEqual(outcome.rows[0].params['rate'], 30 / 45, places=12)

    def test_aborted_beta_candidates_reach_kept_row(self):
        def lc_trial(spec, config, M, cfg, point, run, restarts):
            if cfg.beta == 4.0:
                return {'aborted': f'прогін {run}: збій'}
            return {'estimates': [], 'distortions': [0.1 + 0.01 * run]}

        config = small_config(ExperimentKind.LC_SWEEP, betas=(1.0, 4.0), runs=4, k=0.6745)
        with mock.patch('coding_app.services.experiment_service._lc_trial', lc_trial):
            outcome = ExperimentService.execute(config)
        kept = outcome.rows[0]
        self.assertEqual(kept.params['beta'], 1.0)
        self.assertEqual(kept.count, 4)
        self.assertEqual(kept.aborted, 4)
        self.assertEqual(len(kept.abort_reasons), 4)
        self.assertEqual(outcome.worst_aborted_fraction, 1.0)


class ExportServiceTests(SimpleTestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)

    def test_format_value(self):
        self.assertEqual(format_value(None), '')
        self.assertEqual(format_value(True), '1')
        self.assertEqual(format_value(float('nan')), 'nan')
        self.assertEqual(format_value(0.1), '0.1')
        self.assertEqual(format_value(3), '3')

    def test_written_files(self):
        outcome = ExperimentService.execute(small_config(ExperimentKind.ECC_HIST))
        base = Path(self.directory.name) / 'hist'
        paths = ExportService.write_all(outcome, base, 'v-test')
        self.assertEqual([path.name for path in paths], ['hist.csv', 'hist.json', 'hist.samples.txt'])

        with paths[0].open(encoding='utf-8') as handle:
            reader = csv.DictReader(handle)
            self.assertEqual(reader.fieldnames, CSV_COLUMNS)
            rows = list(reader)
        self.assertEqual(len(rows), len(outcome.rows))
        self.assertEqual(rows[0]['experiment'], 'ecc-hist')

        summary = json.loads(paths[1].read_text(encoding='utf-8'))
        self.assertEqual(summary['version'], 'v-test')
        self.assertEqual(summary['config']['seed'], 11)
        self.assertEqual(summary['sample_count'], 2)

        self.assertEqual(len(paths[2].read_text(encoding='utf-8').splitlines()), 2)

    def test_nan_mean_serialized_as_null(self):
        config = small_config(ExperimentKind.ECC_SWEEP)
        row = ResultRow(params={'experiment': 'ecc-sweep'}, metric='overlap', mean=float('nan'), std=0.0, count=0, aborted=2)
        outcome = ExperimentOutcome(config=config, rows=(row,))
        path = ExportService.write_json(outcome, Path(self.directory.name) / 'nan.json', 'v')
        summary = json.loads(path.read_text(encoding='utf-8'))
        self.assertIsNone(summary['rows'][0]['mean'])
        self.assertEqual(summary['aborted'], 2)

    def test_version_string(self):
        self.assertTrue(ExportService.version_string())


class RecordServiceTests(TestCase):

    def test_record_run(self):
        config = small_config(ExperimentKind.ECC_SWEEP)
        rows = (
            ResultRow(params={'rate': 0.5}, metric='overlap', mean=0.9, std=0.1, count=2),
            ResultRow(params={'rate': 0.5}, metric='blockwise_abs_overlap', mean=float('nan'), std=float('nan'), count=0, aborted=2),
        )
        outcome = ExperimentOutcome(config=config, rows=rows, wall_time=1.5)
        run = RecordService.record_run(outcome, 'v1', [Path('a.csv')], degraded=True)
        self.assertEqual(run.status, 'degraded')
        self.assertEqual(run.total_results, 2)
        self.assertEqual(run.aborted, 2)
        self.assertEqual(run.output_paths, ['a.csv'])
        record = ResultRecord.objects.get(metric='blockwise_abs_overlap')
        self.assertIsNone(record.mean)
        self.assertEqual(record.std, 0.0)

        summary = RecordService.metric_summary(run)
        self.assertEqual(set(summary), {'overlap', 'blockwise_abs_overlap'})
        self.assertEqual(summary['overlap'][0]['mean'], 0.9)


class ExperimentCommandTests(TestCase):

    def setUp(self):
        directory = tempfile.TemporaryDirectory()
        self.addCleanup(directory.cleanup)
        self.output = Path(directory.name)
        override = self.settings(BPCODE={**settings.BPCODE, 'OUTPUT_DIR': str(self.output), 'N_JOBS': 1})
        override.enable()
        self.addCleanup(override.disable)

    def _call(self, *args):
        stdout = StringIO()
        call_command('experiment', *args, stdout=stdout)
        return stdout.getvalue()

    def _csv_without_wall_time(self, name):
        lines = (self.output / f'{name}.csv').read_text(encoding='utf-8').splitlines()
        return [line.rsplit(',', 1)[0] for line in lines]

    def test_csv_is_reproducible(self):
        common = ['--N', '30', '--rates', '0.5,0.75', '--runs', '2', '--iters', '5', '--seed', '21', '--no-record']
        self._call('ecc-sweep', *common, '--out', 'first')
        self._call('ecc-sweep', *common, '--out', 'second')
        first = self._csv_without_wall_time('first')
        self.assertEqual(first, self._csv_without_wall_time('second'))
        self.assertEqual(len(first), 5)
        self.assertFalse(ExperimentRun.objects.exists())

    def test_records_run(self):
        output = self._call('bounds', '--seed', '3', '--rates', '0.4', '--out', 'bounds')
        self.assertIn('Готово', output)
        run = ExperimentRun.objects.get()
        self.assertEqual(run.kind, 'bounds')
        self.assertEqual(run.status, 'completed')
        self.assertEqual(run.total_results, 2 + 51 + 1)
        self.assertTrue((self.output / 'bounds.json').is_file())

    def test_config_file(self):
        path = self.output / 'lc.env'
        path.write_text('N=30\nrates=0.5\nruns=2\niters=3\nbeta=2\nseed=4\n', encoding='utf-8')
        self._call('lc-sweep', '--config', str(path), '--out', 'lc', '--no-record')
        with (self.output / 'lc.csv').open(encoding='utf-8') as handle:
            rows = list(csv.DictReader(handle))
        self.assertEqual([row['metric'] for row in rows], ['distortion', 'shannon_distortion'])
        self.assertEqual(rows[0]['beta'], '2')
        self.assertEqual(rows[0]['seed'], '4')

    def test_invalid_configuration_exit_code(self):
        with self.assertRaises(CommandError) as caught:
            self._call('ecc-sweep', '--network', 'cth', '--K', '2', '--N', '30', '--seed', '1')
        self.assertEqual(caught.exception.returncode, 2)
        with self.assertRaises(CommandError) as caught:
            self._call('ecc-sweep', '--N', '30')
        self.assertEqual(caught.exception.returncode, 2)

    def test_numerical_breakdown_exit_code(self):
        with self.settings(BPCODE={**settings.BPCODE, 'V_FLOOR': 10.0}):
            with self.assertRaises(CommandError) as caught:
                self._call('ecc-sweep', '--N', '30', '--rates', '0.5', '--runs', '2', '--iters', '3',
                           '--seed', '1', '--out', 'broken')
        self.assertEqual(caught.exception.returncode, 3)
        with (self.output / 'broken.csv').open(encoding='utf-8') as handle:
            rows = list(csv.DictReader(handle))
        self.assertEqual(rows[0]['aborted'], '2')
        self.assertEqual(rows[0]['count'], '0')
        run = ExperimentRun.objects.get()
        self.assertEqual(run.status, 'degraded')
        self.assertEqual(run.aborted, 2)
        self.assertTrue(math.isnan(float(rows[0]['mean'])))
