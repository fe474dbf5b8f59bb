import numpy as np
from django.test import SimpleTestCase

from coding_app.domain.networks import Codebook, NetworkKind, NetworkSpec
from coding_app.domain.spins import SeededStream
from coding_app.patterns.network_strategy import NetworkStrategyFactory
from coding_app.services.network_service import NetworkService
from coding_app.services.spin_service import SpinService


class NetworkSpecTests(SimpleTestCase):

    def test_validation(self):
        with self.assertRaises(ValueError):
            NetworkSpec(NetworkKind.CTH, 2)
        with self.assertRaises(ValueError):
            NetworkSpec(NetworkKind.CTO, 1)
        with self.assertRaises(ValueError):
            NetworkSpec(NetworkKind.PTH, 0)
        with self.assertRaises(ValueError):
            NetworkSpec(NetworkKind.PTH, 16)
        with self.assertRaises(ValueError):
            NetworkSpec(NetworkKind.PTH, 1, k=-0.1)
        with self.assertRaises(ValueError):
            NetworkSpec(NetworkKind.PTH, 1, polarity=0)

    def test_parse_kind(self):
        self.assertIs(NetworkSpec('CTO', 2).kind, NetworkKind.CTO)
        with self.assertRaises(ValueError):
            NetworkKind.parse('tree')


class CodebookTests(SimpleTestCase):

    def test_random_codebook_shape_and_rate(self):
        codebook = Codebook.random(40, 12, 3, SeededStream(1))
        self.assertEqual((codebook.M, codebook.N), (40, 12))
        self.assertAlmostEqual(codebook.rate, 0.3)
        self.assertEqual(codebook.blocked.shape, (40, 3, 4))
        self.assertEqual(codebook.pattern(0).K, 3)

    def test_block_structure_must_divide(self):
        with self.assertRaises(ValueError):
            Codebook(np.ones((4, 10)), 3)


class TransferTests(SimpleTestCase):

    def test_transfer_fk(self):
        self.assertEqual(NetworkService.transfer_fk(0.5, 1.0), 1)
        self.assertEqual(NetworkService.transfer_fk(1.0, 1.0), 1)
        self.assertEqual(NetworkService.transfer_fk(-1.5, 1.0), -1)
        with self.assertRaises(ValueError):
            NetworkService.transfer_fk(0.0, -1.0)

    def test_forward_matches_definition(self):
        stream = SeededStream(5)
        s = SpinService.draw_uniform_spins(12, stream.child('s'))
        x = SpinService.draw_uniform_spins(12, stream.child('x'))
        fields = NetworkService.local_fields(s.blocked(3), x.blocked(3))
        spec = NetworkSpec(NetworkKind.PTH, 3, k=0.8)
        expected = int(np.prod(np.where(np.abs(fields) <= 0.8, 1, -1)))
        self.assertEqual(NetworkService.forward(spec, s.blocked(3), x.blocked(3)), expected)
        flipped = NetworkSpec(NetworkKind.PTH, 3, k=0.8, polarity=-1)
        self.assertEqual(NetworkService.forward(flipped, s.blocked(3), x.blocked(3)), -expected)


class MirrorSymmetryTests(SimpleTestCase):
    """Кодування не змінюється при інверсії блоків повідомлення"""

    def _instances(self, count, N, K):
        for index in range(count):
            stream = SeededStream(11, ('mirror', N, K, index))
            s = SpinService.draw_uniform_spins(N, stream.child('s'))
            codebook = Codebook.random(8, N, K, stream.child('codebook'))
            blocks = np.flatnonzero(stream.child('blocks').generator().integers(0, 2, size=K))
            yield s, codebook, blocks

    def test_block_flip_invariance(self):
        for kind, K in ((NetworkKind.PTH, 3), (NetworkKind.CTH, 3), (NetworkKind.PTH, 2)):
            spec = NetworkSpec(kind, K, k=0.7)
            for s, codebook, blocks in self._instances(1000, 6 * K, K):
                self.assertEqual(
                    NetworkService.encode(spec, s, codebook),
                    NetworkService.encode(spec, s.with_blocks_negated(K, blocks), codebook),
                )

    def test_global_flip_invariance(self):
        specs = [
            NetworkSpec(NetworkKind.PTH, 3, k=0.7),
            NetworkSpec(NetworkKind.CTH, 3, k=0.7),
            NetworkSpec(NetworkKind.CTO, 2, k=0.5),
        ]
        for spec in specs:
            # непарна довжина блоку виключає нульові поля для знакових елементів
            for s, codebook, _ in self._instances(1000, 7 * spec.K, spec.K):
                self.assertEqual(NetworkService.encode(spec, s, codebook), NetworkService.encode(spec, -s, codebook))


class OutputBiasTests(SimpleTestCase):

    def _empirical_bias(self, spec, samples=200000):
        fields = SeededStream(7, ('bias', spec.kind.value)).generator().standard_normal((samples, spec.K))
        outputs = NetworkStrategyFactory.create_strategy(spec).forward(fields)
        return float(np.mean(outputs == 1))

    def test_closed_form_bias_matches_sampling(self):
        specs = [
            NetworkSpec(NetworkKind.PTH, 1, k=0.6745),
            NetworkSpec(NetworkKind.PTH, 3, k=1.0),
            NetworkSpec(NetworkKind.CTH, 3, k=0.4),
            NetworkSpec(NetworkKind.CTO, 3, k=0.8),
            NetworkSpec(NetworkKind.PTH, 3, k=1.0, polarity=-1),
        ]
        for spec in specs:
            self.assertAlmostEqual(
                NetworkService.output_bias(spec), self._empirical_bias(spec), delta=0.01, msg=str(spec)
            )

    def test_parity_tree_bias_formula(self):
        spec = NetworkSpec(NetworkKind.PTH, 1, k=0.0)
        self.assertAlmostEqual(NetworkService.output_bias(spec), 0.0, places=12)
        spec = NetworkSpec(NetworkKind.PTH, 2, k=0.6744897501960817)
        self.assertAlmostEqual(NetworkService.output_bias(spec), 0.5, places=10)
