import os
import tempfile

import sympy as sp
from django.test import SimpleTestCase

from mixed_frobenius.domains.errors import (
    DatasetValidationError,
    FileFormatError,
    FileReadError,
    NonUnimodularError,
    UnsupportedFileTypeError,
)
from mixed_frobenius.domains.exactalg import LaurentPoly
from mixed_frobenius.domains.file_handlers import (
    AlgebraFileHandler,
    FileHandlerFactory,
    MetricFileHandler,
    SeriesFileHandler,
)
from .base_tests import sample


class FileHandlerFactoryTests(SimpleTestCase):
    def test_kind_by_extension(self):
        self.assertEqual(FileHandlerFactory.kind_of('a/b/local.METRIC'), 'metric')
        self.assertEqual(FileHandlerFactory.kind_of('x.nilp'), 'nilpotent')
        self.assertIsInstance(FileHandlerFactory.get_handler('x.alg'), AlgebraFileHandler)

    def test_unsupported_extension(self):
        with self.assertRaises(UnsupportedFileTypeError) as cm:
            FileHandlerFactory.kind_of('notes.txt')
        self.assertIn('.txt', str(cm.exception))

    def test_missing_file(self):
        with self.assertRaises(FileReadError) as cm:
            FileHandlerFactory.load(sample('missing.alg'))
        self.assertEqual(cm.exception.reason, 'File not found')


class SampleFileTests(SimpleTestCase):
    def test_algebra_with_filtration(self):
        source = FileHandlerFactory.load(sample('q_x3.alg'))
        self.assertEqual(source.algebra.basis_names, ('1', 'x', 'x2'))
        self.assertEqual(source.algebra.grading, (0, 1, 2))
        self.assertEqual(source.metric, sp.Matrix([[0, 0, 1], [0, 1, 0], [1, 0, 0]]))
        self.assertEqual(source.filtration.jumps, (0, 3))
        self.assertEqual(source.charges, {0: 3, 3: 0})

    def test_algebra_without_filtration(self):
        source = FileHandlerFactory.load(sample('q_eps2.alg'))
        self.assertIsNone(source.filtration)
        self.assertIsNone(source.charges)

    def test_metric_is_mirrored(self):
        metric = FileHandlerFactory.load(sample('local_p2.metric'))
        self.assertEqual(metric.matrix.entry(0, 0), LaurentPoly.monomial(9, -3))
        self.assertEqual(metric.matrix.entry(2, 0), LaurentPoly.monomial(1, -1))
        self.assertTrue(metric.matrix.entry(2, 2).is_zero)

    def test_non_unimodular_metric(self):
        with self.assertRaises(NonUnimodularError):
            FileHandlerFactory.load(sample('non_unimodular.metric'))

    def test_nilpotent_reads_referenced_algebra(self):
        data = FileHandlerFactory.load(sample('q_x3.nilp'))
        self.assertEqual(data.nilpotents, ((0, 1, 0),))
        self.assertEqual(data.base.dim, 3)
        self.assertEqual(data.r, 1)

    def test_geometry(self):
        source = FileHandlerFactory.load(sample('local_p2.geom'))
        self.assertEqual(source.model.dimension, 2)
        self.assertEqual(source.model.c1, (0, 3, 0))
        self.assertEqual(source.bundle.rank, 1)
        self.assertEqual(source.bundle.chern[0], (0, -3, 0))

    def test_correlators(self):
        dataset = FileHandlerFactory.load(sample('local_p2_synthetic.gw'))
        self.assertEqual(len(dataset.records), 3)
        self.assertEqual(dataset.lambda_degree, 0)
        self.assertEqual(dataset.value((2,), (1, 1, 1)), LaurentPoly.constant(-45))

    def test_conflicting_correlators(self):
        with self.assertRaises(DatasetValidationError) as cm:
            FileHandlerFactory.load(sample('conflict.gw'))
        self.assertIn('conflict.gw:3', str(cm.exception))

    def test_series(self):
        saito = FileHandlerFactory.load(sample('constant.series'))
        ring = saito.ring
        self.assertEqual(ring.order, 4)
        self.assertEqual(saito.structure_constants[0][1][1], ring.constant(1))
        self.assertEqual(saito.structure_constants[1][0][1], ring.constant(1))
        self.assertTrue(saito.structure_constants[1][1][0].is_zero)
        self.assertEqual(saito.euler[0], ring.variable(0))

    def test_series_order_override(self):
        saito = SeriesFileHandler().load(sample('constant.series'), order=2)
        self.assertEqual(saito.ring.order, 2)


class MalformedFileTests(SimpleTestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def write(self, name: str, text: str) -> str:
        path = os.path.join(self.directory.name, name)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        return path

    def test_unknown_basis_element(self):
        path = self.write('bad.alg', "basis 1 x\nproduct 1 y y 1\n")
        with self.assertRaises(FileFormatError) as cm:
            AlgebraFileHandler().load(path)
        self.assertEqual(cm.exception.line, 2)
        self.assertIn("'y'", cm.exception.reason)

    def test_unknown_keyword(self):
        path = self.write('bad.alg', "# comment\nbasis 1\nproduct 1 1 1 1\ncolour red\n")
        with self.assertRaises(FileFormatError) as cm:
            AlgebraFileHandler().load(path)
        self.assertEqual(cm.exception.line, 4)

    def test_layer_without_gram(self):
        path = self.write('bad.alg', "basis 1 x\nproduct 1 1 1 1\nproduct 1 x x 1\nlayer 0 | 0 1\n")
        with self.assertRaises(FileFormatError) as cm:
            AlgebraFileHandler().load(path)
        self.assertIn('no gram line', cm.exception.reason)

    def test_metric_mirror_conflict(self):
        path = self.write('bad.metric', "size 2\nentry 0 1 0:1\nentry 1 0 0:2\n")
        with self.assertRaises(FileFormatError) as cm:
            MetricFileHandler().load(path)
        self.assertEqual(cm.exception.line, 3)

    def test_metric_entry_out_of_range(self):
        path = self.write('bad.metric', "size 1\nentry 0 1 0:1\n")
        with self.assertRaises(FileFormatError):
            MetricFileHandler().load(path)

    def test_bad_laurent_token(self):
        path = self.write('bad.metric', "size 1\nentry 0 0 1\n")
        with self.assertRaises(FileFormatError) as cm:
            MetricFileHandler().load(path)
        self.assertIn('exp:coef', cm.exception.reason)

    def test_series_frame_clash(self):
        path = self.write('bad.series', "frame t:a t:a\norder 2\nunit 1 0\n")
        with self.assertRaises(FileFormatError) as cm:
            SeriesFileHandler().load(path)
        self.assertEqual(cm.exception.line, 1)
