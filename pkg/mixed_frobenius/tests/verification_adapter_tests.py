from unittest import mock

from asgiref.sync import sync_to_async

from mixed_frobenius.adapters import VerificationAdapter
from mixed_frobenius.domains.reports import VerificationReport
from mixed_frobenius.models import AxiomResult, VerificationRun
from mixed_frobenius.services import RunReport
from .base_tests import AsyncTestCase, sample


def failing_run() -> RunReport:
    report = VerificationReport()
    report.add('ideal I_0', True, certified_order=3)
    report.add('invariant g_0', False, counterexample="g_0(x*1, x) != g_0(1, x*x)")
    return RunReport('verify-mfa', 'ab' * 32, 3, None, report, {'filtration': {}})


class VerificationAdapterTests(AsyncTestCase):
    def test_load_dispatches_on_extension(self):
        source = VerificationAdapter.load(sample('q_eps2.alg'))
        self.assertEqual(source.algebra.basis_names, ('1', 'e'))
        self.assertEqual(VerificationAdapter.kind_of(sample('constant.series')), 'series')

    def test_digest(self):
        first = VerificationAdapter.digest([sample('local_p2.geom'), sample('local_p2_synthetic.gw')])
        again = VerificationAdapter.digest([sample('local_p2.geom'), sample('local_p2_synthetic.gw')])
        swapped = VerificationAdapter.digest([sample('local_p2_synthetic.gw'), sample('local_p2.geom')])
        self.assertEqual(first, again)
        self.assertNotEqual(first, swapped)
        self.assertEqual(len(first), 64)

    def test_save_run_sync(self):
        run = VerificationAdapter.save_run_sync(failing_run())
        self.assertFalse(run.passed)
        self.assertEqual(run.report['records'][1]['name'], 'invariant g_0')
        results = list(run.results.all())
        self.assertEqual([r.name for r in results], ['ideal I_0', 'invariant g_0'])
        self.assertEqual(results[0].certified_order, 3)
        self.assertEqual(results[0].counterexample, '')
        self.assertIn('x*x', results[1].counterexample)

    async def test_save_run_async(self):
        run = await VerificationAdapter.save_run(failing_run())
        count = await sync_to_async(AxiomResult.objects.filter(run=run).count)()
        self.assertEqual(count, 2)
        stored = await sync_to_async(VerificationRun.objects.get)(pk=run.pk)
        self.assertEqual(stored.command, 'verify-mfa')
        self.assertIsNone(stored.seed)

    @mock.patch('mixed_frobenius.adapters.AxiomResult.objects.bulk_create', side_effect=RuntimeError('db down'))
    def test_save_run_is_atomic(self, mock_bulk_create):
        with self.assertRaises(RuntimeError):
            VerificationAdapter.save_run_sync(failing_run())
        self.assertEqual(VerificationRun.objects.count(), 0)
