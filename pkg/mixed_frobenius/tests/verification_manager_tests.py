import json
import time
from unittest import mock

from mixed_frobenius.domains.errors import FileFormatError
from mixed_frobenius.domains.reports import VerificationReport
from mixed_frobenius.infrastructures import RunConfig
from mixed_frobenius.services import FrobeniusRunner, Manager, VerificationManager
from mixed_frobenius.tests.base_tests import AsyncTestCase, sample


def report_of(name: str, passed: bool = True, delay: float = 0.0):
    def task():
        time.sleep(delay)
        report = VerificationReport()
        report.add(name, passed, counterexample=None if passed else f"{name} broke")
        return report
    return task


class VerificationManagerTests(AsyncTestCase):
    async def test_results_keep_registration_order(self):
        manager = Manager({'slow': lambda: time.sleep(0.2) or 'slow', 'fast': lambda: 'fast'}, jobs=2)
        self.assertEqual(await manager.run(), ['slow', 'fast'])

    async def test_merged_report_is_independent_of_jobs(self):
        tasks = {
            'first': report_of('first', delay=0.2),
            'second': report_of('second', passed=False),
            'third': report_of('third'),
        }
        serial = await VerificationManager(jobs=1).verify(tasks)
        parallel = await VerificationManager(jobs=3).verify(tasks)
        self.assertEqual([r.name for r in serial.records], ['first', 'second', 'third'])
        self.assertEqual(serial.records, parallel.records)
        self.assertEqual(parallel.failed_names(), ['second'])


class FrobeniusRunnerTests(AsyncTestCase):
    def setUp(self):
        super().setUp()
        self.config = RunConfig(order=3, seed=0, jobs=2, trials=3, report_format='text')
        self.runner = FrobeniusRunner(self.config)

    async def test_snf(self):
        run = await self.runner.execute('snf', sample('local_p2.metric'))
        self.assertTrue(run.passed)
        self.assertEqual(run.artifacts['kappa'], [3, 0, 0])
        self.assertEqual(run.artifacts['shift'], 3)
        self.assertIsNone(run.seed)
        self.assertIsNone(run.report.get('kappa invariance'))

    async def test_snf_with_seed(self):
        config = RunConfig(order=3, seed=5, jobs=1, trials=2, report_format='text', seed_given=True)
        run = await FrobeniusRunner(config).execute('snf', sample('local_p2.metric'))
        self.assertEqual(run.seed, 5)
        self.assertTrue(run.report.get('kappa invariance').passed)

    async def test_filtration_of_nilpotent_file(self):
        run = await self.runner.execute('filtration', sample('q_x3.nilp'))
        self.assertTrue(run.passed, run.report.failed_names())
        self.assertEqual(sorted(run.artifacts['filtration']), ['0', '3'])
        self.assertTrue(run.report.get('direct construction agrees').passed)

    async def test_nilpotent(self):
        run = await self.runner.execute('nilpotent', sample('q_x3_r2.nilp'))
        self.assertTrue(run.passed, run.report.failed_names())
        self.assertEqual(run.artifacts['r'], 2)
        self.assertFalse(any(r.name.startswith('J_') for r in run.report.records))

    async def test_existence(self):
        run = await self.runner.execute('existence', sample('q_x3.alg'))
        self.assertTrue(run.passed)
        self.assertEqual(run.artifacts['ranks'], [1, 2, 3])

    async def test_verify_mfa_needs_layers(self):
        with self.assertRaises(FileFormatError):
            await self.runner.execute('verify-mfa', sample('q_eps2.alg'))

    async def test_wrong_input_kind(self):
        with self.assertRaises(FileFormatError):
            await self.runner.execute('snf', sample('q_x3.alg'))

    async def test_unknown_command(self):
        with self.assertRaises(ValueError):
            await self.runner.execute('nonsense', sample('q_x3.alg'))

    async def test_formal_check_reports_broken_flatness(self):
        run = await self.runner.execute('formal-check', sample('broken_flatness.series'))
        self.assertFalse(run.passed)
        self.assertIn('flatness (fmfs1)', run.report.failed_names())

    async def test_quantum_limit_of_a_point(self):
        run = await self.runner.execute('quantum-limit', sample('point.geom'))
        self.assertEqual(run.report.failed_names(), ['limit filtration is classical'])

    async def test_quantum_limit_with_correlators(self):
        run = await self.runner.execute('quantum-limit', sample('local_p2.geom'), sample('local_p2_synthetic.gw'))
        self.assertTrue(run.passed, run.report.failed_names())
        self.assertEqual(run.artifacts['charges'], {'0': '3', '3': '0'})
        self.assertEqual(run.artifacts['euler_weights'], ['0'])
        self.assertIsNotNone(run.report.get('degree bound'))
        self.assertTrue(run.report.get('classical filtration exhaustive').passed)

    async def test_save_goes_through_the_adapter(self):
        config = RunConfig(order=3, seed=0, jobs=1, trials=1, report_format='text', save=True)
        with mock.patch('mixed_frobenius.services.VerificationAdapter.save_run',
                        new=mock.AsyncMock()) as save_run:
            run = await FrobeniusRunner(config).execute('existence', sample('q_x3.alg'))
        save_run.assert_awaited_once_with(run)

    async def test_render(self):
        run = await self.runner.execute('existence', sample('q_x3.alg'))
        text = run.render('text')
        self.assertTrue(text.startswith('existence: PASS'))
        document = json.loads(run.render('structured'))
        self.assertEqual(document['command'], 'existence')
        self.assertEqual(document['inputs_digest'], run.inputs_digest)
        self.assertTrue(all(record['passed'] for record in document['records']))

    async def test_structured_output_is_deterministic(self):
        first = await self.runner.execute('nilpotent', sample('q_x3.nilp'))
        second = await FrobeniusRunner(RunConfig(order=3, seed=0, jobs=1, trials=3, report_format='text')) \
            .execute('nilpotent', sample('q_x3.nilp'))
        self.assertEqual(first.render('structured'), second.render('structured'))
