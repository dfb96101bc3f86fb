import json
from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from mixed_frobenius.models import VerificationRun
from .base_tests import sample


class FrobeniusCommandTests(TestCase):
    def run_command(self, *args):
        out = StringIO()
        call_command('frobenius', *args, stdout=out)
        return out.getvalue()

    def structured(self, *args):
        return json.loads(self.run_command(*args, '--format=structured'))

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as cm:
            self.run_command(*args)
        self.assertEqual(cm.exception.returncode, code)
        return cm.exception

    def test_snf(self):
        document = self.structured('snf', sample('local_p2.metric'))
        self.assertTrue(document['passed'])
        self.assertEqual(document['artifacts']['kappa'], [3, 0, 0])
        self.assertIsNone(document['seed'])

    def test_snf_with_seed(self):
        document = self.structured('snf', sample('identity.metric'), '--seed=3', '--trials=2')
        self.assertEqual(document['seed'], 3)
        self.assertEqual(document['artifacts']['kappa'], [0, 0])

    def test_text_output(self):
        output = self.run_command('existence', sample('q_x3.alg'))
        self.assertTrue(output.startswith('existence: PASS'))
        self.assertIn('ok   filtration exhaustive', output)

    def test_verify_mfa(self):
        document = self.structured('verify-mfa', sample('q_x3.alg'))
        self.assertTrue(document['passed'])
        names = [record['name'] for record in document['records']]
        self.assertIn('charge g_0', names)
        self.assertIn('algebra metric invariant', names)

    def test_formal_check_of_graded_algebra(self):
        document = self.structured('formal-check', sample('q_x3.alg'), '--order=3')
        self.assertTrue(document['passed'])
        self.assertEqual(document['artifacts']['charges'], {'0': '3', '3': '0'})
        self.assertEqual(document['order'], 3)

    def test_quantum_limit(self):
        document = self.structured('quantum-limit', sample('local_p2.geom'),
                                   f"--gw={sample('local_p2_synthetic.gw')}", '--order=3', '--jobs=2')
        self.assertTrue(document['passed'])
        self.assertEqual(document['artifacts']['jumps'], [0, 3])
        self.assertEqual(document['artifacts']['ranks'], [2, 3])

    def test_potential(self):
        document = self.structured('potential', sample('constant.series'))
        self.assertTrue(document['passed'])
        self.assertEqual(document['artifacts']['certified_order'], 2)

    def test_axiom_failure_exits_with_one(self):
        error = self.assertExitCode(1, 'formal-check', sample('broken_flatness.series'))
        self.assertIn('flatness (fmfs1)', str(error))
        self.assertExitCode(1, 'quantum-limit', sample('point.geom'))

    def test_invalid_input_exits_with_two(self):
        for args in (
            ('snf', sample('non_unimodular.metric')),
            ('existence', sample('gaussian.alg')),
            ('verify-mfa', sample('q_eps2.alg')),
            ('potential', sample('broken_flatness.series')),
            ('quantum-limit', sample('local_p2.geom'), f"--gw={sample('conflict.gw')}"),
            ('quantum-limit', sample('local_p2.geom'), f"--gw={sample('inhomogeneous.gw')}"),
            ('snf', sample('missing.metric')),
            ('formal-check', sample('q_eps2.alg')),
        ):
            with self.subTest(args=args):
                self.assertExitCode(2, *args)

    def test_invalid_settings_exit_with_two(self):
        error = self.assertExitCode(2, 'snf', sample('local_p2.metric'), '--order=1')
        self.assertIn('order=1', str(error))

    def test_save(self):
        self.run_command('nilpotent', sample('q_eps2.nilp'), '--save')
        run = VerificationRun.objects.get()
        self.assertEqual(run.command, 'nilpotent')
        self.assertTrue(run.passed)
        self.assertEqual(run.results.count(), len(run.report['records']))

    def test_runs_are_not_saved_by_default(self):
        self.run_command('nilpotent', sample('q_eps2.nilp'))
        self.assertFalse(VerificationRun.objects.exists())
