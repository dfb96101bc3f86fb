"""
`python manage.py frobenius <subcommand> <file> [options]`

Exit codes: 0 when every axiom record passes, 1 when some record fails and 2
on invalid input or settings.
"""

import logging

from asgiref.sync import async_to_sync
from django.core.management.base import BaseCommand, CommandError

from mixed_frobenius.domains.errors import InputError
from mixed_frobenius.infrastructures import REPORT_FORMATS, RunConfig
from mixed_frobenius.services import FrobeniusRunner

logger = logging.getLogger(__name__)

SUBCOMMANDS = {
    'snf': "Smith decomposition and κ profile of a .metric file",
    'filtration': "Filtration of a .metric or .nilp file with residue sweeps",
    'nilpotent': "Nilpotent construction of a .nilp file against the generic pipeline",
    'existence': "Constructive Frobenius filtration of a split .alg file",
    'verify-mfa': "Check the layers, grams and charges of an .alg file",
    'formal-check': "Formal axioms of an .alg, .series or .geom (with --gw) file",
    'quantum-limit': "Twisted product of a .geom file and its non-equivariant limit",
    'potential': "Potential vector field of a .series or .alg file",
}

WITH_GW = ('formal-check', 'quantum-limit')


class Command(BaseCommand):
    help = "Mixed Frobenius verification desk"

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='subcommand', required=True)
        for name, description in SUBCOMMANDS.items():
            sub = subparsers.add_parser(name, help=description)
            sub.add_argument('path', help="Input file")
            sub.add_argument('--order', type=int, help="Truncation order T")
            sub.add_argument('--format', dest='report_format', choices=REPORT_FORMATS, help="Output format")
            sub.add_argument('--seed', type=int, help="Seed for randomized sweeps")
            sub.add_argument('--jobs', type=int, help="Worker count for independent axiom tasks")
            sub.add_argument('--trials', type=int, help="Trials per randomized record")
            sub.add_argument('--save', action='store_true', help="Store the run in the audit trail")
            if name in WITH_GW:
                sub.add_argument('--gw', help="Correlator dataset (.gw)")

    def handle(self, *args, **options):
        command = options['subcommand']
        try:
            config = RunConfig.from_settings(
                order=options.get('order'),
                seed=options.get('seed'),
                jobs=options.get('jobs'),
                trials=options.get('trials'),
                report_format=options.get('report_format'),
                save=options.get('save', False),
            )
        except ValueError as e:
            raise CommandError(str(e), returncode=2)

        runner = FrobeniusRunner(config)
        try:
            run_report = async_to_sync(runner.execute)(command, options['path'], options.get('gw'))
        except InputError as e:
            logger.error(f"{command}: {e}")
            raise CommandError(f"{type(e).__name__}: {e}", returncode=2)

        self.stdout.write(run_report.render(config.report_format))
        if not run_report.passed:
            failed = ', '.join(run_report.report.failed_names())
            raise CommandError(f"Axiom failures: {failed}", returncode=1)
