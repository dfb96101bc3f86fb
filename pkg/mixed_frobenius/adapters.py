"""
Mixed Frobenius Adapter Module

Bridges the pure domain layer with the file system and the database:

- Input files are loaded through the FileHandlerFactory
- Inputs are digested (sha256 over the raw bytes) for the audit trail
- Run reports are persisted as VerificationRun/AxiomResult rows

Usage:
    saito = VerificationAdapter.load('samples/constant.series', order=4)
    digest = VerificationAdapter.digest(['samples/constant.series'])
"""

import hashlib
import logging
import os
from typing import Iterable

from asgiref.sync import sync_to_async
from django.db import transaction

from mixed_frobenius.domains import FileHandlerFactory
from mixed_frobenius.models import AxiomResult, VerificationRun

logger = logging.getLogger(__name__)


class VerificationAdapter:
    """
    Adapter class for the infrastructure concerns of a verification run.

    Attributes:
        _factory (FileHandlerFactory): Resolves input files to their parsers
    """

    _factory = FileHandlerFactory

    @staticmethod
    def load(file_path: str, **options):
        """
        Parse an input file into its domain object.

        Raises:
            FileFormatError: With path and line on malformed input
        """
        logger.debug(f"Loading {file_path}")
        return VerificationAdapter._factory.load(file_path, **options)

    @staticmethod
    def kind_of(file_path: str) -> str:
        return VerificationAdapter._factory.kind_of(file_path)

    @staticmethod
    def digest(paths: Iterable[str]) -> str:
        """sha256 over the bytes of every input, in the order given."""
        digest = hashlib.sha256()
        for path in paths:
            digest.update(os.path.basename(path).encode('utf-8'))
            with open(path, 'rb') as f:
                digest.update(f.read())
        return digest.hexdigest()

    @staticmethod
    def save_run_sync(run_report) -> VerificationRun:
        """
        Persist a run and one AxiomResult per record within a transaction.

        Args:
            run_report (RunReport): Finished run; its structured document is
                stored verbatim
        """
        with transaction.atomic():
            run = VerificationRun.objects.create(
                command=run_report.command,
                inputs_digest=run_report.inputs_digest,
                passed=run_report.passed,
                order=run_report.order,
                seed=run_report.seed,
                report=run_report.as_document(),
            )
            AxiomResult.objects.bulk_create([
                AxiomResult(
                    run=run,
                    name=record.name,
                    passed=record.passed,
                    certified_order=record.certified_order,
                    counterexample=record.counterexample or '',
                )
                for record in run_report.report.records
            ])
        logger.info(f"Saved run {run.pk} for {run.command}")
        return run

    save_run = staticmethod(sync_to_async(save_run_sync.__func__))
