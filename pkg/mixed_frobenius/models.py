"""
Mixed Frobenius Models Module

Audit trail of verification runs:

- VerificationRun: One invocation of a `frobenius` subcommand with its inputs
  digest and the structured report it produced
- AxiomResult: One axiom record of a run

Runs are only stored when the command is given `--save`.
"""

from django.db import models


class VerificationRun(models.Model):
    """
    A single verification run.

    Key fields:
        - command: Subcommand name, e.g. 'quantum-limit'
        - inputs_digest: sha256 over the bytes of all input files
        - report: The structured report document, free of timestamps

    Relationships:
        - Has many AxiomResults (through results)
    """
    command = models.CharField(max_length=50)
    inputs_digest = models.CharField(max_length=64, db_index=True)
    passed = models.BooleanField()
    order = models.PositiveIntegerField()
    seed = models.IntegerField(null=True, blank=True)
    report = models.JSONField(help_text="Structured report document.")
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']
        verbose_name = 'Verification Run'
        verbose_name_plural = 'Verification Runs'

    def __str__(self) -> str:
        status = 'pass' if self.passed else 'fail'
        return f"{self.command} {self.inputs_digest[:12]} ({status})"


class AxiomResult(models.Model):
    run = models.ForeignKey(
        VerificationRun,
        on_delete=models.CASCADE,
        related_name="results"
    )
    name = models.CharField(max_length=200)
    passed = models.BooleanField()
    certified_order = models.IntegerField(null=True, blank=True)
    counterexample = models.TextField(blank=True)

    class Meta:
        ordering = ['id']

    def __str__(self) -> str:
        return f"{self.name}: {'pass' if self.passed else 'fail'}"
