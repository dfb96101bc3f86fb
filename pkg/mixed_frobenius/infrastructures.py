"""
Run configuration for the verification desk.
"""
import logging

from dataclasses import dataclass
from typing import Optional
from django.conf import settings

logger = logging.getLogger(__name__)

REPORT_FORMATS = ('text', 'structured')


@dataclass(frozen=True)
class RunConfig:
    """
    Settings of one verification run: defaults from FROBENIUS_* settings,
    overridden by command-line flags.
    """
    order: int
    seed: int
    jobs: int
    trials: int
    report_format: str
    save: bool = False
    seed_given: bool = False

    @classmethod
    def from_settings(
        cls,
        order: Optional[int] = None,
        seed: Optional[int] = None,
        jobs: Optional[int] = None,
        trials: Optional[int] = None,
        report_format: Optional[str] = None,
        save: bool = False
    ) -> 'RunConfig':
        """
        Merge explicit values over the configured defaults and validate.

        Raises:
            ValueError: If a setting is missing or out of range
        """
        cls._validate_env()
        config = cls(
            order=settings.FROBENIUS_DEFAULT_ORDER if order is None else order,
            seed=settings.FROBENIUS_DEFAULT_SEED if seed is None else seed,
            jobs=settings.FROBENIUS_DEFAULT_JOBS if jobs is None else jobs,
            trials=settings.FROBENIUS_RANDOM_TRIALS if trials is None else trials,
            report_format=settings.FROBENIUS_REPORT_FORMAT if report_format is None else report_format,
            save=save,
            seed_given=seed is not None,
        )
        config._validate_settings()
        logger.debug(f"Run configuration {config}")
        return config

    @staticmethod
    def _validate_env() -> None:
        """Validate required settings variables"""
        required_vars = [
            'FROBENIUS_DEFAULT_ORDER',
            'FROBENIUS_DEFAULT_SEED',
            'FROBENIUS_DEFAULT_JOBS',
            'FROBENIUS_RANDOM_TRIALS',
            'FROBENIUS_REPORT_FORMAT',
        ]
        missing = [var for var in required_vars if not hasattr(settings, var)]
        if missing:
            raise ValueError(
                f"Missing required settings variables: {', '.join(missing)}")

    def _validate_settings(self) -> None:
        invalid = []
        if not isinstance(self.order, int) or self.order < 2:
            invalid.append(f"order={self.order!r} (need >= 2)")
        if not isinstance(self.jobs, int) or self.jobs < 1:
            invalid.append(f"jobs={self.jobs!r} (need >= 1)")
        if not isinstance(self.trials, int) or self.trials < 1:
            invalid.append(f"trials={self.trials!r} (need >= 1)")
        if not isinstance(self.seed, int):
            invalid.append(f"seed={self.seed!r} (need an integer)")
        if self.report_format not in REPORT_FORMATS:
            invalid.append(f"format={self.report_format!r} (need one of {', '.join(REPORT_FORMATS)})")
        if invalid:
            raise ValueError(f"Invalid settings values: {'; '.join(invalid)}")
