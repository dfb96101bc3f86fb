"""
Test module for the RunConfig infrastructure class.
Tests defaults from settings, flag overrides and validation.
"""
import pytest
from unittest.mock import patch

from mixed_frobenius.infrastructures import RunConfig


@pytest.fixture
def mock_settings():
    """Fixture to provide mock settings for tests"""
    with patch('mixed_frobenius.infrastructures.settings') as mock_settings:
        mock_settings.FROBENIUS_DEFAULT_ORDER = 4
        mock_settings.FROBENIUS_DEFAULT_SEED = 0
        mock_settings.FROBENIUS_DEFAULT_JOBS = 1
        mock_settings.FROBENIUS_RANDOM_TRIALS = 10
        mock_settings.FROBENIUS_REPORT_FORMAT = 'text'
        yield mock_settings


class TestRunConfig:
    def test_defaults_from_settings(self, mock_settings):
        config = RunConfig.from_settings()
        assert config.order == 4
        assert config.jobs == 1
        assert config.trials == 10
        assert config.report_format == 'text'
        assert not config.save
        assert not config.seed_given

    def test_flags_override_settings(self, mock_settings):
        config = RunConfig.from_settings(order=6, seed=42, jobs=3, report_format='structured', save=True)
        assert config.order == 6
        assert config.seed == 42
        assert config.jobs == 3
        assert config.report_format == 'structured'
        assert config.save
        assert config.seed_given

    def test_missing_settings(self):
        with patch('mixed_frobenius.infrastructures.settings') as mock_settings:
            delattr(mock_settings, 'FROBENIUS_DEFAULT_ORDER')
            delattr(mock_settings, 'FROBENIUS_RANDOM_TRIALS')

            with pytest.raises(ValueError) as exc_info:
                RunConfig.from_settings()

            assert "Missing required settings variables" in str(exc_info.value)
            assert 'FROBENIUS_DEFAULT_ORDER' in str(exc_info.value)

    @pytest.mark.parametrize('overrides, message', [
        ({'order': 1}, 'order=1'),
        ({'jobs': 0}, 'jobs=0'),
        ({'trials': 0}, 'trials=0'),
        ({'report_format': 'xml'}, "format='xml'"),
    ])
    def test_invalid_values(self, mock_settings, overrides, message):
        with pytest.raises(ValueError) as exc_info:
            RunConfig.from_settings(**overrides)
        assert message in str(exc_info.value)

    def test_invalid_default(self, mock_settings):
        mock_settings.FROBENIUS_DEFAULT_JOBS = -2
        with pytest.raises(ValueError) as exc_info:
            RunConfig.from_settings()
        assert 'jobs=-2' in str(exc_info.value)
