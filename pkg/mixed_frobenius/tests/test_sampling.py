"""
Randomized sweeps over seeded instances. Each seed is a separate case so a
failure names the seed that reproduces it.
"""
import random
import time

import pytest

from mixed_frobenius.domains.exactalg import LaurentPoly, smith_normal_form
from mixed_frobenius.domains.geom import BundleData, CohomologyModel, build_twisted_product
from mixed_frobenius.domains.mfa import (
    LocalizedMetric,
    check_closing_formulas,
    check_mfa,
    existence_mfa,
    extract_filtration,
    nilpotent_filtration_direct,
    nilpotent_localized_metric,
    nilpotent_mfa,
    normalize_metric,
    verify_division_identity,
)
from mixed_frobenius.domains.sampling import (
    random_nilpotent_data,
    random_polynomial_matrix,
    random_split_algebra,
    random_unimodular,
    synthetic_local_p2_dataset,
)

SEEDS = range(8)
SMITH_SEEDS = range(50)
ALGEBRA_SEEDS = range(10)
CHANGES_PER_INSTANCE = 20
SMITH_SWEEP_SECONDS = 10

pytestmark = pytest.mark.slow


def random_smith_instance(seed):
    rng = random.Random(seed)
    return random_polynomial_matrix(rng, rng.randint(1, 6), 4)


@pytest.fixture
def local_p2_metric():
    lam = LaurentPoly.monomial
    return LocalizedMetric.from_rows([
        [lam(9, -3), lam(3, -2), lam(1, -1)],
        [lam(3, -2), lam(1, -1), 0],
        [lam(1, -1), 0, 0],
    ])


@pytest.mark.parametrize('seed', SMITH_SEEDS)
def test_smith_form_is_certified(seed):
    matrix = random_smith_instance(seed)
    decomposition = smith_normal_form(matrix)
    assert decomposition.verify(matrix)
    assert decomposition.divisibility_chain_holds()


def test_smith_sweep_fits_the_time_budget():
    started = time.perf_counter()
    for seed in SMITH_SEEDS:
        matrix = random_smith_instance(seed)
        assert smith_normal_form(matrix).verify(matrix), f"seed={seed}"
    assert time.perf_counter() - started < SMITH_SWEEP_SECONDS


@pytest.mark.parametrize('seed', ALGEBRA_SEEDS)
def test_kappas_survive_a_change_of_basis(seed, local_p2_metric):
    rng = random.Random(seed)
    for _ in range(CHANGES_PER_INSTANCE):
        transformed = local_p2_metric.transformed(random_unimodular(rng, 3))
        assert sorted(normalize_metric(transformed).kappas) == [0, 0, 3]
    filtration = extract_filtration(transformed)
    assert filtration.jumps == (0, 3)
    assert filtration.rank(0) == 2


@pytest.mark.parametrize('seed', ALGEBRA_SEEDS)
def test_kappas_of_nilpotent_metrics_survive_a_change_of_basis(seed):
    rng = random.Random(seed)
    metric = nilpotent_localized_metric(random_nilpotent_data(rng, max_dim=4))
    kappas = sorted(normalize_metric(metric).kappas)
    for _ in range(CHANGES_PER_INSTANCE):
        change = random_unimodular(rng, metric.ambient_dim)
        assert sorted(normalize_metric(metric.transformed(change)).kappas) == kappas


@pytest.mark.parametrize('seed', ALGEBRA_SEEDS)
def test_direct_filtration_matches_smith_pipeline(seed):
    data = random_nilpotent_data(random.Random(seed), max_dim=6)
    direct = nilpotent_filtration_direct(data)
    assert direct.mismatch(extract_filtration(nilpotent_localized_metric(data))) is None
    assert check_mfa(nilpotent_mfa(data)).passed
    if data.r == 1:
        assert check_closing_formulas(data, direct).passed


@pytest.mark.parametrize('seed', ALGEBRA_SEEDS)
def test_existence_on_random_split_algebras(seed):
    algebra = random_split_algebra(random.Random(seed))
    report = check_mfa(existence_mfa(algebra))
    assert report.passed, report.failed_names()


@pytest.mark.parametrize('seed', SEEDS)
def test_division_identity(seed):
    rng = random.Random(seed)
    data = random_nilpotent_data(rng, max_dim=4)
    x = [[rng.randint(-3, 3) for _ in range(data.s)] for _ in range(data.r)]
    for k in range(2 * data.r + 1):
        assert verify_division_identity(data, x, k).passed, f"k={k}"


@pytest.mark.parametrize('seed', SEEDS)
def test_synthetic_local_p2_structure(seed):
    rng = random.Random(seed)
    model = CohomologyModel.projective_space(2)
    bundle = BundleData.line_bundle(model, (0, -3, 0))
    dataset = synthetic_local_p2_dataset([rng.randint(-50, 50) for _ in range(2)])
    report = build_twisted_product(model, bundle, dataset, order=2).verify()
    assert report.passed, report.failed_names()
