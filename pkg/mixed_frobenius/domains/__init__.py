from .errors import FrobeniusError, InputError
from .reports import AxiomRecord, VerificationReport
from .algebra import FiniteAlgebra, check_invariant_metric, check_semisimple_action, frobenius_filtration_existence
from .mfa import (
    LambdaAlgebra,
    LocalizedMetric,
    MixedFrobeniusAlgebra,
    NilpotentData,
    NondegenerateFiltration,
    check_closing_formulas,
    check_mfa,
    existence_mfa,
    extract_filtration,
    mfa_from_invariant_localized_metric,
    nilpotent_filtration_direct,
    nilpotent_mfa,
    normalize_metric,
    residue_metric_well_defined_check,
    verify_division_identity,
)
from .formal import (
    FormalMFS,
    FormalSaito,
    LocalizedFormalFrobenius,
    check_formal_mfs,
    check_formal_saito,
    check_localized_formal_frobenius,
    limit_mfs,
    mfs_from_graded_mfa,
    potential_vector_field,
    saito_from_algebra,
)
from .geom import (
    BundleData,
    CohomologyModel,
    GWDataset,
    TwistedProductModel,
    build_twisted_product,
    check_degree_bound,
    check_potential_decomposition,
    classical_limit_filtration,
    localized_metric_geom,
)
from .file_handlers import AlgebraInput, FileHandlerFactory, GeometryInput

__all__ = [
    'FrobeniusError',
    'InputError',
    'AxiomRecord',
    'VerificationReport',
    'FiniteAlgebra',
    'check_invariant_metric',
    'check_semisimple_action',
    'frobenius_filtration_existence',
    'LambdaAlgebra',
    'LocalizedMetric',
    'MixedFrobeniusAlgebra',
    'NilpotentData',
    'NondegenerateFiltration',
    'check_closing_formulas',
    'check_mfa',
    'existence_mfa',
    'extract_filtration',
    'mfa_from_invariant_localized_metric',
    'nilpotent_filtration_direct',
    'nilpotent_mfa',
    'normalize_metric',
    'residue_metric_well_defined_check',
    'verify_division_identity',
    'FormalMFS',
    'FormalSaito',
    'LocalizedFormalFrobenius',
    'check_formal_mfs',
    'check_formal_saito',
    'check_localized_formal_frobenius',
    'limit_mfs',
    'mfs_from_graded_mfa',
    'potential_vector_field',
    'saito_from_algebra',
    'BundleData',
    'CohomologyModel',
    'GWDataset',
    'TwistedProductModel',
    'build_twisted_product',
    'check_degree_bound',
    'check_potential_decomposition',
    'classical_limit_filtration',
    'localized_metric_geom',
    'AlgebraInput',
    'FileHandlerFactory',
    'GeometryInput',
]
