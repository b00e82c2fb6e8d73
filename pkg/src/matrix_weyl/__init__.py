# -*- encoding: utf-8 -*-
"""
matrix-weyl - numerics for matrix-valued Jacobi operators.

Half-line Weyl m-functions of (Ju)(n) = u(n-1) + u(n+1) + B(n)u(n) with
d x d real symmetric B, computed by contraction iteration in the Siegel
upper half-space, and the experiments built on them: reflectionless
residuals on the absolutely continuous spectrum, value distribution of
compressed m-functions through harmonic measure, and omega-limits of the
shift on bounded potentials.

Provides:
- Potentials: PotentialSpec, PeriodicTail and a catalog of named builders
- Lattice: solutions, Wronskians, transfer matrices, Green's identity
- Siegel geometry: SiegelPoint, SymplecticMap, Siegel distance, Mobius action
- Weyl m-functions: m_plus, m_minus, m_tilde_minus, boundary values, ranks
- Harmonic measure: IntervalUnion, harmonic_measure, vd_integral
- Dynamics: potential_metric, omega_limit, dist_to_omega
- Experiments: reflectionless_residual, bp_defect, remling_check
- Selftest batteries and a CLI (matrix-weyl)
"""

__version__ = "0.1.0"

from matrix_weyl.errors import (
    DegenerateConfigurationError,
    GrowthError,
    IdentityViolationError,
    IllConditionedError,
    InvalidInputError,
    InvalidMapError,
    NotPositiveDefiniteError,
    SiteRangeError,
    SpecViolationError,
    SpectralError,
)

from matrix_weyl.potentials import (
    PeriodicTail,
    PotentialKind,
    PotentialSpec,
    Support,
)

from matrix_weyl.lattice import (
    MatrixSolution,
    SampledSequence,
    Side,
    TransferMatrix,
    greens_residual,
    intertwining_residual,
    iterate_solutions,
    transfer,
    transfer_product,
    wronskian,
)

from matrix_weyl.siegel import (
    SiegelPoint,
    SymplecticMap,
    compress,
    finsler_norm,
    hyperbolic_distance,
    mobius,
    pseudo_hyperbolic,
    siegel_distance,
)

from matrix_weyl.weyl import (
    RankClassification,
    SeedMode,
    WeylEvaluation,
    WeylOptions,
    ac_density,
    boundary_value,
    m_minus,
    m_plus,
    m_plus_grid,
    m_tilde_minus,
    m_tilde_minus_grid,
    m_tilde_minus_halfline,
    rank_classify,
    resolvent_oracle,
)

from matrix_weyl.harmonic import (
    IntervalUnion,
    QuadratureGrid,
    VDResult,
    boundary_omega,
    harmonic_measure,
    vd_integral,
)

from matrix_weyl.dynamics import (
    OmegaLimitApprox,
    OmegaMethod,
    dist_to_omega,
    omega_limit,
    potential_metric,
    shift,
)

from matrix_weyl.experiments import (
    BPDefectReport,
    ReflectionlessReport,
    RemlingReport,
    bp_defect,
    reflectionless_residual,
    remling_check,
    vd_convergence_check,
)

from matrix_weyl.catalog import (
    CATALOG,
    CatalogEntry,
    build_all_potentials,
    build_potential,
)

from matrix_weyl.selftest import (
    BatteryResult,
    CheckFailure,
    run_selftest,
    siegel_battery,
    sign_convention_battery,
)

__all__ = [
    # Errors
    "SpectralError",
    "InvalidInputError",
    "NotPositiveDefiniteError",
    "IllConditionedError",
    "GrowthError",
    "SpecViolationError",
    "DegenerateConfigurationError",
    "InvalidMapError",
    "SiteRangeError",
    "IdentityViolationError",
    # Potentials
    "PotentialSpec",
    "PotentialKind",
    "PeriodicTail",
    "Support",
    # Lattice
    "Side",
    "SampledSequence",
    "MatrixSolution",
    "TransferMatrix",
    "iterate_solutions",
    "wronskian",
    "greens_residual",
    "transfer",
    "transfer_product",
    "intertwining_residual",
    # Siegel geometry
    "SiegelPoint",
    "SymplecticMap",
    "finsler_norm",
    "siegel_distance",
    "pseudo_hyperbolic",
    "hyperbolic_distance",
    "mobius",
    "compress",
    # Weyl m-functions
    "WeylOptions",
    "SeedMode",
    "WeylEvaluation",
    "RankClassification",
    "m_plus",
    "m_minus",
    "m_tilde_minus",
    "m_plus_grid",
    "m_tilde_minus_grid",
    "m_tilde_minus_halfline",
    "resolvent_oracle",
    "boundary_value",
    "ac_density",
    "rank_classify",
    # Harmonic measure
    "IntervalUnion",
    "QuadratureGrid",
    "VDResult",
    "harmonic_measure",
    "boundary_omega",
    "vd_integral",
    # Dynamics
    "OmegaLimitApprox",
    "OmegaMethod",
    "potential_metric",
    "shift",
    "omega_limit",
    "dist_to_omega",
    # Experiments
    "ReflectionlessReport",
    "BPDefectReport",
    "RemlingReport",
    "reflectionless_residual",
    "bp_defect",
    "remling_check",
    "vd_convergence_check",
    # Catalog
    "CATALOG",
    "CatalogEntry",
    "build_potential",
    "build_all_potentials",
    # Selftest
    "BatteryResult",
    "CheckFailure",
    "sign_convention_battery",
    "siegel_battery",
    "run_selftest",
]
