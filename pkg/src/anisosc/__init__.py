"""Canonical map from the anisotropic to the isotropic oscillator, its
generating functions, and the su(2) invariants it exposes."""

from .dynamics import DriftReport, Trajectory, drift_report, evolve_trajectory, exact_flow, leapfrog_flow
from .errors import (
    AnisoscError,
    BranchAmbiguity,
    ConfigError,
    ConjugacyViolation,
    DimensionMismatch,
    EvaluationError,
    ImaginaryResidualExceeded,
    InvalidStep,
    IsotropicPole,
    NonFiniteValue,
    OriginSingularity,
    SamplingTooCoarse,
)
from .genfunc import GenFuncKind, check_gradients, check_legendre, evaluate
from .invariants import (
    PhaseAngles,
    aniso_invariants_closed,
    aniso_invariants_pauli,
    epsilon_invariants,
    iso_invariants,
    phase_angles,
)
from .phase_space import (
    ComplexPhasePoint,
    FrequencySpec,
    InvariantSet,
    RealPhasePoint,
    hamiltonian_real,
    validate,
)
from .poisson import BracketBasis, poisson_bracket, verify_canonical, verify_su2
from .transforms import (
    BranchMode,
    BranchPolicy,
    aniso_to_iso,
    complexify,
    decomplexify,
    iso_to_aniso,
    scale_from_unit,
    scale_to_unit,
)

__version__ = "0.1.0"
