"""Exact computations for neighborhoods of a cuspidal rational curve with
topologically trivial normal bundle: Ueda classes, linearization and the
resolution combinatorics of the elliptic model."""

__version__ = "0.1.0"

from .atlas import (
    Atlas,
    TransitionExpansion,
    derive_w_transition,
    glued_atlas,
    load_atlas,
    normal_bundle_class,
    normalize,
    perturbed_atlas,
    trivial_atlas,
    validate,
)
from .cech import AnnulusWindow, Cochain, Cocycle, bounded_split, delta, s_functional, split
from .cusp import ChartRadii, CuspFunction, extend_to_V0, pullback
from .errors import (
    DomainError,
    FiniteTypeDetected,
    InputError,
    ObstructionError,
    UedaError,
)
from .linearize import (
    LinearizationResult,
    LinearizationState,
    MajorantLedger,
    estimate_constants,
    hij_coefficients,
    linearize,
    linearize_step,
    majorant_sequence,
    radius_estimate,
)
from .obstruction import (
    Classification,
    ObstructionReport,
    SystemN,
    classify,
    cocycle_identity_check,
    obstruction,
    upgrade,
    verify_type,
)
from .resolve import (
    CoverConfig,
    DivisorLattice,
    contract_chain,
    cover_pullback,
    ell_from_type,
    resolve_cusp,
    self_intersections,
)
from .series import BSeries, LSeries, MSeries, PSeries, Scalar, compose, reversion
