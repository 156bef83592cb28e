"""Weighted interpolation inequalities and decay rates for pointwise-damped waves."""

__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    DomainError,
    HolderDecayError,
    InternalConsistencyError,
    InvalidFunctionError,
    InvalidInputError,
    InvalidWeightError,
    NoBracketError,
    RationalLocationError,
    StepFailureError,
    UnsupportedError,
)
from .weights import (  # noqa: E402
    EnvelopeResult,
    LowerConvexEnvelope,
    WeightProfile,
    check_weight_hypotheses,
    eval_weight,
    lower_convex_envelope,
)
from .interp import (  # noqa: E402
    Interpolant,
    InterpolationPair,
    build_phi,
    build_psi,
    check_admissible,
    check_optimality,
    h_fun,
    h_inv,
    holder_check,
    invert_monotone,
    jensen_upper_check,
    make_pair,
    power_invariance_check,
)
from .dioph import (  # noqa: E402
    ContinuedFraction,
    SineSequence,
    bounded_quotients,
    continued_fraction,
    liouville_constant,
    parse_location,
    sine_sequence,
)
from .wavesim import (  # noqa: E402
    DecayRateEstimator,
    DecayReport,
    ModalModel,
    ModalState,
    Trajectory,
    assemble_model,
    decay_report,
    energy,
    observability_check,
    project_initial_data,
    simulate,
    step,
    weak_and_strong_energies,
)

__all__ = [name for name in dir() if not name.startswith("_")]
