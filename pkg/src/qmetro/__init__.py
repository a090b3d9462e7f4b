"""Bounds on phase-estimation precision for N parallel uses of a noisy quantum channel."""
from ._config import TOL, BudgetExceeded, ChannelValidationError, NotApplicable, Tolerances
from .channel import (
    Channel,
    ChoiPair,
    DensityMatrix,
    apply,
    canonicalize,
    channel_from_dict,
    channel_to_dict,
    choi,
    load_channel,
    phase_encode,
    tensor_apply,
    validate,
)
from .classical import (
    Classification,
    CSResult,
    classical_fisher,
    classify_phi_extremality,
    cs_bound,
    epsilon_max,
    mu_condition,
    tangent_simulation,
)
from .extension import CEResult, alpha_beta, assemble_lmi, beta_constraint_solve, ce_sdp_bound, finite_n_bound
from .models import MODELS, ModelSpec, build, reference_bound, reference_h
from .oracle import OracleResult, crlb, optimize_input, qfi
from .sweep import COLUMNS, SweepRow, crossover, enhancement_factor, sweep

__version__ = "0.1.0"
