"""Large-time behaviour of the fractionally damped wave equation

    u_tt - Δu + ν(-Δ)^σ u_t = 0   on R^n,

checked numerically in Fourier space: exact mode multipliers, an RK4 mode
oracle, radial Plancherel quadrature and a decay/profile verification harness.
"""

from .data import RadialDatum, datum_fourier, datum_moment, parse_datum
from .errors import (
    BandViolation,
    DampwaveError,
    InsufficientPoints,
    InvalidParams,
    NoDecayBound,
    NonIntegrableSingularity,
    OutOfRealBranch,
    RegimeMismatch,
    SingularAtZero,
    StepUnderflow,
    TolNotMet,
)
from .model import (
    Band,
    CutoffBands,
    DecayExponents,
    DerivativeIndex,
    ModelParams,
    Regime,
    classify_regime,
    cutoff_eval,
    decay_exponents,
    expected_rate,
    is_admissible,
    rho_max,
)
from .oracle import ModeState, integrate_mode, ode_residual
from .quadrature import NormQuery, QuadratureConfig, lp_band_norm, sobolev_seminorm, tail_cutoff_radius
from .symbols import Family, SymbolSpec, eval_symbol, lambda_pm, phi_sigma, solution_hat

__version__ = "0.1.0"
