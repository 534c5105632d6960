"""Exponentially fitted two-derivative DIRK schemes for oscillatory ODEs."""

from .analysis import (
    PhaseReport,
    StabilityRegion,
    phase_leading_terms,
    stability_R,
    stability_region,
)
from .fitting import FitProbe, final_fit_residual, internal_fit_residual
from .frequency import FreqSearch, estimate_omega, golden_section
from .integrator import ConvergenceError, Problem, RunReport, StepConfig, integrate, step
from .problems import almost_periodic, fpu, get_problem, harmonic, kepler, sine_gordon
from .tableau import (
    PRESETS,
    NumericTableau,
    PoleError,
    SchemeSpec,
    build_scheme,
    eftddirk2s4,
    eftddirk2s5,
    eftddirk3s6,
    eval_tableau,
    taylor_tableau,
)
from .trees import ORDER_TREES, BiTree, elementary_weight, order_residuals

__version__ = "0.1.0"
