"""loewnerlab: backward Loewner flow, its random clock, and the induced diffusion.

The package simulates the backward Loewner dynamics z_t = h_t(i) - sqrt(k) B_t
in the upper half-plane, the random time change u(t) = int dt/y^2 that turns
the cotangent of the argument into an autonomous one-dimensional diffusion,
and the closed-form stationary law of that diffusion, with a distribution
toolkit and a CLI of seed-deterministic verification experiments.
"""

from .diffusion import (DiffusionPath, DiffusionSpec, drift_T, ergodic_average,
                        scale_density, simulate_T, speed_density,
                        speed_integrable)
from .ensembles import (diffusion_terminal, flow_hits, flow_invariant_scan,
                        flow_terminal)
from .errors import (DivergentRegionError, HorizonExceededError,
                     LoewnerLabError, NonNormalizableError, PoleError,
                     ValidationError)
from .flow import (FlowPath, FlowState, Kappa, as_kappa, cot_arg, drift,
                   simulate_flow, step)
from .special import (Hyp2F1Eval, digamma, hyp2f1, hyp2f1_series, pochhammer)
from .stationary import (StationaryLaw, argument_cdf, argument_pdf, cdf,
                         general_solution, kfe_residual, normalization,
                         normalization_closed_form, pdf, phase_scan,
                         sample_stationary)
from .stats import Sample, ecdf, histogram, ks_one_sample, ks_two_sample
from .timechange import (TimeChangeMap, extract_T, hitting_time, inverse_c,
                         schedule_a, u_tilde)

__version__ = "0.1.0"

__all__ = [
    "Kappa", "FlowState", "FlowPath", "as_kappa", "drift", "step", "cot_arg",
    "simulate_flow",
    "TimeChangeMap", "u_tilde", "inverse_c", "hitting_time", "schedule_a",
    "extract_T",
    "DiffusionSpec", "DiffusionPath", "drift_T", "simulate_T", "scale_density",
    "speed_density", "speed_integrable", "ergodic_average",
    "Hyp2F1Eval", "pochhammer", "digamma", "hyp2f1_series", "hyp2f1",
    "StationaryLaw", "normalization", "normalization_closed_form", "pdf",
    "cdf", "sample_stationary", "general_solution", "kfe_residual",
    "argument_pdf", "argument_cdf", "phase_scan",
    "Sample", "ecdf", "ks_one_sample", "ks_two_sample", "histogram",
    "flow_hits", "flow_terminal", "flow_invariant_scan", "diffusion_terminal",
    "LoewnerLabError", "ValidationError", "HorizonExceededError",
    "NonNormalizableError", "DivergentRegionError", "PoleError",
    "__version__",
]
