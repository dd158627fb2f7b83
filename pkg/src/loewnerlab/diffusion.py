"""The one-dimensional diffusion obtained from the flow by the random clock.

    dT_u = -4 T_u / (1 + kappa T_u^2) du + dW_u,     T_0 = 0.

The drift is odd and globally bounded by 2/sqrt(kappa), so Euler-Maruyama
with additive unit noise is strong order 1 and needs no step control.  The
module also carries the classical scale/speed pair of the process: the scale
density (1+kappa x^2)^{4/kappa} and the speed density (1+kappa x^2)^{-4/kappa},
whose integrability over the line is exactly the kappa < 8 phase.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .flow import Kappa, as_kappa
from .rng import gaussian_increments

__all__ = [
    "DiffusionSpec", "DiffusionPath", "drift_T", "simulate_T",
    "scale_density", "speed_density", "speed_integrable", "ergodic_average",
    "export_diffusion_csv",
]

DIRECT_SDE = "direct_sde"
EXTRACTED_FROM_FLOW = "extracted_from_flow"


def drift_T(T, kappa):
    """Drift -4T/(1+kappa T^2); odd in T, maximal modulus 2/sqrt(kappa)."""
    kappa = as_kappa(kappa)
    T = np.asarray(T, dtype=float) if not np.isscalar(T) else T
    return -4.0 * T / (1.0 + kappa.value * T * T)


def scale_density(x, kappa):
    """Derivative s'(x) = (1+kappa x^2)^{4/kappa} of the scale function."""
    kappa = as_kappa(kappa)
    return (1.0 + kappa.value * np.asarray(x, dtype=float) ** 2) ** (4.0 / kappa.value)


def speed_density(x, kappa):
    """Speed-measure density (1+kappa x^2)^{-4/kappa}, up to normalization.

    Integrable over the real line iff 8/kappa > 1, i.e. kappa < 8.
    """
    kappa = as_kappa(kappa)
    return (1.0 + kappa.value * np.asarray(x, dtype=float) ** 2) ** (-4.0 / kappa.value)


def speed_integrable(kappa):
    """True iff the speed density is a finite measure (kappa < 8)."""
    return as_kappa(kappa).subcritical


@dataclass(frozen=True)
class DiffusionSpec:
    """Parameters of a direct Euler-Maruyama run of the T-diffusion."""

    kappa: Kappa
    du: float
    u_max: float
    T0: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kappa", as_kappa(self.kappa))
        for name in ("du", "u_max", "T0"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValidationError(f"{name} must be finite, got {v!r}")
        if self.du <= 0.0 or self.u_max < self.du:
            raise ValidationError("need 0 < du <= u_max")

    @property
    def n_steps(self):
        return int(math.ceil(self.u_max / self.du - 1e-12))


@dataclass(frozen=True)
class DiffusionPath:
    """Trajectory of T on the uniform clock grid u_k = u0 + k*du."""

    kappa: Kappa
    du: float
    T: np.ndarray = field(repr=False)
    origin: str = DIRECT_SDE
    seed: int = 0
    u0: float = 0.0

    def __post_init__(self):
        if len(self.T) < 1:
            raise ValidationError("T must be nonempty")
        if self.origin not in (DIRECT_SDE, EXTRACTED_FROM_FLOW):
            raise ValidationError(f"unknown origin {self.origin!r}")
        if self.du <= 0.0:
            raise ValidationError("du must be positive")
        self.T.setflags(write=False)

    def __len__(self):
        return len(self.T)

    @property
    def u(self):
        return self.u0 + np.arange(len(self.T)) * self.du


def simulate_T(spec, *, driver=None, path_index=0):
    """Integrate the T-SDE with Euler-Maruyama.

    ``driver``, when given, supplies the Brownian increments (variance du per
    entry); zeros give the deterministic drift flow.  Same (seed, path_index)
    => bit-identical path.
    """
    n = spec.n_steps
    if driver is None:
        dW = gaussian_increments(spec.seed, path_index, n, spec.du)
    else:
        dW = np.asarray(driver, dtype=float)
        if len(dW) != n:
            raise ValidationError(f"driver must have {n} increments, got {len(dW)}")

    out = np.empty(n + 1)
    out[0] = spec.T0
    k = spec.kappa.value
    du = spec.du
    T = float(spec.T0)
    dW_list = dW.tolist()
    for i in range(n):
        T += du * (-4.0 * T / (1.0 + k * T * T)) + dW_list[i]
        out[i + 1] = T
    return DiffusionPath(kappa=spec.kappa, du=du, T=out, origin=DIRECT_SDE,
                         seed=spec.seed)


def ergodic_average(path, f):
    """Trapezoidal time average (1/u) * integral of f(T_s) ds along the path."""
    if len(path) < 2:
        raise ValidationError("need at least two grid points to average")
    vals = np.asarray(f(path.T), dtype=float)
    if vals.shape != path.T.shape:
        vals = np.array([f(v) for v in path.T], dtype=float)
    span = path.du * (len(path) - 1)
    return float(np.trapezoid(vals, dx=path.du) / span)


def export_diffusion_csv(path, csv_path):
    """Write a diffusion path as CSV ``u,T``."""
    data = np.column_stack([path.u, path.T])
    with open(csv_path, "w", encoding="utf8") as fh:
        fh.write("u,T\n")
        np.savetxt(fh, data, fmt="%.17g", delimiter=",")
