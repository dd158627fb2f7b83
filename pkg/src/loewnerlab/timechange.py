"""The random clock u(t) = int_0^t ds/y_s^2 and its inverse.

Along every path from ``i`` one has ``1 <= y`` and ``y^2 <= 1 + 4t`` (up to
the Euler scheme's O(dt^2) slack), hence

    (1/4) log(1 + 4t)  <=  u(t)  <=  t,

so the clock diverges with t and its inverse c(u) is defined for all u up to
the tabulated range.  Hitting times of deterministic levels a_n of the clock
are the embedding times of the flow.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .diffusion import DiffusionPath, EXTRACTED_FROM_FLOW
from .errors import HorizonExceededError, ValidationError
from .flow import as_kappa

__all__ = [
    "TimeChangeMap", "u_tilde", "inverse_c", "hitting_time", "schedule_a",
    "extract_T", "export_timechange_csv",
]


@dataclass(frozen=True)
class TimeChangeMap:
    """Tabulation of the clock on a uniform t-grid; strictly increasing."""

    t: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(self.t) != len(self.u) or len(self.t) < 1:
            raise ValidationError("t and u must be nonempty and equally long")
        if self.u[0] != 0.0:
            raise ValidationError("clock must start at u=0")
        if len(self.u) > 1 and np.any(np.diff(self.u) <= 0.0):
            raise ValidationError("clock values must be strictly increasing")
        self.t.setflags(write=False)
        self.u.setflags(write=False)

    @property
    def u_max(self):
        return float(self.u[-1])


def u_tilde(path):
    """Cumulative trapezoidal clock of a flow path.

    The integrand 1/y^2 is smooth and bounded by 1/y_0^2 on the reachable
    set, so the trapezoidal rule is O(dt^2)-accurate.
    """
    inv = 1.0 / (path.y * path.y)
    u = np.empty(len(path))
    u[0] = 0.0
    np.cumsum(0.5 * path.dt * (inv[:-1] + inv[1:]), out=u[1:])
    return TimeChangeMap(t=path.t.copy(), u=u)


def _check_range(tmap, u):
    u = np.asarray(u, dtype=float)
    if np.any(u < 0.0):
        raise ValidationError("clock values are nonnegative")
    if np.any(u > tmap.u_max * (1.0 + 1e-12)):
        raise HorizonExceededError(
            f"requested clock value {float(np.max(u)):g} beyond tabulated "
            f"maximum {tmap.u_max:g}; extend the flow horizon")
    return u


def inverse_c(tmap, u):
    """Piecewise-linear inverse clock c(u) = inf{t : u(t) >= u}.

    Exact on grid points (c(u(t_k)) = t_k) and monotone in u.  Accepts
    scalars or arrays; raises :class:`HorizonExceededError` past the table.
    """
    uq = _check_range(tmap, u)
    out = np.interp(uq, tmap.u, tmap.t)
    return float(out) if np.isscalar(u) or np.ndim(u) == 0 else out


def hitting_time(tmap, a):
    """Time at which the clock first reaches level ``a``.

    Identical to :func:`inverse_c`; exposed under the hitting-time name for
    the embedding experiment.
    """
    return inverse_c(tmap, a)


def schedule_a(kappa, n):
    """Embedding level a_n = log(1 + 4n/kappa); increasing and divergent."""
    kappa = as_kappa(kappa)
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    return math.log1p(4.0 * n / kappa.value)


def extract_T(path, tmap, u_grid):
    """Read the diffusion off a flow path: T_u = cot(arg z_{c(u)}) / sqrt(kappa).

    x and y are interpolated linearly between flow grid points at t = c(u),
    consistent with the first-order accuracy of the Euler path itself.  The
    u-grid must be uniform and inside the tabulated clock range.
    """
    u_grid = np.asarray(u_grid, dtype=float)
    if u_grid.ndim != 1 or len(u_grid) < 1:
        raise ValidationError("u_grid must be a nonempty 1-d sequence")
    if len(u_grid) > 1:
        gaps = np.diff(u_grid)
        du = float(gaps[0])
        if du <= 0.0 or not np.allclose(gaps, du, rtol=1e-9, atol=1e-12):
            raise ValidationError("u_grid must be uniform and increasing")
    else:
        du = 1.0
    c = inverse_c(tmap, u_grid)
    x = np.interp(c, path.t, path.x)
    y = np.interp(c, path.t, path.y)
    T = (x / y) / path.kappa.sqrt
    return DiffusionPath(kappa=path.kappa, du=du, T=T,
                         origin=EXTRACTED_FROM_FLOW, seed=path.seed,
                         u0=float(u_grid[0]))


def export_timechange_csv(tmap, csv_path):
    """Write the clock tabulation as CSV ``t,u``."""
    data = np.column_stack([tmap.t, tmap.u])
    with open(csv_path, "w", encoding="utf8") as fh:
        fh.write("t,u\n")
        np.savetxt(fh, data, fmt="%.17g", delimiter=",")
