"""Backward Loewner dynamics for a single tracked point in the upper half-plane.

The tracked process is ``z_t = x_t + i*y_t`` started (by default) at ``i``,
which solves

    dz_t = -2/z_t dt - sqrt(kappa) dB_t,

or componentwise

    dx_t = -2 x_t / (x_t^2 + y_t^2) dt - sqrt(kappa) dB_t,
    dy_t =  2 y_t / (x_t^2 + y_t^2) dt.

The imaginary part is strictly increasing, so from ``y_0 = 1`` the flow stays
away from the real axis and the coefficients are globally Lipschitz on the
reachable set; an explicit Euler-Maruyama step on a uniform grid is adequate.

The driver is stored as *unscaled* Brownian increments; ``sqrt(kappa)`` is
applied inside :func:`step`, so one driver sample can be reused across kappa.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .rng import gaussian_increments

__all__ = [
    "Kappa", "FlowState", "FlowPath", "as_kappa",
    "drift", "drift_xy", "step", "cot_arg", "simulate_flow",
    "discrete_bound_slack", "export_flow_csv",
]


@dataclass(frozen=True)
class Kappa:
    """SLE parameter kappa > 0.

    ``subcritical`` is True below the integrability phase boundary kappa = 8.
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or v <= 0.0:
            raise ValidationError(f"kappa must be a positive real, got {self.value!r}")
        object.__setattr__(self, "value", v)

    @property
    def subcritical(self):
        return self.value < 8.0

    @property
    def sqrt(self):
        return math.sqrt(self.value)

    def __float__(self):
        return self.value


def as_kappa(kappa):
    """Coerce a float or :class:`Kappa` to :class:`Kappa`."""
    return kappa if isinstance(kappa, Kappa) else Kappa(float(kappa))


@dataclass(frozen=True)
class FlowState:
    """State (t, x, y) of the tracked point, with y > 0."""

    t: float
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t >= 0.0):
            raise ValidationError(f"t must be finite and >= 0, got {self.t!r}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError("x, y must be finite")
        if self.y <= 0.0:
            raise ValidationError(f"y must be positive, got {self.y!r}")

    @property
    def z(self):
        return complex(self.x, self.y)


def drift(state):
    """Drift (dx/dt, dy/dt) of the flow at ``state``.

    Returns ``(-2x/(x^2+y^2), 2y/(x^2+y^2))``; the denominator is bounded
    below by y^2 > 0, so no singularity is reachable.
    """
    return drift_xy(state.x, state.y)


def drift_xy(x, y):
    """Vectorized drift; accepts scalars or arrays."""
    r2 = x * x + y * y
    return -2.0 * x / r2, 2.0 * y / r2


def cot_arg(state):
    """Cotangent of the argument of z: x/y."""
    return state.x / state.y


def step(state, dB, dt, kappa):
    """One explicit Euler-Maruyama step of size ``dt``.

    ``dB`` is an unscaled Brownian increment (variance dt); the noise enters
    only the real part, as ``-sqrt(kappa)*dB``.  The y-drift is strictly
    positive, so y increases along every step.
    """
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValidationError(f"dt must be positive, got {dt!r}")
    kappa = as_kappa(kappa)
    fx, fy = drift_xy(state.x, state.y)
    return FlowState(
        t=state.t + dt,
        x=state.x + dt * fx - kappa.sqrt * dB,
        y=state.y + dt * fy,
    )


@dataclass(frozen=True)
class FlowPath:
    """A discretized trajectory on the uniform grid t_k = k*dt.

    Arrays ``t, x, y`` have length ``n_steps + 1``; ``driver_increments``
    holds the ``n_steps`` unscaled Brownian increments that produced it.
    Immutable after construction and safe to share between threads.
    """

    kappa: Kappa
    dt: float
    seed: int
    horizon: float
    t: np.ndarray = field(repr=False)
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    driver_increments: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = len(self.t)
        if n < 1 or len(self.x) != n or len(self.y) != n:
            raise ValidationError("t, x, y must be nonempty and equally long")
        if len(self.driver_increments) != n - 1:
            raise ValidationError("driver_increments must have one entry per step")
        if n > 1:
            gaps = np.diff(self.t)
            if not np.allclose(gaps, self.dt, rtol=1e-9, atol=1e-12):
                raise ValidationError("t-grid must be uniform with spacing dt")
        if np.any(self.y <= 0.0):
            raise ValidationError("y must stay positive")
        for arr in (self.t, self.x, self.y, self.driver_increments):
            arr.setflags(write=False)

    def __len__(self):
        return len(self.t)

    @property
    def n_steps(self):
        return len(self.t) - 1

    def state(self, k):
        """The k-th grid point as a :class:`FlowState`."""
        return FlowState(t=float(self.t[k]), x=float(self.x[k]), y=float(self.y[k]))

    def cot_arg(self):
        """Array of x/y along the path."""
        return self.x / self.y


def simulate_flow(kappa, horizon, dt, seed, *, x0=0.0, y0=1.0, path_index=0,
                  driver=None):
    """Simulate one backward-Loewner path from ``(x0, y0)`` up to ``horizon``.

    Parameters
    ----------
    kappa : float or Kappa
    horizon : float
        Simulated capacity-time span; the path takes ``ceil(horizon/dt)``
        steps, so the final grid time is the first multiple of dt >= horizon.
    dt : float
        Uniform step size, 0 < dt <= horizon.
    seed, path_index : int
        Key of the Philox driver stream; same key => bit-identical path.
    driver : array of float, optional
        Unscaled Brownian increments to use instead of drawing from the
        stream (e.g. zeros for the deterministic flow, or a shared sample
        reused across kappa).  Must have ``ceil(horizon/dt)`` entries.
    """
    kappa = as_kappa(kappa)
    for name, v in (("horizon", horizon), ("dt", dt), ("x0", x0), ("y0", y0)):
        if not math.isfinite(v):
            raise ValidationError(f"{name} must be finite, got {v!r}")
    if dt <= 0.0 or horizon < dt:
        raise ValidationError("need 0 < dt <= horizon")
    if y0 <= 0.0:
        raise ValidationError("y0 must be positive")

    n = int(math.ceil(horizon / dt - 1e-12))
    if driver is None:
        dB = gaussian_increments(seed, path_index, n, dt)
    else:
        dB = np.asarray(driver, dtype=float)
        if len(dB) != n:
            raise ValidationError(f"driver must have {n} increments, got {len(dB)}")

    xs = np.empty(n + 1)
    ys = np.empty(n + 1)
    xs[0], ys[0] = x0, y0
    sqk = kappa.sqrt
    x, y = float(x0), float(y0)
    dB_list = dB.tolist()
    for k in range(n):
        r2 = x * x + y * y
        x = x + dt * (-2.0 * x / r2) - sqk * dB_list[k]
        y = y + dt * (2.0 * y / r2)
        xs[k + 1] = x
        ys[k + 1] = y

    return FlowPath(
        kappa=kappa, dt=float(dt), seed=int(seed), horizon=float(horizon),
        t=np.arange(n + 1) * float(dt), x=xs, y=ys, driver_increments=dB,
    )


def discrete_bound_slack(path):
    """Exact per-grid-point slack of the Euler scheme over the continuum bound.

    In the continuum y_t^2 <= y_0^2 + 4t.  For the Euler update the squared
    increment adds at most ``4 dt^2 / y_k^2`` per step, so the scheme-exact
    statement is

        y_k^2 <= y_0^2 + 4 t_k + S_k,   S_k = 4 dt^2 * sum_{j<k} 1/y_j^2.

    Returns the array S_k (same length as the path).  S_k <= 4*dt*t_k and is
    of order dt * log(1+4t), i.e. vanishes with the step size.
    """
    inv = 1.0 / (path.y[:-1] ** 2)
    slack = np.empty(len(path))
    slack[0] = 0.0
    np.cumsum(4.0 * path.dt * path.dt * inv, out=slack[1:])
    return slack


def export_flow_csv(path, csv_path, sidecar_path=None):
    """Write a path as CSV ``t,x,y`` plus a JSON sidecar with the run key.

    The sidecar records ``{kappa, dt, seed, horizon}``; by default it sits
    next to the CSV with extension ``.json``.
    """
    csv_path = str(csv_path)
    data = np.column_stack([path.t, path.x, path.y])
    with open(csv_path, "w", encoding="utf8") as fh:
        fh.write("t,x,y\n")
        np.savetxt(fh, data, fmt="%.17g", delimiter=",")
    if sidecar_path is None:
        sidecar_path = csv_path[:-4] + ".json" if csv_path.endswith(".csv") \
            else csv_path + ".json"
    with open(sidecar_path, "w", encoding="utf8") as fh:
        json.dump({"kappa": path.kappa.value, "dt": path.dt,
                   "seed": path.seed, "horizon": path.horizon}, fh, indent=2)
        fh.write("\n")
    return sidecar_path
