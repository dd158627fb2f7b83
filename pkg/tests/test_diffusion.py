import math

import numpy as np
import pytest

from loewnerlab.diffusion import (DiffusionPath, DiffusionSpec, drift_T,
                                  ergodic_average, scale_density, simulate_T,
                                  speed_density, speed_integrable)
from loewnerlab.errors import ValidationError
from loewnerlab.flow import as_kappa
from loewnerlab.stats import ks_two_sample


@pytest.mark.parametrize("T, kappa, expected", [
    (0.0, 4.0, 0.0),
    (0.5, 4.0, -1.0),
    (-1.0, 1.0, 2.0),
])
def test_drift_values(T, kappa, expected):
    assert drift_T(T, kappa) == pytest.approx(expected)


def test_drift_is_odd_and_bounded():
    for kappa in (0.5, 2.0, 4.0, 7.0):
        Ts = np.linspace(-50.0, 50.0, 4001)
        vals = drift_T(Ts, kappa)
        assert np.allclose(vals, -drift_T(-Ts, kappa))
        bound = 2.0 / math.sqrt(kappa)
        assert np.max(np.abs(vals)) <= bound + 1e-12
        # the bound is attained at T = 1/sqrt(kappa)
        assert abs(drift_T(1.0 / math.sqrt(kappa), kappa)) == pytest.approx(bound)


def test_single_euler_step_by_hand():
    spec = DiffusionSpec(kappa=4.0, du=0.1, u_max=0.1, T0=1.0, seed=0)
    path = simulate_T(spec, driver=np.zeros(1))
    assert path.T[-1] == pytest.approx(0.92)


def test_zero_is_fixed_point_of_zero_noise_flow():
    spec = DiffusionSpec(kappa=4.0, du=0.01, u_max=5.0, seed=0)
    path = simulate_T(spec, driver=np.zeros(spec.n_steps))
    assert np.all(path.T == 0.0)


def test_determinism_contract():
    spec = DiffusionSpec(kappa=2.0, du=1e-3, u_max=1.0, seed=12)
    a = simulate_T(spec)
    b = simulate_T(spec)
    assert np.array_equal(a.T, b.T)
    c = simulate_T(DiffusionSpec(kappa=2.0, du=1e-3, u_max=1.0, seed=13))
    assert not np.array_equal(a.T, c.T)


def test_spec_rejects_nonfinite_fields():
    with pytest.raises(ValidationError):
        DiffusionSpec(kappa=4.0, du=math.nan, u_max=1.0)
    with pytest.raises(ValidationError):
        DiffusionSpec(kappa=4.0, du=1e-3, u_max=math.inf)
    with pytest.raises(ValidationError):
        DiffusionSpec(kappa=4.0, du=1e-3, u_max=1.0, T0=math.nan)


@pytest.mark.parametrize("x, kappa, expected", [
    (0.0, 3.0, 1.0),
    (1.0, 4.0, 5.0),
    (1.0, 2.0, 9.0),
])
def test_scale_density(x, kappa, expected):
    assert scale_density(x, kappa) == pytest.approx(expected)


def test_speed_density_reciprocal_of_scale():
    xs = np.linspace(-8.0, 8.0, 101)
    for kappa in (1.0, 8 / 3, 4.0, 6.5):
        prod = scale_density(xs, kappa) * speed_density(xs, kappa)
        assert np.allclose(prod, 1.0, atol=1e-12)


def test_speed_integrability_phase():
    assert speed_integrable(7.9)
    assert not speed_integrable(8.0)
    assert not speed_integrable(9.0)
    # Ganidis-rate hypothesis: -2 x drift(x) -> 8/kappa as |x| grows
    for kappa in (2.0, 4.0, 7.9, 9.0):
        x = 1e6
        rate = -2.0 * drift_T(x, kappa) * x
        assert rate == pytest.approx(8.0 / kappa, rel=1e-9)
        assert (rate > 1.0) == (kappa < 8.0)


def test_ergodic_average_trivia():
    kappa = as_kappa(4.0)
    ramp = DiffusionPath(kappa=kappa, du=1e-3,
                         T=np.linspace(0.0, 1.0, 1001))
    assert ergodic_average(ramp, lambda T: np.ones_like(T)) == pytest.approx(1.0)
    assert ergodic_average(ramp, lambda T: T) == pytest.approx(0.5, abs=1e-9)


def test_law_symmetry_from_zero_start():
    # drift is odd, so T and -T are equal in law when started at 0
    from loewnerlab.ensembles import diffusion_terminal
    T = diffusion_terminal(4.0, 5.0, 1e-3, 4000, seed=3)
    d = ks_two_sample(T, -T)
    assert d <= 1.36 * math.sqrt(2.0 / 4000) * 1.5
