import math

import numpy as np
import pytest

from loewnerlab.diffusion import EXTRACTED_FROM_FLOW
from loewnerlab.errors import HorizonExceededError, ValidationError
from loewnerlab.flow import simulate_flow
from loewnerlab.timechange import (TimeChangeMap, extract_T, hitting_time,
                                   inverse_c, schedule_a, u_tilde)


def _zero_noise_path(horizon, dt):
    n = int(round(horizon / dt))
    return simulate_flow(4.0, horizon, dt, seed=0, driver=np.zeros(n))


def _synthetic_map(slope, horizon=8.0, n=2001):
    t = np.linspace(0.0, horizon, n)
    return TimeChangeMap(t=t, u=slope * t)


def test_clock_is_identity_for_unit_y():
    t = np.arange(101) * 0.01
    path = simulate_flow(4.0, 1.0, 0.01, seed=0, driver=np.zeros(100))
    # build a constant-y tabulation directly: y == 1 means integrand == 1
    tmap = TimeChangeMap(t=t, u=t.copy())
    assert np.allclose(inverse_c(tmap, t), t)
    del path


def test_clock_closed_form_on_zero_noise_path():
    dt = 1e-4
    path = _zero_noise_path(2.0, dt)
    tmap = u_tilde(path)
    assert tmap.u_max == pytest.approx(0.25 * math.log(9.0), abs=1e-4)

    path20 = _zero_noise_path(20.0, 1e-4)
    tmap20 = u_tilde(path20)
    assert tmap20.u_max == pytest.approx(0.25 * math.log(81.0), abs=2e-4)


def test_clock_strictly_increasing_and_rooted_at_zero():
    path = simulate_flow(4.0, 3.0, 1e-3, seed=9)
    tmap = u_tilde(path)
    assert tmap.u[0] == 0.0
    assert np.all(np.diff(tmap.u) > 0.0)


def test_inverse_c_linear_map():
    tmap = _synthetic_map(0.25)
    assert inverse_c(tmap, 1.0) == pytest.approx(4.0)
    assert inverse_c(tmap, 0.0) == 0.0
    assert hitting_time(tmap, 0.0) == 0.0


def test_inverse_c_exact_on_grid_points_and_monotone():
    path = simulate_flow(2.0, 4.0, 1e-3, seed=4)
    tmap = u_tilde(path)
    sub = slice(0, len(tmap.t), 97)
    assert np.allclose(inverse_c(tmap, tmap.u[sub]), tmap.t[sub], atol=1e-12)
    us = np.linspace(0.0, tmap.u_max, 57)
    assert np.all(np.diff(inverse_c(tmap, us)) >= 0.0)


def test_zero_noise_inverse_and_hitting_time():
    path = _zero_noise_path(21.0, 1e-4)
    tmap = u_tilde(path)
    # c((1/4) log 9) = 2
    assert inverse_c(tmap, 0.25 * math.log(9.0)) == pytest.approx(2.0, abs=1e-3)
    # hitting time of a = log 3 is (e^{4a}-1)/4 = 20
    assert hitting_time(tmap, math.log(3.0)) == pytest.approx(20.0, abs=2e-2)


def test_horizon_exceeded_signal():
    tmap = _synthetic_map(1.0, horizon=2.0)
    with pytest.raises(HorizonExceededError):
        inverse_c(tmap, 2.5)
    with pytest.raises(HorizonExceededError):
        hitting_time(tmap, 1e9)
    with pytest.raises(ValidationError):
        inverse_c(tmap, -0.5)


def test_schedule_a_values_and_monotonicity():
    assert schedule_a(4.0, 1) == pytest.approx(math.log(2.0))
    assert schedule_a(4.0, 3) == pytest.approx(math.log(4.0))
    for kappa in (0.7, 2.0, 6.0):
        vals = [schedule_a(kappa, n) for n in range(1, 40)]
        assert np.all(np.diff(vals) > 0.0)
    with pytest.raises(ValidationError):
        schedule_a(4.0, 0)


def test_clock_bounds_on_noisy_paths():
    # (1/4) log(1+4S) - O(dt) <= u(S) <= S at every grid point
    dt = 1e-3
    for kappa, seed in ((2.0, 1), (4.0, 2), (6.0, 3)):
        path = simulate_flow(kappa, 10.0, dt, seed=seed)
        tmap = u_tilde(path)
        assert np.all(tmap.u <= tmap.t + 1e-12)
        lower = 0.25 * np.log1p(4.0 * tmap.t)
        assert np.all(tmap.u >= lower - dt)


def test_extract_T_zero_noise_is_zero():
    path = _zero_noise_path(5.0, 1e-3)
    tmap = u_tilde(path)
    dpath = extract_T(path, tmap, np.linspace(0.0, 0.3, 31))
    assert np.all(dpath.T == 0.0)
    assert dpath.origin == EXTRACTED_FROM_FLOW


def test_extract_T_initial_condition_and_errors():
    path = simulate_flow(4.0, 2.0, 1e-3, seed=5)
    tmap = u_tilde(path)
    single = extract_T(path, tmap, np.array([0.0]))
    assert single.T[0] == 0.0
    with pytest.raises(HorizonExceededError):
        extract_T(path, tmap, np.linspace(0.0, tmap.u_max + 1.0, 5))
    with pytest.raises(ValidationError):
        extract_T(path, tmap, np.array([0.0, 0.1, 0.15]))  # non-uniform


def test_extract_T_interpolates_x_and_y_linearly():
    path = simulate_flow(4.0, 1.0, 1e-2, seed=6)
    tmap = u_tilde(path)
    u_grid = np.linspace(0.0, 0.5 * tmap.u_max, 11)
    dpath = extract_T(path, tmap, u_grid)
    c = inverse_c(tmap, u_grid)
    x = np.interp(c, path.t, path.x)
    y = np.interp(c, path.t, path.y)
    assert np.allclose(dpath.T, (x / y) / 2.0, atol=1e-14)


def test_timechange_map_validation():
    with pytest.raises(ValidationError):
        TimeChangeMap(t=np.array([0.0, 1.0]), u=np.array([0.1, 0.2]))
    with pytest.raises(ValidationError):
        TimeChangeMap(t=np.array([0.0, 1.0]), u=np.array([0.0, 0.0]))


def test_extract_T_matches_direct_sde_in_distribution():
    # the extracted diffusion at a fixed clock value must agree in law with
    # the direct SDE simulation: Monte Carlo cross-validation at desk scale
    from loewnerlab.ensembles import diffusion_terminal
    from loewnerlab.stats import ks_two_sample
    u_star = 0.5
    extracted = []
    for i in range(400):
        path = simulate_flow(4.0, 10.0, 1e-3, seed=50, path_index=i)
        tmap = u_tilde(path)
        dpath = extract_T(path, tmap, np.linspace(0.0, u_star, 6))
        extracted.append(dpath.T[-1])
    direct = diffusion_terminal(4.0, u_star, 1e-3, 400, seed=51)
    d = ks_two_sample(np.array(extracted), direct)
    assert d <= 0.11  # 95% noise at n=m=400 is ~0.096
