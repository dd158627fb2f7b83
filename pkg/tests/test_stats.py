import math

import numpy as np
import pytest

from loewnerlab.errors import ValidationError
from loewnerlab.stats import Sample, ecdf, histogram, ks_one_sample, ks_two_sample


def test_sample_validation():
    with pytest.raises(ValidationError):
        Sample([])
    with pytest.raises(ValidationError):
        Sample([1.0, math.nan])
    with pytest.raises(ValidationError):
        Sample([2.0, 1.0], is_sorted=True)
    s = Sample([3.0, 1.0, 2.0])
    assert list(s.sorted_values) == [1.0, 2.0, 3.0]
    assert len(s) == 3


def test_ecdf_values_and_ties():
    s = Sample([1.0, 2.0, 3.0])
    assert ecdf(s, 2.0) == pytest.approx(2.0 / 3.0)
    assert ecdf(s, 0.0) == 0.0
    assert ecdf(s, 3.0) == 1.0
    assert ecdf(s, 5.0) == 1.0
    ties = Sample([0.0, 0.0, 1.0])
    assert ecdf(ties, 0.0) == pytest.approx(2.0 / 3.0)


def test_ecdf_right_continuous_and_monotone():
    s = Sample([0.5, 0.5, 1.5, 2.0])
    xs = np.linspace(-1.0, 3.0, 101)
    vals = ecdf(s, xs)
    assert np.all(np.diff(vals) >= 0.0)
    assert ecdf(s, 0.5) > ecdf(s, 0.5 - 1e-12)


def test_ks_one_sample_exact_cases():
    assert ks_one_sample(Sample([0.5]), lambda x: np.clip(x, 0, 1)) == pytest.approx(0.5)
    n = 10
    quantile_sample = (np.arange(1, n + 1) - 0.5) / n
    d = ks_one_sample(Sample(quantile_sample), lambda x: np.clip(x, 0, 1))
    assert d == pytest.approx(0.5 / n)


def test_ks_one_sample_scalar_callable_fallback():
    d = ks_one_sample(Sample([0.25, 0.75]), lambda x: min(max(x, 0.0), 1.0))
    assert d == pytest.approx(0.25)


def test_ks_two_sample_cases():
    assert ks_two_sample([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0
    assert ks_two_sample([0.0, 1.0], [2.0, 3.0]) == 1.0
    assert ks_two_sample([0.0, 1.0], [0.5, 1.5]) == pytest.approx(0.5)


def test_ks_symmetry_and_monotone_invariance():
    rng = np.random.default_rng(0)
    a = rng.normal(size=300)
    b = rng.normal(loc=0.3, size=200)
    d1 = ks_two_sample(a, b)
    assert d1 == ks_two_sample(b, a)
    # strictly increasing transform applied to both leaves KS unchanged
    f = lambda x: np.exp(x) + x  # noqa: E731
    assert ks_two_sample(f(a), f(b)) == pytest.approx(d1, abs=1e-12)
    assert 0.0 <= d1 <= 1.0


def test_ks_one_sample_invariance_under_transform():
    rng = np.random.default_rng(4)
    a = rng.uniform(size=400)
    d_raw = ks_one_sample(a, lambda x: np.clip(x, 0, 1))
    d_tr = ks_one_sample(np.sqrt(a), lambda x: np.clip(x * x, 0, 1))
    assert d_tr == pytest.approx(d_raw, abs=1e-12)


def test_histogram_normalization_contract():
    s = Sample(np.concatenate([np.full(50, 0.25), np.full(50, 2.0)]))
    centers, density = histogram(s, 0.0, 1.0, 4)
    width = 0.25
    # half of the sample lies inside [0, 1]
    assert np.sum(density) * width == pytest.approx(0.5)
    assert centers[0] == pytest.approx(0.125)
    # all in-range mass sits in the second bin
    assert density[1] == pytest.approx(0.5 / width)
    assert density[0] == density[2] == density[3] == 0.0


def test_histogram_flat_for_uniform():
    rng = np.random.default_rng(1)
    centers, density = histogram(rng.uniform(size=200_000), 0.0, 1.0, 10)
    assert np.allclose(density, 1.0, atol=0.03)


def test_histogram_validation():
    with pytest.raises(ValidationError):
        histogram([1.0], 1.0, 1.0, 4)
    with pytest.raises(ValidationError):
        histogram([1.0], 0.0, 1.0, 0)
