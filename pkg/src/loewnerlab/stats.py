"""ECDF, Kolmogorov-Smirnov statistics and histograms for the empirical checks.

Only the raw KS distances are computed (no p-values): every acceptance gate
in this lab is a direct threshold on D at a fixed sample size.  Ties are
handled by evaluating both one-sided gaps at each distinct point.
"""

import math

import numpy as np

from .errors import ValidationError

__all__ = ["Sample", "ecdf", "ks_one_sample", "ks_two_sample", "histogram"]


class Sample:
    """An immutable batch of finite real observations.

    ``sorted_values`` is computed lazily once and cached; construction from
    already-sorted data can assert it with ``is_sorted=True``.
    """

    def __init__(self, values, is_sorted=False):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or len(values) < 1:
            raise ValidationError("a sample must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(values)):
            raise ValidationError("sample values must be finite")
        if is_sorted and np.any(np.diff(values) < 0.0):
            raise ValidationError("is_sorted=True but values are not sorted")
        self._values = values.copy()
        self._values.setflags(write=False)
        self._sorted = self._values if is_sorted else None

    @property
    def values(self):
        return self._values

    @property
    def sorted_values(self):
        if self._sorted is None:
            self._sorted = np.sort(self._values)
            self._sorted.setflags(write=False)
        return self._sorted

    def __len__(self):
        return len(self._values)


def _as_sample(sample):
    return sample if isinstance(sample, Sample) else Sample(sample)


def ecdf(sample, x):
    """Right-continuous empirical CDF: fraction of values <= x."""
    sample = _as_sample(sample)
    pos = np.searchsorted(sample.sorted_values, x, side="right")
    out = pos / len(sample)
    return float(out) if np.ndim(x) == 0 else out


def ks_one_sample(sample, cdf):
    """sup_x |ECDF(x) - cdf(x)| against a continuous reference CDF.

    Evaluated exactly at the jump points, taking both the pre- and post-jump
    gaps; ``cdf`` must be monotone into [0, 1] and accept numpy arrays
    (scalar-only callables are mapped elementwise).
    """
    sample = _as_sample(sample)
    xs = sample.sorted_values
    try:
        ref = np.asarray(cdf(xs), dtype=float)
        if ref.shape != xs.shape:
            raise ValueError
    except (TypeError, ValueError):
        ref = np.array([cdf(x) for x in xs], dtype=float)
    n = len(xs)
    steps = np.arange(n + 1) / n
    return float(max(np.max(steps[1:] - ref), np.max(ref - steps[:-1])))


def ks_two_sample(first, second):
    """sup over pooled points of |ECDF_1 - ECDF_2|; symmetric, in [0, 1]."""
    first, second = _as_sample(first), _as_sample(second)
    pooled = np.concatenate([first.sorted_values, second.sorted_values])
    pooled = np.unique(pooled)
    e1 = np.searchsorted(first.sorted_values, pooled, side="right") / len(first)
    e2 = np.searchsorted(second.sorted_values, pooled, side="right") / len(second)
    return float(np.max(np.abs(e1 - e2)))


def histogram(sample, lo, hi, bins):
    """Bin centers and densities on [lo, hi].

    Normalized against the *full* sample size, so that
    sum(density) * binwidth equals the fraction of the sample inside
    [lo, hi]; out-of-range values only lower the covered mass.
    """
    sample = _as_sample(sample)
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValidationError("need finite lo < hi")
    if int(bins) != bins or bins < 1:
        raise ValidationError("bins must be a positive integer")
    counts, edges = np.histogram(sample.values, bins=int(bins), range=(lo, hi))
    width = (hi - lo) / int(bins)
    centers = 0.5 * (edges[:-1] + edges[1:])
    density = counts / (len(sample) * width)
    return centers, density
