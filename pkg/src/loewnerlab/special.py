"""Real-argument Gauss hypergeometric engine, digamma and Pochhammer.

The stationary-law analysis needs 2F1(a, b; c; x) for real parameters and
x < 1 only, which keeps the whole evaluation on the principal branch:

* terminating parameter (a or b a nonpositive integer): exact polynomial;
* |x| < 1: the defining power series;
* x <= -1, a-b not an integer: the 1/x connection formula (A&S 15.3.7);
* x <= -1, a-b an integer: the logarithmic 1/x formula (A&S 15.3.13),
  whose digamma brackets degenerate to finite limits whenever
  c-a-k-n hits a nonpositive integer (the reciprocal gamma vanishes there
  and only the digamma pole survives: [K - psi(w)]/Gamma(w) -> (-1)^j j!).

Coefficient ratios of gamma functions are evaluated through log-gamma with
explicit sign tracking so large parameters cannot overflow.
"""

import math
from dataclasses import dataclass

from .errors import DivergentRegionError, LoewnerLabError, PoleError

__all__ = [
    "EULER_GAMMA", "Hyp2F1Eval", "pochhammer", "digamma",
    "hyp2f1_series", "hyp2f1_connection", "hyp2f1_logarithmic", "hyp2f1",
    "BRANCH_SERIES", "BRANCH_TERMINATING", "BRANCH_CONNECTION", "BRANCH_LOG",
]

EULER_GAMMA = 0.5772156649015328606

BRANCH_SERIES = "series"
BRANCH_TERMINATING = "terminating"
BRANCH_CONNECTION = "connection_15_3_7"
BRANCH_LOG = "logarithmic_15_3_13"

_INT_TOL = 1e-12
_SERIES_TOL = 1e-14
_MAX_TERMS = 1_000_000

# asymptotic tail of psi: -B_{2n}/(2n x^{2n})
_PSI_ASYMP = (1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0,
              1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0)


def _nonpositive_int(x, tol=_INT_TOL):
    """Round of x if x is within tol of an integer <= 0, else None."""
    r = round(x)
    if r <= 0 and abs(x - r) <= tol * max(1.0, abs(x)):
        return int(r)
    return None


def pochhammer(a, k):
    """Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1."""
    if int(k) != k or k < 0:
        raise ValueError(f"k must be a nonnegative integer, got {k!r}")
    out = 1.0
    for j in range(int(k)):
        out *= a + j
    return out


def digamma(x):
    """psi(x) = Gamma'(x)/Gamma(x) for real non-pole x, ~1e-14 accurate.

    Uses the reflection formula for x < 0, the recurrence psi(x+1) =
    psi(x) + 1/x up to x >= 16 and the Bernoulli asymptotic series there.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"digamma argument must be finite, got {x!r}")
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"digamma pole at nonpositive integer {x:g}")
    if x < 0.0:
        # psi(x) = psi(1-x) - pi*cot(pi*x); reduce the angle first
        r = x - math.floor(x + 0.5)
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * r)
    acc = 0.0
    while x < 16.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 0.0
    p = inv2
    for coeff in _PSI_ASYMP:
        tail -= coeff * p
        p *= inv2
    return acc + math.log(x) - 0.5 / x + tail


def _lgamma_sign(x):
    """(log|Gamma(x)|, sign of Gamma(x)); raises PoleError at poles."""
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"gamma pole at nonpositive integer {x:g}")
    sign = 1.0
    if x < 0.0 and int(math.floor(x)) % 2 != 0:
        sign = -1.0
    return math.lgamma(x), sign


def _gamma_ratio(num, den):
    """prod Gamma(num_i) / prod Gamma(den_j) via log-gamma with signs.

    A pole in a denominator factor makes the ratio exactly 0; a pole in a
    numerator factor raises :class:`PoleError`.
    """
    for d in den:
        if _nonpositive_int(d, 0.0) is not None:
            return 0.0
    lg, sign = 0.0, 1.0
    for v in num:
        l, s = _lgamma_sign(v)
        lg += l
        sign *= s
    for v in den:
        l, s = _lgamma_sign(v)
        lg -= l
        sign *= s
    return sign * math.exp(lg)


def _series_sum(a, b, c, z, tol=_SERIES_TOL, max_terms=_MAX_TERMS):
    """Raw power series at z, assuming it converges (or terminates)."""
    term = 1.0
    acc = 1.0
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (1.0 + k)) * z
        acc += term
        if abs(term) <= tol * max(abs(acc), 1e-300):
            return acc
    raise LoewnerLabError(
        f"2F1 series did not converge at z={z:g} within {max_terms} terms")


def _terminating_sum(a, b, c, z):
    """Exact polynomial when a or b is (numerically) a nonpositive integer."""
    na, nb = _nonpositive_int(a), _nonpositive_int(b)
    if na is not None and (nb is None or na > nb):
        a, b = float(na), b
        n = -na
    else:
        a, b = a, float(nb)
        n = -nb
    term = 1.0
    acc = 1.0
    for k in range(n):
        term *= (a + k) * (b + k) / ((c + k) * (1.0 + k)) * z
        acc += term
    return acc


def _series_engine(a, b, c, z):
    """Series evaluation valid for any z < 1 via a Pfaff map when needed.

    For z <= -0.6 the identity F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1))
    moves the argument into (0, 1), where the series converges quickly; this
    keeps inner evaluations of the connection formulas usable down to z = -1
    and slightly beyond.
    """
    if _nonpositive_int(a) is not None or _nonpositive_int(b) is not None:
        return _terminating_sum(a, b, c, z)
    if z >= 1.0:
        raise DivergentRegionError(f"series argument {z:g} outside z < 1")
    if z <= -100.0:
        raise LoewnerLabError(f"series engine misused at z={z:g}")
    if z > -0.6:
        return _series_sum(a, b, c, z)
    w = z / (z - 1.0)
    return (1.0 - z) ** (-a) * _series_sum(a, c - b, c, w)


def _check_c(c):
    if _nonpositive_int(c) is not None:
        raise PoleError(f"c must not be a nonpositive integer, got {c:g}")


def hyp2f1_series(a, b, c, z, tol=_SERIES_TOL):
    """Defining Gauss series; exact polynomial in the terminating case.

    Valid for |z| < 1, or for any z when a or b is a nonpositive integer.
    Raises :class:`DivergentRegionError` for a nonterminating |z| >= 1.
    """
    _check_c(c)
    if _nonpositive_int(a) is not None or _nonpositive_int(b) is not None:
        return _terminating_sum(a, b, c, z)
    if abs(z) >= 1.0:
        raise DivergentRegionError(
            f"series diverges at |z| >= 1 (z={z:g}) for nonterminating parameters")
    return _series_sum(a, b, c, z, tol=tol)


def hyp2f1_connection(a, b, c, x):
    """A&S 15.3.7: expansion in 1/x, for x < 0 and a-b not an integer.

    F(a,b;c;x) = G(b-a)G(c)/(G(b)G(c-a)) (-x)^{-a} F(a, a-c+1; a-b+1; 1/x)
               + G(a-b)G(c)/(G(a)G(c-b)) (-x)^{-b} F(b, b-c+1; b-a+1; 1/x)
    """
    _check_c(c)
    if x >= 0.0:
        raise DivergentRegionError("connection formula requires x < 0")
    d = a - b
    if abs(d - round(d)) <= _INT_TOL * max(1.0, abs(d)):
        raise ValueError("a-b is an integer; use the logarithmic formula")
    w = 1.0 / x
    out = 0.0
    coef = _gamma_ratio((b - a, c), (b, c - a))
    if coef != 0.0:
        out += coef * (-x) ** (-a) * _series_engine(a, a - c + 1.0, a - b + 1.0, w)
    coef = _gamma_ratio((a - b, c), (a, c - b))
    if coef != 0.0:
        out += coef * (-x) ** (-b) * _series_engine(b, b - c + 1.0, b - a + 1.0, w)
    return out


def _log_bracket(w, K):
    """[K - psi(w)] / Gamma(w), extended by its limit at poles of psi.

    As w -> -j (nonpositive integer) the reciprocal gamma vanishes and the
    digamma pole survives, giving the finite limit (-1)^j j!.
    """
    j = _nonpositive_int(w, 1e-9)
    if j is not None:
        return math.factorial(-j) * (1.0 if (-j) % 2 == 0 else -1.0)
    lg, sign = _lgamma_sign(w)
    return (K - digamma(w)) * sign * math.exp(-lg)


def hyp2f1_logarithmic(a, b, c, x, tol=_SERIES_TOL):
    """A&S 15.3.13: expansion in 1/x for x < 0 when b - a = m >= 0 is an integer.

    F(a, a+m; c; x) =
        G(c)/G(a+m) (-x)^{-a} sum_{k<m} (a)_k (m-k-1)!/(k! G(c-a-k)) x^{-k}
      + G(c)/G(a)   (-x)^{-a} sum_{n>=0} (a+m)_n /(n! (n+m)!) (-1)^n x^{-n-m}
                               * [ln(-x) + psi(n+1) + psi(n+m+1)
                                  - psi(a+n+m) - psi(c-a-n-m)] / G(c-a-n-m)

    with each bracket/reciprocal-gamma pair replaced by its finite limit at
    the poles.  The 1/x series converges for |x| > 1 but too slowly (and with
    sign-oscillating brackets) for x in (-1.5, -1]; in that shell the value
    is obtained instead from the Pfaff-transformed defining series (same
    function, different summation).
    """
    _check_c(c)
    if x >= 0.0:
        raise DivergentRegionError("logarithmic formula requires x < 0")
    m = round(b - a)
    if m < 0:
        a, b = b, a
        m = -m
    if abs((b - a) - m) > _INT_TOL * max(1.0, abs(b - a)):
        raise ValueError("b-a is not an integer; use the connection formula")

    if x > -1.5:
        return _series_engine(a, b, c, x)

    lg_c, sign_c = _lgamma_sign(c)
    neg_x_pow_a = (-x) ** (-a)
    out = 0.0

    if m > 0:
        coef0 = _gamma_ratio((c,), (a + m,))
        finite = 0.0
        poch = 1.0  # (a)_k
        fact_k = 1.0
        for k in range(m):
            rg_arg = c - a - k
            if _nonpositive_int(rg_arg, 1e-9) is None:
                lg, sg = _lgamma_sign(rg_arg)
                finite += poch * math.factorial(m - k - 1) / fact_k \
                    * sg * math.exp(-lg) * x ** (-k)
            poch *= a + k
            fact_k *= k + 1.0
        out += coef0 * neg_x_pow_a * finite

    coef1 = _gamma_ratio((c,), (a,))
    log_neg_x = math.log(-x)
    acc = 0.0
    poch = 1.0  # (a+m)_n
    fact_n = 1.0
    fact_nm = float(math.factorial(m))
    x_pow = x ** (-m) if m else 1.0
    prev = math.inf
    for n in range(_MAX_TERMS):
        arg = a + n + m
        if _nonpositive_int(arg, 1e-9) is not None:
            raise PoleError(f"psi pole at a+n+m = {arg:g} in 15.3.13")
        K = log_neg_x + digamma(n + 1.0) + digamma(n + m + 1.0) - digamma(arg)
        term = poch / (fact_n * fact_nm) * (-1.0) ** n * x_pow \
            * _log_bracket(c - a - n - m, K)
        acc += term
        # brackets oscillate in sign, so demand two consecutive small terms
        if n > 2 and max(abs(term), prev) <= tol * max(abs(acc), 1e-300):
            break
        prev = abs(term)
        poch *= a + m + n
        fact_n *= n + 1.0
        fact_nm *= n + m + 1.0
        x_pow /= x
    else:
        raise LoewnerLabError(f"15.3.13 series did not converge at x={x:g}")
    out += coef1 * neg_x_pow_a * acc
    return out


@dataclass(frozen=True)
class Hyp2F1Eval:
    """One evaluation of 2F1 with the branch that produced it."""

    a: float
    b: float
    c: float
    x: float
    branch: str
    value: float


def hyp2f1(a, b, c, x):
    """Evaluate 2F1(a, b; c; x) for real parameters and x < 1.

    Branch selection: exact polynomial when a or b is a nonpositive integer;
    the defining series for |x| < 1; for x <= -1 the 1/x connection formula
    (15.3.7) when a-b is not an integer and the logarithmic formula (15.3.13)
    when it is.  Integer tests use a 1e-12 relative tolerance; near-integer
    differences are deliberately routed to the logarithmic branch, where the
    evaluation stays conditioned.

    Raises :class:`PoleError` if c is a nonpositive integer and
    :class:`DivergentRegionError` for x >= 1 (outside this artifact's domain).
    """
    for name, v in (("a", a), ("b", b), ("c", c), ("x", x)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")
    _check_c(c)
    if x >= 1.0:
        raise DivergentRegionError(f"x={x:g} outside the supported domain x < 1")

    if _nonpositive_int(a) is not None or _nonpositive_int(b) is not None:
        return Hyp2F1Eval(a, b, c, x, BRANCH_TERMINATING, _terminating_sum(a, b, c, x))
    if abs(x) < 1.0:
        return Hyp2F1Eval(a, b, c, x, BRANCH_SERIES, _series_sum(a, b, c, x))
    d = a - b
    if abs(d - round(d)) <= _INT_TOL * max(1.0, abs(d)):
        return Hyp2F1Eval(a, b, c, x, BRANCH_LOG, hyp2f1_logarithmic(a, b, c, x))
    return Hyp2F1Eval(a, b, c, x, BRANCH_CONNECTION, hyp2f1_connection(a, b, c, x))
