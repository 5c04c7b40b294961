"""Scalar special-function kernels on the real line.

Digamma, polygamma, signed log-gamma, gamma ratios, Pochhammer symbols,
generalized harmonic numbers, integer zeta values, the real dilogarithm,
binomial coefficients, and the named constants.  Everything here is a
pure function; the array variants (``digamma_arr`` etc.) are what the
series builders call in bulk.

Arguments of the gamma family must keep a distance of at least
``POLE_GUARD`` from every non-positive integer; closer calls raise
:class:`PoleError` so that identity verification can tell "near a pole"
apart from "wrong".
"""

import math
from dataclasses import dataclass

import numpy as np

from psisum import backend
from psisum.errors import DomainError, PoleError, UnsupportedOrder

POLE_GUARD = 1e-8

MAX_POLYGAMMA_ORDER = 8


def _parse(s):
    return float(s)


@dataclass(frozen=True)
class ConstantPool:
    """Named constants, parsed once from >=30-digit decimal strings."""

    gamma_em: float
    pi_sq: float
    pi_4: float
    zeta3: float
    zeta5: float
    ln2: float


CONSTANTS = ConstantPool(
    gamma_em=_parse("0.577215664901532860606512090082402431042"),
    pi_sq=_parse("9.869604401089358618834490999876151135314"),
    pi_4=_parse("97.40909103400243723644033268870511124973"),
    zeta3=_parse("1.202056903159594285399738161511449990765"),
    zeta5=_parse("1.036927755143369926331365486457034168057"),
    ln2=_parse("0.693147180559945309417232121458176568076"),
)


def _as_array(x):
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    return arr


def _check_real(arr):
    if not np.isfinite(arr).all():
        raise DomainError("argument must be finite")


def _check_poles(arr, what="argument"):
    _check_real(arr)
    nearest = np.rint(arr)
    bad = (nearest <= 0.0) & (np.abs(arr - nearest) < POLE_GUARD)
    if bad.any():
        raise PoleError(f"{what} {arr[bad][0]!r} within {POLE_GUARD} of a non-positive integer")


# ---------------------------------------------------------------------------
# digamma / polygamma


def digamma_arr(x):
    """Vectorized digamma; validates the pole guard on every element."""
    arr = _as_array(x)
    _check_poles(arr)
    return backend.kernels().digamma(arr)


def digamma(x):
    return float(digamma_arr(x)[0])


def polygamma_arr(n, x):
    """Vectorized n-th polygamma, 0 <= n <= 8 (n = 0 is digamma)."""
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise UnsupportedOrder(f"polygamma order must be a non-negative integer, got {n!r}")
    if n > MAX_POLYGAMMA_ORDER:
        raise UnsupportedOrder(f"polygamma order {n} > {MAX_POLYGAMMA_ORDER}")
    arr = _as_array(x)
    _check_poles(arr)
    if n == 0:
        return backend.kernels().digamma(arr)
    return backend.kernels().polygamma(int(n), arr)


def polygamma(n, x):
    return float(polygamma_arr(n, x)[0])


def trigamma(x):
    return polygamma(1, x)


# ---------------------------------------------------------------------------
# gamma family


def gammaln_arr(x):
    arr = _as_array(x)
    _check_poles(arr)
    return backend.kernels().gammaln(arr)


def gammasign_arr(x):
    arr = _as_array(x)
    _check_poles(arr)
    return backend.kernels().gammasign(arr)


def log_gamma_signed(x):
    """Return (log|Gamma(x)|, sign) with sign in {-1, +1}.

    The sign is exact on negative non-integer arguments; combined with
    the log this represents Gamma ratios without overflow.
    """
    arr = _as_array(x)
    _check_poles(arr)
    k = backend.kernels()
    return float(k.gammaln(arr)[0]), int(k.gammasign(arr)[0])


def gamma_ratio_arr(num, den):
    """Gamma(num)/Gamma(den) elementwise via signed-log differences."""
    a = _as_array(num)
    b = _as_array(den)
    _check_poles(a, "numerator")
    _check_poles(b, "denominator")
    k = backend.kernels()
    return np.exp(k.gammaln(a) - k.gammaln(b)) * k.gammasign(a) * k.gammasign(b)


def gamma_ratio(num, den):
    return float(gamma_ratio_arr(num, den)[0])


_STIRLING_SWITCH = 4096.0
# B_{2k}/(2k(2k-1)) for the log-gamma correction series, k = 1..4
_LGAMMA_TAIL = (1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0)


def gammaln_shifted_diff_arr(x, a, b):
    """log Gamma(x+a) - log Gamma(x+b), stable for large x.

    A direct lgamma difference cancels ~x ln x of magnitude and leaves
    O(eps * x ln x) absolute noise; beyond the switch point the Stirling
    rewrite keeps every intermediate at the size of the result.  Only
    valid where x+a and x+b are positive on the large branch (series
    builders call it with indices growing past any negative offsets).
    """
    x = _as_array(x)
    out = np.empty_like(x)
    small = x < _STIRLING_SWITCH
    if small.any():
        xs = x[small]
        k = backend.kernels()
        out[small] = k.gammaln(xs + a) - k.gammaln(xs + b)
    big = ~small
    if big.any():
        xb = x[big]
        ra, rb = a / xb, b / xb
        val = (
            (a - b) * np.log(xb)
            + (xb + a - 0.5) * np.log1p(ra)
            - (xb + b - 0.5) * np.log1p(rb)
            - (a - b)
        )
        val += _LGAMMA_TAIL[0] * (b - a) / ((xb + a) * (xb + b))
        for k_i, c in enumerate(_LGAMMA_TAIL[1:], start=2):
            val += c * ((xb + a) ** (1 - 2 * k_i) - (xb + b) ** (1 - 2 * k_i))
        out[big] = val
    return out


def gamma_ratio_shifted_arr(x, a, b):
    """Gamma(x+a)/Gamma(x+b) elementwise with signs, stable for large x."""
    x = _as_array(x)
    _check_poles(x + a, "numerator")
    _check_poles(x + b, "denominator")
    k = backend.kernels()
    sign = k.gammasign(x + a) * k.gammasign(x + b)
    return sign * np.exp(gammaln_shifted_diff_arr(x, a, b))


def pochhammer(x, n):
    """Rising factorial x(x+1)...(x+n-1); empty product is 1."""
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise DomainError(f"pochhammer order must be a non-negative integer, got {n!r}")
    out = 1.0
    for i in range(int(n)):
        out *= x + i
    return out


# ---------------------------------------------------------------------------
# harmonic numbers


def harmonic(k, a):
    """Generalized harmonic number: sum_{l=1}^{k} 1/(l+a-1) = psi(k+a) - psi(a)."""
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise DomainError(f"harmonic index must be a non-negative integer, got {k!r}")
    if k == 0:
        return 0.0
    _check_summand_poles(k, a)
    return digamma(k + a) - digamma(a)


def harmonic_prime(k, a):
    """Second-order analog with the flipped sign convention.

    Equals -sum_{l=1}^{k} 1/(l+a-1)^2 = psi'(k+a) - psi'(a); non-positive
    for a > 0.
    """
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise DomainError(f"harmonic index must be a non-negative integer, got {k!r}")
    if k == 0:
        return 0.0
    _check_summand_poles(k, a)
    return polygamma(1, k + a) - polygamma(1, a)


def _check_summand_poles(k, a):
    ls = np.arange(1, int(k) + 1, dtype=np.float64)
    if np.any(np.abs(ls + a - 1.0) < POLE_GUARD):
        raise PoleError(f"harmonic summand pole hit for a={a!r}, k={k}")


# ---------------------------------------------------------------------------
# zeta at integers


def zeta_int(n):
    """Riemann zeta at an integer n >= 2 (direct sum + Euler-Maclaurin tail)."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise UnsupportedOrder(f"zeta_int needs an integer n >= 2, got {n!r}")
    n = int(n)
    N = 64
    k = np.arange(1, N, dtype=np.float64)
    head = backend.kernels().comp_sum(k ** (-float(n)))
    x = float(N)
    tail = (
        x ** (1 - n) / (n - 1)
        + 0.5 * x ** (-n)
        + n / 12.0 * x ** (-n - 1)
        - n * (n + 1) * (n + 2) / 720.0 * x ** (-n - 3)
        + n * (n + 1) * (n + 2) * (n + 3) * (n + 4) / 30240.0 * x ** (-n - 5)
    )
    return head + tail


# ---------------------------------------------------------------------------
# dilogarithm


def _dilog_series(x):
    # |x| <= 0.5: direct series, ~60 terms reach 1e-18
    n = np.arange(1, 64, dtype=np.float64)
    return backend.kernels().comp_sum(x**n / (n * n))


def dilog(x):
    """Real dilogarithm Li2(x) for x <= 1."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("dilog argument must be finite")
    if x > 1.0:
        raise DomainError(f"dilog defined for x <= 1, got {x}")
    if x == 1.0:
        return CONSTANTS.pi_sq / 6.0
    if x == 0.0:
        return 0.0
    if abs(x) <= 0.5:
        return _dilog_series(x)
    if x > 0.5:
        # Li2(x) = pi^2/6 - ln(x)ln(1-x) - Li2(1-x)
        return CONSTANTS.pi_sq / 6.0 - math.log(x) * math.log1p(-x) - _dilog_series(1.0 - x)
    if x >= -1.0:
        # Landen: Li2(x) = -Li2(x/(x-1)) - ln^2(1-x)/2, with x/(x-1) in (0, 1/2]
        return -_dilog_series(x / (x - 1.0)) - 0.5 * math.log1p(-x) ** 2
    # x < -1: inversion onto (-1, 0)
    return -CONSTANTS.pi_sq / 6.0 - 0.5 * math.log(-x) ** 2 - dilog(1.0 / x)


# ---------------------------------------------------------------------------
# binomial


def binomial(n, k):
    """Binomial coefficient as a float; exact while it fits."""
    if not isinstance(n, (int, np.integer)) or not isinstance(k, (int, np.integer)):
        raise DomainError("binomial arguments must be integers")
    if n < 0 or k < 0 or k > n:
        raise DomainError(f"binomial needs 0 <= k <= n, got n={n}, k={k}")
    c = math.comb(int(n), int(k))
    if c < 2**53:
        return float(c)
    # multiplicative form in log space for huge entries
    ls, _ = log_gamma_signed(n + 1.0)
    la, _ = log_gamma_signed(k + 1.0)
    lb, _ = log_gamma_signed(n - k + 1.0)
    return math.exp(ls - la - lb)
