"""Numba-jitted kernel implementations (default fast path).

Scalar loops jitted with ``cache=True`` so repeat runs skip compilation.
Neumaier compensation for the block reduction.
"""

import math

import numpy as np
from numba import njit

from psisum._tables import DIGAMMA_COEF, DIGAMMA_XMIN, POLYGAMMA_COEF, POLYGAMMA_XMIN

NAME = "numba"

_DG_C = np.ascontiguousarray(DIGAMMA_COEF)
_PG_C = np.ascontiguousarray(POLYGAMMA_COEF)
_PG_XMIN = np.ascontiguousarray(POLYGAMMA_XMIN)
_DG_XMIN = float(DIGAMMA_XMIN)


@njit(cache=True)
def _digamma_one(x):
    res = 0.0
    if x < 0.5:
        r = x - math.floor(x + 0.5)
        res -= math.pi * math.cos(math.pi * r) / math.sin(math.pi * r)
        x = 1.0 - x
    while x < _DG_XMIN:
        res -= 1.0 / x
        x += 1.0
    z = 1.0 / (x * x)
    p = _DG_C[7]
    for i in range(6, -1, -1):
        p = p * z + _DG_C[i]
    return res + math.log(x) - 0.5 / x - z * p


@njit(cache=True)
def digamma(xs):
    out = np.empty_like(xs)
    for i in range(xs.size):
        out[i] = _digamma_one(xs[i])
    return out


@njit(cache=True)
def _polygamma_one(n, x):
    res = 0.0
    shift = math.gamma(n + 1.0)
    if n % 2 == 1:
        shift = -shift
    xmin = _PG_XMIN[n]
    while x < xmin:
        res -= shift / x ** (n + 1)
        x += 1.0
    z = 1.0 / (x * x)
    p = _PG_C[n, 9]
    for i in range(8, 1, -1):
        p = p * z + _PG_C[n, i]
    sign = 1.0
    if n % 2 == 0:
        sign = -1.0
    return res + sign * ((_PG_C[n, 0] + _PG_C[n, 1] / x) / x**n + p / x ** (n + 2))


@njit(cache=True)
def polygamma(n, xs):
    out = np.empty_like(xs)
    for i in range(xs.size):
        out[i] = _polygamma_one(n, xs[i])
    return out


@njit(cache=True)
def gammaln(xs):
    out = np.empty_like(xs)
    for i in range(xs.size):
        out[i] = math.lgamma(xs[i])
    return out


@njit(cache=True)
def gammasign(xs):
    out = np.empty_like(xs)
    for i in range(xs.size):
        x = xs[i]
        if x > 0.0:
            out[i] = 1.0
        elif math.floor(x) % 2.0 == 0.0:
            out[i] = 1.0
        else:
            out[i] = -1.0
    return out


@njit(cache=True)
def comp_sum(values):
    s = 0.0
    c = 0.0
    for i in range(values.size):
        v = values[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c
