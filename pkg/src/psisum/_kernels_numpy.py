"""Pure-numpy kernel implementations (fallback path).

Same algorithms as the numba backend: reflection for digamma below 0.5,
upward recurrence to the expansion threshold, Bernoulli asymptotics.
Compensated reduction uses ``math.fsum`` (exact, so strictly stronger
than Neumaier compensation).
"""

import math

import numpy as np
from scipy.special import gammaln as _sp_gammaln

from psisum._tables import DIGAMMA_COEF, DIGAMMA_XMIN, POLYGAMMA_COEF, POLYGAMMA_XMIN

NAME = "numpy"


def digamma(xs):
    x = np.array(xs, dtype=np.float64, copy=True)
    out = np.zeros_like(x)
    neg = x < 0.5
    if neg.any():
        xn = x[neg]
        r = xn - np.rint(xn)
        out[neg] = -np.pi * np.cos(np.pi * r) / np.sin(np.pi * r)
        x[neg] = 1.0 - xn
    mask = x < DIGAMMA_XMIN
    while mask.any():
        out[mask] -= 1.0 / x[mask]
        x[mask] += 1.0
        mask = x < DIGAMMA_XMIN
    z = 1.0 / (x * x)
    p = np.full_like(x, DIGAMMA_COEF[-1])
    for c in DIGAMMA_COEF[-2::-1]:
        p = p * z + c
    out += np.log(x) - 0.5 / x - z * p
    return out


def polygamma(n, xs):
    x = np.array(xs, dtype=np.float64, copy=True)
    out = np.zeros_like(x)
    shift = (-1.0) ** (n + 1) * math.factorial(n)
    xmin = POLYGAMMA_XMIN[n]
    mask = x < xmin
    while mask.any():
        out[mask] += shift / x[mask] ** (n + 1)
        x[mask] += 1.0
        mask = x < xmin
    coef = POLYGAMMA_COEF[n]
    z = 1.0 / (x * x)
    p = np.full_like(x, coef[9])
    for c in coef[8:1:-1]:
        p = p * z + c
    sign = -1.0 if n % 2 == 0 else 1.0
    out += sign * ((coef[0] + coef[1] / x) / x**n + p / x ** (n + 2))
    return out


def gammaln(xs):
    return _sp_gammaln(np.asarray(xs, dtype=np.float64))


def gammasign(xs):
    x = np.asarray(xs, dtype=np.float64)
    sign = np.ones_like(x)
    neg = x < 0.0
    if neg.any():
        odd = np.mod(np.floor(x[neg]), 2.0) != 0.0
        s = np.ones(neg.sum())
        s[odd] = -1.0
        sign[neg] = s
    return sign


def comp_sum(values):
    return math.fsum(np.asarray(values, dtype=np.float64).tolist())
