"""Shared coefficient tables for the digamma/polygamma kernels.

Both kernel backends evaluate psi and its derivatives by shifting the
argument upward with the recurrence until it clears a threshold, then
applying the Bernoulli-coefficient asymptotic expansion.  The tables
below hold the expansion coefficients; they are small enough to keep
exact in double precision.
"""

import math

import numpy as np

# B_{2k} for k = 1..8
_B2K = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)

# psi(y) ~ ln y - 1/(2y) - sum_k B_{2k}/(2k) * y^{-2k}
DIGAMMA_COEF = np.array([b / (2.0 * (k + 1)) for k, b in enumerate(_B2K)])
DIGAMMA_XMIN = 10.0

MAX_POLYGAMMA_ORDER = 8

# psi^(n)(y) ~ (-1)^(n-1) [ (n-1)!/y^n + n!/(2 y^(n+1))
#                           + sum_k B_{2k} (2k+n-1)!/(2k)! * y^{-(2k+n)} ]
# Row n (1-based) holds [(n-1)!, n!/2, c_1..c_8]; the k-sum is a Horner
# polynomial in 1/y^2 scaled by y^{-(n+2)}.
POLYGAMMA_COEF = np.zeros((MAX_POLYGAMMA_ORDER + 1, 10))
for _n in range(1, MAX_POLYGAMMA_ORDER + 1):
    POLYGAMMA_COEF[_n, 0] = math.factorial(_n - 1)
    POLYGAMMA_COEF[_n, 1] = math.factorial(_n) / 2.0
    for _k in range(1, 9):
        POLYGAMMA_COEF[_n, 1 + _k] = (
            _B2K[_k - 1] * math.factorial(2 * _k + _n - 1) / math.factorial(2 * _k)
        )

# Shift threshold per order; higher orders need a larger argument for the
# truncated expansion to stay below ~1e-15 relative.
POLYGAMMA_XMIN = np.array([0.0] + [10.0 + 2.0 * n for n in range(1, MAX_POLYGAMMA_ORDER + 1)])
