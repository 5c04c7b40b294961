"""Compensated summation of finite and infinite series with tail acceleration.

This module is the numerical oracle the identity catalog is audited
against.  Terms are evaluated in blocks through vectorized term
functions (index array in, float64 array out), reduced with compensated
summation, and infinite sums are finished with an analytic tail:

* ``PowerLog(p, q)`` tails (term ~ C (ln l)^p / l^q) are fitted by least
  squares on a geometric window of exactly-evaluated terms beyond the
  truncation point, and the fitted model is summed to infinity with
  Euler-Maclaurin corrections.
* ``Geometric`` tails are summed until the remaining geometric bound is
  negligible.
* ``Terminating`` series stop at their exact cutoff.
* ``Unknown`` tails fall back to Richardson extrapolation of partial
  sums at N, 2N, 4N.

Error estimates are heuristics, not rigorous bounds; callers that issue
verdicts inflate their tolerance by the reported estimate.
"""

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

import numpy as np

from psisum import backend
from psisum.errors import DomainError, NonConvergence, UnsupportedShape
from psisum import specfun

_EPS = float(np.finfo(np.float64).eps)
_BLOCK = 1 << 15
_CHECKPOINTS = (4096, 16384, 65536, 262144, 1048576)
_WINDOW = 64

DEFAULT_TOL = 1e-8
DEFAULT_BUDGET = 10**6


# ---------------------------------------------------------------------------
# tail classes


@dataclass(frozen=True)
class PowerLog:
    """Asserts term(l) ~ C * (ln l)^p / l^q as l -> infinity."""

    p: int
    q: float

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not 0 <= self.p <= 3:
            raise DomainError(f"PowerLog log power must be an integer in 0..3, got {self.p!r}")
        if not self.q > 1.0:
            raise DomainError(f"PowerLog needs q > 1 for convergence, got q={self.q!r}")


class Geometric:
    def __repr__(self):
        return "Geometric"


class Terminating:
    def __repr__(self):
        return "Terminating"


class Unknown:
    def __repr__(self):
        return "Unknown"


GEOMETRIC = Geometric()
TERMINATING = Terminating()
UNKNOWN = Unknown()

TailClass = Union[PowerLog, Geometric, Terminating, Unknown]


# ---------------------------------------------------------------------------
# specs and results


@dataclass(frozen=True)
class SeriesSpec:
    """One series: vectorized term function plus summation metadata.

    ``term`` maps an int64 index array to a float64 value array and must
    be pure.  ``upper`` is the inclusive final index for finite sums and
    ``None`` for infinite ones; ``upper == start_index - 1`` encodes the
    empty sum (value 0).
    """

    term: Callable[[np.ndarray], np.ndarray]
    start_index: int = 0
    upper: Optional[int] = None
    tail_class: TailClass = UNKNOWN
    fit_span: int = _WINDOW

    def __post_init__(self):
        if self.upper is not None and self.upper < self.start_index - 1:
            raise DomainError(
                f"finite upper {self.upper} below start_index-1 = {self.start_index - 1}"
            )
        if self.fit_span < 4:
            raise DomainError("fit_span must be at least 4")

    @property
    def is_finite(self):
        return self.upper is not None


def finite_series(term, start_index=0, upper=-1):
    return SeriesSpec(term=term, start_index=start_index, upper=upper, tail_class=TERMINATING)


def infinite_series(term, tail_class, start_index=0, fit_span=_WINDOW):
    return SeriesSpec(
        term=term, start_index=start_index, upper=None, tail_class=tail_class, fit_span=fit_span
    )


@dataclass(frozen=True)
class SumResult:
    value: float
    abs_error_est: float
    terms_used: int
    accelerated: bool
    converged: bool


# ---------------------------------------------------------------------------
# term evaluation and compensated accumulation


def _eval_terms(term, indices):
    vals = np.asarray(term(indices), dtype=np.float64)
    if vals.shape != indices.shape:
        raise DomainError("term function returned a mis-shaped array")
    if not np.isfinite(vals).all():
        raise DomainError("term function produced a non-finite value")
    return vals


class _Accumulator:
    """Blockwise compensated accumulation with a running-scale record."""

    def __init__(self, term, start):
        self.term = term
        self.next_index = start
        self.block_sums = []
        self.max_abs = 0.0
        self.count = 0

    def extend_to(self, stop_index):
        k = backend.kernels()
        while self.next_index < stop_index:
            hi = min(self.next_index + _BLOCK, stop_index)
            idx = np.arange(self.next_index, hi, dtype=np.int64)
            vals = _eval_terms(self.term, idx)
            self.block_sums.append(k.comp_sum(vals))
            self.count += idx.size
            self.next_index = hi
            self.max_abs = max(self.max_abs, abs(math.fsum(self.block_sums)))
        return self

    @property
    def total(self):
        return math.fsum(self.block_sums)

    def roundoff(self):
        return 4.0 * _EPS * max(self.max_abs, abs(self.total))

    def last_block(self, width=_BLOCK):
        lo = max(self.next_index - width, 0)
        if lo >= self.next_index:
            return np.zeros(0)
        idx = np.arange(lo, self.next_index, dtype=np.int64)
        return _eval_terms(self.term, idx)


# ---------------------------------------------------------------------------
# finite sums


def sum_finite(spec):
    """Compensated summation of a finite series (exact term count)."""
    if not spec.is_finite:
        raise DomainError("sum_finite requires a finite SeriesSpec")
    n_terms = spec.upper - spec.start_index + 1
    if n_terms <= 0:
        return SumResult(0.0, 0.0, 0, False, True)
    acc = _Accumulator(spec.term, spec.start_index).extend_to(spec.upper + 1)
    return SumResult(acc.total, acc.roundoff(), acc.count, False, True)


# ---------------------------------------------------------------------------
# tail model machinery


def _poly_deriv(terms):
    # terms: list of (coef, a, b) meaning coef * (ln x)^a * x^(-b)
    out = []
    for c, a, b in terms:
        if a > 0:
            out.append((c * a, a - 1, b + 1))
        out.append((-c * b, a, b + 1))
    return out


def _poly_eval(terms, x):
    lx = math.log(x)
    return sum(c * lx**a * x ** (-b) for c, a, b in terms)


def _log_power_integral(a, b, x):
    # integral_x^inf (ln t)^a t^(-b) dt, b > 1
    acc = 0.0
    coef = 1.0
    for j in range(a, -1, -1):
        acc += coef * math.log(x) ** j * x ** (1 - b) / (b - 1)
        coef *= j / (b - 1)
    return acc


def _tail_sum(a, b, n):
    """sum_{l=n}^{inf} (ln l)^a l^(-b) by Euler-Maclaurin."""
    x = float(n)
    f = [(1.0, a, b)]
    f1 = _poly_deriv(f)
    f3 = _poly_deriv(_poly_deriv(f1))
    f5 = _poly_deriv(_poly_deriv(f3))
    return (
        _log_power_integral(a, b, x)
        + 0.5 * _poly_eval(f, x)
        - _poly_eval(f1, x) / 12.0
        + _poly_eval(f3, x) / 720.0
        - _poly_eval(f5, x) / 30240.0
    )


_BASES = {
    0: ([(0, 0), (0, 1), (0, 2), (0, 3)], [(0, 4)]),
    1: ([(1, 0), (0, 0), (1, 1), (0, 1), (1, 2), (0, 2)], [(1, 3), (0, 3)]),
    2: ([(2, 0), (1, 0), (0, 0), (2, 1), (1, 1), (0, 1)], [(2, 2), (1, 2)]),
    3: ([(3, 0), (2, 0), (1, 0), (0, 0), (3, 1), (2, 1), (1, 1)], [(3, 2), (2, 2)]),
}


def _fit_window(x, logs, t, basis, q, weights):
    cols = [logs**a * x ** (-(q + dq)) for a, dq in basis]
    a_mat = np.column_stack(cols)
    w = np.sqrt(weights)
    aw = a_mat * w[:, None]
    scale = np.linalg.norm(aw, axis=0)
    scale[scale == 0.0] = 1.0
    coef, *_ = np.linalg.lstsq(aw / scale, t * w, rcond=None)
    coef = coef / scale
    resid = t - a_mat @ coef
    return coef, resid


def _tail_estimate(term, n_trunc, p, q, span):
    """Fit the asymptotic model on [N, span*N] and sum it from N to infinity."""
    idx = np.unique(np.geomspace(n_trunc, n_trunc * span, _WINDOW).astype(np.int64))
    t = _eval_terms(term, idx)
    x = idx.astype(np.float64)
    logs = np.log(x)
    # each window point stands in for the index gap it sits on; weighting
    # the fit by that mass makes the least squares mimic the tail sum
    gaps = np.empty_like(x)
    gaps[:-1] = np.diff(x)
    gaps[-1] = gaps[-2] if x.size > 1 else 1.0

    basis, probes = _BASES[p]
    coef, resid = _fit_window(x, logs, t, basis, q, gaps)
    tail = sum(c * _tail_sum(a, q + dq, n_trunc) for c, (a, dq) in zip(coef, basis))

    err_next = 0.0
    for ga, gdq in probes:
        gvals = logs**ga * x ** (-(q + gdq))
        denom = float(gvals @ gvals)
        cg = float(resid @ gvals) / denom if denom > 0.0 else 0.0
        err_next += abs(cg) * _tail_sum(ga, q + gdq, n_trunc)

    err_win = float(np.abs(resid) @ gaps)

    coef_half, _ = _fit_window(x[::2], logs[::2], t[::2], basis, q, gaps[::2])
    tail_half = sum(c * _tail_sum(a, q + dq, n_trunc) for c, (a, dq) in zip(coef_half, basis))
    err = 2.0 * err_next + err_win + abs(tail - tail_half)
    return tail, err, idx.size


# ---------------------------------------------------------------------------
# infinite sums


def _checkpoint_schedule(budget, reserve):
    room = budget - reserve
    pts = [c for c in _CHECKPOINTS if c < room]
    if not pts or pts[-1] != room:
        pts.append(room)
    return pts


def _sum_powerlog(spec, tol, budget):
    tc = spec.tail_class
    acc = _Accumulator(spec.term, spec.start_index)
    window_used = 0
    result = None
    schedule = _checkpoint_schedule(budget, reserve=6 * _WINDOW)
    if tc.p >= 2:
        # squared/cubed logs need a deeper truncation before the model basis
        # separates cleanly
        schedule = [n for n in schedule if n >= 16384] or schedule[-1:]
    for n in schedule:
        acc.extend_to(spec.start_index + n)
        n_trunc = acc.next_index
        tail, err, wn = _tail_estimate(spec.term, n_trunc, tc.p, tc.q, spec.fit_span)
        window_used += wn
        est = err + acc.roundoff()
        result = SumResult(
            acc.total + tail, est, acc.count + window_used, True, est <= tol
        )
        if result.converged:
            return result
    raise NonConvergence(
        f"abs_error_est {result.abs_error_est:.3e} above tol {tol:.3e} "
        f"after {result.terms_used} terms",
        result=result,
    )


def _sum_unknown(spec, tol, budget):
    acc = _Accumulator(spec.term, spec.start_index)
    totals = {}

    def total_at(n):
        # extend_to is exact-stop, so snapshots taken in increasing order
        if n not in totals:
            acc.extend_to(spec.start_index + n)
            totals[n] = acc.total
        return totals[n]

    n0 = 256
    prev_extrap = None
    result = None
    while 4 * n0 <= budget:
        s1, s2, s3 = total_at(n0), total_at(2 * n0), total_at(4 * n0)
        d1, d2 = s2 - s1, s3 - s2
        extrap = s3 + d2 * d2 / (d1 - d2) if d1 != d2 else s3
        delta = abs(extrap - prev_extrap) if prev_extrap is not None else abs(extrap - s3)
        est = delta + acc.roundoff()
        result = SumResult(extrap, est, acc.count, True, est <= tol)
        if result.converged:
            return result
        prev_extrap = extrap
        n0 *= 2
    raise NonConvergence(
        f"budget {budget} exhausted before Richardson stabilized"
        + (f" (abs_error_est {result.abs_error_est:.3e})" if result is not None else ""),
        result=result,
    )


def _sum_geometric(spec, tol, budget):
    acc = _Accumulator(spec.term, spec.start_index)
    stop_scale = max(tol * 1e-3, 1e-300)
    step = 1024
    while acc.count + step <= budget:
        acc.extend_to(acc.next_index + step)
        last = acc.last_block(8)
        if np.abs(last).max(initial=0.0) <= stop_scale * max(1.0, abs(acc.total)):
            tail = np.abs(last[-2:])
            if tail.size == 2 and tail[1] > 0.0 and tail[0] > tail[1]:
                ratio = tail[1] / tail[0]
                bound = tail[1] * ratio / (1.0 - ratio)
            else:
                bound = float(np.abs(last).max(initial=0.0))
            est = bound + acc.roundoff()
            return SumResult(acc.total, est, acc.count, True, est <= tol)
    est = abs(acc.last_block(2)).max(initial=0.0) + acc.roundoff()
    raise NonConvergence(
        f"geometric series did not decay below threshold within budget {budget}",
        result=SumResult(acc.total, est, acc.count, True, False),
    )


def _sum_terminating(spec, tol, budget):
    acc = _Accumulator(spec.term, spec.start_index)
    while acc.count + _BLOCK <= budget:
        acc.extend_to(acc.next_index + _BLOCK)
        if np.all(acc.last_block() == 0.0):
            return SumResult(acc.total, acc.roundoff(), acc.count, False, True)
    raise NonConvergence(
        f"terminating series did not hit zero terms within budget {budget}",
        result=SumResult(acc.total, acc.roundoff(), acc.count, False, False),
    )


def sum_infinite(spec, tol=DEFAULT_TOL, budget=DEFAULT_BUDGET):
    """Evaluate an infinite series to tolerance ``tol`` within ``budget`` terms.

    Raises :class:`NonConvergence` (carrying the partial result) when the
    error estimate is still above ``tol`` at budget exhaustion.
    """
    if spec.is_finite:
        raise DomainError("sum_infinite requires an infinite SeriesSpec")
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    if budget < 10**3:
        raise DomainError(f"budget must be at least 1000, got {budget!r}")
    tc = spec.tail_class
    if isinstance(tc, PowerLog):
        return _sum_powerlog(spec, tol, budget)
    if isinstance(tc, Geometric):
        return _sum_geometric(spec, tol, budget)
    if isinstance(tc, Terminating):
        return _sum_terminating(spec, tol, budget)
    return _sum_unknown(spec, tol, budget)


def sum_infinite_paired(spec_a, spec_b, tol=DEFAULT_TOL, budget=DEFAULT_BUDGET):
    """Sum the termwise difference of two (possibly divergent) series.

    The combined term (term_a - term_b) is formed under one index before
    any reduction happens; the two series are never summed separately.
    Each spec's ``tail_class`` must describe the decay of the combined
    difference, and both must agree.
    """
    if spec_a.start_index != spec_b.start_index:
        raise UnsupportedShape("paired series must share a start index")
    if spec_a.is_finite or spec_b.is_finite:
        raise UnsupportedShape("paired summation applies to infinite series")
    if spec_a.tail_class == spec_b.tail_class or type(spec_a.tail_class) is type(
        spec_b.tail_class
    ):
        tail = spec_a.tail_class
    else:
        tail = UNKNOWN
    term_a, term_b = spec_a.term, spec_b.term

    def combined(ls):
        return np.asarray(term_a(ls), dtype=np.float64) - np.asarray(term_b(ls), dtype=np.float64)

    spec = SeriesSpec(
        term=combined,
        start_index=spec_a.start_index,
        upper=None,
        tail_class=tail,
        fit_span=min(spec_a.fit_span, spec_b.fit_span),
    )
    return sum_infinite(spec, tol=tol, budget=budget)


# ---------------------------------------------------------------------------
# multi-index collapse


@dataclass(frozen=True)
class SumLevel:
    """One level of a nested sum over cumulative indices.

    ``factors`` lists (offset, power) pairs; the level contributes
    prod_i 1/(n_cum + offset_i)^power_i where n_cum is the cumulative
    index at this depth (n_(2) = n_1 + n_2 and so on).
    """

    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise UnsupportedShape("a sum level needs at least one factor")
        for off, power in self.factors:
            if not isinstance(power, (int, np.integer)) or power < 1:
                raise UnsupportedShape(f"factor power must be a positive integer, got {power!r}")

    @property
    def degree(self):
        return sum(p for _, p in self.factors)


def _rational_term(factors):
    def term(ls):
        x = ls.astype(np.float64)
        out = np.ones_like(x)
        for off, power in factors:
            out /= (x + off) ** power
        return out

    return term


def _partial_fraction_closed_form(factors):
    """Closed form of C(x) = sum_{n>=0} prod_i 1/(x + n + off_i)^m_i.

    Partial-fraction coefficients depend only on offset differences, so
    they are computed once; simple parts pair into digamma differences
    and squared parts become trigamma values.
    """
    offsets = [off for off, _ in factors]
    mults = [p for _, p in factors]
    if max(mults) > 2:
        raise UnsupportedShape("inner factors of multiplicity > 2 are not supported")
    if len(set(offsets)) != len(offsets):
        raise UnsupportedShape("repeated offsets must use the power field")

    simple = []  # (coef, offset) for 1/(x+n+offset)
    squared = []  # (coef, offset) for 1/(x+n+offset)^2
    for i, (ai, mi) in enumerate(zip(offsets, mults)):
        others = [(aj, mj) for j, (aj, mj) in enumerate(zip(offsets, mults)) if j != i]
        base = 1.0
        for aj, mj in others:
            base *= (aj - ai) ** (-mj)
        if mi == 1:
            simple.append((base, ai))
        else:
            squared.append((base, ai))
            # derivative of prod (t+aj)^(-mj) at t = -ai
            dbase = base * sum(-mj / (aj - ai) for aj, mj in others)
            simple.append((dbase, ai))
    total = sum(c for c, _ in simple)
    if abs(total) > 1e-9 * max(abs(c) for c, _ in simple):
        raise UnsupportedShape("simple partial-fraction parts do not cancel; inner sum diverges")

    def closed(ls):
        x = ls.astype(np.float64)
        out = np.zeros_like(x)
        for c, off in simple:
            out -= c * specfun.digamma_arr(x + off)
        for c, off in squared:
            out += c * specfun.polygamma_arr(1, x + off)
        return out

    return closed


def collapse_multisum(levels, closer=None):
    """Collapse a nested cumulative-index sum to a single-index spec.

    The innermost level must be a summable rational form (total degree
    >= 2); it is replaced by its digamma/trigamma closed form.  With two
    remaining outer levels the diagonal reordering turns the outermost
    prefix sum into a closed harmonic factor.  ``closer`` optionally
    overrides the inner closed form (a vectorized index -> value map).
    """
    levels = [lv if isinstance(lv, SumLevel) else SumLevel(tuple(lv)) for lv in levels]
    if not levels:
        raise UnsupportedShape("no levels given")
    if len(levels) == 1:
        inner = levels[0]
        if inner.degree < 2:
            raise UnsupportedShape("single-level sum needs degree >= 2 to converge")
        return infinite_series(_rational_term(inner.factors), PowerLog(0, float(inner.degree)))

    inner = levels[-1]
    outers = levels[:-1]
    if inner.degree < 2:
        raise UnsupportedShape("innermost sum must have degree >= 2")
    closed = closer if closer is not None else _partial_fraction_closed_form(inner.factors)
    for lv in outers:
        if len(lv.factors) != 1 or lv.factors[0][1] != 1:
            raise UnsupportedShape("outer levels must be single simple factors 1/(n + a)")
    if len(outers) == 1:
        (a1, _), = outers[0].factors

        def term(ls):
            x = ls.astype(np.float64)
            return closed(ls) / (x + a1)

        return infinite_series(term, PowerLog(0, float(inner.degree)))
    if len(outers) == 2:
        (a1, _), = outers[0].factors
        (a2, _), = outers[1].factors
        psi_a1 = specfun.digamma(a1)

        def term(ls):
            x = ls.astype(np.float64)
            prefix = specfun.digamma_arr(x + a1 + 1.0) - psi_a1
            return prefix * closed(ls) / (x + a2)

        return infinite_series(term, PowerLog(1, float(inner.degree)))
    raise UnsupportedShape("at most two outer levels are supported")
