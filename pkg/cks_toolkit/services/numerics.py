"""Log-domain series summation and bracketed scalar optimization."""
import math
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.special import gammaln, logsumexp

from cks_toolkit.core.config import settings
from cks_toolkit.core.exceptions import InvalidTolerance, NoBracket, NonDecreasingTail, NonFinite
from cks_toolkit.core.logging import logger
from cks_toolkit.models.numerics import NEG_INF, LogValue, Mode, OptimResult, SeriesResult

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
GROWTH = 1.0 + INV_PHI  # bracket step multiplier

Term = Union[float, LogValue]


def _as_log(term: Term) -> float:
    if isinstance(term, LogValue):
        return term.logv
    return float(term)


def log_factorial(n):
    """log n! through the log-gamma function; accepts scalars and arrays."""
    return gammaln(np.asarray(n, dtype=float) + 1.0)


def tail_start(N: int) -> int:
    """First index of the last-third window of a table indexed 0..N (never 0)."""
    return max(1, N - N // 3)


def log_slack(*values: float, slack: Optional[float] = None) -> float:
    """Comparison slack scaled to the magnitude of the log values compared."""
    base = settings.compare_slack if slack is None else slack
    finite = [abs(v) for v in values if math.isfinite(v)]
    return base * max([1.0] + finite)


def _log_tail(log_term: float, log_ratio: float) -> float:
    """log of t*q/(1-q), the geometric majorant of the tail after a term t."""
    if log_term == NEG_INF or log_ratio == NEG_INF:
        return NEG_INF
    return log_term + log_ratio - math.log1p(-math.exp(log_ratio))


def _finish(logs: Sequence[float], log_tail: float, converged: bool) -> SeriesResult:
    arr = np.asarray(logs, dtype=float)
    if arr.size == 0 or np.all(arr == NEG_INF):
        total = NEG_INF
    else:
        total = float(logsumexp(arr[arr > NEG_INF]))
    return SeriesResult(
        sum=LogValue(logv=total),
        terms_used=len(logs),
        tail_bound=LogValue(logv=log_tail),
        converged=converged,
    )


def logsumexp_series(
    term_at: Callable[[int], Term],
    tol: Optional[float] = None,
    max_terms: Optional[int] = None,
) -> SeriesResult:
    """
    Sum a positive series given term by term in log scale.

    Summation stops once the geometric majorant built from the last observed
    term ratio is below ``tol`` relative to the running sum.

    Args:
        term_at: n -> log of the n-th term (float) or a LogValue
        tol: relative tail tolerance, defaults to ``settings.series_tol``
        max_terms: term budget, defaults to ``settings.series_max_terms``

    Returns:
        SeriesResult; ``converged`` is False when the budget ran out with a
        decreasing tail that had not yet reached the tolerance

    Raises:
        InvalidTolerance: tol <= 0
        NonDecreasingTail: budget exhausted while terms were still growing
        NonFinite: a term evaluated to nan or +inf
    """
    tol = settings.series_tol if tol is None else tol
    if not tol > 0:
        raise InvalidTolerance(f"series tolerance must be positive, got {tol}")
    max_terms = settings.series_max_terms if max_terms is None else max_terms
    log_tol = math.log(tol)

    logs = []
    running = NEG_INF
    prev = NEG_INF
    prev_ratio: Optional[float] = None
    log_ratio = math.inf

    for n in range(max_terms):
        t = _as_log(term_at(n))
        if math.isnan(t) or t == math.inf:
            raise NonFinite(f"series term {n} is {t}")
        logs.append(t)
        running = float(np.logaddexp(running, t))

        if n == 0:
            prev = t
            continue

        if t == NEG_INF and prev == NEG_INF:
            return _finish(logs, NEG_INF, True)

        if t == NEG_INF:
            log_ratio = NEG_INF
        elif prev == NEG_INF:
            log_ratio = math.inf
        else:
            log_ratio = t - prev

        q = log_ratio if prev_ratio is None else max(log_ratio, prev_ratio)
        if q < 0:
            log_tail = _log_tail(t, q)
            if log_tail == NEG_INF or log_tail - running <= log_tol:
                return _finish(logs, log_tail, True)

        prev_ratio = log_ratio
        prev = t

    if not log_ratio < 0:
        raise NonDecreasingTail(
            f"terms still growing after {max_terms} terms (last log-ratio {log_ratio:.3g})"
        )

    q = log_ratio if prev_ratio is None else max(log_ratio, prev_ratio)
    if not q < 0:
        q = log_ratio
    logger.debug(f"Series stopped at term budget {max_terms} without reaching tol={tol}")
    return _finish(logs, _log_tail(logs[-1], q), False)


def _toward_cap(f: Callable[[float], float], inner: float, cap: float, f_cap: float, tol: float):
    """
    First point between ``inner`` and ``cap``, halving towards the cap, that is at
    least as good as the cap itself; None when the cap is the best point down to ``tol``.
    """
    gap = inner - cap
    while abs(gap) > tol:
        gap /= 2.0
        x = cap + gap
        fx = f(x)
        if fx <= f_cap:
            return x, fx
    return None


def optimize_scalar(
    objective: Callable[[float], float],
    mode: Mode = Mode.MIN,
    seed: float = 0.0,
    tol: Optional[float] = None,
    lo: Optional[float] = None,
    hi: Optional[float] = None,
    step: float = 1.0,
    max_iter: int = 1000,
) -> OptimResult:
    """
    Bracket an interior extremum from ``seed`` and refine it by golden section.

    The bracket grows geometrically towards the better side until the middle
    point beats both ends, then shrinks to width ``tol``. When the improving end
    reaches a range cap, points between the bracket and the cap are sampled at
    halving distances from the cap; an interior extremum near the cap is still
    enclosed that way.

    Args:
        objective: real -> real
        mode: MIN or MAX
        seed: starting abscissa
        tol: final bracket width, defaults to ``settings.optimize_tol``
        lo: lower range cap, defaults to ``settings.bracket_min_x``
        hi: upper range cap, defaults to ``settings.bracket_max_x``
        step: initial half-width of the bracket
        max_iter: bound on golden-section iterations

    Raises:
        NoBracket: the range cap is at least as good as every point sampled between it and the bracket; ``side``
            tells the caller where the boundary extremum lies
        NonFinite: the objective returned nan or an infinity
    """
    tol = settings.optimize_tol if tol is None else tol
    if not tol > 0:
        raise InvalidTolerance(f"optimization tolerance must be positive, got {tol}")
    lo_cap = settings.bracket_min_x if lo is None else lo
    hi_cap = settings.bracket_max_x if hi is None else hi
    sign = 1.0 if mode == Mode.MIN else -1.0

    def f(x: float) -> float:
        v = objective(x)
        if v is None or not math.isfinite(v):
            raise NonFinite(f"objective returned {v} at x={x}")
        return sign * float(v)

    if hi_cap - lo_cap < 2.0 * step:
        step = (hi_cap - lo_cap) / 4.0
    if step <= 0:
        raise NoBracket(f"empty search range [{lo_cap}, {hi_cap}]", side="left", edge=lo_cap)

    b = min(max(seed, lo_cap + step), hi_cap - step)
    h = step
    a, c = b - h, b + h
    fa, fb, fc = f(a), f(b), f(c)
    iterations = 0

    while not (fb <= fa and fb <= fc):
        iterations += 1
        if fa < fb and fa <= fc:
            if a <= lo_cap:
                inner = _toward_cap(f, b, a, fa, tol)
                if inner is None:
                    raise NoBracket(f"extremum not enclosed above x={lo_cap}", side="left", edge=lo_cap)
                c, fc = b, fb
                b, fb = inner
                break
            c, fc = b, fb
            b, fb = a, fa
            h *= GROWTH
            a = max(b - h, lo_cap)
            fa = f(a)
        else:
            if c >= hi_cap:
                inner = _toward_cap(f, b, c, fc, tol)
                if inner is None:
                    raise NoBracket(f"extremum not enclosed below x={hi_cap}", side="right", edge=hi_cap)
                a, fa = b, fb
                b, fb = inner
                break
            a, fa = b, fb
            b, fb = c, fc
            h *= GROWTH
            c = min(b + h, hi_cap)
            fc = f(c)

    left, right = a, c
    x1 = right - INV_PHI * (right - left)
    x2 = left + INV_PHI * (right - left)
    f1, f2 = f(x1), f(x2)
    while right - left > tol and iterations < max_iter:
        iterations += 1
        if f1 <= f2:
            right = x2
            x2, f2 = x1, f1
            x1 = right - INV_PHI * (right - left)
            f1 = f(x1)
        else:
            left = x1
            x1, f1 = x2, f2
            x2 = left + INV_PHI * (right - left)
            f2 = f(x2)

    candidates = [(f1, x1), (f2, x2)]
    if left <= b <= right:
        candidates.append((fb, b))
    best_f, best_x = min(candidates)
    return OptimResult(
        arg_opt=best_x,
        value_opt=sign * best_f,
        bracket=(left, right),
        iterations=iterations,
    )
