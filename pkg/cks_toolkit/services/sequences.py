"""Weight sequences: alpha from growth functions, Bell numbers, generating functions and shape tests."""
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln, logsumexp

from cks_toolkit.core.config import settings
from cks_toolkit.core.exceptions import BadParam, DivergentProfile, LengthMismatch, NonFinite, TooShort
from cks_toolkit.core.logging import logger
from cks_toolkit.models.conditions import Verdict
from cks_toolkit.models.growth import GrowthFunction, Status
from cks_toolkit.models.numerics import LogValue, SeriesResult
from cks_toolkit.models.sequences import (
    AlphaSequence,
    Provenance,
    ProvenanceKind,
    SequenceEquivalence,
    Shape,
    StirlingReport,
    Which,
)
from cks_toolkit.services.legendre import legendre_table
from cks_toolkit.services.numerics import log_factorial, logsumexp_series, tail_start

BELL_MAX_N = 200
_PRECISION_LIMIT = 1e-8


def alpha_from_growth(u: GrowthFunction, N: int, tol: Optional[float] = None) -> AlphaSequence:
    """alpha(n) = 1 / (l_u(n) n!), from a Legendre table of u."""
    table = legendre_table(u, N, tol=tol)
    n = np.arange(N + 1)
    log_alpha = -np.asarray(table.log_ell) - log_factorial(n)
    return AlphaSequence(
        n_max=N,
        log_alpha=[float(v) for v in log_alpha],
        provenance=Provenance(kind=ProvenanceKind.GROWTH, descriptor=u.descriptor),
        source=u,
    )


def user_sequence(log_alpha: Sequence[float], descriptor: str = "user") -> AlphaSequence:
    """Wrap user-supplied log alpha values."""
    values = [float(v) for v in log_alpha]
    if len(values) < 1:
        raise TooShort("a weight sequence needs at least one entry")
    return AlphaSequence(
        n_max=len(values) - 1,
        log_alpha=values,
        provenance=Provenance(kind=ProvenanceKind.USER, descriptor=descriptor),
    )


def ks_power_sequence(beta: float, N: int) -> AlphaSequence:
    """The weight alpha(n) = (n!)^beta."""
    if not 0.0 <= beta <= 1.0:
        raise BadParam(f"beta must lie in [0, 1], got {beta}")
    return user_sequence(beta * log_factorial(np.arange(N + 1)), descriptor=f"ks_power(beta={beta:g})")


def _coefficients(alpha: AlphaSequence, which: Which) -> np.ndarray:
    log_alpha = alpha.as_array()
    lf = log_factorial(np.arange(alpha.N + 1))
    if which == Which.ALPHA:
        return log_alpha - lf
    return -log_alpha - lf


def egf_eval(alpha: AlphaSequence, which: Which, r: float, tol: Optional[float] = None) -> SeriesResult:
    """
    G_alpha(r) = sum alpha(n) r^n / n!, or G_{1/alpha}(r) = sum r^n / (n! alpha(n)).

    Raises:
        DivergentProfile: the n-th root of the coefficients does not decay over the last third
        NonDecreasingTail: the series is outside its safe range at this r
    """
    if r < 0 or math.isnan(r):
        raise BadParam(f"generating functions are evaluated at r >= 0, got {r}")
    coeff = _coefficients(alpha, Which(which))
    N = alpha.N
    if N >= 3:
        n = np.arange(1, N + 1)
        profile = coeff[1:] / n
        window = profile[tail_start(N) - 1:]
        slack = settings.compare_slack * np.maximum(1.0, np.abs(window[:-1]))
        if len(window) >= 2 and not (np.all(np.diff(window) <= slack) and window[-1] < window[0]):
            raise DivergentProfile(f"coefficients of G_{which.value.lower()} for {alpha.subject} do not decay")

    log_r = math.log(r) if r > 0 else -math.inf

    def term_at(n: int) -> float:
        if n == 0:
            return float(coeff[0])
        return float(coeff[n]) + n * log_r

    return logsumexp_series(term_at, tol=tol, max_terms=N + 1)


def wick_norm(alpha: AlphaSequence, which: Which, s: float, a: float = 1.0, tol: Optional[float] = None) -> LogValue:
    """Norm of a Wick exponential as a function of the squared seminorm s: G(a s)^(1/2)."""
    if a < 0:
        raise BadParam(f"a must be nonnegative, got {a}")
    series = egf_eval(alpha, which, a * s, tol=tol)
    return LogValue(logv=0.5 * series.log_sum)


def _bell_exact(N: int) -> List[int]:
    # h = exp(e^r - 1) through h_m = (1/m) sum j f_j h_{m-j} with f_j = 1/j!
    f = [Fraction(1, math.factorial(j)) for j in range(N + 1)]
    h = [Fraction(1)]
    for m in range(1, N + 1):
        h.append(sum((j * f[j] * h[m - j] for j in range(1, m + 1)), Fraction(0)) / m)
    values = [math.factorial(n) * h[n] for n in range(N + 1)]
    if any(v.denominator != 1 for v in values):
        raise NonFinite("order-2 Bell recurrence produced a non-integer value")
    return [int(v) for v in values]


def _log_exp_series(log_f: np.ndarray) -> np.ndarray:
    """log coefficients of exp(f - f_0) given log f_j for j >= 1 (log_f[0] unused)."""
    N = len(log_f) - 1
    log_h = np.full(N + 1, -np.inf)
    log_h[0] = 0.0
    log_j = np.log(np.arange(1, N + 1, dtype=float))
    for m in range(1, N + 1):
        j = np.arange(1, m + 1)
        log_h[m] = float(logsumexp(log_j[:m] + log_f[j] + log_h[m - j])) - math.log(m)
    return log_h


def bell_numbers(k: int, N: int) -> AlphaSequence:
    """
    Bell numbers of order k: exp_k(r) = exp_k(0) sum b_k(n) r^n / n!.

    Order 1 is the constant 1 and order 2 is exact integer arithmetic; higher
    orders apply the power-series exponential k times in log scale, starting
    from f(r) = r. ``precision_loss`` is set when the accumulated relative error
    estimate exceeds 1e-8.

    Raises:
        BadParam: k < 1, N > 200, or the constant term of exp_(k-1) is not representable
    """
    if int(k) != k or k < 1:
        raise BadParam(f"Bell order must be an integer >= 1, got {k}")
    if not 0 <= N <= BELL_MAX_N:
        raise BadParam(f"Bell numbers are supported for 0 <= N <= {BELL_MAX_N}, got {N}")
    k = int(k)
    provenance = Provenance(kind=ProvenanceKind.BELL, descriptor=f"bell(k={k})")
    lf = log_factorial(np.arange(N + 1))

    if k == 1:
        return AlphaSequence(n_max=N, log_alpha=[0.0] * (N + 1), provenance=provenance, exact=[1] * (N + 1))
    if k == 2:
        exact = _bell_exact(N)
        return AlphaSequence(
            n_max=N, log_alpha=[math.log(b) for b in exact], provenance=provenance, exact=exact,
        )

    # f(r) = r: constant 0, f_1 = 1, f_j = 0 otherwise
    log_f = np.full(N + 1, -np.inf)
    if N >= 1:
        log_f[1] = 0.0
    constant = 0.0
    for level in range(1, k + 1):
        log_h = _log_exp_series(log_f)
        if level == k:
            break
        # exp(f) = e^{f_0} h, so the next f has constant term exp(f_0)
        log_f = constant + log_h
        try:
            constant = math.exp(constant)
        except OverflowError as e:
            raise BadParam(f"exp_{level + 1}(0) is beyond double range; Bell order {k} unsupported") from e
    log_b = log_h + lf

    eps = np.finfo(float).eps
    error = k * (N + 1) * (N + 2) / 2.0 * eps
    precision_loss = error > _PRECISION_LIMIT
    if precision_loss:
        logger.warning(f"bell(k={k}, N={N}): relative error estimate {error:.2e} exceeds {_PRECISION_LIMIT:g}")
    return AlphaSequence(
        n_max=N,
        log_alpha=[float(v) for v in log_b],
        provenance=provenance,
        precision_loss=precision_loss,
        error_estimate=error,
    )


def _as_logs(seq: Sequence[Union[float, LogValue]]) -> np.ndarray:
    values = np.asarray([v.logv if isinstance(v, LogValue) else float(v) for v in seq], dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFinite("shape tests need finite log values")
    return values


def log_shape(seq: Sequence[Union[float, LogValue]], shape: Shape, slack: Optional[float] = None) -> Verdict:
    """
    Second-difference test of a log sequence.

    LOG_CONCAVE: s[n] + s[n+2] <= 2 s[n+1]; LOG_CONVEX: the reverse. The slack
    is relative to the magnitude of the compared entries. A FAIL carries the
    first violating pair (n, n+2).

    Raises:
        TooShort: fewer than 3 entries
    """
    s = _as_logs(seq)
    if len(s) < 3:
        raise TooShort(f"shape tests need at least 3 entries, got {len(s)}")
    base = settings.compare_slack if slack is None else slack
    second = s[:-2] + s[2:] - 2.0 * s[1:-1]
    excess = second if Shape(shape) == Shape.LOG_CONCAVE else -second
    scale = np.maximum.reduce([np.ones_like(excess), np.abs(s[:-2]), np.abs(s[1:-1]), np.abs(s[2:])])
    bad = np.nonzero(excess > base * scale)[0]
    margin = float(np.max(excess))
    if bad.size:
        n = int(bad[0])
        return Verdict(status=Status.FAIL, witness=(n, n + 2), margin=margin)
    return Verdict(status=Status.PASS, margin=margin)


def concave_majorant(values: Sequence[float]) -> np.ndarray:
    """Least concave majorant of the points (n, values[n]), evaluated at every n."""
    y = np.asarray(values, dtype=float)
    hull: List[int] = []
    for i in range(len(y)):
        # drop points lying on or below the chord from the previous hull point to i
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            if (y[b] - y[a]) * (i - a) <= (y[i] - y[a]) * (b - a):
                hull.pop()
            else:
                break
        hull.append(i)
    return np.interp(np.arange(len(y)), hull, y[hull])


def sequences_equivalent(
    a: AlphaSequence,
    b: AlphaSequence,
    window: Optional[Tuple[int, int]] = None,
    spread_cap: Optional[float] = None,
) -> SequenceEquivalence:
    """
    Fit K1 c1^n a(n) <= b(n) <= K2 c2^n a(n) on the common prefix.

    With d(n) = log b(n) - log a(n), K1 = K2 = e^{d(0)} and c1, c2 are the
    extreme exponents (d(n) - d(0))/n over n >= 1, so both bounds hold on the
    prefix by construction. Whether the relation extends past N is judged from
    the exponent spread alone: it holds when the spread over ``window``
    (default: last third of the table) stays below ``spread_cap``.

    Raises:
        LengthMismatch: different N
    """
    if a.N != b.N:
        raise LengthMismatch(f"sequence lengths differ: N={a.N} vs N={b.N}")
    if a.N < 1:
        raise TooShort("equivalence needs at least two entries")
    cap = settings.equivalence_spread_cap if spread_cap is None else spread_cap
    N = a.N
    d = b.as_array() - a.as_array()
    n = np.arange(1, N + 1)
    exponent = (d[1:] - d[0]) / n
    log_c1, log_c2 = float(np.min(exponent)), float(np.max(exponent))

    lo, hi = window if window is not None else (tail_start(N), N)
    if not 1 <= lo <= hi <= N:
        raise BadParam(f"window [{lo}, {hi}] outside 1..{N}")
    inspected = exponent[lo - 1:hi]
    spread = float(np.max(inspected) - np.min(inspected))

    holds = spread < cap
    if not holds:
        logger.debug(f"{a.subject} vs {b.subject}: exponent spread {spread:.4g} over n={lo}..{hi}")
    return SequenceEquivalence(
        K1=math.exp(d[0]),
        c1=math.exp(log_c1),
        K2=math.exp(d[0]),
        c2=math.exp(log_c2),
        tested_N=N,
        holds=holds,
        spread=spread,
        window=(lo, hi),
    )


def stirling_sandwich(n_max: int = 170, slack: float = 1e-9) -> StirlingReport:
    """Worst margins of the two-sided Stirling bound for n = 1..n_max."""
    if n_max < 1:
        raise BadParam(f"n_max must be >= 1, got {n_max}")
    n = np.arange(1, n_max + 1, dtype=float)
    lf = gammaln(n + 1.0)
    nlogn = n * np.log(n)
    lower = float(np.max(nlogn - n - lf))
    upper = float(np.max(lf - (1.0 + 0.5 * n * math.log(2.0) + nlogn - n)))
    return StirlingReport(n_max=n_max, lower_margin=lower, upper_margin=upper, holds=lower <= slack and upper <= slack)
