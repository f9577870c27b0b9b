"""Condition checks on finite prefixes of weight sequences."""
import functools
import math
from typing import Callable, Dict, List, Mapping, Optional

import numpy as np
from scipy.special import gammaln

from cks_toolkit.core.config import settings
from cks_toolkit.core.exceptions import AbortAt, BadParam, CksError, EvalFailure, TooShort
from cks_toolkit.core.logging import logger
from cks_toolkit.models.conditions import CONDITION_NAMES, IMPLICATIONS, Verdict
from cks_toolkit.models.growth import GrowthFunction, Status
from cks_toolkit.models.sequences import AlphaSequence, Shape, Which
from cks_toolkit.services.growth import check_class
from cks_toolkit.services.legendre import legendre_table
from cks_toolkit.services.numerics import log_slack, tail_start
from cks_toolkit.services.sequences import (
    concave_majorant,
    egf_eval,
    log_shape,
    sequences_equivalent,
    user_sequence,
)

MIN_N = 10
ASSERTABLE = ("A1", "C1", "C2", "C3")

# log r where the certified-radius scan for generating functions starts
_RADIUS_SCAN_START = -4.0
_RADIUS_SCAN_STEP = 0.25


def _log_factorials(N: int) -> np.ndarray:
    return gammaln(np.arange(N + 1, dtype=float) + 1.0)


def _nonincreasing(values: np.ndarray) -> bool:
    slack = settings.compare_slack * np.maximum(1.0, np.abs(values[:-1]))
    return bool(np.all(np.diff(values) <= slack))


def _check_a1(alpha: AlphaSequence, candidate: Optional[float]) -> Verdict:
    """
    alpha(0) = 1 and inf alpha(n) sigma^n > 0 for some sigma.

    PASS is finite-prefix evidence only: the tightest sigma on 0..N, with the
    exponential rate -log alpha(n)/n no longer increasing over the last third.
    A faster decay beyond N would still break the condition.
    """
    la = alpha.as_array()
    N = alpha.N
    if abs(la[0]) > log_slack(la[0]):
        return Verdict(status=Status.FAIL, witness=(0, 0), margin=float(la[0]), note="alpha(0) != 1")
    start = tail_start(N)
    n = np.arange(N + 1)

    if candidate is not None:
        if not candidate > 0:
            raise BadParam(f"sigma must be positive, got {candidate}")
        tilted = la + n * math.log(candidate)
        floor = float(np.min(tilted[:start]))
        dips = np.nonzero(tilted[start:] < floor - log_slack(floor))[0]
        margin = float(np.min(tilted[start:]) - floor)
        if dips.size:
            m = start + int(dips[0])
            return Verdict(
                status=Status.FAIL, witness=(m, int(np.argmin(tilted[:start]))), margin=margin, constant=candidate,
            )
        return Verdict(status=Status.PASS, margin=margin, constant=candidate)

    rate = -la[start:] / n[start:]
    sigma = max(1.0, math.exp(float(np.max(rate))))
    tilted = la + n * math.log(sigma)
    margin = float(np.min(tilted[start:]))
    if len(rate) >= 2 and np.all(np.diff(rate) > 0):
        return Verdict(
            status=Status.INCONCLUSIVE, margin=margin, constant=sigma,
            note="exponential rate still increasing over the last third",
        )
    return Verdict(status=Status.PASS, margin=margin, constant=sigma)


def _check_root(alpha: AlphaSequence, sign: float) -> Verdict:
    N = alpha.N
    n = np.arange(N + 1)
    start = tail_start(N)
    root = (sign * alpha.as_array()[start:] - _log_factorials(N)[start:]) / n[start:]
    last = float(root[-1])
    constant = math.exp(last)
    if np.all(np.diff(root) > 0):
        return Verdict(status=Status.FAIL, witness=(start, N), margin=last, constant=constant)
    if _nonincreasing(root) and root[-1] < root[0] and last < settings.root_log_threshold:
        return Verdict(status=Status.PASS, margin=last, constant=constant)
    return Verdict(status=Status.INCONCLUSIVE, margin=last, constant=constant, note="n-th root trend is flat")


def _certified_log_radius(alpha: AlphaSequence, which: Which) -> Optional[float]:
    x, last_ok = _RADIUS_SCAN_START, None
    while x <= settings.bracket_max_x:
        try:
            converged = egf_eval(alpha, which, math.exp(x)).converged
        except CksError:
            converged = False
        if not converged:
            break
        last_ok = x
        x += _RADIUS_SCAN_STEP
    return last_ok


def _generating_function(alpha: AlphaSequence, which: Which, log_radius: float) -> GrowthFunction:
    @functools.lru_cache(maxsize=8192)
    def log_eval(r: float) -> float:
        series = egf_eval(alpha, which, r)
        if not series.converged:
            raise EvalFailure(f"G_{which.value.lower()} did not converge at r={r:g}")
        return series.log_sum

    return GrowthFunction(
        name=f"G_{which.value.lower()}[{alpha.subject}]",
        log_eval=log_eval,
        increasing=True,
        vectorized=False,
        domain_max=math.exp(log_radius),
    )


def _check_b1(alpha: AlphaSequence, which: Which) -> Verdict:
    log_radius = _certified_log_radius(alpha, which)
    if log_radius is None:
        return Verdict(status=Status.INCONCLUSIVE, note="generating function not summable on the prefix")
    g = _generating_function(alpha, which, log_radius)
    try:
        table = legendre_table(g, alpha.N)
        log_ell = np.asarray(table.log_ell)
    except AbortAt as e:
        if e.partial is None:
            return Verdict(status=Status.INCONCLUSIVE, note=f"Legendre transform of G unavailable: {e.cause}")
        log_ell = np.asarray(e.partial.log_ell)

    usable = len(log_ell) - 1
    if usable < 3:
        return Verdict(status=Status.INCONCLUSIVE, note=f"only {usable} orders inside the certified radius")
    n = np.arange(1, usable + 1)
    sign = -1.0 if which == Which.ALPHA else 1.0
    q = (_log_factorials(usable)[1:] + sign * alpha.as_array()[1:usable + 1] + log_ell[1:]) / n
    constant = math.exp(float(np.max(q)))
    start = tail_start(usable)
    window, earlier = q[start - 1:], q[:start - 1]
    settled = _nonincreasing(window) or (earlier.size and float(np.max(window)) <= float(np.max(earlier)))
    if settled:
        return Verdict(status=Status.PASS, margin=float(q[-1]), constant=constant, note=f"orders 1..{usable}")
    return Verdict(
        status=Status.INCONCLUSIVE, margin=float(q[-1]), constant=constant,
        note=f"running maximum still growing over orders 1..{usable}",
    )


def _xlogx(n: np.ndarray) -> np.ndarray:
    return np.where(n > 0, n * np.log(np.where(n > 0, n, 1.0)), 0.0)


def _x2_evidence(u: GrowthFunction) -> bool:
    if "log_x2_convex" in u.claimed_classes:
        return True
    try:
        return check_class(u, "log_x2_convex").status == Status.PASS
    except CksError:
        return False


def _check_b2_near(alpha: AlphaSequence) -> Verdict:
    """
    gamma(n) = alpha(n) n! equivalent to a log-concave sequence.

    Two routes: log-concavity of alpha(n) n! / n^(2n) when the source growth
    function has (log, x^2)-convexity evidence, else equivalence of gamma with
    its concave majorant. Either PASS only covers the prefix 0..N; it is weak
    evidence, not a proof.
    """
    N = alpha.N
    n = np.arange(N + 1, dtype=float)
    notes: List[str] = []
    if alpha.source is not None and _x2_evidence(alpha.source):
        shifted = alpha.as_array() + _log_factorials(N) - 2.0 * _xlogx(n)
        verdict = log_shape(shifted, Shape.LOG_CONCAVE)
        if verdict.status == Status.PASS:
            return verdict.model_copy(update={"note": "alpha(n) n! / n^(2n) is log-concave"})
        notes.append(f"alpha(n) n! / n^(2n) not log-concave at {verdict.witness}")

    log_gamma = alpha.log_gamma
    hull = concave_majorant(log_gamma)
    equivalence = sequences_equivalent(
        user_sequence(log_gamma, descriptor="gamma"),
        user_sequence(hull, descriptor="concave majorant"),
    )
    if equivalence.holds:
        return Verdict(
            status=Status.PASS, margin=equivalence.spread, constant=equivalence.c2,
            note="gamma is equivalent to its concave majorant",
        )
    notes.append(f"concave majorant exponent spread {equivalence.spread:.4g}")
    return Verdict(status=Status.INCONCLUSIVE, margin=equivalence.spread, note="; ".join(notes))


def _pair_grid(N: int):
    n, m = np.meshgrid(np.arange(N + 1), np.arange(N + 1), indexing="ij")
    return n, m


def _constant_verdict(excess: np.ndarray, weight: np.ndarray, valid: np.ndarray, candidate: Optional[float],
                      n: np.ndarray, m: np.ndarray, scale: np.ndarray) -> Verdict:
    """Tight constant exp(max excess/weight) over ``valid`` pairs, or an assertion against a candidate."""
    rates = np.where(valid, excess / np.where(weight > 0, weight, 1.0), -np.inf)
    log_tight = float(np.max(rates))
    if candidate is None:
        return Verdict(status=Status.PASS, margin=log_tight, constant=math.exp(log_tight))
    if not candidate > 0:
        raise BadParam(f"candidate constant must be positive, got {candidate}")
    over = excess - weight * math.log(candidate)
    allowed = settings.compare_slack * np.maximum(1.0, scale)
    bad = np.argwhere(valid & (over > allowed))
    margin = float(np.max(np.where(valid, over, -np.inf)))
    if bad.size:
        i, j = (int(v) for v in bad[0])
        return Verdict(status=Status.FAIL, witness=(int(n[i, j]), int(m[i, j])), margin=margin, constant=candidate)
    return Verdict(status=Status.PASS, margin=margin, constant=candidate)


def _check_c1(alpha: AlphaSequence, candidate: Optional[float]) -> Verdict:
    la = alpha.as_array()
    n, m = _pair_grid(alpha.N)
    excess = la[n] - la[m]
    return _constant_verdict(
        excess, m.astype(float), (n <= m) & (m >= 1), candidate, n, m, np.maximum(np.abs(la[n]), np.abs(la[m])),
    )


def _check_c2(alpha: AlphaSequence, candidate: Optional[float]) -> Verdict:
    la = alpha.as_array()
    n, m = _pair_grid(alpha.N)
    valid = (n + m <= alpha.N) & (n + m >= 1)
    s = np.minimum(n + m, alpha.N)
    excess = la[s] - la[n] - la[m]
    return _constant_verdict(
        excess, (n + m).astype(float), valid, candidate, n, m, np.abs(la[s]) + np.abs(la[n]) + np.abs(la[m]),
    )


def _check_c3(alpha: AlphaSequence, candidate: Optional[float]) -> Verdict:
    la = alpha.as_array()
    n, m = _pair_grid(alpha.N)
    valid = (n + m <= alpha.N) & (n + m >= 1)
    s = np.minimum(n + m, alpha.N)
    excess = la[n] + la[m] - la[s]
    return _constant_verdict(
        excess, (n + m).astype(float), valid, candidate, n, m, np.abs(la[s]) + np.abs(la[n]) + np.abs(la[m]),
    )


def _shape_of(values: np.ndarray, shape: Shape) -> Verdict:
    return log_shape(values, shape)


_CHECKS: Dict[str, Callable[[AlphaSequence, Optional[float]], Verdict]] = {
    "A1": _check_a1,
    "A2": lambda a, _: _check_root(a, 1.0),
    "A2_tilde": lambda a, _: _check_root(a, -1.0),
    "B1": lambda a, _: _check_b1(a, Which.ALPHA),
    "B1_tilde": lambda a, _: _check_b1(a, Which.INV_ALPHA),
    "B2": lambda a, _: _shape_of(a.log_gamma, Shape.LOG_CONCAVE),
    "B2_near": lambda a, _: _check_b2_near(a),
    "B2_tilde": lambda a, _: _shape_of(-(a.as_array() + _log_factorials(a.N)), Shape.LOG_CONCAVE),
    "B3": lambda a, _: _shape_of(a.as_array(), Shape.LOG_CONVEX),
    "C1": _check_c1,
    "C2": _check_c2,
    "C3": _check_c3,
}


def check_condition(name: str, alpha: AlphaSequence, candidate: Optional[float] = None) -> Verdict:
    """
    Evidence for one condition on the prefix alpha(0..N).

    Without ``candidate`` the constants of A1 and C1-C3 are the tightest ones
    on the prefix. With a candidate those conditions are asserted with it.
    Asymptotic conditions report PASS only when their trend over the last third
    of the table is decisive. Numeric errors turn into INCONCLUSIVE.

    Raises:
        BadParam: unknown condition, or a candidate for a condition without constant
        TooShort: N < 10
    """
    if name not in _CHECKS:
        raise BadParam(f"unknown condition '{name}' (known: {', '.join(CONDITION_NAMES)})")
    if candidate is not None and name not in ASSERTABLE:
        raise BadParam(f"condition {name} takes no constant")
    if alpha.N < MIN_N:
        raise TooShort(f"condition checks need N >= {MIN_N}, got {alpha.N}")
    try:
        verdict = _CHECKS[name](alpha, candidate)
    except BadParam:
        raise
    except CksError as e:
        logger.error(f"{name} check failed for {alpha.subject}: {e}", exc_info=True)
        return Verdict(status=Status.INCONCLUSIVE, note=f"{e.code}: {e.message}")
    logger.debug(f"{name} for {alpha.subject}: {verdict.status.value}")
    return verdict


def check_lattice(entries: Mapping[str, Verdict]) -> List[str]:
    """Implications whose premise PASSes while the conclusion FAILs."""
    broken = []
    for premise, conclusion in IMPLICATIONS:
        if premise in entries and conclusion in entries:
            if entries[premise].status == Status.PASS and entries[conclusion].status == Status.FAIL:
                broken.append(f"InternalInconsistency: {premise} PASS but {conclusion} FAIL")
    return broken
