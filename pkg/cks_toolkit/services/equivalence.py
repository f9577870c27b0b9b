"""Function equivalence certificates, growth bounds and the worked examples."""
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from cks_toolkit.core.config import settings
from cks_toolkit.core.exceptions import BadParam, CksError
from cks_toolkit.core.logging import logger
from cks_toolkit.core.tracing import get_tracer
from cks_toolkit.models.equivalence import BoundSide, EquivalenceCertificate, ExamplesReport, Thm27Report
from cks_toolkit.models.growth import GrowthFunction, Status
from cks_toolkit.models.legendre import IdentityCheck
from cks_toolkit.models.numerics import LogValue
from cks_toolkit.services.growth import check_class, make_catalog
from cks_toolkit.services.legendre import (
    dual_function,
    dual_legendre_at,
    l_function,
    l_sharp_function,
    legendre_table,
)
from cks_toolkit.services.sequences import (
    alpha_from_growth,
    bell_numbers,
    ks_power_sequence,
    sequences_equivalent,
)

tracer = get_tracer()

DILATIONS = tuple(2.0 ** j for j in range(-6, 7))

# dual of bell_dual(k) vs exp_k: compared on [0, min(cap, share * log domain_max)]
_BELL_R_CAP = 3.0
_BELL_DOMAIN_SHARE = 0.95


def equivalence_grid(r_min: float, r_max: float, points: int) -> np.ndarray:
    """Geometric grid on [r_min, r_max]; r_min <= 0 prepends 0 to a grid starting at min(1e-3, r_max/1e3)."""
    if not r_max > 0 or r_min >= r_max:
        raise BadParam(f"need r_min < r_max and r_max > 0, got [{r_min}, {r_max}]")
    if points < 3:
        raise BadParam(f"need at least 3 grid points, got {points}")
    if r_min <= 0:
        start = min(1e-3, r_max / 1e3)
        return np.concatenate(([0.0], np.geomspace(start, r_max, points - 1)))
    return np.geomspace(r_min, r_max, points)


def _edge_drift(margins: np.ndarray) -> float:
    w = min(settings.edge_window, len(margins))
    return float(margins[-1] - margins[-w])


def find_equivalence(
    u: GrowthFunction,
    v: GrowthFunction,
    r_min: float,
    r_max: float,
    grid_size: int = 40,
    dilations: Sequence[float] = DILATIONS,
) -> EquivalenceCertificate:
    """
    Search dilations a and constants c with c1 u(a1 r) <= v(r) <= c2 u(a2 r) on a grid.

    For each candidate a the margins m(r) = log v(r) - log u(a r) are formed.
    The upper side takes the smallest a whose margins do not drift upward over
    the outermost grid points, with c2 = exp(max m); the lower side takes the
    largest a without downward drift, with c1 = exp(min m). Dilations at which u
    cannot be evaluated are skipped. A failed search is reported with
    holds=False rather than raised.

    Raises:
        EvalFailure: v is not evaluable on the grid
    """
    r = equivalence_grid(r_min, r_max, grid_size)
    with tracer.start_as_current_span("equivalence.find") as span:
        span.set_attribute("equivalence.u", u.descriptor)
        span.set_attribute("equivalence.v", v.descriptor)
        span.set_attribute("equivalence.grid_size", len(r))

        log_v = v.log_u_many(r)
        margins: Dict[float, np.ndarray] = {}
        skipped: List[float] = []
        for a in sorted(dilations):
            try:
                margins[a] = log_v - u.log_u_many(a * r)
            except CksError as e:
                logger.debug(f"dilation {a:g} of {u.descriptor} skipped: {e}")
                skipped.append(a)

        tol = settings.edge_drift_tol * max(1.0, float(np.max(np.abs(log_v))))
        upper: Optional[Tuple[float, np.ndarray]] = None
        lower: Optional[Tuple[float, np.ndarray]] = None
        for a, m in margins.items():
            drift = _edge_drift(m)
            if upper is None and drift <= tol:
                upper = (a, m)
            if -drift <= tol:
                lower = (a, m)

        holds = upper is not None and lower is not None
        c1 = a1 = c2 = a2 = math.nan
        worst = math.nan
        if upper is not None:
            a2, c2 = upper[0], math.exp(float(np.max(upper[1])))
        if lower is not None:
            a1, c1 = lower[0], math.exp(float(np.min(lower[1])))
        if holds:
            worst = max(_edge_drift(upper[1]), -_edge_drift(lower[1]))
        note = None
        if not holds:
            missing = "upper" if upper is None else "lower"
            note = f"no dilation in [{min(dilations):g}, {max(dilations):g}] settles the {missing} side"
            logger.warning(f"{u.descriptor} ~ {v.descriptor}: {note}")
        span.set_attribute("equivalence.holds", holds)

        return EquivalenceCertificate(
            u=u.descriptor,
            v=v.descriptor,
            c1=c1,
            a1=a1,
            c2=c2,
            a2=a2,
            tested_range=(float(r[0]), float(r[-1])),
            grid_size=len(r),
            holds=holds,
            worst_margin=worst,
            skipped_dilations=skipped,
            note=note,
        )


def _x2_and_half(u: GrowthFunction) -> Tuple[bool, str]:
    if "log_x2_convex" not in u.claimed_classes and check_class(u, "log_x2_convex").status != Status.PASS:
        return False, f"{u.descriptor} has no (log, x^2)-convexity evidence"
    if "C_plus_half" not in u.claimed_classes and check_class(u, "C_plus_half").status == Status.FAIL:
        return False, f"{u.descriptor} fails the C_plus_half evidence"
    return True, ""


def verify_thm27(
    u: GrowthFunction,
    N: int = 200,
    r_min: float = 0.05,
    r_max: float = 2.0,
    grid_size: int = 40,
) -> Thm27Report:
    """
    Certificates that u*, L_{u*} and L#_u are pairwise equivalent.

    u* uses the catalog closed form when there is one. SKIPPED when u lacks
    (log, x^2)-convexity or C_plus_half evidence.
    """
    ok, why = _x2_and_half(u)
    if not ok:
        logger.info(f"equivalence of the dual family skipped for {u.descriptor}: {why}")
        return Thm27Report(subject=u.descriptor, N=N, status=Status.SKIPPED, note=why)

    with tracer.start_as_current_span("equivalence.dual_family") as span:
        span.set_attribute("growth.subject", u.descriptor)
        span.set_attribute("table.N", N)

        dual = dual_function(u)
        dual_l = l_function(legendre_table(dual, N))
        sharp = l_sharp_function(legendre_table(u, N))

        certificates = {
            "dual~L_dual": find_equivalence(dual, dual_l, r_min, r_max, grid_size),
            "dual~Lsharp": find_equivalence(dual, sharp, r_min, r_max, grid_size),
            "L_dual~Lsharp": find_equivalence(dual_l, sharp, r_min, r_max, grid_size),
        }
        status = Status.PASS if all(c.holds for c in certificates.values()) else Status.INCONCLUSIVE
        span.set_attribute("report.status", status.value)
        return Thm27Report(subject=u.descriptor, N=N, status=status, certificates=certificates)


def growth_bound(
    u: GrowthFunction,
    side: BoundSide,
    K: float,
    a: float,
    s: float,
) -> Union[float, LogValue]:
    """
    K u*(a s)^(1/2) for generalized functions, K u(a s)^(1/2) for test functions.

    ``s`` is the squared seminorm. The plain value is returned when it fits in
    a double, otherwise the LogValue.
    """
    if not K > 0:
        raise BadParam(f"K must be positive, got {K}")
    if a < 0 or s < 0:
        raise BadParam(f"a and s must be nonnegative, got a={a}, s={s}")
    if BoundSide(side) == BoundSide.GENERALIZED:
        log_u = dual_function(u).log_u(a * s)
    else:
        log_u = u.log_u(a * s)
    bound = LogValue(logv=math.log(K) + 0.5 * log_u)
    value = bound.to_real()
    return value if math.isfinite(value) else bound


def _ks_examples(beta: float, N: int) -> ExamplesReport:
    u = make_catalog("ks", {"beta": beta})
    p, q = 1.0 + beta, 1.0 - beta
    table = legendre_table(u, N)
    n = np.arange(1, N + 1, dtype=float)
    closed = p * n * (1.0 - np.log(n))
    ell_residual = float(np.max(np.abs(np.asarray(table.log_ell[1:]) - closed)))
    checks = [IdentityCheck(
        name="legendre_closed_form",
        status=Status.PASS if ell_residual <= 1e-6 else Status.FAIL,
        worst_margin=ell_residual,
    )]

    r = np.geomspace(1e-3, 1e3, 50)
    expected = q * np.power(r, 1.0 / q)
    numeric = np.array([dual_legendre_at(u, float(x)).logv for x in r])
    dual_residual = float(np.max(np.abs(numeric - expected) / np.maximum(1.0, np.abs(expected))))
    checks.append(IdentityCheck(
        name="dual_closed_form",
        status=Status.PASS if dual_residual <= 1e-5 else Status.FAIL,
        worst_margin=dual_residual,
    ))

    alpha = alpha_from_growth(u, N)
    equivalence = sequences_equivalent(alpha, ks_power_sequence(beta, N))
    checks.append(IdentityCheck(
        name="power_weight_equivalence",
        status=Status.PASS if equivalence.holds else Status.INCONCLUSIVE,
        worst_margin=equivalence.spread,
    ))
    return ExamplesReport(which="KS", params={"beta": beta}, N=N, checks=checks, sequence_equivalence=equivalence)


def bell_comparison_r_max(exp_k: GrowthFunction) -> float:
    """
    Right end of the range where the numeric dual of bell_dual(k) is compared with exp_k.

    A fixed share of log(domain_max), so that log log exp_k stays well inside the
    float range, capped at _BELL_R_CAP.
    """
    if not math.isfinite(exp_k.domain_max):
        return _BELL_R_CAP
    return min(_BELL_R_CAP, _BELL_DOMAIN_SHARE * math.log(exp_k.domain_max))


def _bell_examples(k: int, N: int) -> ExamplesReport:
    v = make_catalog("bell_dual", {"k": k})
    alpha = alpha_from_growth(v, N)
    bell = bell_numbers(k, N)
    window = (20, N) if N >= 40 else None
    equivalence = sequences_equivalent(alpha, bell, window=window, spread_cap=1.0)
    checks = [IdentityCheck(
        name="bell_sequence_equivalence",
        status=Status.PASS if equivalence.holds else Status.INCONCLUSIVE,
        worst_margin=equivalence.spread,
        note=f"exponent spread over n={equivalence.window[0]}..{equivalence.window[1]}",
    )]

    exp_k = make_catalog("exp_k", {"k": k})
    r_max = bell_comparison_r_max(exp_k)
    certificate = find_equivalence(exp_k, dual_function(v, prefer_closed_form=False), 0.0, r_max, 30)
    checks.append(IdentityCheck(
        name="dual_vs_exp_k",
        status=Status.PASS if certificate.holds else Status.INCONCLUSIVE,
        worst_margin=certificate.worst_margin,
        note=certificate.note,
    ))
    return ExamplesReport(
        which="BELL", params={"k": float(k)}, N=N, checks=checks,
        sequence_equivalence=equivalence, certificate=certificate,
    )


def verify_examples(which: str, param: float, N: int = 100) -> ExamplesReport:
    """
    End-to-end checks of the two worked families.

    KS(beta): closed forms of l_u and u*, and equivalence of alpha with (n!)^beta.
    BELL(k): alpha from bell_dual(k) against the Bell numbers of order k, and the
    numeric dual of bell_dual(k) against exp_k. Failed assertions are collected
    in the report, not raised.
    """
    key = which.upper()
    with tracer.start_as_current_span("equivalence.examples") as span:
        span.set_attribute("examples.which", key)
        span.set_attribute("examples.param", float(param))
        if key == "KS":
            if not 0.0 <= param < 1.0:
                raise BadParam(f"beta must lie in [0, 1), got {param}")
            report = _ks_examples(float(param), N)
        elif key == "BELL":
            if param not in (2, 3):
                raise BadParam(f"Bell examples cover k in {{2, 3}}, got {param}")
            report = _bell_examples(int(param), N)
        else:
            raise BadParam(f"unknown example family '{which}' (known: KS, BELL)")
        logger.info(
            f"examples {key}({param:g}): " + ", ".join(f"{c.name}={c.status.value}" for c in report.checks)
        )
        return report
