"""Legendre transform, dual transform and the L-series built on their tables."""
import functools
import math
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.special import gammaln

from cks_toolkit.core.config import settings
from cks_toolkit.core.exceptions import (
    AbortAt,
    BadParam,
    CksError,
    DivergentProfile,
    EvalFailure,
    NoBracket,
    NonDecreasingTail,
)
from cks_toolkit.core.logging import logger
from cks_toolkit.core.tracing import get_tracer
from cks_toolkit.models.growth import GridSpec, GrowthFunction, Status
from cks_toolkit.models.legendre import BoundsReport, IdentityCheck, IdentityReport, LegendreTable
from cks_toolkit.models.numerics import LogValue, Mode, SeriesResult
from cks_toolkit.services.growth import check_class
from cks_toolkit.services.numerics import log_slack, logsumexp_series, optimize_scalar, tail_start

tracer = get_tracer()

# reconstruct_at searches log t on [_LOG_T_FLOOR, log T]; below the floor t*log r is negligible
_LOG_T_FLOOR = -40.0
_T_CAP_GROWTH = 16.0


def _x_range(u: GrowthFunction) -> Tuple[float, float]:
    return settings.bracket_min_x, min(settings.bracket_max_x, u.log_domain_max)


def _sampled_increasing(u: GrowthFunction) -> bool:
    grid = GridSpec(include_zero=True)
    r = grid.values()
    g = u.log_u_many(r[r <= u.domain_max])
    return bool(np.all(np.diff(g) >= -settings.compare_slack * np.maximum(1.0, np.abs(g[:-1]))))


def _infimum(u: GrowthFunction, tol: Optional[float] = None) -> Tuple[float, float]:
    """(log inf u, r attaining it); r = 0 for increasing u."""
    if u.increasing or _sampled_increasing(u):
        return u.log_u(0.0), 0.0
    grid = GridSpec(include_zero=True)
    r = grid.values()
    r = r[r <= u.domain_max]
    g = u.log_u_many(r)
    idx = int(np.argmin(g))
    best, best_r = float(g[idx]), float(r[idx])
    if r[idx] > 0:
        lo, hi = _x_range(u)
        try:
            res = optimize_scalar(
                lambda x: u.log_u(math.exp(x)), seed=math.log(r[idx]), tol=tol, lo=lo, hi=hi,
                step=math.log(2.0),
            )
            if res.value_opt < best:
                best, best_r = res.value_opt, math.exp(res.arg_opt)
        except NoBracket:
            logger.debug(f"infimum of {u.descriptor} kept at grid point r={best_r:.4g}")
    return best, best_r


def _legendre_point(
    u: GrowthFunction, t: float, seed_x: Optional[float] = None, tol: Optional[float] = None
) -> Tuple[float, float]:
    """(log l_u(t), minimizing r)."""
    if t < 0 or math.isnan(t):
        raise BadParam(f"Legendre transform needs t >= 0, got {t}")
    if t == 0:
        return _infimum(u, tol)
    lo, hi = _x_range(u)
    seed = 0.0 if seed_x is None else seed_x
    try:
        res = optimize_scalar(lambda x: u.log_u(math.exp(x)) - t * x, Mode.MIN, seed=seed, tol=tol, lo=lo, hi=hi)
    except NoBracket as exc:
        if exc.side == "left":
            # objective still falling as r -> 0+, the infimum is the boundary value
            return u.log_u(0.0), 0.0
        raise NoBracket(
            f"inf u(r)/r^t not attained for {u.descriptor} at t={t:g} (u does not dominate r^t)",
            side=exc.side, edge=exc.edge,
        ) from exc
    return res.value_opt, math.exp(res.arg_opt)


def legendre_at(u: GrowthFunction, t: float, tol: Optional[float] = None) -> LogValue:
    """
    log l_u(t) = min over x of log u(e^x) - t x.

    Args:
        u: growth function
        t: nonnegative order, need not be an integer
        tol: optimizer abscissa tolerance override

    Raises:
        BadParam: t < 0
        NoBracket: the infimum is not attained inside the representable range
    """
    logv, _ = _legendre_point(u, t, tol=tol)
    return LogValue(logv=logv)


def legendre_table(u: GrowthFunction, N: int, tol: Optional[float] = None) -> LegendreTable:
    """
    Tabulate log l_u(n) for n = 0..N.

    Each optimization is seeded at the previous minimizer; for increasing u the
    minimizers are nondecreasing in n.

    Raises:
        BadParam: N < 2
        AbortAt: evaluation failed at some n; ``partial`` holds the table up to n-1
    """
    if N < 2:
        raise BadParam(f"Legendre tables need N >= 2, got {N}")

    with tracer.start_as_current_span("legendre.table") as span:
        span.set_attribute("growth.subject", u.descriptor)
        span.set_attribute("table.N", N)

        certified = "log_exp_convex" in u.claimed_classes
        if not certified:
            try:
                certified = check_class(u, "log_exp_convex").status == Status.PASS
            except CksError as e:
                logger.debug(f"convexity evidence unavailable for {u.descriptor}: {e}")

        log_ell: List[float] = []
        argmin: List[float] = []
        seed_x = 0.0
        for n in range(N + 1):
            try:
                logv, r_opt = _legendre_point(u, float(n), seed_x=seed_x, tol=tol)
            except CksError as e:
                partial = None
                if len(log_ell) >= 1:
                    partial = LegendreTable(
                        source=u, n_max=len(log_ell) - 1, log_ell=log_ell, argmin=argmin,
                        certified_convex=certified,
                    )
                logger.warning(f"Legendre table for {u.descriptor} truncated at n={n}: {e}")
                span.set_attribute("table.aborted_at", n)
                raise AbortAt(n, partial, e) from e
            log_ell.append(logv)
            argmin.append(r_opt)
            if r_opt > 0:
                seed_x = math.log(r_opt)

        if not certified:
            logger.warning(f"{u.descriptor} lacks (log, exp)-convexity evidence; table is not certified")
        logger.info(f"Built Legendre table for {u.descriptor} up to N={N}")
        return LegendreTable(source=u, n_max=N, log_ell=log_ell, argmin=argmin, certified_convex=certified)


def dual_legendre_at(u: GrowthFunction, r: float, tol: Optional[float] = None) -> LogValue:
    """
    log u*(r) = max over s >= 0 of 2 sqrt(r s) - log u(s).

    The boundary s = 0 is compared against the interior maximum.

    Raises:
        BadParam: r < 0
        NoBracket: the supremum lies beyond the representable range
    """
    if r < 0 or math.isnan(r):
        raise BadParam(f"dual Legendre transform needs r >= 0, got {r}")
    if r == 0:
        return LogValue(logv=-_infimum(u, tol)[0])

    lo, hi = _x_range(u)
    boundary = -u.log_u(0.0)

    def objective(y: float) -> float:
        return 2.0 * math.sqrt(r * math.exp(y)) - u.log_u(math.exp(y))

    seed = min(max(math.log(r), lo + 1.0), hi - 1.0)
    try:
        res = optimize_scalar(objective, Mode.MAX, seed=seed, tol=tol, lo=lo, hi=hi)
        best = max(res.value_opt, boundary)
    except NoBracket as exc:
        if exc.side == "right":
            raise NoBracket(
                f"sup of the dual transform of {u.descriptor} not enclosed at r={r:g}",
                side=exc.side, edge=exc.edge,
            ) from exc
        best = max(boundary, objective(lo))
    return LogValue(logv=best)


def dual_function(u: GrowthFunction, prefer_closed_form: bool = True, tol: Optional[float] = None) -> GrowthFunction:
    """u* as a GrowthFunction; the catalog closed form is used when available and preferred."""
    classes = {"log_x2_convex", "log_exp_convex", "C_plus_log", "C_plus_half"}
    if "U0" in u.claimed_classes:
        classes |= {"U0", "U1"}
    name = f"dual[{u.descriptor}]"

    if prefer_closed_form and u.dual_log_eval is not None:
        return GrowthFunction(
            name=name,
            log_eval=u.dual_log_eval,
            dual_log_eval=u.log_eval,
            claimed_classes=frozenset(classes),
            increasing=True,
        )

    @functools.lru_cache(maxsize=4096)
    def numeric(r: float) -> float:
        return dual_legendre_at(u, r, tol=tol).logv

    return GrowthFunction(
        name=name,
        log_eval=numeric,
        claimed_classes=frozenset(classes),
        increasing=True,
        vectorized=False,
    )


def _require_decay(profile: np.ndarray, N: int, what: str) -> None:
    window = profile[tail_start(N):]
    if len(window) < 2:
        return
    slack = settings.compare_slack * np.maximum(1.0, np.abs(window[:-1]))
    if not (np.all(np.diff(window) <= slack) and window[-1] < window[0]):
        raise DivergentProfile(f"{what} shows no decay over n={tail_start(N)}..{N}")


def _table_series(log_coeff: np.ndarray, r: float, tol: Optional[float]) -> SeriesResult:
    if r < 0 or math.isnan(r):
        raise BadParam(f"series argument must be >= 0, got {r}")
    log_r = math.log(r) if r > 0 else -math.inf

    def term_at(n: int) -> float:
        if n == 0:
            return float(log_coeff[0])
        return float(log_coeff[n]) + n * log_r

    return logsumexp_series(term_at, tol=tol, max_terms=len(log_coeff))


def l_function_at(table: LegendreTable, r: float, tol: Optional[float] = None) -> SeriesResult:
    """
    L_u(r) = sum l_u(n) r^n over the table.

    Raises:
        DivergentProfile: log l_u(n)/n does not decay over the last third of the table
        NonDecreasingTail: terms still growing at n = N
    """
    log_ell = np.asarray(table.log_ell, dtype=float)
    n = np.arange(len(log_ell))
    _require_decay(log_ell[1:] / n[1:], table.N - 1, "l_u(n)^(1/n)")
    return _table_series(log_ell, r, tol)


def l_sharp_at(table: LegendreTable, r: float, tol: Optional[float] = None) -> SeriesResult:
    """L#_u(r) = sum r^n / (l_u(n) n!^2) over the table."""
    log_ell = np.asarray(table.log_ell, dtype=float)
    n = np.arange(len(log_ell))
    coeff = -log_ell - 2.0 * gammaln(n + 1.0)
    _require_decay(coeff[1:] / n[1:], table.N - 1, "(l_u(n) n!^2)^(-1/n)")
    return _table_series(coeff, r, tol)


def _series_function(name: str, table: LegendreTable, series: Callable[[LegendreTable, float], SeriesResult]) -> GrowthFunction:
    @functools.lru_cache(maxsize=4096)
    def log_eval(r: float) -> float:
        result = series(table, r)
        if not result.converged:
            raise EvalFailure(f"{name} series for {table.source.descriptor} did not converge at r={r:g}")
        return result.log_sum

    return GrowthFunction(
        name=f"{name}[{table.source.descriptor}]",
        log_eval=log_eval,
        increasing=True,
        vectorized=False,
    )


def l_function(table: LegendreTable) -> GrowthFunction:
    """L_u materialized as a growth function over the table."""
    return _series_function("L", table, l_function_at)


def l_sharp_function(table: LegendreTable) -> GrowthFunction:
    """L#_u materialized as a growth function over the table."""
    return _series_function("Lsharp", table, l_sharp_at)


def reconstruct_at(table: LegendreTable, r: float, tol: Optional[float] = None) -> LogValue:
    """
    log u(r) recovered as sup over t >= 0 of log l_u(t) + t log r.

    The search runs over log t, calling the transform at non-integer t on demand.
    For a table that is not certified (log, exp)-convex the result is only a
    lower bound for log u(r).

    Raises:
        NoBracket: the maximizing t sits beyond ``settings.reconstruct_t_limit``
    """
    if r < 0 or math.isnan(r):
        raise BadParam(f"reconstruction needs r >= 0, got {r}")
    if r == 0:
        return LogValue(logv=table.log_ell[0])

    u = table.source
    log_r = math.log(r)
    nodes = np.asarray(table.log_ell) + np.arange(table.N + 1) * log_r
    n0 = int(np.argmax(nodes))
    seeds = {"x": math.log(table.argmin[n0]) if table.argmin[n0] > 0 else 0.0}

    def phi(tau: float) -> float:
        t = math.exp(tau)
        logv, r_opt = _legendre_point(u, t, seed_x=seeds["x"], tol=tol)
        if r_opt > 0:
            seeds["x"] = math.log(r_opt)
        return logv + t * log_r

    # the t range widens until the maximizing t is interior
    t_cap = max(settings.reconstruct_t_max, float(table.N))
    seed = math.log(n0) if n0 > 0 else math.log(0.5)
    while True:
        try:
            res = optimize_scalar(
                phi, Mode.MAX, seed=seed, tol=tol, lo=_LOG_T_FLOOR, hi=math.log(t_cap), step=0.5,
            )
            best = max(res.value_opt, table.log_ell[0])
            break
        except NoBracket as exc:
            if exc.side != "right":
                best = table.log_ell[0]
                break
            if t_cap >= settings.reconstruct_t_limit:
                raise NoBracket(
                    f"sup over t not enclosed for {u.descriptor} at r={r:g} (beyond t={t_cap:g})",
                    side=exc.side, edge=exc.edge,
                ) from exc
            seed = math.log(t_cap)
            t_cap = min(t_cap * _T_CAP_GROWTH, settings.reconstruct_t_limit)
            logger.debug(f"Reconstruction of {u.descriptor} at r={r:g}: t range widened to {t_cap:g}")
    return LogValue(logv=best)


def _pairs(N: int) -> Tuple[np.ndarray, np.ndarray]:
    n, m = np.meshgrid(np.arange(N + 1), np.arange(N + 1), indexing="ij")
    keep = (n + m <= N) & (n <= m)
    return n[keep], m[keep]


def _xlogx(n: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    return np.where(n > 0, n * np.log(np.where(n > 0, n, 1.0)), 0.0)


def _inequality_check(name: str, excess: np.ndarray, scale: np.ndarray, witnesses) -> IdentityCheck:
    allowed = settings.compare_slack * np.maximum(1.0, scale)
    worst = float(np.max(excess)) if excess.size else 0.0
    bad = np.nonzero(excess > allowed)[0]
    if bad.size:
        i = int(bad[0])
        return IdentityCheck(name=name, status=Status.FAIL, worst_margin=worst, witness=witnesses(i))
    return IdentityCheck(name=name, status=Status.PASS, worst_margin=worst)


def _skipped(name: str, why: str) -> IdentityCheck:
    return IdentityCheck(name=name, status=Status.SKIPPED, note=why)


def verify_legendre_identities(
    u: GrowthFunction,
    N: int,
    k: float = 2.0,
    tol: float = 1e-6,
    prefer_closed_form: bool = False,
) -> IdentityReport:
    """
    Check the table-level identities of the Legendre transform.

    Checks, in order: log-concavity of l_u, the submultiplicative bound
    l(0) l(n+m) <= l(n) l(m), log-convexity of l(n) n^(kn), the bound
    l(n) l(m) <= l(0) 2^(k(n+m)) l(n+m), and the dual identity
    l_{u*}(n) = e^(2n) / (l_u(n) n^(2n)) against a transform of u*.
    Checks whose hypotheses u fails are SKIPPED.
    """
    if N < 4:
        raise BadParam(f"identity checks need N >= 4, got {N}")
    if not k > 0:
        raise BadParam(f"k must be positive, got {k}")

    with tracer.start_as_current_span("legendre.verify_identities") as span:
        span.set_attribute("growth.subject", u.descriptor)
        span.set_attribute("table.N", N)

        table = legendre_table(u, N)
        L = np.asarray(table.log_ell, dtype=float)
        idx = np.arange(N + 1)
        checks: List[IdentityCheck] = []

        i = idx[:-2]
        checks.append(_inequality_check(
            "log_concavity",
            L[i] + L[i + 2] - 2.0 * L[i + 1],
            np.maximum(np.abs(L[i]), np.abs(L[i + 2])),
            lambda j: (float(i[j]), float(i[j] + 2)),
        ))

        n, m = _pairs(N)
        checks.append(_inequality_check(
            "submultiplicative",
            L[0] + L[n + m] - L[n] - L[m],
            np.maximum(np.abs(L[n + m]), np.abs(L[n]) + np.abs(L[m])),
            lambda j: (float(n[j]), float(m[j])),
        ))

        xk_tag = f"log_x{k:g}_convex"
        xk_ok = xk_tag in u.claimed_classes or check_class(u, xk_tag).status == Status.PASS
        if xk_ok:
            s = L + k * _xlogx(idx)
            checks.append(_inequality_check(
                "xk_log_convexity",
                2.0 * s[i + 1] - s[i] - s[i + 2],
                np.abs(s[i + 1]),
                lambda j: (float(i[j]), float(i[j] + 2)),
            ))
            checks.append(_inequality_check(
                "xk_supermultiplicative",
                L[n] + L[m] - (L[0] + k * (n + m) * math.log(2.0) + L[n + m]),
                np.maximum(np.abs(L[n]) + np.abs(L[m]), np.abs(L[n + m])),
                lambda j: (float(n[j]), float(m[j])),
            ))
        else:
            checks.append(_skipped("xk_log_convexity", f"{u.descriptor} has no {xk_tag} evidence"))
            checks.append(_skipped("xk_supermultiplicative", f"{u.descriptor} has no {xk_tag} evidence"))

        x2_ok = "log_x2_convex" in u.claimed_classes or check_class(u, "log_x2_convex").status == Status.PASS
        half_ok = "C_plus_half" in u.claimed_classes or check_class(u, "C_plus_half").status != Status.FAIL
        if x2_ok and half_ok:
            dual_table = legendre_table(dual_function(u, prefer_closed_form=prefer_closed_form), N)
            expected = 2.0 * idx - L - 2.0 * _xlogx(idx)
            residual = np.abs(np.asarray(dual_table.log_ell) - expected)
            worst_n = int(np.argmax(residual))
            worst = float(residual[worst_n])
            status = Status.PASS if worst <= tol else Status.FAIL
            checks.append(IdentityCheck(
                name="dual_identity", status=status, worst_margin=worst,
                witness=(float(worst_n), worst) if status == Status.FAIL else None,
            ))
        else:
            checks.append(_skipped("dual_identity", f"{u.descriptor} lacks (log, x^2)-convexity or C_plus_half evidence"))

        report = IdentityReport(subject=u.descriptor, N=N, k=k, checks=checks)
        logger.info(
            f"Legendre identities for {u.descriptor}: "
            + ", ".join(f"{c.name}={c.status.value}" for c in checks)
        )
        return report


def verify_lfunction_bounds(
    u: GrowthFunction,
    a: float = math.e,
    k: float = 2.0,
    grid: Optional[GridSpec] = None,
    N: Optional[int] = None,
) -> BoundsReport:
    """
    Upper bound L_u(r) <= (e a / log a) u(a r) and the reverse bound
    u(r) <= C L_u(2^k r) on a grid.

    The reverse bound reports its constant estimate; it is INCONCLUSIVE when the
    series could not be summed at some grid point.
    """
    if not a > 1:
        raise BadParam(f"a must exceed 1, got {a}")
    if not k > 0:
        raise BadParam(f"k must be positive, got {k}")
    grid = grid or GridSpec(r_min=1e-3, r_max=10.0, points=25, include_zero=True)
    table = legendre_table(u, N or settings.default_table_depth)
    r_values = [float(r) for r in grid.values()]
    checks: List[IdentityCheck] = []
    estimate: Optional[float] = None

    convex_ok = "log_exp_convex" in u.claimed_classes or check_class(u, "log_exp_convex").status == Status.PASS
    if convex_ok:
        log_const = math.log(math.e * a / math.log(a))
        worst, witness = -math.inf, None
        for r in r_values:
            lhs = l_function_at(table, r)
            rhs = log_const + u.log_u(a * r)
            excess = lhs.log_sum - rhs
            if excess > worst:
                worst = excess
            if excess > log_slack(lhs.log_sum, rhs) and witness is None:
                witness = (r, excess)
        checks.append(IdentityCheck(
            name="upper_bound",
            status=Status.FAIL if witness else Status.PASS,
            worst_margin=worst,
            witness=witness,
        ))
    else:
        checks.append(_skipped("upper_bound", f"{u.descriptor} has no (log, exp)-convexity evidence"))

    xk_tag = f"log_x{k:g}_convex"
    increasing = u.increasing or check_class(u, "U1").status == Status.PASS
    xk_ok = xk_tag in u.claimed_classes or check_class(u, xk_tag).status == Status.PASS
    if increasing and xk_ok:
        ratios, failures = [], 0
        for r in r_values:
            try:
                series = l_function_at(table, (2.0 ** k) * r)
            except NonDecreasingTail:
                failures += 1
                continue
            if not series.converged:
                failures += 1
                continue
            ratios.append(u.log_u(r) - series.log_sum)
        if ratios:
            estimate = math.exp(max(ratios))
        if failures or not ratios:
            logger.warning(f"reverse bound for {u.descriptor}: {failures} grid points beyond the table's safe range")
            checks.append(IdentityCheck(
                name="reverse_bound", status=Status.INCONCLUSIVE,
                worst_margin=max(ratios) if ratios else 0.0,
                note=f"{failures} of {len(r_values)} series did not converge",
            ))
        else:
            checks.append(IdentityCheck(name="reverse_bound", status=Status.PASS, worst_margin=max(ratios)))
    else:
        checks.append(_skipped("reverse_bound", f"{u.descriptor} lacks monotonicity or {xk_tag} evidence"))

    return BoundsReport(subject=u.descriptor, a=a, k=k, grid=grid, checks=checks, constant_estimate=estimate)
