"""Growth function catalog and sampled class evidence."""
import math
import re
from typing import Dict, List, Optional

import numpy as np

from cks_toolkit.core.config import settings
from cks_toolkit.core.exceptions import BadParam, NoBracket, OverflowDomain
from cks_toolkit.core.logging import logger
from cks_toolkit.models.growth import ClassEvidence, GridSpec, GrowthFunction, Status
from cks_toolkit.models.schemas import FunctionSpec
from cks_toolkit.services.expression import parse_growth
from cks_toolkit.services.numerics import log_slack, optimize_scalar

# log of the largest exp_k argument kept representable, with headroom for t*x terms
_EXP_HEADROOM = 700.0

ALL_CONVEX = frozenset({"log_exp_convex", "log_x1_convex", "log_x2_convex"})
LIMIT_CLASSES = frozenset({"C_plus_log", "C_plus_half"})
U_CONDITIONS = ("U0", "U1", "U2", "U3")

CATALOG: Dict[str, Dict[str, object]] = {
    "ks": {
        "params": ["beta"],
        "formula": "exp[(1+beta) r^(1/(1+beta))], 0 <= beta < 1",
    },
    "ks_dual": {
        "params": ["beta"],
        "formula": "exp[(1-beta) r^(1/(1-beta))], 0 <= beta < 1",
    },
    "exp_k": {
        "params": ["k"],
        "formula": "k-fold iterated exponential exp(exp(...exp(r))), integer k >= 1",
    },
    "bell_dual": {
        "params": ["k"],
        "formula": "exp[2 sqrt(r log_{k-1} sqrt(r))], log_1(r) = log(max(r, e)), integer k >= 2",
    },
    "exp_scaled": {
        "params": ["a"],
        "formula": "exp(a r), a > 0",
    },
    "custom": {
        "params": ["expr"],
        "formula": "user expression in r (exp, log, sqrt, ^, *, /, +, -)",
    },
}

_ALIASES = {"expk": "exp_k", "kondratiev_streit": "ks"}


def _iterated_exp(r, times: int):
    x = np.asarray(r, dtype=float)
    with np.errstate(over="ignore"):
        for _ in range(times):
            x = np.exp(x)
    if np.any(np.isinf(x)):
        raise OverflowDomain(f"exp_{times + 1} overflows on the requested abscissas")
    return x if x.ndim else float(x)


def _guarded_log(x, times: int):
    y = np.asarray(x, dtype=float)
    for _ in range(times):
        y = np.log(np.maximum(y, math.e))
    return y


def _integer_param(params: Dict[str, float], key: str, minimum: int) -> int:
    if key not in params:
        raise BadParam(f"missing parameter '{key}'")
    value = params[key]
    if float(value) != int(value) or int(value) < minimum:
        raise BadParam(f"'{key}' must be an integer >= {minimum}, got {value}")
    return int(value)


def _beta_param(params: Dict[str, float]) -> float:
    beta = float(params.get("beta", 0.0))
    if not 0.0 <= beta < 1.0:
        raise BadParam(f"beta must lie in [0, 1), got {beta}")
    return beta


def make_catalog(name: str, params: Optional[Dict[str, float]] = None) -> GrowthFunction:
    """
    Build a catalog growth function with a stable closed form for log u.

    Args:
        name: one of ks, ks_dual, exp_k, bell_dual, exp_scaled, custom
        params: beta / k / a, or expr for custom

    Raises:
        BadParam: unknown name or parameter out of range
    """
    params = dict(params or {})
    key = _ALIASES.get(name, name)

    if key == "ks":
        beta = _beta_param(params)
        p = 1.0 + beta
        q = 1.0 - beta
        classes = {"C_plus_log", "C_plus_half", "log_exp_convex", "log_x2_convex", *U_CONDITIONS}
        if beta == 0.0:
            classes.add("log_x1_convex")
        return GrowthFunction(
            name="ks",
            params={"beta": beta},
            log_eval=lambda r: p * np.power(r, 1.0 / p),
            dual_log_eval=lambda r: q * np.power(r, 1.0 / q),
            claimed_classes=frozenset(classes),
            increasing=True,
        )

    if key == "ks_dual":
        beta = _beta_param(params)
        p = 1.0 + beta
        q = 1.0 - beta
        return GrowthFunction(
            name="ks_dual",
            params={"beta": beta},
            log_eval=lambda r: q * np.power(r, 1.0 / q),
            dual_log_eval=lambda r: p * np.power(r, 1.0 / p),
            claimed_classes=frozenset({"C_plus_log", "C_plus_half", "U0", "U1", "U3"} | ALL_CONVEX),
            increasing=True,
            domain_max=math.exp(690.0 * q),
        )

    if key == "exp_k":
        k = _integer_param(params, "k", 1)
        domain = math.inf
        if k >= 2:
            domain = _EXP_HEADROOM
            for _ in range(k - 2):
                domain = math.log(domain) if domain > 0 else -math.inf
            if not domain > 0:
                raise BadParam(f"exp_{k} is not representable on any neighbourhood of 0")
        classes = {"C_plus_log", "C_plus_half", "U3"} | ALL_CONVEX
        if k == 1:
            classes |= {"U0", "U1", "U2"}
        return GrowthFunction(
            name="exp_k",
            params={"k": float(k)},
            log_eval=lambda r: _iterated_exp(r, k - 1),
            claimed_classes=frozenset(classes),
            increasing=True,
            domain_max=domain,
        )

    if key == "bell_dual":
        k = _integer_param(params, "k", 2)
        return GrowthFunction(
            name="bell_dual",
            params={"k": float(k)},
            log_eval=lambda r: 2.0 * np.sqrt(r * _guarded_log(np.sqrt(r), k - 1)),
            claimed_classes=frozenset(
                {"C_plus_log", "C_plus_half", "log_exp_convex", "log_x2_convex", *U_CONDITIONS}
            ),
            increasing=True,
        )

    if key == "exp_scaled":
        a = float(params.get("a", 1.0))
        if not a > 0:
            raise BadParam(f"a must be positive, got {a}")
        return GrowthFunction(
            name="exp_scaled",
            params={"a": a},
            log_eval=lambda r: a * r,
            dual_log_eval=lambda r: r / a,
            claimed_classes=frozenset({"C_plus_log", "C_plus_half", *U_CONDITIONS} | ALL_CONVEX),
            increasing=True,
        )

    if key == "custom":
        expr = params.get("expr")
        if not isinstance(expr, str) or not expr.strip():
            raise BadParam("custom growth functions need a non-empty 'expr'")
        return parse_growth(expr)

    raise BadParam(f"unknown catalog entry '{name}' (known: {', '.join(sorted(CATALOG))})")


def dilate(u: GrowthFunction, c: float) -> GrowthFunction:
    """The growth function r -> u(c r)."""
    if not c > 0:
        raise BadParam(f"dilation factor must be positive, got {c}")
    if c == 1.0:
        return u
    base_eval = u.log_eval
    base_dual = u.dual_log_eval
    params = dict(u.params)
    params["dilation"] = c * params.get("dilation", 1.0)
    return GrowthFunction(
        name=u.name,
        params=params,
        log_eval=lambda r: base_eval(c * r),
        dual_log_eval=(lambda r: base_dual(r / c)) if base_dual is not None else None,
        claimed_classes=u.claimed_classes,
        increasing=u.increasing,
        domain_max=u.domain_max / c,
        vectorized=u.vectorized,
        expression=u.expression,
    )


def _sample_grid(u: GrowthFunction, grid: GridSpec) -> np.ndarray:
    r = grid.values()
    return r[r <= u.domain_max]


def _xk_exponent(cls: str) -> Optional[float]:
    match = re.fullmatch(r"log_x(\d+(?:\.\d+)?)_convex", cls)
    if match is None:
        return None
    k = float(match.group(1))
    if not k > 0:
        raise BadParam(f"convexity exponent must be positive in '{cls}'")
    return k


def _midpoint_convexity(u: GrowthFunction, cls: str, grid: GridSpec, r: np.ndarray, to_x, from_x) -> ClassEvidence:
    x = to_x(r)
    g = u.log_u_many(r)
    i, j = np.triu_indices(len(r), k=1)
    r_mid = from_x((x[i] + x[j]) / 2.0)
    g_mid = u.log_u_many(r_mid)
    average = (g[i] + g[j]) / 2.0
    excess = g_mid - average
    scale = np.maximum.reduce([np.ones_like(excess), np.abs(g[i]), np.abs(g[j]), np.abs(g_mid)])
    allowed = settings.compare_slack * scale
    violated = excess > allowed
    margin = float(np.max(excess)) if excess.size else 0.0
    if np.any(violated):
        worst = int(np.argmax(np.where(violated, excess / scale, -np.inf)))
        witness = (float(r[i[worst]]), float(r[j[worst]]), float(excess[worst]))
        logger.debug(f"{cls} violated for {u.descriptor} at r={witness[0]:.4g}, {witness[1]:.4g}")
        return ClassEvidence(cls=cls, status=Status.FAIL, witness=witness, margin=margin, grid=grid)
    return ClassEvidence(cls=cls, status=Status.PASS, margin=margin, grid=grid)


def _limit_ratio(u: GrowthFunction, cls: str, grid: GridSpec, r: np.ndarray) -> ClassEvidence:
    if cls == "C_plus_log":
        r = r[r > 1.0]
        denominator = np.log(r)
    else:
        r = r[r > 0.0]
        denominator = np.sqrt(r)
    window = settings.edge_window
    if len(r) < window:
        return ClassEvidence(
            cls=cls, status=Status.INCONCLUSIVE, grid=grid,
            note=f"only {len(r)} usable grid points, need {window}",
        )
    ratio = u.log_u_many(r) / denominator
    tail = ratio[-window:]
    final = float(tail[-1])
    if np.all(np.diff(tail) > 0) and final > settings.limit_ratio_threshold:
        return ClassEvidence(cls=cls, status=Status.PASS, margin=final, grid=grid)
    return ClassEvidence(
        cls=cls, status=Status.INCONCLUSIVE, margin=final, grid=grid,
        note=f"ratio trend not decisive (final {final:.4g}, threshold {settings.limit_ratio_threshold:g})",
    )


def check_class(u: GrowthFunction, cls: str, grid: Optional[GridSpec] = None) -> ClassEvidence:
    """
    Sample-based evidence that u belongs to a growth class.

    Convexity classes use a midpoint test on every grid pair in the class's
    coordinate; limit classes inspect the trend of the defining ratio over the
    outermost grid points. PASS means no violation found and trend consistent.

    Raises:
        EvalFailure: log u not finite on the grid
        BadParam: unknown class tag
    """
    grid = grid or GridSpec()
    if cls in U_CONDITIONS:
        return {e.cls: e for e in check_u_conditions(u, grid)}[cls]

    r = _sample_grid(u, grid)
    if cls in LIMIT_CLASSES:
        return _limit_ratio(u, cls, grid, r)

    r = r[r > 0.0]
    if len(r) < 3:
        return ClassEvidence(cls=cls, status=Status.INCONCLUSIVE, grid=grid, note="grid outside the domain of u")
    if cls == "log_exp_convex":
        return _midpoint_convexity(u, cls, grid, r, np.log, np.exp)
    k = _xk_exponent(cls)
    if k is not None:
        return _midpoint_convexity(
            u, cls, grid, r,
            lambda v: np.power(v, 1.0 / k),
            lambda v: np.power(v, k),
        )
    raise BadParam(f"unknown growth class '{cls}'")


def _check_u0(u: GrowthFunction, grid: GridSpec, r: np.ndarray, g: np.ndarray) -> ClassEvidence:
    idx = int(np.argmin(g))
    best_r, best = float(r[idx]), float(g[idx])
    if 0 < idx < len(r) - 1 and r[idx] > 0:
        try:
            polished = optimize_scalar(
                lambda x: u.log_u(math.exp(x)),
                seed=math.log(r[idx]),
                lo=math.log(r[1]) if r[0] == 0 else math.log(r[0]),
                hi=math.log(r[-1]),
                step=math.log(2.0),
            )
            if polished.value_opt < best:
                best_r, best = math.exp(polished.arg_opt), polished.value_opt
        except NoBracket:
            pass
    if abs(best) <= settings.compare_slack:
        return ClassEvidence(cls="U0", status=Status.PASS, margin=best, grid=grid)
    return ClassEvidence(cls="U0", status=Status.FAIL, witness=(best_r, best, 0.0), margin=best, grid=grid)


def _check_u1(grid: GridSpec, r: np.ndarray, g: np.ndarray) -> ClassEvidence:
    if abs(g[0]) > settings.compare_slack:
        return ClassEvidence(cls="U1", status=Status.FAIL, witness=(0.0, float(g[0]), 0.0), margin=float(g[0]), grid=grid)
    drops = g[:-1] - g[1:]
    allowed = settings.compare_slack * np.maximum(1.0, np.abs(g[:-1]))
    bad = np.nonzero(drops > allowed)[0]
    margin = float(np.max(drops)) if drops.size else 0.0
    if bad.size:
        n = int(bad[0])
        return ClassEvidence(
            cls="U1", status=Status.FAIL, witness=(float(r[n]), float(r[n + 1]), float(drops[n])),
            margin=margin, grid=grid,
        )
    return ClassEvidence(cls="U1", status=Status.PASS, margin=margin, grid=grid)


def _check_u2(u: GrowthFunction) -> ClassEvidence:
    r = 2.0 ** np.arange(0, 41)
    r = r[r <= u.domain_max]
    if len(r) < 2:
        return ClassEvidence(cls="U2", status=Status.INCONCLUSIVE, note="fewer than 2 samples in the domain of u")
    ratio = u.log_u_many(r) / r
    window = min(settings.edge_window, len(r))
    tail = ratio[-window:]
    first, last = float(tail[0]), float(tail[-1])
    if first > 0 and last > 2.0 * first:
        return ClassEvidence(
            cls="U2", status=Status.FAIL, witness=(float(r[-window]), float(r[-1]), last / first), margin=last,
        )
    non_increasing = np.all(np.diff(tail) <= settings.compare_slack * np.maximum(1.0, np.abs(tail[:-1])))
    if non_increasing or float(np.max(ratio)) <= settings.u2_ratio_cap:
        return ClassEvidence(cls="U2", status=Status.PASS, margin=last)
    return ClassEvidence(cls="U2", status=Status.INCONCLUSIVE, margin=last, note="log u(r)/r neither settled nor exploding")


def check_u_conditions(u: GrowthFunction, grid: Optional[GridSpec] = None) -> List[ClassEvidence]:
    """Evidence for U0 (inf u = 1), U1 (increasing, u(0)=1), U2 (log u(r)/r bounded), U3 ((log, x^2)-convex)."""
    grid = grid or GridSpec()
    r = np.concatenate(([0.0], _sample_grid(u, grid)))
    r = np.unique(r)
    g = u.log_u_many(r)
    evidence = [
        _check_u0(u, grid, r, g),
        _check_u1(grid, r, g),
        _check_u2(u),
        check_class(u, "log_x2_convex", grid),
    ]
    evidence[3] = evidence[3].model_copy(update={"cls": "U3"})
    logger.debug(
        f"U-conditions for {u.descriptor}: " + ", ".join(f"{e.cls}={e.status.value}" for e in evidence)
    )
    return evidence


def from_spec(spec: FunctionSpec) -> GrowthFunction:
    """Growth function named by a request or run configuration."""
    if spec.expr is not None:
        return parse_growth(spec.expr)
    return make_catalog(spec.name, spec.params())
