"""Command-line front end: transforms, tables, condition reports and certificates."""
import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from pydantic import ValidationError

from cks_toolkit.core.config import settings
from cks_toolkit.core.exceptions import CksError
from cks_toolkit.core.logging import logger, setup_logging
from cks_toolkit.core.tracing import get_tracer, setup_tracing, shutdown_tracing
from cks_toolkit.infra.files import (
    atomic_write_text,
    conditions_csv,
    dumps_json,
    read_sequence_csv,
    report_payload,
    sequence_csv,
    table_csv,
)
from cks_toolkit.models.growth import GrowthFunction, Status
from cks_toolkit.models.schemas import RunConfig
from cks_toolkit.services.equivalence import find_equivalence, verify_examples, verify_thm27
from cks_toolkit.services.expression import parse_growth
from cks_toolkit.services.growth import CATALOG, from_spec
from cks_toolkit.services.legendre import (
    dual_legendre_at,
    l_function,
    l_function_at,
    l_sharp_at,
    legendre_at,
    legendre_table,
)
from cks_toolkit.services.report_service import full_report
from cks_toolkit.services.sequences import alpha_from_growth

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

tracer = get_tracer()

COMMANDS = ("catalog", "legendre", "dual", "alpha", "lfun", "lsharp", "check", "equiv", "examples")

# (payload, one-line summary, csv text or None, verdict-level failure)
Outcome = Tuple[Dict[str, Any], str, Optional[str], bool]


class UsageError(Exception):
    """Bad flag combination detected after parsing."""


def _shared_flags() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--function", help="catalog name (ks, ks_dual, exp_k, bell_dual, exp_scaled, custom)")
    shared.add_argument("--expr", help="custom growth expression in r")
    shared.add_argument("--beta", type=float)
    shared.add_argument("--k", type=float)
    shared.add_argument("--a", type=float)
    shared.add_argument("--N", type=int, help="table depth")
    shared.add_argument("--t", type=float, help="Legendre order")
    shared.add_argument("--r", type=float, help="evaluation point")
    shared.add_argument("--rmin", type=float)
    shared.add_argument("--rmax", type=float)
    shared.add_argument("--points", type=int)
    shared.add_argument("--tol", type=float)
    shared.add_argument("--format", choices=["json", "csv"])
    shared.add_argument("--out", help="write the payload atomically to this file")
    shared.add_argument("--strict", action="store_true", default=None, help="exit 1 on any FAIL verdict")
    shared.add_argument("--config", help="JSON file with defaults; flags override it")
    shared.add_argument("--sequence", help="CSV file with columns n,log_value")
    shared.add_argument(
        "--certify", action="store_true", default=None,
        help="attach the u*, L_{u*}, L#_u certificates to a growth-function report",
    )
    shared.add_argument("--against", choices=["thm27", "L"])
    shared.add_argument("--other-expr", dest="other_expr", help="second growth function for equiv")
    shared.add_argument("--family", choices=["KS", "BELL"])
    shared.add_argument("--log-level", dest="log_level", default=None)
    return shared


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cks-toolkit", description=f"{settings.app_name} {settings.app_version}")
    sub = parser.add_subparsers(dest="command", required=True)
    shared = _shared_flags()
    helps = {
        "catalog": "List catalog growth functions",
        "legendre": "Legendre transform at --t, or a table up to --N",
        "dual": "Dual Legendre transform at --r",
        "alpha": "Weight sequence alpha(n) up to --N",
        "lfun": "L-function at --r from a table of depth --N",
        "lsharp": "L#-function at --r from a table of depth --N",
        "check": "Condition report for --function or --sequence",
        "equiv": "Equivalence certificates",
        "examples": "Worked example checks (--family KS --beta / BELL --k)",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[shared], help=helps[name])
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """Merge the --config file with the flags; flags given on the command line win."""
    merged: Dict[str, Any] = {}
    if args.config:
        payload = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(payload, dict):
            raise UsageError("--config must hold a JSON object")
        merged.update(payload)
    for key, value in vars(args).items():
        if key in ("config", "log_level") or value is None:
            continue
        merged[key] = value
    return RunConfig.model_validate(merged)


def _subject(cfg: RunConfig) -> GrowthFunction:
    return from_spec(cfg.function_spec())


def _require(cfg: RunConfig, flag: str) -> Any:
    value = getattr(cfg, flag)
    if value is None:
        raise UsageError(f"{cfg.command} needs --{flag}")
    return value


def _base(u: GrowthFunction) -> Dict[str, Any]:
    return {"subject": u.descriptor, "params": dict(u.params), "toolVersion": settings.app_version}


def _cmd_catalog(cfg: RunConfig) -> Outcome:
    entries = [{"name": name, **meta} for name, meta in sorted(CATALOG.items())]
    return {"catalog": entries, "toolVersion": settings.app_version}, f"{len(entries)} catalog entries", None, False


def _cmd_legendre(cfg: RunConfig) -> Outcome:
    u = _subject(cfg)
    if cfg.t is not None:
        value = legendre_at(u, cfg.t, tol=cfg.tol)
        payload = {**_base(u), "t": cfg.t, "log_ell": value.logv, "ell": value.to_real()}
        return payload, f"l_u({cfg.t:g}) = {value.to_real():.15g} for {u.descriptor}", None, False
    N = _require(cfg, "N")
    table = legendre_table(u, N, tol=cfg.tol)
    payload = {**_base(u), "N": N, "log_ell": table.log_ell, "argmin_r": table.argmin,
               "certifiedConvex": table.certified_convex}
    return payload, f"Legendre table of {u.descriptor} for n=0..{N}", table_csv(table), False


def _cmd_dual(cfg: RunConfig) -> Outcome:
    u = _subject(cfg)
    r = _require(cfg, "r")
    value = dual_legendre_at(u, r, tol=cfg.tol)
    payload = {**_base(u), "r": r, "log_value": value.logv, "value": value.to_real()}
    return payload, f"log u*({r:g}) = {value.logv:.15g} for {u.descriptor}", None, False


def _cmd_alpha(cfg: RunConfig) -> Outcome:
    u = _subject(cfg)
    N = cfg.N or settings.default_table_depth
    alpha = alpha_from_growth(u, N, tol=cfg.tol)
    payload = {**_base(u), "N": N, "log_alpha": alpha.log_alpha}
    return payload, f"alpha(0..{N}) for {u.descriptor}", sequence_csv(alpha), False


def _series_command(cfg: RunConfig, series: Callable, label: str) -> Outcome:
    u = _subject(cfg)
    r = _require(cfg, "r")
    N = cfg.N or settings.default_table_depth
    result = series(legendre_table(u, N), r, tol=cfg.tol)
    payload = {**_base(u), "N": N, "r": r, "log_value": result.log_sum, "value": result.value,
               "termsUsed": result.terms_used, "tailBound": result.tail_bound.logv, "converged": result.converged}
    summary = f"{label}({r:g}) = {result.value:.15g} for {u.descriptor}"
    if not result.converged:
        summary += " (not converged)"
    return payload, summary, None, False


def _cmd_check(cfg: RunConfig) -> Outcome:
    if cfg.sequence:
        if cfg.certify:
            raise UsageError("--certify needs a growth function, not --sequence")
        subject = read_sequence_csv(cfg.sequence)
        report = full_report(subject, cfg.N)
    else:
        subject = _subject(cfg)
        report = full_report(subject, cfg.N or settings.default_table_depth)
        if cfg.certify:
            rmin = cfg.rmin if cfg.rmin is not None else 0.05
            rmax = cfg.rmax if cfg.rmax is not None else 2.0
            dual_family = verify_thm27(subject, N=report.N, r_min=rmin, r_max=rmax, grid_size=cfg.points)
            notes = list(report.notes)
            if dual_family.note:
                notes.append(f"certificates {dual_family.status.value}: {dual_family.note}")
            report = report.model_copy(update={
                "certificates": list(dual_family.certificates.values()),
                "notes": notes,
            })
    failed = [name for name, v in report.entries.items() if v.status == Status.FAIL]
    failed += [e.cls for e in report.u_evidence or [] if e.status == Status.FAIL]
    passed = sum(1 for v in report.entries.values() if v.status == Status.PASS)
    summary = f"{report.subject}: {passed}/{len(report.entries)} PASS"
    if failed:
        summary += f", FAIL: {', '.join(failed)}"
    if report.inconsistencies:
        summary += f", {len(report.inconsistencies)} inconsistencies"
    return report_payload(report, settings.app_version), summary, conditions_csv(report), bool(failed)


def _cmd_equiv(cfg: RunConfig) -> Outcome:
    u = _subject(cfg)
    pairwise = bool(cfg.other_expr) or cfg.against == "L"
    # the dual family is compared on a narrower default window
    rmin = cfg.rmin if cfg.rmin is not None else (0.0 if pairwise else 0.05)
    rmax = cfg.rmax if cfg.rmax is not None else (10.0 if pairwise else 2.0)
    payload = {**_base(u), "grid": {"rmin": rmin, "rmax": rmax, "points": cfg.points}}
    if cfg.other_expr:
        certificate = find_equivalence(u, parse_growth(cfg.other_expr), rmin, rmax, cfg.points)
        certificates = [certificate]
        holds = certificate.holds
    elif cfg.against == "L":
        N = cfg.N or settings.default_table_depth
        certificate = find_equivalence(u, l_function(legendre_table(u, N)), rmin, rmax, cfg.points)
        certificates = [certificate]
        holds = certificate.holds
    else:
        report = verify_thm27(u, N=cfg.N or 200, r_min=rmin, r_max=rmax, grid_size=cfg.points)
        payload["status"] = report.status
        payload["note"] = report.note
        certificates = list(report.certificates.values())
        holds = report.status != Status.INCONCLUSIVE
    payload["certificates"] = certificates
    verdict = "holds" if all(c.holds for c in certificates) else "not settled"
    return payload, f"{u.descriptor}: {len(certificates)} certificate(s), {verdict}", None, not holds


def _cmd_examples(cfg: RunConfig) -> Outcome:
    family = _require(cfg, "family")
    param = cfg.beta if family == "KS" else cfg.k
    if param is None:
        raise UsageError(f"examples --family {family} needs --{'beta' if family == 'KS' else 'k'}")
    report = verify_examples(family, param, N=cfg.N or 100)
    payload = {**report.model_dump(mode="python"), "toolVersion": settings.app_version}
    failed = [c.name for c in report.checks if c.status == Status.FAIL]
    summary = f"{family}({param:g}): " + ", ".join(f"{c.name}={c.status.value}" for c in report.checks)
    return payload, summary, None, bool(failed)


_HANDLERS: Dict[str, Callable[[RunConfig], Outcome]] = {
    "catalog": _cmd_catalog,
    "legendre": _cmd_legendre,
    "dual": _cmd_dual,
    "alpha": _cmd_alpha,
    "lfun": lambda cfg: _series_command(cfg, l_function_at, "L_u"),
    "lsharp": lambda cfg: _series_command(cfg, l_sharp_at, "L#_u"),
    "check": _cmd_check,
    "equiv": _cmd_equiv,
    "examples": _cmd_examples,
}


def run_cli(argv: Optional[List[str]] = None) -> int:
    """
    Execute one subcommand.

    Returns:
        0 on success, 1 on a FAIL verdict with --strict, 2 on usage errors,
        3 on numeric failures
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    setup_logging(args.log_level, stream=sys.stderr)
    setup_tracing("cli")
    try:
        return _run(parser, args)
    finally:
        shutdown_tracing()


def _run(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    with tracer.start_as_current_span(f"cli.{args.command}") as span:
        try:
            cfg = load_config(args)
            payload, summary, csv_text, failed = _HANDLERS[cfg.command](cfg)
        except (UsageError, ValidationError, json.JSONDecodeError, OSError) as e:
            span.set_attribute("cli.exit_code", EXIT_USAGE)
            print(f"{parser.prog} {args.command}: error: {e}", file=sys.stderr)
            return EXIT_USAGE
        except CksError as e:
            span.record_exception(e)
            span.set_attribute("cli.exit_code", EXIT_NUMERIC)
            logger.error(f"{args.command} failed: {e.code}: {e.message}")
            print(f"{e.code}: {e.message}", file=sys.stderr)
            return EXIT_NUMERIC
        span.set_attribute("cli.failed", failed)

    if cfg.out:
        if cfg.format == "csv" and csv_text is None:
            print(f"{parser.prog} {cfg.command}: error: --format csv is not available here", file=sys.stderr)
            return EXIT_USAGE
        try:
            atomic_write_text(cfg.out, csv_text if cfg.format == "csv" else dumps_json(payload))
        except OSError as e:
            print(f"{parser.prog} {cfg.command}: error: cannot write {cfg.out}: {e}", file=sys.stderr)
            return EXIT_USAGE
        logger.info(f"Wrote {cfg.format} output to {cfg.out}")

    print(summary)
    if failed and cfg.strict:
        return EXIT_FAIL
    return EXIT_OK


def main() -> None:
    sys.exit(run_cli())
