"""Report and sequence persistence: atomic writes, deterministic JSON, CSV through pandas."""
import io
import json
import math
import os
import tempfile
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from cks_toolkit.core.exceptions import BadParam
from cks_toolkit.models.conditions import ConditionReport
from cks_toolkit.models.legendre import LegendreTable
from cks_toolkit.models.sequences import AlphaSequence, Provenance, ProvenanceKind

PathLike = Union[str, Path]
FLOAT_DIGITS = 15
_PROVENANCE_PREFIX = "# provenance:"


def atomic_write_text(path: PathLike, text: str) -> None:
    """Write ``text`` to a temp file next to ``path`` and rename it into place."""
    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def to_jsonable(value: Any) -> Any:
    """
    Plain JSON data with floats rounded to 15 significant digits.

    Non-finite floats become the strings "inf", "-inf" and "nan".
    """
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump(mode="python"))
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [to_jsonable(v) for v in items]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.{FLOAT_DIGITS}g}")
    return value


def dumps_json(payload: Any) -> str:
    """Deterministic JSON: sorted keys, rounded floats, trailing newline."""
    return json.dumps(to_jsonable(payload), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _frame_to_csv(frame: pd.DataFrame, header: str = "") -> str:
    buffer = io.StringIO()
    if header:
        buffer.write(header + "\n")
    frame.to_csv(buffer, index=False, float_format="%.17g", lineterminator="\n")
    return buffer.getvalue()


def sequence_frame(alpha: AlphaSequence) -> pd.DataFrame:
    return pd.DataFrame({"n": np.arange(alpha.N + 1), "log_value": alpha.log_alpha})


def sequence_csv(alpha: AlphaSequence) -> str:
    header = f"{_PROVENANCE_PREFIX} {alpha.provenance.kind.value}:{alpha.provenance.descriptor}"
    return _frame_to_csv(sequence_frame(alpha), header)


def write_sequence_csv(alpha: AlphaSequence, path: PathLike) -> None:
    atomic_write_text(path, sequence_csv(alpha))


def read_sequence_csv(path: PathLike) -> AlphaSequence:
    """
    Load a sequence written by ``write_sequence_csv`` (or any n,log_value CSV).

    Raises:
        BadParam: missing columns or indices not 0..N in order
    """
    text = Path(path).read_text(encoding="utf-8")
    first, _, rest = text.partition("\n")
    provenance = Provenance(kind=ProvenanceKind.USER, descriptor=Path(path).stem)
    if first.startswith(_PROVENANCE_PREFIX):
        label = first[len(_PROVENANCE_PREFIX):].strip()
        kind, sep, descriptor = label.partition(":")
        if sep and kind in {k.value for k in ProvenanceKind}:
            provenance = Provenance(kind=ProvenanceKind(kind), descriptor=descriptor)
        elif label:
            provenance = Provenance(kind=ProvenanceKind.USER, descriptor=label)
        body = rest
    else:
        body = text
    frame = pd.read_csv(io.StringIO(body), float_precision="round_trip")
    missing = {"n", "log_value"} - set(frame.columns)
    if missing:
        raise BadParam(f"{path}: missing column(s) {', '.join(sorted(missing))}")
    n = frame["n"].to_numpy()
    if not np.array_equal(n, np.arange(len(frame))):
        raise BadParam(f"{path}: column n must run 0..N in order")
    return AlphaSequence(
        n_max=len(frame) - 1,
        log_alpha=[float(v) for v in frame["log_value"]],
        provenance=provenance,
    )


def table_csv(table: LegendreTable) -> str:
    frame = pd.DataFrame({
        "n": np.arange(table.N + 1),
        "log_ell": table.log_ell,
        "argmin_r": table.argmin,
    })
    return _frame_to_csv(frame)


def conditions_frame(report: ConditionReport) -> pd.DataFrame:
    rows = []
    for name, verdict in report.entries.items():
        rows.append({
            "name": name,
            "status": verdict.status.value,
            "constant": verdict.constant,
            "witness_n": verdict.witness[0] if verdict.witness else None,
            "witness_m": verdict.witness[1] if verdict.witness else None,
            "margin": verdict.margin,
        })
    for evidence in report.u_evidence or []:
        rows.append({"name": evidence.cls, "status": evidence.status.value, "margin": evidence.margin})
    return pd.DataFrame(rows, columns=["name", "status", "constant", "witness_n", "witness_m", "margin"])


def conditions_csv(report: ConditionReport) -> str:
    return _frame_to_csv(conditions_frame(report))


def report_payload(report: ConditionReport, tool_version: str) -> Dict[str, Any]:
    """
    The report JSON schema: subject, params, N, grid, conditions, uEvidence, certificates, toolVersion.

    ``grid`` is the sample grid of the U-evidence (null for sequence subjects).
    """
    return {
        "subject": report.subject,
        "provenance": report.provenance,
        "params": report.params,
        "N": report.N,
        "grid": report.grid,
        "conditions": [
            {
                "name": name,
                "status": v.status,
                "constant": v.constant,
                "witness": list(v.witness) if v.witness else None,
                "margin": v.margin,
                "note": v.note,
            }
            for name, v in report.entries.items()
        ],
        "uEvidence": report.u_evidence or [],
        "hypothesesMet": report.hypotheses_met,
        "inconsistencies": report.inconsistencies,
        "notes": report.notes,
        "certificates": report.certificates,
        "toolVersion": tool_version,
    }
