"""Condition report service."""
import uuid
from datetime import datetime
from typing import Optional, Union

from opentelemetry.trace import Status, StatusCode

from cks_toolkit.core.config import settings
from cks_toolkit.core.exceptions import BadParam
from cks_toolkit.core.logging import logger
from cks_toolkit.core.tracing import get_tracer
from cks_toolkit.models.conditions import ConditionReport
from cks_toolkit.models.growth import GrowthFunction
from cks_toolkit.models.sequences import AlphaSequence
from cks_toolkit.pipeline.graph import get_report_graph
from cks_toolkit.pipeline.state import ReportState

tracer = get_tracer()

Subject = Union[GrowthFunction, AlphaSequence]


def _truncate(alpha: AlphaSequence, N: int) -> AlphaSequence:
    if N > alpha.N:
        raise BadParam(f"sequence {alpha.subject} has only N={alpha.N}, requested N={N}")
    if N == alpha.N:
        return alpha
    return alpha.model_copy(update={
        "n_max": N,
        "log_alpha": alpha.log_alpha[:N + 1],
        "exact": alpha.exact[:N + 1] if alpha.exact is not None else None,
    })


class ReportService:
    """Service assembling full condition reports."""

    def __init__(self):
        """Initialize the report service."""
        self.logger = logger
        self.graph = get_report_graph()

    def full_report(self, subject: Subject, N: Optional[int] = None) -> ConditionReport:
        """
        Run every condition on a growth function's weight sequence or on a given sequence.

        For growth functions the U-conditions are sampled as well and the report
        records whether the hypotheses U0, U2 and U3 hold; implications between
        the verdicts are cross-checked.

        Args:
            subject: GrowthFunction or AlphaSequence
            N: table depth; defaults to ``settings.default_table_depth`` for
                growth functions and to the full length for sequences

        Returns:
            ConditionReport
        """
        run_id = str(uuid.uuid4())
        start_time = datetime.utcnow()

        if isinstance(subject, AlphaSequence):
            alpha = _truncate(subject, subject.N if N is None else N)
            growth = None
            descriptor, provenance, params = alpha.subject, alpha.provenance.kind.value, {}
        else:
            alpha = None
            growth = subject
            descriptor, provenance, params = subject.descriptor, "growth", dict(subject.params)
        depth = alpha.N if alpha is not None else (N or settings.default_table_depth)

        self.logger.info(f"Building condition report for {descriptor} (N={depth}, run_id={run_id})")

        with tracer.start_as_current_span("report_service.full_report") as span:
            span.set_attribute("report.run_id", run_id)
            span.set_attribute("report.subject", descriptor[:100])
            span.set_attribute("report.N", depth)

            initial_state: ReportState = {
                "subject": descriptor,
                "N": depth,
                "growth": growth,
                "alpha": alpha,
                "u_evidence": None,
                "grid": None,
                "entries": None,
                "inconsistencies": None,
                "notes": [],
                "metadata": {"run_id": run_id, "threads": settings.threads},
            }

            try:
                result = self.graph.invoke(initial_state)
            except Exception as e:
                span.record_exception(e)
                span.set_status(Status(StatusCode.ERROR, str(e)))
                self.logger.error(f"Condition report for {descriptor} failed: {e}")
                raise

            metadata = result.get("metadata") or {}
            report = ConditionReport(
                subject=descriptor,
                provenance=provenance,
                params=params,
                N=depth,
                entries=result["entries"],
                u_evidence=result.get("u_evidence"),
                grid=result.get("grid"),
                hypotheses_met=metadata.get("hypotheses_met"),
                inconsistencies=result.get("inconsistencies") or [],
                notes=result.get("notes") or [],
            )

            duration_ms = int((datetime.utcnow() - start_time).total_seconds() * 1000)
            span.set_attribute("report.inconsistencies", len(report.inconsistencies))
            span.set_attribute("report.duration_ms", duration_ms)
            span.set_status(Status(StatusCode.OK))
            self.logger.info(f"Condition report for {descriptor} assembled in {duration_ms} ms")
            return report


_report_service: Optional[ReportService] = None


def get_report_service() -> ReportService:
    global _report_service
    if _report_service is None:
        _report_service = ReportService()
    return _report_service


def full_report(subject: Subject, N: Optional[int] = None) -> ConditionReport:
    """Module-level shortcut for ``ReportService.full_report``."""
    return get_report_service().full_report(subject, N)
