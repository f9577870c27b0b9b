"""Helper functions for OpenTelemetry tracing in report pipeline nodes."""
from functools import wraps
from typing import Any, Callable, Dict

from opentelemetry.trace import Status, StatusCode

from cks_toolkit.core.exceptions import CksError
from cks_toolkit.core.tracing import get_tracer
from cks_toolkit.pipeline.state import ReportState

tracer = get_tracer()


def get_report_context(state: ReportState) -> Dict[str, Any]:
    """
    Extract report context from state for tracing attributes.

    Args:
        state: report pipeline state

    Returns:
        Dictionary of context attributes
    """
    metadata = state.get("metadata") or {}
    return {
        "report.run_id": metadata.get("run_id", "unknown"),
        "report.subject": state.get("subject", "")[:100],
        "report.N": state.get("N"),
    }


def trace_node(node_name: str):
    """
    Decorator to trace a report pipeline node.

    Creates a span for the node execution with the report context as attributes.

    Args:
        node_name: Name of the node (e.g., "check_conditions")

    Example:
        @trace_node("build_alpha")
        def build_alpha(state: ReportState) -> Dict[str, Any]:
            ...
    """
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(state: ReportState) -> Dict[str, Any]:
            with tracer.start_as_current_span(f"node.{node_name}") as span:
                span.set_attribute("node.name", node_name)
                for key, value in get_report_context(state).items():
                    if value is not None:
                        span.set_attribute(key, value)

                try:
                    result = func(state)
                except CksError as e:
                    span.record_exception(e)
                    span.set_attribute("error.code", e.code)
                    span.set_status(Status(StatusCode.ERROR, e.message))
                    raise
                except Exception as e:
                    span.record_exception(e)
                    span.set_status(Status(StatusCode.ERROR, str(e)))
                    raise

                entries = result.get("entries") or {}
                if entries:
                    failed = [name for name, v in entries.items() if v.status.value == "FAIL"]
                    span.set_attribute("result.entries_count", len(entries))
                    span.set_attribute("result.failed", ",".join(failed))
                if result.get("inconsistencies") is not None:
                    span.set_attribute("result.inconsistencies", len(result["inconsistencies"]))
                if result.get("notes"):
                    span.set_attribute("result.notes_count", len(result["notes"]))
                span.set_status(Status(StatusCode.OK))
                return result

        return wrapper
    return decorator
