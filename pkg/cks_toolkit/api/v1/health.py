"""Health check endpoint."""
from fastapi import APIRouter
from opentelemetry import trace
from opentelemetry.trace import Status, StatusCode

from cks_toolkit.core.config import settings
from cks_toolkit.core.tracing import get_tracer, tracing_active

router = APIRouter()
tracer = get_tracer()


@router.get("/health")
async def health_check():
    """Liveness check; reports the active trace id when tracing is on."""
    with tracer.start_as_current_span("health_check") as span:
        span.set_attribute("endpoint", "/health")
        span.set_attribute("service.name", settings.service_name)
        span.set_status(Status(StatusCode.OK))

        span_context = trace.get_current_span().get_span_context()
        trace_id = format(span_context.trace_id, "032x") if span_context.is_valid else None

        return {
            "status": "healthy",
            "app_name": settings.app_name,
            "version": settings.app_version,
            "tracing_enabled": tracing_active(),
            "trace_id": trace_id,
            "service_name": settings.service_name,
        }
