"""OpenTelemetry tracing for the API and CLI runs.

Spans are exported over OTLP gRPC when ``enable_tracing`` is set. With
``trace_console`` they are printed to stderr instead, which is handy for a
single CLI run without a collector. With neither, every ``get_tracer()`` call
hands out the API's no-op tracer and the numeric code pays nothing.
"""
import sys
from typing import Optional

from opentelemetry import trace
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import BatchSpanProcessor, ConsoleSpanExporter, SimpleSpanProcessor

from cks_toolkit.core.config import settings
from cks_toolkit.core.logging import logger

TRACER_NAME = "cks_toolkit"

_tracer_provider: Optional[TracerProvider] = None


def _span_processor():
    if settings.trace_console:
        return SimpleSpanProcessor(ConsoleSpanExporter(out=sys.stderr))

    from opentelemetry.exporter.otlp.proto.grpc.trace_exporter import OTLPSpanExporter

    exporter = OTLPSpanExporter(endpoint=settings.otlp_endpoint, insecure=True)
    return BatchSpanProcessor(exporter, max_queue_size=512, schedule_delay_millis=2000)


def setup_tracing(entry_point: str = "api") -> bool:
    """
    Install a TracerProvider for this process.

    Args:
        entry_point: "api" or "cli", recorded as a resource attribute

    Returns:
        True when spans are being exported
    """
    global _tracer_provider

    if _tracer_provider is not None:
        return True
    if not (settings.enable_tracing or settings.trace_console):
        logger.debug("Tracing is disabled in configuration")
        return False

    try:
        resource = Resource.create({
            "service.name": settings.service_name,
            "service.version": settings.app_version,
            "cks.entry_point": entry_point,
        })
        provider = TracerProvider(resource=resource)
        provider.add_span_processor(_span_processor())
        # must precede FastAPI instrumentation
        trace.set_tracer_provider(provider)
        _tracer_provider = provider
    except Exception as e:
        logger.error(f"Failed to initialize OpenTelemetry tracing: {e}", exc_info=True)
        return False

    target = "console" if settings.trace_console else settings.otlp_endpoint
    logger.info(f"Tracing enabled for {entry_point}: service={settings.service_name}, exporter={target}")
    return True


def instrument_fastapi(app) -> None:
    """Attach the FastAPI instrumentor once a provider is installed."""
    if _tracer_provider is None:
        return

    try:
        from opentelemetry.instrumentation.fastapi import FastAPIInstrumentor

        FastAPIInstrumentor.instrument_app(app)
        logger.info("FastAPI instrumentation enabled")
    except Exception as e:
        logger.error(f"Failed to instrument FastAPI: {e}", exc_info=True)


def tracing_active() -> bool:
    return _tracer_provider is not None


def get_tracer() -> trace.Tracer:
    """Tracer for toolkit spans; a proxy that follows whichever provider gets installed."""
    return trace.get_tracer(TRACER_NAME)


def shutdown_tracing() -> None:
    """Flush pending spans and drop the provider."""
    global _tracer_provider

    if _tracer_provider is None:
        return
    try:
        _tracer_provider.force_flush(timeout_millis=5000)
        _tracer_provider.shutdown()
        logger.info("Tracing shutdown complete")
    except Exception as e:
        logger.error(f"Error during tracing shutdown: {e}")
    _tracer_provider = None
