"""Main FastAPI application."""
from dotenv import load_dotenv
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from cks_toolkit.api.v1 import health, reports, transforms
from cks_toolkit.core.config import settings
from cks_toolkit.core.exceptions import CksError
from cks_toolkit.core.logging import logger, setup_logging
from cks_toolkit.core.tracing import instrument_fastapi, setup_tracing, shutdown_tracing

# Load environment variables from .env file
load_dotenv()

# Setup logging
setup_logging()

# Setup OpenTelemetry tracing
setup_tracing("api")

# Create FastAPI application
app = FastAPI(
    title=settings.app_name,
    version=settings.app_version,
    debug=settings.debug
)

# Instrument FastAPI with OpenTelemetry
instrument_fastapi(app)

# Include routers
app.include_router(health.router, prefix=settings.api_v1_prefix, tags=["health"])
app.include_router(transforms.router, prefix=settings.api_v1_prefix, tags=["transforms"])
app.include_router(reports.router, prefix=settings.api_v1_prefix, tags=["reports"])


@app.exception_handler(CksError)
async def cks_error_handler(request: Request, exc: CksError):
    """Numeric failures become 422 responses carrying the error code."""
    logger.warning(f"{request.url.path} failed: {exc.code}: {exc.message}")
    return JSONResponse(status_code=422, content={"error": exc.code, "detail": exc.message})


@app.on_event("startup")
async def startup_event():
    """Start the condition worker pool."""
    try:
        from cks_toolkit.services.worker_pool import get_worker_pool
        pool = get_worker_pool()
        logger.info(f"✓ Condition worker pool ready ({pool.max_workers} workers)")
    except Exception as e:
        logger.warning(f"⚠ Worker pool initialization failed: {e}")


@app.on_event("shutdown")
async def shutdown_event():
    """Stop the worker pool and flush traces."""
    try:
        from cks_toolkit.services.worker_pool import shutdown_worker_pool
        shutdown_worker_pool()
        logger.info("✓ Condition worker pool shut down")
    except Exception as e:
        logger.warning(f"Error shutting down worker pool: {e}")

    shutdown_tracing()


@app.get("/")
async def root():
    """Root endpoint."""
    return {
        "message": f"Welcome to {settings.app_name}",
        "version": settings.app_version,
        "docs": "/docs"
    }


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
