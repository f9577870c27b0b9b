"""Core settings, logging, tracing and error types."""
