"""Report pipeline nodes."""
