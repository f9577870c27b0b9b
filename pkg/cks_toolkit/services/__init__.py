"""Numeric services."""
