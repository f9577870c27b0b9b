"""LangGraph pipeline assembling condition reports."""
