"""Batch front-end."""
