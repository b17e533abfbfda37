"""Utility functions and helpers: logging, configuration loading, rationals and slugs."""
