"""Shared helpers: settings and the search run log."""
