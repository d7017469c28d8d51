"""Ordinal-aware supervision math, detection metrics and damage-state rules."""

__version__ = "0.1.0"
