"""Synchrony, symmetry and stability analysis for coupled cell networks."""

__version__ = "0.1.0"
SCHEMA_VERSION = "1"
