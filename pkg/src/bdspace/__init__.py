"""Exact finite-stage Bourgain-Delbaen constructions over compact set systems."""

__version__ = "0.1.0"
