"""Structural parameters, constructions and simulations for random Turán problems."""

__version__ = "0.1.0"
