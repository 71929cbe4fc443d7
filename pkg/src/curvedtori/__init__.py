"""Curved noncommutative tori at rational deformation parameter, as finite quantum metric spaces."""

__version__ = "0.1.0"
