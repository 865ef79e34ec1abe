"""Quantum discord measures and process tomography with correlated environments."""

__version__ = "0.1.0"
