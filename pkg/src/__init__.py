"""Separability - bath-projected renormalization and eigenstate separability."""

__version__ = "0.1.0"
