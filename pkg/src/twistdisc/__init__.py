"""Teleportation-based one-way LOCC discrimination of maximally entangled states."""

__version__ = "0.1.0"
