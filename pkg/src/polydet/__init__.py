"""Additive-sharing MPC toolkit for determinants of shared polynomial matrices."""

__version__ = "0.1.0"
