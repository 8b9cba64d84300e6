"""Separately continuous extensions of Baire-one functions from graph sets."""

__version__ = "0.1.0"
