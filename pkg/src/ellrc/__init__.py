"""Locally repairable codes from automorphism groups of elliptic function fields."""

__version__ = "0.1.0"
