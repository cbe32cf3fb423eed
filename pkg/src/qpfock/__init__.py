"""Quasi-periodic Fock spaces on the flat cylinder: numerics and sampling lab."""
__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402,F401
