"""Exact-arithmetic calculator for singular fibrations of 4-manifolds."""

__version__ = "0.1.0"

SCHEMA_VERSION = "singfib/1"
