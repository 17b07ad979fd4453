"""Exact invariant geometry and Walker structures of homogeneous four-spaces."""

__version__ = "0.1.0"
