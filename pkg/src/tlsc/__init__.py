"""Torus layer spherical codes: construction, bounds, labeling and decoding."""

__version__ = "0.1.0"
