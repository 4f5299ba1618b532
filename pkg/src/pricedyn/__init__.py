"""Expectation-driven price dynamics in a household/firm economy with optional money."""

__version__ = "0.1.0"
