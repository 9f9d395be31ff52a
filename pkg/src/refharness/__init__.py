"""Differential testing of refactoring engines against a static type checker."""

__version__ = "0.1.0"
