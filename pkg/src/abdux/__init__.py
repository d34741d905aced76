"""Abductive logic programming with integrity constraints and arbitrariness-minimal explanations."""

__version__ = "0.1.0"
