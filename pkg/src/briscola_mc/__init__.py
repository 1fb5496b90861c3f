"""Seeded Monte Carlo tournament engine and statistics for two-player Briscola."""

__version__ = "0.1.0"
