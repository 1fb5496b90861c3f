"""Publication figure: win rate vs trump imbalance, one facet per pairing."""

__version__ = "0.1.0"

from .render import BreakevenBin, FigureSpec, SchemaError, load_bins, render_breakeven

__all__ = [
    "BreakevenBin",
    "FigureSpec",
    "SchemaError",
    "load_bins",
    "render_breakeven",
]
