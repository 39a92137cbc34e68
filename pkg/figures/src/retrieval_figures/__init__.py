"""Figure rendering for cavity-retrieval CSV output (no physics recomputed)."""

from .render import (FigureSpec, RenderError, RenderResult,
                     antisymmetry_defect, render, sweep_grid)

__version__ = "0.1.0"

__all__ = ["FigureSpec", "RenderResult", "RenderError", "render",
           "sweep_grid", "antisymmetry_defect", "__version__"]
