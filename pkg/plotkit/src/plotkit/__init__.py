"""Figure rendering for floquet-chain CSV datasets."""

__version__ = "0.1.0"

from .recipes import FigureRecipe, load_recipe
from .render import render
from .schema import SchemaMismatch, read_table

__all__ = ["FigureRecipe", "load_recipe", "render", "SchemaMismatch",
           "read_table", "__version__"]
