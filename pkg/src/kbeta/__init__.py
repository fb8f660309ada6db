"""Exact mod-p cohomology rings with Bockstein and Steenrod structure."""

from .catalog import CatalogKey, load, load_external, validate
from .errors import KBetaError

__version__ = "0.1.0"

__all__ = ["CatalogKey", "KBetaError", "load", "load_external", "validate", "__version__"]
