"""Computations with locally equivalent number fields, Brauer classes, orders and covolumes."""

from .errors import AdeleLabError

__version__ = "0.1.0"

__all__ = ["AdeleLabError", "__version__"]
