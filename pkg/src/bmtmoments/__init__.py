"""Mixed moments of graph-encoded independent variables, their tensor
operator models, and exact limit-theorem tables."""

from .errors import CapExceeded, InputError

__version__ = "0.1.0"

__all__ = ["CapExceeded", "InputError", "__version__"]
