"""Exact and statistical experiments on the Dirichlet divisor problem."""

from .numkernel import ExactRatio, ScaleLimitError

__all__ = ["ExactRatio", "ScaleLimitError"]
__version__ = "0.1.0"
