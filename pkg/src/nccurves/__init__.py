"""Exact computational algebra for bimodule duality, truncated noncommutative
symmetric algebras, and the quaternion/conic arithmetic behind them."""

__version__ = "0.1.0"

from ._kernels import backend_name

__all__ = ["backend_name", "__version__"]
