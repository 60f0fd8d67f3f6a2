"""Kernel backend selection.

The compiled extension is preferred when it imports cleanly; the pure-Python
module is the fallback.  Set ``NCCURVES_PURE=1`` to force the fallback.
Both backends implement the same functions with bit-identical results.
"""

import os

from . import pure

_impl = pure
if os.environ.get("NCCURVES_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _fast

        _impl = _fast
    except ImportError:
        pass


def backend_name() -> str:
    return _impl.BACKEND


def available_backends():
    names = ["pure"]
    try:
        from . import _fast  # noqa: F401

        names.append("fast")
    except ImportError:
        pass
    return names


def get_backend(name: str):
    if name == "pure":
        return pure
    if name == "fast":
        from . import _fast

        return _fast
    raise ValueError(f"unknown backend {name!r}")


rref_frac = _impl.rref_frac
rref_modp = _impl.rref_modp
rref_generic = _impl.rref_generic
matmul_frac = _impl.matmul_frac
matmul_modp = _impl.matmul_modp
matmul_generic = _impl.matmul_generic
solvable_mod_prime_power = _impl.solvable_mod_prime_power
