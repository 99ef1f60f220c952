"""Per-mode kernels with a compiled backend and a numpy fallback.

The backend is chosen once at import. Set ``MICROPOLAR_BACKEND`` to
``python`` to force the fallback or ``compiled`` to require the extension.
"""
import os

from . import _pykernels

_choice = os.environ.get("MICROPOLAR_BACKEND", "auto").lower()
if _choice not in ("auto", "python", "compiled"):
    raise ImportError(f"MICROPOLAR_BACKEND must be auto, python or compiled, got {_choice!r}")

_compiled = None
if _choice != "python":
    try:
        from . import _ckernels as _compiled
    except ImportError:
        if _choice == "compiled":
            raise
        _compiled = None

_impl = _compiled if _compiled is not None else _pykernels
BACKEND = "compiled" if _compiled is not None else "python"

apply_propagator = _impl.apply_propagator
transport = _impl.transport
quadratic_moments = _impl.quadratic_moments
masked_sum = _impl.masked_sum


def backends():
    """Return the importable kernel modules keyed by name."""
    found = {"python": _pykernels}
    if _compiled is not None:
        found["compiled"] = _compiled
    return found


__all__ = ["BACKEND", "apply_propagator", "transport", "quadratic_moments", "masked_sum", "backends"]
