"""Kernel backend selection.

The compiled extension (_core) is preferred when importable; otherwise
the pure-Python implementation (_pure) is used. Both produce
bit-identical results. Override with POLYCORR_BACKEND=python|compiled
("compiled" raises if the extension is missing instead of falling back).
"""
import os

_requested = os.environ.get("POLYCORR_BACKEND", "auto").strip().lower()

if _requested in ("python", "pure"):
    from . import _pure as _impl
elif _requested in ("auto", "", "compiled", "c"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested in ("compiled", "c"):
            raise
        from . import _pure as _impl
else:
    raise ImportError(f"unknown POLYCORR_BACKEND value {_requested!r}")

BACKEND = _impl.BACKEND_NAME
eval_state_real = _impl.eval_state_real
eval_state_ideal = _impl.eval_state_ideal


def available_backends():
    """Names of importable backends ('compiled' first when present)."""
    names = []
    try:
        from . import _core  # noqa: F401
        names.append("compiled")
    except ImportError:
        pass
    names.append("python")
    return tuple(names)
