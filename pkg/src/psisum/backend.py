"""Kernel backend selection.

The hot numeric kernels (digamma/polygamma loops, signed log-gamma,
compensated reduction) exist in two implementations: numba-jitted loops
(:mod:`psisum._kernels_numba`) and a pure-numpy fallback
(:mod:`psisum._kernels_numpy`).  The active backend is chosen at import
time from the ``PSISUM_BACKEND`` environment variable ("numba" or
"numpy"); when unset, numba is used if it imports, numpy otherwise.
``use()`` switches at runtime, which the benchmark script relies on.
"""

import os
import warnings

_ENV_FLAG = "PSISUM_BACKEND"

_active = None
_active_name = ""


def _load(name):
    if name == "numpy":
        from psisum import _kernels_numpy as mod
        return mod
    if name == "numba":
        from psisum import _kernels_numba as mod
        return mod
    raise ValueError(f"unknown backend {name!r} (expected 'numba' or 'numpy')")


def use(name):
    """Activate a backend by name ('numba' or 'numpy')."""
    global _active, _active_name
    _active = _load(name)
    _active_name = name
    return _active


def kernels():
    """Return the active kernel module."""
    return _active


def active_name():
    return _active_name


def numba_available():
    try:
        import numba  # noqa: F401
    except Exception:
        return False
    return True


def _init():
    requested = os.environ.get(_ENV_FLAG, "").strip().lower()
    if requested in ("numba", "numpy"):
        if requested == "numba" and not numba_available():
            warnings.warn(
                "PSISUM_BACKEND=numba requested but numba is not importable; "
                "falling back to numpy kernels"
            )
            requested = "numpy"
        use(requested)
        return
    if requested:
        raise ValueError(
            f"{_ENV_FLAG}={requested!r} not understood (expected 'numba' or 'numpy')"
        )
    use("numba" if numba_available() else "numpy")


_init()
