"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
implementation is loaded. Set ``AUTOTUNE_BACKEND=python`` to force the
fallback.
"""
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels


def available_backends():
    return sorted(_BACKENDS)


def get_backend(name):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"backend {name!r} unavailable; have {available_backends()}"
        ) from None


_requested = os.environ.get("AUTOTUNE_BACKEND", "").strip().lower()
if _requested:
    BACKEND = _requested
    _module = get_backend(_requested)
elif _ckernels is not None:
    BACKEND = "cython"
    _module = _ckernels
else:
    BACKEND = "python"
    _module = _pykernels

cd_sweep = _module.cd_sweep


def set_backend(name):
    """Switch the active kernel for the whole process; returns the previous name."""
    global BACKEND, cd_sweep
    module = get_backend(name)
    previous = BACKEND
    BACKEND = name
    cd_sweep = module.cd_sweep
    return previous
