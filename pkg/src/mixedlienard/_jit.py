"""Optional numba acceleration.

Kernels are written in the numba-compatible subset of Python and decorated
with :func:`njit`.  Setting ``MIXEDLIENARD_DISABLE_NUMBA=1`` (or running
without numba installed) leaves them as plain Python/numpy functions, which
is the reference path used when comparing the two.
"""
import os

_DISABLED = os.environ.get("MIXEDLIENARD_DISABLE_NUMBA", "").strip().lower() in {
    "1",
    "true",
    "yes",
    "on",
}

try:
    if _DISABLED:
        raise ImportError
    import numba as _numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised through the env flag
    _numba = None
    HAS_NUMBA = False


def njit(func=None, **kwargs):
    """``numba.njit(cache=True)`` when acceleration is on, identity otherwise."""
    kwargs.setdefault("cache", True)

    def wrap(f):
        if not HAS_NUMBA:
            return f
        return _numba.njit(**kwargs)(f)

    if func is None:
        return wrap
    return wrap(func)


def python_version(func):
    """Return the uncompiled function behind a (possibly) jitted kernel."""
    return getattr(func, "py_func", func)
