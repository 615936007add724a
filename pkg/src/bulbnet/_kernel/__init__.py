"""Cycle-kernel backend selection.

Two interchangeable implementations of the per-cycle update exist:

* ``_cycle`` -- Cython extension, compiled at install time (fast path);
* ``pycycle`` -- pure numpy implementation (always available).

Both operate on the same integer state arrays and are bit-for-bit
equivalent (enforced by tests/test_kernel_parity.py).  Selection happens at
import time; set ``BULBNET_BACKEND=python`` or ``BULBNET_BACKEND=compiled``
to force one side.
"""
import os

from . import pycycle

try:
    from . import _cycle as _compiled
except ImportError:
    _compiled = None

_requested = os.environ.get("BULBNET_BACKEND", "").strip().lower()
if _requested == "python":
    _impl = pycycle
elif _requested == "compiled":
    if _compiled is None:
        raise ImportError(
            "BULBNET_BACKEND=compiled but the extension is not built; "
            "run `pip install -e .` or `python setup.py build_ext --inplace`"
        )
    _impl = _compiled
else:
    _impl = _compiled if _compiled is not None else pycycle

run_cycle = _impl.run_cycle


def backend_name() -> str:
    return "compiled" if _impl is _compiled else "python"


def available_backends():
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "compiled")
    return names


def get_backend(name: str):
    """Return the run_cycle callable for an explicit backend name."""
    if name == "python":
        return pycycle.run_cycle
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernel not available")
        return _compiled.run_cycle
    raise ValueError(f"unknown backend {name!r}")
