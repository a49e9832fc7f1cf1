"""Backend selection for the per-agent epoch loop.

The compiled extension is used when it imports; ``QRLSIM_PURE_PYTHON=1``
forces the interpreted twin. Both produce identical outputs.
"""
import os

from . import _kernel_py

CLASSICAL, GROVER, TEST = _kernel_py.CLASSICAL, _kernel_py.GROVER, _kernel_py.TEST

_compiled = None
if os.environ.get("QRLSIM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernel as _compiled
    except ImportError:
        _compiled = None

if _compiled is not None:
    simulate_agent = _compiled.simulate_agent
    BACKEND = "cython"
else:
    simulate_agent = _kernel_py.simulate_agent
    BACKEND = "python"

BACKENDS = {"python": _kernel_py.simulate_agent}
if _compiled is not None:
    BACKENDS["cython"] = _compiled.simulate_agent
