"""Kernel backend selection.

The hot loops (bounds pass, quantize pass, cell sampling) exist twice: a
Cython extension (``_core``) and a pure NumPy fallback (``pyimpl``) with
bit-identical outputs.  The compiled backend is preferred when importable;
set ``LATENTSAMPLE_KERNELS=python`` or ``=compiled`` to force one.
"""

import os

_choice = os.environ.get("LATENTSAMPLE_KERNELS", "auto")
if _choice not in ("auto", "compiled", "python"):
    raise ImportError(
        f"LATENTSAMPLE_KERNELS must be auto, compiled or python, got {_choice!r}"
    )

if _choice == "python":
    from . import pyimpl as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        from . import pyimpl as _impl

        BACKEND = "python"

minmax_pass = _impl.minmax_pass
quantize_pass = _impl.quantize_pass
draw_cells = _impl.draw_cells
