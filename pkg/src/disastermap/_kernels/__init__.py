"""Raster kernel backends.

The hot inner loops (morphology, thinning, component labelling) exist twice:
a compiled Cython extension (``_core``) and a NumPy fallback (``_pure``).
The compiled backend is preferred when importable; set the environment
variable ``DISASTERMAP_KERNELS`` to ``python`` or ``cython`` to force one.
Both produce bit-identical results (see tests and benchmarks/).
"""

import os

_forced = os.environ.get("DISASTERMAP_KERNELS", "").strip().lower()
if _forced not in ("", "cython", "python"):
    raise ImportError(
        f"DISASTERMAP_KERNELS must be 'cython' or 'python', got {_forced!r}"
    )

if _forced == "python":
    from ._pure import binary_dilate, binary_erode, label_components, zhang_suen_thin

    BACKEND = "python"
else:
    try:
        from ._core import binary_dilate, binary_erode, label_components, zhang_suen_thin

        BACKEND = "cython"
    except ImportError:
        if _forced == "cython":
            raise
        from ._pure import binary_dilate, binary_erode, label_components, zhang_suen_thin

        BACKEND = "python"

__all__ = [
    "BACKEND",
    "binary_dilate",
    "binary_erode",
    "label_components",
    "zhang_suen_thin",
]
