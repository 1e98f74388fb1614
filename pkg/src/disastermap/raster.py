"""Class-labelled and binary raster grids.

Masks are 2-D uint8 NumPy arrays indexed ``[row, col]``. Class masks carry
the codes background=0, building=1, road=2; binary masks carry {0, 1}.
Pixels outside the raster are background for all morphology. The heavy
kernels live in :mod:`disastermap._kernels` (compiled or NumPy backend).
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels

BACKGROUND = 0
BUILDING = 1
ROAD = 2
CLASS_CODES = (BACKGROUND, BUILDING, ROAD)


def as_class_mask(mask):
    """Validate and return ``mask`` as a uint8 class-label grid."""
    a = np.ascontiguousarray(mask, dtype=np.uint8)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError("mask must be a non-empty 2-D grid")
    bad = np.setdiff1d(np.unique(a), CLASS_CODES)
    if bad.size:
        raise ValueError(f"invalid class code {int(bad[0])} (allowed: 0, 1, 2)")
    return a


def as_binary_mask(mask):
    """Validate and return ``mask`` as a uint8 {0,1} grid."""
    a = np.ascontiguousarray(mask, dtype=np.uint8)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError("mask must be a non-empty 2-D grid")
    if a.max(initial=0) > 1:
        raise ValueError("binary mask may only contain 0 and 1")
    return a


def _check_se(size):
    if size < 1 or size % 2 == 0:
        raise ValueError(f"structuring element size must be odd and >= 1, got {size}")


def dilate(mask, size=5, iterations=1):
    """Binary dilation with a square structuring element.

    Args:
        mask: binary mask.
        size: odd side length of the square structuring element.
        iterations: number of passes; 0 returns the input unchanged.
    """
    _check_se(size)
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    return _kernels.binary_dilate(as_binary_mask(mask), size, iterations)


def erode(mask, size=5, iterations=1):
    """Binary erosion with a square structuring element (border counts as 0)."""
    _check_se(size)
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    return _kernels.binary_erode(as_binary_mask(mask), size, iterations)


def binary_open(mask, size=5):
    """Morphological opening: erosion followed by dilation."""
    return dilate(erode(mask, size, 1), size, 1)


def compute_change_mask(pre, post):
    """Per-pixel change mask: 1 where pre is building/road and post is background.

    Args:
        pre: pre-event class mask.
        post: post-event class mask, same shape.

    Returns:
        Binary mask of destroyed infrastructure pixels.
    """
    a = as_class_mask(pre)
    b = as_class_mask(post)
    if a.shape != b.shape:
        raise ValueError(f"mask shapes differ: {a.shape} vs {b.shape}")
    return ((a != BACKGROUND) & (b == BACKGROUND)).astype(np.uint8)


def remove_small_blobs(mask, min_area):
    """Clear every 8-connected component smaller than ``min_area`` pixels."""
    if min_area < 0:
        raise ValueError("min_area must be >= 0")
    bits = as_binary_mask(mask)
    if min_area == 0:
        return bits.copy()
    labels, count = _kernels.label_components(bits)
    if count == 0:
        return bits.copy()
    areas = np.bincount(labels.ravel(), minlength=count + 1)
    keep = areas >= min_area
    keep[0] = False
    return keep[labels].astype(np.uint8)


def class_mask(mask, code):
    """Binary mask of the pixels labelled ``code``."""
    if code not in CLASS_CODES:
        raise ValueError(f"invalid class code {code} (allowed: 0, 1, 2)")
    return (as_class_mask(mask) == code).astype(np.uint8)


@dataclass
class ChangeHeatmap:
    """Changed-pixel totals over a fixed grid of square cells."""

    cell_size: int
    cols: int
    rows: int
    counts: np.ndarray  # (rows, cols) int64

    def to_dict(self):
        return {
            "cell_size": self.cell_size,
            "cols": self.cols,
            "rows": self.rows,
            "counts": self.counts.tolist(),
        }


def damage_heatmap(diff, cell_size):
    """Aggregate a change mask into per-cell changed-pixel counts.

    The grid covers the raster with ``ceil(extent / cell_size)`` cells per
    axis; the sum of all counts equals the number of positive pixels.
    """
    if cell_size < 1:
        raise ValueError("cell_size must be >= 1")
    bits = as_binary_mask(diff)
    h, w = bits.shape
    acc = np.add.reduceat(bits.astype(np.int64), np.arange(0, h, cell_size), axis=0)
    acc = np.add.reduceat(acc, np.arange(0, w, cell_size), axis=1)
    rows, cols = acc.shape
    return ChangeHeatmap(cell_size=int(cell_size), cols=cols, rows=rows, counts=acc)


def change_mask_pipeline(
    pre,
    post,
    kernel_size=5,
    dilate_iterations=6,
    open_size=5,
    min_blob_area=64,
    intermediates=None,
):
    """Full change-detection pipeline on a pre/post class-mask pair.

    Dilates the building and road masks of both epochs to bridge small
    segmentation gaps, recombines them, takes the per-pixel change mask,
    then cleans registration noise with an opening and a minimum blob area.

    Args:
        pre, post: class masks of identical shape.
        kernel_size: structuring element for the gap-bridging dilation.
        dilate_iterations: dilation passes applied to each class mask.
        open_size: structuring element of the noise-removal opening.
        min_blob_area: components smaller than this are discarded.
        intermediates: optional dict; when given, intermediate masks are
            stored under descriptive keys (for --debug dumps).

    Returns:
        Binary change mask after cleaning.
    """
    a = as_class_mask(pre)
    b = as_class_mask(post)
    if a.shape != b.shape:
        raise ValueError(f"mask shapes differ: {a.shape} vs {b.shape}")

    def combined(mask):
        grown = np.zeros(mask.shape, dtype=np.uint8)
        for code in (BUILDING, ROAD):
            grown |= dilate(class_mask(mask, code), kernel_size, dilate_iterations)
        return grown

    pre_grown = combined(a)
    post_grown = combined(b)
    raw = (pre_grown & ~post_grown & 1).astype(np.uint8)
    opened = binary_open(raw, open_size) if open_size > 1 else raw.copy()
    cleaned = remove_small_blobs(opened, min_blob_area)
    if intermediates is not None:
        intermediates["pre_dilated"] = pre_grown
        intermediates["post_dilated"] = post_grown
        intermediates["change_raw"] = raw
        intermediates["change_opened"] = opened
    return cleaned
