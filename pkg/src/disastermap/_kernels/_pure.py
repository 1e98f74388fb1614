"""NumPy implementations of the raster kernels.

This is the fallback backend used when the compiled extension is not
available. Results are bit-identical to the Cython backend; speed is the
only difference. All functions take and return 2-D uint8 arrays and treat
everything outside the raster as background (0).
"""

import numpy as np


def _shifted(a, dr, dc):
    """Return ``a`` shifted by (dr, dc), padding with False."""
    h, w = a.shape
    out = np.zeros_like(a)
    rs = slice(max(dr, 0), h + min(dr, 0))
    cs = slice(max(dc, 0), w + min(dc, 0))
    rt = slice(max(-dr, 0), h + min(-dr, 0))
    ct = slice(max(-dc, 0), w + min(-dc, 0))
    out[rs, cs] = a[rt, ct]
    return out


def binary_dilate(bits, size, iterations=1):
    """Dilate with a square ``size``x``size`` structuring element.

    Separable: one horizontal and one vertical OR pass per iteration.
    """
    a = bits.astype(bool)
    r = size // 2
    for _ in range(iterations):
        if r == 0:
            break
        row = a.copy()
        for s in range(1, r + 1):
            row |= _shifted(a, 0, s)
            row |= _shifted(a, 0, -s)
        a = row.copy()
        for s in range(1, r + 1):
            a |= _shifted(row, s, 0)
            a |= _shifted(row, -s, 0)
    return a.astype(np.uint8)


def binary_erode(bits, size, iterations=1):
    """Erode with a square structuring element; border counts as 0."""
    a = bits.astype(bool)
    r = size // 2
    for _ in range(iterations):
        if r == 0:
            break
        row = a.copy()
        for s in range(1, r + 1):
            row &= _shifted(a, 0, s)
            row &= _shifted(a, 0, -s)
        a = row.copy()
        for s in range(1, r + 1):
            a &= _shifted(row, s, 0)
            a &= _shifted(row, -s, 0)
    return a.astype(np.uint8)


def zhang_suen_thin(bits):
    """Thin to a one-pixel skeleton (Zhang-Suen two-subiteration scheme).

    Iterates until a full pass removes nothing, which makes the result a
    fixpoint of the function by construction.
    """
    img = bits.astype(bool)
    while True:
        removed_any = False
        for step in (0, 1):
            p = np.pad(img, 1)
            p2 = p[:-2, 1:-1]
            p3 = p[:-2, 2:]
            p4 = p[1:-1, 2:]
            p5 = p[2:, 2:]
            p6 = p[2:, 1:-1]
            p7 = p[2:, :-2]
            p8 = p[1:-1, :-2]
            p9 = p[:-2, :-2]
            ring = (p2, p3, p4, p5, p6, p7, p8, p9)
            b = np.zeros(img.shape, dtype=np.uint8)
            for n in ring:
                b += n
            a = np.zeros(img.shape, dtype=np.uint8)
            for i in range(8):
                a += (~ring[i] & ring[(i + 1) % 8]).astype(np.uint8)
            cond = img & (b >= 2) & (b <= 6) & (a == 1)
            if step == 0:
                cond &= ~(p2 & p4 & p6) & ~(p4 & p6 & p8)
            else:
                cond &= ~(p2 & p4 & p8) & ~(p2 & p6 & p8)
            if cond.any():
                img &= ~cond
                removed_any = True
        if not removed_any:
            break
    return img.astype(np.uint8)


def label_components(bits):
    """8-connected component labelling.

    Returns ``(labels, count)`` where labels are 1..count assigned in
    row-major first-occurrence order (0 = background). Uses row runs and
    union-find, so the cost scales with the number of runs rather than the
    number of pixels.
    """
    a = np.ascontiguousarray(bits, dtype=np.uint8)
    h, w = a.shape
    labels = np.zeros((h, w), dtype=np.int32)
    parent = [0]

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    prev_runs = []
    for r in range(h):
        row = a[r]
        edges = np.flatnonzero(np.diff(np.concatenate(([0], row, [0]))))
        starts, ends = edges[0::2], edges[1::2]
        runs = []
        for s, e in zip(starts, ends):
            lab = 0
            for ps, pe, plab in prev_runs:
                # runs are half-open [s, e); widened by 1 for 8-connectivity
                if ps <= e and pe >= s:
                    root = find(plab)
                    if lab == 0:
                        lab = root
                    elif root != lab:
                        big, small = max(lab, root), min(lab, root)
                        parent[big] = small
                        lab = small
            if lab == 0:
                parent.append(len(parent))
                lab = len(parent) - 1
            labels[r, s:e] = lab
            runs.append((int(s), int(e), lab))
        prev_runs = runs

    # resolve roots, then compact to row-major first-occurrence order
    n_provisional = len(parent)
    roots = np.zeros(n_provisional, dtype=np.int32)
    for i in range(1, n_provisional):
        roots[i] = find(i)
    flat = roots[labels]
    pos = np.flatnonzero(flat.ravel())
    if pos.size == 0:
        return labels, 0
    vals = flat.ravel()[pos]
    uniq, first_idx = np.unique(vals, return_index=True)
    order = np.argsort(first_idx, kind="stable")
    rank = np.zeros(n_provisional, dtype=np.int32)
    rank[uniq[order]] = np.arange(1, uniq.size + 1, dtype=np.int32)
    return rank[flat], int(uniq.size)
