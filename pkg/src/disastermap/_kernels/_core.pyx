# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Cython implementations of the raster kernels.

Same contracts and bit-identical output as ``_pure``; selected automatically
at import when compiled. Everything outside the raster is background (0).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def binary_dilate(bits, int size, int iterations=1):
    """Dilate with a square structuring element (separable OR passes)."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] src = \
        np.ascontiguousarray(bits, dtype=np.uint8)
    cdef int h = src.shape[0]
    cdef int w = src.shape[1]
    cdef int r = size // 2
    cdef cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] tmp = np.zeros((h, w), dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] dst = np.zeros((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] a = src.copy()
    cdef unsigned char[:, ::1] t = tmp
    cdef unsigned char[:, ::1] d = dst
    cdef int it, i, j, k, lo, hi
    cdef unsigned char v
    if r == 0 or iterations == 0:
        return np.asarray(a)
    for it in range(iterations):
        for i in range(h):
            for j in range(w):
                v = 0
                lo = j - r if j - r > 0 else 0
                hi = j + r if j + r < w - 1 else w - 1
                for k in range(lo, hi + 1):
                    if a[i, k]:
                        v = 1
                        break
                t[i, j] = v
        for i in range(h):
            for j in range(w):
                v = 0
                lo = i - r if i - r > 0 else 0
                hi = i + r if i + r < h - 1 else h - 1
                for k in range(lo, hi + 1):
                    if t[k, j]:
                        v = 1
                        break
                d[i, j] = v
        a[:, :] = d
    return np.asarray(a)


def binary_erode(bits, int size, int iterations=1):
    """Erode with a square structuring element; border counts as 0."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] src = \
        np.ascontiguousarray(bits, dtype=np.uint8)
    cdef int h = src.shape[0]
    cdef int w = src.shape[1]
    cdef int r = size // 2
    cdef cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] tmp = np.zeros((h, w), dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] dst = np.zeros((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] a = src.copy()
    cdef unsigned char[:, ::1] t = tmp
    cdef unsigned char[:, ::1] d = dst
    cdef int it, i, j, k
    cdef unsigned char v
    if r == 0 or iterations == 0:
        return np.asarray(a)
    for it in range(iterations):
        for i in range(h):
            for j in range(w):
                if j < r or j >= w - r:
                    t[i, j] = 0
                    continue
                v = 1
                for k in range(j - r, j + r + 1):
                    if not a[i, k]:
                        v = 0
                        break
                t[i, j] = v
        for i in range(h):
            for j in range(w):
                if i < r or i >= h - r:
                    d[i, j] = 0
                    continue
                v = 1
                for k in range(i - r, i + r + 1):
                    if not t[k, j]:
                        v = 0
                        break
                d[i, j] = v
        a[:, :] = d
    return np.asarray(a)


def zhang_suen_thin(bits):
    """Thin to a one-pixel skeleton (Zhang-Suen); fixpoint on re-application."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] src = \
        np.ascontiguousarray(bits, dtype=np.uint8)
    cdef int h = src.shape[0]
    cdef int w = src.shape[1]
    # pad by one so neighbour reads never leave the buffer
    cdef cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] padded = np.zeros((h + 2, w + 2), dtype=np.uint8)
    padded[1:h + 1, 1:w + 1] = src
    cdef unsigned char[:, ::1] img = padded
    cdef cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] marks = np.zeros((h + 2, w + 2), dtype=np.uint8)
    cdef unsigned char[:, ::1] m = marks
    cdef int i, j, step
    cdef int p2, p3, p4, p5, p6, p7, p8, p9, b, a
    cdef bint removed_any, removed_step
    removed_any = True
    while removed_any:
        removed_any = False
        for step in range(2):
            removed_step = False
            for i in range(1, h + 1):
                for j in range(1, w + 1):
                    if not img[i, j]:
                        continue
                    p2 = img[i - 1, j]
                    p3 = img[i - 1, j + 1]
                    p4 = img[i, j + 1]
                    p5 = img[i + 1, j + 1]
                    p6 = img[i + 1, j]
                    p7 = img[i + 1, j - 1]
                    p8 = img[i, j - 1]
                    p9 = img[i - 1, j - 1]
                    b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9
                    if b < 2 or b > 6:
                        continue
                    a = 0
                    if p2 == 0 and p3 == 1: a += 1
                    if p3 == 0 and p4 == 1: a += 1
                    if p4 == 0 and p5 == 1: a += 1
                    if p5 == 0 and p6 == 1: a += 1
                    if p6 == 0 and p7 == 1: a += 1
                    if p7 == 0 and p8 == 1: a += 1
                    if p8 == 0 and p9 == 1: a += 1
                    if p9 == 0 and p2 == 1: a += 1
                    if a != 1:
                        continue
                    if step == 0:
                        if p2 * p4 * p6 != 0 or p4 * p6 * p8 != 0:
                            continue
                    else:
                        if p2 * p4 * p8 != 0 or p2 * p6 * p8 != 0:
                            continue
                    m[i, j] = 1
                    removed_step = True
            if removed_step:
                removed_any = True
                for i in range(1, h + 1):
                    for j in range(1, w + 1):
                        if m[i, j]:
                            img[i, j] = 0
                            m[i, j] = 0
    return np.ascontiguousarray(padded[1:h + 1, 1:w + 1])


def label_components(bits):
    """8-connected labelling; labels 1..count in row-major first-occurrence order."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] src = \
        np.ascontiguousarray(bits, dtype=np.uint8)
    cdef int h = src.shape[0]
    cdef int w = src.shape[1]
    cdef unsigned char[:, ::1] a = src
    cdef cnp.ndarray[cnp.int32_t, ndim=2, mode="c"] out = np.zeros((h, w), dtype=np.int32)
    cdef int[:, ::1] lab = out
    cdef cnp.ndarray[cnp.int32_t, ndim=1, mode="c"] parent_arr = \
        np.zeros(h * w // 2 + 2, dtype=np.int32)
    cdef int[::1] parent = parent_arr
    cdef int next_label = 1
    cdef int i, j, k, best, root, cand
    cdef int neigh[4]
    cdef int n_neigh

    for i in range(h):
        for j in range(w):
            if not a[i, j]:
                continue
            n_neigh = 0
            if j > 0 and lab[i, j - 1]:
                neigh[n_neigh] = lab[i, j - 1]; n_neigh += 1
            if i > 0:
                if j > 0 and lab[i - 1, j - 1]:
                    neigh[n_neigh] = lab[i - 1, j - 1]; n_neigh += 1
                if lab[i - 1, j]:
                    neigh[n_neigh] = lab[i - 1, j]; n_neigh += 1
                if j < w - 1 and lab[i - 1, j + 1]:
                    neigh[n_neigh] = lab[i - 1, j + 1]; n_neigh += 1
            if n_neigh == 0:
                parent[next_label] = next_label
                lab[i, j] = next_label
                next_label += 1
                continue
            best = 0
            for k in range(n_neigh):
                root = neigh[k]
                while parent[root] != root:
                    root = parent[root]
                if best == 0 or root < best:
                    if best != 0 and root != best:
                        parent[best] = root
                    best = root
                elif root != best:
                    parent[root] = best
            lab[i, j] = best

    cdef cnp.ndarray[cnp.int32_t, ndim=1, mode="c"] rank_arr = \
        np.zeros(next_label, dtype=np.int32)
    cdef int[::1] rank = rank_arr
    cdef int count = 0
    for i in range(h):
        for j in range(w):
            if lab[i, j]:
                root = lab[i, j]
                while parent[root] != root:
                    root = parent[root]
                if rank[root] == 0:
                    count += 1
                    rank[root] = count
                lab[i, j] = rank[root]
    return out, count
