# cython: language_level=3
"""Compiled kernels for the per-record hot loops.

Semantics are pinned by ``capsforge._kernels._pure``; the test suite
asserts parity. Keep both in sync.
"""

from cpython.mem cimport PyMem_Free, PyMem_Malloc

from libc.stdint cimport int64_t, uint8_t, uint64_t


cdef int64_t* _as_i64(object seq, Py_ssize_t *out_len) except NULL:
    cdef Py_ssize_t n = len(seq)
    cdef int64_t *buf = <int64_t *> PyMem_Malloc(max(n, 1) * sizeof(int64_t))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    try:
        for i in range(n):
            buf[i] = seq[i]
    except Exception:
        PyMem_Free(buf)
        raise
    out_len[0] = n
    return buf


def lcs_substring_len(object a, object b):
    """Length of the longest common contiguous run between ``a`` and ``b``."""
    cdef Py_ssize_t n = 0, m = 0
    cdef int64_t *xa = _as_i64(a, &n)
    cdef int64_t *xb
    try:
        xb = _as_i64(b, &m)
    except Exception:
        PyMem_Free(xa)
        raise
    cdef int64_t *tmp
    cdef Py_ssize_t t
    if m > n:
        tmp = xa; xa = xb; xb = tmp
        t = n; n = m; m = t
    cdef Py_ssize_t *prev = NULL
    cdef Py_ssize_t *cur = NULL
    cdef Py_ssize_t *swap
    cdef Py_ssize_t best = 0, i, j, v
    cdef int64_t ai
    try:
        if n == 0 or m == 0:
            return 0
        prev = <Py_ssize_t *> PyMem_Malloc((m + 1) * sizeof(Py_ssize_t))
        cur = <Py_ssize_t *> PyMem_Malloc((m + 1) * sizeof(Py_ssize_t))
        if prev == NULL or cur == NULL:
            raise MemoryError()
        for j in range(m + 1):
            prev[j] = 0
            cur[j] = 0
        for i in range(1, n + 1):
            ai = xa[i - 1]
            for j in range(1, m + 1):
                if ai == xb[j - 1]:
                    v = prev[j - 1] + 1
                    cur[j] = v
                    if v > best:
                        best = v
                else:
                    cur[j] = 0
            swap = prev; prev = cur; cur = swap
        return best
    finally:
        PyMem_Free(xa)
        PyMem_Free(xb)
        if prev != NULL:
            PyMem_Free(prev)
        if cur != NULL:
            PyMem_Free(cur)


def edit_distance(object a, object b):
    """Word-level Levenshtein distance (unit insert/delete/substitute costs)."""
    cdef Py_ssize_t n = 0, m = 0
    cdef int64_t *xa = _as_i64(a, &n)
    cdef int64_t *xb
    try:
        xb = _as_i64(b, &m)
    except Exception:
        PyMem_Free(xa)
        raise
    cdef int64_t *tmp
    cdef Py_ssize_t t
    if m > n:
        tmp = xa; xa = xb; xb = tmp
        t = n; n = m; m = t
    cdef Py_ssize_t *prev = NULL
    cdef Py_ssize_t *cur = NULL
    cdef Py_ssize_t *swap
    cdef Py_ssize_t i, j, cost, best, result
    cdef int64_t ai
    try:
        if n == 0:
            return m
        if m == 0:
            return n
        prev = <Py_ssize_t *> PyMem_Malloc((m + 1) * sizeof(Py_ssize_t))
        cur = <Py_ssize_t *> PyMem_Malloc((m + 1) * sizeof(Py_ssize_t))
        if prev == NULL or cur == NULL:
            raise MemoryError()
        for j in range(m + 1):
            prev[j] = j
        for i in range(1, n + 1):
            cur[0] = i
            ai = xa[i - 1]
            for j in range(1, m + 1):
                cost = 0 if ai == xb[j - 1] else 1
                best = prev[j] + 1
                if cur[j - 1] + 1 < best:
                    best = cur[j - 1] + 1
                if prev[j - 1] + cost < best:
                    best = prev[j - 1] + cost
                cur[j] = best
            swap = prev; prev = cur; cur = swap
        result = prev[m]
        return result
    finally:
        PyMem_Free(xa)
        PyMem_Free(xb)
        if prev != NULL:
            PyMem_Free(prev)
        if cur != NULL:
            PyMem_Free(cur)


def hll_update(object registers, object hashes, int p):
    """Fold 64-bit hashes into logarithmic-counting registers (max rank)."""
    cdef uint8_t[::1] regs = registers
    cdef int w = 64 - p
    cdef uint64_t rem_mask = (<uint64_t> 1 << w) - 1
    cdef uint64_t h, rem, idx
    cdef int rank
    for obj in hashes:
        h = <uint64_t> obj
        idx = h >> w
        rem = h & rem_mask
        if rem == 0:
            rank = w + 1
        else:
            rank = 1
            while (rem >> (w - rank)) == 0:
                rank += 1
        if rank > regs[idx]:
            regs[idx] = <uint8_t> rank
