"""Pure-Python kernels: reference semantics for the compiled extension.

These are the exact contracts the Cython module implements; the test
suite asserts parity between the two backends. Inputs are sequences of
non-negative ints (word ids) so the inner loops compare machine words,
not strings.
"""

from __future__ import annotations


def lcs_substring_len(a: list[int], b: list[int]) -> int:
    """Length of the longest common contiguous run between ``a`` and ``b``."""
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return 0
    if m > n:  # iterate over the shorter row
        a, b = b, a
        n, m = m, n
    best = 0
    prev = [0] * (m + 1)
    cur = [0] * (m + 1)
    for i in range(1, n + 1):
        ai = a[i - 1]
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                v = prev[j - 1] + 1
                cur[j] = v
                if v > best:
                    best = v
            else:
                cur[j] = 0
        prev, cur = cur, prev
    return best


def edit_distance(a: list[int], b: list[int]) -> int:
    """Word-level Levenshtein distance (unit insert/delete/substitute costs)."""
    n, m = len(a), len(b)
    if n == 0:
        return m
    if m == 0:
        return n
    if m > n:
        a, b = b, a
        n, m = m, n
    prev = list(range(m + 1))
    cur = [0] * (m + 1)
    for i in range(1, n + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ai == b[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        prev, cur = cur, prev
    return prev[m]


def hll_update(registers: bytearray, hashes, p: int) -> None:
    """Fold 64-bit hashes into logarithmic-counting registers (max rank).

    The top ``p`` bits of each hash select a register; the rank is one
    plus the number of leading zeros in the remaining ``64 - p`` bits.
    """
    w = 64 - p
    rem_mask = (1 << w) - 1
    for h in hashes:
        idx = h >> w
        rem = h & rem_mask
        rank = w + 1 if rem == 0 else w - rem.bit_length() + 1
        if rank > registers[idx]:
            registers[idx] = rank
