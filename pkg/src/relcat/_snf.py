"""Smith normal form over the integers.

Two interchangeable implementations: an int64 kernel compiled with numba,
and an exact arbitrary-precision fallback in pure Python.  The kernel bails
out (returning a flag) whenever an intermediate entry leaves the safe range,
in which case the caller silently reruns the exact path, so results are
always exact.  Set RELCAT_DISABLE_NUMBA=1 to force the fallback; the
benchmark in bench/ compares the two.
"""

from __future__ import annotations

import math
import os
from typing import Sequence

import numpy as np

try:  # pragma: no cover - exercised indirectly
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


#: entries beyond this bound trigger the exact-path bailout; products of two
#: in-range values still fit comfortably in int64
_LIMIT = 1 << 31


def numba_enabled() -> bool:
    return HAS_NUMBA and os.environ.get("RELCAT_DISABLE_NUMBA", "") != "1"


@njit(cache=True)
def _diagonalize_int64(mat):  # pragma: no cover - compiled
    m, n = mat.shape
    rank = 0
    for t in range(min(m, n)):
        while True:
            best = 0
            pi = -1
            pj = -1
            for i in range(t, m):
                for j in range(t, n):
                    v = mat[i, j]
                    if v != 0:
                        a = -v if v < 0 else v
                        if pi < 0 or a < best:
                            best = a
                            pi = i
                            pj = j
            if pi < 0:
                return rank
            if pi != t:
                for k in range(n):
                    tmp = mat[t, k]
                    mat[t, k] = mat[pi, k]
                    mat[pi, k] = tmp
            if pj != t:
                for k in range(m):
                    tmp = mat[k, t]
                    mat[k, t] = mat[k, pj]
                    mat[k, pj] = tmp
            if mat[t, t] < 0:
                for k in range(n):
                    mat[t, k] = -mat[t, k]
            pivot = mat[t, t]
            dirty = False
            for i in range(t + 1, m):
                v = mat[i, t]
                if v != 0:
                    q = v // pivot
                    if q != 0:
                        for k in range(t, n):
                            mat[i, k] -= q * mat[t, k]
                            a = mat[i, k]
                            if (a if a > 0 else -a) > _LIMIT:
                                return -1
                    if mat[i, t] != 0:
                        dirty = True
            if dirty:
                continue
            for j in range(t + 1, n):
                v = mat[t, j]
                if v != 0:
                    q = v // pivot
                    if q != 0:
                        for k in range(t, m):
                            mat[k, j] -= q * mat[k, t]
                            a = mat[k, j]
                            if (a if a > 0 else -a) > _LIMIT:
                                return -1
                    if mat[t, j] != 0:
                        dirty = True
            if not dirty:
                break
        rank += 1
    return rank


def _diagonalize_exact(rows: list[list[int]]) -> int:
    """Same pivoting strategy as the kernel, on Python integers."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    rank = 0
    for t in range(min(m, n)):
        while True:
            best = None
            piv = None
            for i in range(t, m):
                row = rows[i]
                for j in range(t, n):
                    v = row[j]
                    if v != 0:
                        a = abs(v)
                        if best is None or a < best:
                            best = a
                            piv = (i, j)
            if piv is None:
                return rank
            pi, pj = piv
            if pi != t:
                rows[t], rows[pi] = rows[pi], rows[t]
            if pj != t:
                for row in rows:
                    row[t], row[pj] = row[pj], row[t]
            if rows[t][t] < 0:
                rows[t] = [-v for v in rows[t]]
            pivot = rows[t][t]
            dirty = False
            for i in range(t + 1, m):
                v = rows[i][t]
                if v:
                    q = v // pivot
                    if q:
                        top = rows[t]
                        rows[i] = [a - q * b for a, b in zip(rows[i], top)]
                    if rows[i][t]:
                        dirty = True
            if dirty:
                continue
            for j in range(t + 1, n):
                v = rows[t][j]
                if v:
                    q = v // pivot
                    if q:
                        for row in rows:
                            row[j] -= q * row[t]
                    if rows[t][j]:
                        dirty = True
            if not dirty:
                break
        rank += 1
    return rank


def _divisibility_chain(diag: list[int]) -> tuple[int, ...]:
    d = [abs(v) for v in diag]
    changed = True
    while changed:
        changed = False
        for i in range(len(d)):
            for j in range(i + 1, len(d)):
                if d[j] % d[i]:
                    g = math.gcd(d[i], d[j])
                    d[i], d[j] = g, d[i] * d[j] // g
                    changed = True
        d.sort()
    return tuple(d)


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], int]:
    """Invariant factors (d1 | d2 | ...) and rank of an integer matrix.

    Rows may be any sequence of ints; an empty matrix has no invariants.
    """
    rows = [list(map(int, row)) for row in matrix]
    m = len(rows)
    n = len(rows[0]) if m else 0
    if m == 0 or n == 0:
        return (), 0
    if any(len(row) != n for row in rows):
        raise ValueError("ragged matrix")

    if numba_enabled() and all(abs(v) <= _LIMIT for row in rows for v in row):
        arr = np.array(rows, dtype=np.int64)
        rank = int(_diagonalize_int64(arr))
        if rank >= 0:
            diag = [int(arr[i, i]) for i in range(rank)]
            return _divisibility_chain(diag), rank

    rank = _diagonalize_exact(rows)
    diag = [rows[i][i] for i in range(rank)]
    return _divisibility_chain(diag), rank


def rank_of(matrix: Sequence[Sequence[int]]) -> int:
    return smith_normal_form(matrix)[1]
