"""Naturality sweep over ladder morphisms, as a compiled kernel.

The number of marked vectors between chains grows multiplicatively with
chain length, so sweeping them dominates the retraction checks by orders
of magnitude.  Everything the sweep touches is a small integer table:
the composition table, the solver for closing squares, and per-chain
retraction data — ideal shape for an njit kernel.  The pure-Python
fallback lives next to the checker; RELCAT_DISABLE_NUMBA=1 selects it.

The kernel enumerates the vectors in the same nested order as the
fallback and stops at the first violation, returning

    (status, source chain, target chain, position, scanned)

with status 0 = clean, 1 = a naturality square fails, 2 = an aligned
vector is moved by the retraction, 3 = the scan budget ran out.
"""

from __future__ import annotations

from ._snf import njit, numba_enabled


def sweep_ready(k: int, n_mor: int) -> bool:
    """Whether the kernel applies: compiled path on, k and tables in range."""
    return numba_enabled() and 0 <= k <= 2 and 0 < n_mor <= 2000


@njit(cache=True)
def sweep_kernel(  # pragma: no cover - compiled
    k,
    chain_objs,
    chain_mors,
    comp,
    cod,
    mo_ptr,
    mo_pool,
    sol_start,
    sol_cnt,
    sol_pool,
    shift,
    etas,
    r_objs,
    aligned,
    lookup,
    n_mor,
    budget,
):
    count = 0
    nc = chain_objs.shape[0]
    if k == 0:
        for a in range(nc):
            o0 = chain_objs[a, 0]
            for i0 in range(mo_ptr[o0], mo_ptr[o0 + 1]):
                u0 = mo_pool[i0]
                count += 1
                if budget >= 0 and count > budget:
                    return 3, a, -1, -1, count
                y = lookup[cod[u0]]
                im0 = shift[r_objs[a, 0], u0]
                if comp[etas[y, 0], u0] != comp[im0, etas[a, 0]]:
                    return 1, a, y, 0, count
                if aligned[a] == 1 and aligned[y] == 1 and im0 != u0:
                    return 2, a, y, 0, count
    elif k == 1:
        for a in range(nc):
            o0 = chain_objs[a, 0]
            o1 = chain_objs[a, 1]
            m0 = chain_mors[a, 0]
            for i0 in range(mo_ptr[o0], mo_ptr[o0 + 1]):
                u0 = mo_pool[i0]
                for i1 in range(mo_ptr[o1], mo_ptr[o1 + 1]):
                    u1 = mo_pool[i1]
                    c1 = comp[u1, m0]
                    s1 = sol_start[u0, c1]
                    for j1 in range(sol_cnt[u0, c1]):
                        t1 = sol_pool[s1 + j1]
                        count += 1
                        if budget >= 0 and count > budget:
                            return 3, a, -1, -1, count
                        y = lookup[t1]
                        im0 = shift[r_objs[a, 0], u1]
                        if comp[etas[y, 0], u0] != comp[im0, etas[a, 0]]:
                            return 1, a, y, 0, count
                        im1 = shift[r_objs[a, 1], u1]
                        if comp[etas[y, 1], u1] != comp[im1, etas[a, 1]]:
                            return 1, a, y, 1, count
                        if aligned[a] == 1 and aligned[y] == 1:
                            if im0 != u0 or im1 != u1:
                                return 2, a, y, 0, count
    else:
        for a in range(nc):
            o0 = chain_objs[a, 0]
            o1 = chain_objs[a, 1]
            o2 = chain_objs[a, 2]
            m0 = chain_mors[a, 0]
            m1 = chain_mors[a, 1]
            for i0 in range(mo_ptr[o0], mo_ptr[o0 + 1]):
                u0 = mo_pool[i0]
                for i1 in range(mo_ptr[o1], mo_ptr[o1 + 1]):
                    u1 = mo_pool[i1]
                    c1 = comp[u1, m0]
                    s1 = sol_start[u0, c1]
                    for j1 in range(sol_cnt[u0, c1]):
                        t1 = sol_pool[s1 + j1]
                        for i2 in range(mo_ptr[o2], mo_ptr[o2 + 1]):
                            u2 = mo_pool[i2]
                            c2 = comp[u2, m1]
                            s2 = sol_start[u1, c2]
                            for j2 in range(sol_cnt[u1, c2]):
                                t2 = sol_pool[s2 + j2]
                                count += 1
                                if budget >= 0 and count > budget:
                                    return 3, a, -1, -1, count
                                y = lookup[t1 * n_mor + t2]
                                im0 = shift[r_objs[a, 0], u2]
                                if comp[etas[y, 0], u0] != comp[im0, etas[a, 0]]:
                                    return 1, a, y, 0, count
                                im1 = shift[r_objs[a, 1], u2]
                                if comp[etas[y, 1], u1] != comp[im1, etas[a, 1]]:
                                    return 1, a, y, 1, count
                                im2 = shift[r_objs[a, 2], u2]
                                if comp[etas[y, 2], u2] != comp[im2, etas[a, 2]]:
                                    return 1, a, y, 2, count
                                if aligned[a] == 1 and aligned[y] == 1:
                                    if im0 != u0 or im1 != u1 or im2 != u2:
                                        return 2, a, y, 0, count
    return 0, -1, -1, -1, count
