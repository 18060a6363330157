# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled depth-first search kernel.

Semantically identical to ``_pykernel.explore`` (same traversal order,
pruning, candidate recording, node counts, and stop-on-hint behaviour);
the hot loop runs without the GIL so worker threads scale.
"""

import numpy as np

cimport numpy as cnp
from posix.time cimport CLOCK_MONOTONIC, clock_gettime, timespec

cnp.import_array()

KERNEL_NAME = "compiled"


cdef inline double _monotonic() noexcept nogil:
    cdef timespec ts
    clock_gettime(CLOCK_MONOTONIC, &ts)
    return ts.tv_sec + ts.tv_nsec * 1e-9


def explore(
    cnp.int32_t[:, ::1] add,
    cnp.int32_t[::1] neg,
    cnp.int32_t[::1] ordm1,
    cnp.int32_t[::1] capl,
    cnp.uint8_t[::1] first_allowed,
    cnp.uint8_t[:, ::1] pair_allowed,
    bint closed,
    long long kk,
    long long level,
    object prefix,
    long long hint,
    long long[::1] shared_best,
    double deadline,
):
    """See ``_pykernel.explore``; this is the GIL-free twin."""
    cdef int n = <int> neg.shape[0]
    cdef int cap = n + 2
    cdef bint pair_active = pair_allowed.shape[0] > 1

    R_arr = np.zeros((cap, n), dtype=np.uint8)
    seq_arr = np.zeros(cap, dtype=np.int32)
    sig_arr = np.zeros(cap, dtype=np.int32)
    cmv_arr = np.zeros(cap, dtype=np.int32)
    jnext_arr = np.zeros(cap, dtype=np.int32)
    runrem_arr = np.zeros(cap, dtype=np.int64)
    vcount_arr = np.zeros(n, dtype=np.int32)
    bestw_arr = np.zeros(cap, dtype=np.int32)
    tmpw_arr = np.zeros(cap, dtype=np.int32)

    cdef cnp.uint8_t[:, ::1] R = R_arr
    cdef cnp.int32_t[::1] seq = seq_arr
    cdef cnp.int32_t[::1] sigidx = sig_arr
    cdef cnp.int32_t[::1] cmv = cmv_arr
    cdef cnp.int32_t[::1] jnext = jnext_arr
    cdef long long[::1] runrem = runrem_arr
    cdef cnp.int32_t[::1] vcount = vcount_arr
    cdef cnp.int32_t[::1] bestw = bestw_arr
    cdef cnp.int32_t[::1] tmpw = tmpw_arr

    cdef int t = 0
    cdef int j, i, x, p, q, start, negj
    cdef int d, pushed, entering, valid, smaller
    cdef long long best = -1
    cdef int best_len = -1
    cdef long long nodes = 0
    cdef long long val, total, rem_j, ub, limit, sb
    cdef bint aborted = False
    cdef bint hint_hit = False
    cdef int t0

    # Replay the prefix to build the root state.  R is kept in negated
    # index space: R[t, i] = 1 iff -i is a subset sum (i inadmissible).
    for pj in prefix:
        j = <int> pj
        for i in range(n):
            R[t + 1, i] = R[t, i] | R[t, add[j, i]]
        R[t + 1, neg[j]] = 1
        sigidx[t + 1] = add[sigidx[t], j]
        d = 1 if (kk >= 0 and vcount[j] + 1 > level) else 0
        cmv[t + 1] = cmv[t] + d
        vcount[j] += 1
        seq[t + 1] = j
        t += 1
    t0 = t

    entering = 1
    with nogil:
        while True:
            if entering:
                nodes += 1
                if deadline > 0.0 and (nodes & 8191) == 0 and _monotonic() > deadline:
                    aborted = True
                    break
                # Candidate at this node.
                if closed:
                    x = neg[sigidx[t]]
                    d = 1 if (kk >= 0 and vcount[x] + 1 > level) else 0
                    valid = 1 if (kk < 0 or cmv[t] + d <= kk) else 0
                    val = t + 1
                else:
                    x = -1
                    valid = 1
                    val = t
                if valid:
                    if val > best:
                        best = val
                        best_len = <int> val
                        p = 0
                        q = 1
                        if closed:
                            while q <= t and seq[q] <= x:
                                bestw[p] = seq[q]
                                p += 1
                                q += 1
                            bestw[p] = x
                            p += 1
                        while q <= t:
                            bestw[p] = seq[q]
                            p += 1
                            q += 1
                        if best > shared_best[0]:
                            shared_best[0] = best
                    elif val == best and closed:
                        p = 0
                        q = 1
                        while q <= t and seq[q] <= x:
                            tmpw[p] = seq[q]
                            p += 1
                            q += 1
                        tmpw[p] = x
                        p += 1
                        while q <= t:
                            tmpw[p] = seq[q]
                            p += 1
                            q += 1
                        smaller = 0
                        for i in range(best_len):
                            if tmpw[i] != bestw[i]:
                                if tmpw[i] < bestw[i]:
                                    smaller = 1
                                break
                        if smaller:
                            for i in range(best_len):
                                bestw[i] = tmpw[i]
                    if hint >= 0 and val >= hint:
                        hint_hit = True
                        break
                # Initialise the child scan for this level.
                start = seq[t] if t >= 1 else 1
                jnext[t] = start
                total = 0
                for i in range(start, n):
                    if R[t, i] == 0:
                        total += capl[i]
                runrem[t] = total
                entering = 0

            # Scan children of level t from jnext[t].
            pushed = 0
            j = jnext[t]
            while j < n:
                if R[t, j] == 0:
                    runrem[t] -= capl[j]
                    if (
                        vcount[j] < ordm1[j]
                        and not (t == 0 and first_allowed[j] == 0)
                        and not (t == 1 and pair_active and pair_allowed[seq[1], j] == 0)
                    ):
                        d = 0
                        valid = 1
                        if kk >= 0:
                            d = 1 if vcount[j] + 1 > level else 0
                            valid = 1 if cmv[t] + d <= kk else 0
                        if valid:
                            rem_j = capl[j] - vcount[j] - 1
                            if rem_j < 0:
                                rem_j = 0
                            ub = t + 1 + rem_j + runrem[t]
                            if kk >= 0:
                                ub += kk - cmv[t] - d
                            if closed:
                                ub += 1
                            limit = best
                            sb = shared_best[0]
                            if sb > limit:
                                limit = sb
                            if ub >= limit:
                                jnext[t] = j + 1
                                for i in range(n):
                                    R[t + 1, i] = R[t, i] | R[t, add[j, i]]
                                R[t + 1, neg[j]] = 1
                                sigidx[t + 1] = add[sigidx[t], j]
                                cmv[t + 1] = cmv[t] + d
                                vcount[j] += 1
                                seq[t + 1] = j
                                t += 1
                                entering = 1
                                pushed = 1
                                break
                j += 1
            if pushed:
                continue
            if t == t0:
                break
            vcount[seq[t]] -= 1
            t -= 1

    if best < 0:
        return -1, None, int(nodes), bool(aborted), bool(hint_hit)
    witness = [int(bestw[i]) for i in range(best_len)]
    return int(best), witness, int(nodes), bool(aborted), bool(hint_hit)
