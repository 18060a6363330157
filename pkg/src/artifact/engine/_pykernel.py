"""Pure-Python depth-first search kernel.

Drop-in equivalent of the compiled kernel in ``_ckernel.pyx``: identical
traversal order, pruning decisions, candidate recording, node counts, and
stop-on-hint behaviour.  Used automatically when the compiled extension is
unavailable (or when ``ARTIFACT_FORCE_PY_KERNEL`` is set).

The search walks multisets of nonzero group elements as ascending sequences
of element indices, one copy per tree level.  A node at depth ``t`` is the
multiset of the first ``t`` pushed indices; a child appends one copy of an
index ``>=`` the last pushed index.  Admissible children keep the multiset
free of nonempty zero-sum submultisets, maintained incrementally through
per-level bitmaps Q with Q[i] = 1 iff -i is a subset sum (element i then
being inadmissible); appending j updates Q' = Q | Q[add[j]] plus the
direct mark Q'[-j] = 1, keeping membership tests gather-free.

Candidate values:

* plain mode: every node is a candidate with value ``t`` (the multiset
  itself, whose repeat excess is capped on push);
* closed mode: a node is a candidate with value ``t + 1`` when appending
  the inverse of the running sum keeps the repeat excess within budget;
  the resulting length-``t+1`` multiset sums to zero and is minimal.
"""

from __future__ import annotations

import time
from bisect import insort

import numpy as np

KERNEL_NAME = "python"


def explore(
    add: np.ndarray,
    neg: np.ndarray,
    ordm1: np.ndarray,
    capl: np.ndarray,
    first_allowed: np.ndarray,
    pair_allowed: np.ndarray,
    closed: bool,
    kk: int,
    level: int,
    prefix: list[int],
    hint: int,
    shared_best: np.ndarray,
    deadline: float,
) -> tuple[int, list[int] | None, int, bool, bool]:
    """Explore the subtree rooted at ``prefix``.

    Parameters mirror the compiled kernel: ``kk`` is the repeat-excess
    budget (-1 for unconstrained), ``level`` the excess threshold,
    ``hint`` a trusted upper bound on the candidate value (-1 disables;
    the first candidate reaching it stops the search), ``shared_best`` a
    one-element int64 array advising the prune limit across workers, and
    ``deadline`` a ``time.monotonic()`` instant (0 disables).

    Returns ``(value, witness, nodes, aborted, hint_hit)`` where
    ``witness`` is the ascending index list of the best candidate
    (including the appended inverse element in closed mode), ``value`` is
    -1 if no valid candidate exists in the subtree, and ``nodes`` counts
    visited tree nodes.
    """
    n = int(neg.shape[0])
    cap = n + 2
    R = np.zeros((cap, n), dtype=np.uint8)
    seq = [0] * cap
    sigidx = [0] * cap
    cmv = [0] * cap
    jnext = [0] * cap
    runrem = [0] * cap
    vcount = [0] * n

    add_l = add  # numpy row gather below; scalar reads via int() casts
    neg_l = neg.tolist()
    ordm1_l = ordm1.tolist()
    capl_l = capl.tolist()
    first_l = first_allowed.tolist()
    pair_active = pair_allowed.shape[0] > 1
    pair_l = pair_allowed.tolist() if pair_active else None

    # Replay the prefix to build the root state at depth t0.
    t = 0
    for j in prefix:
        row = R[t]
        nrow = R[t + 1]
        np.bitwise_or(row, row[add_l[j]], out=nrow)
        nrow[neg_l[j]] = 1
        sigidx[t + 1] = int(add_l[sigidx[t], j])
        d = 1 if (kk >= 0 and vcount[j] + 1 > level) else 0
        cmv[t + 1] = cmv[t] + d
        vcount[j] += 1
        seq[t + 1] = j
        t += 1
    t0 = t

    best = -1
    best_w: list[int] | None = None
    nodes = 0
    aborted = False
    hint_hit = False
    entering = True

    while True:
        if entering:
            nodes += 1
            if deadline > 0.0 and (nodes & 8191) == 0 and time.monotonic() > deadline:
                aborted = True
                break
            # Candidate at this node.
            if closed:
                x = neg_l[sigidx[t]]
                d = 1 if (kk >= 0 and vcount[x] + 1 > level) else 0
                valid = kk < 0 or cmv[t] + d <= kk
                val = t + 1
            else:
                x = -1
                valid = True
                val = t
            if valid:
                if val > best:
                    best = val
                    best_w = seq[1 : t + 1].copy()
                    if closed:
                        insort(best_w, x)
                    if best > shared_best[0]:
                        shared_best[0] = best
                elif val == best and closed:
                    w = seq[1 : t + 1].copy()
                    insort(w, x)
                    if w < best_w:
                        best_w = w
                if hint >= 0 and val >= hint:
                    hint_hit = True
                    break
            # Initialise the child scan for this level.
            start = seq[t] if t >= 1 else 1
            jnext[t] = start
            row = R[t]
            total = 0
            for i in range(start, n):
                if row[i] == 0:
                    total += capl_l[i]
            runrem[t] = total
            entering = False

        # Scan children of level t from jnext[t].
        row = R[t]
        pushed = False
        j = jnext[t]
        while j < n:
            adm = row[j] == 0
            if adm:
                runrem[t] -= capl_l[j]
            ok = adm and vcount[j] < ordm1_l[j]
            if ok and t == 0 and first_l[j] == 0:
                ok = False
            if ok and t == 1 and pair_active and pair_l[seq[1]][j] == 0:
                ok = False
            d = 0
            if ok and kk >= 0:
                d = 1 if vcount[j] + 1 > level else 0
                ok = cmv[t] + d <= kk
            if ok:
                rem_j = capl_l[j] - vcount[j] - 1
                if rem_j < 0:
                    rem_j = 0
                ub = t + 1 + rem_j + runrem[t]
                if kk >= 0:
                    ub += kk - cmv[t] - d
                if closed:
                    ub += 1
                limit = best
                sb = int(shared_best[0])
                if sb > limit:
                    limit = sb
                if ub >= limit:
                    jnext[t] = j + 1
                    nrow = R[t + 1]
                    np.bitwise_or(row, row[add_l[j]], out=nrow)
                    nrow[neg_l[j]] = 1
                    sigidx[t + 1] = int(add_l[sigidx[t], j])
                    cmv[t + 1] = cmv[t] + d
                    vcount[j] += 1
                    seq[t + 1] = j
                    t += 1
                    entering = True
                    pushed = True
                    break
            j += 1
        if pushed:
            continue
        if t == t0:
            break
        vcount[seq[t]] -= 1
        t -= 1

    return best, best_w, nodes, aborted, hint_hit
