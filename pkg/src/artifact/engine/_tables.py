"""Precomputed arrays driving the exact search kernels.

Everything the inner loop touches is a flat numpy array indexed by the
mixed-radix element index (first coordinate least significant, matching
``GroupSpec.element_at``): an |G| x |G| addition table, negation and
element-order tables, and the per-order least-index table used for
first-branch symmetry reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..groups import GroupSpec

#: Exact search allocates an |G| x |G| int32 table; keep it desk-scale.
SEARCH_SIZE_LIMIT = 4096


class SearchSizeError(ValueError):
    """Group too large for exact search (table allocation would be excessive)."""


@dataclass(frozen=True)
class SearchTables:
    n: int
    add: np.ndarray  # (n, n) int32, add[i, j] = index of element_i + element_j
    neg: np.ndarray  # (n,) int32, index of -element_i
    order: np.ndarray  # (n,) int32, element order
    ordm1: np.ndarray  # (n,) int32, order - 1 = max useful multiplicity
    class_reps: np.ndarray  # (n,) uint8, 1 iff i is the least index of its order class


@lru_cache(maxsize=32)
def build_tables(group: GroupSpec) -> SearchTables:
    n = group.size
    if n > SEARCH_SIZE_LIMIT:
        raise SearchSizeError(
            f"group of order {n} exceeds the exact-search limit {SEARCH_SIZE_LIMIT}"
        )
    moduli = np.array(group.moduli, dtype=np.int64)
    r = len(group.moduli)
    if r == 0:
        # Trivial group: single element, index 0.
        return SearchTables(
            n=1,
            add=np.zeros((1, 1), dtype=np.int32),
            neg=np.zeros(1, dtype=np.int32),
            order=np.ones(1, dtype=np.int32),
            ordm1=np.zeros(1, dtype=np.int32),
            class_reps=np.zeros(1, dtype=np.uint8),
        )

    idx = np.arange(n, dtype=np.int64)
    coords = np.empty((n, r), dtype=np.int64)
    tmp = idx.copy()
    for i, m in enumerate(group.moduli):
        coords[:, i] = tmp % m
        tmp //= m
    weights = np.empty(r, dtype=np.int64)
    acc = 1
    for i, m in enumerate(group.moduli):
        weights[i] = acc
        acc *= m

    add = np.empty((n, n), dtype=np.int32)
    # Chunk rows to bound the (chunk, n, r) temporary.
    chunk = max(1, min(n, (1 << 22) // max(1, n * r)))
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        s = (coords[lo:hi, None, :] + coords[None, :, :]) % moduli
        add[lo:hi] = (s * weights).sum(axis=2).astype(np.int32)

    neg = (((-coords) % moduli) * weights).sum(axis=1).astype(np.int32)

    order = np.ones(n, dtype=np.int64)
    for i, m in enumerate(group.moduli):
        comp = m // np.gcd(coords[:, i], m)
        order = np.lcm(order, comp)
    order = order.astype(np.int32)

    # Least index per element order, for homocyclic first-branch reduction.
    class_reps = np.zeros(n, dtype=np.uint8)
    seen: set[int] = set()
    for i in range(1, n):
        o = int(order[i])
        if o not in seen:
            seen.add(o)
            class_reps[i] = 1

    return SearchTables(
        n=n,
        add=np.ascontiguousarray(add),
        neg=np.ascontiguousarray(neg),
        order=np.ascontiguousarray(order),
        ordm1=np.ascontiguousarray(order - 1),
        class_reps=class_reps,
    )
