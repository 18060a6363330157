"""Symmetry reduction masks for homocyclic groups.

For a group presented with all moduli equal (C_m ^ r), the automorphism
group acts by invertible r x r matrices over Z_m, and orbits of single
elements are exactly the order classes, with the least index of each class
an axis point (m/d) * e_1.  Searches over multisets keyed by ascending
index may therefore restrict the first element to those least
representatives: every multiset has an automorphic image whose minimum
index is a representative (all smaller indices belong to strictly larger
orders, which the image cannot contain).

The second element can be restricted further.  Fix the first element rho;
among all images of a multiset under the stabiliser of rho, pick one whose
second-smallest index is minimal.  Stabiliser maps cannot push any element
below index(rho) (they preserve orders, and indices below rho belong to
larger orders), so the minimum stays rho; and if the second element were
not the least index of its stabiliser orbit, mapping it lower would
contradict minimality.  Restricting second elements to per-orbit least
indices therefore keeps at least one image of every multiset enumerable.

Stabiliser orbits are computed from an explicit generator list.  The list
need not generate the full stabiliser: missing generators only split
orbits further, which weakens the reduction but never loses images, so
soundness does not depend on completeness.  Every generated map is checked
to be a bijection fixing rho before use.
"""

from __future__ import annotations

import numpy as np

from ..groups import GroupSpec
from ._tables import SearchTables


def is_equal_moduli(group: GroupSpec) -> bool:
    """True when the presentation itself is C_m ^ r (all moduli equal)."""
    return len(group.moduli) >= 1 and len(set(group.moduli)) == 1


def _coords_and_weights(group: GroupSpec) -> tuple[np.ndarray, np.ndarray]:
    n = group.size
    r = len(group.moduli)
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
    return coords, weights


def _stabilizer_perms(
    group: GroupSpec, rho: int, coords: np.ndarray, weights: np.ndarray
) -> list[np.ndarray]:
    """Index permutations of automorphisms fixing the element at index rho.

    rho must be an axis point c * e_1; the admissible generators are the
    invertible matrices with first column congruent to e_1 modulo the
    order d of rho: transvections and unit scalings away from the first
    coordinate, first-row adds, column-1 adds in multiples of d, and
    first-coordinate unit scalings congruent to 1 mod d.
    """
    m = group.moduli[0]
    r = len(group.moduli)
    n = group.size
    if int(coords[rho, 1:].max(initial=0)) != 0:
        return []
    c = int(coords[rho, 0])
    d = m // int(np.gcd(c, m))

    mats: list[np.ndarray] = []

    def base() -> np.ndarray:
        return np.eye(r, dtype=np.int64)

    for i in range(1, r):
        for j in range(1, r):
            if i != j:
                mat = base()
                mat[i, j] = 1
                mats.append(mat)
    for j in range(1, r):
        mat = base()
        mat[0, j] = 1
        mats.append(mat)
    for i in range(1, r):
        mat = base()
        mat[i, 0] = d % m
        mats.append(mat)
    units = [u for u in range(2, m) if int(np.gcd(u, m)) == 1]
    for j in range(1, r):
        for u in units:
            mat = base()
            mat[j, j] = u
            mats.append(mat)
    for u in units:
        if u % d == 1:
            mat = base()
            mat[0, 0] = u
            mats.append(mat)

    perms: list[np.ndarray] = []
    ident = np.arange(n, dtype=np.int64)
    for mat in mats:
        new = (coords @ mat.T) % m
        perm = (new * weights).sum(axis=1)
        if perm[rho] != rho:
            continue
        if not np.array_equal(np.sort(perm), ident):
            continue
        perms.append(perm)
    return perms


def _orbit_minima(n: int, perms: list[np.ndarray]) -> np.ndarray:
    """For each index, the least index in its orbit under the permutations."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for perm in perms:
        plist = perm.tolist()
        for i in range(n):
            a, b = find(i), find(plist[i])
            if a != b:
                # Root at the smaller index so roots are orbit minima.
                if a < b:
                    parent[b] = a
                else:
                    parent[a] = b
    return np.array([find(i) for i in range(n)], dtype=np.int64)


def pair_mask(group: GroupSpec, tables: SearchTables) -> np.ndarray:
    """(n, n) uint8 mask: row g1 marks allowed second elements after g1.

    Rows are meaningful only for allowed first elements (order-class
    representatives); all other rows are left fully allowed.
    """
    n = tables.n
    mask = np.ones((n, n), dtype=np.uint8)
    if len(group.moduli) < 2:
        return mask
    coords, weights = _coords_and_weights(group)
    for rho in range(1, n):
        if tables.class_reps[rho] == 0:
            continue
        perms = _stabilizer_perms(group, rho, coords, weights)
        if not perms:
            continue
        minima = _orbit_minima(n, perms)
        mask[rho] = (minima == np.arange(n, dtype=np.int64)).astype(np.uint8)
        mask[rho, 0] = 0
    return mask
