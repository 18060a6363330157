"""Finite abelian groups presented as direct sums of cyclic groups.

A group is described by its list of cyclic orders (``moduli``); elements are
coordinate tuples with coordinate ``i`` taken mod ``moduli[i]``. Every element
also has a flat integer index in ``[0, |G|)`` under a mixed-radix encoding
with the *first* coordinate least significant; reachability bitsets,
certificates, and search tables all address elements by that index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterator

#: Upper bound on |G| for constructing a group at all. Exact searches have a
#: much smaller limit (they allocate an |G| x |G| table); formula-level work
#: (canonical forms, structural bounds, predictions) only needs arithmetic.
GROUP_SIZE_LIMIT = 2**31


def _factorize(n: int) -> dict[int, int]:
    """Prime factorization as {prime: exponent} (trial division; moduli are small)."""
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


@dataclass(frozen=True)
class GroupSpec:
    """Immutable description of a finite abelian group ``C_{m_1} + ... + C_{m_r}``.

    Construct through :func:`make_group`, which validates the moduli.
    Instances are hashable and safe to share across threads; derived data is
    cached on first use.
    """

    moduli: tuple[int, ...]

    # -- structure ---------------------------------------------------------

    @cached_property
    def size(self) -> int:
        """|G| = product of the moduli (1 for the trivial group)."""
        return math.prod(self.moduli)

    @cached_property
    def exponent(self) -> int:
        """Least common multiple of the moduli (1 for the trivial group)."""
        e = 1
        for m in self.moduli:
            e = math.lcm(e, m)
        return e

    @cached_property
    def p_ranks(self) -> dict[int, int]:
        """For each prime p dividing |G|: the number of moduli p divides.

        Each modulus divisible by p contributes exactly one C_{p^a} component,
        so this is the rank of the p-primary part.
        """
        ranks: dict[int, int] = {}
        for m in self.moduli:
            for p in _factorize(m):
                ranks[p] = ranks.get(p, 0) + 1
        return ranks

    @cached_property
    def rank(self) -> int:
        """Largest p-rank (0 for the trivial group)."""
        return max(self.p_ranks.values(), default=0)

    @cached_property
    def canonical_moduli(self) -> tuple[int, ...]:
        """Invariant factors n_1 | n_2 | ... | n_r (each > 1), ascending."""
        # Collect per-prime power lists, largest first; invariant factor i is
        # the product of the i-th largest power of every prime.
        per_prime: dict[int, list[int]] = {}
        for m in self.moduli:
            for p, a in _factorize(m).items():
                per_prime.setdefault(p, []).append(p**a)
        depth = max((len(v) for v in per_prime.values()), default=0)
        factors = []
        for i in range(depth):
            d = 1
            for p, powers in per_prime.items():
                powers.sort(reverse=True)
                if i < len(powers):
                    d *= powers[i]
            factors.append(d)
        return tuple(sorted(factors))

    @cached_property
    def is_p_group(self) -> bool:
        """True when |G| is a prime power (the trivial group counts)."""
        return len(self.p_ranks) <= 1

    @cached_property
    def is_homocyclic(self) -> bool:
        """True for C_n^r with n >= 2: all invariant factors equal."""
        c = self.canonical_moduli
        return len(c) >= 1 and all(m == c[0] for m in c)

    @cached_property
    def _weights(self) -> tuple[int, ...]:
        """Mixed-radix place values: weight[i] = prod(moduli[:i])."""
        w = []
        acc = 1
        for m in self.moduli:
            w.append(acc)
            acc *= m
        return tuple(w)

    # -- elements ----------------------------------------------------------

    @property
    def zero(self) -> Element:
        return Element(self, (0,) * len(self.moduli))

    def element(self, coords) -> Element:
        """Element with the given coordinates, reduced mod the moduli."""
        coords = tuple(coords)
        if len(coords) != len(self.moduli):
            raise ValueError(
                f"expected {len(self.moduli)} coordinates, got {len(coords)}"
            )
        return Element(self, tuple(c % m for c, m in zip(coords, self.moduli)))

    def element_at(self, index: int) -> Element:
        """Element with the given flat index (first coordinate least significant)."""
        if not 0 <= index < self.size:
            raise ValueError(f"index {index} out of range for group of size {self.size}")
        coords = []
        for m in self.moduli:
            index, c = divmod(index, m)
            coords.append(c)
        return Element(self, tuple(coords))

    def index_of(self, coords) -> int:
        """Flat index of a coordinate tuple (assumed already reduced)."""
        return sum(c * w for c, w in zip(coords, self._weights))

    def elements(self) -> Iterator[Element]:
        """All elements in ascending flat-index order."""
        for i in range(self.size):
            yield self.element_at(i)

    def __str__(self) -> str:
        if not self.moduli:
            return "C_1"
        return " + ".join(f"C_{m}" for m in self.moduli)


@dataclass(frozen=True)
class Element:
    """An element of a :class:`GroupSpec`, stored as reduced coordinates."""

    group: GroupSpec
    coords: tuple[int, ...]

    @property
    def index(self) -> int:
        return self.group.index_of(self.coords)

    def __add__(self, other: Element) -> Element:
        return add(self, other)

    def __neg__(self) -> Element:
        return neg(self)

    def __sub__(self, other: Element) -> Element:
        return add(self, neg(other))

    def __rmul__(self, c: int) -> Element:
        return scale(c, self)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.coords)) + ")"


def make_group(moduli, *, size_limit: int = GROUP_SIZE_LIMIT) -> GroupSpec:
    """Validated construction of a :class:`GroupSpec`.

    Raises ValueError for non-integer or < 2 moduli, or when the group order
    would exceed ``size_limit``. An empty list gives the trivial group.
    """
    moduli = tuple(moduli)
    for m in moduli:
        if not isinstance(m, int) or isinstance(m, bool):
            raise ValueError(f"modulus {m!r} is not an integer")
        if m < 2:
            raise ValueError(f"modulus {m} is invalid; every cyclic order must be >= 2")
    size = math.prod(moduli)
    if size > size_limit:
        raise ValueError(f"group order {size} exceeds the supported limit {size_limit}")
    return GroupSpec(moduli)


def _require_same_group(a: Element, b: Element) -> None:
    if a.group != b.group:
        raise ValueError(f"elements of different groups: {a.group} vs {b.group}")


def add(a: Element, b: Element) -> Element:
    _require_same_group(a, b)
    return Element(
        a.group,
        tuple((x + y) % m for x, y, m in zip(a.coords, b.coords, a.group.moduli)),
    )


def neg(a: Element) -> Element:
    return Element(a.group, tuple((-x) % m for x, m in zip(a.coords, a.group.moduli)))


def scale(c: int, a: Element) -> Element:
    """Integer multiple ``c * a``, reducing each coordinate modulo its modulus."""
    if not isinstance(c, int) or isinstance(c, bool):
        raise TypeError("scalar must be an integer")
    return Element(a.group, tuple((c * x) % m for x, m in zip(a.coords, a.group.moduli)))


def order_of(a: Element) -> int:
    """Multiplicative order: lcm over coordinates of m_i / gcd(m_i, c_i)."""
    o = 1
    for x, m in zip(a.coords, a.group.moduli):
        o = math.lcm(o, m // math.gcd(m, x))
    return o


def dstar(group: GroupSpec) -> int:
    """1 + sum(n_i - 1) over the invariant factors: the classical structural bound."""
    return 1 + sum(m - 1 for m in group.canonical_moduli)


def refactor_primary(
    group: GroupSpec,
) -> tuple[GroupSpec, Callable[[Element], Element], Callable[[Element], Element]]:
    """Split every modulus into prime-power coordinates.

    Returns ``(primary, fwd, inv)`` where ``primary`` lists, per input modulus,
    its prime-power factors with primes ascending (e.g. C_12 -> [4, 3];
    C_3+C_18 -> [3, 2, 9]), ``fwd`` maps an element into ``primary`` and
    ``inv`` maps back; both directions compose to the identity. Moduli that
    already are prime powers pass through unchanged.
    """
    primary_moduli: list[int] = []
    # For each input coordinate: list of (prime_power, crt_coefficient) where
    # the coefficient c_q satisfies c_q = 1 mod q and 0 mod all sibling powers.
    plans: list[list[tuple[int, int]]] = []
    for m in group.moduli:
        powers = [p**a for p, a in sorted(_factorize(m).items())]
        plan = []
        for q in powers:
            rest = m // q
            plan.append((q, rest * pow(rest, -1, q)))
        primary_moduli.extend(powers)
        plans.append(plan)
    primary = GroupSpec(tuple(primary_moduli))

    def fwd(a: Element) -> Element:
        if a.group != group:
            raise ValueError("element does not belong to the group being refactored")
        out: list[int] = []
        for x, plan in zip(a.coords, plans):
            out.extend(x % q for q, _ in plan)
        return Element(primary, tuple(out))

    def inv(a: Element) -> Element:
        if a.group != primary:
            raise ValueError("element does not belong to the primary decomposition")
        coords: list[int] = []
        pos = 0
        for m, plan in zip(group.moduli, plans):
            x = 0
            for q, coeff in plan:
                x = (x + a.coords[pos] * coeff) % m
                pos += 1
            coords.append(x)
        return Element(group, tuple(coords))

    return primary, fwd, inv
