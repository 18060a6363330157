"""Multisets over a finite abelian group, and portable certificates for them.

A :class:`ZSeq` is an unordered sequence (multiset) of group elements. The
two properties this artifact revolves around:

* *zero-sumfree*: no nonempty subsequence sums to zero;
* *minimal zero-sum*: sums to zero, but no proper nonempty subsequence does.

A :class:`Certificate` is the serialized form of a sequence together with the
claims a verifier is expected to re-check (length, zero sum, the kind
property, and a multiplicity-overflow count). :func:`verify` recomputes every
claim from scratch; it deliberately shares no logic with the search engine so
that engine bugs cannot vouch for themselves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .groups import Element, GroupSpec, make_group, neg

KIND_ZERO_SUMFREE = "zero-sumfree"
KIND_MINIMAL_ZERO_SUM = "minimal-zero-sum"
_VALID_KINDS = (KIND_ZERO_SUMFREE, KIND_MINIMAL_ZERO_SUM)


class CertificateFormatError(ValueError):
    """Raised when certificate text is not structurally well-formed."""


@dataclass(frozen=True)
class ZSeq:
    """Immutable multiset of elements of one group.

    ``entries`` is kept sorted by flat element index with multiplicities >= 1,
    so equal multisets compare and hash equal.
    """

    group: GroupSpec
    entries: tuple[tuple[Element, int], ...]

    # -- construction ------------------------------------------------------

    @staticmethod
    def empty(group: GroupSpec) -> ZSeq:
        return ZSeq(group, ())

    @staticmethod
    def from_pairs(group: GroupSpec, pairs: Iterable[tuple[Element, int]] | Mapping[Element, int]) -> ZSeq:
        """Build from (element, multiplicity) pairs; repeated elements merge."""
        if isinstance(pairs, Mapping):
            pairs = pairs.items()
        counts: dict[Element, int] = {}
        for el, mult in pairs:
            if el.group != group:
                raise ValueError("entry element belongs to a different group")
            if mult < 1:
                raise ValueError(f"multiplicity {mult} is invalid; must be >= 1")
            counts[el] = counts.get(el, 0) + mult
        entries = tuple(sorted(counts.items(), key=lambda kv: kv[0].index))
        return ZSeq(group, entries)

    @staticmethod
    def from_elements(group: GroupSpec, elements: Iterable[Element]) -> ZSeq:
        return ZSeq.from_pairs(group, [(el, 1) for el in elements])

    def with_added(self, el: Element, mult: int = 1) -> ZSeq:
        return ZSeq.from_pairs(self.group, self.entries + ((el, mult),))

    def with_removed(self, el: Element, mult: int = 1) -> ZSeq:
        """Remove ``mult`` copies of ``el``; raises if fewer are present."""
        counts = dict(self.entries)
        have = counts.get(el, 0)
        if have < mult:
            raise ValueError(f"cannot remove {mult} copies of {el}; only {have} present")
        if have == mult:
            del counts[el]
        else:
            counts[el] = have - mult
        return ZSeq.from_pairs(self.group, counts)

    def combined(self, other: ZSeq) -> ZSeq:
        if other.group != self.group:
            raise ValueError("cannot combine sequences over different groups")
        return ZSeq.from_pairs(self.group, self.entries + other.entries)

    # -- basic statistics ----------------------------------------------------

    @property
    def length(self) -> int:
        return sum(m for _, m in self.entries)

    @property
    def support(self) -> tuple[Element, ...]:
        return tuple(el for el, _ in self.entries)

    @property
    def height(self) -> int:
        """Largest multiplicity (0 for the empty sequence)."""
        return max((m for _, m in self.entries), default=0)

    def multiplicity(self, el: Element) -> int:
        for e, m in self.entries:
            if e == el:
                return m
        return 0

    def cm(self, level: int) -> int:
        """Multiplicity overflow above ``level``: sum of max(0, v_g - level).

        level 0 gives the length; level >= height gives 0; level 1 counts
        repeats beyond the first copy (the measure behind the classical
        set-based invariants).
        """
        if level < 0:
            raise ValueError("level must be >= 0")
        return sum(max(0, m - level) for _, m in self.entries)

    def sigma(self) -> Element:
        """Sum of all entries (the group zero for the empty sequence)."""
        total = self.group.zero
        for el, m in self.entries:
            total = total + m * el
        return total

    # -- subsequence-sum structure -------------------------------------------

    def subsum_indices(self) -> frozenset[int]:
        """Flat indices of all nonempty-subsequence sums.

        Grown incrementally: adding one copy of g maps the reachable set R to
        R | {g} | (g + R), which is also how callers can maintain it online.
        """
        group = self.group
        reached: set[int] = set()
        for el, mult in self.entries:
            for _ in range(mult):
                bumped = {group.index_of(
                    tuple((a + b) % m for a, b, m in zip(group.element_at(i).coords, el.coords, group.moduli))
                ) for i in reached}
                reached |= bumped
                reached.add(el.index)
        return frozenset(reached)

    def subsums(self) -> frozenset[Element]:
        return frozenset(self.group.element_at(i) for i in self.subsum_indices())

    def is_zero_sumfree(self) -> bool:
        """True when no nonempty subsequence sums to zero (empty: trivially true)."""
        return self.group.index_of(self.group.zero.coords) not in self.subsum_indices()

    def is_minimal_zero_sum(self) -> bool:
        """True when the sum is zero and no proper nonempty subsequence's is.

        Checked by the single-removal criterion: for any one support element
        g, the whole sequence is minimal iff it sums to zero and removing one
        copy of g leaves a zero-sumfree sequence. (A proper zero-sum
        subsequence either misses a copy of g, or its complement does.)
        """
        if not self.entries:
            return False
        if self.sigma() != self.group.zero:
            return False
        return self.with_removed(self.entries[0][0]).is_zero_sumfree()

    def __str__(self) -> str:
        if not self.entries:
            return "(empty)"
        return " ".join(f"{el}" + (f"^{m}" if m > 1 else "") for el, m in self.entries)


# -- certificates -----------------------------------------------------------


@dataclass(frozen=True)
class Claims:
    """The facts a certificate asserts; the verifier recomputes every one."""

    length: int
    sum_is_zero: bool
    kind: str
    cm_level: int
    cm_value: int


@dataclass(frozen=True)
class Certificate:
    """Self-contained, serializable witness: group, entries, and claims."""

    moduli: tuple[int, ...]
    entries: tuple[tuple[tuple[int, ...], int], ...]
    claims: Claims

    @staticmethod
    def from_zseq(seq: ZSeq, kind: str, cm_level: int = 1) -> Certificate:
        """Certificate for ``seq`` with claims computed from the sequence itself."""
        if kind not in _VALID_KINDS:
            raise ValueError(f"unknown certificate kind {kind!r}")
        claims = Claims(
            length=seq.length,
            sum_is_zero=seq.sigma() == seq.group.zero,
            kind=kind,
            cm_level=cm_level,
            cm_value=seq.cm(cm_level),
        )
        entries = tuple((el.coords, m) for el, m in seq.entries)
        return Certificate(seq.group.moduli, entries, claims)

    def to_zseq(self) -> ZSeq:
        group = make_group(self.moduli)
        return ZSeq.from_pairs(
            group, [(group.element(coords), m) for coords, m in self.entries]
        )

    @cached_property
    def length(self) -> int:
        return sum(m for _, m in self.entries)

    # -- serialization ----------------------------------------------------

    def to_json_text(self) -> str:
        obj = {
            "moduli": list(self.moduli),
            "entries": [{"coords": list(c), "mult": m} for c, m in self.entries],
            "claims": {
                "length": self.claims.length,
                "sum_is_zero": self.claims.sum_is_zero,
                "kind": self.claims.kind,
                "cm_level": self.claims.cm_level,
                "cm_value": self.claims.cm_value,
            },
        }
        return json.dumps(obj, indent=2) + "\n"

    @staticmethod
    def from_json_text(text: str) -> Certificate:
        """Parse certificate text; structural problems raise CertificateFormatError."""
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CertificateFormatError(f"invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise CertificateFormatError("certificate must be a JSON object")
        try:
            moduli = obj["moduli"]
            raw_entries = obj["entries"]
            raw_claims = obj["claims"]
        except (KeyError, TypeError) as exc:
            raise CertificateFormatError(f"missing certificate field: {exc}") from exc
        if not isinstance(moduli, list) or not all(_is_int(m) for m in moduli):
            raise CertificateFormatError("moduli must be a list of integers")
        if not isinstance(raw_entries, list):
            raise CertificateFormatError("entries must be a list")
        entries = []
        for item in raw_entries:
            if (
                not isinstance(item, dict)
                or not isinstance(item.get("coords"), list)
                or not all(_is_int(c) for c in item["coords"])
                or not _is_int(item.get("mult"))
            ):
                raise CertificateFormatError(f"malformed entry: {item!r}")
            entries.append((tuple(item["coords"]), item["mult"]))
        if not isinstance(raw_claims, dict):
            raise CertificateFormatError("claims must be an object")
        required = {
            "length": _is_int,
            "sum_is_zero": lambda v: isinstance(v, bool),
            "kind": lambda v: isinstance(v, str),
            "cm_level": _is_int,
            "cm_value": _is_int,
        }
        for field, ok in required.items():
            if field not in raw_claims:
                raise CertificateFormatError(f"claims missing required field {field!r}")
            if not ok(raw_claims[field]):
                raise CertificateFormatError(f"claims field {field!r} has the wrong type")
        claims = Claims(
            length=raw_claims["length"],
            sum_is_zero=raw_claims["sum_is_zero"],
            kind=raw_claims["kind"],
            cm_level=raw_claims["cm_level"],
            cm_value=raw_claims["cm_value"],
        )
        return Certificate(tuple(moduli), tuple(entries), claims)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


@dataclass(frozen=True)
class Verdict:
    """Outcome of verification: accepted iff no reasons were collected."""

    accepted: bool
    reasons: tuple[str, ...]


def verify(cert: Certificate) -> Verdict:
    """Recompute every claim of a certificate from its entries.

    Accepts iff the group is valid, the entries are well-formed (in-range
    coordinates, multiplicities >= 1, no duplicate entry rows), the kind is
    known, and each claimed quantity matches its recomputation. All failures
    are reported together, field by field.
    """
    reasons: list[str] = []
    try:
        group = make_group(cert.moduli)
    except ValueError as exc:
        return Verdict(False, (f"unknown group moduli: {exc}",))

    width = len(cert.moduli)
    seen: set[tuple[int, ...]] = set()
    pairs: list[tuple[Element, int]] = []
    for coords, mult in cert.entries:
        if len(coords) != width:
            reasons.append(f"entry {coords} has {len(coords)} coordinates; expected {width}")
            continue
        if any(not 0 <= c < m for c, m in zip(coords, cert.moduli)):
            reasons.append(f"entry {coords} has a coordinate out of range for moduli {list(cert.moduli)}")
            continue
        if coords in seen:
            reasons.append(f"duplicate entry for element {coords}")
            continue
        seen.add(coords)
        if mult < 1:
            reasons.append(f"entry {coords} has multiplicity {mult}; must be >= 1")
            continue
        pairs.append((Element(group, tuple(coords)), mult))
    if reasons:
        return Verdict(False, tuple(reasons))

    seq = ZSeq.from_pairs(group, pairs)
    claims = cert.claims

    if seq.length != claims.length:
        reasons.append(f"length claimed {claims.length} recomputed {seq.length}")
    sum_is_zero = seq.sigma() == group.zero
    if sum_is_zero != claims.sum_is_zero:
        reasons.append(
            f"sum_is_zero claimed {json.dumps(claims.sum_is_zero)} recomputed {json.dumps(sum_is_zero)}"
        )
    if claims.kind not in _VALID_KINDS:
        reasons.append(f"unknown kind {claims.kind!r}; expected one of {list(_VALID_KINDS)}")
    else:
        if claims.kind == KIND_ZERO_SUMFREE:
            holds = seq.is_zero_sumfree()
        else:
            holds = seq.is_minimal_zero_sum()
        if not holds:
            reasons.append(f"kind claimed {claims.kind} but the property does not hold")
    if claims.cm_level < 0:
        reasons.append(f"cm_level claimed {claims.cm_level}; must be >= 0")
    else:
        cm_value = seq.cm(claims.cm_level)
        if cm_value != claims.cm_value:
            reasons.append(f"cm_value claimed {claims.cm_value} recomputed {cm_value}")

    return Verdict(not reasons, tuple(reasons))
