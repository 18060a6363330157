"""Reference values and closed-form predictions for the search invariants.

The shipped data file records exactly determined values (plus one explicitly
undetermined range) for the small-exponent classification, the two extended
three-fold computations, and small prime cyclic groups.  Family clauses that
cover infinitely many groups -- elementary 2-groups, exponent-3 groups of
rank at least 4, exponent-5 groups of rank at least 5, exponent-4 groups
other than the six listed exceptions, and the p-group / rank-two rule for
the Davenport constant -- are evaluated on demand by :func:`lookup`.
:func:`predict` evaluates closed-form rules: prime-cyclic formulas, rank
saturation, rank-two stabilization, and the triangular-form exception rule
for squarefree witnesses over prime cyclic groups.

A related heuristic -- that the squarefree invariant usually falls exactly
one below its budget-one counterpart -- is prose guidance only and is
deliberately not encoded as a prediction rule.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import cache
from importlib import resources

from ..builders import cyclic_standard_value
from ..groups import GroupSpec, dstar

__all__ = [
    "KIND_DAVENPORT",
    "KIND_SD",
    "KIND_SMALL_DAVENPORT",
    "KnownValue",
    "STATUS_EXACT",
    "STATUS_LOWER_BOUND",
    "STATUS_PREDICTION",
    "all_records",
    "catalog_version",
    "dump_csv",
    "lookup",
    "predict",
]

KIND_SD = "sd"
KIND_DAVENPORT = "davenport"
KIND_SMALL_DAVENPORT = "small_davenport"

STATUS_EXACT = "exact"
STATUS_LOWER_BOUND = "lower_bound"
STATUS_PREDICTION = "prediction"


@dataclass(frozen=True)
class KnownValue:
    """One reference value, keyed by canonical invariant-factor moduli.

    ``value`` is the known value (or the lower end of a range when ``upper``
    is set and differs); ``status`` is one of exact, lower_bound, or
    prediction; ``provenance`` describes how the value was established.
    """

    moduli: tuple[int, ...]
    kind: str
    k: int | None
    value: int
    upper: int | None
    status: str
    provenance: str

    @property
    def is_range(self) -> bool:
        return self.upper is not None and self.upper != self.value


@cache
def _payload() -> tuple[int, tuple[KnownValue, ...]]:
    text = resources.files(__package__).joinpath("data.json").read_text()
    data = json.loads(text)
    if data.get("format") != "zsum-catalog":
        raise ValueError("unrecognized catalog data format")
    records = tuple(
        KnownValue(
            moduli=tuple(raw["moduli"]),
            kind=raw["kind"],
            k=raw.get("k"),
            value=raw["value"],
            upper=raw.get("upper"),
            status=raw["status"],
            provenance=raw["provenance"],
        )
        for raw in data["records"]
    )
    return int(data["version"]), records


def catalog_version() -> int:
    return _payload()[0]


def all_records() -> tuple[KnownValue, ...]:
    return _payload()[1]


_EXPONENT_FOUR_EXCEPTIONS = {
    (4,),
    (2, 4),
    (4, 4),
    (2, 2, 4),
    (2, 4, 4),
    (4, 4, 4),
}


def _ceiling_record(key: tuple[int, ...], k: int, provenance: str) -> KnownValue:
    value = 1 + sum(m - 1 for m in key)
    return KnownValue(key, KIND_SD, k, value, None, STATUS_EXACT, provenance)


def _family_rule(key: tuple[int, ...], k: int) -> KnownValue | None:
    r = len(key)
    if all(m == 2 for m in key):
        if r == 1:
            value = 1 if k == 0 else 2
            return KnownValue(
                key, KIND_SD, k, value, None, STATUS_EXACT,
                "the only minimal zero-sum sequences over the 2-element group "
                "are (0) and e^2",
            )
        return _ceiling_record(
            key, k,
            "elementary 2-group classification: the structural ceiling r + 1 "
            "is attained at every budget",
        )
    if all(m == 3 for m in key) and r >= 4:
        return _ceiling_record(
            key, k,
            "exponent-3 classification: rank at least 4 attains the "
            "structural ceiling 2r + 1 at every budget",
        )
    if all(m == 5 for m in key) and r >= 5:
        return _ceiling_record(
            key, k,
            "exponent-5 classification: rank at least 5 attains the "
            "structural ceiling 4r + 1 at every budget",
        )
    if (
        r >= 1
        and key[-1] == 4
        and all(m in (2, 4) for m in key)
        and key not in _EXPONENT_FOUR_EXCEPTIONS
    ):
        return _ceiling_record(
            key, k,
            "exponent-4 classification: every group other than the six "
            "listed exceptions attains the structural ceiling",
        )
    return None


def lookup(group: GroupSpec, kind: str, k: int | None = None) -> KnownValue | None:
    """Stored or family-rule value for the group under the given invariant.

    Unknown kinds, missing budgets, and uncovered groups return None; this
    function never raises.
    """
    key = group.canonical_moduli
    if kind == KIND_SD:
        if k is None or k < 0:
            return None
        for rec in all_records():
            if rec.moduli == key and rec.k == k:
                return rec
        return _family_rule(key, k)
    if kind in (KIND_DAVENPORT, KIND_SMALL_DAVENPORT):
        if group.size == 1 or group.is_p_group or group.rank <= 2:
            ceiling = dstar(group)
            value = ceiling if kind == KIND_DAVENPORT else ceiling - 1
            return KnownValue(
                key, kind, None, value, None, STATUS_EXACT,
                "the sequence ceiling equals the structural ceiling for "
                "p-groups and groups of rank at most 2",
            )
        return None
    return None


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in range(2, math.isqrt(n) + 1):
        if n % q == 0:
            return False
    return True


def _is_triangular(n: int) -> bool:
    if n < 0:
        return False
    root = math.isqrt(8 * n + 1)
    return root * root == 8 * n + 1


def predict(group: GroupSpec, kind: str, k: int | None = None) -> tuple[int, str] | None:
    """Closed-form value for the group, with its status, where a rule applies.

    Rules asserting exactness at this size return status "exact"; rules
    conditioned on the group being large enough return status "prediction".
    Returns None when no rule applies; this function never raises.
    """
    if kind in (KIND_DAVENPORT, KIND_SMALL_DAVENPORT):
        rec = lookup(group, kind)
        return (rec.value, rec.status) if rec is not None else None
    if kind != KIND_SD or k is None or k < 0:
        return None
    if group.size == 1:
        return (1, STATUS_EXACT)
    exponent = group.exponent
    rank = group.rank
    ceiling = dstar(group)
    if (group.is_p_group or rank <= 2) and rank >= exponent + 1 - k:
        return (ceiling, STATUS_EXACT)
    if rank <= 2:
        plain_square = group.canonical_moduli == (2, 2)
        threshold = exponent - 1 if (group.is_homocyclic and not plain_square) else exponent - 2
        if k >= threshold:
            return (ceiling, STATUS_EXACT)
    if rank == 1 and _is_prime(group.size):
        p = group.size
        if k >= 1:
            return (cyclic_standard_value(p, k, 1), STATUS_EXACT)
        if p >= 5:
            budget_one = cyclic_standard_value(p, 1, 1)
            if _is_triangular(p + 2) or _is_triangular(p + 4):
                return (budget_one, STATUS_PREDICTION)
            return (budget_one - 1, STATUS_PREDICTION)
    return None


def dump_csv() -> str:
    """The shipped records as CSV text (family rules are not enumerable)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["moduli", "kind", "k", "value", "upper", "status", "provenance"])
    for rec in all_records():
        writer.writerow(
            [
                ",".join(str(m) for m in rec.moduli),
                rec.kind,
                "" if rec.k is None else rec.k,
                rec.value,
                "" if rec.upper is None else rec.upper,
                rec.status,
                rec.provenance,
            ]
        )
    return buffer.getvalue()
