"""Exact invariant computation by pruned depth-first search.

The engine answers queries of the form "largest multiset of nonzero group
elements with no nonempty zero-sum submultiset", in two modes:

* plain: the value is the size of the multiset itself (small Davenport
  constant family);
* closed: the value is the size plus one, counting the appended inverse of
  the running sum, which always yields a minimal zero-sum multiset
  (Davenport constant family).

Multiplicity constraints are expressed as a repeat-excess budget: with
threshold ``level`` and budget ``k``, a multiset is admissible when
``sum(max(0, v_g - level)) <= k``.  ``k = None`` means unconstrained.

Work can be split across threads: the tree is cut at a fixed depth, the
shallow part is enumerated up front as an ordered list of events
(candidates interleaved with work units in traversal order), and the units
are explored by kernel workers.  Reducing the events in order reproduces
the sequential result exactly, including lexicographic witness choice and
stop-at-upper-bound-hint behaviour, so the computed value and witness are
independent of thread count and split depth.
"""

from __future__ import annotations

import os
import threading
import time
from bisect import insort
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..groups import GroupSpec, dstar
from ..zseq import KIND_MINIMAL_ZERO_SUM, KIND_ZERO_SUMFREE, Certificate, ZSeq, verify
from ._symmetry import is_equal_moduli, pair_mask
from ._tables import SEARCH_SIZE_LIMIT, SearchSizeError, SearchTables, build_tables

__all__ = [
    "EngineError",
    "InvariantQuery",
    "InvariantResult",
    "SearchConfig",
    "SearchConstraint",
    "SearchSizeError",
    "SEARCH_SIZE_LIMIT",
    "KIND_SMALL_DAVENPORT",
    "KIND_DAVENPORT",
    "KIND_LITTLE_OLSON",
    "KIND_OLSON",
    "KIND_SD",
    "KIND_SD_LEVEL",
    "KINDS",
    "compute",
    "search_zero_sumfree_max",
    "split_frontier",
    "kernel_in_use",
]

if os.environ.get("ARTIFACT_FORCE_PY_KERNEL"):
    from . import _pykernel as _kernel
else:
    try:
        from . import _ckernel as _kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernel as _kernel


def kernel_in_use() -> str:
    """Name of the active search kernel: "compiled" or "python"."""
    return _kernel.KERNEL_NAME


class EngineError(RuntimeError):
    """Internal inconsistency detected by the engine."""


KIND_SMALL_DAVENPORT = "small_davenport"
KIND_DAVENPORT = "davenport"
KIND_LITTLE_OLSON = "little_olson_k"
KIND_OLSON = "olson_k"
KIND_SD = "sd_k"
KIND_SD_LEVEL = "sd_k_level_l"

KINDS = frozenset(
    {
        KIND_SMALL_DAVENPORT,
        KIND_DAVENPORT,
        KIND_LITTLE_OLSON,
        KIND_OLSON,
        KIND_SD,
        KIND_SD_LEVEL,
    }
)

_CLOSED_KINDS = frozenset({KIND_DAVENPORT, KIND_SD, KIND_SD_LEVEL})
_UNCONSTRAINED_KINDS = frozenset({KIND_SMALL_DAVENPORT, KIND_DAVENPORT})

_MAX_SPLIT_DEPTH = 6


@dataclass(frozen=True)
class SearchConstraint:
    """Multiplicity constraint and mode for a zero-sumfree search.

    ``k`` is the repeat-excess budget (None = unconstrained), ``level`` the
    excess threshold, and ``closed`` selects whether the value counts the
    appended inverse-sum element.
    """

    k: int | None = None
    level: int = 1
    closed: bool = False

    def __post_init__(self) -> None:
        if self.k is not None and (not isinstance(self.k, int) or self.k < 0):
            raise ValueError("k must be None or a nonnegative integer")
        if not isinstance(self.level, int) or self.level < 1:
            raise ValueError("level must be a positive integer")


@dataclass(frozen=True)
class SearchConfig:
    """Tuning knobs for a search; none of them affect the computed result.

    ``symmetry_reduction=None`` enables first-branch reduction automatically
    for homocyclic groups (where it is sound); forcing it on for other
    groups is rejected.  ``upper_bound_hint=None`` applies a proven default
    bound where one is known; a caller-supplied hint must itself be a valid
    upper bound on the value, and the search stops at the first candidate
    reaching it.  ``time_budget`` is in seconds; an exceeded budget yields a
    result with ``exact=False``.
    """

    worker_count: int = 1
    split_depth: int = 2
    symmetry_reduction: bool | None = None
    upper_bound_hint: int | None = None
    time_budget: float | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.worker_count, int) or self.worker_count < 1:
            raise ValueError("worker_count must be a positive integer")
        if (
            not isinstance(self.split_depth, int)
            or not 0 <= self.split_depth <= _MAX_SPLIT_DEPTH
        ):
            raise ValueError(f"split_depth must be in [0, {_MAX_SPLIT_DEPTH}]")
        if self.time_budget is not None and not self.time_budget > 0:
            raise ValueError("time_budget must be positive")


@dataclass(frozen=True)
class InvariantQuery:
    """A single invariant request: which invariant, for which group.

    ``k`` is ignored (and must be None) for the unconstrained kinds
    ``small_davenport`` and ``davenport``; ``level`` is honoured only by
    ``sd_k_level_l`` and must be 1 otherwise.
    """

    group: GroupSpec
    kind: str
    k: int | None = None
    level: int = 1


@dataclass(frozen=True)
class InvariantResult:
    value: int
    witness: Certificate
    node_count: int
    elapsed: float
    exact: bool


@dataclass(frozen=True)
class _Params:
    """Fully resolved search parameters shared by kernels and enumerator."""

    tables: SearchTables
    capl: np.ndarray
    first_allowed: np.ndarray
    pair_allowed: np.ndarray  # (n, n) active or (1, n) inactive
    closed: bool
    kk: int  # -1 for unconstrained
    level: int
    hint: int  # -1 disabled
    deadline: float  # 0.0 disabled


_PAIR_MASK_CACHE: dict[GroupSpec, np.ndarray] = {}


def _pair_mask_for(group: GroupSpec, tables: SearchTables) -> np.ndarray:
    cached = _PAIR_MASK_CACHE.get(group)
    if cached is None:
        cached = np.ascontiguousarray(pair_mask(group, tables))
        if len(_PAIR_MASK_CACHE) > 16:
            _PAIR_MASK_CACHE.clear()
        _PAIR_MASK_CACHE[group] = cached
    return cached


def _resolve_params(
    group: GroupSpec, constraint: SearchConstraint, config: SearchConfig
) -> _Params:
    tables = build_tables(group)
    n = tables.n
    if constraint.k is None:
        kk = -1
        capl = tables.ordm1.copy()
    else:
        kk = constraint.k
        capl = np.minimum(tables.ordm1, np.int32(constraint.level)).astype(np.int32)

    symmetry = config.symmetry_reduction
    if symmetry is None:
        symmetry = is_equal_moduli(group)
    elif symmetry and not is_equal_moduli(group):
        raise ValueError(
            "symmetry_reduction requires a presentation with all moduli "
            f"equal (got {group})"
        )
    if symmetry:
        first_allowed = tables.class_reps
        pair_allowed = _pair_mask_for(group, tables)
    else:
        first_allowed = np.ones(n, dtype=np.uint8)
        first_allowed[0] = 0
        pair_allowed = np.ones((1, n), dtype=np.uint8)

    if config.upper_bound_hint is not None:
        hint = config.upper_bound_hint
        if hint < (1 if constraint.closed else 0):
            raise ValueError("upper_bound_hint below the minimum possible value")
    elif group.is_p_group or group.rank <= 2:
        hint = dstar(group) if constraint.closed else dstar(group) - 1
    else:
        hint = -1

    deadline = 0.0
    if config.time_budget is not None:
        deadline = time.monotonic() + config.time_budget

    return _Params(
        tables=tables,
        capl=np.ascontiguousarray(capl),
        first_allowed=np.ascontiguousarray(first_allowed),
        pair_allowed=pair_allowed,
        closed=constraint.closed,
        kk=kk,
        level=constraint.level,
        hint=hint,
        deadline=deadline,
    )


def _kernel_explore(
    params: _Params, prefix: list[int], shared_best: np.ndarray
) -> tuple[int, list[int] | None, int, bool, bool]:
    t = params.tables
    return _kernel.explore(
        t.add,
        t.neg,
        t.ordm1,
        params.capl,
        params.first_allowed,
        params.pair_allowed,
        params.closed,
        params.kk,
        params.level,
        prefix,
        params.hint,
        shared_best,
        params.deadline,
    )


@dataclass
class _Events:
    """Ordered shallow traversal: candidates and work units in visit order."""

    events: list[tuple]  # ("cand", value, witness) | ("unit", prefix)
    nodes: int
    aborted: bool


def _enumerate_events(params: _Params, depth: int) -> _Events:
    """Walk the tree down to ``depth``, mirroring kernel rules exactly.

    Nodes shallower than ``depth`` become candidate events (valid ones
    only); nodes at ``depth`` become work units and are not evaluated
    here (the kernel evaluates its own root).  Enumeration stops early
    when a shallow candidate reaches the hint, exactly like the kernels.
    """
    if depth == 0:
        return _Events(events=[("unit", [])], nodes=0, aborted=False)

    tables = params.tables
    n = tables.n
    neg = tables.neg.tolist()
    ordm1 = tables.ordm1.tolist()
    capl = params.capl.tolist()
    first = params.first_allowed.tolist()
    pair = params.pair_allowed
    pair_active = pair.shape[0] > 1
    add = tables.add
    closed = params.closed
    kk = params.kk
    level = params.level
    hint = params.hint
    deadline = params.deadline

    events: list[tuple] = []
    nodes = 0
    aborted = False
    best = -1

    cap = depth + 2
    R = np.zeros((cap, n), dtype=np.uint8)
    seq = [0] * cap
    sigidx = [0] * cap
    cmv = [0] * cap
    jnext = [0] * cap
    runrem = [0] * cap
    vcount = [0] * n

    t = 0
    entering = True
    while True:
        if entering:
            nodes += 1
            if deadline > 0.0 and time.monotonic() > deadline:
                aborted = True
                break
            if closed:
                x = neg[sigidx[t]]
                d = 1 if (kk >= 0 and vcount[x] + 1 > level) else 0
                valid = kk < 0 or cmv[t] + d <= kk
                val = t + 1
            else:
                x = -1
                valid = True
                val = t
            if valid:
                w = seq[1 : t + 1]
                if closed:
                    insort(w, x)
                events.append(("cand", val, w))
                if val > best:
                    best = val
                if hint >= 0 and val >= hint:
                    break
            start = seq[t] if t >= 1 else 1
            jnext[t] = start
            row = R[t]
            total = 0
            for i in range(start, n):
                if row[i] == 0:
                    total += capl[i]
            runrem[t] = total
            entering = False

        row = R[t]
        pushed = False
        j = jnext[t]
        while j < n:
            adm = row[j] == 0
            if adm:
                runrem[t] -= capl[j]
            ok = adm and vcount[j] < ordm1[j]
            if ok and t == 0 and first[j] == 0:
                ok = False
            if ok and t == 1 and pair_active and pair[seq[1], j] == 0:
                ok = False
            d = 0
            if ok and kk >= 0:
                d = 1 if vcount[j] + 1 > level else 0
                ok = cmv[t] + d <= kk
            if ok:
                rem_j = capl[j] - vcount[j] - 1
                if rem_j < 0:
                    rem_j = 0
                ub = t + 1 + rem_j + runrem[t]
                if kk >= 0:
                    ub += kk - cmv[t] - d
                if closed:
                    ub += 1
                if ub >= best:
                    jnext[t] = j + 1
                    if t + 1 == depth:
                        events.append(("unit", seq[1 : t + 1] + [j]))
                        j += 1
                        continue
                    nrow = R[t + 1]
                    np.bitwise_or(row, row[add[j]], out=nrow)
                    nrow[neg[j]] = 1
                    sigidx[t + 1] = int(add[sigidx[t], j])
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
        if t == 0:
            break
        vcount[seq[t]] -= 1
        t -= 1

    return _Events(events=events, nodes=nodes, aborted=aborted)


def _run_units(
    params: _Params,
    units: list[tuple[int, list[int]]],
    worker_count: int,
    shared_best: np.ndarray,
) -> dict[int, tuple | None]:
    """Explore work units concurrently; returns results keyed by event order.

    When the hint is enabled, a unit that achieves it records its event
    order, and units queued after that order are skipped (the ordered
    reduction never reads past the first achiever).
    """
    stop_lock = threading.Lock()
    stop_order: list[float] = [float("inf")]
    hint_enabled = params.hint >= 0

    def run(order: int, prefix: list[int]) -> tuple | None:
        if hint_enabled and order > stop_order[0]:
            return None
        res = _kernel_explore(params, prefix, shared_best)
        if res[4]:  # hint_hit
            with stop_lock:
                if order < stop_order[0]:
                    stop_order[0] = order
        return res

    results: dict[int, tuple | None] = {}
    with ThreadPoolExecutor(max_workers=worker_count) as ex:
        futures = {order: ex.submit(run, order, prefix) for order, prefix in units}
        for order, fut in futures.items():
            results[order] = fut.result()
    return results


def _search(
    group: GroupSpec, constraint: SearchConstraint, config: SearchConfig
) -> tuple[int, list[int] | None, int, bool]:
    """Run the full search; returns (value, witness indices, nodes, exact)."""
    params = _resolve_params(group, constraint, config)

    if config.worker_count == 1:
        shared = np.full(1, -1, dtype=np.int64)
        value, witness, nodes, aborted, _ = _kernel_explore(params, [], shared)
        return value, witness, nodes, not aborted

    ev = _enumerate_events(params, config.split_depth)
    nodes = ev.nodes
    aborted = ev.aborted

    shared = np.full(1, -1, dtype=np.int64)
    for e in ev.events:
        if e[0] == "cand" and e[1] > shared[0]:
            shared[0] = e[1]

    units = [
        (order, e[1])
        for order, e in enumerate(ev.events)
        if e[0] == "unit"
    ]
    results = _run_units(params, units, config.worker_count, shared)

    best = -1
    best_w: list[int] | None = None
    for order, e in enumerate(ev.events):
        if e[0] == "cand":
            val, w = e[1], e[2]
            if val > best:
                best, best_w = val, w
            elif val == best and params.closed and best_w is not None and w < best_w:
                best_w = w
            if params.hint >= 0 and val >= params.hint:
                return best, best_w, nodes, not aborted
        else:
            res = results[order]
            if res is None:
                raise EngineError("work unit skipped before the first hint achiever")
            uval, uw, unodes, uaborted, uhint = res
            nodes += unodes
            if uaborted:
                aborted = True
            if uval > best:
                best, best_w = uval, uw
            elif uval == best and uval >= 0 and best_w is not None and uw is not None:
                if params.closed and uw < best_w:
                    best_w = uw
            if uhint:
                return best, best_w, nodes, not aborted
    return best, best_w, nodes, not aborted


def search_zero_sumfree_max(
    group: GroupSpec,
    constraint: SearchConstraint,
    config: SearchConfig | None = None,
) -> tuple[int, ZSeq]:
    """Maximum search value and a witness multiset under ``constraint``.

    In plain mode the witness is the maximum admissible zero-sumfree
    multiset itself; in closed mode it is the minimal zero-sum multiset
    obtained by appending the inverse of the witness sum, and the value is
    its length.  Raises EngineError if a time budget aborted the search.
    """
    config = config or SearchConfig()
    value, witness, _, exact = _search(group, constraint, config)
    if not exact:
        raise EngineError("search aborted by time budget before completion")
    if value < 0 or witness is None:
        raise EngineError("search completed without any valid candidate")
    seq = ZSeq.from_elements(group, [group.element_at(i) for i in witness])
    return value, seq


def split_frontier(
    group: GroupSpec,
    constraint: SearchConstraint,
    depth: int,
    config: SearchConfig | None = None,
) -> list[tuple[int, ...]]:
    """Work-unit prefixes a parallel run at ``depth`` would distribute."""
    if not isinstance(depth, int) or not 0 <= depth <= _MAX_SPLIT_DEPTH:
        raise ValueError(f"depth must be in [0, {_MAX_SPLIT_DEPTH}]")
    config = config or SearchConfig()
    params = _resolve_params(group, constraint, config)
    if depth == 0:
        return [()]
    ev = _enumerate_events(params, depth)
    return [tuple(e[1]) for e in ev.events if e[0] == "unit"]


def _constraint_for(query: InvariantQuery) -> SearchConstraint:
    if query.kind not in KINDS:
        raise ValueError(f"unknown invariant kind {query.kind!r}")
    if query.kind in _UNCONSTRAINED_KINDS:
        if query.k is not None:
            raise ValueError(f"{query.kind} does not take a budget k")
        k = None
    else:
        k = query.k  # None = unconstrained
    if query.kind == KIND_SD_LEVEL:
        level = query.level
    else:
        if query.level != 1:
            raise ValueError(f"{query.kind} requires level 1")
        level = 1
    return SearchConstraint(k=k, level=level, closed=query.kind in _CLOSED_KINDS)


def compute(query: InvariantQuery, config: SearchConfig | None = None) -> InvariantResult:
    """Compute an invariant exactly, returning value plus verified witness.

    The witness certificate is self-contained and re-checked before being
    returned.  ``exact`` is False only when a time budget interrupted the
    search, in which case the value is the best bound found so far.
    """
    config = config or SearchConfig()
    constraint = _constraint_for(query)
    start = time.monotonic()
    value, witness, nodes, exact = _search(query.group, constraint, config)
    elapsed = time.monotonic() - start
    if value < 0 or witness is None:
        raise EngineError("search completed without any valid candidate")

    seq = ZSeq.from_elements(query.group, [query.group.element_at(i) for i in witness])
    kind = KIND_MINIMAL_ZERO_SUM if constraint.closed else KIND_ZERO_SUMFREE
    cert = Certificate.from_zseq(seq, kind=kind, cm_level=constraint.level)
    verdict = verify(cert)
    if not verdict.accepted:
        raise EngineError(
            "engine produced a witness that fails verification: "
            + "; ".join(verdict.reasons)
        )

    reported = value + 1 if query.kind == KIND_OLSON else value
    if seq.length != value:
        raise EngineError("witness length inconsistent with computed value")

    return InvariantResult(
        value=reported,
        witness=cert,
        node_count=nodes,
        elapsed=elapsed,
        exact=exact,
    )
