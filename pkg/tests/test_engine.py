"""Search engine: exact values, witnesses, determinism, kernels, tuning knobs."""

import os
import subprocess
import sys

import pytest

import artifact.engine as engine_mod
from artifact.engine import (
    KIND_DAVENPORT,
    KIND_LITTLE_OLSON,
    KIND_OLSON,
    KIND_SD,
    KIND_SD_LEVEL,
    KIND_SMALL_DAVENPORT,
    SEARCH_SIZE_LIMIT,
    EngineError,
    InvariantQuery,
    SearchConfig,
    SearchConstraint,
    SearchSizeError,
    compute,
    kernel_in_use,
    search_zero_sumfree_max,
    split_frontier,
)
from artifact.engine import _pykernel
from artifact.groups import dstar, make_group
from artifact.zseq import KIND_MINIMAL_ZERO_SUM, KIND_ZERO_SUMFREE, verify

from oracles import ref_search

SMALL_GROUPS = [(5,), (7,), (9,), (2, 4), (3, 3), (2, 2, 2)]


def value_of(moduli, kind, k=None, level=1, **config_kwargs):
    query = InvariantQuery(make_group(moduli), kind, k=k, level=level)
    return compute(query, SearchConfig(**config_kwargs)).value


class TestKernelSelection:
    def test_kernel_name_is_known(self):
        assert kernel_in_use() in ("compiled", "python")

    @pytest.mark.skipif(
        bool(os.environ.get("ARTIFACT_FORCE_PY_KERNEL")),
        reason="pure-Python kernel forced via environment",
    )
    def test_compiled_kernel_is_built_and_selected(self):
        assert kernel_in_use() == "compiled"

    def test_environment_variable_forces_python_kernel(self):
        out = subprocess.run(
            [sys.executable, "-c", "from artifact.engine import kernel_in_use; print(kernel_in_use())"],
            env={**os.environ, "ARTIFACT_FORCE_PY_KERNEL": "1"},
            capture_output=True,
            text=True,
            check=True,
        )
        assert out.stdout.strip() == "python"


class TestOracleEquivalence:
    @pytest.mark.parametrize("moduli", SMALL_GROUPS)
    def test_plain_unconstrained(self, moduli):
        value, seq = search_zero_sumfree_max(make_group(moduli), SearchConstraint())
        assert value == ref_search(moduli, closed=False)
        assert seq.length == value

    @pytest.mark.parametrize("moduli", SMALL_GROUPS)
    def test_closed_unconstrained(self, moduli):
        value, seq = search_zero_sumfree_max(
            make_group(moduli), SearchConstraint(closed=True)
        )
        assert value == ref_search(moduli, closed=True)
        assert seq.length == value

    @pytest.mark.parametrize("moduli", SMALL_GROUPS)
    @pytest.mark.parametrize("k", [0, 1])
    def test_plain_budgeted(self, moduli, k):
        value, seq = search_zero_sumfree_max(make_group(moduli), SearchConstraint(k=k))
        assert value == ref_search(moduli, k=k)
        assert seq.cm(1) <= k

    @pytest.mark.parametrize("moduli", SMALL_GROUPS)
    @pytest.mark.parametrize("k", [0, 1])
    def test_closed_budgeted(self, moduli, k):
        value, seq = search_zero_sumfree_max(
            make_group(moduli), SearchConstraint(k=k, closed=True)
        )
        assert value == ref_search(moduli, k=k, closed=True)
        assert seq.cm(1) <= k
        assert seq.is_minimal_zero_sum()

    @pytest.mark.parametrize("moduli", [(9,), (2, 4), (2, 2, 2)])
    def test_closed_budgeted_higher_level(self, moduli):
        value, seq = search_zero_sumfree_max(
            make_group(moduli), SearchConstraint(k=1, level=2, closed=True)
        )
        assert value == ref_search(moduli, k=1, level=2, closed=True)
        assert seq.cm(2) <= 1


class TestWitnesses:
    def test_plain_witness_is_zero_sumfree(self):
        result = compute(InvariantQuery(make_group((12,)), KIND_SMALL_DAVENPORT))
        assert result.exact
        assert result.witness.claims.kind == KIND_ZERO_SUMFREE
        assert result.witness.length == result.value
        assert verify(result.witness).accepted
        assert result.witness.to_zseq().is_zero_sumfree()

    def test_closed_witness_is_minimal_zero_sum(self):
        result = compute(InvariantQuery(make_group((12,)), KIND_DAVENPORT))
        assert result.witness.claims.kind == KIND_MINIMAL_ZERO_SUM
        assert result.witness.length == result.value
        assert result.witness.to_zseq().is_minimal_zero_sum()

    def test_set_based_witness_length_is_value_minus_one(self):
        result = compute(InvariantQuery(make_group((3, 3)), KIND_OLSON, k=0))
        assert result.witness.claims.kind == KIND_ZERO_SUMFREE
        assert result.witness.length == result.value - 1
        assert result.witness.to_zseq().cm(1) == 0

    def test_level_witness_reports_requested_level(self):
        result = compute(
            InvariantQuery(make_group((9,)), KIND_SD_LEVEL, k=1, level=2)
        )
        assert result.witness.claims.cm_level == 2
        assert result.witness.claims.cm_value <= 1

    def test_result_metadata(self):
        result = compute(InvariantQuery(make_group((3, 3)), KIND_DAVENPORT))
        assert result.node_count > 0
        assert result.elapsed >= 0.0
        assert result.exact


class TestIdentities:
    @pytest.mark.parametrize("moduli", [(2, 6), (3, 3), (8,), (2, 2, 4), (10,)])
    def test_closed_value_is_plain_value_plus_one(self, moduli):
        assert value_of(moduli, KIND_DAVENPORT) == value_of(moduli, KIND_SMALL_DAVENPORT) + 1

    @pytest.mark.parametrize("moduli,k", [((3, 3), 0), ((3, 3), 1), ((12,), 0), ((2, 4), 2)])
    def test_set_invariant_counts_the_completing_element(self, moduli, k):
        assert value_of(moduli, KIND_OLSON, k=k) == value_of(moduli, KIND_LITTLE_OLSON, k=k) + 1

    @pytest.mark.parametrize("moduli,k", [((3, 3), 0), ((3, 3), 1), ((2, 4), 0), ((12,), 1)])
    def test_closed_at_budget_k_plus_one_equals_open_at_k(self, moduli, k):
        assert value_of(moduli, KIND_SD, k=k + 1) == value_of(moduli, KIND_OLSON, k=k)

    @pytest.mark.parametrize("moduli", [(3, 3), (2, 4), (12,)])
    def test_monotone_in_budget_and_bounded_by_unconstrained(self, moduli):
        davenport = value_of(moduli, KIND_DAVENPORT)
        previous = 0
        for k in range(0, 6):
            sd = value_of(moduli, KIND_SD, k=k)
            assert previous <= sd <= davenport
            previous = sd

    @pytest.mark.parametrize("moduli", [(3, 3), (9,), (2, 4)])
    def test_unbudgeted_kinds_coincide_with_unconstrained_search(self, moduli):
        assert value_of(moduli, KIND_SD, k=None) == value_of(moduli, KIND_DAVENPORT)
        assert value_of(moduli, KIND_LITTLE_OLSON, k=None) == value_of(
            moduli, KIND_SMALL_DAVENPORT
        )

    def test_level_one_spelling_matches_default(self):
        assert value_of((9,), KIND_SD_LEVEL, k=2, level=1) == value_of((9,), KIND_SD, k=2)

    def test_raising_level_relaxes_the_constraint(self):
        values = [value_of((9,), KIND_SD_LEVEL, k=1, level=lv) for lv in (1, 2, 3)]
        assert values == sorted(values)
        assert values[-1] <= value_of((9,), KIND_DAVENPORT)


class TestKnownValues:
    @pytest.mark.parametrize(
        "moduli",
        [(3,), (8,), (2, 4), (3, 9), (4, 4), (2, 2, 2), (12,), (2, 6), (5, 5), (3, 3, 3)],
    )
    def test_davenport_matches_moduli_sum_formula(self, moduli):
        # Exact for p-groups and for rank <= 2.
        g = make_group(moduli)
        assert value_of(moduli, KIND_DAVENPORT) == dstar(g)
        assert value_of(moduli, KIND_SMALL_DAVENPORT) == dstar(g) - 1

    @pytest.mark.parametrize(
        "moduli,set_value,closed_value",
        [
            ((2,), 2, 1),
            ((4,), 3, 2),
            ((5,), 3, 2),
            ((7,), 4, 3),
            ((2, 2), 3, 3),
            ((3, 3), 4, 3),
            ((4, 4), 6, 5),
            ((2, 4), 4, 4),
            ((3, 3, 3), 7, 6),
        ],
    )
    def test_distinct_element_invariants(self, moduli, set_value, closed_value):
        assert value_of(moduli, KIND_OLSON, k=0) == set_value
        assert value_of(moduli, KIND_SD, k=0) == closed_value

    @pytest.mark.parametrize(
        "moduli,k,expected",
        [((5,), 1, 3), ((12,), 2, 6), ((7,), 1, 4)],
    )
    def test_budgeted_closed_values(self, moduli, k, expected):
        assert value_of(moduli, KIND_SD, k=k) == expected


DETERMINISM_CASES = [
    ((2, 6), KIND_DAVENPORT, None, 1),
    ((3, 3), KIND_LITTLE_OLSON, 1, 1),
    ((8,), KIND_SD, 2, 1),
    ((9,), KIND_SD_LEVEL, 1, 2),
]


class TestDeterminism:
    @pytest.mark.parametrize("moduli,kind,k,level", DETERMINISM_CASES)
    def test_value_and_witness_independent_of_parallel_layout(self, moduli, kind, k, level):
        query = InvariantQuery(make_group(moduli), kind, k=k, level=level)
        baseline = compute(query, SearchConfig(worker_count=1, split_depth=0))
        reference_text = baseline.witness.to_json_text()
        for workers, split in [(1, 2), (2, 1), (3, 2), (4, 3)]:
            result = compute(query, SearchConfig(worker_count=workers, split_depth=split))
            assert result.value == baseline.value, (workers, split)
            assert result.witness.to_json_text() == reference_text, (workers, split)
            assert result.exact

    def test_repeated_runs_are_identical(self):
        query = InvariantQuery(make_group((2, 2, 4)), KIND_DAVENPORT)
        first = compute(query)
        second = compute(query)
        assert first.value == second.value
        assert first.node_count == second.node_count
        assert first.witness == second.witness


TWIN_CASES = [
    ((2, 6), KIND_DAVENPORT, None, 1),
    ((3, 3), KIND_SMALL_DAVENPORT, None, 1),
    ((8,), KIND_SD, 2, 1),
    ((3, 3), KIND_LITTLE_OLSON, 0, 1),
    ((9,), KIND_SD_LEVEL, 1, 2),
]


@pytest.mark.skipif(
    kernel_in_use() != "compiled", reason="compiled kernel unavailable; nothing to compare"
)
class TestKernelTwins:
    @pytest.mark.parametrize("moduli,kind,k,level", TWIN_CASES)
    def test_python_kernel_reproduces_compiled_results(self, monkeypatch, moduli, kind, k, level):
        query = InvariantQuery(make_group(moduli), kind, k=k, level=level)
        compiled = compute(query)
        monkeypatch.setattr(engine_mod, "_kernel", _pykernel)
        assert kernel_in_use() == "python"
        interpreted = compute(query)
        assert interpreted.value == compiled.value
        assert interpreted.witness == compiled.witness
        assert interpreted.node_count == compiled.node_count


class TestSymmetryReduction:
    @pytest.mark.parametrize("moduli", [(3, 3), (4, 4), (2, 2, 2)])
    @pytest.mark.parametrize(
        "kind,k", [(KIND_SMALL_DAVENPORT, None), (KIND_DAVENPORT, None), (KIND_SD, 0), (KIND_LITTLE_OLSON, 0)]
    )
    def test_reduction_does_not_change_values(self, moduli, kind, k):
        query = InvariantQuery(make_group(moduli), kind, k=k)
        on = compute(query, SearchConfig(symmetry_reduction=True))
        off = compute(query, SearchConfig(symmetry_reduction=False))
        assert on.value == off.value

    def test_reduction_prunes_the_tree(self):
        query = InvariantQuery(make_group((3, 3, 3)), KIND_SD, k=0)
        on = compute(query, SearchConfig(symmetry_reduction=True))
        off = compute(query, SearchConfig(symmetry_reduction=False))
        assert on.node_count < off.node_count

    def test_requires_equal_moduli(self):
        query = InvariantQuery(make_group((2, 4)), KIND_DAVENPORT)
        with pytest.raises(ValueError, match="all moduli equal"):
            compute(query, SearchConfig(symmetry_reduction=True))

    def test_equal_moduli_requirement_is_about_presentation(self):
        # (2, 3, 6) presents the same group as (6, 6) but mixes moduli,
        # so the first-branch reduction cannot be forced on it.
        query = InvariantQuery(make_group((2, 3, 6)), KIND_SD, k=0)
        with pytest.raises(ValueError, match="all moduli equal"):
            compute(query, SearchConfig(symmetry_reduction=True))
        assert compute(query).value == compute(
            InvariantQuery(make_group((6, 6)), KIND_SD, k=0)
        ).value


class TestUpperBoundHints:
    def test_tight_hint_preserves_value(self):
        query = InvariantQuery(make_group((2, 6)), KIND_DAVENPORT)
        plain = compute(query)
        hinted = compute(query, SearchConfig(upper_bound_hint=plain.value))
        assert hinted.value == plain.value
        assert hinted.node_count <= plain.node_count
        assert verify(hinted.witness).accepted

    def test_loose_hint_preserves_value(self):
        query = InvariantQuery(make_group((2, 6)), KIND_DAVENPORT)
        plain = compute(query)
        hinted = compute(query, SearchConfig(upper_bound_hint=plain.value + 3))
        assert hinted.value == plain.value

    def test_hint_below_minimum_rejected(self):
        closed = InvariantQuery(make_group((5,)), KIND_DAVENPORT)
        with pytest.raises(ValueError, match="upper_bound_hint"):
            compute(closed, SearchConfig(upper_bound_hint=0))
        plain = InvariantQuery(make_group((5,)), KIND_SMALL_DAVENPORT)
        with pytest.raises(ValueError, match="upper_bound_hint"):
            compute(plain, SearchConfig(upper_bound_hint=-1))


class TestTimeBudget:
    def test_exhausted_budget_yields_inexact_result(self):
        query = InvariantQuery(make_group((2, 6, 12)), KIND_SMALL_DAVENPORT)
        result = compute(query, SearchConfig(time_budget=0.001))
        assert not result.exact
        assert result.value >= 0
        assert verify(result.witness).accepted

    def test_exhausted_budget_in_parallel_mode(self):
        query = InvariantQuery(make_group((2, 6, 12)), KIND_DAVENPORT)
        result = compute(query, SearchConfig(worker_count=3, split_depth=1, time_budget=0.001))
        assert not result.exact
        assert verify(result.witness).accepted

    def test_search_helper_refuses_inexact_answers(self):
        with pytest.raises(EngineError, match="time budget"):
            search_zero_sumfree_max(
                make_group((2, 6, 12)),
                SearchConstraint(),
                SearchConfig(time_budget=0.001),
            )

    def test_generous_budget_stays_exact(self):
        query = InvariantQuery(make_group((3, 3)), KIND_DAVENPORT)
        result = compute(query, SearchConfig(time_budget=60.0))
        assert result.exact
        assert result.value == 5


class TestSplitFrontier:
    def test_depth_zero_is_a_single_empty_unit(self):
        assert split_frontier(make_group((3, 3)), SearchConstraint(), 0) == [()]

    def test_symmetric_group_first_level_collapses_to_class_representatives(self):
        units = split_frontier(make_group((3, 3)), SearchConstraint(), 1)
        assert units == [(1,)]

    def test_unreduced_first_level_lists_every_nonzero_element(self):
        units = split_frontier(
            make_group((3, 3)), SearchConstraint(), 1, SearchConfig(symmetry_reduction=False)
        )
        assert units == [(i,) for i in range(1, 9)]

    def test_units_are_ascending_admissible_prefixes(self):
        group = make_group((2, 4))
        units = split_frontier(group, SearchConstraint(), 2)
        assert units
        for unit in units:
            assert len(unit) == 2
            assert list(unit) == sorted(unit)
            assert 0 not in unit
            from artifact.zseq import ZSeq

            assert ZSeq.from_elements(group, [group.element_at(i) for i in unit]).is_zero_sumfree()

    def test_reduced_units_are_a_subset_of_unreduced_units(self):
        group = make_group((3, 3))
        reduced = set(split_frontier(group, SearchConstraint(), 2))
        full = set(
            split_frontier(group, SearchConstraint(), 2, SearchConfig(symmetry_reduction=False))
        )
        assert reduced <= full
        assert len(reduced) < len(full)

    def test_depth_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="depth"):
            split_frontier(make_group((3, 3)), SearchConstraint(), 7)


class TestValidation:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown invariant kind"):
            compute(InvariantQuery(make_group((5,)), "mystery"))

    def test_unconstrained_kinds_refuse_a_budget(self):
        with pytest.raises(ValueError, match="does not take a budget"):
            compute(InvariantQuery(make_group((5,)), KIND_DAVENPORT, k=1))

    def test_level_restricted_to_level_aware_kind(self):
        with pytest.raises(ValueError, match="requires level 1"):
            compute(InvariantQuery(make_group((5,)), KIND_SD, k=1, level=2))

    def test_constraint_validation(self):
        with pytest.raises(ValueError, match="k must be"):
            SearchConstraint(k=-1)
        with pytest.raises(ValueError, match="level must be"):
            SearchConstraint(level=0)

    def test_config_validation(self):
        with pytest.raises(ValueError, match="worker_count"):
            SearchConfig(worker_count=0)
        with pytest.raises(ValueError, match="split_depth"):
            SearchConfig(split_depth=7)
        with pytest.raises(ValueError, match="time_budget"):
            SearchConfig(time_budget=0.0)

    def test_oversized_group_rejected(self):
        assert SEARCH_SIZE_LIMIT == 4096
        with pytest.raises(SearchSizeError):
            compute(InvariantQuery(make_group((SEARCH_SIZE_LIMIT + 3,)), KIND_SD, k=0))

    def test_trivial_group(self):
        assert value_of((), KIND_SMALL_DAVENPORT) == 0
        result = compute(InvariantQuery(make_group(()), KIND_DAVENPORT))
        assert result.value == 1
        assert result.witness.to_zseq().sigma() == make_group(()).zero
