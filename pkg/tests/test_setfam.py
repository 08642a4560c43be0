# tests/test_setfam.py

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from common.errors import BudgetExceeded, ParseError, ValidationError
from setfam.closure import (
    project,
    restricted_size_bound_holds,
    sauer_shelah_bound,
    union_closure,
    vc_dimension,
)
from setfam.family import SetFamily, from_mask, to_mask
from setfam.generate import gen_lower_bound_family, lower_bound_family_size
from setfam.incidence import incidence_graph, is_induced_matching, witness_matching
from setfam.moonflower import family_stats, is_moonflower, mf_exact, mf_greedy


def fam(n, *members):
    return SetFamily(n, [frozenset(m) for m in members])


families = st.lists(
    st.frozensets(st.integers(min_value=0, max_value=5), max_size=4),
    max_size=8,
).map(lambda ms: SetFamily(6, ms))


# ------------------------------------------------------------------ family


def test_family_dedups_and_orders_canonically():
    f = fam(4, {2, 3}, {0}, {2, 3}, {1})
    assert len(f) == 3
    assert f.members == (frozenset({0}), frozenset({1}), frozenset({2, 3}))


def test_family_rejects_out_of_range_element():
    with pytest.raises(ValidationError):
        fam(3, {0, 3})


def test_mask_helpers_agree():
    assert to_mask({0, 3}) == 0b1001
    assert from_mask(0b1001) == frozenset({0, 3})


def test_family_text_parses_blank_line_as_empty_set():
    f = SetFamily.from_text("n 3\n0 1\n\n2\n")
    assert frozenset() in f.members
    assert frozenset({0, 1}) in f.members
    assert len(f) == 3


@pytest.mark.parametrize("text", ["m 3\n0\n", "n x\n", "n 3\n0 7\n", "n 3\n1 1\n", "n 3\na\n"])
def test_family_parse_errors(text):
    with pytest.raises(ParseError):
        SetFamily.from_text(text)


def test_family_file_round_trip(tmp_path):
    f = fam(5, {0, 4}, {1, 2, 3}, set())
    path = f.to_file(tmp_path / "f.txt")
    assert SetFamily.from_file(path) == f


def test_covered_by_keeps_only_contained_members():
    f = fam(4, {0}, {0, 1}, {2, 3})
    assert f.covered_by({0, 1}).members == (frozenset({0}), frozenset({0, 1}))


# -------------------------------------------------------------- projection


def test_project_deduplicates_traces():
    assert project(fam(3, {0, 1}, {1, 2}), {1}) == fam(3, {1})


def test_project_identity():
    f = fam(3, {0}, {1}, {2})
    assert project(f, {0, 1, 2}) == f


def test_project_relabels_into_smaller_universe():
    out = project(fam(6, {1, 4}, {5}), {4, 5}, relabel=True)
    assert out.n == 2
    assert out.members == (frozenset({0}), frozenset({1}))


def test_project_retains_empty_trace():
    f = fam(4, {0, 1}, {2}, {3})
    assert project(f, set()) == fam(4, set())
    assert project(f, {3}) == fam(4, set(), {3})


def test_project_rejects_bad_coordinate():
    with pytest.raises(ValidationError):
        project(fam(3, {0}), {3})


@given(families, st.frozensets(st.integers(min_value=0, max_value=5)))
@settings(max_examples=30, deadline=None)
def test_projection_never_grows_moonflowers(f, J):
    assert mf_exact(project(f, J)).value <= mf_exact(f).value


@given(families, st.frozensets(st.integers(min_value=0, max_value=5)))
@settings(max_examples=30, deadline=None)
def test_restricted_size_bound(f, I):
    assert restricted_size_bound_holds(f, I)


# -------------------------------------------------------------- moonflower


def test_disjoint_singletons_are_moonflower_with_empty_core():
    w = is_moonflower([{0}, {1}, {2}])
    assert w is not None
    assert w.core == frozenset()


def test_triangle_is_not_moonflower():
    assert is_moonflower([{0, 1}, {1, 2}, {0, 2}]) is None


def test_sunflower_is_moonflower():
    w = is_moonflower([{0, 1}, {0, 2}, {0, 3}])
    assert w.core == frozenset({0})
    assert w.private == (1, 2, 3)


def test_is_moonflower_rejects_empty_petal():
    with pytest.raises(ValidationError):
        is_moonflower([{0}, set()])


@pytest.mark.parametrize("k", [1, 3, 6])
def test_mf_of_singletons(k):
    assert mf_exact(SetFamily(k, [{i} for i in range(k)])).value == k


def test_mf_of_all_pairs_of_three():
    assert mf_exact(gen_lower_bound_family(3, 2)).value == 2


def test_mf_single_set():
    assert mf_exact(fam(2, {0, 1})).value == 1


def test_mf_triangle_plus_singleton():
    assert mf_exact(fam(4, {0, 1}, {1, 2}, {0, 2}, {3})).value == 3


def test_mf_ignores_empty_member():
    assert mf_exact(fam(2, set(), {0})).value == 1


def test_mf_exact_budget_carries_greedy_bound():
    f = gen_lower_bound_family(4, 3)
    with pytest.raises(BudgetExceeded) as info:
        mf_exact(f, budget=0)
    assert info.value.best == mf_greedy(f).value


def test_greedy_minimal_cover():
    assert mf_greedy(fam(3, {0}, {1}, {2})).value == 3
    assert mf_greedy(fam(3, {0, 1, 2}, {0}, {1})).value == 1


@given(families)
@settings(max_examples=40, deadline=None)
def test_exact_witness_is_a_moonflower_at_least_greedy(f):
    result = mf_exact(f)
    assert result.value >= mf_greedy(f).value
    assert len(result.witness) == result.value
    if result.value:
        assert is_moonflower([f[i] for i in result.witness.petal_indices]) is not None


@given(families)
@settings(max_examples=30, deadline=None)
def test_witness_is_induced_matching(f):
    result = mf_exact(f)
    G = incidence_graph(f)
    assert is_induced_matching(G, witness_matching(result.witness))


def test_family_stats():
    stats = family_stats(fam(4, {0, 1}, {1, 2}, {0, 2}, {3}))
    assert stats.size == 4
    assert stats.support_size == 4
    assert stats.max_set_size == 2
    assert stats.mf_exact == 3


# ------------------------------------------------------------- generators


@pytest.mark.parametrize("k,w,size,mf", [(3, 2, 3, 2), (3, 3, 4, 2), (2, 1, 1, 1), (4, 3, 10, 3)])
def test_lower_bound_family(k, w, size, mf):
    f = gen_lower_bound_family(k, w)
    assert len(f) == size == lower_bound_family_size(k, w)
    assert all(len(m) == w for m in f)
    assert mf_exact(f).value == mf == k - 1


def test_lower_bound_family_rejects_small_k():
    with pytest.raises(ValidationError):
        gen_lower_bound_family(1, 2)


def test_lower_bound_family_budget():
    with pytest.raises(BudgetExceeded):
        gen_lower_bound_family(20, 10, max_members=100)


# ---------------------------------------------------------- closure and VC


def test_union_closure_includes_empty_union():
    assert union_closure(fam(2, {0}, {1})) == fam(2, set(), {0}, {1}, {0, 1})
    assert union_closure(fam(2, {0, 1})) == fam(2, set(), {0, 1})


def test_union_closure_cap():
    f = SetFamily(12, [{i} for i in range(12)])
    with pytest.raises(BudgetExceeded):
        union_closure(f, cap=100)


def test_vc_dimension_examples():
    assert vc_dimension(fam(2, set(), {0}, {1}, {0, 1})) == 2
    assert vc_dimension(fam(2, {0}, {1})) == 1
    assert vc_dimension(fam(2, {0})) == 0


@given(families)
@settings(max_examples=30, deadline=None)
def test_union_closure_is_idempotent(f):
    closure = union_closure(f)
    assert union_closure(closure) == closure


@given(families)
@settings(max_examples=30, deadline=None)
def test_union_closure_vc_bounded_by_mf(f):
    assert vc_dimension(union_closure(f)) <= mf_exact(f).value


def test_sauer_shelah_counts_from_zero():
    assert sauer_shelah_bound(4, 1) == 5
    assert sauer_shelah_bound(4, 4) == 16
    assert sauer_shelah_bound(3, 0) == 1
