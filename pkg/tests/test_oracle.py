# tests/test_oracle.py

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from common.errors import BudgetExceeded, ValidationError
from cover.phi import phi_value
from oracle.bruteforce import (
    OracleBudget,
    mf_bruteforce,
    min_sparsifier_bruteforce,
    nrd_bruteforce,
    phi_exact,
)
from oracle.lp import simplex
from oracle.montecarlo import chernoff_exact_tail, chernoff_montecarlo
from setfam.family import SetFamily
from setfam.generate import gen_lower_bound_family
from setfam.moonflower import mf_exact
from sparsify.code import Code, nrd
from sparsify.lower_bound import gen_chain_code
from sparsify.sparsifier import Sparsifier, verify_sparsifier

families = st.lists(
    st.frozensets(st.integers(min_value=0, max_value=5), max_size=4),
    max_size=7,
).map(lambda ms: SetFamily(6, ms))


def test_slack_simplex():
    status, x, value, y = simplex([[1, 2], [3, 1]], [4, 6], [1, 1])
    assert status == "optimal"
    assert value == Fraction(14, 5)
    assert x == [Fraction(8, 5), Fraction(6, 5)]
    assert sum(yi * bi for yi, bi in zip(y, [4, 6])) == value


def test_slack_simplex_infeasible_start():
    # x >= 1 written as -x <= -1, maximize -x
    status, x, value, _ = simplex([[-1]], [-1], [-1])
    assert status == "optimal"
    assert value == -1
    assert simplex([[1], [-1]], [1, -2], [1])[0] == "infeasible"


# ------------------------------------------------------------------------ MF


def test_mf_bruteforce_examples():
    assert mf_bruteforce(gen_lower_bound_family(3, 2)).value == 2
    assert mf_bruteforce(SetFamily(4, [{i} for i in range(4)])).value == 4
    triangle = SetFamily(4, [{0, 1}, {1, 2}, {0, 2}, {3}])
    assert mf_bruteforce(triangle).value == 3


@given(families)
@settings(max_examples=40, deadline=None)
def test_mf_exact_matches_bruteforce(f):
    assert mf_exact(f).value == mf_bruteforce(f).value


def test_mf_bruteforce_budget_fails_closed():
    with pytest.raises(BudgetExceeded):
        mf_bruteforce(gen_lower_bound_family(4, 3), budget=OracleBudget(max_subsets=5))


def test_budget_validation():
    with pytest.raises(ValidationError):
        OracleBudget(max_subsets=0)
    with pytest.raises(ValidationError):
        OracleBudget(time_cap=-1)


# ----------------------------------------------------------------------- NRD


def test_nrd_bruteforce_examples():
    assert nrd_bruteforce(Code(6, [{i} for i in range(4)])).value == 4
    code, _ = gen_chain_code(8, 2, 0.5)
    assert nrd_bruteforce(code).value == 2


@given(families)
@settings(max_examples=30, deadline=None)
def test_nrd_matches_bruteforce(f):
    code = Code(f.n, f.members)
    assert nrd(code).value == nrd_bruteforce(code).value


# ----------------------------------------------------------------------- phi


def test_phi_exact_examples():
    assert phi_exact(SetFamily(2, [{0}, {1}])).value == Fraction(1, 2)
    assert phi_exact(SetFamily(2, [{0, 1}])).value == 1
    assert phi_exact(SetFamily(2, [])).value == 1
    assert phi_exact(SetFamily(2, [set(), {0}])).value == 0


def test_phi_exact_budget():
    f = SetFamily(10, [{i} for i in range(10)])
    with pytest.raises(BudgetExceeded):
        phi_exact(f, budget=OracleBudget(max_lp_vars=5))


@given(families.filter(lambda f: len(f) > 0 and not f.has_empty_member()))
@settings(max_examples=30, deadline=None)
def test_phi_matches_exact_lp(f):
    oracle = phi_exact(f)
    assert phi_value(f, mode="exact").value == oracle.value
    assert oracle.witness["primal"] == oracle.witness["dual"] == oracle.value


# ---------------------------------------------------------------- sparsifier


def test_min_sparsifier_of_all_ones_word():
    result = min_sparsifier_bruteforce(Code(5, [range(5)]), 0.1)
    assert result.value == 1
    (coord,) = result.witness["T"]
    assert result.witness["alpha"][coord] >= Fraction(9, 2)


def test_min_sparsifier_of_unit_vectors():
    assert min_sparsifier_bruteforce(Code(5, [{0}, {1}, {2}]), 0.2).value == 3


def test_min_sparsifier_of_chain_codes():
    code, _ = gen_chain_code(8, 2, 0.5)
    assert min_sparsifier_bruteforce(code, 0.5).value == 2
    code, spec = gen_chain_code(8, 2, 0.25, gap="separating")
    result = min_sparsifier_bruteforce(code, 0.25)
    assert result.value == spec.k * spec.s == 4
    sp = Sparsifier(8, result.witness["alpha"])
    assert verify_sparsifier(code, sp, 0.25).passed


def test_min_sparsifier_rejects_negative_epsilon():
    with pytest.raises(ValidationError):
        min_sparsifier_bruteforce(Code(2, [{0}]), -0.1)


# ------------------------------------------------------------------ chernoff


def test_chernoff_exact_tail():
    assert chernoff_exact_tail(3, 1) == pytest.approx(0.25)
    assert chernoff_exact_tail(4, 4) == 0
    assert chernoff_exact_tail(4, 0) == pytest.approx(1 - 6 / 16)


def test_chernoff_montecarlo_brackets_exact_tail():
    est = chernoff_montecarlo(20, 4, trials=40_000, seed=5)
    exact = chernoff_exact_tail(20, 4)
    assert abs(est.estimate - exact) < 8 * max(est.sigma, 1e-3)
    assert est.lower <= est.estimate <= est.upper


def test_chernoff_montecarlo_is_seeded():
    a = chernoff_montecarlo(10, 2, trials=10_000, seed=1)
    b = chernoff_montecarlo(10, 2, trials=10_000, seed=1)
    assert a.estimate == b.estimate


def test_chernoff_montecarlo_validation():
    with pytest.raises(ValidationError):
        chernoff_montecarlo(0, 1)
    with pytest.raises(ValidationError):
        chernoff_montecarlo(5, 1, trials=10)
