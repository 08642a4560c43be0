# tests/test_cover.py

from fractions import Fraction
from math import isclose, log2

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from common.errors import ValidationError
from cover.entropy import (
    amplification_diagnostic,
    choose_p,
    entropy_bits,
    exception_budget,
    h_bound,
    phi_rate,
)
from cover.peel import min_linf_smooth, peel_exceptional
from cover.phi import Distribution, FamilyDistribution, covers_all, phi_value, smooth_distribution
from cover.simplex import solve_lp
from setfam.family import SetFamily

nonempty_families = st.lists(
    st.frozensets(st.integers(min_value=0, max_value=5), min_size=1, max_size=3),
    min_size=1,
    max_size=7,
).map(lambda ms: SetFamily(6, ms))


def fam(n, *members):
    return SetFamily(n, [frozenset(m) for m in members])


# ------------------------------------------------------------------ simplex


def test_solve_lp_modes_agree():
    # max x + y  s.t.  x + 2y <= 4,  3x + y <= 6
    c = [1, 1]
    A = [[1, 2], [3, 1]]
    b = [4, 6]
    exact = solve_lp(c, A, b, mode="exact")
    approx = solve_lp(c, A, b, mode="float")
    assert exact.optimal and approx.optimal
    assert exact.value == Fraction(14, 5)
    assert isclose(approx.value, 2.8, abs_tol=1e-9)


def test_solve_lp_reports_infeasible():
    sol = solve_lp([1], [[1]], [1], [[1]], [2], mode="exact")
    assert sol.status == "infeasible"


def test_solve_lp_rejects_unknown_mode():
    with pytest.raises(ValidationError):
        solve_lp([1], [[1]], [1], mode="decimal")


# --------------------------------------------------------------------- phi


def test_phi_single_set():
    result = phi_value(fam(2, {0, 1}))
    assert result.value == 1
    assert result.duality_gap == 0


def test_phi_two_singletons():
    result = phi_value(fam(2, {0}, {1}))
    assert result.value == Fraction(1, 2)
    assert result.cover.weights == {0: Fraction(1, 2), 1: Fraction(1, 2)}
    assert result.smooth.weights == {0: Fraction(1, 2), 1: Fraction(1, 2)}


@pytest.mark.parametrize("n", [1, 3, 5])
def test_phi_disjoint_singletons(n):
    result = phi_value(SetFamily(n, [{i} for i in range(n)]))
    assert result.value == Fraction(1, n)


def test_phi_empty_family_is_degenerate():
    result = phi_value(SetFamily(3, []))
    assert result.degenerate
    assert result.value == 1
    assert result.smooth is None


def test_phi_with_empty_member_is_zero():
    result = phi_value(fam(2, set(), {0}))
    assert result.value == 0
    assert result.has_empty_member


@given(nonempty_families)
@settings(max_examples=25, deadline=None)
def test_phi_duality_and_modes(f):
    exact = phi_value(f, mode="exact")
    approx = phi_value(f, mode="float")
    assert exact.primal == exact.dual
    assert isclose(float(exact.value), approx.value, abs_tol=1e-6)
    assert covers_all(f, exact.cover, exact.value)
    assert exact.smooth.max_hit(f) == exact.value


def test_smooth_distribution_examples():
    D = smooth_distribution(fam(2, {0}, {1}), 0.6)
    assert D.weights == {0: Fraction(1, 2), 1: Fraction(1, 2)}
    assert smooth_distribution(fam(2, {0, 1}), 0.5) is None


def test_smooth_distribution_for_disjoint_singletons():
    k = 4
    D = smooth_distribution(SetFamily(k, [{i} for i in range(k)]), 2 / k)
    assert D.max_hit(SetFamily(k, [{i} for i in range(k)])) == Fraction(1, k)


def test_smooth_distribution_rejects_level():
    with pytest.raises(ValidationError):
        smooth_distribution(fam(1, {0}), 1.5)


def test_distribution_json():
    D = Distribution({0: Fraction(1, 3), 2: Fraction(2, 3)})
    assert Distribution.from_json(D.to_json()) == D
    assert FamilyDistribution.from_json({"1": 0.5}).weights == {1: 0.5}


# -------------------------------------------------------------------- peel


def test_peel_already_covered():
    result = peel_exceptional(fam(2, {0, 1}), 0.5)
    assert result.exceptional == frozenset()
    assert result.already_covered
    assert result.tau_star is None


def test_peel_two_singletons():
    f = fam(2, {0}, {1})
    result = peel_exceptional(f, 0.9)
    assert result.exceptional == frozenset({0, 1})
    assert result.tau_star == Fraction(1, 2)
    assert isclose(result.entropy_bits, 1.0)
    assert result.certifies(f)
    assert len(result.remainder(f)) == 0


def test_min_linf_smooth_spreads_mass():
    nu, tau = min_linf_smooth(SetFamily(3, [{0}, {1}, {2}]), Fraction(1, 2))
    assert tau == Fraction(1, 3)
    assert nu == [Fraction(1, 3)] * 3


def test_peel_rejects_level():
    with pytest.raises(ValidationError):
        peel_exceptional(fam(1, {0}), 0)


@given(nonempty_families, st.sampled_from(["exact", "float"]))
@settings(max_examples=25, deadline=None)
def test_peel_certifies_remainder(f, mode):
    p = 0.9
    result = peel_exceptional(f, p, mode=mode)
    assert result.certifies(f)
    if result.exceptional:
        tau = float(result.tau_star)
        assert len(result.exceptional) * tau <= 1 + 1e-9 or result.rounds > 1
        assert tau >= 1 / len(f) - 1e-9
        assert log2(1 / tau) <= result.entropy_bits + 1e-6


# ----------------------------------------------------------------- entropy


def test_entropy_examples():
    assert entropy_bits([0.25] * 4) == 2.0
    assert entropy_bits([1.0]) == 0.0
    assert entropy_bits([0.5, 0.25, 0.25]) == 1.5


def test_entropy_rejects_non_distribution():
    with pytest.raises(ValidationError):
        entropy_bits([0.5, 0.1])


def test_choose_p_examples():
    p = choose_p(0.25)
    assert isclose(p, 1 / 64)
    assert isclose(phi_rate(p), 6 / 64)
    assert isclose(choose_p(0.125), 1 / 160)
    assert phi_rate(choose_p(0.125)) <= 0.125


@given(st.floats(min_value=1e-6, max_value=0.25))
@settings(max_examples=50, deadline=None)
def test_choose_p_keeps_rate_below_target(a):
    assert phi_rate(choose_p(a)) <= a


def test_choose_p_range():
    with pytest.raises(ValidationError):
        choose_p(0.3)
    with pytest.raises(ValidationError):
        choose_p(0)


def test_h_bound_examples():
    assert isclose(h_bound(8, 2, 0.25), 2.0)
    assert h_bound(4, 4, 0.3) == 0
    with pytest.raises(ValidationError):
        h_bound(2, 4, 0.3)


def test_exception_budget():
    assert isclose(exception_budget(8, 2, 0.25), 4.0)
    assert exception_budget(4, 4, 0.3) == 1.0
    assert exception_budget(3, 4, 0.3) == 1.0


def test_amplification_on_disjoint_singletons():
    k = 4
    f = SetFamily(k, [{i} for i in range(k)])
    D = FamilyDistribution({j: 1 / k for j in range(k)})
    diag = amplification_diagnostic(f, D, 1 / k)
    assert diag.closure_size == 2 ** k
    assert isclose(diag.entropy, 2.0)
    assert isclose(diag.ratio, 1.0)


def test_amplification_rejects_non_smooth():
    f = fam(2, {0}, {1})
    with pytest.raises(ValidationError):
        amplification_diagnostic(f, FamilyDistribution({0: 1.0}), 0.5)
