# tests/test_puncture.py

from dataclasses import FrozenInstanceError
from fractions import Fraction
from math import isclose

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from common.config import Constants
from common.errors import ValidationError
from cover.entropy import choose_p, exception_budget
from puncture.iterated import extremal_bound, iterated_puncture
from puncture.one_step import (
    ReductionConfig,
    one_step_reduce,
    potential,
    potential_ratios,
    residual_traces,
    run_process,
    step_budget,
    trace_puncture_to_empty,
    trace_step_budget,
)
from puncture.weight_scale import (
    layer_level,
    layer_size_bound,
    weight_scale_puncture,
    weight_scale_size_bound,
)
from setfam.family import SetFamily
from setfam.generate import gen_lower_bound_family

SEED = 7

families = st.lists(
    st.frozensets(st.integers(min_value=0, max_value=6), min_size=1, max_size=3),
    min_size=1,
    max_size=8,
).map(lambda ms: SetFamily(7, ms))


# ---------------------------------------------------------------- budgets


def test_step_budget():
    assert step_budget(100, 3, 0.5, 0.25) == 14
    assert step_budget(5, 3, 0.01, 0.25) == 5


def test_trace_step_budget():
    assert trace_step_budget(100, 8, 3, 1.0) == 9
    assert trace_step_budget(2, 8, 3, 1.0) == 2


def test_potential():
    assert potential([frozenset({0}), frozenset({1, 2})]) == 6
    assert potential([]) == 0


@pytest.mark.parametrize("kwargs", [
    {"p": 0}, {"p": 1}, {"p": 0.1, "delta": 0.5}, {"p": 0.1, "theta": 1},
    {"p": 0.1, "B": 0}, {"p": 0.1, "max_retries": 0}, {"p": 0.1, "mode": "decimal"},
])
def test_reduction_config_validation(kwargs):
    with pytest.raises(ValidationError):
        ReductionConfig(**kwargs)


# ---------------------------------------------------------- potential process


@given(families, st.integers(min_value=0, max_value=10 ** 6))
@settings(max_examples=20, deadline=None)
def test_potential_never_increases(f, seed):
    I, history, removed, _, _, steps, counts = run_process(f, 0.3, 7, seed)
    assert all(b <= a for a, b in zip(history, history[1:]))
    assert len(counts) == len(history)
    assert all(phi >= 2 * live for phi, live in zip(history, counts))
    assert steps == len(I)
    assert removed <= len(f)


def test_one_step_empty_family():
    cfg = ReductionConfig(p=0.2, seed=SEED)
    trace = one_step_reduce(SetFamily(4, []), cfg)
    assert trace.I == frozenset()
    assert trace.covered_count == 0
    assert trace.attained_bound


def test_one_step_single_member():
    cfg = ReductionConfig(p=0.2, seed=SEED)
    trace = one_step_reduce(SetFamily(3, [{0}]), cfg)
    assert trace.I == frozenset({0})
    assert trace.covered_count == 1
    assert trace.attained_bound


def test_one_step_lower_bound_family():
    f = gen_lower_bound_family(4, 3)
    cfg = ReductionConfig(p=choose_p(0.25), delta=1 / 16, max_retries=20, seed=SEED)
    trace = one_step_reduce(f, cfg, M=10.0)
    assert trace.attained_bound
    assert trace.t == 5
    assert trace.I == frozenset(range(5))
    assert trace.covered_count == len(f)
    assert trace.M_budget == 10.0
    assert potential_ratios(trace)
    assert trace.to_json()["seed"] == trace.seed
    with pytest.raises(FrozenInstanceError):
        trace.M_budget = 1.0


def test_residual_traces():
    f = SetFamily(4, [{0, 1}, {0, 2}, {3}])
    assert residual_traces(f, frozenset({0})) == 3
    assert residual_traces(f, frozenset({0, 3})) == 2
    assert residual_traces(f, frozenset(range(4))) == 0


def test_trace_puncture_single_member_full_level():
    trace = trace_puncture_to_empty(SetFamily(1, [{0}]), 1.0, seed=SEED)
    assert trace.I == frozenset({0})
    assert trace.steps == 1
    assert trace.residual == 0
    assert trace.attained_bound


def test_trace_puncture_empty_family():
    trace = trace_puncture_to_empty(SetFamily(3, []), 0.5, seed=SEED)
    assert trace.I == frozenset()
    assert trace.residual == 0


def test_trace_puncture_rejects_level():
    with pytest.raises(ValidationError):
        trace_puncture_to_empty(SetFamily(1, [{0}]), 0)


@given(families, st.integers(min_value=0, max_value=10 ** 6))
@settings(max_examples=15, deadline=None)
def test_trace_puncture_reports_its_own_residual(f, seed):
    trace = trace_puncture_to_empty(f, 0.5, seed=seed, max_retries=2)
    assert trace.residual == residual_traces(f, trace.I)
    assert trace.attained_bound == (trace.residual <= trace.t * max(1, trace.M_measured))


# ------------------------------------------------------------- weight scale


def test_layer_level():
    assert layer_level(3, 3, 2, 0.2, 0.01) == 0.25
    assert isclose(layer_level(6, 3, 2, 0.2, 0.01), 0.01 * 0.04 * 2 / 3)


def test_layer_size_bound():
    assert layer_size_bound(4, 4) == 1.0
    assert layer_size_bound(8, 2) == 3.0
    assert layer_size_bound(2, 8, C_lay=2.0) == 2.0


def test_weight_scale_size_bound_is_positive_at_width_one():
    assert weight_scale_size_bound(2, 1, 0.1, 0.01, 0.0) > 0


def test_weight_scale_empty_layer():
    result = weight_scale_puncture(SetFamily(5, []), k=3, w=2, eta=0.2, theta=0.01, seed=SEED)
    assert result.I == frozenset()
    assert result.attained


def test_weight_scale_disjoint_layer_is_fully_covered():
    layer = SetFamily(6, [{0, 1, 2}, {3, 4, 5}])
    result = weight_scale_puncture(layer, k=3, w=2, eta=0.2, theta=0.01, seed=SEED)
    assert result.I == frozenset(range(6))
    assert result.residual == 0
    assert result.attained
    assert result.a == layer_level(6, 3, 2, 0.2, 0.01)


def test_weight_scale_reports_budget_and_size_bounds():
    layer = SetFamily(6, [{0, 1, 2}, {3, 4, 5}])
    result = weight_scale_puncture(layer, k=3, w=2, eta=0.2, theta=0.01, seed=SEED)
    assert isclose(result.M_budget, exception_budget(6, 3, result.p))
    assert result.trace.M_budget == result.M_budget
    assert isclose(result.size_bound, weight_scale_size_bound(3, 2, 0.2, 0.01, 1.0))
    assert result.within_size_bound
    assert result.layer_ratio == 0.25
    assert result.layer_bound == layer_size_bound(3, 4)
    data = result.to_json()
    assert data["M_budget"] == result.M_budget
    assert data["M_measured"] == result.trace.M_measured
    assert data["size_bound"] == result.size_bound


@pytest.mark.parametrize("eta,theta", [(0.25, 0.01), (0.0, 0.01), (0.1, 1.0)])
def test_weight_scale_validation(eta, theta):
    with pytest.raises(ValidationError):
        weight_scale_puncture(SetFamily(2, [{0, 1}]), k=2, w=1, eta=eta, theta=theta)


# ---------------------------------------------------------------- iterated


def test_extremal_bound_examples():
    assert extremal_bound(3, 3, 2) == 8
    assert extremal_bound(8, 2, 1) == 16
    assert extremal_bound(2, 4, 1) == 4
    assert extremal_bound(3, 2, 1.5) == Fraction(81, 16)


def test_iterated_empty_family():
    result = iterated_puncture(SetFamily(4, []), k=3, w=2, seed=SEED)
    assert result.regime == "empty"
    assert result.final_size == 0
    assert result.bound_holds


def test_iterated_singletons():
    result = iterated_puncture(SetFamily(5, [{0}, {1}]), k=3, w=1, seed=SEED)
    assert result.regime == "singleton"
    assert result.counting_bound == 2
    assert result.final_size == 2


def test_iterated_small_family_stops_on_size_bound():
    f = gen_lower_bound_family(4, 3)
    result = iterated_puncture(f, k=4, w=3, seed=SEED)
    assert result.regime == "w<=k"
    assert result.stop_reason == "size_bound"
    assert result.U_end == f.support()
    assert len(result.rounds) == 1
    assert result.bound_holds


def test_iterated_runs_a_round_with_small_constant():
    f = gen_lower_bound_family(4, 3)
    result = iterated_puncture(f, k=4, w=3, constants=Constants(C=1.0), seed=SEED)
    assert result.stop_reason == "stall"
    assert result.final_size == len(f)
    assert not result.bound_holds
    row = result.rounds.iloc[0]
    assert row["attained"]
    assert row["I_size"] == 5
    assert isclose(row["M_budget"], exception_budget(9, 4, row["p"]))
    assert row["M_measured"] >= 0
    assert result.counting_bound == 4 * 26


def test_iterated_large_width_regime():
    f = gen_lower_bound_family(2, 3)
    result = iterated_puncture(f, k=2, w=3, seed=SEED)
    assert result.regime == "w>k"
    assert result.stop_reason == "size_bound"
    assert result.counting_bound == 2 * 4


def test_iterated_rejects_wide_member():
    with pytest.raises(ValidationError):
        iterated_puncture(SetFamily(4, [{0, 1, 2}]), k=3, w=2)


def test_iterated_report_json():
    result = iterated_puncture(gen_lower_bound_family(4, 3), k=4, w=3, seed=SEED)
    data = result.to_json()
    assert data["regime"] == "w<=k"
    assert data["constants"]["C"] == 6.0
    assert len(data["rounds"]) == 1


def test_iterated_large_width_level_uses_its_own_constant():
    f = SetFamily(64, [{2 * i, 2 * i + 1} for i in range(32)])
    default = iterated_puncture(f, k=1, w=2, seed=SEED).rounds.iloc[0]
    assert default["a"] == pytest.approx(1 / 16)
    assert default["M_budget"] == pytest.approx(exception_budget(64, 1, default["p"]))
    wider = iterated_puncture(f, k=1, w=2, constants=Constants(C_level=16.0), seed=SEED).rounds.iloc[0]
    assert wider["a"] == pytest.approx(1 / 32)
    halving = iterated_puncture(f, k=1, w=2, constants=Constants(C1=16.0), seed=SEED).rounds.iloc[0]
    assert halving["a"] == pytest.approx(1 / 16)


def test_iterated_report_is_frozen():
    result = iterated_puncture(SetFamily(4, []), k=3, w=2, seed=SEED)
    with pytest.raises(FrozenInstanceError):
        result.stop_reason = "round_cap"
