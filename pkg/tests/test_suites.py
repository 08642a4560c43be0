# tests/test_suites.py

import json

import pytest

from common.errors import ValidationError
from suites.run_suites import (
    SUITES,
    run_suite,
    suite_chernoff,
    suite_duality,
    suite_extremal,
    suite_lowerbound,
    suite_nrd,
    suite_peel,
    suite_puncture,
    suite_sparsify,
    suite_structural,
)

SEED = 20240601


def test_extremal_suite():
    table = suite_extremal(SEED)
    assert len(table) > 0
    assert table["passed"].all()


@pytest.mark.parametrize("suite,trials", [
    (suite_nrd, 5),
    (suite_duality, 5),
    (suite_peel, 5),
    (suite_structural, 10),
])
def test_randomized_suites_small(suite, trials):
    table = suite(SEED, trials)
    assert len(table) == trials
    assert table["passed"].all()


def test_puncture_suite():
    table = suite_puncture(SEED, trials=60)
    assert set(table["check"]) == {"decay", "attainment", "iterated"}
    assert (table["check"] == "attainment").sum() == 10
    attainment = table[table["check"] == "attainment"]
    assert (attainment["M_budget"] >= 1).all()
    assert table["passed"].all()


def test_sparsify_suite_single_block_code():
    table = suite_sparsify(SEED, trials=1)
    assert list(table["instance"]) == ["unit vectors k=8", "all ones", "block code 0"]
    assert table["passed"].all()
    assert (table["max_rel_err"] == 0).all()


def test_lowerbound_suite():
    table = suite_lowerbound(SEED)
    assert table["passed"].all()
    row = table.set_index("instance").loc["separating minimum"]
    assert row["value"] == 4


def test_chernoff_suite():
    table = suite_chernoff(SEED, trials=10 ** 4)
    assert len(table) == 12
    assert table["passed"].all()
    assert table["applies"].any()


def test_run_suite_writes_reports(tmp_path):
    result = run_suite("lowerbound", seed=SEED, out_dir=tmp_path)
    assert result.passed
    assert (tmp_path / "suite_lowerbound.csv").exists()
    summary = json.loads((tmp_path / "suite_lowerbound.json").read_text())
    assert summary["passed"] and summary["seed"] == SEED


def test_run_suite_without_saving(tmp_path):
    result = run_suite("extremal", seed=SEED, out_dir=tmp_path, save=False)
    assert result.passed
    assert not list(tmp_path.iterdir())


def test_run_suite_rejects_unknown_name():
    with pytest.raises(ValidationError):
        run_suite("nope")


def test_suite_registry():
    assert set(SUITES) == {"extremal", "nrd", "duality", "peel", "structural", "puncture",
                           "sparsify", "lowerbound", "chernoff"}
