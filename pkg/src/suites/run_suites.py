# src/suites/run_suites.py
"""
Acceptance suites. Each suite returns a DataFrame with one row per checked
instance and a boolean `passed` column; run_suite adds timing, writes the
table to CSV and a JSON summary next to it.
"""

import json
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import sqrt
from pathlib import Path

import numpy as np
import pandas as pd

from common import report
from common.config import DEFAULT_CONSTANTS, Constants, default_seed, output_dir
from common.errors import ValidationError
from cover.entropy import choose_p, exception_budget
from cover.peel import peel_exceptional
from cover.phi import phi_value
from oracle.bruteforce import min_sparsifier_bruteforce, mf_bruteforce, nrd_bruteforce, phi_exact
from oracle.montecarlo import chernoff_exact_tail, chernoff_montecarlo
from puncture.iterated import extremal_bound, iterated_puncture
from puncture.one_step import ReductionConfig, one_step_reduce, run_process, step_budget
from setfam.closure import project, restricted_size_bound_holds, sauer_shelah_bound, union_closure, vc_dimension
from setfam.family import random_family
from setfam.generate import gen_lower_bound_family, lower_bound_family_size
from setfam.incidence import incidence_graph, is_induced_matching, witness_matching
from setfam.moonflower import mf_exact
from sparsify.build import SparsifierConfig, audit_build, build_sparsifier, size_report
from sparsify.code import Code, nrd, random_block_code, random_code
from sparsify.lower_bound import certify_lower_bound, gen_chain_code
from sparsify.sparsifier import Sparsifier, chernoff_bound

DEFAULT_TRIALS = {
    "extremal": None,
    "nrd": 200,
    "duality": 500,
    "peel": 500,
    "structural": 1000,
    "puncture": 200,
    "sparsify": 20,
    "lowerbound": None,
    "chernoff": 10 ** 5,
}

MIN_DECAY_SAMPLES = 50


@dataclass
class SuiteResult:
    name: str
    table: pd.DataFrame
    seconds: float
    seed: int

    @property
    def passed(self):
        return bool(self.table["passed"].all()) if len(self.table) else True

    def to_json(self):
        return {"suite": self.name, "passed": self.passed, "rows": len(self.table),
                "failures": int((~self.table["passed"].astype(bool)).sum()) if len(self.table) else 0,
                "seconds": self.seconds, "seed": self.seed}


def _small_families(rng, trials, n_max=10, size_max=10):
    for _ in range(trials):
        n = int(rng.integers(2, n_max + 1))
        size = int(rng.integers(1, size_max + 1))
        yield random_family(n, size, max_set=min(n, 4), rng=rng)


# ------------------------------------------------------------------ extremal

def suite_extremal(seed, trials=None, constants=DEFAULT_CONSTANTS):
    """binom(k+w-2, w) members, MF exactly k-1, under the extremal bound"""
    rows = []
    for k in range(2, 6):
        for w in range(1, 5):
            size = lower_bound_family_size(k, w)
            if size > 70:
                continue
            fam = gen_lower_bound_family(k, w)
            oracle = mf_bruteforce(fam).value
            exact = mf_exact(fam).value
            bound = extremal_bound(k, w, constants.C)
            rows.append({"k": k, "w": w, "size": len(fam), "expected": size, "mf_oracle": oracle,
                         "mf_exact": exact, "extremal_bound": float(bound),
                         "passed": len(fam) == size and oracle == k - 1 and exact == k - 1
                                   and size <= bound})
    return pd.DataFrame(rows)


# ----------------------------------------------------------------------- nrd

def suite_nrd(seed, trials=200):
    """NRD(C) = MF(F_C) on seeded random codes, three independent ways"""
    rng = np.random.default_rng(seed)
    rows = []
    for trial in report.progress(range(trials), desc="nrd"):
        n = int(rng.integers(3, 15))
        code = random_code(n, int(rng.integers(1, 11)), max_weight=min(n, 6), rng=rng)
        brute_nrd = nrd_bruteforce(code).value
        brute_mf = mf_bruteforce(code.support_family()).value
        exact = mf_exact(code.support_family()).value
        fast = nrd(code).value
        rows.append({"trial": trial, "n": n, "codewords": len(code), "nrd_oracle": brute_nrd,
                     "mf_oracle": brute_mf, "mf_exact": exact, "nrd": fast,
                     "passed": brute_nrd == brute_mf == exact == fast})
    return pd.DataFrame(rows)


# ------------------------------------------------------------------- duality

def suite_duality(seed, trials=500):
    """Exact primal = exact dual = oracle; float gap below 1e-9"""
    rng = np.random.default_rng(seed)
    rows = []
    for trial, fam in enumerate(report.progress(_small_families(rng, trials), desc="duality", total=trials)):
        exact = phi_value(fam, mode="exact")
        floating = phi_value(fam, mode="float")
        oracle = phi_exact(fam).value
        rows.append({"trial": trial, "n": fam.n, "members": len(fam), "phi": str(exact.value),
                     "oracle": str(oracle), "float_gap": floating.duality_gap,
                     "passed": exact.primal == exact.dual == oracle
                               and floating.duality_gap < 1e-9
                               and abs(floating.value - float(exact.value)) < 1e-6})
    return pd.DataFrame(rows)


# ---------------------------------------------------------------------- peel

def suite_peel(seed, trials=500):
    """Peeled remainder is p-covered and |S| tau* <= 1 <= |F| tau*"""
    rng = np.random.default_rng(seed)
    rows = []
    for trial, fam in enumerate(report.progress(_small_families(rng, trials), desc="peel", total=trials)):
        phi = phi_value(fam, mode="exact").value
        u = Fraction(int(rng.integers(1, 100)), 100)
        if phi >= 1:
            rows.append({"trial": trial, "members": len(fam), "phi": str(phi), "p": None,
                         "exceptional": 0, "tau_star": None, "passed": True})
            continue
        p = phi + (1 - phi) * u
        peel = peel_exceptional(fam, p, mode="exact")
        size = len(peel.exceptional)
        tau = peel.tau_star
        ok = peel.certifies(fam) and size >= 1 and size * tau <= 1 and len(fam) * tau >= 1 \
            and size <= 2 ** peel.entropy_bits + 1e-9
        rows.append({"trial": trial, "members": len(fam), "phi": str(phi), "p": str(p),
                     "exceptional": size, "tau_star": str(tau), "passed": ok})
    return pd.DataFrame(rows)


# ---------------------------------------------------------------- structural

def suite_structural(seed, trials=1000):
    """Projection, restriction, support, VC and Sauer-Shelah checks on small families"""
    rng = np.random.default_rng(seed)
    rows = []
    for trial, fam in enumerate(report.progress(_small_families(rng, trials, n_max=8, size_max=8),
                                                desc="structural", total=trials)):
        mf = mf_exact(fam)
        J = frozenset(int(x) for x in np.flatnonzero(rng.random(fam.n) < 0.5))
        projected = mf_exact(project(fam, J)).value
        closure = union_closure(fam)
        vc = vc_dimension(closure)
        checks = {
            "projection": projected <= mf.value,
            "restriction": restricted_size_bound_holds(fam, J),
            "support": len(fam.support()) <= mf.value * fam.max_set_size(),
            "vc": vc <= mf.value,
            "sauer_shelah": len(closure) <= sauer_shelah_bound(len(fam.support()), vc),
            "induced_matching": is_induced_matching(incidence_graph(fam), witness_matching(mf.witness)),
        }
        rows.append({"trial": trial, "n": fam.n, "members": len(fam), "mf": mf.value, "vc": vc,
                     **checks, "passed": all(checks.values())})
    return pd.DataFrame(rows)


# ------------------------------------------------------------------ puncture

def _decay_rows(seed, trials):
    fam = gen_lower_bound_family(4, 3)
    p = choose_p(0.25)
    t = step_budget(len(fam.support()), fam.max_set_size(), p, 1 / 16)
    by_step = {}
    for trial in report.progress(range(trials), desc="decay"):
        _, history, *_ = run_process(fam, p, t, seed + trial)
        for j in range(len(history) - 1):
            if history[j] > 0:
                by_step.setdefault(j, []).append(history[j + 1] / history[j])
    rows = []
    for j, ratios in sorted(by_step.items()):
        if len(ratios) < MIN_DECAY_SAMPLES:
            continue
        mean = float(np.mean(ratios))
        sigma = float(np.std(ratios) / sqrt(len(ratios)))
        rows.append({"check": "decay", "instance": f"step {j}", "samples": len(ratios),
                     "value": mean, "limit": 1 - p / 2 + 3 * sigma,
                     "passed": mean <= 1 - p / 2 + 3 * sigma})
    return rows


def _fixture_families(seed):
    fixtures = [gen_lower_bound_family(k, w) for k, w in [(3, 2), (4, 2), (4, 3), (3, 4), (5, 2)]]
    rng = np.random.default_rng(seed)
    while len(fixtures) < 10:
        fixtures.append(random_family(8, 12, max_set=3, rng=rng, min_set=2))
    return fixtures


def _attainment_rows(seed):
    rows = []
    p = choose_p(0.25)
    for idx, fam in enumerate(_fixture_families(seed)):
        M = exception_budget(len(fam.support()), mf_exact(fam).value + 1, p)
        trace = one_step_reduce(fam, ReductionConfig(p=p, delta=1 / 16, max_retries=50, seed=seed + 100 * idx), M=M)
        rows.append({"check": "attainment", "instance": f"fixture {idx}", "samples": len(fam),
                     "value": trace.covered_count,
                     "limit": (1 - trace.delta) * len(fam) - trace.t * trace.max_removed_members,
                     "M_measured": trace.M_measured, "M_budget": trace.M_budget,
                     "passed": trace.attained_bound and len(trace.I) <= trace.t})
    return rows


def _iterated_rows(seed):
    rows = []
    loose = Constants(C=1.0)
    for k, w in [(4, 3), (3, 2), (5, 2)]:
        fam = gen_lower_bound_family(k, w)
        result = iterated_puncture(fam, k, w, constants=loose, seed=seed)
        free = mf_exact(result.final_family).value <= k - 1 if len(result.final_family) else True
        rows.append({"check": "iterated", "instance": f"k={k} w={w}", "samples": len(fam),
                     "value": len(result.U_end), "limit": result.counting_bound,
                     "passed": free and len(result.rounds) <= 2 ** w + 1})
    return rows


def suite_puncture(seed, trials=200):
    """Potential decay, one-step attainment on ten fixtures, iterated survivors stay free"""
    rows = _decay_rows(seed, trials) + _attainment_rows(seed) + _iterated_rows(seed)
    return pd.DataFrame(rows)


# ------------------------------------------------------------------ sparsify

def _sparsify_fixtures(seed, trials):
    rng = np.random.default_rng(seed)
    yield "unit vectors k=8", Code(4096, [{i} for i in range(8)])
    yield "all ones", Code(4096, [range(4096)])
    for trial in range(trials):
        yield f"block code {trial}", random_block_code(2048, 6, int(rng.integers(8, 65)), rng)


def suite_sparsify(seed, trials=20, epsilon=0.25):
    """Build, verify and audit sparsifiers for the fixture codes"""
    rows = []
    for name, code in report.progress(list(_sparsify_fixtures(seed, trials)), desc="sparsify"):
        sp, log = build_sparsifier(code, SparsifierConfig(epsilon=epsilon, seed=seed))
        audit = audit_build(code, log)
        size = size_report(sp, log.k, code.n, epsilon)
        rows.append({"instance": name, "n": code.n, "codewords": len(code), "k": log.k,
                     "T": len(sp), "attempts": log.attempts,
                     "max_rel_err": float(log.verify.max_rel_err), "size_ratio": size["ratio"],
                     "recursion_ok": audit.recursion_ok, "budget_ok": audit.budget_ok,
                     "passed": log.verify.passed and audit.budget_ok and audit.recursion_ok})
    return pd.DataFrame(rows)


# ---------------------------------------------------------------- lowerbound

def suite_lowerbound(seed, trials=None):
    """
    Standard chain (8, 2, 1/2): NRD = k, the certifier flags the empty
    sparsifier, accepts the identity and never rejects the oracle's optimum.
    Separating chain (8, 2, 1/4): the exact minimum is at least k*s and every
    sparsifier with |T| < k*s is rejected with a witness.
    """
    rows = []
    code, spec = gen_chain_code(8, 2, 0.5)
    optimum = min_sparsifier_bruteforce(code, 0.5)
    best = Sparsifier(8, {i: a for i, a in optimum.witness["alpha"].items() if a > 0})
    empty = certify_lower_bound(spec, Sparsifier.empty(8))
    rows.append({"instance": "standard nrd", "value": nrd_bruteforce(code).value, "expected": spec.k,
                 "passed": nrd_bruteforce(code).value == spec.k == nrd(code).value})
    rows.append({"instance": "standard empty", "value": empty.verdict, "expected": "invalid",
                 "passed": empty.verdict == "invalid" and (empty.witness["i"], empty.witness["j"]) == (1, 1)})
    rows.append({"instance": "standard identity", "value": certify_lower_bound(spec, Sparsifier.identity(8)).verdict,
                 "expected": "consistent",
                 "passed": certify_lower_bound(spec, Sparsifier.identity(8)).verdict == "consistent"})
    rows.append({"instance": "standard optimum", "value": certify_lower_bound(spec, best).verdict,
                 "expected": "not invalid", "passed": certify_lower_bound(spec, best).verdict != "invalid"})

    code, spec = gen_chain_code(8, 2, 0.25, gap="separating")
    required = spec.k * spec.s
    minimum = min_sparsifier_bruteforce(code, 0.25).value
    rows.append({"instance": "separating minimum", "value": minimum, "expected": required,
                 "passed": minimum >= required})
    rejected = True
    for size in range(required):
        for T in combinations(range(spec.n), size):
            for weight in (1, 2):
                verdict = certify_lower_bound(spec, Sparsifier(spec.n, {i: weight for i in T}))
                rejected &= verdict.verdict == "invalid" and verdict.witness is not None
    rows.append({"instance": "separating sub-threshold", "value": rejected, "expected": True,
                 "passed": rejected})
    return pd.DataFrame(rows)


# ------------------------------------------------------------------ chernoff

def suite_chernoff(seed, trials=10 ** 5):
    """Empirical and exact tails of Bin(t, 1/2) under 2 exp(-delta^2 / 3t)"""
    rows = []
    for t in (4, 16, 64, 256):
        for factor in (1, 2, 4):
            delta = factor * sqrt(t)
            bound = chernoff_bound(t, delta)
            empirical = chernoff_montecarlo(t, delta, trials=trials, seed=seed + t * 10 + factor)
            exact = chernoff_exact_tail(t, delta)
            applies = bound < 1
            rows.append({"t": t, "delta": delta, "bound": bound, "empirical": empirical.estimate,
                         "exact": exact, "applies": applies,
                         "passed": not applies or (empirical.estimate <= bound and exact <= bound)})
    return pd.DataFrame(rows)


SUITES = {
    "extremal": suite_extremal,
    "nrd": suite_nrd,
    "duality": suite_duality,
    "peel": suite_peel,
    "structural": suite_structural,
    "puncture": suite_puncture,
    "sparsify": suite_sparsify,
    "lowerbound": suite_lowerbound,
    "chernoff": suite_chernoff,
}


def run_suite(name, seed=None, trials=None, out_dir=None, save=True):
    """
    Run one suite and write suite_<name>.csv and suite_<name>.json.

    Parameters:
    -----------
    name : str
        One of SUITES
    seed : int, optional
        Defaults to MOONFLOWER_SEED or the documented default
    trials : int, optional
        Overrides the suite's default trial count
    """
    if name not in SUITES:
        raise ValidationError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    seed = default_seed() if seed is None else seed
    trials = DEFAULT_TRIALS[name] if trials is None else trials

    report.banner(f"Suite: {name}")
    start = time.monotonic()
    table = SUITES[name](seed, trials) if trials is not None else SUITES[name](seed)
    result = SuiteResult(name, table, time.monotonic() - start, seed)

    if save:
        target = output_dir() if out_dir is None else Path(out_dir)
        target.mkdir(parents=True, exist_ok=True)
        table.to_csv(target / f"suite_{name}.csv", index=False)
        (target / f"suite_{name}.json").write_text(json.dumps(result.to_json(), indent=2))
    if result.passed:
        report.ok(f"{name}: {len(table)} rows passed in {result.seconds:.1f}s")
    else:
        report.warn(f"{name}: {result.to_json()['failures']} of {len(table)} rows failed")
    return result


def run_all(seed=None, trials=None, out_dir=None):
    return [run_suite(name, seed=seed, trials=trials, out_dir=out_dir) for name in SUITES]
