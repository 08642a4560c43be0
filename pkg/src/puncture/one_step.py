# src/puncture/one_step.py
"""
One-step universe reduction by the potential process.

Starting from I = ∅, each step
  1. peels the exceptional traces of the current trace family,
  2. samples a coordinate i from the cover Q of what is left and adds it to I,
  3. deletes i from every trace, dropping empty and duplicate traces.

The potential Phi_j = sum over current traces A of 2^|A| drops by a factor
(1 - p/2) per step in expectation. Success is existential, so the drivers
retry with consecutive seeds and report whether the bound was met.
"""

from dataclasses import dataclass, field, replace
from math import ceil, log

import numpy as np

from common import report
from common.config import default_seed
from common.errors import ValidationError
from cover.peel import peel_exceptional
from cover.simplex import check_mode
from setfam.family import SetFamily

HISTORY_LIMIT = 1000


@dataclass(frozen=True)
class ReductionConfig:
    p: float
    delta: float = 1 / 16
    B: float = 1.0
    theta: float = 0.01
    max_retries: int = 50
    seed: int = field(default_factory=default_seed)
    mode: str = "float"

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValidationError(f"p must lie in (0, 1), got {self.p}")
        if not 0 < self.delta < 0.5:
            raise ValidationError(f"delta must lie in (0, 1/2), got {self.delta}")
        if not 0 < self.theta < 1:
            raise ValidationError(f"theta must lie in (0, 1), got {self.theta}")
        if self.B <= 0:
            raise ValidationError("B must be positive")
        if self.max_retries < 1:
            raise ValidationError("max_retries must be at least 1")
        check_mode(self.mode)

    def with_seed(self, seed):
        return replace(self, seed=seed)


@dataclass(frozen=True)
class PunctureTrace:
    """
    Record of one potential-process run.

    trace_counts[j] is the number of live traces when potential_history[j]
    was taken, so potential_history[j] >= 2 * trace_counts[j].

    removed_count counts original members behind the peeled traces;
    M_measured is the largest number of traces peeled in one step and
    max_removed_members the largest number of original members behind them.
    """
    I: frozenset
    covered_count: int
    removed_count: int
    potential_history: list
    steps: int
    seed: int
    attained_bound: bool
    t: int
    family_size: int
    p: float
    M_measured: int = 0
    max_removed_members: int = 0
    delta: float = None
    residual: int = None
    M_budget: float = None
    trace_counts: tuple = ()

    def to_json(self):
        return {
            "I": sorted(self.I),
            "covered_count": self.covered_count,
            "removed_count": self.removed_count,
            "potential_history": self.potential_history[:HISTORY_LIMIT],
            "trace_counts": list(self.trace_counts[:HISTORY_LIMIT]),
            "steps": self.steps,
            "seed": self.seed,
            "attained_bound": self.attained_bound,
            "t": self.t,
            "family_size": self.family_size,
            "p": self.p,
            "delta": self.delta,
            "M_measured": self.M_measured,
            "max_removed_members": self.max_removed_members,
            "M_budget": self.M_budget,
            "residual": self.residual,
        }


def step_budget(n, w, p, delta):
    """t = min{n, ceil((2/p)(w ln 2 + ln(1/delta)))}"""
    return min(n, ceil((2 / p) * (w * log(2) + log(1 / delta))))


def trace_step_budget(n, size, w, p):
    """t = min{n, ceil((2/p) ln(|F| 2^w))}"""
    return min(n, ceil((2 / p) * (log(size) + w * log(2))))


def potential(traces):
    return sum(1 << len(a) for a in traces)


def potential_ratios(trace):
    h = trace.potential_history
    return [h[j + 1] / h[j] for j in range(len(h) - 1) if h[j] > 0]


def _sample(cover, rng):
    coords = sorted(i for i, v in cover.weights.items() if v > 0)
    probs = np.array([float(cover.weights[i]) for i in coords])
    probs = probs / probs.sum()
    return coords[int(rng.choice(len(coords), p=probs))]


def run_process(fam, p, t, seed, mode="float"):
    """
    One seeded run of at most t steps; stops early once no trace is left.

    Returns (I, potential_history, removed_members, max_traces_peeled,
    max_members_peeled, steps, trace_counts).
    """
    rng = np.random.default_rng(seed)
    traces = {}
    for idx, m in enumerate(fam.members):
        if m:
            traces.setdefault(m, set()).add(idx)

    I = set()
    history = [potential(traces)]
    counts = [len(traces)]
    removed = 0
    max_traces = 0
    max_members = 0
    steps = 0
    while steps < t and traces:
        current = SetFamily(fam.n, traces.keys())
        peel = peel_exceptional(current, p, mode=mode)
        if peel.exceptional:
            peeled = [current[j] for j in peel.exceptional]
            members = sum(len(traces[a]) for a in peeled)
            for a in peeled:
                del traces[a]
            removed += members
            max_traces = max(max_traces, len(peeled))
            max_members = max(max_members, members)
        if not traces:
            history.append(0)
            counts.append(0)
            break

        i = _sample(peel.cover, rng)
        I.add(i)
        steps += 1
        shrunk = {}
        for a, owners in traces.items():
            rest = a - {i}
            if rest:
                shrunk.setdefault(rest, set()).update(owners)
        traces = shrunk
        history.append(potential(traces))
        counts.append(len(traces))
    return frozenset(I), history, removed, max_traces, max_members, steps, tuple(counts)


def _empty_trace(fam, p, seed, delta=None):
    return PunctureTrace(frozenset(), len(fam), 0, [0], 0, seed, True, 0, len(fam), p,
                         delta=delta, residual=0, trace_counts=(0,))


def _note_budget(trace, M):
    if M is None:
        return trace
    if trace.M_measured > M:
        report.warn(f"measured exceptions {trace.M_measured} exceed the budget {M:.3g}")
    return replace(trace, M_budget=M)


def one_step_reduce(fam, cfg, M=None):
    """
    Potential-process reduction with retries.

    A run attains the bound when the members inside I number at least
    (1 - delta)|F| - t * M', where M' is the largest count of original
    members peeled in a single step. The first attaining seed (cfg.seed,
    cfg.seed + 1, ...) is returned; otherwise the best run by
    (attained, covered_count, lowest seed) with attained_bound False.
    """
    if all(not m for m in fam.members):
        return _empty_trace(fam, cfg.p, cfg.seed, cfg.delta)
    n_supp = len(fam.support())
    w = fam.max_set_size()
    t = step_budget(n_supp, w, cfg.p, cfg.delta)

    best = None
    for attempt in range(cfg.max_retries):
        seed = cfg.seed + attempt
        I, history, removed, max_traces, max_members, steps, counts = run_process(fam, cfg.p, t, seed, cfg.mode)
        covered = sum(1 for m in fam.members if m <= I)
        attained = covered >= (1 - cfg.delta) * len(fam) - t * max_members
        trace = PunctureTrace(I, covered, removed, history, steps, seed, attained, t, len(fam), cfg.p,
                              M_measured=max_traces, max_removed_members=max_members, delta=cfg.delta,
                              trace_counts=counts)
        if best is None or (trace.attained_bound, trace.covered_count, -trace.seed) > \
                (best.attained_bound, best.covered_count, -best.seed):
            best = trace
        if attained:
            break
        report.warn(f"seed {seed}: {covered}/{len(fam)} covered, bound missed; retrying")
    return _note_budget(best, M)


def residual_traces(fam, I):
    """Distinct nonempty traces of F outside I"""
    return len({m - I for m in fam.members} - {frozenset()})


def trace_puncture_to_empty(fam, p, M=None, seed=None, max_retries=50, mode="float", width=None):
    """
    Run the potential process until the trace family empties (or t steps),
    with t = min{n, ceil((2/p) ln(|F| 2^w))}. A run succeeds when the
    residual trace count outside I is at most t * max(1, M_measured).

    `width` replaces max member size in t (layers of sizes in (w, 2w] pass 2w).
    """
    if not 0 < p <= 1:
        raise ValidationError(f"p must lie in (0, 1], got {p}")
    if max_retries < 1:
        raise ValidationError("max_retries must be at least 1")
    check_mode(mode)
    seed = default_seed() if seed is None else seed
    if all(not m for m in fam.members):
        return _empty_trace(fam, p, seed)
    n_supp = len(fam.support())
    w = fam.max_set_size() if width is None else width
    t = trace_step_budget(n_supp, len(fam), w, p)

    best = None
    for attempt in range(max_retries):
        run_seed = seed + attempt
        I, history, removed, max_traces, max_members, steps, counts = run_process(fam, p, t, run_seed, mode)
        covered = sum(1 for m in fam.members if m <= I)
        residual = residual_traces(fam, I)
        attained = residual <= t * max(1, max_traces)
        trace = PunctureTrace(I, covered, removed, history, steps, run_seed, attained, t, len(fam), p,
                              M_measured=max_traces, max_removed_members=max_members, residual=residual,
                              trace_counts=counts)
        if best is None or (trace.attained_bound, -trace.residual, -trace.seed) > \
                (best.attained_bound, -best.residual, -best.seed):
            best = trace
        if attained:
            break
        report.warn(f"seed {run_seed}: residual {residual} above t*M; retrying")
    return _note_budget(best, M)
