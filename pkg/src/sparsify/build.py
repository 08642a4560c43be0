# src/sparsify/build.py
"""
Recursive epsilon-sparsifier for codes whose support family is
k-moonflower-free.

Each of R = ceil(log2 n) rounds works on the current universe U_r:
  - tiny residuals (weight <= w_min) are captured whole,
  - medium residuals are grouped into dyadic layers (w, 2w], w = 2^j w_min <= w_star,
    and each layer is punctured,
  - the captured set I_r gets weight 2^r and the rest V_r = U_r - I_r is
    halved at random into U_{r+1}.
Coordinates left in U_R get weight 2^R. The result is verified exactly and the
whole construction retried on a fresh seed when it fails.
"""

import json
from dataclasses import asdict, dataclass, field
from math import ceil, log2, sqrt
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from common import report
from common.config import DEFAULT_CONSTANTS, default_seed, to_fraction
from common.errors import RetriesExhausted, ValidationError
from cover.simplex import check_mode
from puncture.iterated import extremal_bound
from puncture.weight_scale import weight_scale_puncture
from setfam.family import SetFamily
from setfam.moonflower import DEFAULT_NODE_BUDGET
from sparsify.code import nrd
from sparsify.sparsifier import RESIDUAL, Sparsifier, chernoff_bound, verify_sparsifier

MAX_FINAL_UNIVERSE = 50


@dataclass(frozen=True)
class SparsifierConfig:
    """
    Parameters:
    -----------
    epsilon: target relative error, in (0, 1/4]
    C_big: the large constant in w_star, w_min and eta(w)
    B, theta: smoothness constant and exponent fraction for layer puncturing
    max_build_retries: fresh seeds tried before giving up
    k: moonflower parameter; computed as NRD(C) + 1 when None
    w_min, w_star: overrides for the computed thresholds
    C_extremal: base C of the per-layer codeword cap (C w/k)^k in the failure prediction
    """
    epsilon: float
    C_big: float = 4.0
    B: float = 1.0
    theta: float = 0.01
    max_build_retries: int = 10
    seed: int = field(default_factory=default_seed)
    k: Optional[int] = None
    nrd_budget: int = DEFAULT_NODE_BUDGET
    w_min: Optional[int] = None
    w_star: Optional[int] = None
    puncture_retries: int = 50
    mode: str = "float"
    C_extremal: float = DEFAULT_CONSTANTS.C

    def __post_init__(self):
        if not 0 < self.epsilon <= 0.25:
            raise ValidationError(f"epsilon must lie in (0, 1/4], got {self.epsilon}")
        if self.C_big <= 0 or self.B <= 0 or self.C_extremal <= 0:
            raise ValidationError("C_big, B and C_extremal must be positive")
        if not 0 < self.theta < 1:
            raise ValidationError("theta must lie in (0, 1)")
        if self.max_build_retries < 1 or self.puncture_retries < 1:
            raise ValidationError("retry counts must be at least 1")
        if self.k is not None and self.k < 1:
            raise ValidationError("k must be at least 1")
        for name in ("w_min", "w_star"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValidationError(f"{name} must be at least 1")
        check_mode(self.mode)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class BuildParameters:
    n: int
    k: int
    epsilon: float
    C: float
    R: int
    w_star: int
    eta0: float
    w_min: int
    widths: tuple
    overrides: dict = field(default_factory=dict)

    def eta(self, w):
        return eta_large(w, self.k, self.R, self.C)

    def regime(self, weight):
        """'zero', 'tiny', 'medium' or 'large' for a residual weight"""
        if weight == 0:
            return "zero"
        if weight <= self.w_min:
            return "tiny"
        if self.widths and weight <= 2 * self.widths[-1]:
            return "medium"
        return "large"

    def round_error(self, weight):
        """epsilon_r charged to a codeword with this residual weight"""
        regime = self.regime(weight)
        if regime in ("zero", "tiny"):
            return 0.0
        if regime == "medium":
            return self.eta0
        return self.eta(weight)

    def eta_table(self):
        return {w: self.eta(w) for w in self.widths}

    def to_json(self):
        return {
            "n": self.n, "k": self.k, "epsilon": self.epsilon, "C": self.C, "R": self.R,
            "w_star": self.w_star, "eta0": self.eta0, "w_min": self.w_min,
            "widths": list(self.widths),
            "eta_table": {str(w): v for w, v in self.eta_table().items()},
            "overrides": self.overrides,
        }


def _log_rounds(R):
    return log2(max(R, 1))


def eta_large(w, k, R, C):
    """eta(w) = min{1/4, sqrt(C (k log2(w/k) + log2 R) / w)}, inner term floored at 0"""
    inner = max(0.0, C * (k * log2(w / k) + _log_rounds(R)))
    return min(0.25, sqrt(inner / w))


def sparsifier_parameters(n, k, cfg):
    """Thresholds and dyadic layer widths for block length n and parameter k"""
    if n < 1 or k < 1:
        raise ValidationError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    eps, C = cfg.epsilon, cfg.C_big
    R = ceil(log2(n)) if n > 1 else 0
    log_r = _log_rounds(R)
    w_star = ceil(C * (k * log2(k / eps) + log_r) / eps ** 2)
    overrides = {}
    if cfg.w_star is not None:
        overrides["w_star"] = (w_star, cfg.w_star)
        w_star = cfg.w_star
    eta0 = eps / (100 * log2(2 * w_star))
    w_min = ceil((C / eta0 ** 2) * (log2(k / eps) + log_r))
    if cfg.w_min is not None:
        overrides["w_min"] = (w_min, cfg.w_min)
        w_min = cfg.w_min
    widths = []
    w = w_min
    while w <= w_star:
        widths.append(w)
        w *= 2
    return BuildParameters(n, k, eps, C, R, w_star, eta0, w_min, tuple(widths), overrides)


@dataclass(frozen=True)
class BuildLog:
    """
    Per-round record of one build attempt.

    universes[r] is U_r for r = 0..R and captured[r] is I_r for r < R.
    """
    seed: int
    k: int
    k_source: str
    params: BuildParameters
    rounds: list = field(default_factory=list)
    universes: list = field(default_factory=list)
    captured: list = field(default_factory=list)
    attempts: int = 1
    verify: object = None

    @property
    def final_universe(self):
        return self.universes[-1] if self.universes else frozenset()

    def rounds_frame(self):
        return pd.DataFrame(self.rounds)

    def to_json(self, code=None):
        """With `code`, per-codeword residual weights per round are included"""
        data = {
            "seed": self.seed,
            "attempts": self.attempts,
            "k": self.k,
            "k_source": self.k_source,
            "params": self.params.to_json(),
            "rounds": self.rounds,
            "final_universe": len(self.final_universe),
        }
        if self.verify is not None:
            data["verify"] = self.verify.to_json()
        if code is not None:
            data["residuals"] = [[len(c & U) for U in self.universes] for c in code.codewords]
        return data

    def save(self, path, code=None):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_json(code), indent=2, default=str))
        return path


def resolve_k(code, cfg):
    """(k, source): supplied, NRD + 1, or the trivial bound min(|C|, |supp|) + 1"""
    if cfg.k is not None:
        return cfg.k, "supplied"
    result = nrd(code, budget=cfg.nrd_budget)
    if result.exact:
        return result.value + 1, "nrd"
    nonzero = sum(1 for c in code.codewords if c)
    return min(nonzero, len(code.support())) + 1, "trivial_bound"


def _dyadic_floor(x):
    """The w with x in (w, 2w], w a power of two"""
    return 1 << ((x - 1).bit_length() - 1)


def _predicted_failure(residuals, params, C_extremal):
    """
    Union bound on the halving failure over the large residuals.

    Distinct large residuals are grouped by dyadic layer (w, 2w]. A layer
    contributes (codewords in the layer) * (worst Chernoff tail in it),
    capped at 1, and is reported next to log2 of the extremal cap
    (C_extremal 2w / k)^k on how many codewords such a layer can hold.

    Returns (total, layers).
    """
    groups = {}
    for s in set(residuals):
        x = len(s)
        if params.regime(x) == "large":
            groups.setdefault(_dyadic_floor(x), []).append(x)

    layers = []
    total = 0.0
    for w, weights in sorted(groups.items()):
        tails = [chernoff_bound(x, params.eta(x) * x) if params.eta(x) > 0 else 1.0 for x in weights]
        tail = min(1.0, max(tails))
        cap = extremal_bound(params.k, 2 * w, C_extremal)
        log2_cap = log2(cap.numerator) - log2(cap.denominator)
        mass = min(1.0, len(weights) * tail)
        total += mass
        layers.append({"w": w, "codewords": len(weights), "log2_cap": log2_cap,
                       "within_cap": log2(len(weights)) <= log2_cap, "tail": tail, "mass": mass})
    return min(1.0, total), layers


def _build_once(code, cfg, params, seed):
    rng = np.random.default_rng(seed)
    universe = frozenset(code.support())
    universes = [universe]
    captured = []
    rounds = []

    for r in range(params.R):
        residuals = [c & universe for c in code.codewords]
        tiny = frozenset().union(*[s for s in residuals if 0 < len(s) <= params.w_min])
        taken = set(tiny)
        layers = []
        for w in params.widths:
            layer = SetFamily(code.n, [s for s in residuals if w < len(s) <= 2 * w])
            if len(layer) == 0:
                continue
            ws = weight_scale_puncture(layer, params.k, w, params.eta0, cfg.theta, B=cfg.B,
                                       seed=int(rng.integers(2 ** 31)),
                                       max_retries=cfg.puncture_retries, mode=cfg.mode)
            taken |= ws.I
            layers.append({"w": w, "members": len(layer), "I": len(ws.I),
                           "residual": ws.residual, "attained": ws.attained,
                           "size_bound": ws.size_bound, "M_measured": ws.M_measured,
                           "M_budget": ws.M_budget, "layer_ratio": ws.layer_ratio,
                           "layer_bound": ws.layer_bound})
        I_r = frozenset(taken)
        rest = sorted(universe - I_r)
        keep = rng.random(len(rest)) < 0.5
        next_universe = frozenset(i for i, kept in zip(rest, keep) if kept)
        failure, large_layers = _predicted_failure(residuals, params, cfg.C_extremal)
        rounds.append({
            "round": r,
            "universe": len(universe),
            "tiny": len(tiny),
            "medium": len(I_r) - len(tiny),
            "captured": len(I_r),
            "remaining": len(rest),
            "sampled": len(next_universe),
            "layers": layers,
            "predicted_failure": failure,
            "large_layers": large_layers,
        })
        captured.append(I_r)
        universe = next_universe
        universes.append(universe)

    entries, provenance = {}, {}
    for r, I_r in enumerate(captured):
        for i in I_r:
            entries[i] = 2 ** r
            provenance[i] = r
    for i in universe:
        entries[i] = 2 ** params.R
        provenance[i] = RESIDUAL
    sp = Sparsifier(code.n, entries, params.R, provenance, seed, params.to_json())
    return sp, rounds, universes, captured


def build_sparsifier(code, cfg):
    """
    Build and verify an epsilon-sparsifier, retrying on fresh seeds.

    An attempt succeeds when verification passes and |U_R| <= 50.

    Returns:
    --------
    (Sparsifier, BuildLog)

    Raises:
    -------
    RetriesExhausted
        Every attempt failed; `best` is the (Sparsifier, BuildLog) pair with
        the lowest max_rel_err
    """
    if len(code) == 0:
        raise ValidationError("code has no codewords")
    k, source = resolve_k(code, cfg)
    params = sparsifier_parameters(max(code.n, 1), k, cfg)
    report.step(f"Sparsifying n={code.n}, |C|={len(code)}, k={k} ({source}), eps={cfg.epsilon}")
    report.detail(f"R={params.R}, w_min={params.w_min}, w_star={params.w_star}, layers={len(params.widths)}")
    for name, (computed, used) in params.overrides.items():
        report.warn(f"{name} overridden: computed {computed}, using {used}")

    best = None
    for attempt in report.progress(range(cfg.max_build_retries), desc="build attempts"):
        seed = cfg.seed + attempt
        sp, rounds, universes, captured = _build_once(code, cfg, params, seed)
        check = verify_sparsifier(code, sp, cfg.epsilon)
        log = BuildLog(seed, k, source, params, rounds, universes, captured, attempt + 1, check)
        if best is None or check.max_rel_err < best[1].verify.max_rel_err:
            best = (sp, log)
        if check.passed and len(log.final_universe) <= MAX_FINAL_UNIVERSE:
            report.ok(f"|T|={len(sp)} after {attempt + 1} attempt(s), max error {float(check.max_rel_err):.4g}")
            return sp, log
        report.warn(f"seed {seed}: max error {float(check.max_rel_err):.4g}, "
                    f"|U_R|={len(log.final_universe)}; retrying")
    raise RetriesExhausted(f"no valid sparsifier after {cfg.max_build_retries} attempts",
                           best=best, attempts=cfg.max_build_retries)


@dataclass
class AuditReport:
    codewords: pd.DataFrame
    epsilon: float

    @property
    def recursion_ok(self):
        return bool(self.codewords["recursion_ok"].all()) if len(self.codewords) else True

    @property
    def budget_ok(self):
        return bool(self.codewords["budget_ok"].all()) if len(self.codewords) else True

    def to_json(self):
        return {"epsilon": self.epsilon, "recursion_ok": self.recursion_ok,
                "budget_ok": self.budget_ok,
                "codewords": self.codewords.to_dict(orient="records")}


def weight_estimates(word, log):
    """N_hat_r = sum_{s<r} 2^s |x ∩ I_s| + 2^r |x ∩ U_r| for r = 0..R"""
    out = []
    for r, U in enumerate(log.universes):
        value = sum(2 ** s * len(word & log.captured[s]) for s in range(r))
        out.append(value + 2 ** r * len(word & U))
    return out


def audit_build(code, log):
    """
    Check, per nonzero codeword, the round-to-round recursion
    |N_{r+1} - N_r| <= eps_r N_r and the error budget sum_r eps_r <= eps/25.
    """
    params = log.params
    budget = to_fraction(params.epsilon) / 25
    rows = []
    for idx, word in enumerate(code.codewords):
        if not word:
            continue
        estimates = weight_estimates(word, log)
        errors = [params.round_error(len(word & log.universes[r])) for r in range(params.R)]
        recursion = True
        worst = 0.0
        for r, eps_r in enumerate(errors):
            step = abs(estimates[r + 1] - estimates[r])
            if estimates[r]:
                worst = max(worst, step / estimates[r])
            if eps_r == 0:
                recursion &= step == 0
            else:
                recursion &= step <= eps_r * estimates[r]
        total = sum(errors)
        rows.append({"index": idx, "weight": len(word), "final_estimate": estimates[-1],
                     "eps_sum": total, "max_step_ratio": worst,
                     "recursion_ok": recursion, "budget_ok": to_fraction(total) <= budget})
    columns = ["index", "weight", "final_estimate", "eps_sum", "max_step_ratio",
               "recursion_ok", "budget_ok"]
    return AuditReport(pd.DataFrame(rows, columns=columns), params.epsilon)


def size_report(sp, k, n, epsilon):
    """|T| against the reference k log2(n) / eps^2; the ratio is the fitted constant"""
    reference = k * log2(max(n, 2)) / epsilon ** 2
    return {"size": len(sp), "reference": reference, "ratio": len(sp) / reference,
            "k": k, "n": n, "epsilon": epsilon}
