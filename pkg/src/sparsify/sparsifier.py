# src/sparsify/sparsifier.py
"""
Weighted coordinate sets (T, alpha) and their exact verification.

The estimate of a codeword x is  w_hat(x) = sum_{i in T ∩ supp(x)} alpha(i);
(T, alpha) epsilon-sparsifies C when w_hat(x) ∈ (1 ± epsilon) wt(x) for all x.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import exp, inf
from pathlib import Path

import pandas as pd

from common.config import to_fraction
from common.errors import ParseError, ValidationError

RESIDUAL = "residual"
WORST_LIMIT = 10


def _weight_json(value):
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return value.numerator
        return {"num": value.numerator, "den": value.denominator}
    return value


def _weight_from_json(value):
    if isinstance(value, dict):
        return Fraction(value["num"], value["den"])
    return to_fraction(value)


@dataclass(frozen=True)
class Sparsifier:
    """
    entries: coordinate -> nonnegative weight alpha(i)
    rounds: R, the number of sampling rounds that produced it
    provenance: coordinate -> round index r (weight 2^r) or "residual"
        (weight 2^R); None for hand-made sparsifiers
    """
    n: int
    entries: dict = field(default_factory=dict)
    rounds: int = 0
    provenance: dict = None
    seed: int = None
    config: dict = None

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError("block length must be non-negative")
        for i, a in self.entries.items():
            if not 0 <= i < self.n:
                raise ValidationError(f"coordinate {i} outside [0, {self.n})")
            if a < 0:
                raise ValidationError(f"negative weight {a} at coordinate {i}")
        if self.provenance is not None:
            if set(self.provenance) != set(self.entries):
                raise ValidationError("provenance must cover exactly the coordinates of T")
            for i, r in self.provenance.items():
                expected = 2 ** (self.rounds if r == RESIDUAL else r)
                if self.entries[i] != expected:
                    raise ValidationError(f"coordinate {i}: weight {self.entries[i]} "
                                          f"does not match provenance {r}")

    @property
    def T(self):
        return frozenset(self.entries)

    def __len__(self):
        return len(self.entries)

    def estimate(self, support):
        return estimate(self, support)

    @classmethod
    def identity(cls, n):
        return cls(n, {i: 1 for i in range(n)})

    @classmethod
    def empty(cls, n):
        return cls(n, {})

    def to_json(self):
        provenance = self.provenance or {}
        return {
            "n": self.n,
            "R": self.rounds,
            "entries": [{"coord": i, "weight": _weight_json(self.entries[i]),
                         "round": provenance.get(i)} for i in sorted(self.entries)],
            "seed": self.seed,
            "config": self.config,
        }

    @classmethod
    def from_json(cls, data, path=None):
        try:
            entries = {}
            provenance = {}
            for row in data["entries"]:
                i = int(row["coord"])
                if i in entries:
                    raise ParseError(f"coordinate {i} listed twice", path=path)
                entries[i] = _weight_from_json(row["weight"])
                if row.get("round") is not None:
                    provenance[i] = row["round"]
            if provenance and len(provenance) != len(entries):
                raise ParseError("round given for some coordinates only", path=path)
            return cls(int(data["n"]), entries, int(data.get("R", 0)), provenance or None,
                       data.get("seed"), data.get("config"))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed sparsifier JSON: {exc}", path=path)

    def save(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_json(), indent=2))
        return path

    @classmethod
    def load(cls, path):
        path = Path(path)
        if not path.exists():
            raise ValidationError(f"file not found: {path}")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line_no=exc.lineno, path=path)
        return cls.from_json(data, path=path)


def estimate(sp, support):
    """w_hat(x) over supp(x) ∩ T; exact for int and Fraction weights"""
    return sum((sp.entries[i] for i in support if i in sp.entries), 0)


def relative_error(weight, value):
    """|w_hat - wt| / wt; weight-0 codewords need w_hat = 0"""
    if weight == 0:
        return Fraction(0) if value == 0 else inf
    return abs(Fraction(value) - weight) / weight


@dataclass
class VerifyReport:
    epsilon: Fraction
    max_rel_err: object
    violators: list
    layers: pd.DataFrame
    worst: list
    codewords: int

    @property
    def passed(self):
        return self.max_rel_err <= self.epsilon

    def to_json(self):
        return {
            "epsilon": float(self.epsilon),
            "max_rel_err": float(self.max_rel_err),
            "passed": self.passed,
            "codewords": self.codewords,
            "violators": self.violators,
            "worst": self.worst,
            "layers": self.layers.to_dict(orient="records"),
        }


def verify_sparsifier(code, sp, epsilon):
    """
    Evaluate w_hat on every codeword in exact arithmetic.

    Parameters:
    -----------
    code : Code
    sp : Sparsifier
    epsilon : float or Fraction
        Allowed relative error

    Returns:
    --------
    VerifyReport
        passed iff the largest relative error is at most epsilon; the layer
        table groups codewords by floor(log2 wt(x))
    """
    eps = to_fraction(epsilon)
    if eps < 0:
        raise ValidationError("epsilon must be non-negative")
    if code.n != sp.n:
        raise ValidationError(f"code has length {code.n}, sparsifier {sp.n}")

    rows = []
    for idx, word in enumerate(code.codewords):
        weight = len(word)
        value = estimate(sp, word)
        err = relative_error(weight, value)
        rows.append({"index": idx, "weight": weight, "estimate": float(value),
                     "layer": weight.bit_length() - 1, "rel_err": float(err), "_err": err})

    if not rows:
        empty = pd.DataFrame(columns=["layer", "codewords", "max_rel_err", "mean_rel_err"])
        return VerifyReport(eps, Fraction(0), [], empty, [], 0)

    frame = pd.DataFrame(rows)
    max_err = max(r["_err"] for r in rows)
    violators = [r["index"] for r in rows if r["_err"] > eps]
    layers = (frame.groupby("layer")
              .agg(codewords=("index", "count"), max_rel_err=("rel_err", "max"),
                   mean_rel_err=("rel_err", "mean"))
              .reset_index())
    worst = (frame.sort_values(["rel_err", "index"], ascending=[False, True])
             .head(WORST_LIMIT)[["index", "weight", "estimate", "rel_err"]]
             .to_dict(orient="records"))
    return VerifyReport(eps, max_err, violators, layers, worst, len(rows))


def chernoff_bound(t, delta):
    """Pr[|2X - t| > delta] <= 2 exp(-delta^2 / (3t)) for X ~ Bin(t, 1/2)"""
    if t < 1:
        raise ValidationError("t must be at least 1")
    if delta <= 0:
        raise ValidationError("delta must be positive")
    return 2 * exp(-delta ** 2 / (3 * t))
