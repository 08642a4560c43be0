# src/sparsify/code.py
"""
Binary codes as lists of codeword supports, their file format, and the
non-redundancy NRD(C) computed as the moonflower number of the support
family.
"""

from dataclasses import dataclass, field
from pathlib import Path

from common import report
from common.errors import BudgetExceeded, ParseError, ValidationError
from setfam.family import SetFamily, from_mask, parse_header, parse_index_line, to_mask
from setfam.moonflower import DEFAULT_NODE_BUDGET, mf_exact, mf_greedy

MAX_SPAN_DIMENSION = 20


@dataclass(frozen=True)
class Code:
    """
    A binary code C of block length n, one support set per codeword.

    Codewords keep their input order with later duplicates dropped; the
    all-zero word is allowed and appears as the empty support.
    """
    n: int
    codewords: tuple = field(default=())

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise ValidationError(f"block length must be a non-negative integer, got {self.n!r}")
        seen = set()
        kept = []
        for raw in self.codewords:
            word = frozenset(raw)
            for i in word:
                if not isinstance(i, int) or i < 0 or i >= self.n:
                    raise ValidationError(f"coordinate {i!r} outside [0, {self.n})")
            if word not in seen:
                seen.add(word)
                kept.append(word)
        object.__setattr__(self, "codewords", tuple(kept))

    def __len__(self):
        return len(self.codewords)

    def __iter__(self):
        return iter(self.codewords)

    def weights(self):
        return [len(c) for c in self.codewords]

    def support(self):
        out = set()
        for c in self.codewords:
            out |= c
        return frozenset(out)

    def support_family(self):
        """F_C: the family of nonzero codeword supports"""
        return SetFamily(self.n, [c for c in self.codewords if c])

    # ---------------------------------------------------------------- file IO

    def to_lines(self):
        return [f"n {self.n}"] + [" ".join(str(i) for i in sorted(c)) for c in self.codewords]

    def to_text(self):
        return "\n".join(self.to_lines()) + "\n"

    def to_file(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_text())
        return path

    @classmethod
    def from_lines(cls, lines, path=None):
        """
        Header `n <int>`, then one codeword per line: either sorted
        coordinate indices, or a dense 0/1 string of exactly n characters
        (only recognized for n >= 2). A blank line is the zero word.
        """
        lines = list(lines)
        if not lines:
            raise ParseError("missing header `n <int>`", line_no=1, path=path)
        n = parse_header(lines[0], path=path)
        words = []
        for line_no, line in enumerate(lines[1:], start=2):
            token = line.strip()
            if n >= 2 and len(token) == n and set(token) <= {"0", "1"}:
                words.append(frozenset(i for i, bit in enumerate(token) if bit == "1"))
            else:
                words.append(parse_index_line(line, n, line_no, path=path))
        return cls(n, words)

    @classmethod
    def from_text(cls, text, path=None):
        return cls.from_lines(text.splitlines(), path=path)

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        if not path.exists():
            raise ValidationError(f"file not found: {path}")
        return cls.from_text(path.read_text(), path=path)

    def to_json(self):
        return {"n": self.n, "codewords": [sorted(c) for c in self.codewords]}


@dataclass(frozen=True)
class NRDResult:
    """
    value: NRD(C) (a lower bound when exact is False)
    coordinates: non-redundant coordinates, one private coordinate per petal
    petals: codeword indices (into code.codewords) of the petals
    """
    value: int
    coordinates: tuple
    petals: tuple
    exact: bool

    def to_json(self):
        return {"value": self.value, "coordinates": list(self.coordinates),
                "petals": list(self.petals), "exact": self.exact}


def nrd(code, budget=DEFAULT_NODE_BUDGET):
    """
    NRD(C) = MF(F_C). Each petal's private coordinate is a non-redundant
    coordinate: the petal is 1 there and every other petal is 0.

    Falls back to the greedy moonflower (exact=False) when the exact search
    runs out of budget.
    """
    fam = code.support_family()
    try:
        mf = mf_exact(fam, budget=budget)
    except BudgetExceeded as exc:
        report.warn(f"exact NRD abandoned after {exc.used} nodes; reporting a greedy lower bound")
        mf = mf_greedy(fam)
    position = {c: i for i, c in enumerate(code.codewords)}
    petals = tuple(position[fam[j]] for j in mf.witness.petal_indices)
    return NRDResult(mf.value, tuple(mf.witness.private), petals, mf.exact)


def gen_linear_code(generators, n):
    """
    The GF(2) span of `generators` (coordinate sets), zero word included.
    Its NRD equals its dimension.
    """
    span = {0}
    for g in generators:
        mask = to_mask(g)
        if mask >> n:
            raise ValidationError(f"generator {sorted(g)} leaves [0, {n})")
        if mask in span:
            continue
        if len(span) >= 1 << MAX_SPAN_DIMENSION:
            raise ValidationError(f"span dimension above {MAX_SPAN_DIMENSION}")
        span |= {s ^ mask for s in span}
    return Code(n, [from_mask(s) for s in sorted(span)])


def random_code(n, size, max_weight, rng, min_weight=1):
    """Seeded random code: `size` draws of a uniform weight and a uniform support"""
    if n < 1 or max_weight < min_weight or min_weight < 0:
        raise ValidationError("need n >= 1 and 0 <= min_weight <= max_weight")
    max_weight = min(max_weight, n)
    words = []
    for _ in range(size):
        w = int(rng.integers(min_weight, max_weight + 1))
        words.append(frozenset(int(x) for x in rng.choice(n, size=w, replace=False)))
    return Code(n, words)


def random_block_code(n, blocks, size, rng):
    """
    Codewords are unions of whole blocks of a partition of [n] into `blocks`
    contiguous blocks, so NRD(C) <= blocks.
    """
    if not 1 <= blocks <= n:
        raise ValidationError(f"need 1 <= blocks <= n, got blocks={blocks}, n={n}")
    edges = [round(b * n / blocks) for b in range(blocks + 1)]
    parts = [range(edges[b], edges[b + 1]) for b in range(blocks)]
    words = []
    for _ in range(size):
        chosen = rng.random(blocks) < 0.5
        if not chosen.any():
            chosen[int(rng.integers(blocks))] = True
        words.append(frozenset(i for b in range(blocks) if chosen[b] for i in parts[b]))
    return Code(n, words)
