# src/setfam/family.py
"""
SetFamily: a deduplicated, canonically ordered family of subsets of [n].

Members are frozensets of coordinate indices. Bitset views (Python ints) are
cached for the search routines.
"""

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from common.errors import ParseError, ValidationError


def canonical_key(member):
    """Sort key for members: size first, then the sorted index tuple"""
    return (len(member), tuple(sorted(member)))


def to_mask(member):
    mask = 0
    for i in member:
        mask |= 1 << i
    return mask


def from_mask(mask):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


@dataclass(frozen=True)
class SetFamily:
    """
    A family F of subsets of {0, ..., n-1}.

    Construction deduplicates members and sorts them by canonical_key, so two
    families with the same members compare equal and every seeded run sees
    the members in the same order.
    """
    n: int
    members: tuple = field(default=())

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise ValidationError(f"universe size must be a non-negative integer, got {self.n!r}")
        seen = set()
        for raw in self.members:
            member = frozenset(raw)
            for i in member:
                if not isinstance(i, int) or i < 0 or i >= self.n:
                    raise ValidationError(f"element {i!r} outside universe [0, {self.n})")
            seen.add(member)
        object.__setattr__(self, "members", tuple(sorted(seen, key=canonical_key)))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, index):
        return self.members[index]

    @cached_property
    def masks(self):
        return tuple(to_mask(m) for m in self.members)

    @cached_property
    def index_of(self):
        return {m: i for i, m in enumerate(self.members)}

    def support(self):
        out = set()
        for m in self.members:
            out |= m
        return frozenset(out)

    def max_set_size(self):
        return max((len(m) for m in self.members), default=0)

    def has_empty_member(self):
        return bool(self.members) and len(self.members[0]) == 0

    def nonempty(self):
        return SetFamily(self.n, [m for m in self.members if m])

    def subfamily(self, indices):
        return SetFamily(self.n, [self.members[i] for i in indices])

    def without(self, indices):
        drop = set(indices)
        return SetFamily(self.n, [m for i, m in enumerate(self.members) if i not in drop])

    def covered_by(self, coords):
        """Members contained in the coordinate set `coords`"""
        coords = frozenset(coords)
        return SetFamily(self.n, [m for m in self.members if m <= coords])

    # ---------------------------------------------------------------- file IO

    def to_lines(self):
        lines = [f"n {self.n}"]
        for m in self.members:
            lines.append(" ".join(str(i) for i in sorted(m)))
        return lines

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
        Parse the family format: a header `n <int>`, then one member per line
        as space-separated indices. A blank line is the empty set.
        """
        lines = list(lines)
        if not lines:
            raise ParseError("missing header `n <int>`", line_no=1, path=path)
        n = parse_header(lines[0], path=path)
        members = []
        for line_no, line in enumerate(lines[1:], start=2):
            members.append(parse_index_line(line, n, line_no, path=path))
        return cls(n, members)

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
        return {"n": self.n, "members": [sorted(m) for m in self.members]}


def parse_header(line, path=None):
    parts = line.split()
    if len(parts) != 2 or parts[0] != "n":
        raise ParseError(f"expected header `n <int>`, got {line!r}", line_no=1, path=path)
    try:
        n = int(parts[1])
    except ValueError:
        raise ParseError(f"universe size is not an integer: {parts[1]!r}", line_no=1, path=path)
    if n < 0:
        raise ParseError("universe size must be non-negative", line_no=1, path=path)
    return n


def parse_index_line(line, n, line_no, path=None):
    tokens = line.split()
    indices = []
    for token in tokens:
        try:
            i = int(token)
        except ValueError:
            raise ParseError(f"not an index: {token!r}", line_no=line_no, path=path)
        if i < 0 or i >= n:
            raise ParseError(f"index {i} outside universe [0, {n})", line_no=line_no, path=path)
        indices.append(i)
    if len(set(indices)) != len(indices):
        raise ParseError("repeated index", line_no=line_no, path=path)
    return frozenset(indices)


def random_family(n, size, max_set, rng, min_set=1):
    """
    Seeded random family: `size` draws of a uniform size in [min_set, max_set]
    and a uniform subset of that size. Duplicates collapse, so the result can
    be smaller than `size`.
    """
    if n < 1 or max_set < min_set or min_set < 0:
        raise ValidationError("need n >= 1 and 0 <= min_set <= max_set")
    max_set = min(max_set, n)
    members = []
    for _ in range(size):
        s = int(rng.integers(min_set, max_set + 1))
        members.append(frozenset(int(x) for x in rng.choice(n, size=s, replace=False)))
    return SetFamily(n, members)
