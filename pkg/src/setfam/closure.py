# src/setfam/closure.py
"""
Projections, union-closure and VC dimension of set families.
"""

from itertools import combinations
from math import comb, floor, log2

from common.errors import BudgetExceeded, ValidationError
from setfam.family import SetFamily, from_mask, to_mask

DEFAULT_CLOSURE_CAP = 1 << 16
DEFAULT_VC_CAP = 20


def project(fam, J, relabel=False):
    """
    F_J = {S ∩ J : S in F}, deduplicated. The empty trace is kept.

    With relabel=True the result lives on the universe {0, ..., |J|-1}, the
    elements of J mapped in increasing order; otherwise the universe stays n.
    """
    J = frozenset(J)
    for j in J:
        if not isinstance(j, int) or j < 0 or j >= fam.n:
            raise ValidationError(f"projection coordinate {j!r} outside universe [0, {fam.n})")
    traces = [m & J for m in fam.members]
    if not relabel:
        return SetFamily(fam.n, traces)
    position = {j: pos for pos, j in enumerate(sorted(J))}
    return SetFamily(len(J), [frozenset(position[x] for x in t) for t in traces])


def complement(fam, I):
    return frozenset(range(fam.n)) - frozenset(I)


def restricted_size_bound_holds(fam, I):
    """|F_I| * 2^(n - |I|) >= |F|"""
    I = frozenset(I)
    return len(project(fam, I)) * (1 << (fam.n - len(I))) >= len(fam)


def union_closure(fam, cap=DEFAULT_CLOSURE_CAP):
    """All unions of subfamilies of F, the empty union included"""
    closure = {0}
    for mask in sorted(set(fam.masks)):
        grown = {u | mask for u in closure}
        closure |= grown
        if len(closure) > cap:
            raise BudgetExceeded(f"union-closure exceeds cap {cap}", best=len(closure))
    return SetFamily(fam.n, [from_mask(u) for u in closure])


def shatters(masks, coords):
    target = to_mask(coords)
    traces = {m & target for m in masks}
    return len(traces) == 1 << len(coords)


def vc_dimension(fam, cap=DEFAULT_VC_CAP):
    """
    Largest d such that some d-set is shattered by F.

    Only elements lying in some but not all members can be shattered (beyond
    d = 0). The search runs from min(#such elements, floor(log2 |F|)) down
    and stops at the first shattered set. A family with fewer than two
    members has dimension 0 (an empty family is reported as 0 as well).
    """
    if len(fam) <= 1:
        return 0
    counts = {}
    for m in fam.members:
        for x in m:
            counts[x] = counts.get(x, 0) + 1
    free = sorted(x for x, c in counts.items() if c < len(fam))
    top = min(len(free), floor(log2(len(fam))))
    if len(free) > cap:
        raise BudgetExceeded(
            f"VC search over {len(free)} elements exceeds cap {cap}; upper bound {top}",
            best=top)
    masks = set(fam.masks)
    for d in range(top, 0, -1):
        for coords in combinations(free, d):
            if shatters(masks, coords):
                return d
    return 0


def sauer_shelah_bound(n, d):
    """sum_{i=0}^{d} binom(n, i)"""
    return sum(comb(n, i) for i in range(d + 1))
