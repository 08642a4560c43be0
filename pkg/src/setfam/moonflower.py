# src/setfam/moonflower.py
"""
Moonflower detection and the moonflower number MF(F).

A sequence of sets is a moonflower when every set owns a private element,
one that lies in no other set of the sequence. MF(F) is the size of the
largest moonflower inside F; it equals the maximum induced matching of the
member/element incidence graph.
"""

from dataclasses import dataclass
from typing import Optional

from common import report
from common.errors import BudgetExceeded, ValidationError
from setfam.family import SetFamily

DEFAULT_NODE_BUDGET = 10 ** 7


@dataclass(frozen=True)
class MoonflowerWitness:
    """
    petal_indices: member indices of the petals (into the family searched)
    core: elements shared by at least two petals
    private: one private element per petal, aligned with petal_indices
    """
    petal_indices: tuple
    core: frozenset
    private: tuple

    def __len__(self):
        return len(self.petal_indices)

    def to_json(self):
        return {
            "petals": list(self.petal_indices),
            "core": sorted(self.core),
            "private": list(self.private),
        }


@dataclass(frozen=True)
class MFResult:
    value: int
    witness: MoonflowerWitness
    exact: bool
    nodes: int = 0

    def to_json(self):
        return {"value": self.value, "exact": self.exact, "nodes": self.nodes,
                "witness": self.witness.to_json()}


@dataclass(frozen=True)
class FamilyStats:
    size: int
    max_set_size: int
    support_size: int
    mf_lower: int
    mf_exact: Optional[int] = None

    def to_json(self):
        return {
            "size": self.size,
            "max_set_size": self.max_set_size,
            "support_size": self.support_size,
            "mf_lower": self.mf_lower,
            "mf_exact": self.mf_exact,
        }


def _witness(sets, indices):
    counts = {}
    for s in sets:
        for x in s:
            counts[x] = counts.get(x, 0) + 1
    core = frozenset(x for x, c in counts.items() if c >= 2)
    private = []
    for s in sets:
        own = [x for x in s if counts[x] == 1]
        if not own:
            return None
        private.append(min(own))
    return MoonflowerWitness(tuple(indices), core, tuple(private))


def is_moonflower(sets):
    """
    Return the witness (minimal core, one private element per petal) when
    every set has a private element, else None.

    Raises ValidationError on empty or repeated sets.
    """
    sets = [frozenset(s) for s in sets]
    if any(not s for s in sets):
        raise ValidationError("moonflower petals must be nonempty")
    if len(set(sets)) != len(sets):
        raise ValidationError("moonflower petals must be distinct")
    return _witness(sets, range(len(sets)))


def witness_for(fam, indices):
    """Witness for the petals fam[i], i in indices (None if not a moonflower)"""
    indices = tuple(indices)
    return _witness([fam[i] for i in indices], indices)


def mf_greedy(fam):
    """
    Lower bound on MF(F) from an inclusion-minimal subfamily covering supp(F).

    In a minimal cover every member owns an element nobody else covers, so the
    cover is a moonflower. Members are dropped largest-first, which keeps the
    small sets and tends to give larger covers.
    """
    keep = [i for i, m in enumerate(fam.members) if m]
    masks = fam.masks
    for i in sorted(keep, key=lambda j: (-len(fam[j]), -j)):
        others = 0
        for j in keep:
            if j != i:
                others |= masks[j]
        if masks[i] & ~others == 0:
            keep.remove(i)
    keep.sort()
    return MFResult(len(keep), witness_for(fam, keep), exact=False)


def _collapse_twins(fam, candidates):
    """
    Group elements with identical membership columns; privateness only
    depends on the column, so one representative per class is enough.
    Returns the candidate masks over class indices and a representative
    element per class.
    """
    columns = {}
    for x in sorted(fam.support()):
        column = tuple(i for i in candidates if x in fam[i])
        if column:
            columns.setdefault(column, x)
    classes = list(columns.items())
    reps = [x for _, x in classes]
    masks = []
    for i in candidates:
        mask = 0
        for c, (column, _) in enumerate(classes):
            if i in column:
                mask |= 1 << c
        masks.append(mask)
    return masks, reps


def mf_exact(fam, budget=DEFAULT_NODE_BUDGET):
    """
    Exact MF(F) by branch-and-bound over petal candidates.

    Candidates are the nonempty members in canonical (ascending size) order.
    A partial moonflower is extended only by members that keep every petal's
    private element; the bound counts how many compatible candidates could
    still each bring a fresh private element. The greedy cover seeds the
    incumbent.

    Raises BudgetExceeded (carrying the best value and witness found) after
    `budget` search nodes.
    """
    candidates = [i for i, m in enumerate(fam.members) if m]
    greedy = mf_greedy(fam)
    if not candidates:
        return MFResult(0, greedy.witness, exact=True)

    masks, _ = _collapse_twins(fam, candidates)
    universe_classes = 0
    for m in masks:
        universe_classes |= m
    ceiling = min(len(candidates), bin(universe_classes).count("1"))

    best = {"value": greedy.value, "petals": list(greedy.witness.petal_indices)}
    nodes = 0
    chosen = []

    def compatible(mask, once, multi, petals):
        if mask & ~(once | multi) == 0:
            return None
        new_multi = multi | (once & mask)
        new_once = (once ^ mask) & ~multi
        for p in petals:
            if p & new_once == 0:
                return None
        return new_once, new_multi

    def search(start, once, multi, petal_masks):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            witness = witness_for(fam, best["petals"])
            raise BudgetExceeded(
                f"mf_exact exceeded {budget} nodes; best lower bound {best['value']}",
                best=best["value"], witness=witness, used=nodes)
        if len(chosen) > best["value"]:
            best["value"] = len(chosen)
            best["petals"] = [candidates[c] for c in chosen]
            if best["value"] >= ceiling:
                return True

        options = []
        reach = 0
        for c in range(start, len(masks)):
            state = compatible(masks[c], once, multi, petal_masks)
            if state is not None:
                options.append((c, state))
                reach |= masks[c]
        fresh = bin(reach & ~(once | multi)).count("1")
        if len(chosen) + min(len(options), fresh) <= best["value"]:
            return False

        for pos, (c, (new_once, new_multi)) in enumerate(options):
            if len(chosen) + (len(options) - pos) <= best["value"]:
                break
            chosen.append(c)
            petal_masks.append(masks[c])
            done = search(c + 1, new_once, new_multi, petal_masks)
            petal_masks.pop()
            chosen.pop()
            if done:
                return True
        return False

    search(0, 0, 0, [])
    petals = sorted(best["petals"])
    return MFResult(best["value"], witness_for(fam, petals), exact=True, nodes=nodes)


def family_stats(fam, exact=True, budget=DEFAULT_NODE_BUDGET):
    greedy = mf_greedy(fam)
    exact_value = None
    if exact:
        try:
            exact_value = mf_exact(fam, budget=budget).value
        except BudgetExceeded as exc:
            report.warn(f"exact MF abandoned after {exc.used} nodes; keeping greedy bound {greedy.value}")
    return FamilyStats(
        size=len(fam),
        max_set_size=fam.max_set_size(),
        support_size=len(fam.support()),
        mf_lower=greedy.value,
        mf_exact=exact_value,
    )
