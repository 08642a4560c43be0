# src/setfam/generate.py

from itertools import combinations
from math import comb

from common.errors import BudgetExceeded, ValidationError
from setfam.family import SetFamily

DEFAULT_MAX_MEMBERS = 10 ** 6


def lower_bound_family_size(k, w):
    return comb(k + w - 2, w)


def gen_lower_bound_family(k, w, max_members=DEFAULT_MAX_MEMBERS):
    """
    All w-subsets of a (k + w - 2)-element universe.

    The family has binom(k+w-2, w) members and no k-moonflower: k petals
    would need k private elements plus at least w - 1 further elements in
    the last petal, i.e. k + w - 1 elements in total.
    """
    if k < 2 or w < 1:
        raise ValidationError(f"need k >= 2 and w >= 1, got k={k}, w={w}")
    size = lower_bound_family_size(k, w)
    if size > max_members:
        raise BudgetExceeded(f"binom({k + w - 2}, {w}) = {size} members exceeds the budget {max_members}",
                             best=size)
    n = k + w - 2
    return SetFamily(n, [frozenset(c) for c in combinations(range(n), w)])
