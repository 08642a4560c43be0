# src/cover/simplex.py
"""
Linear programs for the covering game, in two arithmetic modes behind one call:

    solve_lp(c, A_ub, b_ub, A_eq, b_eq, mode)
        maximize c.x  subject to  A_ub x <= b_ub,  A_eq x == b_eq,  x >= 0

mode="exact" runs a two-phase tableau simplex over Fractions with Bland's
rule (so it terminates on degenerate problems). mode="float" hands the same
problem to scipy's HiGHS solver.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from common.errors import ValidationError

MODES = ("exact", "float")


@dataclass
class LPSolution:
    status: str
    value: object = None
    x: list = None

    @property
    def optimal(self):
        return self.status == "optimal"


def check_mode(mode):
    if mode not in MODES:
        raise ValidationError(f"arithmetic mode must be one of {MODES}, got {mode!r}")
    return mode


def solve_lp(c, A_ub=(), b_ub=(), A_eq=(), b_eq=(), mode="exact"):
    check_mode(mode)
    A_ub, b_ub, A_eq, b_eq = list(A_ub), list(b_ub), list(A_eq), list(b_eq)
    if len(A_ub) != len(b_ub) or len(A_eq) != len(b_eq):
        raise ValidationError("constraint matrix and right-hand side lengths differ")
    if mode == "float":
        return _solve_float(c, A_ub, b_ub, A_eq, b_eq)
    return _solve_exact(c, A_ub, b_ub, A_eq, b_eq)


def _solve_float(c, A_ub, b_ub, A_eq, b_eq):
    res = linprog(
        -np.asarray(c, dtype=float),
        A_ub=np.asarray(A_ub, dtype=float) if A_ub else None,
        b_ub=np.asarray(b_ub, dtype=float) if b_ub else None,
        A_eq=np.asarray(A_eq, dtype=float) if A_eq else None,
        b_eq=np.asarray(b_eq, dtype=float) if b_eq else None,
        bounds=(0, None),
        method="highs",
    )
    if res.status == 2:
        return LPSolution("infeasible")
    if res.status == 3:
        return LPSolution("unbounded")
    if res.status != 0:
        raise RuntimeError(f"HiGHS failed: {res.message}")
    return LPSolution("optimal", float(-res.fun), [float(v) for v in res.x])


# ------------------------------------------------------------- exact tableau

class _Tableau:
    """Rows of constraint coefficients with the right-hand side last"""

    def __init__(self, rows, basis, width):
        self.rows = rows
        self.basis = basis
        self.width = width
        self.obj = None

    def pivot(self, r, col):
        row = self.rows[r]
        factor = row[col]
        if factor != 1:
            row[:] = [v / factor for v in row]
        for i, other in enumerate(self.rows):
            if i != r and other[col] != 0:
                f = other[col]
                other[:] = [a - f * b for a, b in zip(other, row)]
        if self.obj[col] != 0:
            f = self.obj[col]
            self.obj[:] = [a - f * b for a, b in zip(self.obj, row)]
        self.basis[r] = col

    def set_objective(self, costs):
        """Reduced-cost row for maximizing costs . x at the current basis"""
        obj = [-v for v in costs] + [Fraction(0)]
        for i, row in enumerate(self.rows):
            cb = costs[self.basis[i]]
            if cb != 0:
                obj = [a + cb * b for a, b in zip(obj, row)]
        self.obj = obj

    def iterate(self, allowed):
        while True:
            entering = next((j for j in allowed if self.obj[j] < 0), None)
            if entering is None:
                return "optimal"
            leaving = None
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    ratio = row[-1] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leaving]):
                        best, leaving = ratio, i
            if leaving is None:
                return "unbounded"
            self.pivot(leaving, entering)


def _solve_exact(c, A_ub, b_ub, A_eq, b_eq):
    nvar = len(c)
    n_ub = len(A_ub)
    m = n_ub + len(A_eq)
    width = nvar + n_ub + m
    zero, one = Fraction(0), Fraction(1)

    rows, basis = [], []
    for r, (coeffs, b) in enumerate(list(zip(A_ub, b_ub)) + list(zip(A_eq, b_eq))):
        if len(coeffs) != nvar:
            raise ValidationError("constraint row length differs from the number of variables")
        row = [Fraction(v) for v in coeffs] + [zero] * (n_ub + m) + [Fraction(b)]
        if r < n_ub:
            row[nvar + r] = one
        if row[-1] < 0:
            row = [-v for v in row]
        row[nvar + n_ub + r] = one
        rows.append(row)
        basis.append(nvar + n_ub + r)

    tab = _Tableau(rows, basis, width)
    artificial = set(range(nvar + n_ub, width))

    # phase 1: maximize -(sum of artificials)
    tab.set_objective([zero] * (nvar + n_ub) + [-one] * m)
    tab.iterate(range(width))
    if tab.obj[-1] < 0:
        return LPSolution("infeasible")

    # drive zero-level artificials out of the basis; drop redundant rows
    r = 0
    while r < len(tab.rows):
        if tab.basis[r] in artificial:
            col = next((j for j in range(nvar + n_ub) if tab.rows[r][j] != 0), None)
            if col is None:
                del tab.rows[r]
                del tab.basis[r]
                continue
            tab.pivot(r, col)
        r += 1

    # phase 2
    costs = [Fraction(v) for v in c] + [zero] * (n_ub + m)
    tab.set_objective(costs)
    status = tab.iterate(range(nvar + n_ub))
    if status == "unbounded":
        return LPSolution("unbounded")
    x = [zero] * nvar
    for i, col in enumerate(tab.basis):
        if col < nvar:
            x[col] = tab.rows[i][-1]
    return LPSolution("optimal", tab.obj[-1], x)
