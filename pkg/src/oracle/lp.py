# src/oracle/lp.py
"""
Ground-truth LP engine for the oracles: a slack-form (dictionary) simplex over
Fractions with an auxiliary-variable initialization step.

    maximize c.x  subject to  A x <= b,  x >= 0

Kept separate from the cover package's tableau solver so that the two can
check each other.
"""

from fractions import Fraction


class SlackForm:
    """
    Basic variables x_l = b_l - sum_{j in N} a[l][j] x_j, objective
    z = v + sum_{j in N} c[j] x_j. Variables 0..n-1 are the originals,
    n..n+m-1 the slacks.
    """

    def __init__(self, N, B, a, b, c, v):
        self.N = N
        self.B = B
        self.a = a
        self.b = b
        self.c = c
        self.v = v

    def pivot(self, l, e):
        a, b, c = self.a, self.b, self.c
        ale = a[l][e]
        new_row = {}
        b_e = b[l] / ale
        for j in self.N:
            if j != e:
                new_row[j] = a[l][j] / ale
        new_row[l] = 1 / ale

        new_b = {e: b_e}
        new_a = {e: new_row}
        for i in self.B:
            if i == l:
                continue
            aie = a[i][e]
            new_b[i] = b[i] - aie * b_e
            row = {}
            for j in self.N:
                if j != e:
                    row[j] = a[i][j] - aie * new_row[j]
            row[l] = -aie * new_row[l]
            new_a[i] = row

        ce = c[e]
        self.v = self.v + ce * b_e
        new_c = {}
        for j in self.N:
            if j != e:
                new_c[j] = c[j] - ce * new_row[j]
        new_c[l] = -ce * new_row[l]

        self.N = sorted((set(self.N) - {e}) | {l})
        self.B = sorted((set(self.B) - {l}) | {e})
        self.a, self.b, self.c = new_a, new_b, new_c

    def run(self):
        """Bland's rule: lowest-index entering and leaving variables"""
        while True:
            e = next((j for j in self.N if self.c[j] > 0), None)
            if e is None:
                return "optimal"
            best, leave = None, None
            for i in self.B:
                if self.a[i][e] > 0:
                    ratio = self.b[i] / self.a[i][e]
                    if best is None or ratio < best:
                        best, leave = ratio, i
            if leave is None:
                return "unbounded"
            self.pivot(leave, e)


def _initial_form(A, b, c):
    m, n = len(A), len(c)
    N = list(range(n))
    B = list(range(n, n + m))
    a = {n + i: {j: Fraction(A[i][j]) for j in N} for i in range(m)}
    bb = {n + i: Fraction(b[i]) for i in range(m)}
    cc = {j: Fraction(c[j]) for j in N}
    return SlackForm(N, B, a, bb, cc, Fraction(0))


def _initialize(A, b, c):
    """Feasible slack form for the LP, or None if it is infeasible"""
    m, n = len(A), len(c)
    if all(Fraction(v) >= 0 for v in b):
        return _initial_form(A, b, c)

    x0 = n + m
    form = _initial_form(A, b, [0] * n)
    for i in form.B:
        form.a[i][x0] = Fraction(-1)
    form.N = form.N + [x0]
    form.c = {j: Fraction(0) for j in form.N}
    form.c[x0] = Fraction(-1)
    l = min(form.B, key=lambda i: (form.b[i], i))
    form.pivot(l, x0)
    form.run()
    if form.v != 0:
        return None
    if x0 in form.B:
        e = next((j for j in form.N if form.a[x0][j] != 0), None)
        if e is None:
            # x0 is identically zero on this row; the row is redundant
            form.B = [i for i in form.B if i != x0]
            del form.a[x0]
            del form.b[x0]
        else:
            form.pivot(x0, e)

    # drop x0 and restore the original objective over the current basis
    form.N = [j for j in form.N if j != x0]
    for i in form.B:
        form.a[i].pop(x0, None)
    c_new = {j: Fraction(0) for j in form.N}
    v = Fraction(0)
    for j in range(n):
        cj = Fraction(c[j])
        if cj == 0:
            continue
        if j in form.N:
            c_new[j] += cj
        else:
            v += cj * form.b[j]
            for k in form.N:
                c_new[k] -= cj * form.a[j][k]
    form.c = c_new
    form.v = v
    return form


def simplex(A, b, c):
    """
    Returns (status, x, value, y) with y the optimal dual (one entry per
    constraint, read off the slack coefficients of the final objective).
    """
    m, n = len(A), len(c)
    form = _initialize(A, b, c)
    if form is None:
        return "infeasible", None, None, None
    status = form.run()
    if status == "unbounded":
        return "unbounded", None, None, None
    x = [form.b[j] if j in form.B else Fraction(0) for j in range(n)]
    y = [-form.c[n + i] if (n + i) in form.N else Fraction(0) for i in range(m)]
    return "optimal", x, form.v, y
