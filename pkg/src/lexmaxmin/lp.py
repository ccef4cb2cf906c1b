"""Exact rational linear programming.

A dense two-phase simplex over :class:`fractions.Fraction` with Bland's rule.
Every program is a maximisation; variables are nonnegative unless listed in
``free``. Problems here are desk-sized (tens of columns), so the tableau is a
plain list of lists.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch

LE, EQ, GE = "<=", "=", ">="
_FLIP = {LE: GE, GE: LE, EQ: EQ}


@dataclass(frozen=True)
class Constraint:
    row: tuple[Fraction, ...]
    relation: str
    bound: Fraction

    def __post_init__(self):
        if self.relation not in _FLIP:
            raise ValueError(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "row", tuple(Fraction(a) for a in self.row))
        object.__setattr__(self, "bound", Fraction(self.bound))

    def holds(self, x: Sequence[Fraction]) -> bool:
        lhs = sum((a * v for a, v in zip(self.row, x)), Fraction(0))
        if self.relation == LE:
            return lhs <= self.bound
        if self.relation == GE:
            return lhs >= self.bound
        return lhs == self.bound


@dataclass(frozen=True)
class LinearProgram:
    """maximize ``objective . x`` subject to ``constraints``.

    Variables not in ``free`` are constrained to be nonnegative.
    """

    objective: tuple[Fraction, ...]
    constraints: tuple[Constraint, ...]
    num_vars: int
    free: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "objective", tuple(Fraction(c) for c in self.objective))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "free", frozenset(self.free))
        if len(self.objective) != self.num_vars:
            raise DimensionMismatch("objective length does not match the variable count")
        for k, con in enumerate(self.constraints):
            if len(con.row) != self.num_vars:
                raise DimensionMismatch(f"constraint {k} has {len(con.row)} coefficients, expected {self.num_vars}")
        if any(not 0 <= j < self.num_vars for j in self.free):
            raise DimensionMismatch("free variable index out of range")

    def is_feasible(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.num_vars:
            return False
        if any(x[j] < 0 for j in range(self.num_vars) if j not in self.free):
            return False
        return all(con.holds(x) for con in self.constraints)

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * v for c, v in zip(self.objective, x)), Fraction(0))


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpResult:
    status: LpStatus
    optimum: Fraction | None = None
    witness: tuple[Fraction, ...] | None = None

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Tableau:
    """Rows ``A x = b`` with ``b >= 0`` and an explicit basis."""

    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r, c):
        prow = self.rows[r]
        piv = prow[c]
        if piv != 1:
            inv = 1 / piv
            prow = [a * inv for a in prow]
            self.rows[r] = prow
            self.rhs[r] *= inv
        for k, row in enumerate(self.rows):
            if k == r:
                continue
            f = row[c]
            if f:
                self.rows[k] = [a - f * p for a, p in zip(row, prow)]
                self.rhs[k] -= f * self.rhs[r]
        self.basis[r] = c

    def reduced_costs(self, cost):
        # c_j - c_B B^-1 A_j; the tableau already holds B^-1 A.
        red = list(cost)
        for row, b in zip(self.rows, self.basis):
            cb = cost[b]
            if cb:
                red = [rc - cb * a for rc, a in zip(red, row)]
        return red

    def run(self, cost, allowed):
        """Bland's rule primal simplex; returns False when unbounded."""
        while True:
            red = self.reduced_costs(cost)
            entering = next((j for j in allowed if red[j] > 0), None)
            if entering is None:
                return True
            best = None
            for r, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    key = (self.rhs[r] / a, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return False
            self.pivot(best[1], entering)

    def solution(self, width):
        x = [Fraction(0)] * width
        for r, b in enumerate(self.basis):
            x[b] = self.rhs[r]
        return x


def solve(lp: LinearProgram) -> LpResult:
    """Solve ``lp`` exactly.

    >>> p = LinearProgram((1, 0), (Constraint((1, 1), EQ, 1),), 2)
    >>> r = solve(p)
    >>> r.status.value, r.optimum, r.witness
    ('optimal', Fraction(1, 1), (Fraction(1, 1), Fraction(0, 1)))
    """
    # Column layout: one column per nonnegative variable, two per free variable,
    # then slack/surplus columns, then artificials.
    col_of = []
    ncols = 0
    for j in range(lp.num_vars):
        if j in lp.free:
            col_of.append((ncols, ncols + 1))
            ncols += 2
        else:
            col_of.append((ncols, None))
            ncols += 1
    n_struct = ncols

    rows, rhs, rels = [], [], []
    for con in lp.constraints:
        row = [Fraction(0)] * n_struct
        for j, a in enumerate(con.row):
            pos, neg = col_of[j]
            row[pos] = a
            if neg is not None:
                row[neg] = -a
        b, rel = con.bound, con.relation
        if b < 0:
            row = [-a for a in row]
            b, rel = -b, _FLIP[rel]
        rows.append(row)
        rhs.append(b)
        rels.append(rel)

    m = len(rows)
    n_slack = sum(1 for rel in rels if rel != EQ)
    n_art = sum(1 for rel in rels if rel != LE)
    width = n_struct + n_slack + n_art
    full_rows, basis = [], []
    s_col, a_col = n_struct, n_struct + n_slack
    for row, rel in zip(rows, rels):
        ext = row + [Fraction(0)] * (n_slack + n_art)
        if rel == LE:
            ext[s_col] = Fraction(1)
            basis.append(s_col)
            s_col += 1
        elif rel == GE:
            ext[s_col] = Fraction(-1)
            s_col += 1
            ext[a_col] = Fraction(1)
            basis.append(a_col)
            a_col += 1
        else:
            ext[a_col] = Fraction(1)
            basis.append(a_col)
            a_col += 1
        full_rows.append(ext)

    tab = _Tableau(full_rows, list(rhs), basis)
    art_start = n_struct + n_slack

    if n_art:
        phase1 = [Fraction(0)] * art_start + [Fraction(-1)] * n_art
        tab.run(phase1, range(width))
        if any(tab.rhs[r] != 0 for r in range(m) if tab.basis[r] >= art_start):
            return LpResult(LpStatus.INFEASIBLE)
        # Drive zero-level artificials out of the basis; drop redundant rows.
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= art_start:
                c = next((j for j in range(art_start) if tab.rows[r][j] != 0), None)
                if c is None:
                    del tab.rows[r], tab.rhs[r], tab.basis[r]
                    continue
                tab.pivot(r, c)
            r += 1

    cost = [Fraction(0)] * width
    for j, c in enumerate(lp.objective):
        pos, neg = col_of[j]
        cost[pos] = c
        if neg is not None:
            cost[neg] = -c
    if not tab.run(cost, range(art_start)):
        return LpResult(LpStatus.UNBOUNDED)

    x = tab.solution(width)
    witness = []
    for pos, neg in col_of:
        witness.append(x[pos] - (x[neg] if neg is not None else 0))
    witness = tuple(witness)
    return LpResult(LpStatus.OPTIMAL, lp.value(witness), witness)
