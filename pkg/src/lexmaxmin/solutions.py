"""Lexicographic maxmin and Kalai-Smorodinsky points of an instance."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, MalformedInstance, NotNormalized
from .lp import EQ, GE, Constraint, LinearProgram, LpStatus, solve
from .model import (
    ZERO,
    ONE,
    BargainingInstance,
    Lottery,
    UtilityPoint,
    evaluate,
    lottery_constraints,
)
from .rational import parse_rational

DEFAULT_GRID_BUDGET = 5_000_000


@dataclass(frozen=True)
class LeximinResult:
    point: UtilityPoint
    witness: Lottery
    freeze_order: tuple[tuple[int, Fraction], ...]


def _witness(instance: BargainingInstance, x) -> Lottery:
    return Lottery(tuple(x[: instance.num_alternatives]))


def max_single_utility(instance: BargainingInstance, agent: int) -> tuple[Fraction, Lottery]:
    """Best utility ``agent`` can get from an individually rational lottery."""
    if agent not in instance.agents:
        raise ValueError(f"agent {agent} out of range 1..{instance.n}")
    m = instance.num_alternatives
    lp = LinearProgram(instance.row(agent), tuple(lottery_constraints(instance)), m)
    res = solve(lp)
    if not res.optimal:
        raise MalformedInstance("no individually rational lottery exists")
    return res.optimum, _witness(instance, res.witness)


def _stage_constraints(instance, frozen: dict[int, Fraction], level_var: bool, level=None):
    """Constraints over (lottery, t): frozen agents keep their values,
    unfrozen agents get at least ``t`` (or ``level`` when t is fixed)."""
    m = instance.num_alternatives
    extra = 1 if level_var else 0
    cons = lottery_constraints(instance, extra)
    for i in instance.agents:
        row = instance.row(i)
        if i in frozen:
            cons.append(Constraint(row + (ZERO,) * extra, GE, frozen[i]))
        elif level_var:
            cons.append(Constraint(row + (-ONE,), GE, ZERO))
        else:
            cons.append(Constraint(row, GE, level))
    return cons


def leximin(instance: BargainingInstance) -> LeximinResult:
    """The unique leximin-greatest point of the individually rational region.

    Each stage maximises the common floor ``t`` of the unfrozen agents, then
    freezes exactly those agents who cannot individually exceed that floor
    while everyone else keeps theirs.
    """
    m = instance.num_alternatives
    frozen: dict[int, Fraction] = {}
    order: list[tuple[int, Fraction]] = []
    while len(frozen) < instance.n:
        cons = _stage_constraints(instance, frozen, level_var=True)
        lp = LinearProgram((ZERO,) * m + (ONE,), tuple(cons), m + 1, free={m})
        res = solve(lp)
        if res.status is not LpStatus.OPTIMAL:
            raise MalformedInstance(f"leximin stage program is {res.status.value}")
        level = res.optimum
        fixed = _stage_constraints(instance, frozen, level_var=False, level=level)
        newly = []
        for i in instance.agents:
            if i in frozen:
                continue
            aux = solve(LinearProgram(instance.row(i), tuple(fixed), m))
            if not aux.optimal:
                raise MalformedInstance("leximin freezing program is infeasible")
            if aux.optimum == level:
                newly.append(i)
        if not newly:  # cannot happen for a correct LP solver
            raise AssertionError("no agent could be frozen at level %s" % level)
        for i in newly:
            frozen[i] = level
            order.append((i, level))

    final = solve(LinearProgram((ZERO,) * m, tuple(_stage_constraints(instance, frozen, False)), m))
    if not final.optimal:
        raise MalformedInstance("frozen leximin values are infeasible")
    witness = _witness(instance, final.witness)
    point = evaluate(instance, witness)
    return LeximinResult(point, witness, tuple(order))


def ks_solution(instance: BargainingInstance) -> tuple[UtilityPoint, Lottery]:
    """Largest point on the diagonal of the individually rational region.

    Only meaningful once utilities are normalized, so un-normalized input is
    refused rather than silently rescaled.
    """
    if not instance.normalized:
        raise NotNormalized("the Kalai-Smorodinsky point is computed on normalized instances only")
    m = instance.num_alternatives
    cons = lottery_constraints(instance, 1)
    for i in instance.agents:
        cons.append(Constraint(instance.row(i) + (-ONE,), EQ, ZERO))
    res = solve(LinearProgram((ZERO,) * m + (ONE,), tuple(cons), m + 1, free={m}))
    if not res.optimal:
        raise MalformedInstance(f"Kalai-Smorodinsky program is {res.status.value}")
    witness = _witness(instance, res.witness)
    return evaluate(instance, witness), witness


def _grid_step(grid_step) -> int:
    step = parse_rational(grid_step, field="grid_step") if not isinstance(grid_step, Fraction) else grid_step
    if step <= 0 or step > 1 or step.numerator != 1:
        raise ValueError(f"grid step must be 1/k for a positive integer k, got {step}")
    return step.denominator


def _sorted_key(point):
    return tuple(sorted(point))


def leximin_bruteforce_lottery(
    instance: BargainingInstance,
    grid_step,
    *,
    budget: int = DEFAULT_GRID_BUDGET,
    backend=None,
) -> Lottery | None:
    """Leximin-best individually rational lottery among those with weights in
    multiples of ``grid_step``; ``None`` if the grid has no such lottery."""
    k = _grid_step(grid_step)
    m = instance.num_alternatives
    size = _kernels.grid_size(k, m)
    if size > budget:
        raise BudgetExceeded(f"lottery grid of {size} points", budget)

    den = 1
    for row in instance.utilities:
        for u in row:
            den = math.lcm(den, u.denominator)
    scaled = [[int(u * den) for u in row] for row in instance.utilities]
    floor = [math.ceil(s * den * k) for s in instance.disagreement_point()]
    bound = max((abs(v) for row in scaled for v in row), default=0) * k + max(map(abs, floor), default=0)
    if bound < 2**62:
        found, w = _kernels.grid_leximin(np.array(scaled, dtype=np.int64), np.array(floor, dtype=np.int64), k, backend)
        if not found:
            return None
        return Lottery(tuple(Fraction(int(x), k) for x in w))
    return _grid_fractions(instance, k)


def _grid_fractions(instance, k):
    # Slow exact path for matrices whose scaled integers would overflow int64.
    base = instance.disagreement_point()
    best = best_key = None
    m = instance.num_alternatives
    for bars in itertools.combinations(range(k + m - 1), m - 1):
        cuts = (-1,) + bars + (k + m - 1,)
        w = [cuts[a + 1] - cuts[a] - 1 for a in range(m)]
        lot = Lottery(tuple(Fraction(x, k) for x in w))
        point = evaluate(instance, lot)
        if any(x < s for x, s in zip(point, base)):
            continue
        key = _sorted_key(point)
        if best_key is None or key > best_key:
            best, best_key = lot, key
    return best


def leximin_bruteforce(instance: BargainingInstance, grid_step, *, budget: int = DEFAULT_GRID_BUDGET, backend=None) -> UtilityPoint:
    lot = leximin_bruteforce_lottery(instance, grid_step, budget=budget, backend=backend)
    if lot is None:
        raise MalformedInstance("no individually rational lottery lies on the grid")
    return evaluate(instance, lot)


def grid_points(instance: BargainingInstance, grid_step, *, budget: int = DEFAULT_GRID_BUDGET):
    """Yield every individually rational grid evaluation (exact)."""
    k = _grid_step(grid_step)
    m = instance.num_alternatives
    size = _kernels.grid_size(k, m)
    if size > budget:
        raise BudgetExceeded(f"lottery grid of {size} points", budget)
    base = instance.disagreement_point()
    for w in _kernels.compositions(k, m):
        point = evaluate(instance, Lottery(tuple(Fraction(int(x), k) for x in w)))
        if all(x >= s for x, s in zip(point, base)):
            yield point
