"""Bargaining instances, lotteries and utility evaluation.

Agents are numbered ``1..n`` in the order of the rows of the utility matrix.
Every value is a :class:`fractions.Fraction`; nothing here touches floats.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence, Tuple

from .errors import AssumptionViolation, DegenerateAgent, DimensionMismatch, MalformedInstance
from .lp import EQ, GE, Constraint, LinearProgram, solve
from .rational import parse_rational

UtilityPoint = Tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Lottery:
    """Probability weights over the alternatives of an instance."""

    weights: tuple[Fraction, ...]

    def __post_init__(self):
        w = tuple(parse_rational(x, field="lottery weight") for x in self.weights)
        object.__setattr__(self, "weights", w)
        if not w:
            raise MalformedInstance("a lottery needs at least one weight")
        if any(x < 0 for x in w):
            raise MalformedInstance("lottery weights must be nonnegative")
        if sum(w) != 1:
            raise MalformedInstance(f"lottery weights sum to {sum(w)}, not 1")

    @classmethod
    def point_mass(cls, size: int, index: int) -> "Lottery":
        return cls(tuple(ONE if k == index else ZERO for k in range(size)))

    def mix(self, other: "Lottery", alpha) -> "Lottery":
        """``alpha * self + (1 - alpha) * other``."""
        alpha = Fraction(alpha)
        if not 0 <= alpha <= 1:
            raise ValueError("mixing weight must lie in [0, 1]")
        if len(other) != len(self):
            raise DimensionMismatch("cannot mix lotteries of different lengths")
        return Lottery(tuple(alpha * a + (1 - alpha) * b for a, b in zip(self.weights, other.weights)))

    def __len__(self):
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)


@dataclass(frozen=True)
class BargainingInstance:
    """Alternatives, an ``n x |A|`` utility matrix and a disagreement lottery."""

    alternatives: tuple[str, ...]
    utilities: tuple[tuple[Fraction, ...], ...]
    disagreement: Lottery
    normalized: bool = False

    def __post_init__(self):
        alts = tuple(str(a) for a in self.alternatives)
        rows = tuple(
            tuple(parse_rational(v, field=f"utilities[{i}][{a}]") for a, v in enumerate(row))
            for i, row in enumerate(self.utilities)
        )
        object.__setattr__(self, "alternatives", alts)
        object.__setattr__(self, "utilities", rows)
        if not isinstance(self.disagreement, Lottery):
            object.__setattr__(self, "disagreement", Lottery(tuple(self.disagreement)))
        if len(alts) < 1:
            raise MalformedInstance("an instance needs at least one alternative", field="alternatives")
        if len(set(alts)) != len(alts):
            raise MalformedInstance("alternative names must be distinct", field="alternatives")
        if len(rows) < 2:
            raise MalformedInstance("an instance needs at least two agents", field="utilities")
        for i, row in enumerate(rows):
            if len(row) != len(alts):
                raise MalformedInstance(
                    f"agent {i + 1} has {len(row)} utilities for {len(alts)} alternatives",
                    field=f"utilities[{i}]",
                )
        if len(self.disagreement) != len(alts):
            raise MalformedInstance("disagreement lottery does not match the alternatives", field="disagreement")

    @property
    def n(self) -> int:
        return len(self.utilities)

    @property
    def num_alternatives(self) -> int:
        return len(self.alternatives)

    @property
    def agents(self) -> range:
        return range(1, self.n + 1)

    def row(self, agent: int) -> tuple[Fraction, ...]:
        return self.utilities[agent - 1]

    def alternative_index(self, name: str) -> int:
        try:
            return self.alternatives.index(name)
        except ValueError:
            raise MalformedInstance(f"unknown alternative {name!r}") from None

    def point_mass(self, name_or_index) -> Lottery:
        idx = name_or_index if isinstance(name_or_index, int) else self.alternative_index(name_or_index)
        return Lottery.point_mass(self.num_alternatives, idx)

    def vertex(self, index: int) -> UtilityPoint:
        return tuple(row[index] for row in self.utilities)

    def vertices(self) -> list[UtilityPoint]:
        return [self.vertex(a) for a in range(self.num_alternatives)]

    def disagreement_point(self) -> UtilityPoint:
        return evaluate(self, self.disagreement)


def evaluate(instance: BargainingInstance, lottery: Lottery) -> UtilityPoint:
    """Expected utility of every agent under ``lottery``."""
    if len(lottery) != instance.num_alternatives:
        raise DimensionMismatch(
            f"lottery has {len(lottery)} weights, instance has {instance.num_alternatives} alternatives"
        )
    w = lottery.weights
    return tuple(sum((u * p for u, p in zip(row, w) if p), ZERO) for row in instance.utilities)


def is_individually_rational(instance: BargainingInstance, lottery: Lottery) -> bool:
    point = evaluate(instance, lottery)
    base = instance.disagreement_point()
    return all(x >= s for x, s in zip(point, base))


def lottery_constraints(instance: BargainingInstance, extra_vars: int = 0) -> list[Constraint]:
    """Simplex and individual-rationality rows over ``|A| + extra_vars`` columns."""
    m = instance.num_alternatives
    pad = (ZERO,) * extra_vars
    cons = [Constraint((ONE,) * m + pad, EQ, ONE)]
    for row, s in zip(instance.utilities, instance.disagreement_point()):
        cons.append(Constraint(row + pad, GE, s))
    return cons


def normalize(instance: BargainingInstance) -> BargainingInstance:
    """Rescale every agent so the disagreement lottery is worth 0 and the best
    individually rational lottery is worth 1.

    Raises :class:`DegenerateAgent` if some agent cannot gain at all.
    """
    if instance.normalized:
        return instance
    from .solutions import max_single_utility

    base = instance.disagreement_point()
    rows = []
    for i in instance.agents:
        best, _ = max_single_utility(instance, i)
        s = base[i - 1]
        if best <= s:
            raise DegenerateAgent(i)
        scale = best - s
        rows.append(tuple((u - s) / scale for u in instance.row(i)))
    return replace(instance, utilities=tuple(rows), normalized=True)


def check_normalized(instance: BargainingInstance) -> bool:
    """Recompute the normalization conditions, regardless of the flag."""
    from .solutions import max_single_utility

    base = instance.disagreement_point()
    if any(s != 0 for s in base):
        return False
    return all(max_single_utility(instance, i)[0] == 1 for i in instance.agents)


def check_assumption(instance: BargainingInstance) -> bool:
    """True iff every maximiser of each agent's utility leaves all other agents
    exactly at their disagreement utility."""
    return not assumption_failures(instance)


def assumption_failures(instance: BargainingInstance) -> list[int]:
    """Agents with a favourite lottery that gives someone else a gain.

    For each agent ``i`` this maximises the others' total gain over the
    individually rational lotteries that give ``i`` their maximum.
    """
    from .solutions import max_single_utility

    base = instance.disagreement_point()
    m = instance.num_alternatives
    bad = []
    for i in instance.agents:
        best, _ = max_single_utility(instance, i)
        cons = lottery_constraints(instance)
        cons.append(Constraint(instance.row(i), EQ, best))
        objective = [ZERO] * m
        offset = ZERO
        for j in instance.agents:
            if j == i:
                continue
            objective = [c + u for c, u in zip(objective, instance.row(j))]
            offset += base[j - 1]
        res = solve(LinearProgram(tuple(objective), tuple(cons), m))
        if not res.optimal:
            raise MalformedInstance(f"no individually rational lottery attains agent {i}'s maximum")
        if res.optimum - offset != 0:
            bad.append(i)
    return bad


def require_assumption(instance: BargainingInstance) -> None:
    if not check_assumption(instance):
        raise AssumptionViolation("some agent's favourite lottery gives another agent a positive gain")


def ideal_lottery(instance: BargainingInstance, agent: int) -> Lottery:
    """A lottery attaining ``agent``'s ideal point (the unit vector once normalized)."""
    from .solutions import max_single_utility

    return max_single_utility(instance, agent)[1]


def affine_transform(instance: BargainingInstance, scales: Sequence, shifts: Sequence) -> BargainingInstance:
    """Apply ``u_i -> scales[i] * u_i + shifts[i]`` row by row (scales > 0)."""
    if len(scales) != instance.n or len(shifts) != instance.n:
        raise DimensionMismatch("one scale and one shift per agent")
    rows = []
    for row, a, b in zip(instance.utilities, scales, shifts):
        a, b = Fraction(a), Fraction(b)
        if a <= 0:
            raise ValueError("scales must be positive")
        rows.append(tuple(a * u + b for u in row))
    return replace(instance, utilities=tuple(rows), normalized=False)


def permute_alternatives(instance: BargainingInstance, order: Sequence[int]) -> BargainingInstance:
    """Reorder the columns; ``order[k]`` is the old index of new column ``k``."""
    if sorted(order) != list(range(instance.num_alternatives)):
        raise ValueError("order must be a permutation of the alternative indices")
    return BargainingInstance(
        alternatives=tuple(instance.alternatives[k] for k in order),
        utilities=tuple(tuple(row[k] for k in order) for row in instance.utilities),
        disagreement=Lottery(tuple(instance.disagreement.weights[k] for k in order)),
        normalized=instance.normalized,
    )
