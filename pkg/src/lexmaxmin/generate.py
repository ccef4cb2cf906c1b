"""Seeded random instances that are normalized and satisfy the ideal-point
assumption by construction.

Every instance has a disagreement alternative worth 0 to everyone, one
alternative per agent worth 1 to that agent and 0 to the rest, and extra
alternatives whose utilities are fractions ``p/q`` with ``2 <= q <= 10``
strictly inside (0, 1). Since no extra alternative reaches 1, an agent's
only favourite lottery is its unit alternative.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .model import BargainingInstance, Lottery, UtilityPoint, evaluate

MAX_DENOMINATOR = 10


def rng_for(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_fraction(rng: np.random.Generator) -> Fraction:
    q = int(rng.integers(2, MAX_DENOMINATOR + 1))
    return Fraction(int(rng.integers(1, q)), q)


def generate(seed: int, n: int, extras: int = 0) -> BargainingInstance:
    """Deterministic instance for ``(seed, n, extras)``."""
    return random_instance(rng_for(seed), n, extras)


def random_instance(rng: np.random.Generator, n: int, extras: int = 0) -> BargainingInstance:
    if n < 2:
        raise ValueError("need at least two agents")
    if extras < 0:
        raise ValueError("extras must be nonnegative")
    names = ["s"] + [f"ideal{i}" for i in range(1, n + 1)] + [f"x{k}" for k in range(1, extras + 1)]
    extra_cols = [[random_fraction(rng) for _ in range(n)] for _ in range(extras)]
    rows = []
    for i in range(n):
        unit = [Fraction(int(i == j)) for j in range(n)]
        rows.append(tuple([Fraction(0)] + unit + [col[i] for col in extra_cols]))
    return BargainingInstance(tuple(names), tuple(rows), Lottery.point_mass(len(names), 0), normalized=True)


def random_sized_instance(rng: np.random.Generator, max_n: int = 5, max_alternatives: int = 8, min_n: int = 2) -> BargainingInstance:
    """Random ``n`` in ``[min_n, max_n]`` and as many extras as fit in ``max_alternatives``."""
    hi = min(max_n, max_alternatives - 1)
    if hi < min_n:
        raise ValueError("max_alternatives too small for the requested agent count")
    n = int(rng.integers(min_n, hi + 1))
    extras = int(rng.integers(0, max_alternatives - n - 1 + 1))
    return random_instance(rng, n, extras)


def random_lottery(rng: np.random.Generator, m: int, scale: int = 12) -> Lottery:
    """Exact random lottery with integer weights in ``[0, scale]`` rescaled to sum 1."""
    while True:
        raw = [int(x) for x in rng.integers(0, scale + 1, size=m)]
        total = sum(raw)
        if total:
            return Lottery(tuple(Fraction(x, total) for x in raw))


def random_hull_point(rng: np.random.Generator, instance: BargainingInstance) -> tuple[UtilityPoint, Lottery]:
    lot = random_lottery(rng, instance.num_alternatives)
    return evaluate(instance, lot), lot


def random_vector(rng: np.random.Generator, n: int, denominator: int = MAX_DENOMINATOR) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(rng.integers(0, denominator + 1)), denominator) for _ in range(n))
