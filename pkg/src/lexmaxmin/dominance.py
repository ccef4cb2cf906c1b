"""Leximin order, disagreement projection and disagreement dominance.

The projection uses 1 as its sentinel, which is the normalized maximum of
every agent; callers must pass normalized utility points.
"""
from __future__ import annotations

import enum
from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch

ONE = Fraction(1)


class OrderResult(enum.Enum):
    STRICTLY_GREATER = "strictly greater"
    EQUIVALENT = "equivalent"
    STRICTLY_LESS = "strictly less"

    def flip(self) -> "OrderResult":
        return _FLIP_ORDER[self]


_FLIP_ORDER = {
    OrderResult.STRICTLY_GREATER: OrderResult.STRICTLY_LESS,
    OrderResult.STRICTLY_LESS: OrderResult.STRICTLY_GREATER,
    OrderResult.EQUIVALENT: OrderResult.EQUIVALENT,
}


class DominanceResult(enum.Enum):
    FIRST_STRICT = "first strictly dominates"
    SECOND_STRICT = "second strictly dominates"
    MUTUAL_TIE = "mutual tie"


def _check(p, q):
    if len(p) != len(q):
        raise DimensionMismatch(f"vectors have lengths {len(p)} and {len(q)}")


def leximin_compare(p: Sequence, q: Sequence) -> OrderResult:
    """Compare sorted vectors from the smallest component upwards."""
    _check(p, q)
    for a, b in zip(sorted(p), sorted(q)):
        if a != b:
            return OrderResult.STRICTLY_GREATER if a > b else OrderResult.STRICTLY_LESS
    return OrderResult.EQUIVALENT


def leximin_key(p: Sequence) -> tuple:
    """Sort key realising the leximin order (larger key = leximin-better)."""
    return tuple(sorted(p))


def leximin_greater(p, q) -> bool:
    return leximin_compare(p, q) is OrderResult.STRICTLY_GREATER


def leximin_geq(p, q) -> bool:
    return leximin_compare(p, q) is not OrderResult.STRICTLY_LESS


def disagreement_projection(u: Sequence, v: Sequence) -> tuple[Fraction, ...]:
    """``u_i`` where agent i prefers ``v`` (``u_i < v_i``), 1 elsewhere."""
    _check(u, v)
    return tuple(Fraction(a) if a < b else ONE for a, b in zip(u, v))


def d_dominance(u: Sequence, v: Sequence) -> DominanceResult:
    order = leximin_compare(disagreement_projection(u, v), disagreement_projection(v, u))
    if order is OrderResult.STRICTLY_GREATER:
        return DominanceResult.FIRST_STRICT
    if order is OrderResult.STRICTLY_LESS:
        return DominanceResult.SECOND_STRICT
    return DominanceResult.MUTUAL_TIE


def strictly_d_dominates(u, v) -> bool:
    return d_dominance(u, v) is DominanceResult.FIRST_STRICT


def restrict(point: Sequence, players: Sequence[int]) -> tuple:
    """Coordinates of ``point`` for the 1-based ``players``, in the given order."""
    return tuple(point[i - 1] for i in players)
