"""The binary tree of Knockout games and its equilibrium analysis.

Backward induction on the nested game reduces every Knockout node to the
pairwise D-dominance winner of its children's outcomes, so the analytic
resolution is a knockout tournament over the proposals. The extensive-form
construction is kept for small instances as an independent check.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .dominance import DominanceResult, d_dominance
from .errors import AssumptionViolation, BudgetExceeded, DimensionMismatch, MalformedInstance, NotNormalized
from .mechanism import (
    Decision,
    KnockoutConfig,
    Outcome,
    build_knockout,
    resolve_knockout_analytic,
)
from .model import BargainingInstance, Lottery, UtilityPoint, check_assumption, is_individually_rational
from .rational import fmt_vector
from .solutions import leximin


@dataclass(frozen=True)
class ProposalProfile:
    """Individually rational proposals in leaf order. The mechanism uses one
    per agent; longer or shorter brackets are allowed for analysis."""

    proposals: tuple[Outcome, ...]

    @classmethod
    def from_lotteries(cls, instance: BargainingInstance, lotteries: Sequence[Lottery], labels=None) -> "ProposalProfile":
        labels = labels or [""] * len(lotteries)
        out = []
        for i, (lot, lab) in enumerate(zip(lotteries, labels), start=1):
            if not is_individually_rational(instance, lot):
                raise MalformedInstance(f"agent {i}'s proposal is not individually rational")
            out.append(Outcome.of(instance, lot, lab))
        return cls(tuple(out))

    @property
    def points(self) -> list[UtilityPoint]:
        return [p.point for p in self.proposals]

    def replace(self, agent: int, proposal: Outcome) -> "ProposalProfile":
        props = list(self.proposals)
        props[agent - 1] = proposal
        return ProposalProfile(tuple(props))

    def __len__(self):
        return len(self.proposals)


@dataclass(frozen=True)
class TreeNode:
    """A bracket slot. ``leaves`` lists the reachable proposal indices
    (1-based); an empty tuple marks a bye."""

    leaves: tuple[int, ...]
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def is_bye(self) -> bool:
        return not self.leaves


@dataclass(frozen=True)
class TournamentTree:
    root: TreeNode
    slots: int
    n: int

    def internal_nodes(self) -> list[TreeNode]:
        """Internal nodes in post-order (children before parents)."""
        out = []

        def walk(node):
            if node.is_leaf:
                return
            walk(node.left)
            walk(node.right)
            out.append(node)

        walk(self.root)
        return out

    def leaf_nodes(self) -> list[TreeNode]:
        out = []

        def walk(node):
            if node.is_leaf:
                out.append(node)
            else:
                walk(node.left)
                walk(node.right)

        walk(self.root)
        return out

    @property
    def byes(self) -> int:
        return self.slots - self.n


def build_tree(profile_or_n, slots: int | None = None) -> TournamentTree:
    """Complete binary bracket; proposal ``i`` sits in leaf slot ``i`` and any
    surplus slots at the end are byes."""
    n = profile_or_n if isinstance(profile_or_n, int) else len(profile_or_n)
    if n < 2:
        raise ValueError("a tournament needs at least two proposals")
    need = 1
    while need < n:
        need *= 2
    if slots is None:
        slots = need
    if slots < n or slots & (slots - 1):
        raise ValueError(f"slots must be a power of two >= {n}")

    def make(lo, hi):
        if hi - lo == 1:
            return TreeNode((lo + 1,) if lo < n else ())
        mid = (lo + hi) // 2
        left, right = make(lo, mid), make(mid, hi)
        return TreeNode(left.leaves + right.leaves, left, right)

    return TournamentTree(make(0, slots), slots, n)


@dataclass(frozen=True)
class BracketEntry:
    leaves: tuple[int, ...]
    left: Outcome | None
    right: Outcome | None
    verdict: DominanceResult | None
    winner: Outcome | None


@dataclass(frozen=True)
class Bracket:
    outcome: Outcome
    entries: tuple[BracketEntry, ...]

    def report(self) -> str:
        lines = []
        for e in self.entries:
            tag = "S{" + ",".join(map(str, e.leaves)) + "}"
            if e.verdict is None:
                side = e.left if e.left is not None else e.right
                lines.append(f"{tag}: {_show(side)} advances on a bye")
            else:
                lines.append(
                    f"{tag}: {_show(e.left)} vs {_show(e.right)} -> {e.verdict.value}; winner {_show(e.winner)}"
                )
        lines.append(f"root outcome {fmt_vector(self.outcome.point)}")
        return "\n".join(lines)


def _show(o: Outcome) -> str:
    text = fmt_vector(o.point)
    return f"{o.label} {text}" if o.label else text


def bracket(instance: BargainingInstance, profile: ProposalProfile, tree: TournamentTree | None = None) -> Bracket:
    """Resolve every Knockout node by pairwise D-dominance over all agents."""
    tree = tree or build_tree(profile)
    entries = []

    def walk(node):
        if node.is_bye:
            return None
        if node.is_leaf:
            return profile.proposals[node.leaves[0] - 1]
        a, b = walk(node.left), walk(node.right)
        if a is None or b is None:
            win = a if b is None else b
            entries.append(BracketEntry(node.leaves, a, b, None, win))
            return win
        verdict = d_dominance(a.point, b.point)
        win = resolve_knockout_analytic(a, b)
        entries.append(BracketEntry(node.leaves, a, b, verdict, win))
        return win

    return Bracket(walk(tree.root), tuple(entries))


def resolve_tree(instance: BargainingInstance, profile: ProposalProfile, tree: TournamentTree | None = None) -> UtilityPoint:
    return bracket(instance, profile, tree).outcome.point


@dataclass(frozen=True)
class MechanismSummary:
    outcome: UtilityPoint
    witness: Lottery
    profile: ProposalProfile
    bracket: Bracket


def _require_mechanism_ready(instance):
    if not instance.normalized:
        raise NotNormalized("the mechanism is defined on normalized instances")
    if not check_assumption(instance):
        raise AssumptionViolation("some agent's favourite lottery gives another agent a positive gain")


def full_mechanism_spe(instance: BargainingInstance) -> MechanismSummary:
    """Equilibrium outcome of the whole mechanism: every agent proposes the
    leximin lottery, and the bracket then returns it."""
    _require_mechanism_ready(instance)
    lex = leximin(instance)
    profile = ProposalProfile.from_lotteries(instance, [lex.witness] * instance.n, ["u*"] * instance.n)
    br = bracket(instance, profile)
    if br.outcome.point != lex.point:  # would contradict the pairwise dominance of u*
        raise AssertionError("the all-u* profile did not resolve to u*")
    return MechanismSummary(lex.point, lex.witness, profile, br)


@dataclass(frozen=True)
class Deviation:
    agent: int
    proposal: Outcome
    before: Fraction
    after: Fraction


@dataclass(frozen=True)
class EquilibriumReport:
    outcome: UtilityPoint
    leximin_point: UtilityPoint
    profitable: tuple[Deviation, ...]
    guarantee_violations: tuple[int, ...]
    checked: int

    @property
    def is_equilibrium(self) -> bool:
        return not self.profitable


def default_deviations(instance: BargainingInstance, lex_witness: Lottery | None = None) -> list[Outcome]:
    """Every alternative as a point mass, plus the leximin lottery."""
    devs = [Outcome.of(instance, instance.point_mass(a), name) for a, name in enumerate(instance.alternatives)]
    if lex_witness is None:
        lex_witness = leximin(instance).witness
    devs.append(Outcome.of(instance, lex_witness, "u*"))
    return devs


def equilibrium_check(
    instance: BargainingInstance,
    profile: ProposalProfile,
    deviations: dict[int, Sequence] | Sequence | None = None,
) -> EquilibriumReport:
    """Try every unilateral proposal change and list the profitable ones.

    ``deviations`` is either one candidate list shared by all agents or a
    mapping from agent to candidates; candidates may be lotteries or outcomes.
    """
    if len(profile) != instance.n:
        raise DimensionMismatch(f"need {instance.n} proposals, got {len(profile)}")
    lex = leximin(instance)
    if deviations is None:
        deviations = default_deviations(instance, lex.witness)
    if not isinstance(deviations, dict):
        deviations = {i: deviations for i in instance.agents}
    base = resolve_tree(instance, profile)
    found, checked = [], 0
    for i in instance.agents:
        for cand in deviations.get(i, ()):
            if isinstance(cand, Lottery):
                if not is_individually_rational(instance, cand):
                    continue
                cand = Outcome.of(instance, cand)
            checked += 1
            after = resolve_tree(instance, profile.replace(i, cand))
            if after[i - 1] > base[i - 1]:
                found.append(Deviation(i, cand, base[i - 1], after[i - 1]))
    below = tuple(i for i in instance.agents if base[i - 1] < lex.point[i - 1])
    return EquilibriumReport(base, lex.point, tuple(found), below, checked)


# ---------------------------------------------------------------------------
# Extensive form
# ---------------------------------------------------------------------------


def build_tournament_game(
    instance: BargainingInstance,
    profile: ProposalProfile,
    config: KnockoutConfig | None = None,
    tree: TournamentTree | None = None,
):
    """Nest Knockout games along the bracket: the X and Y outcomes of each
    node's game are replaced by the children's games. Returns the root game
    and the analytic outcome used to seed it."""
    tree = tree or build_tree(profile)

    def walk(node):
        if node.is_bye:
            return None
        if node.is_leaf:
            return None, profile.proposals[node.leaves[0] - 1]
        a, b = walk(node.left), walk(node.right)
        if a is None or b is None:
            return a if b is None else b
        (ga, oa), (gb, ob) = a, b
        game = build_knockout(instance, oa, ob, config=config, x_game=ga, y_game=gb)
        return game, resolve_knockout_analytic(oa, ob)

    game, outcome = walk(tree.root)
    return game, outcome


def build_mechanism_game(
    instance: BargainingInstance,
    candidates: dict[int, Sequence] | Sequence,
    config: KnockoutConfig | None = None,
):
    """Proposal round (agents choose in index order from finite candidate
    sets) followed by the nested Knockout games of the resulting profile."""
    config = config or KnockoutConfig()
    if not isinstance(candidates, dict):
        candidates = {i: candidates for i in instance.agents}
    cands = {
        i: [c if isinstance(c, Outcome) else Outcome.of(instance, c) for c in candidates[i]] for i in instance.agents
    }
    total = 1
    for i in instance.agents:
        total *= len(cands[i])
    if total > config.node_budget:
        raise BudgetExceeded(f"{total} proposal profiles", config.node_budget)

    def choose(k, chosen):
        if k > instance.n:
            game, _ = build_tournament_game(instance, ProposalProfile(tuple(chosen)), config)
            return game
        kids = [choose(k + 1, chosen + [c]) for c in cands[k]]
        labels = [c.label or fmt_vector(c.point) for c in cands[k]]
        return Decision(k, tuple(labels), tuple(kids), "proposal round")

    return choose(1, [])
