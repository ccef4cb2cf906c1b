"""The dictatorial subgame, the Knockout game and a backward-induction solver.

Game trees are built as DAGs: a subgame that can be reached along several
histories (a dictatorial subgame for a given rejecter and weight, a Knockout
game on a smaller player set, the accept/reject rounds that follow a given
winning bid) is created once and shared. Backward induction on a subgame
does not depend on how it was reached, so the equilibrium of the DAG is the
equilibrium of the fully expanded tree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

import numpy as np

from . import _kernels
from .dominance import DominanceResult, d_dominance, disagreement_projection, leximin_key, restrict
from .errors import BudgetExceeded, DimensionMismatch
from .model import ONE, ZERO, BargainingInstance, Lottery, UtilityPoint, evaluate, ideal_lottery
from .rational import fmt, fmt_vector

DEFAULT_NODE_BUDGET = 10**7
BID_TIE_POLICIES = ("largest-index", "smallest-index")


@dataclass(frozen=True, eq=False)
class Terminal:
    payoff: UtilityPoint
    label: str = ""


@dataclass(frozen=True, eq=False)
class Decision:
    player: int
    actions: tuple[str, ...]
    children: tuple
    label: str = ""

    def __post_init__(self):
        if not self.actions or len(self.actions) != len(self.children):
            raise ValueError("a decision node needs as many children as actions, and at least one")


GameNode = Union[Decision, Terminal]


@dataclass(frozen=True)
class Outcome:
    """A utility point, optionally with a lottery that realises it."""

    point: UtilityPoint
    witness: Lottery | None = None
    label: str = ""

    @classmethod
    def of(cls, instance: BargainingInstance, lottery: Lottery, label: str = "") -> "Outcome":
        return cls(evaluate(instance, lottery), lottery, label)


@dataclass(frozen=True)
class BidVector:
    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.values)
        if any(not 0 <= v <= 1 for v in vals):
            raise ValueError(f"bid components must lie in [0, 1], got {fmt_vector(vals)}")
        object.__setattr__(self, "values", vals)

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def component(self, agent: int) -> Fraction:
        return self.values[agent - 1]

    def with_component(self, agent: int, value) -> "BidVector":
        vals = list(self.values)
        vals[agent - 1] = Fraction(value)
        return BidVector(tuple(vals))

    def __str__(self):
        return fmt_vector(self.values)


@dataclass(frozen=True)
class KnockoutConfig:
    """Finite restriction of the Knockout game.

    ``bid_candidates`` and ``proposal_candidates`` add to the canonical sets
    (they never replace them). ``tie_break`` decides the winner among
    leximin-equal bids.
    """

    bid_candidates: Mapping[int, tuple[BidVector, ...]] | None = None
    proposal_candidates: Mapping[int, tuple] | None = None
    tie_break: str = "largest-index"
    node_budget: int = DEFAULT_NODE_BUDGET

    def __post_init__(self):
        if self.tie_break not in BID_TIE_POLICIES:
            raise ValueError(f"tie_break must be one of {BID_TIE_POLICIES}")
        if self.node_budget <= 0:
            raise ValueError("node budget must be positive")


@dataclass
class SpeResult:
    outcome: UtilityPoint
    strategy: dict = field(repr=False)
    trace: tuple = ()
    values: dict = field(default_factory=dict, repr=False)
    nodes: int = 0


def _as_outcome(instance, x, label=""):
    if isinstance(x, Outcome):
        return x
    if isinstance(x, Lottery):
        return Outcome.of(instance, x, label)
    return Outcome(tuple(Fraction(v) for v in x), None, label)


def canonical_bids(x: UtilityPoint, y: UtilityPoint, n: int) -> dict[int, tuple[BidVector, ...]]:
    """Per-player bids: both disagreement projections, all ones and all
    zeros, each with the bidder's own component raised to 1."""
    base = [
        disagreement_projection(x, y),
        disagreement_projection(y, x),
        (ONE,) * n,
        (ZERO,) * n,
    ]
    out = {}
    for i in range(1, n + 1):
        seen = []
        for b in base:
            bid = BidVector(b).with_component(i, ONE)
            if bid not in seen:
                seen.append(bid)
        out[i] = tuple(seen)
    return out


class _Builder:
    def __init__(self, budget):
        self.budget = budget
        self.count = 0

    def _tick(self):
        self.count += 1
        if self.count > self.budget:
            raise BudgetExceeded("game tree node count", self.budget)

    def terminal(self, payoff, label=""):
        self._tick()
        return Terminal(tuple(payoff), label)

    def decision(self, player, actions, children, label=""):
        self._tick()
        return Decision(player, tuple(actions), tuple(children), label)


def _mix(p: Fraction, a: UtilityPoint, b: UtilityPoint) -> UtilityPoint:
    return tuple(p * x + (1 - p) * y for x, y in zip(a, b))


def _dictatorial(builder, instance, dictator, weight, proposals, status_quo):
    responders = [j for j in instance.agents if j != dictator]
    reject = builder.terminal(status_quo, "status quo")
    branches = []
    for prop in proposals:
        node = builder.terminal(_mix(weight, prop.point, status_quo), f"D({dictator}) grants {prop.label}".strip())
        for j in reversed(responders):
            node = builder.decision(j, ("accept", "reject"), (node, reject), f"D({dictator}) vote on {prop.label}".strip())
        branches.append(node)
    labels = [p.label or fmt_vector(p.point) for p in proposals]
    return builder.decision(dictator, labels, branches, f"D({dictator}, p={fmt(weight)}) proposal")


def build_dictatorial(
    instance: BargainingInstance,
    agent: int,
    bid: BidVector | Sequence,
    proposals: Sequence,
    *,
    budget: int = DEFAULT_NODE_BUDGET,
) -> GameNode:
    """``agent`` proposes; the others vote in index order. Any rejection gives
    the disagreement lottery, unanimity gives the ``bid[agent]``-weighted mix
    of the proposal with the disagreement lottery."""
    if not proposals:
        raise ValueError("the dictator needs at least one proposal")
    bid = bid if isinstance(bid, BidVector) else BidVector(tuple(bid))
    if len(bid) != instance.n:
        raise DimensionMismatch("bid length must equal the number of agents")
    props = [_as_outcome(instance, p) for p in proposals]
    return _dictatorial(_Builder(budget), instance, agent, bid.component(agent), props, instance.disagreement_point())


class _Knockout:
    def __init__(self, instance, x, y, config, x_game, y_game):
        self.instance = instance
        self.n = instance.n
        self.x, self.y = x, y
        self.config = config
        self.builder = _Builder(config.node_budget)
        self.status_quo = instance.disagreement_point()
        b = self.builder
        self.outcome_node = {
            "X": x_game if x_game is not None else b.terminal(x.point, x.label or "X"),
            "Y": y_game if y_game is not None else b.terminal(y.point, y.label or "Y"),
        }
        canon = canonical_bids(x.point, y.point, self.n)
        extra = config.bid_candidates or {}
        self.bids = {}
        for i in instance.agents:
            cands = list(canon[i])
            for bid in extra.get(i, ()):
                bid = bid if isinstance(bid, BidVector) else BidVector(tuple(bid))
                if bid not in cands:
                    cands.append(bid)
            self.bids[i] = tuple(cands)
        self.extra_props = config.proposal_candidates or {}
        self.memo_k, self.memo_d, self.memo_chain = {}, {}, {}

    def proposals(self, agent):
        inst = self.instance
        props = [
            Outcome.of(inst, ideal_lottery(inst, agent), f"ideal of {agent}"),
            Outcome(self.x.point, self.x.witness, "X"),
            Outcome(self.y.point, self.y.witness, "Y"),
            Outcome(self.status_quo, inst.disagreement, "status quo"),
        ]
        for p in self.extra_props.get(agent, ()):
            props.append(_as_outcome(inst, p))
        return props

    def dictatorial(self, agent, weight):
        key = (agent, weight)
        if key not in self.memo_d:
            self.memo_d[key] = _dictatorial(self.builder, self.instance, agent, weight, self.proposals(agent), self.status_quo)
        return self.memo_d[key]

    def knockout(self, players):
        players = tuple(sorted(players))
        if players not in self.memo_k:
            self.memo_k[players] = self._knockout(players)
        return self.memo_k[players]

    def _knockout(self, players):
        b = self.builder
        tag = "K{" + ",".join(map(str, players)) + "}"
        if len(players) == 1:
            (p,) = players
            return b.decision(p, ("X", "Y"), (self.outcome_node["X"], self.outcome_node["Y"]), f"{tag} last player picks")
        keys = {i: [leximin_key(restrict(bid, players)) for bid in self.bids[i]] for i in players}

        def bidding(k, choices, chosen):
            if k == len(players):
                return self.settle(players, choices, chosen, keys)
            i = players[k]
            kids = [bidding(k + 1, choices, chosen + (c,)) for c in range(len(self.bids[i]))]
            return b.decision(i, [str(bid) for bid in self.bids[i]], kids, f"{tag} bid")

        def choosing(k, choices):
            if k == len(players):
                return bidding(0, choices, ())
            i = players[k]
            kids = [choosing(k + 1, choices + (c,)) for c in ("X", "Y")]
            return b.decision(i, ("X", "Y"), kids, f"{tag} outcome choice")

        return choosing(0, ())

    def winner(self, players, chosen, keys):
        best = max(keys[i][c] for i, c in zip(players, chosen))
        tied = [i for i, c in zip(players, chosen) if keys[i][c] == best]
        return max(tied) if self.config.tie_break == "largest-index" else min(tied)

    def settle(self, players, choices, chosen, keys):
        w = self.winner(players, chosen, keys)
        pos = players.index(w)
        bid = self.bids[w][chosen[pos]]
        return self.chain(players, w, choices[pos], bid)

    def chain(self, players, winner, choice, bid):
        key = (players, winner, choice, bid)
        if key in self.memo_chain:
            return self.memo_chain[key]
        b = self.builder
        rest = sorted((j for j in players if j != winner), key=lambda j: (bid.component(j), j))
        node = self.outcome_node[choice]
        for j in reversed(rest):
            pj = bid.component(j)
            if pj < 1:
                fallback = self.dictatorial(j, pj)
            else:
                fallback = self.knockout(tuple(k for k in players if k != winner))
            node = b.decision(j, ("accept", "reject"), (node, fallback), f"vote on {choice} won by {winner} with {bid}")
        self.memo_chain[key] = node
        return node


def build_knockout(
    instance: BargainingInstance,
    x,
    y,
    players: Sequence[int] | None = None,
    config: KnockoutConfig | None = None,
    *,
    x_game: GameNode | None = None,
    y_game: GameNode | None = None,
) -> GameNode:
    """The Knockout game between ``x`` and ``y`` for ``players`` (all agents
    by default), restricted to finitely many bids.

    ``x_game``/``y_game`` replace the outcome terminals by whole subgames, in
    which case ``x``/``y`` should be those subgames' equilibrium outcomes (they
    still seed the canonical bids and the dictatorial proposals).
    """
    config = config or KnockoutConfig()
    x = _as_outcome(instance, x, "X")
    y = _as_outcome(instance, y, "Y")
    if len(x.point) != instance.n or len(y.point) != instance.n:
        raise DimensionMismatch("outcomes must have one component per agent")
    players = tuple(instance.agents) if players is None else tuple(players)
    if not players or any(p not in instance.agents for p in players) or len(set(players)) != len(players):
        raise ValueError("players must be distinct agents of the instance")
    ko = _Knockout(instance, x, y, config, x_game, y_game)
    return ko.knockout(players)


def resolve_knockout_analytic(x, y, players: Sequence[int] | None = None):
    """``x`` if it strictly D-dominates ``y`` on the players' coordinates,
    ``y`` if the reverse holds, and ``x`` on a mutual tie.

    Accepts points or :class:`Outcome` objects and returns the winning argument.
    """
    px = x.point if isinstance(x, Outcome) else x
    py = y.point if isinstance(y, Outcome) else y
    if players is not None:
        px, py = restrict(px, players), restrict(py, players)
    verdict = d_dominance(px, py)
    return y if verdict is DominanceResult.SECOND_STRICT else x


# ---------------------------------------------------------------------------
# Solving
# ---------------------------------------------------------------------------


@dataclass
class FlatGame:
    nodes: list
    player: np.ndarray
    child_ptr: np.ndarray
    child_idx: np.ndarray
    height: np.ndarray
    ranks: np.ndarray
    n: int


def flatten(root: GameNode) -> FlatGame:
    """Number the DAG's distinct nodes children-first and encode terminal
    payoffs as per-player ranks."""
    index: dict[int, int] = {}
    nodes: list = []
    stack = [(root, False)]
    while stack:
        node, ready = stack.pop()
        if id(node) in index:
            continue
        if isinstance(node, Terminal) or ready:
            index[id(node)] = len(nodes)
            nodes.append(node)
            continue
        stack.append((node, True))
        for c in reversed(node.children):
            if id(c) not in index:
                stack.append((c, False))

    terminals = [v for v in nodes if isinstance(v, Terminal)]
    n = len(terminals[0].payoff)
    if any(len(t.payoff) != n for t in terminals):
        raise DimensionMismatch("terminal payoffs have different lengths")
    size = len(nodes)
    player = np.full(size, -1, np.int64)
    height = np.zeros(size, np.int64)
    ptr = np.zeros(size + 1, np.int64)
    kids: list[int] = []
    for k, v in enumerate(nodes):
        if isinstance(v, Decision):
            if not 1 <= v.player <= n:
                raise ValueError(f"decision node mover {v.player} outside 1..{n}")
            player[k] = v.player - 1
            ch = [index[id(c)] for c in v.children]
            kids.extend(ch)
            height[k] = 1 + max(height[c] for c in ch)
        ptr[k + 1] = len(kids)
    ranks = np.zeros((size, n), np.int64)
    for i in range(n):
        levels = {x: r for r, x in enumerate(sorted({t.payoff[i] for t in terminals}))}
        for k, v in enumerate(nodes):
            if isinstance(v, Terminal):
                ranks[k, i] = levels[v.payoff[i]]
    return FlatGame(nodes, player, ptr, np.array(kids, dtype=np.int64), height, ranks, n)


def backward_induction(root: GameNode, tie_break: str = "lowest-index", *, backend=None) -> SpeResult:
    """Subgame perfect play of a finite perfect-information game.

    Each mover picks the child maximising its own payoff component; among
    equally good actions the lowest action index wins.
    """
    if tie_break != "lowest-index":
        raise ValueError("only the 'lowest-index' indifference policy is supported")
    flat = flatten(root)
    choice, leaf = _kernels.backward_induction(flat.player, flat.child_ptr, flat.child_idx, flat.ranks, flat.height, backend)
    nodes = flat.nodes
    strategy = {}
    values = {}
    for k, v in enumerate(nodes):
        values[v] = nodes[leaf[k]].payoff
        if isinstance(v, Decision):
            strategy[v] = int(choice[k])
    trace = []
    node = root
    while isinstance(node, Decision):
        a = strategy[node]
        trace.append((node.player, node.label, node.actions[a]))
        node = node.children[a]
    return SpeResult(values[root], strategy, tuple(trace), values, len(nodes))


def one_shot_deviations(root: GameNode, result: SpeResult) -> list:
    """Profitable single deviations along the equilibrium path (should be none)."""
    bad = []
    node = root
    while isinstance(node, Decision):
        p = node.player - 1
        mine = result.values[node][p]
        for a, child in enumerate(node.children):
            if result.values[child][p] > mine:
                bad.append((node, a, result.values[child], result.values[node]))
        node = node.children[result.strategy[node]]
    return bad


def tree_size(root: GameNode) -> int:
    """Node count of the fully expanded tree (shared subgames counted per use)."""
    flat = flatten(root)
    size = [0] * len(flat.nodes)
    for k, v in enumerate(flat.nodes):
        if isinstance(v, Terminal):
            size[k] = 1
        else:
            size[k] = 1 + sum(size[int(c)] for c in flat.child_idx[flat.child_ptr[k]:flat.child_ptr[k + 1]])
    return size[-1]


def outline(root: GameNode, max_lines: int | None = 2000) -> str:
    """Indented text dump; a shared subgame is printed once and referenced after."""
    lines: list[str] = []
    ids: dict[int, int] = {}

    def emit(text):
        if max_lines is not None and len(lines) >= max_lines:
            raise StopIteration
        lines.append(text)

    def walk(node, depth, prefix):
        pad = "  " * depth
        if isinstance(node, Terminal):
            emit(f"{pad}{prefix}payoff {fmt_vector(node.payoff)}" + (f"  [{node.label}]" if node.label else ""))
            return
        if id(node) in ids:
            emit(f"{pad}{prefix}-> see #{ids[id(node)]}")
            return
        ids[id(node)] = len(ids) + 1
        emit(f"{pad}{prefix}#{ids[id(node)]} player {node.player}: {node.label}")
        for action, child in zip(node.actions, node.children):
            walk(child, depth + 1, f"{action} => ")

    try:
        walk(root, 0, "")
    except StopIteration:
        lines.append("... (truncated)")
    return "\n".join(lines)
