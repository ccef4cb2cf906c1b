from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_instance
from lexmaxmin.dominance import DominanceResult, d_dominance
from lexmaxmin.errors import BudgetExceeded
from lexmaxmin.generate import random_instance, rng_for
from lexmaxmin.mechanism import (
    BidVector,
    Decision,
    KnockoutConfig,
    Outcome,
    Terminal,
    backward_induction,
    build_dictatorial,
    build_knockout,
    canonical_bids,
    flatten,
    one_shot_deviations,
    outline,
    resolve_knockout_analytic,
    tree_size,
)
from lexmaxmin.model import ideal_lottery
from lexmaxmin.solutions import leximin
from lexmaxmin.verify import random_dominance_pair

F = Fraction
seeds = st.integers(0, 2**32 - 1)


@pytest.fixture
def two_agent():
    return make_instance([(0, 0), (1, 0), (0, 1), (F(7, 10), F(2, 5)), (F(1, 5), F(9, 10))])


def _outcome(inst, name, label):
    return Outcome.of(inst, inst.point_mass(name), label)


def test_backward_induction_trivial():
    node = Decision(1, ("left", "right"), (Terminal((1, 0)), Terminal((0, 1))))
    assert backward_induction(node).outcome == (1, 0)
    assert backward_induction(Terminal((F(1, 3), 0))).outcome == (F(1, 3), 0)


def test_indifference_takes_lowest_action():
    a, b = Terminal((0, 1)), Terminal((0, 0))
    res = backward_induction(Decision(1, ("a", "b"), (a, b)))
    assert res.trace == ((1, "", "a"),)


def test_decision_needs_children():
    with pytest.raises(ValueError):
        Decision(1, ("a",), ())


def test_bid_vector_bounds():
    with pytest.raises(ValueError):
        BidVector((F(3, 2), 0))
    assert BidVector((0, 1)).with_component(1, F(1, 2)).component(1) == F(1, 2)


def test_dictatorial_with_ideal_proposal(example1):
    for i in example1.agents:
        for p in (F(0), F(2, 5), F(1)):
            bid = [F(1)] * 3
            bid[i - 1] = p
            props = [ideal_lottery(example1, i), example1.point_mass("d"), example1.disagreement]
            res = backward_induction(build_dictatorial(example1, i, bid, props))
            assert res.outcome == tuple(p if j == i else 0 for j in example1.agents)


def test_dictatorial_full_weight_two_agents(triangle):
    game = build_dictatorial(triangle, 1, (1, 1), [triangle.point_mass(1)])
    assert backward_induction(game).outcome == (1, 0)


def test_dictatorial_needs_proposals(triangle):
    with pytest.raises(ValueError):
        build_dictatorial(triangle, 1, (1, 1), [])


def test_canonical_bids_force_own_component():
    x, y = (F(7, 10), F(2, 5)), (F(1, 5), F(9, 10))
    bids = canonical_bids(x, y, 2)
    for i, cands in bids.items():
        assert all(b.component(i) == 1 for b in cands)
    assert BidVector((1, F(2, 5))) in bids[1]
    assert BidVector((F(1, 5), 1)) in bids[2]


def test_two_agent_knockout(two_agent):
    x, y = _outcome(two_agent, "a3", "X"), _outcome(two_agent, "a4", "Y")
    game = build_knockout(two_agent, x, y)
    res = backward_induction(game)
    assert res.outcome == (F(7, 10), F(2, 5))
    assert resolve_knockout_analytic(x, y, (1, 2)) is x
    assert not one_shot_deviations(game, res)


def test_same_outcome_both_sides(two_agent):
    x = _outcome(two_agent, "a3", "X")
    assert backward_induction(build_knockout(two_agent, x, x)).outcome == x.point
    assert resolve_knockout_analytic(x.point, x.point) == x.point


def test_leximin_beats_vertex_in_three_agent_knockout(example1):
    lex = leximin(example1)
    u = Outcome.of(example1, lex.witness, "u*")
    for name in ("s", "a", "b", "c", "e"):
        other = _outcome(example1, name, name)
        game = build_knockout(example1, u, other)
        assert backward_induction(game).outcome == lex.point
        assert resolve_knockout_analytic(u, other) is u
        assert resolve_knockout_analytic(other, u) is u


def test_budget_guard(example1):
    lex = Outcome.of(example1, leximin(example1).witness)
    with pytest.raises(BudgetExceeded):
        build_knockout(example1, lex, _outcome(example1, "a", "a"), config=KnockoutConfig(node_budget=50))


def test_bad_config():
    with pytest.raises(ValueError):
        KnockoutConfig(tie_break="coin-flip")
    with pytest.raises(ValueError):
        KnockoutConfig(node_budget=0)


def test_rejection_with_full_bid_recurses_into_smaller_knockout(example1):
    lex = Outcome.of(example1, leximin(example1).witness, "u*")
    a = _outcome(example1, "a", "a")
    full = build_knockout(example1, lex, a)
    flat = flatten(full)
    for players in ((2, 3), (1, 3), (1, 2)):
        tag = "K{" + ",".join(map(str, players)) + "} outcome choice"
        subs = [v for v in flat.nodes if isinstance(v, Decision) and v.label == tag and v.player == players[0]]
        alone = build_knockout(example1, lex, a, players=players)
        assert subs, players
        assert outline(subs[0], None) == outline(alone, None)


def test_outline_and_tree_size(two_agent):
    game = build_knockout(two_agent, _outcome(two_agent, "a3", "X"), _outcome(two_agent, "a4", "Y"))
    text = outline(game, max_lines=30)
    assert text.splitlines()[0].startswith("#1 player 1")
    assert "truncated" in text
    assert tree_size(game) >= len(flatten(game).nodes)


def _spe_everywhere(game, res):
    for node in flatten(game).nodes:
        if isinstance(node, Decision):
            p = node.player - 1
            assert res.values[node][p] == max(res.values[c][p] for c in node.children)


@settings(max_examples=40)
@given(seeds, st.sampled_from(["largest-index", "smallest-index"]))
def test_oracle_agreement_two_agents(seed, policy):
    rng = rng_for(seed)
    inst = random_instance(rng, 2, int(rng.integers(0, 4)))
    pair = random_dominance_pair(rng, inst)
    if pair is None:
        return
    game = build_knockout(inst, *pair, config=KnockoutConfig(tie_break=policy))
    res = backward_induction(game)
    assert res.outcome == resolve_knockout_analytic(*pair).point
    _spe_everywhere(game, res)


@settings(max_examples=15)
@given(seeds, st.sampled_from(["largest-index", "smallest-index"]))
def test_oracle_agreement_three_agents(seed, policy):
    rng = rng_for(seed)
    inst = random_instance(rng, 3, int(rng.integers(0, 3)))
    pair = random_dominance_pair(rng, inst)
    if pair is None:
        return
    game = build_knockout(inst, *pair, config=KnockoutConfig(tie_break=policy))
    res = backward_induction(game)
    assert res.outcome == resolve_knockout_analytic(*pair).point
    assert not one_shot_deviations(game, res)


@settings(max_examples=25)
@given(seeds)
def test_extra_bids_do_not_matter_for_two_agents(seed):
    rng = rng_for(seed)
    inst = random_instance(rng, 2, int(rng.integers(0, 4)))
    pair = random_dominance_pair(rng, inst)
    if pair is None:
        return
    extra = {i: tuple(BidVector((F(int(rng.integers(0, 6)), 5), F(int(rng.integers(0, 6)), 5))) for _ in range(4))
             for i in (1, 2)}
    game = build_knockout(inst, *pair, config=KnockoutConfig(bid_candidates=extra))
    assert backward_induction(game).outcome == resolve_knockout_analytic(*pair).point


@pytest.mark.parametrize("policy", ["largest-index", "smallest-index"])
def test_non_canonical_spoiler_bid_changes_three_agent_outcome(policy):
    # X strictly D-dominates Y and wins with canonical bids. Allowing agent 2
    # the extra bid (2/5, 1, 4/5) lets it outbid agent 3's X-supporting bid;
    # agent 3 then bids all ones, agent 2 rejects into the two-agent game,
    # where Y is better for both remaining agents.
    x = (F(109, 312), F(93, 260), F(4, 13))
    y = (F(245, 576), F(49, 96), F(7, 32))
    inst = make_instance([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), x, y])
    assert d_dominance(x, y) is DominanceResult.FIRST_STRICT
    ox, oy = Outcome.of(inst, inst.point_mass(4), "X"), Outcome.of(inst, inst.point_mass(5), "Y")
    canonical = backward_induction(build_knockout(inst, ox, oy, config=KnockoutConfig(tie_break=policy)))
    assert canonical.outcome == x
    spoiler = KnockoutConfig(bid_candidates={2: (BidVector((F(2, 5), 1, F(4, 5))),)}, tie_break=policy)
    res = backward_induction(build_knockout(inst, ox, oy, config=spoiler))
    assert res.outcome == y
    assert (2, "K{1,2,3} bid", "(2/5, 1, 4/5)") in res.trace
