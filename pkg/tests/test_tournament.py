from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_instance
from lexmaxmin.dominance import DominanceResult, d_dominance
from lexmaxmin.errors import AssumptionViolation, DimensionMismatch, MalformedInstance, NotNormalized
from lexmaxmin.generate import random_instance, random_lottery, random_sized_instance, rng_for
from lexmaxmin.mechanism import Outcome, backward_induction, resolve_knockout_analytic
from lexmaxmin.serialization import load_shipped
from lexmaxmin.solutions import leximin
from lexmaxmin.tournament import (
    ProposalProfile,
    bracket,
    build_mechanism_game,
    build_tournament_game,
    build_tree,
    default_deviations,
    equilibrium_check,
    full_mechanism_spe,
    resolve_tree,
)

F = Fraction
seeds = st.integers(0, 2**32 - 1)
U_STAR = (F(3, 5), F(3, 5), F(7, 10))


def _profile(inst, names):
    lex = leximin(inst).witness
    return ProposalProfile.from_lotteries(
        inst, [lex if k == "u*" else inst.point_mass(k) for k in names], list(names)
    )


def test_tree_shapes():
    t4 = build_tree(4)
    assert len(t4.internal_nodes()) == 3 and len(t4.leaf_nodes()) == 4 and t4.byes == 0
    t3 = build_tree(3)
    assert t3.slots == 4 and t3.byes == 1
    assert [leaf.leaves for leaf in t3.leaf_nodes()] == [(1,), (2,), (3,), ()]
    assert t3.root.leaves == (1, 2, 3)
    t2 = build_tree(2)
    assert len(t2.internal_nodes()) == 1 and t2.root.leaves == (1, 2)
    assert build_tree(5).slots == 8


def test_tree_rejects_bad_sizes():
    with pytest.raises(ValueError):
        build_tree(1)
    with pytest.raises(ValueError):
        build_tree(3, slots=6)


def test_all_leximin_profile(example1):
    prof = _profile(example1, ["u*"] * 3)
    assert resolve_tree(example1, prof) == U_STAR


def test_bye_profile_with_leximin(example1):
    br = bracket(example1, _profile(example1, ["a", "u*", "b"]))
    assert br.outcome.point == U_STAR
    assert br.entries[1].verdict is None  # b advances on a bye
    assert "advances on a bye" in br.report()


def test_four_vertex_bracket(example1):
    # a~b tie (a advances), e beats c, then e beats a
    br = bracket(example1, _profile(example1, ["a", "b", "c", "e"]))
    verdicts = [e.verdict for e in br.entries]
    assert verdicts == [DominanceResult.MUTUAL_TIE, DominanceResult.SECOND_STRICT, DominanceResult.SECOND_STRICT]
    assert br.outcome.point == (F(3, 5), F(3, 5), 0)
    assert br.outcome.label == "e"


def test_full_mechanism_examples(example1, triangle):
    assert full_mechanism_spe(example1).outcome == U_STAR
    assert full_mechanism_spe(load_shipped("example2")).outcome == U_STAR
    assert full_mechanism_spe(triangle).outcome == (F(1, 2), F(1, 2))


def test_full_mechanism_preconditions(appendix_a):
    with pytest.raises(AssumptionViolation):
        full_mechanism_spe(appendix_a)
    raw = make_instance([(0, 0), (2, 0), (0, 1)], normalized=False)
    with pytest.raises(NotNormalized):
        full_mechanism_spe(raw)


def test_equilibrium_all_leximin(example1):
    rep = equilibrium_check(example1, _profile(example1, ["u*"] * 3))
    assert rep.is_equilibrium and not rep.guarantee_violations
    assert rep.checked == 3 * (example1.num_alternatives + 1)


def test_ideal_proposal_is_not_profitable(example1):
    rep = equilibrium_check(example1, _profile(example1, ["a", "u*", "u*"]))
    assert rep.outcome[0] == U_STAR[0]
    assert rep.is_equilibrium


def test_triangle_midpoint_equilibrium(triangle):
    mid = ProposalProfile.from_lotteries(triangle, [triangle.point_mass(1).mix(triangle.point_mass(2), F(1, 2))] * 2)
    rep = equilibrium_check(triangle, mid, [triangle.point_mass(1), triangle.point_mass(2)])
    assert not rep.profitable


def test_profitable_deviation_is_found(example1):
    # from an all-vertex profile someone can switch to u* and gain
    rep = equilibrium_check(example1, _profile(example1, ["a", "b", "c"]))
    assert rep.profitable
    assert all(d.after > d.before for d in rep.profitable)


def test_profile_checks(example1):
    raw = make_instance([(F(1, 2), F(1, 2)), (1, 0), (0, 1)], normalized=False)
    with pytest.raises(MalformedInstance):
        ProposalProfile.from_lotteries(raw, [raw.point_mass(1), raw.point_mass(0)])
    with pytest.raises(DimensionMismatch):
        equilibrium_check(example1, _profile(example1, ["a", "b"]))


def test_extensive_tournament_three_agents(example1):
    prof = _profile(example1, ["a", "u*", "b"])
    game, seeded = build_tournament_game(example1, prof)
    assert seeded.point == U_STAR
    assert backward_induction(game).outcome == U_STAR


def test_mechanism_game_with_proposal_round(triangle):
    lex = leximin(triangle)
    game = build_mechanism_game(triangle, default_deviations(triangle, lex.witness))
    assert backward_induction(game).outcome == lex.point


@settings(max_examples=30)
@given(seeds)
def test_mechanism_game_two_agents(seed):
    rng = rng_for(seed)
    inst = random_instance(rng, 2, int(rng.integers(0, 4)))
    lex = leximin(inst)
    game = build_mechanism_game(inst, default_deviations(inst, lex.witness))
    assert backward_induction(game).outcome == lex.point


@settings(max_examples=30)
@given(seeds)
def test_two_agent_tree_matches_extensive(seed):
    rng = rng_for(seed)
    inst = random_instance(rng, 2, int(rng.integers(0, 4)))
    prof = ProposalProfile.from_lotteries(inst, [random_lottery(rng, inst.num_alternatives, 6) for _ in range(2)])
    game, _ = build_tournament_game(inst, prof)
    out = backward_induction(game).outcome
    if d_dominance(*prof.points) is DominanceResult.MUTUAL_TIE:
        assert out in prof.points
    else:
        assert out == resolve_tree(inst, prof)


@settings(max_examples=30)
@given(seeds)
def test_four_leaf_composition(seed):
    rng = rng_for(seed)
    inst = random_instance(rng, 4, int(rng.integers(0, 4)))
    prof = ProposalProfile.from_lotteries(inst, [random_lottery(rng, inst.num_alternatives, 6) for _ in range(4)])
    p = prof.proposals
    left, right = resolve_knockout_analytic(p[0], p[1]), resolve_knockout_analytic(p[2], p[3])
    assert resolve_tree(inst, prof) == resolve_knockout_analytic(left, right).point


@settings(max_examples=30)
@given(seeds)
def test_guarantee_with_one_leximin_proposal(seed):
    rng = rng_for(seed)
    inst = random_sized_instance(rng)
    lex = leximin(inst)
    lots = [random_lottery(rng, inst.num_alternatives, 6) for _ in inst.agents]
    lots[int(rng.integers(0, inst.n))] = lex.witness
    out = resolve_tree(inst, ProposalProfile.from_lotteries(inst, lots))
    assert all(o >= u for o, u in zip(out, lex.point))


@settings(max_examples=30)
@given(seeds)
def test_bye_neutrality(seed):
    rng = rng_for(seed)
    inst = random_instance(rng, 4, int(rng.integers(0, 3)))
    prof = ProposalProfile.from_lotteries(inst, [random_lottery(rng, inst.num_alternatives, 6) for _ in range(4)])
    assert resolve_tree(inst, prof) == resolve_tree(inst, prof, build_tree(prof))
    # padding a power-of-two bracket with extra byes at the end changes nothing
    assert resolve_tree(inst, prof, build_tree(prof, slots=8)) == resolve_tree(inst, prof)
