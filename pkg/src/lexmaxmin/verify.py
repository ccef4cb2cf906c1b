"""Property suites run over seeded random instances.

Each suite returns a :class:`SuiteReport`; a suite passes when it records no
failures. The CLI's ``verify`` command and the acceptance tests drive these.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .dominance import (
    DominanceResult,
    OrderResult,
    d_dominance,
    disagreement_projection,
    leximin_compare,
    leximin_greater,
    strictly_d_dominates,
)
from .generate import (
    random_hull_point,
    random_instance,
    random_lottery,
    random_sized_instance,
    random_vector,
    rng_for,
)
from .lp import EQ, GE, LE, Constraint, LinearProgram, LpStatus, solve
from .mechanism import (
    KnockoutConfig,
    Outcome,
    backward_induction,
    build_knockout,
    resolve_knockout_analytic,
)
from .model import BargainingInstance, affine_transform, evaluate, normalize
from .rational import fmt_vector
from .solutions import leximin, leximin_bruteforce_lottery
from .tournament import (
    ProposalProfile,
    bracket,
    build_tournament_game,
    equilibrium_check,
    full_mechanism_spe,
    resolve_tree,
)

SUITES = ("lemma1", "lemma2", "lemma4", "theorem1", "lemma3", "theorem2", "dominance", "lp", "affine")


@dataclass
class SuiteReport:
    suite: str
    seed: int
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, message: str) -> None:
        self.failures.append(message)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "checked": self.checked,
            "failures": list(self.failures),
            "ok": self.ok,
        }

    def summary(self) -> str:
        state = "PASS" if self.ok else "FAIL"
        return f"{self.suite}: {state} ({self.checked} checks, {len(self.failures)} failures)"


def lemma1(seed: int = 0, count: int = 20, grid="1/20", max_alternatives: int = 4, backend=None) -> SuiteReport:
    """No lottery on the grid is leximin-better than the computed optimum."""
    rep = SuiteReport("lemma1", seed)
    rng = rng_for(seed)
    for k in range(count):
        inst = random_sized_instance(rng, max_n=max_alternatives - 1, max_alternatives=max_alternatives)
        u = leximin(inst).point
        best = leximin_bruteforce_lottery(inst, grid, backend=backend)
        rep.checked += 1
        if best is not None and leximin_greater(evaluate(inst, best), u):
            rep.fail(f"instance {k}: grid point {fmt_vector(evaluate(inst, best))} beats u* {fmt_vector(u)}")
    return rep


def lemma2(seed: int = 0, count: int = 200, hull_points: int = 50, max_n: int = 5, max_alternatives: int = 8) -> SuiteReport:
    """The leximin point strictly D-dominates every other feasible point."""
    rep = SuiteReport("lemma2", seed)
    rng = rng_for(seed)
    for k in range(count):
        inst = random_sized_instance(rng, max_n=max_n, max_alternatives=max_alternatives)
        u = leximin(inst).point
        others = list(inst.vertices()) + [random_hull_point(rng, inst)[0] for _ in range(hull_points)]
        for v in others:
            if v == u:
                continue
            rep.checked += 1
            if not strictly_d_dominates(u, v):
                rep.fail(f"instance {k}: u* {fmt_vector(u)} does not strictly D-dominate {fmt_vector(v)}")
    return rep


def random_dominance_pair(rng, inst: BargainingInstance, tries: int = 100):
    """Two random lotteries whose points are in strict D-dominance (either way)."""
    for _ in range(tries):
        a = random_lottery(rng, inst.num_alternatives, scale=6)
        b = random_lottery(rng, inst.num_alternatives, scale=6)
        x, y = Outcome.of(inst, a, "X"), Outcome.of(inst, b, "Y")
        if d_dominance(x.point, y.point) is not DominanceResult.MUTUAL_TIE:
            return x, y
    return None


def knockout_agreement(
    seed: int = 0,
    count: int = 50,
    sizes=(2, 3),
    config: KnockoutConfig | None = None,
    suite: str = "theorem1",
    backend=None,
) -> SuiteReport:
    """Backward induction on the discretized Knockout game versus the analytic winner."""
    rep = SuiteReport(suite, seed)
    rng = rng_for(seed)
    config = config or KnockoutConfig()
    done = 0
    while done < count:
        n = int(sizes[done % len(sizes)])
        inst = random_instance(rng, n, int(rng.integers(0, 3)))
        pair = random_dominance_pair(rng, inst)
        if pair is None:
            continue
        x, y = pair
        done += 1
        game = build_knockout(inst, x, y, config=config)
        spe = backward_induction(game, backend=backend).outcome
        want = resolve_knockout_analytic(x, y).point
        rep.checked += 1
        if spe != want:
            rep.fail(f"n={n}: X={fmt_vector(x.point)} Y={fmt_vector(y.point)} extensive {fmt_vector(spe)} analytic {fmt_vector(want)}")
    return rep


def lemma4(seed: int = 0, count: int = 50, backend=None) -> SuiteReport:
    return knockout_agreement(seed, count, sizes=(2,), suite="lemma4", backend=backend)


def theorem1(seed: int = 0, count: int = 50, backend=None) -> SuiteReport:
    return knockout_agreement(seed, count, sizes=(2, 3), suite="theorem1", backend=backend)


def lemma3(seed: int = 0, count: int = 20, backend=None) -> SuiteReport:
    """Nested games resolve like their analytic tournament.

    Two-agent brackets over a strictly dominating pair are expanded in full
    and solved by backward induction;
    three-agent brackets (one bye) are expanded the same way when every
    pairing is strict; four-proposal brackets check that each internal node's winner is the
    analytic winner of its children's winners.
    """
    rep = SuiteReport("lemma3", seed)
    rng = rng_for(seed)
    for k in range(count):
        inst = random_instance(rng, 2, int(rng.integers(0, 4)))
        pair = None
        while pair is None:
            pair = random_dominance_pair(rng, inst)
        prof = ProposalProfile(pair)
        game, _ = build_tournament_game(inst, prof)
        spe = backward_induction(game, backend=backend).outcome
        want = resolve_tree(inst, prof)
        rep.checked += 1
        if spe != want:
            rep.fail(f"instance {k}: extensive {fmt_vector(spe)} analytic {fmt_vector(want)}")

        # on a mutual tie only membership is meaningful
        lots = [random_lottery(rng, inst.num_alternatives, scale=6) for _ in range(2)]
        tie = ProposalProfile.from_lotteries(inst, lots)
        if d_dominance(*tie.points) is DominanceResult.MUTUAL_TIE:
            game, _ = build_tournament_game(inst, tie)
            spe = backward_induction(game, backend=backend).outcome
            rep.checked += 1
            if spe not in tie.points:
                rep.fail(f"instance {k}: tied game ended at {fmt_vector(spe)}, not a proposal")

        prof3 = _strict_bracket(rng, random_instance(rng, 3, int(rng.integers(0, 3))))
        if prof3 is not None:
            inst3, prof3 = prof3
            game, _ = build_tournament_game(inst3, prof3)
            spe = backward_induction(game, backend=backend).outcome
            rep.checked += 1
            if spe != resolve_tree(inst3, prof3):
                rep.fail(f"instance {k}: three-agent bracket extensive {fmt_vector(spe)} analytic {fmt_vector(resolve_tree(inst3, prof3))}")

        inst4 = random_instance(rng, 4, int(rng.integers(0, 4)))
        lots = [random_lottery(rng, inst4.num_alternatives, scale=6) for _ in range(4)]
        prof4 = ProposalProfile.from_lotteries(inst4, lots)
        br = bracket(inst4, prof4)
        left = resolve_knockout_analytic(prof4.proposals[0], prof4.proposals[1])
        right = resolve_knockout_analytic(prof4.proposals[2], prof4.proposals[3])
        rep.checked += 1
        if br.outcome.point != resolve_knockout_analytic(left, right).point:
            rep.fail(f"instance {k}: four-leaf root does not compose from its subtrees")
    return rep


def _strict_bracket(rng, inst, tries: int = 100):
    """A random one-proposal-per-agent profile whose bracket has no ties."""
    for _ in range(tries):
        prof = ProposalProfile.from_lotteries(
            inst, [random_lottery(rng, inst.num_alternatives, scale=6) for _ in inst.agents]
        )
        if all(e.verdict is not DominanceResult.MUTUAL_TIE for e in bracket(inst, prof).entries):
            return inst, prof
    return None


def theorem2(seed: int = 0, count: int = 100, max_n: int = 5, max_alternatives: int = 8) -> SuiteReport:
    """The tournament returns u*, nobody gains by changing proposal, and any
    profile containing u* guarantees everyone at least their u* component."""
    rep = SuiteReport("theorem2", seed)
    rng = rng_for(seed)
    for k in range(count):
        inst = random_sized_instance(rng, max_n=max_n, max_alternatives=max_alternatives)
        lex = leximin(inst)
        summary = full_mechanism_spe(inst)
        rep.checked += 1
        if summary.outcome != lex.point:
            rep.fail(f"instance {k}: mechanism {fmt_vector(summary.outcome)} u* {fmt_vector(lex.point)}")
        report = equilibrium_check(inst, summary.profile)
        rep.checked += 1
        for d in report.profitable:
            rep.fail(f"instance {k}: agent {d.agent} gains {d.before} -> {d.after} by proposing {fmt_vector(d.proposal.point)}")
        lots = [random_lottery(rng, inst.num_alternatives, scale=6) for _ in inst.agents]
        lots[int(rng.integers(0, inst.n))] = lex.witness
        prof = ProposalProfile.from_lotteries(inst, lots)
        out = resolve_tree(inst, prof)
        rep.checked += 1
        if any(o < u for o, u in zip(out, lex.point)):
            rep.fail(f"instance {k}: profile with u* resolves to {fmt_vector(out)} below u* {fmt_vector(lex.point)}")
    return rep


def dominance(seed: int = 0, count: int = 500) -> SuiteReport:
    """Order and projection laws on random vectors, plus the fixed regression pair."""
    rep = SuiteReport("dominance", seed)
    u = tuple(Fraction(k, 10) for k in (1, 2, 3, 4, 5))
    v = tuple(Fraction(k, 10) for k in (3, 3, 4, 1, 2))
    rep.checked += 1
    if leximin_compare(u, v) is not OrderResult.STRICTLY_GREATER or d_dominance(v, u) is not DominanceResult.FIRST_STRICT:
        rep.fail("regression pair: expected u >_L v and v strictly D-dominating u")
    rng = rng_for(seed)
    for k in range(count):
        n = int(rng.integers(2, 6))
        a, b, c = (random_vector(rng, n) for _ in range(3))
        rep.checked += 1
        if leximin_compare(a, b) is not leximin_compare(b, a).flip():
            rep.fail(f"case {k}: leximin comparison not antisymmetric")
        perm = [int(i) for i in rng.permutation(n)]
        if leximin_compare(a, b) is not leximin_compare([a[i] for i in perm], b):
            rep.fail(f"case {k}: leximin comparison depends on coordinate order")
        if leximin_greater(a, b) and leximin_greater(b, c) and not leximin_greater(a, c):
            rep.fail(f"case {k}: leximin order not transitive")
        pab, pba = disagreement_projection(a, b), disagreement_projection(b, a)
        for i in range(n):
            if a[i] < b[i] and not (pab[i] == a[i] and pba[i] == 1):
                rep.fail(f"case {k}: projection wrong at coordinate {i + 1}")
        d1, d2 = d_dominance(a, b), d_dominance(b, a)
        swapped = {
            DominanceResult.FIRST_STRICT: DominanceResult.SECOND_STRICT,
            DominanceResult.SECOND_STRICT: DominanceResult.FIRST_STRICT,
            DominanceResult.MUTUAL_TIE: DominanceResult.MUTUAL_TIE,
        }
        if swapped[d1] is not d2:
            rep.fail(f"case {k}: D-dominance not antisymmetric")
        if a == b and d1 is not DominanceResult.MUTUAL_TIE:
            rep.fail(f"case {k}: a vector does not tie with itself")
    return rep


# ---------------------------------------------------------------------------
# LP oracle: enumerate basic solutions with exact Gaussian elimination
# ---------------------------------------------------------------------------


def solve_square(rows: list[list[Fraction]], rhs: list[Fraction]):
    """Unique solution of a square system, or ``None`` if it is singular."""
    size = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(size):
        piv = next((r for r in range(col, size) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        for r in range(size):
            if r != col and a[r][col] != 0:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][size] / a[r][r] for r in range(size)]


def vertex_optimum(lp: LinearProgram):
    """Best objective over all basic feasible solutions (bounded programs with
    nonnegative variables only); ``None`` if there are none."""
    if lp.free:
        raise ValueError("vertex enumeration assumes nonnegative variables")
    n = lp.num_vars
    hyper = [(list(c.row), c.bound) for c in lp.constraints]
    hyper += [([Fraction(int(j == k)) for j in range(n)], Fraction(0)) for k in range(n)]
    best = None
    for pick in itertools.combinations(range(len(hyper)), n):
        x = solve_square([hyper[p][0] for p in pick], [hyper[p][1] for p in pick])
        if x is None or any(v < 0 for v in x) or not lp.is_feasible(x):
            continue
        val = lp.value(x)
        if best is None or val > best:
            best = val
    return best


def random_lp(rng, max_vars: int = 6, max_constraints: int = 8) -> LinearProgram:
    n = int(rng.integers(1, max_vars + 1))
    m = int(rng.integers(1, max_constraints + 1))

    def num():
        return Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 5)))

    cons = [Constraint(tuple(Fraction(1) for _ in range(n)), LE, Fraction(int(rng.integers(1, 5))))]
    for _ in range(m - 1):
        rel = (LE, GE, EQ)[int(rng.integers(0, 3))]
        cons.append(Constraint(tuple(num() for _ in range(n)), rel, num()))
    return LinearProgram(tuple(num() for _ in range(n)), tuple(cons), n)


def lp(seed: int = 0, count: int = 300) -> SuiteReport:
    """Simplex optimum and status against vertex enumeration; exact witness feasibility."""
    rep = SuiteReport("lp", seed)
    rng = rng_for(seed)
    for k in range(count):
        prog = random_lp(rng)
        res = solve(prog)
        oracle = vertex_optimum(prog)
        rep.checked += 1
        if oracle is None:
            if res.status is not LpStatus.INFEASIBLE:
                rep.fail(f"program {k}: oracle infeasible, simplex {res.status.value}")
            continue
        if not res.optimal:
            rep.fail(f"program {k}: oracle optimum {oracle}, simplex {res.status.value}")
        elif res.optimum != oracle or not prog.is_feasible(res.witness) or prog.value(res.witness) != res.optimum:
            rep.fail(f"program {k}: simplex {res.optimum} oracle {oracle}")
    return rep


def affine(seed: int = 0, count: int = 50, max_n: int = 5, max_alternatives: int = 8) -> SuiteReport:
    """Positive affine rescaling of raw utilities changes nothing after normalization."""
    rep = SuiteReport("affine", seed)
    rng = rng_for(seed)
    for k in range(count):
        inst = random_sized_instance(rng, max_n=max_n, max_alternatives=max_alternatives)
        scales = [Fraction(int(rng.integers(1, 20)), int(rng.integers(1, 20))) for _ in inst.agents]
        shifts = [Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 20))) for _ in inst.agents]
        raw = affine_transform(inst, scales, shifts)
        back = normalize(raw)
        rep.checked += 1
        if back != inst:
            rep.fail(f"instance {k}: normalization did not undo the transform")
        elif leximin(back).point != leximin(inst).point:
            rep.fail(f"instance {k}: u* changed under the transform")
    return rep


RUNNERS: dict[str, Callable[..., SuiteReport]] = {
    "lemma1": lemma1,
    "lemma2": lemma2,
    "lemma4": lemma4,
    "theorem1": theorem1,
    "lemma3": lemma3,
    "theorem2": theorem2,
    "dominance": dominance,
    "lp": lp,
    "affine": affine,
}


def run_suite(name: str, seed: int = 0, count: int | None = None, **kwargs) -> SuiteReport:
    if name not in RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if count is not None:
        kwargs["count"] = count
    return RUNNERS[name](seed=seed, **kwargs)
