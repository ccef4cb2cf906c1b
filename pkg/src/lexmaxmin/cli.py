"""Command-line front end.

Exit codes: 0 ok, 2 malformed input, 3 assumption failure, 4 budget
exceeded, 5 verification failure or divergence.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import verify as verify_mod
from .dominance import DominanceResult, OrderResult, d_dominance, disagreement_projection, leximin_compare
from .errors import AssumptionViolation, BudgetExceeded, DimensionMismatch, MalformedInstance
from .generate import generate
from .mechanism import (
    DEFAULT_NODE_BUDGET,
    KnockoutConfig,
    Outcome,
    backward_induction,
    build_knockout,
    resolve_knockout_analytic,
)
from .model import Lottery, assumption_failures, check_normalized, normalize
from .rational import fmt_vector, parse_rational, parse_vector
from .serialization import dumps, resolve_path, shipped_names
from .solutions import ks_solution, leximin
from .tournament import ProposalProfile, bracket, build_tournament_game, default_deviations, equilibrium_check

EXIT_OK = 0
EXIT_MALFORMED = 2
EXIT_ASSUMPTION = 3
EXIT_BUDGET = 4
EXIT_VERIFY = 5

MAX_EXTENSIVE_AGENTS = 3


def _vec(point) -> list[str]:
    return [str(Fraction(x)) for x in point]


def _emit(args, lines, payload) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _load(args, *, need_assumption=False):
    inst = resolve_path(args.instance)
    if not inst.normalized:
        if check_normalized(inst):
            inst = replace(inst, normalized=True)
        else:
            inst = normalize(inst)
            print("notice: utilities rescaled so that disagreement = 0 and each agent's maximum = 1", file=sys.stderr)
    if need_assumption:
        bad = assumption_failures(inst)
        if bad:
            raise AssumptionViolation(f"agents {bad} have a favourite lottery that gives someone else a gain")
    return inst


def _parse_outcome(inst, token: str, lex_witness=None) -> Outcome:
    """An alternative name, ``u*`` for the leximin lottery, or a weight vector."""
    token = token.strip()
    if token in ("u*", "leximin"):
        witness = lex_witness if lex_witness is not None else leximin(inst).witness
        return Outcome.of(inst, witness, "u*")
    if token in inst.alternatives:
        return Outcome.of(inst, inst.point_mass(token), token)
    weights = parse_vector(token)
    if len(weights) != inst.num_alternatives:
        raise DimensionMismatch(f"lottery {token!r} needs {inst.num_alternatives} weights")
    return Outcome.of(inst, Lottery(weights), token)


def _config(args) -> KnockoutConfig:
    return KnockoutConfig(node_budget=args.budget or DEFAULT_NODE_BUDGET)


def _check_extensive(inst):
    if inst.n > MAX_EXTENSIVE_AGENTS:
        raise MalformedInstance(f"--extensive supports at most {MAX_EXTENSIVE_AGENTS} agents, instance has {inst.n}")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    inst = _load(args)
    res = leximin(inst)
    lines = [f"u* = {fmt_vector(res.point)}", f"lottery = {fmt_vector(res.witness.weights)}"]
    lines += [f"agent {i} frozen at {v}" for i, v in res.freeze_order]
    _emit(args, lines, {
        "leximin": _vec(res.point),
        "lottery": _vec(res.witness.weights),
        "freeze_order": [[i, str(v)] for i, v in res.freeze_order],
    })
    return EXIT_OK


def cmd_ks(args) -> int:
    inst = _load(args)
    point, witness = ks_solution(inst)
    _emit(args, [f"ks = {fmt_vector(point)}", f"lottery = {fmt_vector(witness.weights)}"],
          {"ks": _vec(point), "lottery": _vec(witness.weights)})
    return EXIT_OK


def cmd_normalize(args) -> int:
    inst = normalize(resolve_path(args.instance))
    text = dumps(inst)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check_assumption(args) -> int:
    inst = _load(args)
    bad = assumption_failures(inst)
    if bad:
        lines = [f"assumption fails: agent {i} has a favourite lottery that gives another agent a gain" for i in bad]
    else:
        lines = ["assumption holds: every favourite lottery leaves the others at 0"]
    _emit(args, lines, {"holds": not bad, "failing_agents": bad})
    return EXIT_ASSUMPTION if bad else EXIT_OK


_ORDER_TEXT = {
    OrderResult.STRICTLY_GREATER: "u ≻_L v",
    OrderResult.STRICTLY_LESS: "v ≻_L u",
    OrderResult.EQUIVALENT: "equivalent",
}
_DOM_TEXT = {
    DominanceResult.FIRST_STRICT: "u strictly D-dominates v",
    DominanceResult.SECOND_STRICT: "v strictly D-dominates u",
    DominanceResult.MUTUAL_TIE: "mutual tie",
}


def cmd_compare(args) -> int:
    if args.pair:
        path = Path(args.pair)
        if path.exists():
            data = json.loads(path.read_text())
        else:
            from .serialization import shipped

            data = json.loads(shipped(args.pair))
        u = tuple(parse_rational(x, field="u") for x in data["u"])
        v = tuple(parse_rational(x, field="v") for x in data["v"])
    elif args.u and args.v:
        u, v = parse_vector(args.u), parse_vector(args.v)
    else:
        raise MalformedInstance("give two vectors or --pair FILE")
    order = leximin_compare(u, v)
    dom = d_dominance(u, v)
    puv, pvu = disagreement_projection(u, v), disagreement_projection(v, u)
    detail_order = "equivalent under leximin order" if order is OrderResult.EQUIVALENT else _ORDER_TEXT[order]
    detail_dom = "mutual D-dominance tie" if dom is DominanceResult.MUTUAL_TIE else _DOM_TEXT[dom]
    lines = [
        f"{_ORDER_TEXT[order]}; {_DOM_TEXT[dom]}",
        f"leximin order: {detail_order}",
        f"D-dominance: {detail_dom}",
        f"π(u,v) = {fmt_vector(puv)}",
        f"π(v,u) = {fmt_vector(pvu)}",
    ]
    _emit(args, lines, {
        "u": _vec(u),
        "v": _vec(v),
        "leximin_order": order.name.lower(),
        "d_dominance": dom.name.lower(),
        "projection_uv": _vec(puv),
        "projection_vu": _vec(pvu),
    })
    return EXIT_OK


def _agreement_lines(analytic, extensive, nodes):
    agree = analytic == extensive
    lines = [
        f"extensive outcome: {fmt_vector(extensive)} ({nodes} nodes)",
        "analytic = extensive: agree" if agree else "analytic = extensive: DIVERGE",
    ]
    return agree, lines


def cmd_knockout(args) -> int:
    inst = _load(args, need_assumption=True)
    lex = leximin(inst).witness
    x = _parse_outcome(inst, args.x, lex)
    y = _parse_outcome(inst, args.y or inst.alternatives[_ideal_index(inst, 1)], lex)
    winner = resolve_knockout_analytic(x, y)
    verdict = d_dominance(x.point, y.point)
    lines = [
        f"X = {x.label} {fmt_vector(x.point)}",
        f"Y = {y.label} {fmt_vector(y.point)}",
        f"D-dominance: {verdict.value}",
        f"analytic outcome: {winner.label} {fmt_vector(winner.point)}",
    ]
    payload = {"x": _vec(x.point), "y": _vec(y.point), "d_dominance": verdict.name.lower(), "analytic": _vec(winner.point)}
    code = EXIT_OK
    if args.extensive:
        _check_extensive(inst)
        game = build_knockout(inst, x, y, config=_config(args))
        spe = backward_induction(game)
        agree, more = _agreement_lines(winner.point, spe.outcome, spe.nodes)
        lines += more
        if args.trace:
            lines += [f"  player {p}: {label} -> {action}" for p, label, action in spe.trace]
        payload.update(extensive=_vec(spe.outcome), nodes=spe.nodes, agree=agree)
        code = EXIT_OK if agree else EXIT_VERIFY
    _emit(args, lines, payload)
    return code


def _profile(inst, args, lex_witness) -> ProposalProfile:
    tokens = args.propose or ["u*"] * inst.n
    if len(tokens) != inst.n:
        raise DimensionMismatch(f"need {inst.n} proposals, got {len(tokens)}")
    return ProposalProfile(tuple(_parse_outcome(inst, t, lex_witness) for t in tokens))


def cmd_tree(args) -> int:
    inst = _load(args, need_assumption=True)
    lex = leximin(inst)
    prof = _profile(inst, args, lex.witness)
    br = bracket(inst, prof)
    lines = br.report().splitlines()
    payload = {
        "outcome": _vec(br.outcome.point),
        "leximin": _vec(lex.point),
        "bracket": [
            {
                "leaves": list(e.leaves),
                "left": None if e.left is None else _vec(e.left.point),
                "right": None if e.right is None else _vec(e.right.point),
                "verdict": None if e.verdict is None else e.verdict.name.lower(),
                "winner": _vec(e.winner.point),
            }
            for e in br.entries
        ],
    }
    code = EXIT_OK
    if args.extensive:
        _check_extensive(inst)
        game, _ = build_tournament_game(inst, prof, _config(args))
        spe = backward_induction(game)
        agree, more = _agreement_lines(br.outcome.point, spe.outcome, spe.nodes)
        lines += more
        payload.update(extensive=_vec(spe.outcome), nodes=spe.nodes, agree=agree)
        code = EXIT_OK if agree else EXIT_VERIFY
    _emit(args, lines, payload)
    return code


def cmd_equilibrium(args) -> int:
    inst = _load(args, need_assumption=True)
    lex = leximin(inst)
    prof = _profile(inst, args, lex.witness)
    if args.deviation:
        devs = [_parse_outcome(inst, t, lex.witness) for t in args.deviation]
    else:
        devs = default_deviations(inst, lex.witness)
    rep = equilibrium_check(inst, prof, devs)
    lines = [f"outcome = {fmt_vector(rep.outcome)}", f"u* = {fmt_vector(rep.leximin_point)}"]
    if rep.profitable:
        for d in rep.profitable:
            lines.append(f"agent {d.agent} gains {d.before} -> {d.after} by proposing {_label(d.proposal)}")
    else:
        lines.append(f"no profitable deviations ({rep.checked} checked)")
    if rep.guarantee_violations:
        lines.append(f"agents below their u* component: {list(rep.guarantee_violations)}")
    _emit(args, lines, {
        "outcome": _vec(rep.outcome),
        "leximin": _vec(rep.leximin_point),
        "checked": rep.checked,
        "profitable": [
            {"agent": d.agent, "proposal": _vec(d.proposal.point), "before": str(d.before), "after": str(d.after)}
            for d in rep.profitable
        ],
        "below_leximin": list(rep.guarantee_violations),
    })
    return EXIT_OK


def _label(o: Outcome) -> str:
    return f"{o.label} {fmt_vector(o.point)}" if o.label else fmt_vector(o.point)


def cmd_gen(args) -> int:
    text = dumps(generate(args.seed, args.agents, args.extras))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    kwargs = {}
    if args.grid is not None:
        if args.suite != "lemma1":
            raise MalformedInstance("--grid only applies to the lemma1 suite")
        kwargs["grid"] = args.grid
    if args.budget and args.suite in ("lemma4", "theorem1"):
        kwargs["config"] = KnockoutConfig(node_budget=args.budget)
        kwargs["sizes"] = (2,) if args.suite == "lemma4" else (2, 3)
        rep = verify_mod.knockout_agreement(seed=args.seed, count=args.count or 50, suite=args.suite, **kwargs)
    else:
        rep = verify_mod.run_suite(args.suite, seed=args.seed, count=args.count, **kwargs)
    lines = [rep.summary()] + [f"  {f}" for f in rep.failures]
    _emit(args, lines, rep.to_dict())
    return EXIT_OK if rep.ok else EXIT_VERIFY


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text", help="output format")
    common.add_argument("--budget", type=int, default=None, help="node budget for game construction")

    parser = argparse.ArgumentParser(
        prog="lexmaxmin",
        description="Exact leximin bargaining solutions, D-dominance and the Knockout mechanisms.",
        epilog="Bundled instances: " + ", ".join(shipped_names()),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_instance(name, help_text, fn):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("instance", help="instance JSON file or bundled instance name")
        p.set_defaults(func=fn)
        return p

    with_instance("solve", "leximin point and a witness lottery", cmd_solve)
    with_instance("ks", "Kalai-Smorodinsky point", cmd_ks)
    p = with_instance("normalize", "rescale to disagreement 0 and maxima 1", cmd_normalize)
    p.add_argument("-o", "--output", help="write the instance here instead of stdout")
    with_instance("check-assumption", "check that favourite lotteries leave the others at 0", cmd_check_assumption)

    p = sub.add_parser("compare", parents=[common], help="leximin order and D-dominance of two vectors")
    p.add_argument("u", nargs="?", help='vector such as "(1/10, 1/5)"')
    p.add_argument("v", nargs="?")
    p.add_argument("--pair", help='JSON file (or bundled name) with "u" and "v" lists')
    p.set_defaults(func=cmd_compare)

    p = with_instance("knockout", "resolve one Knockout game", cmd_knockout)
    p.add_argument("--x", default="u*", help="alternative name, u*, or weight vector (default u*)")
    p.add_argument("--y", default=None, help="as --x (default: agent 1's ideal alternative)")
    p.add_argument("--extensive", action="store_true", help="also solve the discretized game by backward induction")
    p.add_argument("--trace", action="store_true", help="print the equilibrium path (with --extensive)")

    for name, fn, text in (
        ("tree", cmd_tree, "resolve the tournament of Knockout games"),
        ("equilibrium", cmd_equilibrium, "search for profitable unilateral proposal changes"),
    ):
        p = with_instance(name, text, fn)
        p.add_argument("--propose", action="append", metavar="OUTCOME",
                       help="one per agent in order: alternative name, u*, or weight vector (default all u*)")
        if name == "tree":
            p.add_argument("--extensive", action="store_true", help="also solve the nested game by backward induction")
        else:
            p.add_argument("--deviation", action="append", metavar="OUTCOME",
                           help="candidate proposal to try (default: every alternative and u*)")

    p = sub.add_parser("gen", parents=[common], help="random instance satisfying the assumption")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-n", "--agents", type=int, required=True)
    p.add_argument("--extras", type=int, default=0, help="random alternatives beyond the forced ones")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", parents=[common], help="run a property suite on generated instances")
    p.add_argument("suite", choices=verify_mod.SUITES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=None, help="instances to generate (suite default otherwise)")
    p.add_argument("--grid", default=None, help="lottery grid step 1/k for lemma1 (default 1/20)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "budget", None) is not None and args.budget <= 0:
        parser.error("--budget must be positive")
    try:
        return args.func(args)
    except AssumptionViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (MalformedInstance, DimensionMismatch, ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


def _ideal_index(inst, agent: int) -> int:
    """First alternative worth 1 to ``agent`` (normalized instances)."""
    row = inst.row(agent)
    return max(range(inst.num_alternatives), key=lambda a: (row[a], -a))


if __name__ == "__main__":
    sys.exit(main())
