"""Time the numba and pure-numpy paths of the two hot kernels.

    python benchmarks/bench_kernels.py [--repeat 5] [--grid-k 25] [--extra-bids 2]

Backward induction runs on a flattened three-agent Knockout game and on the
whole three-agent mechanism (proposal round plus nested Knockout games) for
the bundled example1 instance; the grid kernel scans every lottery with
weights in multiples of 1/k. Each backend is
warmed up once (numba compiles on first call) and then timed; results from
both backends are checked to be identical.
"""
import argparse
import time
from fractions import Fraction

import numpy as np

from lexmaxmin import _kernels
from lexmaxmin.generate import random_instance, rng_for
from lexmaxmin.mechanism import BidVector, KnockoutConfig, build_knockout, flatten
from lexmaxmin.serialization import load_shipped
from lexmaxmin.solutions import leximin
from lexmaxmin.tournament import build_mechanism_game, default_deviations
from lexmaxmin.verify import random_dominance_pair


def best_of(fn, repeat):
    fn()  # warm-up / compile
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def time_backends(game, repeat):
    flat = flatten(game)
    args = (flat.player, flat.child_ptr, flat.child_idx, flat.ranks, flat.height)
    rows = {}
    for backend in ("numba", "numpy"):
        rows[backend] = best_of(lambda: _kernels.backward_induction(*args, backend=backend), repeat)
    same = all(np.array_equal(a, b) for a, b in zip(rows["numba"][1], rows["numpy"][1]))
    return len(flat.nodes), rows, same


def bench_mechanism(repeat):
    inst = load_shipped("example1")
    game = build_mechanism_game(inst, default_deviations(inst, leximin(inst).witness))
    return time_backends(game, repeat)


def bench_backward_induction(repeat, extra_bids, seed):
    rng = rng_for(seed)
    inst = random_instance(rng, 3, 3)
    x, y = random_dominance_pair(rng, inst)
    extra = {
        i: tuple(BidVector(tuple(Fraction(int(rng.integers(0, 6)), 5) if j != i else 1 for j in (1, 2, 3)))
                 for _ in range(extra_bids))
        for i in (1, 2, 3)
    }
    game = build_knockout(inst, x, y, config=KnockoutConfig(bid_candidates=extra))
    return time_backends(game, repeat)


def bench_grid(repeat, k, seed):
    rng = np.random.default_rng(seed)
    utils = rng.integers(0, 100, (4, 7)).astype(np.int64)
    floor = np.zeros(4, np.int64)
    rows = {}
    for backend in ("numba", "numpy"):
        rows[backend] = best_of(lambda: _kernels.grid_leximin(utils, floor, k, backend=backend), repeat)
    a, b = rows["numba"][1], rows["numpy"][1]
    return _kernels.grid_size(k, 7), rows, a[0] == b[0] and np.array_equal(a[1], b[1])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--grid-k", type=int, default=25)
    parser.add_argument("--extra-bids", type=int, default=2)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    report("backward induction, Knockout game", "nodes", *bench_backward_induction(args.repeat, args.extra_bids, args.seed))
    report("backward induction, whole mechanism", "nodes", *bench_mechanism(args.repeat))
    report("lottery grid", "lotteries", *bench_grid(args.repeat, args.grid_k, args.seed))


def report(title, unit, size, rows, same):
    print(f"{title}, {size} {unit}")
    for backend, (t, _) in rows.items():
        print(f"  {backend:6s} {t * 1e3:9.3f} ms")
    print(f"  speedup {rows['numpy'][0] / rows['numba'][0]:.1f}x, identical: {same}")


if __name__ == "__main__":
    main()
