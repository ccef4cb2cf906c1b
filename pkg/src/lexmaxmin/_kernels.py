"""Hot loops on integer encodings, with a numba path and a pure-numpy path.

The exact core works on Fractions, which numba cannot touch. The two loops
that dominate runtime are re-expressed on integers without losing exactness:

* backward induction only ever compares one player's payoffs with each other,
  so payoffs are replaced by per-player ordinal ranks;
* the lottery-grid oracle scales the utility matrix by a common denominator
  and the grid by its step, so every expected utility is an int64.

Set ``LEXMAXMIN_DISABLE_NUMBA=1`` to force the numpy path. Both paths return
bit-identical results; tests and ``benchmarks/bench_kernels.py`` compare them.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


def _env_disabled() -> bool:
    return os.environ.get("LEXMAXMIN_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


def default_backend() -> str:
    return "numba" if HAVE_NUMBA and not _env_disabled() else "numpy"


def _pick(backend):
    backend = backend or default_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    return backend


# ---------------------------------------------------------------------------
# Backward induction on a flattened game DAG
# ---------------------------------------------------------------------------
# Nodes are numbered so that every child precedes its parents. ``player`` is
# the 0-based mover, or -1 for a terminal. Children of node v are
# child_idx[child_ptr[v]:child_ptr[v + 1]]. ``ranks[v, i]`` is the ordinal
# position of terminal v's payoff among all terminal payoffs of player i.


@njit(cache=True)
def _bi_numba(player, child_ptr, child_idx, ranks):
    n_nodes = player.shape[0]
    choice = np.full(n_nodes, -1, np.int64)
    leaf = np.empty(n_nodes, np.int64)
    for v in range(n_nodes):
        p = player[v]
        if p < 0:
            leaf[v] = v
            continue
        start = child_ptr[v]
        best = 0
        best_rank = -1
        for k in range(start, child_ptr[v + 1]):
            r = ranks[leaf[child_idx[k]], p]
            # strict '>' keeps the lowest action index on ties
            if r > best_rank:
                best_rank = r
                best = k - start
        choice[v] = best
        leaf[v] = leaf[child_idx[start + best]]
    return choice, leaf


def _bi_numpy(player, child_ptr, child_idx, ranks, height):
    n_nodes = player.shape[0]
    choice = np.full(n_nodes, -1, np.int64)
    leaf = np.where(player < 0, np.arange(n_nodes), -1).astype(np.int64)
    if n_nodes == 0:
        return choice, leaf
    for h in range(1, int(height.max()) + 1):
        nodes = np.flatnonzero(height == h)
        if nodes.size == 0:
            continue
        starts = child_ptr[nodes]
        deg = child_ptr[nodes + 1] - starts
        offs = np.arange(int(deg.max()))
        valid = offs[None, :] < deg[:, None]
        kids = child_idx[np.where(valid, starts[:, None] + offs[None, :], 0)]
        kid_leaf = leaf[kids]
        vals = ranks[kid_leaf, player[nodes][:, None]]
        vals = np.where(valid, vals, -1)
        best = vals.argmax(axis=1)  # first maximum, i.e. lowest action index
        choice[nodes] = best
        leaf[nodes] = kid_leaf[np.arange(nodes.size), best]
    return choice, leaf


def backward_induction(player, child_ptr, child_idx, ranks, height, backend=None):
    """Return ``(choice, leaf)``: chosen action and reached terminal per node."""
    if _pick(backend) == "numba":
        return _bi_numba(player, child_ptr, child_idx, ranks)
    return _bi_numpy(player, child_ptr, child_idx, ranks, height)


# ---------------------------------------------------------------------------
# Leximin maximum over the lottery grid {w / k : w in N^m, sum w = k}
# ---------------------------------------------------------------------------


def grid_size(k: int, m: int) -> int:
    from math import comb

    return comb(k + m - 1, m - 1)


@njit(cache=True)
def _grid_numba(utils, floor, k):
    n, m = utils.shape
    w = np.zeros(m, np.int64)
    w[m - 1] = k
    best_w = np.zeros(m, np.int64)
    best = np.zeros(n, np.int64)
    found = False
    vals = np.empty(n, np.int64)
    while True:
        ok = True
        for i in range(n):
            acc = 0
            for a in range(m):
                acc += utils[i, a] * w[a]
            vals[i] = acc
            if acc < floor[i]:
                ok = False
        if ok:
            s = np.sort(vals)
            better = not found
            if found:
                for i in range(n):
                    if s[i] != best[i]:
                        better = s[i] > best[i]
                        break
            if better:
                best[:] = s
                best_w[:] = w
                found = True
        # next composition in lexicographic order
        p = m - 1
        while p >= 1 and w[p] == 0:
            p -= 1
        if p == 0:
            break
        r = w[p] - 1
        w[p] = 0
        w[p - 1] += 1
        w[m - 1] += r
    return found, best_w


def compositions(k: int, m: int) -> np.ndarray:
    """All ``w`` in ``N^m`` with ``sum(w) == k``, in lexicographic order."""
    # table[j] holds the compositions of j into the current number of parts
    table = [np.array([[j]], dtype=np.int64) for j in range(k + 1)]
    for parts in range(2, m + 1):
        nxt = []
        for total in range(k + 1):
            blocks = []
            for first in range(total + 1):
                tail = table[total - first]
                block = np.empty((tail.shape[0], parts), dtype=np.int64)
                block[:, 0] = first
                block[:, 1:] = tail
                blocks.append(block)
            nxt.append(np.concatenate(blocks))
        table = nxt
    return table[k]


def _grid_numpy(utils, floor, k):
    m = utils.shape[1]
    w = compositions(k, m)
    vals = w @ utils.T
    ok = np.all(vals >= floor[None, :], axis=1)
    if not ok.any():
        return False, np.zeros(m, np.int64)
    cand = np.flatnonzero(ok)
    srt = np.sort(vals[cand], axis=1)
    order = np.lexsort(srt.T[::-1])
    top = srt[order[-1]]
    first = cand[np.flatnonzero(np.all(srt == top, axis=1))[0]]
    return True, w[first]


def grid_leximin(utils, floor, k, backend=None):
    """Leximin-greatest grid lottery whose utilities are all ``>= floor``.

    ``utils`` is an int64 ``n x m`` matrix and ``floor`` an int64 vector, both
    already scaled so that ``utils @ w`` with ``sum(w) == k`` is comparable
    with ``floor``. Ties keep the first lottery in lexicographic order.
    Returns ``(found, weights)``.
    """
    utils = np.ascontiguousarray(utils, dtype=np.int64)
    floor = np.ascontiguousarray(floor, dtype=np.int64)
    if _pick(backend) == "numba":
        return _grid_numba(utils, floor, int(k))
    return _grid_numpy(utils, floor, int(k))
