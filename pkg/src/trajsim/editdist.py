"""Edit distances on symbol trajectories.

Three measures live here: the unit-cost insert/delete distance, the
metric-based distance whose operation costs are geometric detours
(``INS(x, y, z) = DEL(x, y, z) = d(x, z) + d(y, z) - d(x, y)``), and its
insertion-first restriction.

Both strings are framed by two endpoint markers ``S`` and ``T`` that sit
infinitely far from every location.  Their infinite parts always cancel,
so the code treats them as points at distance zero and keeps the single
non-cancelling case (``S`` and ``T`` adjacent, i.e. an empty string)
infinite.

A useful identity: every operation changes the string's path length
``L`` (sum of consecutive distances, ignoring edges to ``S``/``T``) by
exactly its cost.
"""

from __future__ import annotations

import heapq
import itertools
import math
from typing import Iterable, Sequence

import numpy as np

from . import _backend
from .core import LocationMetric, SizeGuardError, SymbolTrajectory, ValidationError

__all__ = [
    "S",
    "T",
    "EditCostModel",
    "PaddedString",
    "plain_edit_distance",
    "seq_delete_cost",
    "metric_edit_distance",
    "insertion_first_edit_distance",
    "edit_graph_distance",
    "DEFAULT_SIZE_CAP",
]

DEFAULT_SIZE_CAP = 12


class _Endpoint:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __repr__(self) -> str:
        return self.name


S = _Endpoint("S")
T = _Endpoint("T")


def _is_end(x) -> bool:
    return x is S or x is T


class EditCostModel:
    """Geometric insertion/deletion costs over a :class:`LocationMetric`."""

    def __init__(self, metric: LocationMetric):
        self.metric = metric

    def d(self, x, y) -> float:
        if _is_end(x) or _is_end(y):
            return 0.0
        return self.metric.d(x, y)

    def ins(self, x, y, z) -> float:
        """Cost of inserting ``z`` between neighbours ``x`` and ``y``."""
        if x is S and y is T:
            return math.inf
        return self.d(x, z) + self.d(y, z) - self.d(x, y)

    # deletion removes the same detour
    delete = ins

    def path_length(self, seq: Sequence) -> float:
        return sum(self.d(p, q) for p, q in zip(seq, seq[1:]))


class PaddedString(tuple):
    """``S``, the symbols, ``T``."""

    def __new__(cls, symbols: Iterable[str]):
        body = tuple(symbols)
        if any(_is_end(x) for x in body):
            raise ValidationError("endpoint markers cannot appear inside a string")
        return super().__new__(cls, (S, *body, T))

    @property
    def body(self) -> tuple:
        return tuple(self[1:-1])


def _symbols(x) -> tuple[str, ...]:
    if isinstance(x, SymbolTrajectory):
        return x.symbols
    if isinstance(x, str):
        return tuple(x)
    return tuple(x)


def plain_edit_distance(A, B) -> int:
    """Fewest unit-cost insertions and deletions turning ``A`` into ``B``."""
    a, b = _symbols(A), _symbols(B)
    prev = list(range(len(b) + 1))
    for i in range(1, len(a) + 1):
        cur = [i] + [0] * len(b)
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                cur[j] = prev[j - 1]
            else:
                cur[j] = 1 + min(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def seq_delete_cost(x, y, seq: Sequence, m: LocationMetric) -> float:
    """Total cost of deleting ``seq`` from between ``x`` and ``y``; order-free.

    Equals the path length of ``x, *seq, y`` minus ``d(x, y)``.  ``x`` and
    ``y`` may be the endpoint markers :data:`S` and :data:`T`.
    """
    model = EditCostModel(m)
    seq = tuple(seq)
    if x is S and y is T and seq:
        return math.inf
    return model.path_length((x, *seq, y)) - model.d(x, y)


def _check(A, B, m: LocationMetric):
    a, b = _symbols(A), _symbols(B)
    if not a or not b:
        raise ValidationError("strings must be nonempty")
    for s in (*a, *b):
        if s not in m:
            raise ValidationError(f"symbol {s!r} not in metric alphabet")
    return a, b


def metric_edit_distance(A, B, m: LocationMetric, cap: int = DEFAULT_SIZE_CAP,
                         backend: str | None = None) -> float:
    """Metric-based edit distance allowing any interleaving of operations.

    Runs the four-index interval DP in ``O(n^3 m^3 (n + m))``; inputs longer
    than ``cap`` symbols are refused with :class:`SizeGuardError`.
    """
    a, b = _check(A, B, m)
    if max(len(a), len(b)) > cap:
        raise SizeGuardError(
            f"metric edit distance on lengths {len(a)} and {len(b)} exceeds the cap of {cap}; "
            f"the exact DP costs O(n^3 m^3 (n+m)) time and O(n^2 m^2) memory"
        )
    if a == b:
        return 0.0
    L = len(m)
    dd = np.zeros((L + 2, L + 2))
    dd[:L, :L] = m.matrix
    s_idx, t_idx = L, L + 1
    pa = np.concatenate([[s_idx], m.encode(a), [t_idx]]).astype(np.intp)
    pb = np.concatenate([[s_idx], m.encode(b), [t_idx]]).astype(np.intp)
    # the kernel edits its third argument into its second: A into B
    return float(_backend.get(backend).metric_edit_dp(dd, pb, pa, s_idx, t_idx))


def insertion_first_edit_distance(A, B, m: LocationMetric) -> float:
    """Edit distance when every insertion precedes every deletion.

    After inserting all of ``A`` into ``B`` the string is some merge ``I``
    of the two; the insert phase costs ``L(I) - L(B)`` and the delete phase
    ``L(I) - L(A)``.  An ``O(nm)`` DP finds the shortest merge.
    """
    a, b = _check(A, B, m)
    n, k = len(a), len(b)
    d = m.d
    inf = math.inf
    # F[i][j][s]: shortest merge of a[:i], b[:j] ending with a (s=0) or b (s=1)
    F = [[[inf, inf] for _ in range(k + 1)] for _ in range(n + 1)]
    F[1][0][0] = 0.0
    F[0][1][1] = 0.0
    for i in range(n + 1):
        for j in range(k + 1):
            for s in (0, 1):
                cur = F[i][j][s]
                if cur == inf:
                    continue
                last = a[i - 1] if s == 0 else b[j - 1]
                if i < n:
                    v = cur + d(last, a[i])
                    if v < F[i + 1][j][0]:
                        F[i + 1][j][0] = v
                if j < k:
                    v = cur + d(last, b[j])
                    if v < F[i][j + 1][1]:
                        F[i][j + 1][1] = v
    model = EditCostModel(m)
    best = min(F[n][k])
    return 2.0 * best - model.path_length(a) - model.path_length(b)


def edit_graph_distance(A, B, m: LocationMetric, unrestricted: bool = False,
                        max_len: int | None = None) -> float:
    """Least-cost edit sequence by Dijkstra over the edit graph.

    ``A`` is edited into ``B``.  By default every state is an
    order-preserving interleaving of a subsequence of ``A`` (not yet
    deleted) with a subsequence of ``B`` (already inserted); each character
    of ``A`` is deleted at most once and each character of ``B`` inserted
    at most once.  With ``unrestricted``
    the states are arbitrary strings over the alphabet of length at most
    ``max_len`` (default ``len(A) + len(B) + 1``) and any symbol may be
    inserted or deleted anywhere.
    """
    # internally ``b`` is the source and ``a`` the target
    b, a = _check(A, B, m)
    model = EditCostModel(m)
    if unrestricted:
        return _dijkstra_free(a, b, model, max_len or len(a) + len(b) + 1)
    start = tuple(("b", j) for j in range(len(b)))
    goal = tuple(("a", i) for i in range(len(a)))

    def sym(tag):
        return a[tag[1]] if tag[0] == "a" else b[tag[1]]

    def moves(state):
        padded = (S, *map(sym, state), T)
        for pos, tag in enumerate(state):
            if tag[0] == "b":
                cost = model.delete(padded[pos], padded[pos + 2], padded[pos + 1])
                yield cost, state[:pos] + state[pos + 1:]
        present = {t[1] for t in state if t[0] == "a"}
        for i in range(len(a)):
            if i in present:
                continue
            # between the nearest inserted A characters on either side
            left = max((p + 1 for p, t in enumerate(state) if t[0] == "a" and t[1] < i), default=0)
            right = min((p for p, t in enumerate(state) if t[0] == "a" and t[1] > i), default=len(state))
            for pos in range(left, right + 1):
                cost = model.ins(padded[pos], padded[pos + 1], a[i])
                yield cost, state[:pos] + (("a", i),) + state[pos:]

    return _dijkstra(start, goal, moves)


def _dijkstra_free(a, b, model: EditCostModel, max_len: int) -> float:
    alphabet = model.metric.symbols

    def moves(state):
        padded = (S, *state, T)
        for pos in range(len(state)):
            yield model.delete(padded[pos], padded[pos + 2], padded[pos + 1]), state[:pos] + state[pos + 1:]
        if len(state) < max_len:
            for pos in range(len(state) + 1):
                for z in alphabet:
                    yield model.ins(padded[pos], padded[pos + 1], z), state[:pos] + (z,) + state[pos:]

    return _dijkstra(tuple(b), tuple(a), moves)


def _dijkstra(start, goal, moves) -> float:
    dist = {start: 0.0}
    tie = itertools.count()
    heap = [(0.0, next(tie), start)]
    while heap:
        du, _, u = heapq.heappop(heap)
        if u == goal:
            return du
        if du > dist[u]:
            continue
        for cost, v in moves(u):
            if cost == math.inf:
                continue
            nv = du + max(cost, 0.0)
            if nv < dist.get(v, math.inf):
                dist[v] = nv
                heapq.heappush(heap, (nv, next(tie), v))
    return math.inf
