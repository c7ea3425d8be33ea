"""Hardness-reduction gadgets and their empirical verifiers.

* Orthogonal Vectors to discrete Fréchet: two planar point sequences whose
  discrete Fréchet distance is at most 1 when an orthogonal pair exists and
  at least 1.61 otherwise.
* 3SAT to k-gather: a strip of 4n cells whose faces are the alphabet of the
  symbol trajectories; satisfying assignments give clusterings of edit
  radius 5.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import LocationMetric, ParseError, PolyCurve, SizeGuardError, SymbolTrajectory, ValidationError
from .editdist import metric_edit_distance, plain_edit_distance
from .frechet import discrete_frechet
from .kgather import Cluster, Clustering, DistanceMatrix
from .shingles import jaccard_distance

__all__ = [
    "GADGET_POINTS",
    "OVInstance",
    "random_ov_instance",
    "build_ov_curves",
    "verify_ov_gadget",
    "gadget_distance_claims",
    "check_parallel_coupling",
    "CNFFormula",
    "parse_dimacs",
    "random_formula",
    "SatGadget",
    "build_sat_gadget",
    "satisfying_assignments",
    "forward_clustering",
    "verify_sat_gadget",
    "OV_DP_GUARD",
]

GADGET_POINTS: dict[str, tuple[float, float]] = {
    "b0o": (0.0, 1.61),
    "b0e": (0.0, -1.61),
    "b1o": (-1.305, 0.66),
    "b1e": (-1.305, -0.66),
    "a0o": (-0.305, 0.66),
    "a0e": (-0.305, -0.66),
    "a1o": (0.305, 0.66),
    "a1e": (0.305, -0.66),
    "s": (0.555, 0.0),
    "w1": (-0.445, 0.0),
    "w2": (0.445, 0.0),
    "x1": (-0.88, 0.90),
    "x2": (1.445, 0.0),
}

OV_DP_GUARD = 10_000_000
GAP = 1.61
TOL = 1e-9


def gadget_distance(p: str, q: str) -> float:
    return math.dist(GADGET_POINTS[p], GADGET_POINTS[q])


# -- orthogonal vectors --------------------------------------------------------


@dataclass(frozen=True)
class OVInstance:
    U: tuple[tuple[int, ...], ...]
    V: tuple[tuple[int, ...], ...]

    def __init__(self, U, V):
        U = [tuple(int(x) for x in u) for u in U]
        V = [tuple(int(x) for x in v) for v in V]
        if not U or len(U) != len(V):
            raise ValidationError("U and V must be nonempty and of equal size")
        dims = {len(x) for x in U + V}
        if len(dims) != 1 or 0 in dims:
            raise ValidationError("all vectors must share one positive dimension")
        if any(b not in (0, 1) for x in U + V for b in x):
            raise ValidationError("vector entries must be 0 or 1")
        if dims.pop() % 2:
            # an all-zero coordinate keeps orthogonality unchanged
            U = [u + (0,) for u in U]
            V = [v + (0,) for v in V]
        object.__setattr__(self, "U", tuple(U))
        object.__setattr__(self, "V", tuple(V))

    @property
    def N(self) -> int:
        return len(self.U)

    @property
    def D(self) -> int:
        return len(self.U[0])

    def orthogonal_pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, u in enumerate(self.U) for j, v in enumerate(self.V)
                if not any(a & b for a, b in zip(u, v))]


def random_ov_instance(N: int, D: int, rng: np.random.Generator, p_one: float = 0.5) -> OVInstance:
    U = (rng.random((N, D)) < p_one).astype(int)
    V = (rng.random((N, D)) < p_one).astype(int)
    return OVInstance(U.tolist(), V.tolist())


def _parity(k: int) -> str:
    # k is 1-based: odd positions sit above the axis
    return "o" if k % 2 else "e"


def vector_gadget(vec: Sequence[int], side: str) -> list[str]:
    return [f"{side}{bit}{_parity(k)}" for k, bit in enumerate(vec, start=1)]


def ov_labels(inst: OVInstance) -> tuple[list[str], list[str]]:
    """Point labels of ``P`` and ``Q``."""
    W = [("a0o", "a0e")[t % 2] for t in range(inst.D * (inst.N - 1))]
    P = W + ["x1"]
    for u in inst.U:
        P += ["s"] + vector_gadget(u, "a")
    P += ["s", "x2"] + W
    Q = []
    for v in inst.V:
        Q += ["w1"] + vector_gadget(v, "b") + ["w2"]
    return P, Q


def build_ov_curves(inst: OVInstance) -> tuple[PolyCurve, PolyCurve]:
    P, Q = ov_labels(inst)
    return PolyCurve([GADGET_POINTS[p] for p in P]), PolyCurve([GADGET_POINTS[q] for q in Q])


def verify_ov_gadget(inst: OVInstance, backend: str | None = None) -> dict:
    P, Q = build_ov_curves(inst)
    if len(P) * len(Q) > OV_DP_GUARD:
        raise SizeGuardError(f"|P|*|Q| = {len(P) * len(Q)} exceeds the DP guard of {OV_DP_GUARD}")
    has = bool(inst.orthogonal_pairs())
    dF = discrete_frechet(P, Q, backend=backend)
    consistent = dF <= 1 + TOL if has else dF >= GAP - TOL
    # weaker property: the threshold 1 alone separates the two cases
    separated = (dF <= 1 + TOL) == has
    return {"N": inst.N, "D": inst.D, "len_P": len(P), "len_Q": len(Q),
            "has_orthogonal_pair": has, "dF": dF, "consistent": bool(consistent),
            "separated": bool(separated)}


# (first, second, claimed value, kind) for the distance facts the proofs use;
# "<=" and ">=" claims are one-sided bounds
POINT_CLAIMS = [
    ("a0o", "b1o", 1.0, "exact"), ("a0e", "b1e", 1.0, "exact"),
    ("a0o", "b0o", 1.0, "<="), ("a0e", "b0e", 1.0, "<="),
    ("b0o", "a1o", 1.0, "<="), ("b0e", "a1e", 1.0, "<="),
    ("a1o", "b1o", 1.61, "exact"), ("a1e", "b1e", 1.61, "exact"),
    ("a0o", "b1e", 1.65, "approx"), ("a1o", "b0e", 1.65, ">="),
    ("x1", "b0o", 0.49, "approx"), ("x1", "b1o", 1.13, "approx"),
    ("x1", "b0e", 2.66, "approx"), ("x1", "b1e", 1.61, "approx"),
    ("x1", "w2", 1.61, "approx"), ("s", "b0o", 1.70, "approx"),
    ("s", "b1o", 1.97, "approx"), ("x2", "w1", 1.89, "approx"),
    ("a0o", "w1", 0.67, "approx"), ("w2", "s", 0.11, "approx"),
    ("w2", "x2", 1.0, "exact"), ("w1", "s", 1.0, "exact"),
    ("w1", "a1o", 1.0, "<="),
]


def gadget_distance_claims(atol: float = 0.01) -> list[dict]:
    """Recompute each claimed point distance; two-decimal claims get ``atol``."""
    out = []
    for p, q, claim, kind in POINT_CLAIMS:
        got = gadget_distance(p, q)
        if kind == "exact":
            ok = abs(got - claim) <= TOL
        elif kind == "<=":
            ok = got <= claim + TOL
        elif kind == ">=":
            ok = got >= claim - TOL
        else:
            ok = abs(got - claim) <= atol
        out.append({"pair": (p, q), "claimed": claim, "kind": kind, "computed": got, "ok": bool(ok)})
    return out


def _couplings(n: int, m: int):
    """Every monotone coupling of index ranges ``[0, n)`` and ``[0, m)``."""
    path = [(0, 0)]

    def rec(i, j):
        if i == n - 1 and j == m - 1:
            yield list(path)
            return
        for di, dj in ((1, 1), (1, 0), (0, 1)):
            a, b = i + di, j + dj
            if a < n and b < m:
                path.append((a, b))
                yield from rec(a, b)
                path.pop()

    yield from rec(0, 0)


def check_parallel_coupling(u: Sequence[int], v: Sequence[int]) -> dict:
    """Enumerate every coupling of the two vector gadgets and test the width gap."""
    u, v = list(u), list(v)
    if len(u) != len(v):
        raise ValidationError("vectors must share a dimension")
    if len(u) > 8:
        raise SizeGuardError("coupling enumeration is exponential; D must be at most 8")
    A = [GADGET_POINTS[p] for p in vector_gadget(u, "a")]
    B = [GADGET_POINTS[p] for p in vector_gadget(v, "b")]
    D = len(u)
    dist = [[math.dist(a, b) for b in B] for a in A]
    parallel = max(dist[i][i] for i in range(D))
    min_nonparallel = math.inf
    count = 0
    for c in _couplings(D, D):
        count += 1
        if all(i == j for i, j in c):
            continue
        min_nonparallel = min(min_nonparallel, max(dist[i][j] for i, j in c))
    orth = not any(a & b for a, b in zip(u, v))
    ok_np = min_nonparallel > GAP
    ok_p = parallel <= 1 + TOL if orth else parallel >= GAP - TOL
    return {"D": D, "couplings": count, "orthogonal": orth, "parallel_width": parallel,
            "min_nonparallel_width": min_nonparallel, "ok": bool(ok_np and ok_p)}


# -- 3SAT ----------------------------------------------------------------------


@dataclass(frozen=True)
class CNFFormula:
    """3-CNF with each variable used at most 3 times and each literal in at most 2 clauses.

    Literals are nonzero integers; ``-i`` negates variable ``i`` (1-based).
    """

    n: int
    clauses: tuple[tuple[int, int, int], ...]

    def __init__(self, n: int, clauses):
        cl = tuple(tuple(int(x) for x in c) for c in clauses)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "clauses", cl)
        self.validate()

    @property
    def m(self) -> int:
        return len(self.clauses)

    def validate(self) -> None:
        if self.n < 1:
            raise ValidationError("a formula needs at least one variable")
        var_uses = [0] * (self.n + 1)
        lit_uses: dict[int, int] = {}
        for j, c in enumerate(self.clauses, start=1):
            if len(c) != 3:
                raise ValidationError(f"clause {j} has {len(c)} literals, expected 3")
            if any(x == 0 or abs(x) > self.n for x in c):
                raise ValidationError(f"clause {j} names a variable outside 1..{self.n}")
            if len({abs(x) for x in c}) != 3:
                raise ValidationError(f"clause {j} repeats a variable")
            for x in c:
                var_uses[abs(x)] += 1
                lit_uses[x] = lit_uses.get(x, 0) + 1
        for i in range(1, self.n + 1):
            if var_uses[i] > 3:
                raise ValidationError(f"variable {i} appears {var_uses[i]} times (max 3)")
        for x, c in lit_uses.items():
            if c > 2:
                raise ValidationError(f"literal {x} appears in {c} clauses (max 2)")

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        return all(any(assignment[abs(x) - 1] == (x > 0) for x in c) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n} {self.m}"] + [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CNFFormula:
    n = m = None
    clauses: list[list[int]] = []
    cur: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("malformed problem line", lineno)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError("non-integer counts in problem line", lineno) from None
            continue
        if n is None:
            raise ParseError("clause before the problem line", lineno)
        for tok in line.split():
            try:
                x = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno) from None
            if x == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(x)
    if n is None:
        raise ParseError("missing problem line")
    if cur:
        clauses.append(cur)
    if m is not None and len(clauses) != m:
        raise ParseError(f"problem line announces {m} clauses, found {len(clauses)}")
    return CNFFormula(n, clauses)


def random_formula(n: int, m: int, rng: np.random.Generator, max_tries: int = 10_000) -> CNFFormula:
    """Random valid formula in which every variable occurs."""
    if n < 3 or 3 * m < n or 3 * m > 3 * n:
        raise ValidationError(f"no valid formula with every variable used exists for n={n}, m={m}")
    for _ in range(max_tries):
        clauses = []
        for _ in range(m):
            vs = rng.choice(n, size=3, replace=False) + 1
            signs = rng.choice([-1, 1], size=3)
            clauses.append(tuple(int(v * s) for v, s in zip(vs, signs)))
        if {abs(x) for c in clauses for x in c} != set(range(1, n + 1)):
            continue
        try:
            return CNFFormula(n, clauses)
        except ValidationError:
            continue
    raise RuntimeError("failed to sample a valid formula")


def satisfying_assignments(f: CNFFormula, cap: int = 12) -> list[tuple[bool, ...]]:
    if f.n > cap:
        raise SizeGuardError(f"brute-force SAT is limited to {cap} variables")
    return [a for a in itertools.product((False, True), repeat=f.n) if f.satisfied_by(a)]


@dataclass
class SatGadget:
    formula: CNFFormula
    k: int
    trajectories: list[SymbolTrajectory]
    roles: list[tuple]  # ("true", i) | ("false", i) | ("supp", i, r) | ("clause", j, copy)
    coords: dict[str, tuple[float, float]] = field(default_factory=dict)

    def index(self, role: tuple) -> int:
        return self.roles.index(role)

    def metric(self) -> LocationMetric:
        return LocationMetric.from_coordinates(self.coords)

    def dataset(self) -> list[tuple[str, SymbolTrajectory]]:
        return [("-".join(map(str, r)), t) for r, t in zip(self.roles, self.trajectories)]


def _cell_symbols(c: int) -> tuple[str, str, str, str]:
    return f"c{c}L", f"c{c}R", f"c{c}T", f"c{c}B"


def _strip_coords(n: int) -> dict[str, tuple[float, float]]:
    h = math.sqrt(3) / 2
    out = {}
    for c in range(1, 4 * n + 1):
        L, R, T, B = _cell_symbols(c)
        x = 2.0 * (c - 1)
        out[L] = (x, 0.0)
        out[R] = (x + 1.0, 0.0)
        out[T] = (x + 0.5, h)
        if c > 3 * n:
            out[B] = (x + 0.5, -h)
    return out


def _trajectory(n: int, detours: dict[int, str]) -> SymbolTrajectory:
    syms = []
    for c in range(1, 4 * n + 1):
        L, R, T, B = _cell_symbols(c)
        syms.append(L)
        side = detours.get(c)
        if side == "top":
            syms.append(T)
        elif side == "bottom":
            syms.append(B)
        syms.append(R)
    return SymbolTrajectory(syms)


def build_sat_gadget(f: CNFFormula, k: int) -> SatGadget:
    if k < 4:
        raise ValidationError("k must be at least 4")
    if k < 14:
        warnings.warn("the reduction's guarantees need k > 13", stacklevel=2)
    n = f.n
    trajs, roles = [], []

    def markers(i):
        return {3 * i - 2: "top", 3 * i - 1: "top", 3 * i: "top"}

    for i in range(1, n + 1):
        trajs.append(_trajectory(n, {**markers(i), 3 * n + i: "top"}))
        roles.append(("true", i))
        trajs.append(_trajectory(n, {**markers(i), 3 * n + i: "bottom"}))
        roles.append(("false", i))
        for r in range(k - 3):
            trajs.append(_trajectory(n, markers(i)))
            roles.append(("supp", i, r))
    for j, c in enumerate(f.clauses, start=1):
        det = {3 * n + abs(x): ("top" if x > 0 else "bottom") for x in c}
        for copy in range(3):
            trajs.append(_trajectory(n, det))
            roles.append(("clause", j, copy))
    return SatGadget(f, k, trajs, roles, _strip_coords(n))


def _normalize(f: CNFFormula, assignment: Sequence[bool]) -> tuple[bool, ...]:
    # a true literal that no clause uses cannot recruit a clause trajectory;
    # flipping it keeps the formula satisfied
    lits = {x for c in f.clauses for x in c}
    out = list(assignment)
    for i in range(1, f.n + 1):
        lit = i if out[i - 1] else -i
        if lit not in lits and -lit in lits:
            out[i - 1] = not out[i - 1]
    return tuple(out)


def forward_clustering(g: SatGadget, assignment: Sequence[bool], dist) -> Clustering:
    """Cluster construction from a satisfying assignment.

    ``dist(a, b)`` gives the distance between trajectory indices; it is
    used for the reported radius.
    """
    f = g.formula
    if not f.satisfied_by(assignment):
        raise ValidationError("assignment does not satisfy the formula")
    a = _normalize(f, assignment)
    free = {j: [0, 1, 2] for j in range(1, f.m + 1)}
    clusters = []
    centers_by_lit = {}
    for i in range(1, f.n + 1):
        lit = i if a[i - 1] else -i
        center = g.index(("true" if a[i - 1] else "false", i))
        members = [center, g.index(("false" if a[i - 1] else "true", i))]
        members += [g.index(("supp", i, r)) for r in range(g.k - 3)]
        for j, c in enumerate(f.clauses, start=1):
            if lit in c and free[j]:
                members.append(g.index(("clause", j, free[j].pop(0))))
                break
        clusters.append([center, members])
        centers_by_lit[lit] = len(clusters) - 1
    for j, c in enumerate(f.clauses, start=1):
        for copy in free[j]:
            host = next(centers_by_lit[x] for x in c if x in centers_by_lit)
            clusters[host][1].append(g.index(("clause", j, copy)))
    out = [Cluster(c, tuple(sorted(ms))) for c, ms in clusters]
    radius = max(dist(c.center, v) for c in out for v in c.members)
    return Clustering(out, float(radius))


def _unique_distance(g: SatGadget, fn):
    """Distance on trajectory indices, computed once per distinct string pair."""
    strings = [t.symbols for t in g.trajectories]
    cache: dict[tuple, float] = {}

    def dist(i, j):
        a, b = strings[i], strings[j]
        key = (a, b) if a <= b else (b, a)
        if key not in cache:
            cache[key] = 0.0 if a == b else float(fn(a, b))
        return cache[key]

    return dist


def _cell_metric_checks(g: SatGadget) -> dict:
    """Exact metric-edit costs inside one cell: detour vs straight 1, top vs bottom 2."""
    n = g.formula.n
    m = g.metric()
    c = 3 * n + 1
    L, R, T, B = _cell_symbols(c)
    straight, top, bottom = (L, R), (L, T, R), (L, B, R)
    return {
        "detour_vs_straight": metric_edit_distance(top, straight, m),
        "bottom_vs_straight": metric_edit_distance(bottom, straight, m),
        "top_vs_bottom": metric_edit_distance(top, bottom, m),
        "marker_detour": metric_edit_distance((f"c1L", "c1T", "c1R"), ("c1L", "c1R"), m),
    }


def verify_sat_gadget(f: CNFFormula, k: int, gadget: SatGadget | None = None) -> dict:
    """Check the distance structure, neighbour bounds and forward clusterings."""
    g = gadget or build_sat_gadget(f, k)
    n, m = f.n, f.m
    N = len(g.trajectories)
    dist = _unique_distance(g, plain_edit_distance)
    claims = {}

    def expect(name, got, want):
        claims.setdefault(name, []).append((got, want))

    for i in range(1, n + 1):
        t, fl = g.index(("true", i)), g.index(("false", i))
        expect("true_vs_false", dist(t, fl), 2)
        if k > 3:
            s = g.index(("supp", i, 0))
            expect("supplement_vs_variable", dist(s, t), 1)
            expect("supplement_vs_variable", dist(s, fl), 1)
        for j, c in enumerate(f.clauses, start=1):
            q = g.index(("clause", j, 0))
            for var_idx, lit in ((t, i), (fl, -i)):
                if lit in c:
                    expect("variable_vs_matching_clause", dist(var_idx, q), 5)
                else:
                    expect("variable_vs_other_clause", dist(var_idx, q), 7)
    claims_ok = all(got == want for v in claims.values() for got, want in v)

    neighbours = []
    bounds_ok = True
    for a in range(N):
        cnt = sum(1 for b in range(N) if b != a and dist(a, b) <= 5)
        role = g.roles[a][0]
        if role in ("true", "false"):
            bound, ok = f"<= {k + 6}", cnt <= k + 6
        elif role == "clause":
            bound, ok = "<= 12", cnt <= 12
        else:
            bound, ok = f"== {k - 2}", cnt == k - 2
        bounds_ok &= ok
        neighbours.append({"role": list(g.roles[a]), "count": cnt, "bound": bound, "ok": ok})

    expected_count = 2 * n + (k - 3) * n + 3 * m
    sat = satisfying_assignments(f)
    jac = _unique_distance(g, lambda a, b: jaccard_distance(a, b, 2))
    forward = []
    seen = set()
    for a in sat:
        norm = _normalize(f, a)
        if norm in seen:
            continue
        seen.add(norm)
        cl = forward_clustering(g, a, dist)
        dm = _LazyMatrix(dist, N)
        try:
            cl.check(dm, k)
            valid = True
        except AssertionError:
            valid = False
        jr = max(jac(c.center, v) for c in cl.clusters for v in c.members)
        forward.append({
            "assignment": [int(x) for x in norm],
            "radius": cl.radius,
            "min_cluster_size": min(len(c.members) for c in cl.clusters),
            "valid": valid,
            "jaccard_radius": jr,
        })
    forward_ok = all(r["valid"] and r["radius"] == 5 and r["min_cluster_size"] >= k for r in forward)
    metric_cells = _cell_metric_checks(g)
    metric_ok = (abs(metric_cells["detour_vs_straight"] - 1) < 1e-9
                 and abs(metric_cells["bottom_vs_straight"] - 1) < 1e-9
                 and abs(metric_cells["top_vs_bottom"] - 2) < 1e-9
                 and abs(metric_cells["marker_detour"] - 1) < 1e-9)
    return {
        "n": n,
        "m": m,
        "k": k,
        "trajectory_count": N,
        "expected_count": expected_count,
        "count_ok": N == expected_count,
        "claims": {name: sorted({(float(got), want) for got, want in v}) for name, v in claims.items()},
        "claims_ok": claims_ok,
        "neighbours": neighbours,
        "neighbour_bounds_ok": bool(bounds_ok),
        "satisfiable": bool(sat),
        "forward": forward,
        "forward_ok": forward_ok,
        "jaccard_formula": 15 / (8 * n + 10),
        "metric_cells": metric_cells,
        "metric_cells_ok": metric_ok,
    }


class _LazyMatrix:
    """Indexable view so :meth:`Clustering.check` can query a distance callable."""

    def __init__(self, dist, n):
        self._dist = dist
        self._n = n

    def __len__(self):
        return self._n

    def __getitem__(self, ij):
        return self._dist(*ij)


def sat_distance_matrix(g: SatGadget, measure: str = "edit") -> DistanceMatrix:
    if measure == "edit":
        fn = plain_edit_distance
    elif measure == "jaccard":
        def fn(a, b):
            return jaccard_distance(a, b, 2)
    else:
        raise ValidationError(f"unsupported gadget measure {measure!r}")
    dist = _unique_distance(g, fn)
    N = len(g.trajectories)
    return DistanceMatrix([[dist(a, b) for b in range(N)] for a in range(N)])


def load_formula(path) -> CNFFormula:
    return parse_dimacs(Path(path).read_text(encoding="utf-8"))
