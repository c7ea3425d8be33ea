"""Domain types, validation, file I/O and the cell-sequence string mapping."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "TrajsimError",
    "ParseError",
    "ValidationError",
    "DomainError",
    "SizeGuardError",
    "ConfigurationError",
    "Point",
    "PolyCurve",
    "TimedTrajectory",
    "SpeedModel",
    "LocationMetric",
    "MetricReport",
    "SymbolTrajectory",
    "GridDecomposition",
    "PolygonDecomposition",
    "load_timed_trajectory",
    "load_dataset",
    "save_timed_trajectory",
    "load_metric",
    "validate_metric",
    "map_to_string",
]


class TrajsimError(Exception):
    """Base class for all package errors."""


class ParseError(TrajsimError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(TrajsimError):
    pass


class DomainError(TrajsimError):
    pass


class SizeGuardError(TrajsimError):
    """Raised when an input exceeds the size an exhaustive routine accepts."""


class ConfigurationError(ValidationError):
    """A measure was requested on data it cannot handle."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f"non-finite coordinate in {self!r}")

    def dist(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


def _as_xy(vertices) -> np.ndarray:
    arr = np.asarray(
        [(v.x, v.y) if isinstance(v, Point) else tuple(v) for v in vertices],
        dtype=float,
    )
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValidationError("vertices must be 2-D points")
    return arr


class PolyCurve:
    """Polygonal curve on ``[0, n]`` given by its ``n + 1`` vertices."""

    __slots__ = ("xy",)

    def __init__(self, vertices):
        xy = vertices if isinstance(vertices, np.ndarray) else _as_xy(vertices)
        xy = np.array(xy, dtype=float)
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise ValidationError("vertices must be an (n+1, 2) array")
        if len(xy) == 0:
            raise ValidationError("a curve needs at least one vertex")
        if not np.all(np.isfinite(xy)):
            raise ValidationError("non-finite vertex coordinate")
        xy.setflags(write=False)
        self.xy = xy

    def __len__(self) -> int:
        return len(self.xy)

    def __repr__(self) -> str:
        return f"PolyCurve({self.xy.tolist()!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyCurve) and np.array_equal(self.xy, other.xy)

    def __hash__(self):
        return hash(self.xy.tobytes())

    @property
    def segments(self) -> int:
        return len(self.xy) - 1

    @property
    def vertices(self) -> list[Point]:
        return [Point(float(x), float(y)) for x, y in self.xy]

    def at(self, s: float) -> np.ndarray:
        """Affine interpolation ``A(s)`` for ``s`` in ``[0, n]``."""
        n = self.segments
        if n == 0:
            return self.xy[0].copy()
        s = min(max(s, 0.0), float(n))
        i = min(int(math.floor(s)), n - 1)
        f = s - i
        return (1.0 - f) * self.xy[i] + f * self.xy[i + 1]

    def edge_lengths(self) -> np.ndarray:
        return np.hypot(*np.diff(self.xy, axis=0).T)


class TimedTrajectory:
    """Time-stamped polygonal curve with timestamps normalized to ``[0, 1]``.

    Construction normalizes affinely; strictly increasing times are required.
    """

    __slots__ = ("t", "xy")

    def __init__(self, times, points, normalize: bool = True):
        t = np.array(times, dtype=float)
        xy = points.xy if isinstance(points, PolyCurve) else _as_xy(points)
        xy = np.array(xy, dtype=float)
        if t.ndim != 1 or len(t) != len(xy):
            raise ValidationError("times and points differ in length")
        if len(t) < 2:
            raise ValidationError("a timed trajectory needs at least 2 samples")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(xy))):
            raise ValidationError("non-finite sample")
        order = np.argsort(t, kind="stable")
        t, xy = t[order], xy[order]
        if np.any(np.diff(t) == 0):
            dup = t[np.flatnonzero(np.diff(t) == 0)[0]]
            raise ValidationError(f"duplicate timestamp {dup!r}")
        if normalize:
            t = (t - t[0]) / (t[-1] - t[0])
            t[0], t[-1] = 0.0, 1.0
        elif t[0] != 0.0 or t[-1] != 1.0:
            raise ValidationError("timestamps must span [0, 1]")
        t.setflags(write=False)
        xy.setflags(write=False)
        self.t = t
        self.xy = xy

    @classmethod
    def uniform(cls, points) -> "TimedTrajectory":
        xy = points.xy if isinstance(points, PolyCurve) else _as_xy(points)
        return cls(np.linspace(0.0, 1.0, len(xy)), xy)

    def __len__(self) -> int:
        return len(self.t)

    def __repr__(self) -> str:
        return f"TimedTrajectory(n={len(self)})"

    @property
    def curve(self) -> PolyCurve:
        return PolyCurve(self.xy)

    @property
    def samples(self) -> list[tuple[float, Point]]:
        return [(float(t), Point(float(x), float(y))) for t, (x, y) in zip(self.t, self.xy)]

    def at_time(self, t: float) -> np.ndarray:
        """Constant-speed position at time ``t``."""
        t = min(max(t, 0.0), 1.0)
        i = int(np.searchsorted(self.t, t, side="right")) - 1
        i = min(max(i, 0), len(self.t) - 2)
        f = (t - self.t[i]) / (self.t[i + 1] - self.t[i])
        return (1.0 - f) * self.xy[i] + f * self.xy[i + 1]


class SpeedModel(Enum):
    CONSTANT = "constant"
    VARYING = "varying"


@dataclass(frozen=True)
class MetricReport:
    ok: bool
    violations: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def __bool__(self) -> bool:
        return self.ok


class LocationMetric:
    """Distances between location symbols.

    Either built from coordinates (Euclidean) or from an explicit matrix.
    The sentinel endpoints used by the edit distances are handled in
    :mod:`trajsim.editdist` and never stored here.
    """

    def __init__(self, symbols: Sequence[str], matrix, coords: Mapping[str, Sequence[float]] | None = None):
        self.symbols: tuple[str, ...] = tuple(symbols)
        if len(set(self.symbols)) != len(self.symbols):
            raise ValidationError("duplicate symbol in metric")
        m = np.array(matrix, dtype=float)
        if m.shape != (len(self.symbols), len(self.symbols)):
            raise ValidationError("metric matrix shape does not match its symbols")
        if not np.all(np.isfinite(m)):
            raise ValidationError("metric matrix has non-finite entries")
        m.setflags(write=False)
        self.matrix = m
        self.coords = dict(coords) if coords is not None else None
        self.index = {s: i for i, s in enumerate(self.symbols)}

    @classmethod
    def from_coordinates(cls, coords: Mapping[str, Sequence[float]]) -> "LocationMetric":
        symbols = list(coords)
        xy = np.array([coords[s] for s in symbols], dtype=float).reshape(len(symbols), 2)
        diff = xy[:, None, :] - xy[None, :, :]
        return cls(symbols, np.hypot(diff[..., 0], diff[..., 1]),
                   coords={s: tuple(map(float, coords[s])) for s in symbols})

    @classmethod
    def from_matrix(cls, symbols: Sequence[str], matrix) -> "LocationMetric":
        return cls(symbols, matrix)

    @property
    def mode(self) -> str:
        return "coordinates" if self.coords is not None else "matrix"

    def __contains__(self, symbol) -> bool:
        return symbol in self.index

    def __len__(self) -> int:
        return len(self.symbols)

    def d(self, x: str, y: str) -> float:
        return float(self.matrix[self.index[x], self.index[y]])

    def encode(self, symbols: Iterable[str]) -> np.ndarray:
        try:
            return np.array([self.index[s] for s in symbols], dtype=np.intp)
        except KeyError as exc:
            raise ValidationError(f"symbol {exc.args[0]!r} not in metric alphabet") from None

    def to_json(self) -> dict:
        if self.coords is not None:
            return {"locations": {s: list(self.coords[s]) for s in self.symbols}}
        return {"matrix": {"symbols": list(self.symbols), "d": self.matrix.tolist()}}


def validate_metric(m: LocationMetric, atol: float = 1e-12) -> MetricReport:
    """Check the metric axioms and report every violation with a witness."""
    if m.mode == "coordinates":
        return MetricReport(True)
    d = m.matrix
    s = m.symbols
    bad: list[tuple[str, tuple[str, ...]]] = []
    n = len(s)
    for i in range(n):
        if abs(d[i, i]) > atol:
            bad.append(("identity", (s[i],)))
        for j in range(n):
            if d[i, j] < -atol:
                bad.append(("nonnegativity", (s[i], s[j])))
            if j > i and abs(d[i, j] - d[j, i]) > atol:
                bad.append(("symmetry", (s[i], s[j])))
    # d(a,c) <= d(a,b) + d(b,c), witness reported as (a, b, c)
    for a in range(n):
        for c in range(n):
            via = d[a, :] + d[:, c]
            for b in np.flatnonzero(via < d[a, c] - atol):
                bad.append(("triangle", (s[a], s[int(b)], s[c])))
    return MetricReport(not bad, tuple(bad))


@dataclass(frozen=True)
class SymbolTrajectory:
    symbols: tuple[str, ...]

    def __init__(self, symbols: Iterable[str]):
        syms = tuple(symbols)
        if not syms:
            raise ValidationError("a symbol trajectory must be nonempty")
        object.__setattr__(self, "symbols", syms)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def __str__(self) -> str:
        if all(len(s) == 1 for s in self.symbols):
            return "".join(self.symbols)
        return " ".join(self.symbols)

    def check_alphabet(self, metric: LocationMetric) -> None:
        for s in self.symbols:
            if s not in metric:
                raise ValidationError(f"symbol {s!r} not in metric alphabet")


# -- planar decompositions -------------------------------------------------


@dataclass(frozen=True)
class GridDecomposition:
    """Axis-aligned grid of ``nx * ny`` cells anchored at ``(x0, y0)``.

    ``labels[row][col]`` names the cell; row 0 is the bottom row.
    """

    x0: float
    y0: float
    cell_w: float
    cell_h: float
    nx: int
    ny: int
    labels: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        if self.cell_w <= 0 or self.cell_h <= 0 or self.nx < 1 or self.ny < 1:
            raise ValidationError("grid needs positive cell size and counts")
        if self.labels is not None:
            labels = tuple(tuple(r) for r in self.labels)
            if len(labels) != self.ny or any(len(r) != self.nx for r in labels):
                raise ValidationError("label grid shape does not match nx, ny")
            flat = [x for r in labels for x in r]
            if len(set(flat)) != len(flat):
                raise ValidationError("grid labels must be unique")
            object.__setattr__(self, "labels", labels)

    @property
    def shortest_edge(self) -> float:
        return min(self.cell_w, self.cell_h)

    @property
    def extent(self) -> tuple[float, float, float, float]:
        return (self.x0, self.y0, self.x0 + self.nx * self.cell_w, self.y0 + self.ny * self.cell_h)

    def label(self, row: int, col: int) -> str:
        if self.labels is not None:
            return self.labels[row][col]
        return f"r{row}c{col}"

    def locate(self, x: float, y: float) -> str:
        x1, y1 = self.extent[2:]
        if not (self.x0 <= x <= x1 and self.y0 <= y <= y1):
            raise DomainError(f"point ({x}, {y}) outside decomposition extent")
        col = min(int((x - self.x0) // self.cell_w), self.nx - 1)
        row = min(int((y - self.y0) // self.cell_h), self.ny - 1)
        return self.label(row, col)


@dataclass(frozen=True)
class PolygonDecomposition:
    """Labeled convex polygons; the first polygon containing a point wins."""

    regions: tuple[tuple[str, tuple[tuple[float, float], ...]], ...]

    def __init__(self, regions: Mapping[str, Sequence[Sequence[float]]]):
        regs = tuple((str(k), tuple((float(x), float(y)) for x, y in v)) for k, v in regions.items())
        if any(len(p) < 3 for _, p in regs):
            raise ValidationError("a region polygon needs at least 3 vertices")
        object.__setattr__(self, "regions", regs)

    @property
    def shortest_edge(self) -> float:
        best = math.inf
        for _, poly in self.regions:
            for (ax, ay), (bx, by) in zip(poly, poly[1:] + poly[:1]):
                best = min(best, math.hypot(bx - ax, by - ay))
        return best

    def locate(self, x: float, y: float) -> str:
        for label, poly in self.regions:
            if _in_convex(poly, x, y):
                return label
        raise DomainError(f"point ({x}, {y}) outside every region")


def _in_convex(poly, x, y, eps=1e-12) -> bool:
    sign = 0
    for (ax, ay), (bx, by) in zip(poly, poly[1:] + poly[:1]):
        cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax)
        if abs(cross) <= eps:
            continue
        s = 1 if cross > 0 else -1
        if sign == 0:
            sign = s
        elif s != sign:
            return False
    return True


def map_to_string(traj, dec, step: float | None = None) -> SymbolTrajectory:
    """Sequence of region labels visited by ``traj``.

    Each segment is sub-sampled every ``step`` length units (default: one
    hundredth of the decomposition's shortest cell edge); consecutive
    repeats are collapsed.
    """
    xy = traj.xy
    if step is None:
        step = dec.shortest_edge / 100.0
    if step <= 0:
        raise ValidationError("step must be positive")
    out: list[str] = []

    def visit(x, y):
        lab = dec.locate(float(x), float(y))
        if not out or out[-1] != lab:
            out.append(lab)

    visit(*xy[0])
    for p, q in zip(xy[:-1], xy[1:]):
        length = float(np.hypot(*(q - p)))
        k = max(1, int(math.ceil(length / step)))
        for f in np.arange(1, k + 1) / k:
            visit(*(p + f * (q - p)))
    return SymbolTrajectory(out)


# -- file I/O --------------------------------------------------------------


def _parse_csv(text: str) -> tuple[list[float], list[tuple[float, float]]]:
    times: list[float] = []
    pts: list[tuple[float, float]] = []
    rows = csv.reader(text.splitlines())
    for lineno, row in enumerate(rows, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 columns t,x,y, got {len(row)}", lineno)
        try:
            t, x, y = (float(c) for c in row)
        except ValueError:
            if lineno == 1 and [c.strip().lower() for c in row] == ["t", "x", "y"]:
                continue
            raise ParseError(f"non-numeric value in {row!r}", lineno) from None
        times.append(t)
        pts.append((x, y))
    return times, pts


def load_timed_trajectory(path, format: str | None = None) -> TimedTrajectory:
    """Load one trajectory from a ``t,x,y`` CSV or a JSON file.

    A JSON file may hold ``{"samples": [[t, x, y], ...]}`` or a dataset with
    exactly one trajectory.
    """
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    text = path.read_text(encoding="utf-8")
    if fmt == "csv":
        times, pts = _parse_csv(text)
        return TimedTrajectory(times, pts)
    if fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
        if "trajectories" in data:
            trajs = data["trajectories"]
            if len(trajs) != 1:
                raise ValidationError("dataset holds more than one trajectory; use load_dataset")
            data = trajs[0]
        return _traj_from_samples(data["samples"])
    raise ParseError(f"unknown trajectory format {fmt!r}")


def _traj_from_samples(samples) -> TimedTrajectory:
    for k, s in enumerate(samples, start=1):
        if len(s) != 3:
            raise ParseError(f"sample {k} has {len(s)} fields, expected 3")
    return TimedTrajectory([s[0] for s in samples], [(s[1], s[2]) for s in samples])


def load_dataset(path) -> list[tuple[str, object]]:
    """Load ``{"trajectories": [...]}``.

    Each entry carries ``samples`` (timed) or ``symbols`` (string form);
    the result is a list of ``(id, TimedTrajectory | SymbolTrajectory)``.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        entries = data["trajectories"]
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    except (KeyError, TypeError):
        raise ParseError("dataset needs a top-level 'trajectories' list") from None
    out = []
    for k, entry in enumerate(entries):
        ident = str(entry.get("id", k))
        if "symbols" in entry:
            out.append((ident, SymbolTrajectory(entry["symbols"])))
        else:
            out.append((ident, _traj_from_samples(entry["samples"])))
    return out


def dataset_to_json(items: Sequence[tuple[str, object]]) -> dict:
    trajs = []
    for ident, tr in items:
        if isinstance(tr, SymbolTrajectory):
            trajs.append({"id": ident, "symbols": list(tr.symbols)})
        else:
            trajs.append({"id": ident, "samples": [[float(t), float(x), float(y)] for t, (x, y) in zip(tr.t, tr.xy)]})
    return {"schema": 1, "trajectories": trajs}


def save_timed_trajectory(traj: TimedTrajectory, path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(json.dumps({"samples": [[float(t), float(x), float(y)] for t, (x, y) in zip(traj.t, traj.xy)]}),
                        encoding="utf-8")
        return
    lines = ["t,x,y"] + [f"{t!r},{x!r},{y!r}" for t, (x, y) in zip(traj.t.tolist(), traj.xy.tolist())]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_metric(path) -> LocationMetric:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if "locations" in data:
        return LocationMetric.from_coordinates(data["locations"])
    if "matrix" in data:
        mat = data["matrix"]
        return LocationMetric.from_matrix(mat["symbols"], mat["d"])
    raise ParseError("metric file needs a 'locations' or 'matrix' key")
