"""Two-parameter filtered simplicial complexes: types, builders, text format.

Grades are ordered componentwise, smaller meaning earlier on both axes.
A superlevel axis (larger = earlier) is brought into this convention by
negating that coordinate before the complex is constructed, see
:func:`negate_axes`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist, squareform

from .errors import (
    BadGrade,
    BadHeader,
    BadSimplex,
    DuplicateSimplex,
    EmptyInput,
    KOutOfRange,
    LengthMismatch,
    MissingFace,
    MixedDimension,
    NonMonotoneGrade,
    NonPositiveRadius,
    ParseError,
    UnparsableNumber,
)

HEADER = "bifiltration"


class BiGrade(NamedTuple):
    x: float
    y: float

    def leq(self, other: BiGrade) -> bool:
        """Componentwise order."""
        return self.x <= other.x and self.y <= other.y

    def strictly_below(self, other: BiGrade) -> bool:
        return self.x < other.x and self.y < other.y


class GradedSimplex(NamedTuple):
    vertices: tuple[int, ...]
    grade: BiGrade

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


def faces(vertices: tuple[int, ...]) -> Iterable[tuple[int, ...]]:
    """Codimension-one faces, in lexicographic order."""
    if len(vertices) < 2:
        return
    for i in range(len(vertices) - 1, -1, -1):
        yield vertices[:i] + vertices[i + 1:]


def simplex_sort_key(s: GradedSimplex):
    return (s.grade.x, s.grade.y, s.dim, s.vertices)


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise MixedDimension("points must form an (n, d) array with d >= 1")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class Bifiltration:
    """Validated bifiltration. Simplices are stored in canonical order
    (grade lexicographic, then dimension, then vertex tuple), which is a
    linear extension of the face relation."""

    simplices: tuple[GradedSimplex, ...]
    max_dim: int | None = None
    x_label: str = "x"
    y_label: str = "y"
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        simplices = tuple(
            GradedSimplex(tuple(int(v) for v in s[0]), BiGrade(float(s[1][0]), float(s[1][1])))
            for s in self.simplices
        )
        index = _validate(simplices)
        top = max((s.dim for s in simplices), default=0)
        max_dim = top if self.max_dim is None else int(self.max_dim)
        if max_dim < top:
            raise BadSimplex(f"simplex of dimension {top} exceeds max_dim {max_dim}")
        object.__setattr__(self, "simplices", tuple(sorted(simplices, key=simplex_sort_key)))
        object.__setattr__(self, "max_dim", max_dim)
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.simplices)

    def grade_of(self, vertices: tuple[int, ...]) -> BiGrade:
        return self._index[tuple(vertices)]

    def grades(self) -> np.ndarray:
        return np.array([s.grade for s in self.simplices], dtype=np.float64).reshape(-1, 2)

    def bounding_box(self) -> tuple[BiGrade, BiGrade]:
        g = self.grades()
        return BiGrade(*g.min(axis=0)), BiGrade(*g.max(axis=0))


def _validate(simplices: Sequence[GradedSimplex]) -> dict:
    index: dict[tuple[int, ...], BiGrade] = {}
    for s in simplices:
        vs = s.vertices
        if len(vs) == 0 or any(v < 0 for v in vs) or any(a >= b for a, b in zip(vs, vs[1:])):
            raise BadSimplex(f"simplex {list(vs)}: vertex ids must be non-negative and strictly increasing")
        if not (math.isfinite(s.grade.x) and math.isfinite(s.grade.y)):
            raise BadGrade(f"simplex {list(vs)}: grade {tuple(s.grade)} is not finite")
        if vs in index:
            raise DuplicateSimplex(f"simplex {list(vs)} listed more than once")
        index[vs] = s.grade
    for s in simplices:
        for f in faces(s.vertices):
            g = index.get(f)
            if g is None:
                raise MissingFace(f"simplex {list(s.vertices)} is missing its face {list(f)}")
            if not g.leq(s.grade):
                raise NonMonotoneGrade(
                    f"simplex {list(s.vertices)} graded {tuple(s.grade)} precedes its face "
                    f"{list(f)} graded {tuple(g)}"
                )
    return index


def negate_axes(simplices: Iterable[GradedSimplex], axes: Iterable[int]) -> list[GradedSimplex]:
    """Flip superlevel axes into sublevel convention by negating them."""
    axes = set(axes)
    out = []
    for vs, g in simplices:
        gx, gy = g
        out.append(GradedSimplex(tuple(vs), BiGrade(-gx if 0 in axes else gx, -gy if 1 in axes else gy)))
    return out


_SPLIT = re.compile(r"[,\s]+")


def parse_point_cloud(text: str) -> PointCloud:
    rows = []
    dim = None
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = [t for t in _SPLIT.split(line) if t]
        try:
            row = [float(t) for t in tokens]
        except ValueError:
            raise UnparsableNumber(f"cannot parse {line!r} as numbers", line=lineno) from None
        if not all(math.isfinite(v) for v in row):
            raise UnparsableNumber(f"non-finite coordinate in {line!r}", line=lineno)
        if dim is None:
            dim = len(row)
        elif len(row) != dim:
            raise MixedDimension(f"expected {dim} coordinates, got {len(row)}", line=lineno)
        rows.append(row)
    if not rows:
        raise EmptyInput("point cloud has no points")
    return PointCloud(np.array(rows, dtype=np.float64))


def build_codensity_values(pc: PointCloud, k: int) -> np.ndarray:
    """Distance from each point to its k-th nearest other point."""
    n = len(pc)
    if not 1 <= k < n:
        raise KOutOfRange(f"k={k} must satisfy 1 <= k < number of points ({n})")
    # self is returned at distance 0, so ask for k + 1 neighbours
    dist, _ = cKDTree(pc.points).query(pc.points, k=k + 1)
    return np.ascontiguousarray(dist[:, k])


def build_function_rips(
    pc: PointCloud,
    vertex_values: Sequence[float],
    max_dim: int,
    max_radius: float,
    x_label: str = "rips",
    y_label: str = "function",
) -> Bifiltration:
    """Sublevel function-Rips bifiltration.

    A simplex is graded by (diameter, max vertex value). Simplices with
    diameter above ``max_radius`` are left out.
    """
    values = np.asarray(vertex_values, dtype=np.float64).ravel()
    n = len(pc)
    if values.shape[0] != n:
        raise LengthMismatch(f"{values.shape[0]} vertex values for {n} points")
    if not max_radius > 0:
        raise NonPositiveRadius(f"max_radius must be positive, got {max_radius}")
    if max_dim < 0:
        raise BadSimplex(f"max_dim must be >= 0, got {max_dim}")
    dist = squareform(pdist(pc.points)) if n > 1 else np.zeros((1, 1))
    nbrs = [[j for j in range(i + 1, n) if dist[i, j] <= max_radius] for i in range(n)]

    simplices = [GradedSimplex((i,), BiGrade(0.0, float(values[i]))) for i in range(n)]

    def expand(simplex: tuple[int, ...], diam: float, fval: float, candidates: list[int]):
        if len(simplex) - 1 == max_dim:
            return
        for j in candidates:
            d = max(diam, max(float(dist[v, j]) for v in simplex))
            f = max(fval, float(values[j]))
            s = simplex + (j,)
            simplices.append(GradedSimplex(s, BiGrade(d, f)))
            expand(s, d, f, [c for c in candidates if c > j and dist[j, c] <= max_radius])

    for i in range(n):
        expand((i,), 0.0, float(values[i]), nbrs[i])
    return Bifiltration(tuple(simplices), max_dim=max_dim, x_label=x_label, y_label=y_label)


def parse_bifiltration(text: str) -> Bifiltration:
    lines = text.split("\n")
    if not lines or lines[0].strip() != HEADER:
        raise BadHeader(f"first line must be {HEADER!r}", line=1)
    if len(lines) < 3:
        raise BadHeader("missing axis label lines", line=len(lines) + 1)
    x_label, y_label = lines[1].rstrip("\r"), lines[2].rstrip("\r")
    simplices = []
    for lineno, raw in enumerate(lines[3:], start=4):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) < 3:
            raise ParseError(f"expected 'v0 ... vd gx gy', got {line!r}", line=lineno)
        try:
            vertices = tuple(int(t) for t in tokens[:-2])
        except ValueError:
            raise UnparsableNumber(f"vertex ids must be integers in {line!r}", line=lineno) from None
        try:
            gx, gy = float(tokens[-2]), float(tokens[-1])
        except ValueError:
            raise UnparsableNumber(f"grade must be two reals in {line!r}", line=lineno) from None
        simplices.append(GradedSimplex(vertices, BiGrade(gx, gy)))
    if not simplices:
        raise EmptyInput("bifiltration file lists no simplices")
    return Bifiltration(tuple(simplices), x_label=x_label, y_label=y_label)


def serialize_bifiltration(b: Bifiltration, comments: Sequence[str] = ()) -> str:
    out = [HEADER, b.x_label, b.y_label]
    out.extend("# " + c for c in comments)
    for vs, g in b.simplices:
        out.append(" ".join(map(str, vs)) + f" {g.x!r} {g.y!r}")
    return "\n".join(out) + "\n"
