"""Monotone piecewise-linear paths in the two-parameter grade plane.

A path is parameterised by its *stretched* coordinate: each segment
contributes ``weight * euclidean_length`` where the weight is the smallest
absolute component of its unit direction. After the last waypoint the
path continues as a ray along the final segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Sequence

import numpy as np

from .bifiltration import BiGrade
from .errors import (
    EmptyInitRegion,
    EmptySearchSpace,
    NegativeCoordinate,
    NonIncreasingSegment,
    PathError,
)

Mode = Literal["pushforward", "orthogonal"]
MODES = ("pushforward", "orthogonal")


def segment_weight(p: Sequence[float], q: Sequence[float]) -> float:
    p, q = BiGrade(*map(float, p)), BiGrade(*map(float, q))
    if not p.strictly_below(q):
        raise NonIncreasingSegment(f"segment {tuple(p)} -> {tuple(q)} is not strictly increasing in every coordinate")
    dx, dy = q.x - p.x, q.y - p.y
    norm = math.hypot(dx, dy)
    return min(abs(dx / norm), abs(dy / norm))


class PathSegment(NamedTuple):
    start: BiGrade
    end: BiGrade
    direction: tuple[float, float]
    weight: float
    euclid_len: float
    stretched_len: float
    stretched_offset: float


@dataclass(frozen=True)
class MonotonePath:
    waypoints: tuple[BiGrade, ...]
    segments: tuple[PathSegment, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        wps = tuple(BiGrade(float(p[0]), float(p[1])) for p in self.waypoints)
        if len(wps) < 2:
            raise PathError(f"a path needs at least 2 waypoints, got {len(wps)}")
        for p in wps:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise PathError(f"waypoint {tuple(p)} is not finite")
        segs = []
        offset = 0.0
        for p, q in zip(wps, wps[1:]):
            w = segment_weight(p, q)
            dx, dy = q.x - p.x, q.y - p.y
            length = math.hypot(dx, dy)
            stretched = w * length
            segs.append(PathSegment(p, q, (dx / length, dy / length), w, length, stretched, offset))
            offset = offset + stretched
        object.__setattr__(self, "waypoints", wps)
        object.__setattr__(self, "segments", tuple(segs))

    @property
    def n_waypoints(self) -> int:
        return len(self.waypoints)

    @property
    def stretched_length(self) -> float:
        last = self.segments[-1]
        return last.stretched_offset + last.stretched_len

    def key(self) -> str:
        """Canonical string for the waypoint sequence."""
        return state_key(self.waypoints)

    def extended(self, p: Sequence[float]) -> MonotonePath:
        return MonotonePath(self.waypoints + (BiGrade(*p),))


def state_key(waypoints: Sequence[Sequence[float]]) -> str:
    return ";".join(f"{float(p[0])!r},{float(p[1])!r}" for p in waypoints)


def point_at(path: MonotonePath, x: float) -> BiGrade:
    if x < 0:
        raise NegativeCoordinate(f"path coordinate must be >= 0, got {x}")
    seg = path.segments[-1]
    for s in path.segments:
        if x < s.stretched_offset + s.stretched_len:
            seg = s
            break
    t = (x - seg.stretched_offset) / seg.stretched_len
    return BiGrade(
        seg.start.x + t * (seg.end.x - seg.start.x),
        seg.start.y + t * (seg.end.y - seg.start.y),
    )


def _first_reach(path: MonotonePath, coord: int, target: float) -> float:
    """Smallest stretched x at which coordinate ``coord`` reaches ``target``."""
    segs = path.segments
    if target <= segs[0].start[coord]:
        return 0.0
    for s in segs:
        if target <= s.end[coord]:
            frac = (target - s.start[coord]) / (s.end[coord] - s.start[coord])
            return s.stretched_offset + frac * s.stretched_len
    s = segs[-1]
    frac = (target - s.start[coord]) / (s.end[coord] - s.start[coord])
    return s.stretched_offset + frac * s.stretched_len


def _orthogonal(path: MonotonePath, g: BiGrade) -> float:
    best_d2 = math.inf
    best_x = 0.0
    last = len(path.segments) - 1
    for i, s in enumerate(path.segments):
        dx, dy = s.end.x - s.start.x, s.end.y - s.start.y
        t = ((g.x - s.start.x) * dx + (g.y - s.start.y) * dy) / (dx * dx + dy * dy)
        if t <= 0.0:
            t, px, py = 0.0, s.start.x, s.start.y
        elif t >= 1.0 and i < last:
            t, px, py = 1.0, s.end.x, s.end.y
        else:
            px, py = s.start.x + t * dx, s.start.y + t * dy
        d2 = (g.x - px) ** 2 + (g.y - py) ** 2
        if d2 < best_d2:
            best_d2 = d2
            best_x = s.stretched_offset + t * s.stretched_len
    return best_x


def entry_value(path: MonotonePath, g: Sequence[float], mode: Mode = "pushforward") -> float:
    """Stretched path coordinate at which a cell graded ``g`` enters.

    ``pushforward``: first x whose path point dominates ``g``.
    ``orthogonal``: coordinate of the Euclidean nearest point of the path.
    """
    g = BiGrade(float(g[0]), float(g[1]))
    if mode == "pushforward":
        return max(_first_reach(path, 0, g.x), _first_reach(path, 1, g.y))
    if mode == "orthogonal":
        return _orthogonal(path, g)
    raise ValueError(f"unknown projection mode {mode!r}; expected one of {MODES}")


def path_to_json(path: MonotonePath) -> dict:
    return {"waypoints": [[p.x, p.y] for p in path.waypoints]}


def path_from_json(doc: dict) -> MonotonePath:
    try:
        wps = doc["waypoints"]
        return MonotonePath(tuple(BiGrade(float(p[0]), float(p[1])) for p in wps))
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise PathError(f"malformed path document: {exc}") from None


@dataclass(frozen=True)
class SearchSpace:
    """Candidate grid plus the step rules for growing a path over it.

    ``guard`` selects how the boundary stop rule combines coordinates:
    ``"any"`` stops as soon as one coordinate cannot advance by its strip,
    ``"all"`` only when none can.
    """

    grid: tuple[BiGrade, ...]
    strip: tuple[float, float]
    lookahead: tuple[int, int]
    horizon: int
    init_min: tuple[float, float]
    init_max: tuple[float, float]
    guard: Literal["any", "all"] = "any"
    grid_max: tuple[float, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        grid = tuple(sorted(set(BiGrade(float(p[0]), float(p[1])) for p in self.grid)))
        if not grid:
            raise EmptySearchSpace("search grid is empty")
        strip = tuple(float(s) for s in self.strip)
        lookahead = tuple(int(n) for n in self.lookahead)
        if len(strip) != 2 or any(not s > 0 for s in strip):
            raise EmptySearchSpace(f"strip sizes must be two positive reals, got {self.strip}")
        if len(lookahead) != 2 or any(n < 1 for n in lookahead):
            raise EmptySearchSpace(f"lookahead must be two integers >= 1, got {self.lookahead}")
        if int(self.horizon) < 1:
            raise EmptySearchSpace(f"horizon must be >= 1, got {self.horizon}")
        if self.guard not in ("any", "all"):
            raise EmptySearchSpace(f"guard must be 'any' or 'all', got {self.guard!r}")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "strip", strip)
        object.__setattr__(self, "lookahead", lookahead)
        object.__setattr__(self, "horizon", int(self.horizon))
        object.__setattr__(self, "init_min", tuple(float(v) for v in self.init_min))
        object.__setattr__(self, "init_max", tuple(float(v) for v in self.init_max))
        object.__setattr__(self, "grid_max", (max(p.x for p in grid), max(p.y for p in grid)))

    @classmethod
    def lattice(cls, grid_min, grid_max, grid_steps, strip, lookahead, horizon,
                init_max, init_min=None, guard="any") -> SearchSpace:
        """Regular lattice with ``grid_steps[i]`` points along axis i."""
        axes = []
        for lo, hi, n in zip(grid_min, grid_max, grid_steps):
            n = int(n)
            if n < 1 or hi < lo:
                raise EmptySearchSpace(f"bad lattice axis [{lo}, {hi}] with {n} points")
            axes.append([float(lo)] if n == 1 else [float(v) for v in np.linspace(lo, hi, n)])
        grid = [BiGrade(a, b) for a in axes[0] for b in axes[1]]
        return cls(
            grid=tuple(grid),
            strip=tuple(strip),
            lookahead=tuple(lookahead),
            horizon=horizon,
            init_min=tuple(grid_min if init_min is None else init_min),
            init_max=tuple(init_max),
            guard=guard,
        )

    @classmethod
    def from_json(cls, doc: dict) -> SearchSpace:
        try:
            return cls.lattice(
                doc["grid_min"], doc["grid_max"], doc["grid_steps"], doc["strip"],
                doc["lookahead"], doc["horizon"], doc["init_max"],
                init_min=doc.get("init_min"), guard=doc.get("guard", "any"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise EmptySearchSpace(f"malformed search space document: {exc!r}") from None

    def init_points(self) -> list[BiGrade]:
        lo, hi = self.init_min, self.init_max
        return [p for p in self.grid if lo[0] <= p.x <= hi[0] and lo[1] <= p.y <= hi[1]]


def admissible_next_points(space: SearchSpace, current: Sequence[float], steps_taken: int) -> list[BiGrade]:
    """Grid points that may follow ``current``, sorted lexicographically.

    Each coordinate must land strictly inside ``(c_i, c_i + n_i * strip_i)``.
    """
    if steps_taken >= space.horizon:
        return []
    c = (float(current[0]), float(current[1]))
    blocked = [c[i] + space.strip[i] > space.grid_max[i] for i in range(2)]
    if (any(blocked) if space.guard == "any" else all(blocked)):
        return []
    hi = [c[i] + space.lookahead[i] * space.strip[i] for i in range(2)]
    return [p for p in space.grid if c[0] < p.x < hi[0] and c[1] < p.y < hi[1]]


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_initial_point(space: SearchSpace, seed) -> BiGrade:
    candidates = space.init_points()
    if not candidates:
        raise EmptyInitRegion(
            f"no grid point inside the initialisation box {space.init_min} .. {space.init_max}"
        )
    rng = as_generator(seed)
    return candidates[int(rng.integers(len(candidates)))]
