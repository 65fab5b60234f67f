"""Distance queries along paths and searches over path space."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Literal, NamedTuple, Sequence

import numpy as np

from .bifiltration import BiGrade, Bifiltration
from .distances import bottleneck, wasserstein
from .errors import BadQ, EmptySearchSpace, ValidationError
from .path import (
    MODES,
    Mode,
    MonotonePath,
    SearchSpace,
    admissible_next_points,
    as_generator,
    path_to_json,
    sample_initial_point,
    state_key,
)
from .persistence import PersistenceDiagram, compute_diagrams
from .slicer import slice_bifiltration

Evaluator = Callable[[MonotonePath], float]


@dataclass(frozen=True)
class QueryConfig:
    metric: Literal["bottleneck", "wasserstein"] = "bottleneck"
    q: float = 1.0
    hom_dim: int = 1
    mode: Mode = "pushforward"

    def __post_init__(self):
        if self.metric not in ("bottleneck", "wasserstein"):
            raise ValidationError(f"unknown metric {self.metric!r}")
        if self.metric == "wasserstein" and not (math.isfinite(self.q) and self.q >= 1):
            raise BadQ(f"Wasserstein order must be a finite real >= 1, got {self.q}")
        if self.mode not in MODES:
            raise ValidationError(f"unknown projection mode {self.mode!r}")
        if self.hom_dim < 0:
            raise ValidationError(f"homology dimension must be >= 0, got {self.hom_dim}")


def path_diagrams(path: MonotonePath, A: Bifiltration, B: Bifiltration,
                  cfg: QueryConfig) -> tuple[PersistenceDiagram, PersistenceDiagram]:
    da = compute_diagrams(slice_bifiltration(A, path, cfg.mode), cfg.hom_dim)[cfg.hom_dim]
    db = compute_diagrams(slice_bifiltration(B, path, cfg.mode), cfg.hom_dim)[cfg.hom_dim]
    return da, db


def diagram_distance(da: PersistenceDiagram, db: PersistenceDiagram, cfg: QueryConfig) -> float:
    if cfg.metric == "bottleneck":
        return bottleneck(da, db)[0]
    return wasserstein(da, db, cfg.q)[0]


def query_distance(path: MonotonePath, A: Bifiltration, B: Bifiltration, cfg: QueryConfig = QueryConfig()) -> float:
    """Distance between the diagrams of A and B restricted to ``path``.

    Values come out already in the stretched coordinate, so no separate
    rescaling step is needed. Infinite when essential class counts differ.
    """
    return diagram_distance(*path_diagrams(path, A, B, cfg), cfg)


def _query_task(args) -> float:
    return query_distance(*args)


class _CachedEvaluator:
    """Memoises path values by waypoint sequence and counts distinct evaluations."""

    def __init__(self, A, B, cfg, evaluate: Evaluator | None = None, jobs: int = 1):
        self.A, self.B, self.cfg = A, B, cfg
        self.evaluate = evaluate
        self.jobs = max(1, int(jobs))
        self.cache: dict[str, float] = {}

    @property
    def count(self) -> int:
        return len(self.cache)

    def __call__(self, path: MonotonePath) -> float:
        k = path.key()
        if k not in self.cache:
            if self.evaluate is not None:
                self.cache[k] = float(self.evaluate(path))
            else:
                self.cache[k] = query_distance(path, self.A, self.B, self.cfg)
        return self.cache[k]

    def many(self, paths: Sequence[MonotonePath]) -> list[float]:
        todo = {}
        for p in paths:
            if p.key() not in self.cache:
                todo.setdefault(p.key(), p)
        if todo and self.jobs > 1 and self.evaluate is None:
            items = list(todo.values())
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                vals = list(pool.map(_query_task, [(p, self.A, self.B, self.cfg) for p in items]))
            for p, v in zip(items, vals):
                self.cache[p.key()] = v
        return [self(p) for p in paths]


def _num(v: float):
    if math.isfinite(v):
        return v
    return "inf" if v > 0 else ("-inf" if v < 0 else "nan")


@dataclass(frozen=True)
class SearchResult:
    best_path: MonotonePath
    best_value: float
    evaluations: int
    history: tuple[tuple[MonotonePath, float], ...]

    @classmethod
    def from_history(cls, history: Sequence[tuple[MonotonePath, float]], evaluations: int) -> SearchResult:
        if not history:
            raise EmptySearchSpace("search produced no path with at least two waypoints")
        best = 0
        for i, (_, v) in enumerate(history):
            if v > history[best][1]:
                best = i
        return cls(history[best][0], history[best][1], evaluations, tuple(history))

    def to_json(self) -> dict:
        return {
            "best_path": path_to_json(self.best_path),
            "best_value": _num(self.best_value),
            "evaluations": self.evaluations,
            "history": [{"path": path_to_json(p), "value": _num(v)} for p, v in self.history],
        }


def random_rollout(space: SearchSpace, rng: np.random.Generator) -> tuple[BiGrade, ...]:
    wps = [sample_initial_point(space, rng)]
    while True:
        adm = admissible_next_points(space, wps[-1], len(wps) - 1)
        if not adm:
            return tuple(wps)
        wps.append(adm[int(rng.integers(len(adm)))])


def ensemble_search(A: Bifiltration, B: Bifiltration, space: SearchSpace, cfg: QueryConfig = QueryConfig(),
                    n_rollouts: int = 32, seed=0, *, seed_paths: Sequence[MonotonePath] = (),
                    evaluate: Evaluator | None = None, jobs: int = 1) -> SearchResult:
    """Best of ``n_rollouts`` uniformly random admissible paths.

    ``seed_paths`` are evaluated alongside the rollouts, e.g. a family of
    straight slices the result should dominate.
    """
    if n_rollouts < 1 and not seed_paths:
        raise EmptySearchSpace("ensemble search needs n_rollouts >= 1")
    rng = as_generator(seed)
    paths = list(seed_paths)
    for _ in range(n_rollouts):
        wps = random_rollout(space, rng)
        if len(wps) >= 2:
            paths.append(MonotonePath(wps))
    ev = _CachedEvaluator(A, B, cfg, evaluate, jobs)
    values = ev.many(paths)
    return SearchResult.from_history(list(zip(paths, values)), ev.count)


def greedy_search(A: Bifiltration, B: Bifiltration, space: SearchSpace, cfg: QueryConfig = QueryConfig(),
                  seed=0, *, evaluate: Evaluator | None = None) -> SearchResult:
    """Extend the path one point at a time by the best-scoring successor."""
    rng = as_generator(seed)
    ev = _CachedEvaluator(A, B, cfg, evaluate)
    wps = (sample_initial_point(space, rng),)
    history = []
    while True:
        adm = admissible_next_points(space, wps[-1], len(wps) - 1)
        if not adm:
            break
        best_path, best_val = None, -math.inf
        for a in adm:  # adm is sorted, so ties keep the lexicographically smallest
            p = MonotonePath(wps + (a,))
            v = ev(p)
            if best_path is None or v > best_val:
                best_path, best_val = p, v
        wps = best_path.waypoints
        history.append((best_path, best_val))
    return SearchResult.from_history(history, ev.count)


class TraceStep(NamedTuple):
    state: str
    action: BiGrade
    reward: float
    next_state: str
    next_actions: tuple[BiGrade, ...]


@dataclass
class QTable:
    alpha: float = 0.1
    gamma: float = 0.9
    exploit: float = 0.9
    values: dict[str, dict[BiGrade, float]] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValidationError(f"learning rate must lie in (0, 1], got {self.alpha}")
        if not 0 <= self.gamma <= 1:
            raise ValidationError(f"discount must lie in [0, 1], got {self.gamma}")
        if not 0 <= self.exploit <= 1:
            raise ValidationError(f"exploit probability must lie in [0, 1], got {self.exploit}")

    def get(self, state: str, action: BiGrade) -> float:
        return self.values.get(state, {}).get(action, 0.0)

    def best_action(self, state: str, actions: Sequence[BiGrade]) -> BiGrade:
        """Argmax over ``actions``; unseen actions count as 0, ties go to the smallest."""
        best = min(actions)
        best_v = self.get(state, best)
        for a in sorted(actions):
            v = self.get(state, a)
            if v > best_v:
                best, best_v = a, v
        return best

    def max_value(self, state: str, actions: Sequence[BiGrade]) -> float:
        return max((self.get(state, a) for a in actions), default=0.0)

    def update(self, step: TraceStep) -> None:
        if not math.isfinite(step.reward):
            return
        old = self.get(step.state, step.action)
        target = step.reward + self.gamma * self.max_value(step.next_state, step.next_actions)
        self.values.setdefault(step.state, {})[step.action] = old + self.alpha * (target - old)


def replay_trace(trace: Sequence[TraceStep], alpha: float, gamma: float, exploit: float = 0.9) -> QTable:
    table = QTable(alpha, gamma, exploit)
    for step in trace:
        table.update(step)
    return table


def train_q(A: Bifiltration | None, B: Bifiltration | None, space: SearchSpace, cfg: QueryConfig = QueryConfig(),
            episodes: int = 100, table: QTable | None = None, seed=0, *, terminal_only: bool = False,
            evaluate: Evaluator | None = None) -> tuple[SearchResult, QTable, list[TraceStep]]:
    """Tabular Q-learning over partial paths.

    States are waypoint sequences, actions are the next grid point. The
    reward of a step is the distance of the path built so far; with
    ``terminal_only`` intermediate steps earn 0.
    """
    if episodes < 1:
        raise EmptySearchSpace("Q-learning needs episodes >= 1")
    table = QTable() if table is None else table
    rng = as_generator(seed)
    ev = _CachedEvaluator(A, B, cfg, evaluate)
    trace: list[TraceStep] = []
    history = []
    for _ in range(episodes):
        wps = (sample_initial_point(space, rng),)
        adm = admissible_next_points(space, wps[-1], 0)
        while adm:
            s = state_key(wps)
            if rng.random() < table.exploit:
                a = table.best_action(s, adm)
            else:
                a = adm[int(rng.integers(len(adm)))]
            nxt = wps + (a,)
            next_adm = admissible_next_points(space, a, len(nxt) - 1)
            path = MonotonePath(nxt)
            r = ev(path) if (next_adm == [] or not terminal_only) else 0.0
            step = TraceStep(s, a, r, state_key(nxt), tuple(next_adm))
            table.update(step)
            trace.append(step)
            wps, adm = nxt, next_adm
        if len(wps) >= 2:
            path = MonotonePath(wps)
            history.append((path, ev(path)))
    return SearchResult.from_history(history, ev.count), table, trace


def qlearn_search(A: Bifiltration, B: Bifiltration, space: SearchSpace, cfg: QueryConfig = QueryConfig(),
                  episodes: int = 100, qparams: QTable | None = None, seed=0, *, terminal_only: bool = False,
                  evaluate: Evaluator | None = None) -> SearchResult:
    return train_q(A, B, space, cfg, episodes, qparams, seed, terminal_only=terminal_only, evaluate=evaluate)[0]


def slice_family(lo: Sequence[float], hi: Sequence[float], n_slices: int) -> list[MonotonePath]:
    """Deterministic family of straight slices crossing the box ``[lo, hi]``.

    Angles sweep (0, pi/2); offsets are anchor points spread along the box
    anti-diagonal. Each slice starts below ``lo`` so it covers the box.
    """
    if n_slices < 1:
        raise ValidationError(f"need at least one slice, got {n_slices}")
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    span = hi - lo
    n_ang = math.ceil(math.sqrt(n_slices))
    n_off = math.ceil(n_slices / n_ang)
    length = max(float(np.hypot(*span)), 1.0)
    out = []
    for k in range(n_ang):
        theta = (k + 0.5) / n_ang * (math.pi / 2)
        v = np.array([math.cos(theta), math.sin(theta)])
        for j in range(n_off):
            if len(out) == n_slices:
                return out
            s = (j + 0.5) / n_off
            anchor = np.array([lo[0] + s * span[0], hi[1] - s * span[1]])
            t0 = min((lo[0] - anchor[0]) / v[0], (lo[1] - anchor[1]) / v[1])
            p0 = anchor + t0 * v
            out.append(MonotonePath((BiGrade(*p0), BiGrade(*(p0 + length * v)))))
    return out


def joint_bounds(A: Bifiltration, B: Bifiltration) -> tuple[BiGrade, BiGrade]:
    (alo, ahi), (blo, bhi) = A.bounding_box(), B.bounding_box()
    return (BiGrade(min(alo.x, blo.x), min(alo.y, blo.y)), BiGrade(max(ahi.x, bhi.x), max(ahi.y, bhi.y)))


def slice_values(A: Bifiltration, B: Bifiltration, cfg: QueryConfig, paths: Sequence[MonotonePath],
                 jobs: int = 1) -> list[float]:
    return _CachedEvaluator(A, B, cfg, jobs=jobs).many(paths)


def matching_distance_approx(A: Bifiltration, B: Bifiltration, cfg: QueryConfig = QueryConfig(),
                             n_slices: int = 64, *, paths: Sequence[MonotonePath] | None = None,
                             jobs: int = 1) -> float:
    """Max stretched bottleneck distance over a finite slice family."""
    cfg = replace(cfg, metric="bottleneck")
    if paths is None:
        paths = slice_family(*joint_bounds(A, B), n_slices)
    return max(slice_values(A, B, cfg, paths, jobs))
