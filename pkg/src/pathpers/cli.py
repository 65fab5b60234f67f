"""Command-line interface.

Subcommands:

- ``build``     point cloud -> bifiltration file (Rips x codensity axes)
- ``distance``  distance between two bifiltrations along one path
- ``optimize``  search path space for the most discriminating path
- ``matching``  slice-sampled matching distance baseline

Exit codes: 0 success, 1 internal error, 2 parse error, 3 validation
error, 4 invalid path, 5 empty or invalid search space.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .bifiltration import (
    Bifiltration,
    build_codensity_values,
    build_function_rips,
    parse_bifiltration,
    parse_point_cloud,
    serialize_bifiltration,
)
from .errors import ParseError, PathPersError, SearchSpaceError
from .path import SearchSpace, path_from_json, path_to_json
from .search import (
    QTable,
    QueryConfig,
    _num,
    diagram_distance,
    ensemble_search,
    greedy_search,
    joint_bounds,
    path_diagrams,
    qlearn_search,
    slice_family,
    slice_values,
)

logger = logging.getLogger("pathpers")


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _text(path: str, data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path} is not UTF-8: {exc}") from None


def _json_file(path: str, data: bytes, error=ParseError) -> dict:
    try:
        return json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise error(f"{path} is not valid JSON: {exc}") from None


def _bifiltration(path: str, data: bytes) -> Bifiltration:
    return parse_bifiltration(_text(path, data))


class Manifest:
    """Collects what is needed to rerun a command."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.inputs: dict[str, str] = {}
        self.start = time.perf_counter()

    def read(self, role: str, path: str) -> bytes:
        """Read an input once, recording its digest (works for pipes too)."""
        data = _read(path)
        self.inputs[role] = hashlib.sha256(data).hexdigest()
        return data

    def to_json(self) -> dict:
        params = {k: _num(v) if isinstance(v, float) else v for k, v in sorted(vars(self.args).items())
                  if k not in ("func", "out", "timing", "verbose")}
        doc = {
            "command": self.args.command,
            "parameters": params,
            "seed": getattr(self.args, "seed", None),
            "inputs": self.inputs,
            "version": __version__,
        }
        if getattr(self.args, "timing", False):
            doc["wall_time_s"] = time.perf_counter() - self.start
        return doc


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _dump(doc: dict, out: str | None) -> None:
    _emit(json.dumps(doc, indent=2, allow_nan=False) + "\n", out)


def _config(args) -> QueryConfig:
    return QueryConfig(metric=args.metric, q=args.q, hom_dim=args.dim, mode=args.mode)


def cmd_build(args) -> None:
    manifest = Manifest(args)
    pc = parse_point_cloud(_text(args.input, manifest.read("input", args.input)))
    values = build_codensity_values(pc, args.k)
    b = build_function_rips(pc, values, args.max_dim, args.max_radius,
                            x_label="rips", y_label=f"codensity k={args.k}")
    logger.info("built %d simplices from %d points", len(b), len(pc))
    comment = "manifest " + json.dumps(manifest.to_json(), sort_keys=True, allow_nan=False)
    _emit(serialize_bifiltration(b, comments=[comment]), args.out)


def cmd_distance(args) -> None:
    manifest = Manifest(args)
    A = _bifiltration(args.a, manifest.read("a", args.a))
    B = _bifiltration(args.b, manifest.read("b", args.b))
    path = path_from_json(_json_file(args.path, manifest.read("path", args.path)))
    cfg = _config(args)
    da, db = path_diagrams(path, A, B, cfg)
    _dump({
        "distance": _num(diagram_distance(da, db, cfg)),
        "metric": cfg.metric,
        "q": cfg.q,
        "dim": cfg.hom_dim,
        "mode": cfg.mode,
        "path": path_to_json(path),
        "diagram_a": da.to_json(),
        "diagram_b": db.to_json(),
        "manifest": manifest.to_json(),
    }, args.out)


def cmd_optimize(args) -> None:
    manifest = Manifest(args)
    A = _bifiltration(args.a, manifest.read("a", args.a))
    B = _bifiltration(args.b, manifest.read("b", args.b))
    space = SearchSpace.from_json(_json_file(args.space, manifest.read("space", args.space), SearchSpaceError))
    cfg = _config(args)
    if args.strategy == "ensemble":
        result = ensemble_search(A, B, space, cfg, args.rollouts, args.seed, jobs=args.jobs)
    elif args.strategy == "greedy":
        result = greedy_search(A, B, space, cfg, args.seed)
    else:
        table = QTable(alpha=args.alpha, gamma=args.gamma, exploit=args.exploit)
        result = qlearn_search(A, B, space, cfg, args.episodes, table, args.seed,
                               terminal_only=args.terminal_reward)
    logger.info("%s: best %s after %d evaluations", args.strategy, result.best_value, result.evaluations)
    doc = result.to_json()
    doc["strategy"] = args.strategy
    doc["manifest"] = manifest.to_json()
    _dump(doc, args.out)


def cmd_matching(args) -> None:
    manifest = Manifest(args)
    A = _bifiltration(args.a, manifest.read("a", args.a))
    B = _bifiltration(args.b, manifest.read("b", args.b))
    cfg = QueryConfig(metric="bottleneck", hom_dim=args.dim, mode=args.mode)
    paths = slice_family(*joint_bounds(A, B), args.slices)
    values = slice_values(A, B, cfg, paths, args.jobs)
    best = max(range(len(values)), key=lambda i: (values[i], -i))
    _dump({
        "matching_distance": _num(values[best]),
        "slices": args.slices,
        "dim": args.dim,
        "best_slice": path_to_json(paths[best]),
        "slice_values": [{"path": path_to_json(p), "value": _num(v)} for p, v in zip(paths, values)],
        "manifest": manifest.to_json(),
    }, args.out)


def _query_flags(p: argparse.ArgumentParser, metric: bool = True) -> None:
    if metric:
        p.add_argument("--metric", choices=["bottleneck", "wasserstein"], default="bottleneck")
        p.add_argument("--q", type=float, default=1.0, help="Wasserstein order (>= 1)")
    p.add_argument("--dim", type=int, default=1, help="homology dimension")
    p.add_argument("--mode", choices=["pushforward", "orthogonal"], default="pushforward",
                   help="how grades are mapped onto the path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathpers", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a Rips x codensity bifiltration from a point cloud")
    p.add_argument("--input", required=True, help="point cloud, one point per line")
    p.add_argument("--k", type=int, default=5, help="neighbour rank for the codensity axis")
    p.add_argument("--max-dim", type=int, default=2, help="top simplex dimension")
    p.add_argument("--max-radius", type=float, default=float("inf"), help="largest edge length kept")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("distance", help="distance along a single path")
    p.add_argument("--a", required=True, help="first bifiltration file")
    p.add_argument("--b", required=True, help="second bifiltration file")
    p.add_argument("--path", required=True, help='path JSON {"waypoints": [[x, y], ...]}')
    _query_flags(p)
    p.add_argument("--out", help="output JSON (default: stdout)")
    p.add_argument("--timing", action="store_true", help="record wall time (output no longer reproducible)")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("optimize", help="search for the most discriminating path")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--space", required=True, help="search space JSON")
    p.add_argument("--strategy", choices=["ensemble", "greedy", "qlearn"], default="ensemble")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rollouts", type=int, default=32, help="ensemble size")
    p.add_argument("--episodes", type=int, default=100, help="Q-learning episodes")
    p.add_argument("--alpha", type=float, default=0.1, help="Q-learning rate")
    p.add_argument("--gamma", type=float, default=0.9, help="Q-learning discount")
    p.add_argument("--exploit", type=float, default=0.9, help="probability of the greedy action")
    p.add_argument("--terminal-reward", action="store_true", help="reward only completed paths")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for distance evaluations")
    _query_flags(p)
    p.add_argument("--out")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("matching", help="approximate matching distance by slice sampling")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--slices", type=int, default=64)
    p.add_argument("--jobs", type=int, default=1)
    _query_flags(p, metric=False)
    p.add_argument("--out")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_matching)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except PathPersError as exc:
        print(f"{args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001
        print(f"{args.command}: internal error: {exc!r}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
