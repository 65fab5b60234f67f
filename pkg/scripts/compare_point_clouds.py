"""Compare two noisy point-cloud shapes with every path strategy and the slice baseline.

    python3 scripts/compare_point_clouds.py --shape-a circle --shape-b eight --seed 0
"""

import argparse
import time

import numpy as np

from pathpers import (
    PointCloud,
    QueryConfig,
    SearchSpace,
    build_codensity_values,
    build_function_rips,
    ensemble_search,
    greedy_search,
    matching_distance_approx,
    qlearn_search,
)
from pathpers.search import joint_bounds

SHAPES = ("circle", "eight", "blob")


def sample_shape(name, n, noise, rng):
    t = rng.uniform(0, 2 * np.pi, n)
    if name == "circle":
        pts = np.c_[np.cos(t), np.sin(t)]
    elif name == "eight":
        pts = np.c_[np.sin(t), np.sin(t) * np.cos(t)]
    else:
        pts = rng.normal(0, 0.5, (n, 2))
    return pts + rng.normal(0, noise, pts.shape)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--shape-a", choices=SHAPES, default="circle")
    ap.add_argument("--shape-b", choices=SHAPES, default="eight")
    ap.add_argument("--n", type=int, default=24)
    ap.add_argument("--noise", type=float, default=0.05)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--max-radius", type=float, default=3.0,
                    help="large enough to fill every loop, so essential classes agree")
    ap.add_argument("--dim", type=int, default=1)
    ap.add_argument("--grid", type=int, default=7, help="grid points per axis")
    ap.add_argument("--horizon", type=int, default=4)
    ap.add_argument("--rollouts", type=int, default=64)
    ap.add_argument("--episodes", type=int, default=64)
    ap.add_argument("--slices", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    bifs = []
    for shape in (args.shape_a, args.shape_b):
        pc = PointCloud(sample_shape(shape, args.n, args.noise, rng))
        bifs.append(build_function_rips(pc, build_codensity_values(pc, args.k), 2, args.max_radius))
    A, B = bifs
    print(f"{args.shape_a}: {len(A.simplices)} simplices, {args.shape_b}: {len(B.simplices)} simplices")

    lo, hi = joint_bounds(A, B)
    strip = ((hi.x - lo.x) / (args.grid - 1), (hi.y - lo.y) / (args.grid - 1))
    space = SearchSpace.lattice(lo, hi, (args.grid, args.grid), strip, (2, 2), args.horizon,
                                (lo.x + strip[0], lo.y + strip[1]))
    cfg = QueryConfig(hom_dim=args.dim)

    runs = {
        "matching": lambda: matching_distance_approx(A, B, cfg, args.slices),
        "ensemble": lambda: ensemble_search(A, B, space, cfg, args.rollouts, seed=args.seed).best_value,
        "greedy": lambda: greedy_search(A, B, space, cfg, seed=args.seed).best_value,
        "qlearn": lambda: qlearn_search(A, B, space, cfg, args.episodes, seed=args.seed).best_value,
    }
    for name, run in runs.items():
        t0 = time.perf_counter()
        value = run()
        print(f"{name:>9}  H{args.dim} bottleneck {value:.6f}  ({time.perf_counter() - t0:.2f}s)")


if __name__ == "__main__":
    main()
