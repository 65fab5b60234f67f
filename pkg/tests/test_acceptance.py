"""Exit criteria. Each test prints one PASS/FAIL line (also shown in the summary)."""

import json
import math
import random
import time

import numpy as np

from pathpers.bifiltration import BiGrade, Bifiltration, GradedSimplex, PointCloud, build_function_rips
from pathpers.cli import main
from pathpers.distances import bottleneck, scale_diagram, wasserstein
from pathpers.path import MonotonePath, SearchSpace, admissible_next_points
from pathpers.persistence import PersistenceDiagram, compute_diagrams
from pathpers.search import (
    QueryConfig,
    diagram_distance,
    ensemble_search,
    greedy_search,
    joint_bounds,
    matching_distance_approx,
    qlearn_search,
    query_distance,
    replay_trace,
    slice_family,
    train_q,
)
from pathpers.slicer import ScalarFiltration

from oracles import (
    ACCEPTANCE_LINES,
    betti_numbers,
    brute_bottleneck,
    brute_wasserstein,
    diagram_as_points,
    line_slice_params,
    planted_reward,
    planted_space,
    random_bigrades,
    random_complex,
    random_diagram_points,
    random_scalar_values,
)


def report(n, ok, detail):
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def diagram_corpus(n_pairs, seed, max_total=6):
    rng = random.Random(seed)
    out = []
    for _ in range(n_pairs):
        total = rng.randint(0, max_total)
        e = rng.choice([0, 0, 0, 1, 1, 2]) if total >= 2 else 0
        k = total - e
        na = rng.randint(0, k)
        ea = rng.randint(0, e)
        eb = e - ea if rng.random() < 0.8 else e - ea + (1 if total < max_total else 0)
        eb = max(0, min(eb, total - na - ea))
        nb = max(0, total - na - ea - eb)
        a, ca = random_diagram_points(rng, na, ea)
        b, cb = random_diagram_points(rng, nb, eb)
        out.append((PersistenceDiagram(0, tuple(a), tuple(ca)), PersistenceDiagram(0, tuple(b), tuple(cb))))
    return out


CORPUS = diagram_corpus(500, 2024)


def test_c01_bottleneck_oracle():
    t0 = time.perf_counter()
    bad = [i for i, (a, b) in enumerate(CORPUS)
           if bottleneck(a, b)[0] != brute_bottleneck(diagram_as_points(a), diagram_as_points(b))]
    dt = time.perf_counter() - t0
    assert all(len(a) + len(b) <= 6 for a, b in CORPUS)
    report(1, not bad and dt < 10, f"bottleneck == brute force on {len(CORPUS)} pairs exactly; "
                                   f"{len(bad)} mismatches; {dt:.2f}s (< 10s)")


def test_c02_wasserstein_oracle():
    t0 = time.perf_counter()
    worst = 0.0
    bad = 0
    for a, b in CORPUS:
        for q in (1, 2, 3):
            got = wasserstein(a, b, q)[0]
            want = brute_wasserstein(diagram_as_points(a), diagram_as_points(b), q)
            if math.isinf(want) or math.isinf(got):
                bad += got != want
            else:
                worst = max(worst, abs(got - want))
    dt = time.perf_counter() - t0
    report(2, bad == 0 and worst <= 1e-9 and dt < 30,
           f"q-Wasserstein q in {{1,2,3}} vs brute force: max err {worst:.2e} (<= 1e-9), "
           f"{bad} infinity mismatches; {dt:.2f}s (< 30s)")


def test_c03_scaling_equivariance():
    rng = random.Random(3)
    pairs = diagram_corpus(200, 77, max_total=16)
    worst = 0.0
    for a, b in pairs:
        w = 1.0 - rng.random()  # (0, 1]
        sa, sb = scale_diagram(a, w), scale_diagram(b, w)
        checks = [(bottleneck(sa, sb)[0], bottleneck(a, b)[0])]
        checks += [(wasserstein(sa, sb, q)[0], wasserstein(a, b, q)[0]) for q in (1, 2, 3)]
        for scaled, plain in checks:
            if math.isinf(plain):
                worst = max(worst, 0.0 if math.isinf(scaled) else math.inf)
            else:
                worst = max(worst, abs(scaled - w * plain))
    report(3, worst <= 1e-9, f"d(wA, wB) = w d(A, B) on 200 pairs, bottleneck + q in {{1,2,3}}: "
                             f"max err {worst:.2e} (<= 1e-9)")


def bifiltration_from(grades):
    return Bifiltration(tuple(GradedSimplex(s, BiGrade(*g)) for s, g in grades.items()))


def oracle_slice_distance(A, B, p0, p1, cfg):
    """Unstretched line slice, diagrams, distance, then times the weight."""
    def diagram(b):
        ts, w = line_slice_params([s.grade for s in b.simplices], p0, p1)
        f = ScalarFiltration.from_values({s.vertices: t for s, t in zip(b.simplices, ts)}, max_dim=b.max_dim)
        return compute_diagrams(f, cfg.hom_dim)[cfg.hom_dim], w
    (da, w), (db, _) = diagram(A), diagram(B)
    return w * diagram_distance(da, db, cfg)


def test_c04_slice_consistency():
    rng = random.Random(4)
    worst = 0.0
    n = 0
    for i in range(50):
        cx = random_complex(rng, 40, n_vertices=(4, 7))
        assert len(cx) <= 40
        A, B = bifiltration_from(random_bigrades(rng, cx)), bifiltration_from(random_bigrades(rng, cx))
        cfg = [QueryConfig(hom_dim=0), QueryConfig(hom_dim=1),
               QueryConfig(metric="wasserstein", q=2, hom_dim=0),
               QueryConfig(metric="wasserstein", q=1, hom_dim=1)][i % 4]
        for _ in range(20):
            p0 = (rng.uniform(-1, 2), rng.uniform(-1, 2))
            theta = rng.uniform(0.02, math.pi / 2 - 0.02)
            length = rng.uniform(0.1, 4)
            p1 = (p0[0] + length * math.cos(theta), p0[1] + length * math.sin(theta))
            got = query_distance(MonotonePath((p0, p1)), A, B, cfg)
            want = oracle_slice_distance(A, B, p0, p1, cfg)
            err = 0.0 if got == want else abs(got - want)
            worst = max(worst, err)
            n += 1
    report(4, worst <= 1e-9, f"query_distance vs straight-line oracle on {n} (bifiltration, slice) cases: "
                             f"max err {worst:.2e} (<= 1e-9)")


def test_c05_persistence_betti():
    rng = random.Random(5)
    mismatches = 0
    checks = 0
    for _ in range(100):
        vals = random_scalar_values(rng, random_complex(rng, 30))
        top = max(len(s) for s in vals) - 1
        diags = compute_diagrams(ScalarFiltration.from_values(vals, max_dim=max(2, top)), 2)
        levels = sorted(set(vals.values()))
        cands = levels + [(a + b) / 2 for a, b in zip(levels, levels[1:])] + [levels[-1] + 1]
        for t in rng.sample(cands, min(10, len(cands))) + rng.choices(cands, k=max(0, 10 - len(cands))):
            counts = [sum(b <= t < d for b, d in dg.finite_pairs) + sum(b <= t for b in dg.essential_births)
                      for dg in diags]
            sub = [s for s, v in vals.items() if v <= t]
            mismatches += counts != betti_numbers(sub, 2)
            checks += 1
    report(5, mismatches == 0, f"interval counts == GF(2) rank Betti numbers in dims 0-2 at {checks} "
                               f"thresholds over 100 filtrations; {mismatches} mismatches")


def random_rips_pair(rng):
    n = rng.randint(5, 8)
    pts_a = np.array([[rng.random(), rng.random()] for _ in range(n)])
    pts_b = pts_a + np.array([[rng.gauss(0, 0.15), rng.gauss(0, 0.15)] for _ in range(n)])
    A = build_function_rips(PointCloud(pts_a), [rng.random() for _ in range(n)], 2, 10.0)
    B = build_function_rips(PointCloud(pts_b), [rng.random() for _ in range(n)], 2, 10.0)
    return A, B


def lattice_over(A, B, steps=6, lookahead=2, horizon=4):
    lo, hi = joint_bounds(A, B)
    span = (max(hi.x - lo.x, 1e-6), max(hi.y - lo.y, 1e-6))
    strip = (span[0] / (steps - 1), span[1] / (steps - 1))
    return SearchSpace.lattice(lo, (lo.x + span[0], lo.y + span[1]), (steps, steps), strip,
                               (lookahead, lookahead), horizon, (lo.x + strip[0], lo.y + strip[1]))


def test_c06_dominates_matching():
    rng = random.Random(6)
    rows = []
    for i in range(10):
        A, B = random_rips_pair(rng)
        cfg = QueryConfig(hom_dim=i % 2)
        family = slice_family(*joint_bounds(A, B), 32)
        match = matching_distance_approx(A, B, cfg, paths=family)
        assert match == matching_distance_approx(A, B, cfg, 32)
        res = ensemble_search(A, B, lattice_over(A, B), cfg, n_rollouts=16, seed=i, seed_paths=family)
        rows.append((res.best_value, match))
    ok = all(best >= match for best, match in rows)
    report(6, ok, f"ensemble(best incl. 32 slices) >= matching approx on 10 pairs exactly; "
                  f"margins {[round(b - m, 4) for b, m in rows]}")


def test_c07_admissible_points():
    grid = SearchSpace.lattice((0, 0), (3, 3), (4, 4), (1, 1), (1, 1), 5, (0, 0))
    ex1 = admissible_next_points(grid, (1, 1), 0) == []
    grid2 = SearchSpace.lattice((0, 0), (3, 3), (4, 4), (1.5, 1.5), (1, 1), 5, (0, 0))
    ex2 = set(admissible_next_points(grid2, (1, 1), 0)) == {(2.0, 2.0)}
    rng = random.Random(7)
    bad = 0
    for _ in range(100):
        steps = (rng.randint(1, 8), rng.randint(1, 8))
        lo = (rng.choice([0, -1, 0.5]), rng.choice([0, 2]))
        hi = (lo[0] + rng.choice([1, 3, 4.5]), lo[1] + rng.choice([1, 2, 6]))
        strip = (rng.choice([0.25, 0.5, 1, 1.5, 2]), rng.choice([0.25, 0.5, 1, 1.5, 2]))
        look = (rng.randint(1, 3), rng.randint(1, 3))
        horizon = rng.randint(1, 4)
        sp = SearchSpace.lattice(lo, hi, steps, strip, look, horizon, lo)
        cur = rng.choice(sp.grid)
        taken = rng.randint(0, 5)
        gmax = (max(p[0] for p in sp.grid), max(p[1] for p in sp.grid))
        if taken >= horizon or any(cur[i] + strip[i] > gmax[i] for i in range(2)):
            want = set()
        else:
            want = {p for p in sp.grid if all(cur[i] < p[i] < cur[i] + look[i] * strip[i] for i in range(2))}
        bad += set(admissible_next_points(sp, cur, taken)) != want
    report(7, ex1 and ex2 and bad == 0,
           f"grid {{0..3}}^2 examples (empty: {ex1}, {{(2,2)}}: {ex2}); 100 random cases, {bad} mismatches")


def test_c08_qlearning_planted():
    t0 = time.perf_counter()
    space = planted_space()
    greedy = greedy_search(None, None, space, seed=0, evaluate=planted_reward)
    result, table, trace = train_q(None, None, space, episodes=200, seed=0, evaluate=planted_reward)
    replayed = replay_trace(trace, table.alpha, table.gamma, table.exploit)
    same = replayed.values == table.values and all(
        v.hex() == replayed.values[s][a].hex() for s, row in table.values.items() for a, v in row.items())
    dt = time.perf_counter() - t0
    report(8, result.best_value >= greedy.best_value and same and dt < 5,
           f"Q-learning best {result.best_value} >= greedy {greedy.best_value}; "
           f"replay bit-identical: {same}; {dt:.2f}s (< 5s)")


EPS = 0.1


def born_at(grade):
    simplices = [GradedSimplex(s, BiGrade(*grade)) for s in [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]]
    return Bifiltration(tuple(simplices))


def test_c09a_shift_on_diagonal():
    A, B = born_at((1, 0)), born_at((1, EPS))
    got = query_distance(MonotonePath(((0, 0), (1, 1))), A, B, QueryConfig(hom_dim=1))
    want = EPS / math.sqrt(2)
    report(9, abs(got - want) <= 1e-9,
           f"(a) H1 bottleneck on the unit diagonal = {got!r}, expected eps/sqrt(2) = {want!r} (tol 1e-9)")


def test_c09b_search_beats_diagonal():
    A, B = born_at((1, 0)), born_at((1, EPS))
    cfg = QueryConfig(hom_dim=1)
    diagonal = query_distance(MonotonePath(((0, 0), (1, 1))), A, B, cfg)
    # coarse in x, fine in y: successors run close to the x axis
    space = SearchSpace.lattice((0, 0), (2, 0.4), (5, 9), (0.5, 0.05), (3, 3), 4, (0, 0))
    found = {
        "ensemble": ensemble_search(A, B, space, cfg, 32, seed=0).best_value,
        "greedy": greedy_search(A, B, space, cfg, seed=0).best_value,
        "qlearn": qlearn_search(A, B, space, cfg, 50, seed=0).best_value,
    }
    report(9, all(v >= diagonal for v in found.values()),
           f"(b) path search {found} >= diagonal {diagonal}")


def test_c10_cli_reproducible(tmp_path):
    rng = np.random.default_rng(10)
    for name, r in (("a", 1.0), ("b", 0.7)):
        t = rng.uniform(0, 2 * np.pi, 10)
        np.savetxt(tmp_path / f"{name}.csv", np.c_[r * np.cos(t), r * np.sin(t)], delimiter=",")
    (tmp_path / "path.json").write_text(json.dumps({"waypoints": [[0, 0], [0.4, 0.2], [1.5, 0.6]]}))
    (tmp_path / "space.json").write_text(json.dumps(
        {"grid_min": [0, 0], "grid_max": [1.6, 0.8], "grid_steps": [5, 5], "strip": [0.4, 0.2],
         "lookahead": [2, 2], "horizon": 3, "init_max": [0.4, 0.2]}))
    a, b = str(tmp_path / "a.bif"), str(tmp_path / "b.bif")
    commands = {
        "build": ["build", "--input", str(tmp_path / "a.csv"), "--k", "2", "--max-radius", "1.5"],
        "build-b": ["build", "--input", str(tmp_path / "b.csv"), "--k", "2", "--max-radius", "1.5"],
        "distance": ["distance", "--a", a, "--b", b, "--path", str(tmp_path / "path.json"), "--dim", "0"],
        "optimize-ensemble": ["optimize", "--a", a, "--b", b, "--space", str(tmp_path / "space.json"),
                              "--strategy", "ensemble", "--rollouts", "8", "--seed", "5", "--dim", "0"],
        "optimize-greedy": ["optimize", "--a", a, "--b", b, "--space", str(tmp_path / "space.json"),
                            "--strategy", "greedy", "--seed", "5", "--dim", "0"],
        "optimize-qlearn": ["optimize", "--a", a, "--b", b, "--space", str(tmp_path / "space.json"),
                            "--strategy", "qlearn", "--episodes", "10", "--seed", "5", "--dim", "0"],
        "matching": ["matching", "--a", a, "--b", b, "--slices", "12", "--dim", "0"],
    }
    outputs = {"build": a, "build-b": b}
    identical = {}
    for name, args in commands.items():
        first = outputs.get(name, str(tmp_path / f"{name}.1"))
        codes = [main(args + ["--out", first]), None]
        data = open(first, "rb").read()
        codes[1] = main(args + ["--out", str(tmp_path / f"{name}.2")])
        identical[name] = codes == [0, 0] and data == open(tmp_path / f"{name}.2", "rb").read()
    report(10, all(identical.values()), f"byte-identical reruns: {identical}")
