"""Greedy vs Q-learning on the synthetic corridor landscape used by the test suite.

Prints the best reward Q-learning has found after each checkpoint of episodes.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))

from oracles import CORRIDOR, planted_reward, planted_space  # noqa: E402

from pathpers.search import greedy_search, train_q  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--episodes", type=int, default=200)
    ap.add_argument("--every", type=int, default=20)
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args()

    space = planted_space()
    print(f"corridor: {sorted(CORRIDOR)}")
    for seed in range(args.seeds):
        greedy = greedy_search(None, None, space, seed=seed, evaluate=planted_reward).best_value
        table, curve = None, []
        for _ in range(args.episodes // args.every):
            result, table, _ = train_q(None, None, space, episodes=args.every, table=table,
                                       seed=seed * 100003 + len(curve), evaluate=planted_reward)
            curve.append(max(result.best_value, curve[-1] if curve else 0.0))
        print(f"seed {seed}: greedy {greedy:.1f}  qlearn best by checkpoint {[round(v, 1) for v in curve]}")


if __name__ == "__main__":
    main()
