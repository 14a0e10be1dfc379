"""Compare the compiled tile kernel with its pure-Python twin.

    python3 benchmarks/bench_kernels.py --count 5 --steps 40

Both kernels run the same searches and must agree on every counter; the
table reports wall time and node throughput for each.
"""

import argparse
import random
import time

from rlida import kernels
from rlida.metareason import DecisionPolicy, TimingModel
from rlida.search import SearchConfig, ida_star
from rlida.tiles import TileDomain, random_walk_instance


def run(core, boards, weighted, policy, timing):
    total_time, generated, results = 0.0, 0, []
    for b in boards:
        t0 = time.perf_counter()
        sol = ida_star(TileDomain(b, weighted, kernel=core), policy, SearchConfig(timing=timing))
        total_time += time.perf_counter() - t0
        generated += sol.stats.generated
        results.append((sol.cost, sol.stats.generated, sol.stats.h2_evals))
    return total_time, generated, results


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=5)
    ap.add_argument("--steps", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--weighted", action="store_true")
    ap.add_argument("--policy", default="const:0.3")
    args = ap.parse_args(argv)

    if kernels.compiled is None:
        raise SystemExit("compiled kernel not available; build with `pip install -e .`")
    rng = random.Random(args.seed)
    boards = [random_walk_instance(4, 4, args.steps, rng.randrange(2**31)) for _ in range(args.count)]
    policy = DecisionPolicy.parse(args.policy)
    timing = TimingModel(1.0, 5.0, 2.0)

    rows = []
    for name, core in (("compiled", kernels.compiled), ("pure", kernels.pure)):
        rows.append((name, *run(core, boards, args.weighted, policy, timing)))
    if rows[0][3] != rows[1][3]:
        raise SystemExit("kernels disagree on counters")

    print("| kernel | time (s) | generated | nodes/s |")
    print("|:---|---:|---:|---:|")
    for name, secs, gen, _ in rows:
        print(f"| {name} | {secs:.3f} | {gen:,} | {gen / secs:,.0f} |")
    print(f"\nspeed-up: {rows[1][1] / rows[0][1]:.1f}x")


if __name__ == "__main__":
    main()
