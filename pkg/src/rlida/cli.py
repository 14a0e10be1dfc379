"""Command line: ``rlida {solve,bench,gen,bound-check}``.

Exit codes: 0 success, 2 usage error, 3 parse error, 4 unsolvable,
5 resource cap exceeded, 6 cost mismatch between algorithms.
"""

from __future__ import annotations

import argparse
import glob
import logging
import random
import sys
from pathlib import Path

from . import bench, crp, metareason, tiles
from .search import RESOURCE_LIMIT, SOLVED, UNSOLVABLE, SearchConfig, calibrate_timing, ida_star

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_UNSOLVABLE, EXIT_CAP, EXIT_MISMATCH = 0, 2, 3, 4, 5, 6

CRP_SEPARATOR = "---"


class UsageError(Exception):
    pass


def read_crp_instances(text: str, source: str = "<text>") -> list:
    chunks, cur = [], []
    for line in text.splitlines():
        if line.strip() == CRP_SEPARATOR:
            chunks.append(cur)
            cur = []
        else:
            cur.append(line)
    chunks.append(cur)
    out = []
    for i, chunk in enumerate(c for c in chunks if any(l.split("#", 1)[0].strip() for l in c)):
        seed = None
        for line in chunk:
            if line.startswith("#"):
                for tok in line[1:].split():
                    if tok.startswith("seed="):
                        seed = int(tok[5:])
        out.append((f"{source}#{i}", crp.parse_crp_instance("\n".join(chunk), source), seed))
    return out


def load_instances(args, paths) -> list:
    """(ident, domain factory, seed) triples from instance files."""
    files = []
    for p in paths:
        hits = sorted(glob.glob(p))
        if not hits:
            raise FileNotFoundError(p)
        files.extend(hits)
    out = []
    for path in files:
        text = Path(path).read_text()
        if args.domain == "tiles":
            for inst in tiles.read_instances(text, args.rows, args.cols, not args.blank_last, source=path):
                out.append(bench.BenchInstance(
                    inst.ident, _tile_factory(inst.board, args.weighted, not args.blank_last), inst.seed))
        else:
            for ident, inst, seed in read_crp_instances(text, source=path):
                out.append(bench.BenchInstance(ident, _crp_factory(inst), seed))
    return out


def _tile_factory(board, weighted, blank_first):
    return lambda: tiles.TileDomain(board, weighted, blank_first)


def _crp_factory(inst):
    return lambda: crp.CrpDomain(inst)


def _timing(spec: str, domain) -> metareason.TimingModel:
    if spec == "calibrate":
        return calibrate_timing(domain)
    return metareason.TimingModel.parse(spec)


def cmd_solve(args) -> int:
    instances = load_instances(args, [args.instance])
    policy = metareason.DecisionPolicy.parse(args.policy)
    worst = EXIT_OK
    for inst in instances:
        domain = inst.make_domain()
        cfg = SearchConfig(mode=args.mode, node_cap=args.node_cap, time_cap_s=args.time_cap_s,
                           timing=_timing(args.timing, domain))
        sol = ida_star(domain, policy, cfg)
        st = sol.stats
        print(f"instance: {inst.ident}")
        print(f"status: {sol.status}")
        if sol.solved:
            print(f"cost: {sol.cost}")
            if args.moves:
                print("moves: " + " ".join(_move_str(m) for m in sol.path))
        print(f"time: {st.wall_time:.6f}")
        print(f"generated: {st.generated}")
        print(f"h2 total: {st.h2_evals}")
        print(f"h2 helpful: {st.h2_helpful}")
        print(f"iterations: {st.iterations}")
        code = {SOLVED: EXIT_OK, UNSOLVABLE: EXIT_UNSOLVABLE, RESOURCE_LIMIT: EXIT_CAP}[sol.status]
        worst = max(worst, code)
    return worst


def _move_str(m) -> str:
    if isinstance(m, crp.Relocation):
        return f"{m.container}:{m.src}->{m.dst}"
    return str(m)


def cmd_bench(args) -> int:
    instances = load_instances(args, args.instances)
    timing = None
    if args.timing != "calibrate":
        timing = metareason.TimingModel.parse(args.timing)
        if timing.mode is metareason.TimingMode.EMA:
            raise UsageError("bench needs fixed or calibrated timing")
    config = bench.BenchConfig(instances, args.algorithms.split(","), args.time_cap_s, args.node_cap,
                               args.repetitions, args.format, timing, args.workers)
    result = bench.run_suite(config)
    text = bench.emit_table(result.rows, args.format, result.records)
    _write(args.out, text)
    if args.csv_out:
        Path(args.csv_out).write_text(bench.emit_table(result.rows, "csv", result.records))
    return EXIT_OK


def cmd_gen(args) -> int:
    rng = random.Random(args.seed)
    if args.domain == "tiles":
        rows, cols = args.rows or 4, args.cols or 4
        if rows < 1 or cols < 1 or rows * cols < 2:
            raise UsageError("board needs at least two cells")
        if args.steps_min < 0 or args.steps_max < args.steps_min:
            raise UsageError("need 0 <= steps-min <= steps-max")
        out = []
        for i in range(args.count):
            steps = rng.randint(args.steps_min, args.steps_max)
            seed = rng.randrange(2**31)
            board = tiles.random_walk_instance(rows, cols, steps, seed, not args.blank_last)
            out.append(tiles.TileInstance(f"walk-{i}", board, seed, steps))
        text = tiles.format_instances(out)
    else:
        if args.stacks < 2 or args.tiers < 1 or args.containers > (args.stacks - 1) * args.tiers:
            raise UsageError("need S >= 2 and N <= (S-1)*T")
        parts = []
        for i in range(args.count):
            seed = rng.randrange(2**31)
            inst = crp.random_crp_instance(args.stacks, args.tiers, args.containers, seed)
            parts.append(crp.format_crp_instance(inst, f"id=crp-{i} seed={seed}"))
        text = (CRP_SEPARATOR + "\n").join(parts)
    _write(args.out, text)
    return EXIT_OK


def cmd_bound_check(args) -> int:
    ns = [int(v) for v in args.n.split(",")]
    ls = [float(v) for v in args.l.split(",")]
    xs = [float(v) for v in args.mean_x.split(",")]
    print("N\tl\tmean_x\talpha*\tB(alpha*)\tB*\tp_h")
    for n in ns:
        for l in ls:
            for x in xs:
                try:
                    alpha = metareason.bound_alpha_star(n, l, x)
                    b_alpha = f"{metareason.bound_b_of_alpha(alpha, n, l, x):.6f}"
                    alpha_s = f"{alpha:.6f}"
                except (metareason.UninformativeBound, ValueError):
                    alpha_s = b_alpha = "n/a"
                b_star = _b_star(n, l, x)
                p = metareason.bound_p_h(metareason.SampleHistory(n, n * x), l)
                print(f"{n}\t{l:g}\t{x:g}\t{alpha_s}\t{b_alpha}\t{b_star}\t{p:.6f}")
    return EXIT_OK


def _b_star(n, l, x) -> str:
    import math

    if n < 1 or l <= 0:
        return "n/a"
    scale = math.sqrt(2 * n) * l
    return f"{(1 + math.sqrt(max(0.0, math.log(scale)))) / scale + x / l:.6f}"


def _write(path, text) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rlida", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def domain_flags(sp):
        sp.add_argument("--domain", choices=("tiles", "crp"), default="tiles")
        sp.add_argument("--rows", type=int)
        sp.add_argument("--cols", type=int)
        sp.add_argument("--weighted", action="store_true", help="moving tile t costs t")
        sp.add_argument("--blank-last", action="store_true", help="goal has the blank last")

    def limit_flags(sp):
        sp.add_argument("--node-cap", type=int)
        sp.add_argument("--time-cap-s", type=float)
        sp.add_argument("--timing", default="calibrate",
                        help="calibrate | fixed:<t1>,<t2>,<te> | ema:<decay>")

    s = sub.add_parser("solve", help="solve the instances in a file")
    domain_flags(s)
    limit_flags(s)
    s.add_argument("instance")
    s.add_argument("--mode", choices=("lazy", "h1", "h2", "max"), default="lazy")
    s.add_argument("--policy", default="always",
                   help="always | never | const:<p>[:simplified] | adaptive:<cap>[:simplified]")
    s.add_argument("--moves", action="store_true", help="print the move sequence")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run algorithms over instance files")
    domain_flags(b)
    limit_flags(b)
    b.add_argument("instances", nargs="+")
    b.add_argument("--algorithms", default=",".join(bench.DEFAULT_ALGORITHMS),
                   help="comma list of ida-h1, ida-h2, ida-max, lida, rlida:<policy>")
    b.add_argument("--repetitions", type=int, default=1)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--format", choices=("markdown", "csv"), default="markdown")
    b.add_argument("--out")
    b.add_argument("--csv-out")
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("gen", help="generate random instances")
    domain_flags(g)
    g.add_argument("--stacks", type=int, default=5)
    g.add_argument("--tiers", type=int, default=6)
    g.add_argument("--containers", type=int, default=20)
    g.add_argument("--steps-min", type=int, default=45)
    g.add_argument("--steps-max", type=int, default=80)
    g.add_argument("--count", type=int, default=10)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("bound-check", help="tabulate the helpfulness bound")
    c.add_argument("--n", default="50", help="comma list of sample counts")
    c.add_argument("--l", default="1.0", help="comma list of helpfulness levels")
    c.add_argument("--mean-x", default="0.0", help="comma list of sample means")
    c.set_defaults(func=cmd_bound_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (tiles.TileParseError, crp.CrpParseError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except bench.CostMismatch as exc:
        print(f"cost mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
