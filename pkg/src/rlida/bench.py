"""Benchmark harness: every algorithm on every instance, aggregated over the
instances that all algorithms solved within the caps."""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .metareason import DecisionPolicy, TimingModel
from .search import SOLVED, SearchConfig, SearchStats, calibrate_timing, ida_star

log = logging.getLogger(__name__)


class CostMismatch(AssertionError):
    """Two algorithms returned different costs: one of them is not optimal."""


@dataclass(frozen=True)
class Algorithm:
    label: str
    mode: str = "lazy"
    policy: DecisionPolicy = field(default_factory=DecisionPolicy.always)

    @classmethod
    def parse(cls, spec: str) -> Algorithm:
        """``ida-h1 | ida-h2 | ida-max | lida | rlida[:<policy>]``."""
        name, _, rest = spec.strip().partition(":")
        name = name.lower()
        if name in ("ida-h1", "ida-h2", "ida-max"):
            return cls(f"IDA*-{name[4:]}", name[4:])
        if name == "lida":
            return cls("LIDA*")
        if name == "rlida":
            policy = DecisionPolicy.parse(rest or "const:0.3")
            return cls(f"RLIDA* {policy.label()}", "lazy", policy)
        raise ValueError(f"unknown algorithm {spec!r}")


DEFAULT_ALGORITHMS = ("ida-h1", "ida-h2", "lida", "rlida:const:0.3")


@dataclass
class BenchInstance:
    ident: str
    make_domain: Callable
    seed: int | None = None


@dataclass
class BenchConfig:
    instances: list
    algorithms: list
    time_cap_s: float | None = None
    node_cap: int | None = None
    repetitions: int = 1
    fmt: str = "markdown"
    timing: TimingModel | None = None  # None: calibrate on the first instance
    workers: int = 1

    def __post_init__(self):
        if not self.instances:
            raise ValueError("need at least one instance")
        if not self.algorithms:
            raise ValueError("need at least one algorithm")
        if self.repetitions < 1:
            raise ValueError("repetitions must be positive")
        for cap in (self.time_cap_s, self.node_cap):
            if cap is not None and cap <= 0:
                raise ValueError("caps must be positive")
        self.algorithms = [a if isinstance(a, Algorithm) else Algorithm.parse(a) for a in self.algorithms]


@dataclass
class RunRecord:
    instance_id: str
    algorithm: str
    status: str
    cost: float | None
    iterations: int
    generated: int
    h1_evals: int
    h2_evals: int
    h2_helpful: int
    wall_time: float
    seed: int | None = None


@dataclass
class BenchRow:
    algorithm: str
    time: float
    generated: int
    h2_total: int
    h2_helpful: int
    h1_evals: int = 0


@dataclass
class SuiteResult:
    rows: list
    records: list
    solved_by_all: list
    excluded: list
    timing: TimingModel
    measured: TimingModel  # seconds per call, used for the clairvoyant row


def clairvoyant_estimate(stats: SearchStats, timing: TimingModel) -> float:
    """LIDA* time minus the cost of every h2 evaluation that pruned nothing."""
    wasted = (stats.h2_evals - stats.h2_helpful) * timing.t2
    return max(0.0, stats.wall_time - wasted)


def _run_one(inst: BenchInstance, alg: Algorithm, config: BenchConfig, timing: TimingModel):
    best = None
    for _ in range(config.repetitions):
        cfg = SearchConfig(mode=alg.mode, node_cap=config.node_cap, time_cap_s=config.time_cap_s,
                           timing=timing)
        sol = ida_star(inst.make_domain(), alg.policy, cfg)
        if best is None:
            best = sol
        else:
            best.stats.wall_time = min(best.stats.wall_time, sol.stats.wall_time)
        if not sol.solved:
            break
    st = best.stats
    rec = RunRecord(inst.ident, alg.label, best.status, best.cost, st.iterations, st.generated,
                    st.h1_evals, st.h2_evals, st.h2_helpful, st.wall_time, inst.seed)
    return rec, best


def run_suite(config: BenchConfig) -> SuiteResult:
    """Fixed timings only steer the decision rule and may be in any unit; the
    clairvoyant estimate always subtracts measured seconds per h2 call."""
    measured = calibrate_timing(config.instances[0].make_domain())
    log.info("calibrated timing t1=%.3g t2=%.3g te=%.3g", measured.t1, measured.t2, measured.te)
    timing = config.timing or measured

    def per_instance(inst):
        return [_run_one(inst, alg, config, timing) for alg in config.algorithms]

    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            results = list(pool.map(per_instance, config.instances))
    else:
        results = [per_instance(inst) for inst in config.instances]

    records, solved_all, excluded = [], [], []
    clair = {}
    for inst, runs in zip(config.instances, results):
        records.extend(r for r, _ in runs)
        costs = {r.cost for r, _ in runs if r.status == SOLVED}
        if len(costs) > 1:
            detail = ", ".join(f"{r.algorithm}={r.cost}" for r, _ in runs if r.status == SOLVED)
            raise CostMismatch(f"instance {inst.ident}: {detail}")
        if all(r.status == SOLVED for r, _ in runs):
            solved_all.append(inst.ident)
            for r, sol in runs:
                if r.algorithm == "LIDA*":
                    clair[inst.ident] = clairvoyant_estimate(sol.stats, measured)
        else:
            failed = [r.algorithm for r, _ in runs if r.status != SOLVED]
            log.warning("instance %s excluded from aggregates: %s not solved within caps",
                        inst.ident, ", ".join(failed))
            excluded.append(inst.ident)

    keep = set(solved_all)
    rows = []
    for alg in config.algorithms:
        mine = [r for r in records if r.algorithm == alg.label and r.instance_id in keep]
        rows.append(BenchRow(alg.label, sum(r.wall_time for r in mine), sum(r.generated for r in mine),
                             sum(r.h2_evals for r in mine), sum(r.h2_helpful for r in mine),
                             sum(r.h1_evals for r in mine)))
    lida = next((row for row in rows if row.algorithm == "LIDA*"), None)
    if lida is not None:
        rows.append(BenchRow("Clairvoyant", sum(clair.values()), lida.generated, lida.h2_helpful,
                             lida.h2_helpful, lida.h1_evals))
    return SuiteResult(rows, records, solved_all, excluded, timing, measured)


MARKDOWN_HEADER = ("algorithm", "time", "generated", "h2 total", "h2 helpful")
CSV_HEADER = ("instance-id", "algorithm", "cost", "iterations", "generated", "h1-evals",
              "h2-evals", "h2-helpful", "wall-time-s", "seed")
AGGREGATE_ID = "*"


def emit_table(rows, fmt: str = "markdown", records=()) -> str:
    if fmt == "markdown":
        lines = ["| " + " | ".join(MARKDOWN_HEADER) + " |",
                 "|" + "|".join([":---"] + ["---:"] * 4) + "|"]
        for r in rows:
            lines.append(f"| {r.algorithm} | {r.time:.4f} | {r.generated:,} | {r.h2_total:,} | {r.h2_helpful:,} |")
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([AGGREGATE_ID, r.algorithm, "", "", r.generated, r.h1_evals, r.h2_total,
                        r.h2_helpful, repr(r.time), ""])
        for r in records:
            w.writerow([r.instance_id, r.algorithm, "" if r.cost is None else r.cost, r.iterations,
                        r.generated, r.h1_evals, r.h2_evals, r.h2_helpful, repr(r.wall_time),
                        "" if r.seed is None else r.seed])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def parse_csv(text: str):
    """Inverse of ``emit_table(..., "csv")``: returns ``(rows, records)``.

    Record status is not part of the schema; a record with a cost is
    reported as solved, one without as not solved.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    rows, records = [], []
    for f in reader:
        if f[0] == AGGREGATE_ID:
            rows.append(BenchRow(f[1], float(f[8]), int(f[4]), int(f[6]), int(f[7]), int(f[5])))
        else:
            cost = int(f[2]) if f[2] else None
            records.append(RunRecord(f[0], f[1], SOLVED if cost is not None else "unsolved", cost,
                                     int(f[3]), int(f[4]), int(f[5]), int(f[6]), int(f[7]),
                                     float(f[8]), int(f[9]) if f[9] else None))
    return rows, records


def parse_markdown(text: str) -> list:
    """Read back the counters of a markdown table (time is rounded there)."""
    rows = []
    for line in text.splitlines()[2:]:
        cells = [c.strip() for c in line.strip().strip("|").split("|")]
        if len(cells) != 5:
            continue
        rows.append(BenchRow(cells[0], float(cells[1]), int(cells[2].replace(",", "")),
                             int(cells[3].replace(",", "")), int(cells[4].replace(",", ""))))
    return rows
