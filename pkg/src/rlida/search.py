"""Iterative deepening driver with lazy evaluation of a second heuristic.

Each iteration is a depth-first search bounded by a cost threshold.  At a
node the cheap heuristic h1 is always consulted first; the expensive h2 is
consulted only if h1 fails to prune and the decision policy asks for it.
Nodes whose h2 evaluation is skipped are expanded, and the guard on ``g``
at the top of every visit keeps the returned solution optimal.
"""

from __future__ import annotations

import logging
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Hashable, Protocol, Sequence

from .metareason import (
    DecisionPolicy,
    PolicyKind,
    SampleHistory,
    TimingMode,
    TimingModel,
    decide,
    effective_p_h,
    helpful_level,
    observe_timing,
    record_sample,
    sample_x,
)

log = logging.getLogger(__name__)

INF = math.inf

SOLVED = "solved"
UNSOLVABLE = "unsolvable"
RESOURCE_LIMIT = "resource-limit"

# Which heuristics a run uses: lazy pair, a single heuristic, or max of both
# evaluated at every node.
MODES = ("lazy", "h1", "h2", "max")

# Where an iteration's next threshold came from.
SRC_NONE, SRC_G, SRC_H1, SRC_H2 = "none", "g", "h1", "h2"


class SearchDomain(Protocol):
    initial_state: Any

    def is_goal(self, state) -> bool: ...

    def successors(self, state, incoming) -> Sequence[tuple[Any, int, Hashable]]: ...

    def h1(self, state) -> int: ...

    def h2(self, state) -> int: ...

    def branching(self, state, incoming) -> int: ...


@dataclass
class SearchConfig:
    mode: str = "lazy"
    node_cap: int | None = None
    time_cap_s: float | None = None
    max_depth: int = 5000
    timing: TimingModel = field(default_factory=TimingModel)
    use_kernel: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown search mode {self.mode!r}")


@dataclass
class SearchStats:
    generated: int = 0
    expanded: int = 0
    h1_evals: int = 0
    h2_evals: int = 0
    h2_helpful: int = 0
    iterations: int = 0
    wall_time: float = 0.0
    thresholds: list = field(default_factory=list)
    # parallel to ``thresholds``: what set the threshold that followed
    next_sources: list = field(default_factory=list)
    samples: SampleHistory = field(default_factory=SampleHistory)

    @property
    def helpful_ratio(self) -> float:
        return self.h2_helpful / self.h2_evals if self.h2_evals else 0.0


@dataclass
class Solution:
    status: str
    path: list | None
    cost: float | None
    stats: SearchStats

    @property
    def solved(self) -> bool:
        return self.status == SOLVED


class ResourceLimit(Exception):
    pass


class _Run:
    """Per-run mutable state for the generic driver."""

    def __init__(self, domain, policy: DecisionPolicy, config: SearchConfig, stats: SearchStats):
        self.domain = domain
        self.policy = policy
        self.config = config
        self.stats = stats
        self.timing = config.timing
        self.timed = config.timing.mode is TimingMode.EMA
        self.node_cap = config.node_cap
        self.deadline = None
        if config.time_cap_s is not None:
            self.deadline = time.perf_counter() + config.time_cap_s
        self.best = INF
        self.best_src = SRC_NONE
        self.path: list = []
        self.goal_g = 0
        self.last_h1_time = 0.0

    def check_limits(self, depth: int) -> None:
        st = self.stats
        if self.node_cap is not None and st.generated > self.node_cap:
            raise ResourceLimit("node cap")
        if depth > self.config.max_depth:
            raise ResourceLimit("depth bound")
        if self.deadline is not None and st.expanded & 0x3FF == 0:
            if time.perf_counter() > self.deadline:
                raise ResourceLimit("time cap")

    def h1(self, state):
        self.stats.h1_evals += 1
        if not self.timed:
            return self.domain.h1(state)
        t0 = time.perf_counter()
        v = self.domain.h1(state)
        self.last_h1_time = time.perf_counter() - t0
        observe_timing(self.timing, "h1", self.last_h1_time)
        return v

    def h2(self, state):
        self.stats.h2_evals += 1
        if not self.timed:
            return self.domain.h2(state)
        t0 = time.perf_counter()
        v = self.domain.h2(state)
        observe_timing(self.timing, "h2", time.perf_counter() - t0)
        return v

    def sample(self, h1, h2) -> None:
        x = sample_x(h1, h2)
        if x is not None:
            record_sample(self.stats.samples, x)

    def prune(self, value, src):
        if value < self.best or (value == self.best and self.best_src == SRC_H1 and src != SRC_H1):
            self.best = value
            self.best_src = src
        return value


def initial_threshold(domain, stats: SearchStats | None = None, mode: str = "lazy") -> float:
    """``max(h1(root), h2(root))`` (or the single heuristic for h1/h2 modes)."""
    root = domain.initial_state
    if stats is None:
        stats = SearchStats()
    stats.generated += 1
    if mode == "h1":
        stats.h1_evals += 1
        return domain.h1(root)
    if mode == "h2":
        stats.h2_evals += 1
        return domain.h2(root)
    a = domain.h1(root)
    b = domain.h2(root)
    stats.h1_evals += 1
    stats.h2_evals += 1
    x = sample_x(a, b)
    if x is not None:
        record_sample(stats.samples, x)
    return max(a, b)


def lazy_dfs(state, g, threshold, incoming, run: _Run, depth: int = 0):
    """One bounded depth-first visit.

    Returns ``(found, next_threshold)``; on success the move path is left in
    ``run.path`` and ``next_threshold`` is the threshold itself.
    """
    if g > threshold:
        return False, run.prune(g, SRC_G)
    domain = run.domain
    if domain.is_goal(state):
        run.goal_g = g
        return True, threshold
    stats = run.stats
    mode = run.config.mode

    if mode == "h2":
        f = g + run.h2(state)
        if f > threshold:
            stats.h2_helpful += 1
            return False, run.prune(f, SRC_H2)
    else:
        h1 = run.h1(state)
        if mode == "max":
            h2 = run.h2(state)
            run.sample(h1, h2)
            if g + h2 > threshold:
                stats.h2_helpful += 1
            f = g + max(h1, h2)
            if f > threshold:
                return False, run.prune(f, SRC_H2 if h2 > h1 else SRC_H1)
        else:
            if g + h1 > threshold:
                return False, run.prune(g + h1, SRC_H1)
            if mode == "lazy" and _opt_cond(run, state, g, threshold, h1, incoming):
                h2 = run.h2(state)
                run.sample(h1, h2)
                if g + h2 > threshold:
                    stats.h2_helpful += 1
                    return False, run.prune(g + h2, SRC_H2)

    t0 = time.perf_counter() if run.timed else 0.0
    succ = domain.successors(state, incoming)
    if run.timed:
        observe_timing(run.timing, "expand", time.perf_counter() - t0 + run.last_h1_time)
    stats.expanded += 1
    stats.generated += len(succ)
    run.check_limits(depth + 1)

    next_t = INF
    path = run.path
    for child, cost, move in succ:
        path.append(move)
        found, t = lazy_dfs(child, g + cost, threshold, move, run, depth + 1)
        if found:
            return True, t
        path.pop()
        if t < next_t:
            next_t = t
    return False, next_t


def _opt_cond(run: _Run, state, g, threshold, h1, incoming) -> bool:
    policy = run.policy
    kind = policy.kind
    if kind is PolicyKind.ALWAYS:
        return True
    if kind is PolicyKind.NEVER:
        return False
    b = run.domain.branching(state, incoming)
    if kind is PolicyKind.ADAPTIVE:
        p_h = effective_p_h(policy, run.stats.samples, helpful_level(h1, g, threshold))
    else:
        p_h = policy.p_h
    tm = run.timing
    return decide(p_h, b, policy.rule, tm.t1, tm.t2, tm.te)


def ida_star(domain, policy: DecisionPolicy | None = None, config: SearchConfig | None = None) -> Solution:
    """Run IDA* (lazy, single-heuristic, or max mode) to an optimal solution.

    Domains exposing ``kernel_search`` get the specialised kernel when the
    timing model is fixed; online timing needs per-call measurement and
    always runs here.
    """
    policy = policy or DecisionPolicy.always()
    config = config or SearchConfig()
    kernel = getattr(domain, "kernel_search", None)
    if kernel is not None and config.use_kernel and config.timing.mode is TimingMode.FIXED:
        return kernel(policy, config)

    stats = SearchStats()
    run = _Run(domain, policy, config, stats)
    t_start = time.perf_counter()
    old_limit = sys.getrecursionlimit()
    if old_limit < config.max_depth + 200:
        sys.setrecursionlimit(config.max_depth + 200)
    try:
        threshold = initial_threshold(domain, stats, config.mode)
        root = domain.initial_state
        while True:
            stats.iterations += 1
            stats.thresholds.append(threshold)
            stats.generated += 1
            run.best, run.best_src = INF, SRC_NONE
            run.path = []
            found, nt = lazy_dfs(root, 0, threshold, None, run)
            if found:
                stats.next_sources.append(SRC_NONE)
                stats.wall_time = time.perf_counter() - t_start
                return Solution(SOLVED, list(run.path), run.goal_g, stats)
            stats.next_sources.append(run.best_src)
            if nt == INF:
                stats.wall_time = time.perf_counter() - t_start
                return Solution(UNSOLVABLE, None, None, stats)
            threshold = nt
    except ResourceLimit as exc:
        log.info("search stopped: %s", exc)
        stats.wall_time = time.perf_counter() - t_start
        return Solution(RESOURCE_LIMIT, None, None, stats)
    finally:
        sys.setrecursionlimit(old_limit)


def replay_cost(domain, path) -> int:
    """Sum of edge costs along ``path`` replayed from the initial state."""
    state, incoming, total = domain.initial_state, None, 0
    for move in path:
        for child, cost, m in domain.successors(state, incoming):
            if m == move:
                state, incoming, total = child, m, total + cost
                break
        else:
            raise ValueError(f"move {move!r} is not legal here")
    if not domain.is_goal(state):
        raise ValueError("path does not reach a goal")
    return total


def extra_iterations(lazy: SearchStats, reference: SearchStats) -> list:
    """Thresholds the lazy run visited that the max-heuristic run never did.

    Each one must follow a next threshold that came from an h1 prune, where
    skipping h2 left the threshold lower than the max heuristic would have.
    Returns the extra thresholds; raises if one cannot be explained that way.
    """
    ref = set(reference.thresholds)
    extra = []
    for i, t in enumerate(lazy.thresholds):
        if t in ref:
            continue
        src = lazy.next_sources[i - 1] if i > 0 else SRC_NONE
        if src != SRC_H1:
            raise AssertionError(f"extra iteration at threshold {t} not set by an h1 prune ({src})")
        log.warning("extra DFS iteration at threshold %s: next threshold came from h1 "
                    "at a node where h2 was not needed to prune", t)
        extra.append(t)
    return extra


def calibrate_timing(domain, samples: int = 1000, seed: int = 0) -> TimingModel:
    """Fixed timing constants from evaluating both heuristics on random states.

    Domains with their own kernel provide ``calibrate`` and are measured
    there instead.
    """
    own = getattr(domain, "calibrate", None)
    if own is not None:
        return own(samples=samples, seed=seed)
    import random

    states = domain.random_states(samples, random.Random(seed))
    clock = time.perf_counter
    t0 = clock()
    for s in states:
        domain.h1(s)
    t1 = (clock() - t0) / len(states)
    t0 = clock()
    for s in states:
        domain.h2(s)
    t2 = (clock() - t0) / len(states)
    t0 = clock()
    for s in states:
        domain.h1(s)
        domain.successors(s, None)
    te = (clock() - t0) / len(states)
    tiny = 1e-9
    return TimingModel(max(t1, tiny), max(t2, tiny), max(te, tiny))
