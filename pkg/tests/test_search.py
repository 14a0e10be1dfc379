import logging

import pytest

from rlida.metareason import DecisionPolicy, TimingModel
from rlida.search import (
    RESOURCE_LIMIT,
    SOLVED,
    UNSOLVABLE,
    SearchConfig,
    SearchStats,
    extra_iterations,
    ida_star,
    initial_threshold,
    replay_cost,
)


class Graph:
    """Explicit weighted digraph with per-node heuristic tables."""

    def __init__(self, edges, goal, h1, h2, start="s"):
        self.edges = edges
        self.goal = goal
        self.t1, self.t2 = h1, h2
        self.initial_state = start
        self.calls = {"h1": 0, "h2": 0}

    def is_goal(self, s):
        return s == self.goal

    def successors(self, s, incoming):
        return [(t, c, t) for t, c in self.edges.get(s, [])]

    def h1(self, s):
        self.calls["h1"] += 1
        return self.t1.get(s, 0)

    def h2(self, s):
        self.calls["h2"] += 1
        return self.t2.get(s, 0)

    def branching(self, s, incoming):
        return len(self.edges.get(s, []))

    def random_states(self, k, rng):
        return [rng.choice(list(self.t1) or [self.initial_state]) for _ in range(k)]


DIAMOND = {"s": [("a", 1), ("b", 2)], "a": [("g", 5)], "b": [("g", 1)]}


def diamond(h1=None, h2=None):
    return Graph(DIAMOND, "g", h1 or {}, h2 or {})


CONFIGS = [
    ("lazy", DecisionPolicy.always()),
    ("lazy", DecisionPolicy.never()),
    ("lazy", DecisionPolicy.constant(0.3)),
    ("lazy", DecisionPolicy.adaptive(0.5)),
    ("h1", DecisionPolicy.always()),
    ("h2", DecisionPolicy.always()),
    ("max", DecisionPolicy.always()),
]


def test_goal_at_root():
    sol = ida_star(Graph({}, "s", {}, {}))
    assert sol.status == SOLVED
    assert (sol.cost, sol.path) == (0, [])
    assert sol.stats.expanded == 0


def test_single_move():
    sol = ida_star(Graph({"s": [("g", 1)]}, "g", {"s": 1}, {"s": 1}))
    assert (sol.cost, sol.path) == (1, ["g"])


@pytest.mark.parametrize("mode,policy", CONFIGS)
def test_diamond_optimal(mode, policy):
    d = diamond({"s": 2, "a": 1, "b": 1}, {"s": 3, "a": 5, "b": 1})
    sol = ida_star(d, policy, SearchConfig(mode=mode))
    assert sol.cost == 3
    assert sol.path == ["b", "g"]
    assert replay_cost(d, sol.path) == 3


@pytest.mark.parametrize("h1,h2,expected", [(3, 5, 5), (5, 3, 5), (0, 0, 0)])
def test_initial_threshold(h1, h2, expected):
    stats = SearchStats()
    assert initial_threshold(diamond({"s": h1}, {"s": h2}), stats) == expected
    assert (stats.generated, stats.h1_evals, stats.h2_evals) == (1, 1, 1)


def test_h2_skipped_when_h1_prunes():
    # a's h1 already exceeds the first threshold, so h2(a) is never needed there
    d = diamond({"s": 3, "a": 5, "b": 1}, {"s": 3, "a": 0, "b": 1})
    evaluated = []
    orig = d.h2
    d.h2 = lambda s: evaluated.append(s) or orig(s)
    sol = ida_star(d, DecisionPolicy.always())
    assert sol.cost == 3
    assert "a" not in evaluated


def test_never_policy_is_plain_ida_on_h1():
    h1 = {"s": 2, "a": 1, "b": 1}
    d = diamond(h1, {"s": 3, "a": 5, "b": 1})
    lazy = ida_star(d, DecisionPolicy.never())
    ref = ida_star(diamond(h1, {}), config=SearchConfig(mode="h1"))
    assert lazy.cost == ref.cost
    assert lazy.stats.h2_evals == 1  # only the root
    assert lazy.stats.h2_helpful == 0


def test_unsolvable():
    sol = ida_star(Graph({"s": [("a", 1)], "a": [("b", 1)]}, "g", {}, {}))
    assert sol.status == UNSOLVABLE
    assert sol.cost is None and sol.path is None


def test_node_cap():
    chain = {str(i): [(str(i + 1), 1)] for i in range(200)}
    g = Graph(chain, "200", {}, {}, start="0")
    sol = ida_star(g, config=SearchConfig(node_cap=50))
    assert sol.status == RESOURCE_LIMIT
    assert ida_star(g).cost == 200


def test_depth_bound():
    chain = {str(i): [(str(i + 1), 0)] for i in range(100)}
    g = Graph(chain, "100", {}, {}, start="0")
    assert ida_star(g, config=SearchConfig(max_depth=20)).status == RESOURCE_LIMIT


def test_time_cap():
    # an infinite ternary tree with no goal never finishes an iteration quickly
    class Wide:
        initial_state = 0

        def is_goal(self, s):
            return False

        def successors(self, s, incoming):
            return [(s + 1, 1, i) for i in range(3)]

        def h1(self, s):
            return 0

        def h2(self, s):
            return 0

        def branching(self, s, incoming):
            return 3

    sol = ida_star(Wide(), config=SearchConfig(time_cap_s=0.05))
    assert sol.status == RESOURCE_LIMIT
    assert sol.stats.wall_time < 5


@pytest.mark.parametrize("mode,policy", CONFIGS)
def test_counter_invariants(mode, policy):
    d = diamond({"s": 2, "a": 1, "b": 1}, {"s": 3, "a": 5, "b": 1})
    st = ida_star(d, policy, SearchConfig(mode=mode)).stats
    assert 0 <= st.h2_helpful <= st.h2_evals <= st.generated
    assert st.expanded <= st.generated
    assert st.thresholds == sorted(st.thresholds)
    assert len(set(st.thresholds)) == len(st.thresholds)
    assert st.iterations == len(st.thresholds) == len(st.next_sources)


def test_ema_timing_uses_generic_driver():
    d = diamond({"s": 2, "a": 1, "b": 1}, {"s": 3, "a": 5, "b": 1})
    cfg = SearchConfig(timing=TimingModel.parse("ema:0.1"))
    sol = ida_star(d, DecisionPolicy.constant(0.3), cfg)
    assert sol.cost == 3
    assert cfg.timing.t1 > 0 and cfg.timing.t2 > 0 and cfg.timing.te > 0


def test_replay_cost_rejects_bad_paths():
    d = diamond()
    with pytest.raises(ValueError):
        replay_cost(d, ["g"])
    with pytest.raises(ValueError):
        replay_cost(d, ["a"])


def test_extra_iterations_explained_by_h1(caplog):
    lazy = SearchStats(thresholds=[4, 5, 7], next_sources=["h1", "h2", "none"])
    ref = SearchStats(thresholds=[4, 7], next_sources=["h2", "none"])
    with caplog.at_level(logging.WARNING):
        assert extra_iterations(lazy, ref) == [5]
    assert "extra DFS iteration" in caplog.text
    with pytest.raises(AssertionError):
        extra_iterations(SearchStats(thresholds=[4, 5], next_sources=["g", "none"]),
                         SearchStats(thresholds=[4], next_sources=["none"]))


def test_lazy_can_need_an_extra_iteration():
    # root h1=0, h2=2; child c has h1=2, h2=3.  With T=2 the lazy search prunes
    # c by h1 (f=3) before looking at h2, so it next tries T=3 although the max
    # heuristic would jump straight to 4.
    g = Graph({"s": [("c", 1)], "c": [("g", 3)]}, "g", {"s": 0, "c": 2}, {"s": 2, "c": 3})
    lazy = ida_star(g, DecisionPolicy.always())
    ref = ida_star(g, config=SearchConfig(mode="max"))
    assert lazy.cost == ref.cost == 4
    assert lazy.stats.iterations == ref.stats.iterations + 1
    assert extra_iterations(lazy.stats, ref.stats) == [3]
