import random

import pytest

from rlida import kernels
from rlida.metareason import DecisionPolicy, TimingModel
from rlida.search import SearchConfig, ida_star
from rlida.tiles import TileBoard, TileDomain, random_walk_instance

needs_compiled = pytest.mark.skipif(kernels.compiled is None, reason="extension not built")

POLICIES = [
    DecisionPolicy.always(),
    DecisionPolicy.never(),
    DecisionPolicy.constant(0.3),
    DecisionPolicy.constant(0.3, "simplified"),
    DecisionPolicy.adaptive(0.5),
    DecisionPolicy.adaptive(0.4, "simplified"),
]
TIMING = TimingModel(1.0, 3.5, 1.8)


def counters(sol):
    st = sol.stats
    return (sol.status, sol.cost, sol.path, st.generated, st.expanded, st.h1_evals, st.h2_evals,
            st.h2_helpful, st.iterations, st.thresholds, st.next_sources, st.samples.n,
            round(st.samples.sum_x, 9))


def run_three(board, weighted, blank_first, mode, policy, node_cap=None):
    cfg = SearchConfig(mode=mode, node_cap=node_cap, timing=TIMING)
    generic = ida_star(TileDomain(board, weighted, blank_first, kernels.pure), policy,
                       SearchConfig(mode=mode, node_cap=node_cap, timing=TIMING, use_kernel=False))
    pure = ida_star(TileDomain(board, weighted, blank_first, kernels.pure), policy, cfg)
    out = [counters(generic), counters(pure)]
    if kernels.compiled is not None:
        out.append(counters(ida_star(TileDomain(board, weighted, blank_first, kernels.compiled), policy, cfg)))
    return out


@pytest.mark.parametrize("policy", POLICIES, ids=lambda p: p.label())
@pytest.mark.parametrize("weighted", [False, True])
def test_lazy_policies_identical(policy, weighted):
    b = random_walk_instance(4, 4, 30, 21)
    results = run_three(b, weighted, True, "lazy", policy)
    assert all(r == results[0] for r in results)


@pytest.mark.parametrize("mode", ["h1", "h2", "max"])
def test_modes_identical(mode):
    b = random_walk_instance(3, 4, 40, 5, blank_first=False)
    results = run_three(b, False, False, mode, DecisionPolicy.always())
    assert all(r == results[0] for r in results)


def test_node_cap_identical():
    b = random_walk_instance(4, 4, 60, 2)
    results = run_three(b, False, True, "lazy", DecisionPolicy.constant(0.3), node_cap=500)
    assert results[0][0] == "resource-limit"
    assert all(r == results[0] for r in results)


def test_goal_board_identical():
    b = random_walk_instance(3, 3, 0, 0)
    results = run_three(b, True, True, "lazy", DecisionPolicy.always())
    assert all(r == results[0] for r in results)
    assert results[0][1] == 0


@pytest.mark.parametrize("core", [kernels.pure, kernels.compiled], ids=["pure", "compiled"])
def test_heuristics_identical_to_pure(core):
    if core is None:
        pytest.skip("extension not built")
    rng = random.Random(0)
    for _ in range(500):
        rows, cols = rng.choice([(3, 3), (4, 4), (3, 5), (2, 6)])
        cells = list(range(rows * cols))
        rng.shuffle(cells)
        cells = tuple(cells)
        for w in (False, True):
            for bf in (False, True):
                assert core.manhattan(cells, rows, cols, w, bf) == kernels.pure.manhattan(cells, rows, cols, w, bf)
                assert core.linear_conflict(cells, rows, cols, w, bf) == \
                    kernels.pure.linear_conflict(cells, rows, cols, w, bf)
        blank = cells.index(0)
        for inc in (-1, 0, 1, 2, 3):
            assert core.branching(blank, inc, rows, cols) == kernels.pure.branching(blank, inc, rows, cols)


@needs_compiled
def test_default_kernel_is_compiled():
    assert kernels.COMPILED
    assert TileDomain(TileBoard(2, 2, (0, 1, 2, 3))).kernel is kernels.compiled


@needs_compiled
def test_time_cap_in_kernel():
    b = random_walk_instance(5, 5, 400, 1)
    sol = ida_star(TileDomain(b), DecisionPolicy.always(), SearchConfig(time_cap_s=0.05))
    assert sol.status == "resource-limit"
    assert sol.stats.wall_time < 2


def test_time_heuristics_positive():
    for core in filter(None, (kernels.pure, kernels.compiled)):
        boards = [random_walk_instance(4, 4, 50, s).cells for s in range(20)]
        t1, t2, te = core.time_heuristics(boards, 4, 4, False, True, 1)
        assert t1 > 0 and t2 > 0 and te > 0


def test_env_switch_forces_pure_kernel():
    import os
    import subprocess
    import sys

    env = dict(os.environ, RLIDA_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import rlida; print(rlida.COMPILED)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
