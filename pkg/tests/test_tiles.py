import random

import pytest

from oracles import tile_manhattan
from rlida.metareason import DecisionPolicy
from rlida.search import SearchConfig, ida_star, replay_cost
from rlida.tiles import (
    TileBoard,
    TileDomain,
    TileInstance,
    TileParseError,
    apply_move,
    format_board,
    format_instances,
    goal_board,
    is_solvable,
    linear_conflict,
    manhattan,
    parse_korf_instance,
    random_walk_instance,
    read_instances,
    tile_successors,
)


def board(cells, rows=3, cols=3):
    return TileBoard(rows, cols, tuple(cells))


def test_corner_blank_has_two_successors():
    assert len(tile_successors(goal_board(3, 3))) == 2


def test_centre_blank_with_parent_has_three():
    b = random_walk_instance(4, 4, 0, 0)
    b, _ = apply_move(b, "R")
    b, _ = apply_move(b, "D")
    assert b.blank == 5
    succ = tile_successors(b, incoming="D")
    assert [m for _, _, m in succ] == ["L", "R", "D"]


def test_weighted_cost_is_tile_number():
    b = board([1, 2, 3, 4, 5, 6, 7, 0, 8])
    costs = {m: c for _, c, m in tile_successors(b, weighted=True)}
    assert costs == {"U": 5, "L": 7, "R": 8}
    assert {c for _, c, _ in tile_successors(b)} == {1}


def test_swap_last_tile_blank_last_goal():
    b = board([1, 2, 3, 4, 5, 6, 7, 0, 8])
    assert manhattan(b, blank_first=False) == 1
    assert manhattan(b, weighted=True, blank_first=False) == 8
    assert manhattan(goal_board(3, 3, False), blank_first=False) == 0


def test_linear_conflict_reversed_pair():
    b = board([2, 1, 3, 4, 5, 6, 7, 8, 0])
    assert manhattan(b, blank_first=False) == 2
    assert linear_conflict(b, blank_first=False) == 4
    assert linear_conflict(goal_board(3, 3), blank_first=True) == 0


def test_linear_conflict_full_reversal():
    # three mutually reversed tiles: two of them must leave the row
    b = board([0, 3, 2, 1, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15], 4, 4)
    assert linear_conflict(b) == manhattan(b) + 4
    # weighted: cheapest is to move 1 and 2 out, keeping 3
    assert linear_conflict(b, True) == manhattan(b, True) + 2 * (1 + 2)


def test_manhattan_matches_oracle():
    rng = random.Random(3)
    for _ in range(200):
        rows, cols = rng.choice([(3, 3), (4, 4), (3, 5), (2, 4)])
        cells = list(range(rows * cols))
        rng.shuffle(cells)
        b = board(cells, rows, cols)
        for w in (False, True):
            for bf in (False, True):
                assert manhattan(b, w, bf) == tile_manhattan(cells, cols, w, bf)


@pytest.mark.slow
@pytest.mark.parametrize("weighted", [False, True])
def test_heuristics_admissible_on_full_8_puzzle(weighted, eight_unit, eight_weighted):
    dist = eight_weighted if weighted else eight_unit
    assert len(dist) == 181440
    for cells, d in dist.items():
        b = board(cells)
        md = manhattan(b, weighted)
        lc = linear_conflict(b, weighted)
        assert md <= lc <= d


def test_heuristics_admissible_blank_last(eight_unit_blank_last):
    for cells, d in list(eight_unit_blank_last.items())[::7]:
        assert linear_conflict(board(cells), blank_first=False) <= d


@pytest.mark.parametrize("weighted", [False, True])
def test_heuristics_consistent(weighted):
    rng = random.Random(5)
    for _ in range(3000):
        rows, cols = rng.choice([(3, 3), (4, 4)])
        b = random_walk_instance(rows, cols, rng.randint(0, 60), rng.random())
        for child, cost, _ in tile_successors(b, weighted):
            for h in (manhattan, linear_conflict):
                assert h(b, weighted) <= cost + h(child, weighted)


def test_parse_square_board():
    b = parse_korf_instance(" ".join(str(i) for i in range(16)))
    assert (b.rows, b.cols, b.blank) == (4, 4, 0)
    assert format_board(b) == " ".join(str(i) for i in range(16))


@pytest.mark.parametrize("text,msg", [
    (" ".join(str(i) for i in range(15)), "square"),
    ("5 5 " + " ".join(str(i) for i in range(2, 16)), "duplicate value 5"),
    ("0 1 2 3 4 5 6 7 9", "out of range"),
    ("0 1 2 x 4 5 6 7 8", "non-integer"),
    ("0 2 1 3 4 5 6 7 8", "not solvable"),
])
def test_parse_errors(text, msg):
    with pytest.raises(TileParseError, match=msg):
        parse_korf_instance(text)


def test_parse_rectangular_needs_shape():
    text = " ".join(str(i) for i in range(15))
    assert parse_korf_instance(text, 3, 5).cols == 5
    with pytest.raises(TileParseError, match="expected 16"):
        parse_korf_instance(text, 4, 4)


def test_random_walk():
    assert random_walk_instance(4, 4, 0, 1) == goal_board(4, 4)
    assert random_walk_instance(4, 4, 50, 9) == random_walk_instance(4, 4, 50, 9)
    assert random_walk_instance(3, 5, 45, 2, blank_first=False) != goal_board(3, 5, False)


@pytest.mark.parametrize("seed", range(5))
def test_random_walk_cost_bounded_by_length(seed):
    b = random_walk_instance(3, 5, 45, seed)
    assert is_solvable(b)
    sol = ida_star(TileDomain(b))
    assert sol.solved and sol.cost <= 45
    assert replay_cost(TileDomain(b), sol.path) == sol.cost


def test_moves_preserve_solvability():
    rng = random.Random(1)
    for _ in range(200):
        for bf in (True, False):
            b = random_walk_instance(4, 4, rng.randint(0, 100), rng.random(), bf)
            assert is_solvable(b, bf)
            swapped = list(b.cells)
            i, j = [k for k in range(16) if swapped[k]][:2]
            swapped[i], swapped[j] = swapped[j], swapped[i]
            assert not is_solvable(board(swapped, 4, 4), bf)


def test_instance_file_round_trip():
    insts = [TileInstance(f"w{i}", random_walk_instance(4, 4, 20 + i, i), i, 20 + i) for i in range(3)]
    back = read_instances(format_instances(insts))
    assert [(x.ident, x.board, x.seed, x.steps) for x in back] == \
        [(x.ident, x.board, x.seed, x.steps) for x in insts]


def test_instance_file_error_names_line():
    with pytest.raises(TileParseError, match="f.txt:2"):
        read_instances("0 1 2 3 4 5 6 7 8\n0 1 2\n", source="f.txt")


@pytest.mark.parametrize("weighted", [False, True])
def test_domain_solution_replays(weighted):
    b = random_walk_instance(4, 4, 40, 17)
    d = TileDomain(b, weighted)
    for policy in (DecisionPolicy.always(), DecisionPolicy.constant(0.3), DecisionPolicy.adaptive(0.5)):
        sol = ida_star(d, policy)
        assert replay_cost(d, sol.path) == sol.cost
    assert ida_star(d, config=SearchConfig(mode="h2")).cost == sol.cost
