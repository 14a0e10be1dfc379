"""Sliding-tile puzzles: boards, moves, heuristics, instance files.

Boards are stored in reading order with 0 as the blank.  Moves name the
direction the blank travels (``U``, ``L``, ``R``, ``D``) and are generated in
that order.  The goal puts tiles in ascending reading order, with the blank
either first (Korf's convention, the default) or last.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .kernels import tilecore as _core
from .metareason import DecisionPolicy, PolicyKind, Rule, SampleHistory, TimingModel, decide
from .search import (
    RESOURCE_LIMIT,
    SOLVED,
    UNSOLVABLE,
    SearchConfig,
    SearchStats,
    Solution,
)

MOVES = "ULRD"
REVERSE = {"U": "D", "D": "U", "L": "R", "R": "L"}

_MODE = {"lazy": 0, "h1": 1, "h2": 2, "max": 3}
_POLICY = {PolicyKind.ALWAYS: 0, PolicyKind.NEVER: 1, PolicyKind.CONSTANT: 2, PolicyKind.ADAPTIVE: 3}
_SOURCES = ("none", "g", "h1", "h2")
_STATUS = (SOLVED, UNSOLVABLE, RESOURCE_LIMIT)


class TileParseError(ValueError):
    pass


@dataclass(frozen=True)
class TileBoard:
    rows: int
    cols: int
    cells: tuple
    blank: int = field(default=-1, compare=False)

    def __post_init__(self):
        n = self.rows * self.cols
        if len(self.cells) != n or sorted(self.cells) != list(range(n)):
            raise ValueError(f"cells are not a permutation of 0..{n - 1}")
        idx = self.cells.index(0)
        if self.blank == -1:
            object.__setattr__(self, "blank", idx)
        elif self.blank != idx:
            raise ValueError("blank index inconsistent with cells")

    def __str__(self) -> str:
        return format_board(self)


def goal_board(rows: int, cols: int, blank_first: bool = True) -> TileBoard:
    n = rows * cols
    cells = tuple(range(n)) if blank_first else tuple(range(1, n)) + (0,)
    return TileBoard(rows, cols, cells)


def _goal_index(tile: int, blank_first: bool) -> int:
    return tile if blank_first else tile - 1


def is_solvable(board: TileBoard, blank_first: bool = True) -> bool:
    """Permutation parity relative to the goal must match blank displacement parity."""
    goal = goal_board(board.rows, board.cols, blank_first).cells
    where = {t: i for i, t in enumerate(goal)}
    perm = [where[t] for t in board.cells]
    seen = [False] * len(perm)
    transpositions = 0
    for i in range(len(perm)):
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length:
            transpositions += length - 1
    gb = goal.index(0)
    dist = abs(board.blank // board.cols - gb // board.cols) + abs(board.blank % board.cols - gb % board.cols)
    return transpositions % 2 == dist % 2


def _neighbour(board: TileBoard, move: str) -> int:
    return _core.neighbour(board.blank, MOVES.index(move), board.rows, board.cols)


def apply_move(board: TileBoard, move: str) -> tuple[TileBoard, int]:
    """Slide the blank; returns the new board and the number of the moved tile."""
    nb = _neighbour(board, move)
    if nb < 0:
        raise ValueError(f"illegal move {move}")
    cells = list(board.cells)
    tile = cells[nb]
    cells[board.blank], cells[nb] = tile, 0
    return TileBoard(board.rows, board.cols, tuple(cells), nb), tile


def tile_successors(board: TileBoard, weighted: bool = False, incoming: str | None = None):
    out = []
    back = REVERSE.get(incoming) if incoming else None
    for move in MOVES:
        if move == back or _neighbour(board, move) < 0:
            continue
        child, tile = apply_move(board, move)
        out.append((child, tile if weighted else 1, move))
    return out


def manhattan(board: TileBoard, weighted: bool = False, blank_first: bool = True) -> int:
    return _core.manhattan(board.cells, board.rows, board.cols, weighted, blank_first)


def linear_conflict(board: TileBoard, weighted: bool = False, blank_first: bool = True) -> int:
    """Manhattan distance plus twice the cheapest set of tiles that must leave
    a line so the remaining tiles in it are in goal order."""
    return _core.linear_conflict(board.cells, board.rows, board.cols, weighted, blank_first)


def parse_korf_instance(text: str, rows: int | None = None, cols: int | None = None,
                        blank_first: bool = True) -> TileBoard:
    tokens = text.split()
    try:
        values = [int(t) for t in tokens]
    except ValueError as exc:
        raise TileParseError(f"non-integer token: {exc}") from None
    if rows is None and cols is None:
        side = int(round(len(values) ** 0.5))
        if side * side != len(values) or side < 2:
            raise TileParseError(f"{len(values)} values do not form a square board")
        rows = cols = side
    elif rows is None or cols is None:
        raise TileParseError("give both rows and cols or neither")
    n = rows * cols
    if len(values) != n:
        raise TileParseError(f"expected {n} values for a {rows}x{cols} board, got {len(values)}")
    bad = [v for v in values if not 0 <= v < n]
    if bad:
        raise TileParseError(f"value {bad[0]} out of range 0..{n - 1}")
    seen = set()
    for v in values:
        if v in seen:
            raise TileParseError(f"duplicate value {v}")
        seen.add(v)
    board = TileBoard(rows, cols, tuple(values))
    if not is_solvable(board, blank_first):
        raise TileParseError("board is not solvable for the chosen goal")
    return board


def format_board(board: TileBoard) -> str:
    return " ".join(str(v) for v in board.cells)


def random_walk_instance(rows: int, cols: int, steps: int, seed, blank_first: bool = True) -> TileBoard:
    """Walk ``steps`` random blank moves from the goal, never undoing the last one."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    rng = random.Random(seed)
    board = goal_board(rows, cols, blank_first)
    last = None
    for _ in range(steps):
        legal = [m for m in MOVES if _neighbour(board, m) >= 0]
        choices = [m for m in legal if m != REVERSE.get(last)] or legal
        last = rng.choice(choices)
        board, _ = apply_move(board, last)
    return board


@dataclass
class TileInstance:
    ident: str
    board: TileBoard
    seed: int | None = None
    steps: int | None = None


def read_instances(text: str, rows: int | None = None, cols: int | None = None,
                   blank_first: bool = True, source: str = "<text>") -> list[TileInstance]:
    """One instance per line; ``#`` lines carry ``key=value`` metadata for the next line."""
    out, meta = [], {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                key, eq, val = tok.partition("=")
                if eq:
                    meta[key] = val
            continue
        try:
            board = parse_korf_instance(line, rows, cols, blank_first)
        except TileParseError as exc:
            raise TileParseError(f"{source}:{lineno}: {exc}") from None
        seed = int(meta["seed"]) if "seed" in meta else None
        steps = int(meta["steps"]) if "steps" in meta else None
        out.append(TileInstance(meta.get("id", f"{source}:{lineno}"), board, seed, steps))
        meta = {}
    return out


def format_instances(instances) -> str:
    lines = []
    for inst in instances:
        head = f"# id={inst.ident} rows={inst.board.rows} cols={inst.board.cols}"
        if inst.seed is not None:
            head += f" seed={inst.seed}"
        if inst.steps is not None:
            head += f" steps={inst.steps}"
        lines += [head, format_board(inst.board)]
    return "\n".join(lines) + "\n"


class TileDomain:
    """Search-domain adapter for one tile board.

    ``h1`` is Manhattan distance, ``h2`` linear conflict.  ``kernel_search``
    runs the whole search inside the tile kernel.
    """

    def __init__(self, board: TileBoard, weighted: bool = False, blank_first: bool = True, kernel=None):
        self.initial_state = board
        self.weighted = weighted
        self.blank_first = blank_first
        self.kernel = kernel or _core
        self.goal = goal_board(board.rows, board.cols, blank_first)

    def is_goal(self, state: TileBoard) -> bool:
        return state.cells == self.goal.cells

    def successors(self, state: TileBoard, incoming):
        return tile_successors(state, self.weighted, incoming)

    def h1(self, state: TileBoard) -> int:
        return self.kernel.manhattan(state.cells, state.rows, state.cols, self.weighted, self.blank_first)

    def h2(self, state: TileBoard) -> int:
        return self.kernel.linear_conflict(state.cells, state.rows, state.cols, self.weighted, self.blank_first)

    def branching(self, state: TileBoard, incoming) -> int:
        inc = MOVES.index(incoming) if incoming else -1
        return self.kernel.branching(state.blank, inc, state.rows, state.cols)

    def random_states(self, k: int, rng: random.Random) -> list[TileBoard]:
        b = self.initial_state
        out = []
        for _ in range(k):
            cells = list(range(b.rows * b.cols))
            rng.shuffle(cells)
            out.append(TileBoard(b.rows, b.cols, tuple(cells)))
        return out

    def calibrate(self, samples: int = 1000, seed: int = 0, reps: int = 5) -> TimingModel:
        """Fixed timing constants measured on random boards with this kernel."""
        boards = [s.cells for s in self.random_states(samples, random.Random(seed))]
        b = self.initial_state
        t1, t2, te = self.kernel.time_heuristics(boards, b.rows, b.cols, self.weighted, self.blank_first, reps)
        return TimingModel(t1, t2, te)

    def kernel_search(self, policy: DecisionPolicy, config: SearchConfig) -> Solution:
        tm = config.timing
        simplified = policy.rule is Rule.SIMPLIFIED
        if policy.kind is PolicyKind.CONSTANT:
            eval_by_b = [decide(policy.p_h, b, policy.rule, tm.t1, tm.t2, tm.te) for b in range(5)]
        else:
            eval_by_b = [True] * 5
        b = self.initial_state
        t0 = time.perf_counter()
        r = self.kernel.search(
            b.cells, b.rows, b.cols, self.weighted, self.blank_first, _MODE[config.mode],
            _POLICY[policy.kind], policy.p_h, policy.cap, simplified, tm.t1, tm.t2, tm.te,
            eval_by_b, -1 if config.node_cap is None else config.node_cap,
            config.time_cap_s or 0.0, config.max_depth)
        sol = _solution_from_kernel(r)
        sol.stats.wall_time = time.perf_counter() - t0
        return sol


def _solution_from_kernel(r: dict) -> Solution:
    stats = SearchStats(
        generated=r["generated"], expanded=r["expanded"], h1_evals=r["h1_evals"],
        h2_evals=r["h2_evals"], h2_helpful=r["h2_helpful"], iterations=r["iterations"],
        wall_time=0.0, thresholds=list(r["thresholds"]),
        next_sources=[_SOURCES[s] for s in r["sources"]],
        samples=SampleHistory(r["hist_n"], r["hist_sum"]))
    status = _STATUS[r["status"]]
    if status == SOLVED:
        return Solution(status, [MOVES[m] for m in r["path"]], r["cost"], stats)
    return Solution(status, None, None, stats)
