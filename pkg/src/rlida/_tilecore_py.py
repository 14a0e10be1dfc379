"""Pure-Python tile kernel: heuristics and a specialised lazy IDA* loop.

Mirrors ``_tilecore.pyx`` operation for operation; the two must produce the
same counters on every input.  Boards are flat sequences in reading order
with 0 as the blank.  Moves are blank moves: 0 up, 1 left, 2 right, 3 down.
"""

import math
import time

INF = math.inf

MODE_LAZY, MODE_H1, MODE_H2, MODE_MAX = 0, 1, 2, 3
POL_ALWAYS, POL_NEVER, POL_CONST, POL_ADAPTIVE = 0, 1, 2, 3
SRC_NONE, SRC_G, SRC_H1, SRC_H2 = 0, 1, 2, 3
ST_SOLVED, ST_UNSOLVABLE, ST_LIMIT = 0, 1, 2

COMPILED = False


def goal_index(tile, blank_first):
    return tile if blank_first else tile - 1


def manhattan(cells, rows, cols, weighted, blank_first):
    total = 0
    off = 0 if blank_first else 1
    for i, t in enumerate(cells):
        if t:
            gi = t - off
            d = abs(i // cols - gi // cols) + abs(i % cols - gi % cols)
            total += d * t if weighted else d
    return total


def _line_cover(goals, weights, k):
    # min-weight vertex cover of the inversion graph = total - heaviest
    # increasing subsequence of goal coordinates
    best = [0] * k
    top = 0
    total = 0
    for i in range(k):
        w = weights[i]
        total += w
        m = 0
        gi = goals[i]
        for j in range(i):
            if goals[j] < gi and best[j] > m:
                m = best[j]
        best[i] = m + w
        if best[i] > top:
            top = best[i]
    return total - top


def linear_conflict(cells, rows, cols, weighted, blank_first):
    off = 0 if blank_first else 1
    total = manhattan(cells, rows, cols, weighted, blank_first)
    penalty = 0
    goals = [0] * max(rows, cols)
    weights = [0] * max(rows, cols)
    for r in range(rows):
        k = 0
        for c in range(cols):
            t = cells[r * cols + c]
            if t and (t - off) // cols == r:
                goals[k] = (t - off) % cols
                weights[k] = t if weighted else 1
                k += 1
        if k > 1:
            penalty += _line_cover(goals, weights, k)
    for c in range(cols):
        k = 0
        for r in range(rows):
            t = cells[r * cols + c]
            if t and (t - off) % cols == c:
                goals[k] = (t - off) // cols
                weights[k] = t if weighted else 1
                k += 1
        if k > 1:
            penalty += _line_cover(goals, weights, k)
    return total + 2 * penalty


def neighbour(blank, move, rows, cols):
    """Index the blank moves to, or -1 when the move leaves the board."""
    r, c = divmod(blank, cols)
    if move == 0:
        return blank - cols if r > 0 else -1
    if move == 1:
        return blank - 1 if c > 0 else -1
    if move == 2:
        return blank + 1 if c < cols - 1 else -1
    return blank + cols if r < rows - 1 else -1


def branching(blank, incoming, rows, cols):
    n = 0
    for m in range(4):
        if m != 3 - incoming and neighbour(blank, m, rows, cols) >= 0:
            n += 1
    return n


def _decide(p_h, b, simplified, t1, t2, te):
    pb = p_h * b
    if pb >= 1.0:
        return True
    if simplified:
        return False
    return t2 < p_h / (1.0 - pb) * (te + b * t1)


def _bound(n, sum_x, l):
    if n <= 0 or l <= 0:
        return 1.0
    mean_x = sum_x / n
    if l <= mean_x:
        return 1.0
    scale = math.sqrt(2.0 * n) * l
    log_term = math.log(scale)
    if log_term < 0.0:
        log_term = 0.0
    bound = (1.0 + math.sqrt(log_term)) / scale + mean_x / l
    return bound if bound < 1.0 else 1.0


class _Limit(Exception):
    pass


class _Search:
    def __init__(self, cells, rows, cols, weighted, blank_first, mode, policy, p_h, cap,
                 simplified, t1, t2, te, eval_by_b, node_cap, time_cap, max_depth):
        self.cells = list(cells)
        self.rows, self.cols = rows, cols
        self.weighted, self.blank_first = weighted, blank_first
        self.mode, self.policy = mode, policy
        self.p_h, self.cap, self.simplified = p_h, cap, simplified
        self.t1, self.t2, self.te = t1, t2, te
        self.eval_by_b = list(eval_by_b)
        self.node_cap = node_cap
        self.deadline = time.perf_counter() + time_cap if time_cap > 0 else 0.0
        self.max_depth = max_depth
        self.n = rows * cols
        off = 0 if blank_first else 1
        self.goal = [0] * self.n
        for t in range(1, self.n):
            self.goal[t - off] = t
        self.generated = self.expanded = 0
        self.h1_evals = self.h2_evals = self.helpful = 0
        self.hist_n = 0
        self.hist_sum = 0.0
        self.best = INF
        self.best_src = SRC_NONE
        self.path = []
        self.goal_g = 0

    def h1(self):
        self.h1_evals += 1
        return manhattan(self.cells, self.rows, self.cols, self.weighted, self.blank_first)

    def h2(self):
        self.h2_evals += 1
        return linear_conflict(self.cells, self.rows, self.cols, self.weighted, self.blank_first)

    def sample(self, a, b):
        top = a if a > b else b
        if top > 0:
            self.hist_n += 1
            self.hist_sum += 1.0 - a / top

    def prune(self, value, src):
        if value < self.best or (value == self.best and self.best_src == SRC_H1 and src != SRC_H1):
            self.best = value
            self.best_src = src
        return value

    def opt_cond(self, g, threshold, h1, b):
        if self.policy == POL_ALWAYS:
            return True
        if self.policy == POL_NEVER:
            return False
        if self.policy == POL_CONST:
            return self.eval_by_b[b]
        room = threshold - g
        l = 0.0 if room <= 0 else 1.0 - h1 / room
        p = _bound(self.hist_n, self.hist_sum, l)
        if p > self.cap:
            p = self.cap
        return _decide(p, b, self.simplified, self.t1, self.t2, self.te)

    def dfs(self, blank, g, threshold, incoming, depth):
        if g > threshold:
            return False, self.prune(g, SRC_G)
        if self.cells == self.goal:
            self.goal_g = g
            return True, threshold
        mode = self.mode
        if mode == MODE_H2:
            f = g + self.h2()
            if f > threshold:
                self.helpful += 1
                return False, self.prune(f, SRC_H2)
        else:
            h1 = self.h1()
            if mode == MODE_MAX:
                h2 = self.h2()
                self.sample(h1, h2)
                if g + h2 > threshold:
                    self.helpful += 1
                f = g + (h1 if h1 > h2 else h2)
                if f > threshold:
                    return False, self.prune(f, SRC_H2 if h2 > h1 else SRC_H1)
            else:
                if g + h1 > threshold:
                    return False, self.prune(g + h1, SRC_H1)
                if mode == MODE_LAZY and self.opt_cond(
                        g, threshold, h1, branching(blank, incoming, self.rows, self.cols)):
                    h2 = self.h2()
                    self.sample(h1, h2)
                    if g + h2 > threshold:
                        self.helpful += 1
                        return False, self.prune(g + h2, SRC_H2)

        rows, cols, cells = self.rows, self.cols, self.cells
        moves = []
        for m in range(4):
            if m != 3 - incoming:
                nb = neighbour(blank, m, rows, cols)
                if nb >= 0:
                    moves.append((m, nb))
        self.expanded += 1
        self.generated += len(moves)
        if self.node_cap >= 0 and self.generated > self.node_cap:
            raise _Limit()
        if depth + 1 > self.max_depth:
            raise _Limit()
        if self.deadline and (self.expanded & 0x3FF) == 0 and time.perf_counter() > self.deadline:
            raise _Limit()

        next_t = INF
        for m, nb in moves:
            t = cells[nb]
            cells[blank] = t
            cells[nb] = 0
            cost = t if self.weighted else 1
            self.path.append(m)
            found, v = self.dfs(nb, g + cost, threshold, m, depth + 1)
            if found:
                return True, v
            self.path.pop()
            cells[nb] = t
            cells[blank] = 0
            if v < next_t:
                next_t = v
        return False, next_t

    def root_threshold(self):
        self.generated += 1
        if self.mode == MODE_H1:
            return self.h1()
        if self.mode == MODE_H2:
            return self.h2()
        a = self.h1()
        b = self.h2()
        self.sample(a, b)
        return a if a > b else b

    def run(self):
        thresholds, sources = [], []
        status, cost, iterations = ST_LIMIT, -1, 0
        blank = self.cells.index(0)
        try:
            threshold = self.root_threshold()
            while True:
                iterations += 1
                thresholds.append(threshold)
                self.generated += 1
                self.best, self.best_src = INF, SRC_NONE
                self.path = []
                found, nt = self.dfs(blank, 0, threshold, -1, 0)
                if found:
                    sources.append(SRC_NONE)
                    status, cost = ST_SOLVED, self.goal_g
                    break
                sources.append(self.best_src)
                if nt == INF:
                    status = ST_UNSOLVABLE
                    break
                threshold = nt
        except _Limit:
            status = ST_LIMIT
        return {
            "status": status, "cost": cost, "path": list(self.path) if status == ST_SOLVED else [],
            "generated": self.generated, "expanded": self.expanded,
            "h1_evals": self.h1_evals, "h2_evals": self.h2_evals, "h2_helpful": self.helpful,
            "iterations": iterations, "thresholds": thresholds, "sources": sources,
            "hist_n": self.hist_n, "hist_sum": self.hist_sum,
        }


def search(cells, rows, cols, weighted, blank_first, mode, policy, p_h, cap, simplified,
           t1, t2, te, eval_by_b, node_cap=-1, time_cap=0.0, max_depth=5000):
    """Full iterative-deepening run on one board; returns a dict of counters."""
    import sys
    old = sys.getrecursionlimit()
    if old < max_depth + 200:
        sys.setrecursionlimit(max_depth + 200)
    try:
        return _Search(cells, rows, cols, weighted, blank_first, mode, policy, p_h, cap,
                       simplified, t1, t2, te, eval_by_b, node_cap, time_cap, max_depth).run()
    finally:
        sys.setrecursionlimit(old)


def time_heuristics(boards, rows, cols, weighted, blank_first, reps=1):
    """Mean seconds per h1 call, per h2 call, and per "h1 + expand" step."""
    clock = time.perf_counter
    count = len(boards) * reps
    t0 = clock()
    for _ in range(reps):
        for cells in boards:
            manhattan(cells, rows, cols, weighted, blank_first)
    t1 = (clock() - t0) / count
    t0 = clock()
    for _ in range(reps):
        for cells in boards:
            linear_conflict(cells, rows, cols, weighted, blank_first)
    t2 = (clock() - t0) / count
    t0 = clock()
    for _ in range(reps):
        for cells in boards:
            manhattan(cells, rows, cols, weighted, blank_first)
            cells = list(cells)
            blank = cells.index(0)
            moves = []
            for m in range(4):
                nb = neighbour(blank, m, rows, cols)
                if nb >= 0:
                    moves.append((m, nb))
            for m, nb in moves:
                t = cells[nb]
                cells[blank] = t
                cells[nb] = 0
                cells[nb] = t
                cells[blank] = 0
    te = (clock() - t0) / count
    return t1, t2, te
