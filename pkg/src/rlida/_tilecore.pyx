# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled tile kernel: heuristics and a specialised lazy IDA* loop.

Same API and counters as ``_tilecore_py``.
"""

from libc.math cimport log, sqrt, INFINITY
from libc.stdlib cimport abs as iabs
from posix.time cimport clock_gettime, timespec, CLOCK_MONOTONIC

DEF MAXN = 64
DEF MAXLINE = 8
DEF MAXPATH = 8192

COMPILED = True

MODE_LAZY, MODE_H1, MODE_H2, MODE_MAX = 0, 1, 2, 3
POL_ALWAYS, POL_NEVER, POL_CONST, POL_ADAPTIVE = 0, 1, 2, 3
SRC_NONE, SRC_G, SRC_H1, SRC_H2 = 0, 1, 2, 3
ST_SOLVED, ST_UNSOLVABLE, ST_LIMIT = 0, 1, 2


cdef inline double _now() noexcept nogil:
    cdef timespec ts
    clock_gettime(CLOCK_MONOTONIC, &ts)
    return ts.tv_sec + ts.tv_nsec * 1e-9


cdef struct Board:
    int cells[MAXN]
    int rows
    int cols
    int n
    int off
    bint weighted


cdef inline int _md(Board* b) noexcept nogil:
    cdef int i, t, gi, d, total = 0
    cdef int cols = b.cols
    for i in range(b.n):
        t = b.cells[i]
        if t:
            gi = t - b.off
            d = iabs(i // cols - gi // cols) + iabs(i % cols - gi % cols)
            if b.weighted:
                total += d * t
            else:
                total += d
    return total


cdef inline int _line_cover(int* goals, int* weights, int k) noexcept nogil:
    cdef int best[MAXLINE]
    cdef int i, j, m, gi, top = 0, total = 0
    for i in range(k):
        total += weights[i]
        m = 0
        gi = goals[i]
        for j in range(i):
            if goals[j] < gi and best[j] > m:
                m = best[j]
        best[i] = m + weights[i]
        if best[i] > top:
            top = best[i]
    return total - top


cdef inline int _lc(Board* b) noexcept nogil:
    cdef int goals[MAXLINE]
    cdef int weights[MAXLINE]
    cdef int r, c, k, t, penalty = 0
    cdef int rows = b.rows, cols = b.cols, off = b.off
    cdef int total = _md(b)
    for r in range(rows):
        k = 0
        for c in range(cols):
            t = b.cells[r * cols + c]
            if t and (t - off) // cols == r:
                goals[k] = (t - off) % cols
                weights[k] = t if b.weighted else 1
                k += 1
        if k > 1:
            penalty += _line_cover(goals, weights, k)
    for c in range(cols):
        k = 0
        for r in range(rows):
            t = b.cells[r * cols + c]
            if t and (t - off) % cols == c:
                goals[k] = (t - off) // cols
                weights[k] = t if b.weighted else 1
                k += 1
        if k > 1:
            penalty += _line_cover(goals, weights, k)
    return total + 2 * penalty


cdef inline int _neighbour(int blank, int move, int rows, int cols) noexcept nogil:
    cdef int r = blank // cols, c = blank % cols
    if move == 0:
        return blank - cols if r > 0 else -1
    if move == 1:
        return blank - 1 if c > 0 else -1
    if move == 2:
        return blank + 1 if c < cols - 1 else -1
    return blank + cols if r < rows - 1 else -1


cdef int _load(Board* b, cells, int rows, int cols, bint weighted, bint blank_first) except -1:
    cdef int i
    if rows * cols > MAXN or rows > MAXLINE or cols > MAXLINE:
        raise ValueError("board too large for the compiled kernel")
    b.rows = rows
    b.cols = cols
    b.n = rows * cols
    b.off = 0 if blank_first else 1
    b.weighted = weighted
    for i in range(b.n):
        b.cells[i] = cells[i]
    return 0


def manhattan(cells, int rows, int cols, bint weighted, bint blank_first):
    cdef Board b
    _load(&b, cells, rows, cols, weighted, blank_first)
    return _md(&b)


def linear_conflict(cells, int rows, int cols, bint weighted, bint blank_first):
    cdef Board b
    _load(&b, cells, rows, cols, weighted, blank_first)
    return _lc(&b)


def neighbour(int blank, int move, int rows, int cols):
    return _neighbour(blank, move, rows, cols)


def branching(int blank, int incoming, int rows, int cols):
    cdef int m, n = 0
    for m in range(4):
        if m != 3 - incoming and _neighbour(blank, m, rows, cols) >= 0:
            n += 1
    return n


cdef inline bint _decide(double p_h, int b, bint simplified, double t1, double t2, double te) noexcept nogil:
    cdef double pb = p_h * b
    if pb >= 1.0:
        return True
    if simplified:
        return False
    return t2 < p_h / (1.0 - pb) * (te + b * t1)


cdef inline double _bound(long n, double sum_x, double l) noexcept nogil:
    cdef double mean_x, scale, log_term, bound
    if n <= 0 or l <= 0:
        return 1.0
    mean_x = sum_x / n
    if l <= mean_x:
        return 1.0
    scale = sqrt(2.0 * n) * l
    log_term = log(scale)
    if log_term < 0.0:
        log_term = 0.0
    bound = (1.0 + sqrt(log_term)) / scale + mean_x / l
    return bound if bound < 1.0 else 1.0


cdef struct Ctx:
    Board board
    int goal[MAXN]
    int mode
    int policy
    double p_h
    double cap
    bint simplified
    double t1
    double t2
    double te
    bint eval_by_b[5]
    long long node_cap
    double deadline
    int max_depth
    long long generated
    long long expanded
    long long h1_evals
    long long h2_evals
    long long helpful
    long hist_n
    double hist_sum
    double best
    int best_src
    int path[MAXPATH]
    int path_len
    long long goal_g
    bint limited


cdef inline bint _is_goal(Ctx* c) noexcept nogil:
    cdef int i
    for i in range(c.board.n):
        if c.board.cells[i] != c.goal[i]:
            return False
    return True


cdef inline void _sample(Ctx* c, int a, int b) noexcept nogil:
    cdef int top = a if a > b else b
    if top > 0:
        c.hist_n += 1
        c.hist_sum += 1.0 - <double>a / <double>top


cdef inline double _prune(Ctx* c, double value, int src) noexcept nogil:
    if value < c.best or (value == c.best and c.best_src == 2 and src != 2):
        c.best = value
        c.best_src = src
    return value


cdef inline bint _opt_cond(Ctx* c, long long g, double threshold, int h1, int b) noexcept nogil:
    cdef double room, l, p
    if c.policy == 0:
        return True
    if c.policy == 1:
        return False
    if c.policy == 2:
        return c.eval_by_b[b]
    room = threshold - g
    l = 0.0 if room <= 0 else 1.0 - h1 / room
    p = _bound(c.hist_n, c.hist_sum, l)
    if p > c.cap:
        p = c.cap
    return _decide(p, b, c.simplified, c.t1, c.t2, c.te)


# Returns 1 when a goal was found; the pruning value goes through *out.
cdef int _dfs(Ctx* c, int blank, long long g, double threshold, int incoming, int depth,
              double* out) noexcept nogil:
    cdef int h1, h2, m, nb, t, b, nmoves, i, found
    cdef int moves[4]
    cdef int nbs[4]
    cdef double f, v, next_t
    cdef int rows = c.board.rows, cols = c.board.cols
    if g > threshold:
        out[0] = _prune(c, g, 1)
        return 0
    if _is_goal(c):
        c.goal_g = g
        out[0] = threshold
        return 1
    if c.mode == 2:
        c.h2_evals += 1
        f = g + _lc(&c.board)
        if f > threshold:
            c.helpful += 1
            out[0] = _prune(c, f, 3)
            return 0
    else:
        c.h1_evals += 1
        h1 = _md(&c.board)
        if c.mode == 3:
            c.h2_evals += 1
            h2 = _lc(&c.board)
            _sample(c, h1, h2)
            if g + h2 > threshold:
                c.helpful += 1
            f = g + (h1 if h1 > h2 else h2)
            if f > threshold:
                out[0] = _prune(c, f, 3 if h2 > h1 else 2)
                return 0
        else:
            if g + h1 > threshold:
                out[0] = _prune(c, g + h1, 2)
                return 0
            if c.mode == 0:
                b = 0
                for m in range(4):
                    if m != 3 - incoming and _neighbour(blank, m, rows, cols) >= 0:
                        b += 1
                if _opt_cond(c, g, threshold, h1, b):
                    c.h2_evals += 1
                    h2 = _lc(&c.board)
                    _sample(c, h1, h2)
                    if g + h2 > threshold:
                        c.helpful += 1
                        out[0] = _prune(c, g + h2, 3)
                        return 0

    nmoves = 0
    for m in range(4):
        if m != 3 - incoming:
            nb = _neighbour(blank, m, rows, cols)
            if nb >= 0:
                moves[nmoves] = m
                nbs[nmoves] = nb
                nmoves += 1
    c.expanded += 1
    c.generated += nmoves
    if c.node_cap >= 0 and c.generated > c.node_cap:
        c.limited = True
    elif depth + 1 > c.max_depth or depth + 1 >= MAXPATH:
        c.limited = True
    elif c.deadline > 0 and (c.expanded & 0x3FF) == 0 and _now() > c.deadline:
        c.limited = True
    if c.limited:
        out[0] = INFINITY
        return 0

    next_t = INFINITY
    for i in range(nmoves):
        m = moves[i]
        nb = nbs[i]
        t = c.board.cells[nb]
        c.board.cells[blank] = t
        c.board.cells[nb] = 0
        c.path[c.path_len] = m
        c.path_len += 1
        found = _dfs(c, nb, g + (t if c.board.weighted else 1), threshold, m, depth + 1, &v)
        if found:
            out[0] = v
            return 1
        c.path_len -= 1
        c.board.cells[nb] = t
        c.board.cells[blank] = 0
        if c.limited:
            out[0] = INFINITY
            return 0
        if v < next_t:
            next_t = v
    out[0] = next_t
    return 0


def search(cells, int rows, int cols, bint weighted, bint blank_first, int mode, int policy,
           double p_h, double cap, bint simplified, double t1, double t2, double te,
           eval_by_b, long long node_cap=-1, double time_cap=0.0, int max_depth=5000):
    """Full iterative-deepening run on one board; returns a dict of counters."""
    cdef Ctx* c
    cdef Ctx ctx_storage
    cdef int i, blank = -1, found, a, b, status = ST_LIMIT, iterations = 0
    cdef double threshold, nt
    c = &ctx_storage
    _load(&c.board, cells, rows, cols, weighted, blank_first)
    for i in range(c.board.n):
        c.goal[i] = 0
    for i in range(1, c.board.n):
        c.goal[i - c.board.off] = i
    for i in range(c.board.n):
        if c.board.cells[i] == 0:
            blank = i
    c.mode = mode
    c.policy = policy
    c.p_h = p_h
    c.cap = cap
    c.simplified = simplified
    c.t1 = t1
    c.t2 = t2
    c.te = te
    for i in range(5):
        c.eval_by_b[i] = eval_by_b[i]
    c.node_cap = node_cap
    c.deadline = _now() + time_cap if time_cap > 0 else 0.0
    c.max_depth = max_depth
    c.generated = c.expanded = c.h1_evals = c.h2_evals = c.helpful = 0
    c.hist_n = 0
    c.hist_sum = 0.0
    c.path_len = 0
    c.goal_g = 0
    c.limited = False

    thresholds = []
    sources = []
    cost = -1
    c.generated += 1
    if mode == 1:
        c.h1_evals += 1
        threshold = _md(&c.board)
    elif mode == 2:
        c.h2_evals += 1
        threshold = _lc(&c.board)
    else:
        c.h1_evals += 1
        c.h2_evals += 1
        a = _md(&c.board)
        b = _lc(&c.board)
        _sample(c, a, b)
        threshold = a if a > b else b
    while True:
        iterations += 1
        thresholds.append(int(threshold))
        c.generated += 1
        c.best = INFINITY
        c.best_src = 0
        c.path_len = 0
        with nogil:
            found = _dfs(c, blank, 0, threshold, -1, 0, &nt)
        if c.limited:
            status = ST_LIMIT
            break
        if found:
            sources.append(SRC_NONE)
            status = ST_SOLVED
            cost = c.goal_g
            break
        sources.append(c.best_src)
        if nt == INFINITY:
            status = ST_UNSOLVABLE
            break
        threshold = nt
    path = [c.path[i] for i in range(c.path_len)] if status == ST_SOLVED else []
    return {
        "status": status, "cost": cost, "path": path,
        "generated": c.generated, "expanded": c.expanded,
        "h1_evals": c.h1_evals, "h2_evals": c.h2_evals, "h2_helpful": c.helpful,
        "iterations": iterations, "thresholds": thresholds, "sources": sources,
        "hist_n": c.hist_n, "hist_sum": c.hist_sum,
    }


def time_heuristics(boards, int rows, int cols, bint weighted, bint blank_first, int reps=1):
    """Mean seconds per h1 call, per h2 call, and per "h1 + expand" step."""
    cdef int nb_boards = len(boards)
    cdef int i, r, m, nb, t, blank, nmoves, k
    cdef int nbs[4]
    cdef double t0, t1, t2, te
    cdef long long sink = 0
    cdef Board* bs
    cdef Board tmp
    if nb_boards == 0:
        raise ValueError("need at least one board")
    buf = bytearray(sizeof(Board) * nb_boards)
    cdef unsigned char[::1] view = buf
    bs = <Board*> &view[0]
    for i in range(nb_boards):
        _load(&bs[i], boards[i], rows, cols, weighted, blank_first)
    cdef double count = <double> nb_boards * reps
    with nogil:
        t0 = _now()
        for r in range(reps):
            for i in range(nb_boards):
                sink += _md(&bs[i])
        t1 = (_now() - t0) / count
        t0 = _now()
        for r in range(reps):
            for i in range(nb_boards):
                sink += _lc(&bs[i])
        t2 = (_now() - t0) / count
        t0 = _now()
        for r in range(reps):
            for i in range(nb_boards):
                sink += _md(&bs[i])
                tmp = bs[i]
                blank = 0
                for k in range(tmp.n):
                    if tmp.cells[k] == 0:
                        blank = k
                nmoves = 0
                for m in range(4):
                    nb = _neighbour(blank, m, rows, cols)
                    if nb >= 0:
                        nbs[nmoves] = nb
                        nmoves += 1
                for k in range(nmoves):
                    nb = nbs[k]
                    t = tmp.cells[nb]
                    tmp.cells[blank] = t
                    tmp.cells[nb] = 0
                    sink += tmp.cells[blank]
                    tmp.cells[nb] = t
                    tmp.cells[blank] = 0
        te = (_now() - t0) / count
    if sink == -1:
        print(sink)
    return t1, t2, te
