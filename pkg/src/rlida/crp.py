"""Restricted container relocation.

Containers ``1..N`` sit in ``S`` stacks of at most ``T`` tiers and must be
retrieved in increasing order.  Only the container on top of the stack that
holds the next target may be relocated, and only relocations cost anything:
whenever the target surfaces it is retrieved for free, so every state the
search sees is normalized.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import NamedTuple


class CrpParseError(ValueError):
    pass


@dataclass(frozen=True)
class CrpState:
    stacks: tuple  # tuple of stacks, each a tuple bottom -> top
    tiers: int
    target: int
    remaining: int

    @property
    def n_stacks(self) -> int:
        return len(self.stacks)


@dataclass(frozen=True)
class CrpInstance:
    n_stacks: int
    tiers: int
    n_containers: int
    layout: tuple

    def initial_state(self) -> CrpState:
        return crp_normalize(CrpState(self.layout, self.tiers, 1, self.n_containers))


class Relocation(NamedTuple):
    container: int
    src: int
    dst: int
    retrieved: bool = False


def crp_normalize(state: CrpState) -> CrpState:
    """Retrieve targets for as long as one sits on top of a stack."""
    stacks = state.stacks
    target, remaining = state.target, state.remaining
    changed = False
    while remaining:
        for i, s in enumerate(stacks):
            if s and s[-1] == target:
                stacks = stacks[:i] + (s[:-1],) + stacks[i + 1:]
                target += 1
                remaining -= 1
                changed = True
                break
        else:
            break
    if not changed:
        return state
    return CrpState(stacks, state.tiers, target, remaining)


def target_stack(state: CrpState) -> int:
    for i, s in enumerate(state.stacks):
        if state.target in s:
            return i
    raise ValueError(f"target {state.target} not present")


def crp_successors(state: CrpState, incoming: Relocation | None = None):
    if state.remaining == 0:
        return []
    src = target_stack(state)
    stacks = state.stacks
    moved = stacks[src][-1]
    out = []
    for dst, s in enumerate(stacks):
        if dst == src or len(s) >= state.tiers:
            continue
        if (incoming is not None and not incoming.retrieved
                and incoming.container == moved and incoming.src == dst):
            continue
        new = list(stacks)
        new[src] = stacks[src][:-1]
        new[dst] = s + (moved,)
        child = CrpState(tuple(new), state.tiers, state.target, state.remaining)
        norm = crp_normalize(child)
        out.append((norm, 1, Relocation(moved, src, dst, norm is not child)))
    return out


def crp_branching(state: CrpState, incoming: Relocation | None = None) -> int:
    """Number of successors ``crp_successors`` would return, without building them."""
    if state.remaining == 0:
        return 0
    src = target_stack(state)
    moved = state.stacks[src][-1]
    n = 0
    for dst, s in enumerate(state.stacks):
        if dst == src or len(s) >= state.tiers:
            continue
        if (incoming is not None and not incoming.retrieved
                and incoming.container == moved and incoming.src == dst):
            continue
        n += 1
    return n


def _blockers(stack) -> int:
    count = 0
    low = None
    for c in stack:
        if low is not None and c > low:
            count += 1
        if low is None or c < low:
            low = c
    return count


def lb1(state: CrpState) -> int:
    """Containers stacked above at least one smaller container."""
    return sum(_blockers(s) for s in state.stacks)


def lb3(state: CrpState) -> int:
    """``lb1`` plus one for every container above the target whose every
    possible destination would make it block a smaller container again."""
    base = lb1(state)
    if state.remaining == 0:
        return base
    src = target_stack(state)
    stack = state.stacks[src]
    above = stack[stack.index(state.target) + 1:]
    mins = []
    for i, s in enumerate(state.stacks):
        if i != src and len(s) < state.tiers:
            mins.append(min(s) if s else None)
    extra = 0
    for c in above:
        if all(m is not None and m < c for m in mins):
            extra += 1
    return base + extra


def parse_crp_instance(text: str, source: str = "<text>") -> CrpInstance:
    """``S T N`` header, then one ``k id_1 .. id_k`` line per stack, bottom to top.

    Blank lines and ``#`` comments are ignored.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    if not lines:
        raise CrpParseError(f"{source}: empty instance")

    def ints(lineno, line):
        try:
            return [int(t) for t in line.split()]
        except ValueError:
            raise CrpParseError(f"{source}:{lineno}: non-integer token") from None

    lineno, header = lines[0]
    head = ints(lineno, header)
    if len(head) != 3:
        raise CrpParseError(f"{source}:{lineno}: header must be 'S T N'")
    n_stacks, tiers, n = head
    if n_stacks < 1 or tiers < 1 or n < 0:
        raise CrpParseError(f"{source}:{lineno}: S and T must be positive, N non-negative")
    if n > n_stacks * tiers:
        raise CrpParseError(f"{source}:{lineno}: N={n} exceeds S*T={n_stacks * tiers}")
    if len(lines) - 1 != n_stacks:
        raise CrpParseError(f"{source}: expected {n_stacks} stack lines, got {len(lines) - 1}")
    stacks, seen = [], set()
    for lineno, line in lines[1:]:
        vals = ints(lineno, line)
        k, ids = vals[0], vals[1:]
        if k != len(ids):
            raise CrpParseError(f"{source}:{lineno}: stack length {k} does not match {len(ids)} ids")
        if k > tiers:
            raise CrpParseError(f"{source}:{lineno}: stack of {k} exceeds tier limit {tiers}")
        for c in ids:
            if not 1 <= c <= n:
                raise CrpParseError(f"{source}:{lineno}: container {c} outside 1..{n}")
            if c in seen:
                raise CrpParseError(f"{source}:{lineno}: container {c} repeated")
            seen.add(c)
        stacks.append(tuple(ids))
    missing = sorted(set(range(1, n + 1)) - seen)
    if missing:
        raise CrpParseError(f"{source}: container {missing[0]} of N={n} missing")
    return CrpInstance(n_stacks, tiers, n, tuple(stacks))


def format_crp_instance(inst: CrpInstance, header: str | None = None) -> str:
    lines = [f"# {header}"] if header else []
    lines.append(f"{inst.n_stacks} {inst.tiers} {inst.n_containers}")
    for s in inst.layout:
        lines.append(" ".join(str(v) for v in (len(s),) + tuple(s)))
    return "\n".join(lines) + "\n"


def random_crp_instance(n_stacks: int, tiers: int, n_containers: int, seed) -> CrpInstance:
    """Uniform random layout leaving at least one stack's worth of free slots,
    so the restricted rule can never run out of destinations."""
    if n_stacks < 2:
        raise ValueError("need at least two stacks")
    if n_containers > (n_stacks - 1) * tiers:
        raise ValueError("layout would be saturated: need N <= (S-1)*T")
    rng = random.Random(seed)
    ids = list(range(1, n_containers + 1))
    rng.shuffle(ids)
    stacks = [[] for _ in range(n_stacks)]
    for c in ids:
        open_ = [i for i, s in enumerate(stacks) if len(s) < tiers]
        stacks[rng.choice(open_)].append(c)
    return CrpInstance(n_stacks, tiers, n_containers, tuple(tuple(s) for s in stacks))


class CrpDomain:
    """Search-domain adapter; h1 is LB1 and h2 is LB3."""

    def __init__(self, instance: CrpInstance):
        self.instance = instance
        self.initial_state = instance.initial_state()

    def is_goal(self, state: CrpState) -> bool:
        return state.remaining == 0

    def successors(self, state: CrpState, incoming):
        return crp_successors(state, incoming)

    def h1(self, state: CrpState) -> int:
        return lb1(state)

    def h2(self, state: CrpState) -> int:
        return lb3(state)

    def branching(self, state: CrpState, incoming) -> int:
        return crp_branching(state, incoming)

    def random_states(self, k: int, rng: random.Random) -> list[CrpState]:
        inst = self.instance
        n = min(inst.n_containers, (inst.n_stacks - 1) * inst.tiers) if inst.n_stacks > 1 else 0
        out = []
        for _ in range(k):
            if n == 0:
                out.append(self.initial_state)
                continue
            layout = random_crp_instance(inst.n_stacks, inst.tiers, n, rng.random())
            out.append(layout.initial_state())
        return out
