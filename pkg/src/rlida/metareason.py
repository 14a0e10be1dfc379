"""Evaluate-or-bypass decisions for the expensive heuristic.

The decision at a node compares the expected time lost by computing h2
needlessly against the expected time lost by expanding a node that h2 would
have pruned.  The probability that h2 prunes (``p_h``) is either a constant
or an upper bound built from a Hoeffding term and a Markov term over the
running history of ``x = 1 - h1 / max(h1, h2)`` samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class UninformativeBound(ValueError):
    """The concentration bound carries no information for these inputs."""


class PolicyKind(str, Enum):
    ALWAYS = "always"
    NEVER = "never"
    CONSTANT = "constant"
    ADAPTIVE = "adaptive"


class Rule(str, Enum):
    FULL_REGRET = "full-regret"
    SIMPLIFIED = "simplified"


@dataclass(frozen=True)
class DecisionPolicy:
    kind: PolicyKind = PolicyKind.ALWAYS
    p_h: float = 0.3
    cap: float = 0.5
    rule: Rule = Rule.FULL_REGRET

    def __post_init__(self):
        if not 0.0 <= self.p_h <= 1.0:
            raise ValueError(f"p_h must lie in [0, 1], got {self.p_h}")
        if not 0.0 <= self.cap <= 1.0:
            raise ValueError(f"cap must lie in [0, 1], got {self.cap}")

    @classmethod
    def always(cls) -> DecisionPolicy:
        return cls(PolicyKind.ALWAYS)

    @classmethod
    def never(cls) -> DecisionPolicy:
        return cls(PolicyKind.NEVER)

    @classmethod
    def constant(cls, p_h: float, rule: Rule = Rule.FULL_REGRET) -> DecisionPolicy:
        return cls(PolicyKind.CONSTANT, p_h=p_h, rule=Rule(rule))

    @classmethod
    def adaptive(cls, cap: float = 0.5, rule: Rule = Rule.FULL_REGRET) -> DecisionPolicy:
        return cls(PolicyKind.ADAPTIVE, cap=cap, rule=Rule(rule))

    @classmethod
    def parse(cls, spec: str) -> DecisionPolicy:
        """Parse ``always | never | const:<p>[:simplified] | adaptive:<cap>[:simplified]``."""
        parts = spec.strip().lower().split(":")
        head, args = parts[0], parts[1:]
        rule = Rule.FULL_REGRET
        if args and args[-1] in ("simplified", "full", "full-regret"):
            rule = Rule.SIMPLIFIED if args[-1] == "simplified" else Rule.FULL_REGRET
            args = args[:-1]
        try:
            if head == "always" and not args:
                return cls.always()
            if head == "never" and not args:
                return cls.never()
            if head in ("const", "constant") and len(args) == 1:
                return cls.constant(float(args[0]), rule)
            if head == "adaptive" and len(args) <= 1:
                return cls.adaptive(float(args[0]) if args else 0.5, rule)
        except ValueError as exc:
            raise ValueError(f"bad policy spec {spec!r}: {exc}") from None
        raise ValueError(f"bad policy spec {spec!r}")

    def label(self) -> str:
        if self.kind is PolicyKind.CONSTANT:
            base = f"const:{self.p_h:g}"
        elif self.kind is PolicyKind.ADAPTIVE:
            base = f"adaptive:{self.cap:g}"
        else:
            return self.kind.value
        return base + (":simplified" if self.rule is Rule.SIMPLIFIED else "")


class TimingMode(str, Enum):
    FIXED = "fixed"
    EMA = "ema"


@dataclass
class TimingModel:
    """Mean costs in seconds of one h1 evaluation, one h2 evaluation, and
    one "evaluate h1 and expand" step."""

    t1: float = 1.0
    t2: float = 1.0
    te: float = 1.0
    mode: TimingMode = TimingMode.FIXED
    decay: float = 0.01

    @classmethod
    def parse(cls, spec: str) -> TimingModel:
        """Parse ``fixed:<t1>,<t2>,<te>`` or ``ema:<decay>``.

        ``calibrate`` is handled by the caller since it needs a domain.
        """
        head, _, rest = spec.strip().lower().partition(":")
        try:
            if head == "fixed":
                t1, t2, te = (float(v) for v in rest.split(","))
                if min(t1, t2, te) <= 0:
                    raise ValueError("times must be positive")
                return cls(t1, t2, te)
            if head == "ema":
                decay = float(rest) if rest else 0.01
                if not 0.0 < decay <= 1.0:
                    raise ValueError("decay must lie in (0, 1]")
                return cls(0.0, 0.0, 0.0, mode=TimingMode.EMA, decay=decay)
        except ValueError as exc:
            raise ValueError(f"bad timing spec {spec!r}: {exc}") from None
        raise ValueError(f"bad timing spec {spec!r}")


def observe_timing(timing: TimingModel, event: str, duration: float) -> TimingModel:
    """Fold one measured duration into the matching estimate (EMA mode only)."""
    if timing.mode is not TimingMode.EMA:
        return timing
    attr = {"h1": "t1", "h2": "t2", "expand": "te"}[event]
    old = getattr(timing, attr)
    # a non-positive estimate means nothing has been measured yet
    new = duration if old <= 0 else (1.0 - timing.decay) * old + timing.decay * duration
    setattr(timing, attr, new)
    return timing


@dataclass
class SampleHistory:
    n: int = 0
    sum_x: float = 0.0

    @property
    def mean_x(self) -> float:
        return self.sum_x / self.n if self.n else 0.0


def record_sample(history: SampleHistory, x: float) -> SampleHistory:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x-sample outside [0, 1]: {x}")
    history.n += 1
    history.sum_x += x
    return history


def sample_x(h1: float, h2: float) -> float | None:
    """``1 - h1 / max(h1, h2)``; None when both are zero (no sample)."""
    top = max(h1, h2)
    if top <= 0:
        return None
    return 1.0 - h1 / top


def helpful_level(h1: float, g: float, threshold: float) -> float:
    """Level ``l`` such that h2 prunes the node iff its x-sample exceeds l.

    Degenerate decision points with ``threshold == g`` map to 0.
    """
    room = threshold - g
    if room <= 0:
        return 0.0
    return 1.0 - h1 / room


@dataclass(frozen=True)
class RegretInputs:
    p_h: float
    b: int
    t1: float
    t2: float
    te: float


def regret_compute(inputs: RegretInputs) -> float:
    return (1.0 - inputs.p_h) * inputs.t2


def regret_bypass(inputs: RegretInputs) -> float:
    b = inputs.b
    return inputs.p_h * (inputs.te + b * inputs.t1 + (b - 1) * inputs.t2)


def decide(p_h: float, b: int, rule: Rule, t1: float, t2: float, te: float) -> bool:
    """Evaluate h2 iff ``p_h*b >= 1`` or (full rule) the timing criterion holds."""
    pb = p_h * b
    if pb >= 1.0:
        return True
    if rule is Rule.SIMPLIFIED:
        return False
    return t2 < p_h / (1.0 - pb) * (te + b * t1)


def should_evaluate_h2(policy: DecisionPolicy, p_h: float, b: int, timing: TimingModel) -> bool:
    if policy.kind is PolicyKind.ALWAYS:
        return True
    if policy.kind is PolicyKind.NEVER:
        return False
    return decide(p_h, b, policy.rule, timing.t1, timing.t2, timing.te)


def bound_alpha_star(n: int, l: float, mean_x: float) -> float:
    if n < 1:
        raise ValueError("need at least one sample")
    if l <= mean_x:
        raise UninformativeBound(f"l={l} does not exceed mean x={mean_x}")
    two_n = 2.0 * n
    log_term = max(0.0, math.log(math.sqrt(two_n) * l))
    alpha = math.sqrt(log_term / two_n) / (l - mean_x)
    return min(1.0, max(0.0, alpha))


def bound_b_of_alpha(alpha: float, n: int, l: float, mean_x: float) -> float:
    if l <= 0:
        raise UninformativeBound("l must be positive")
    if n < 1:
        raise ValueError("need at least one sample")
    hoeffding = math.exp(-2.0 * n * (alpha * (l - mean_x)) ** 2)
    markov = ((1.0 - alpha) * mean_x + alpha * l) / l
    return hoeffding + markov


def bound_p_h_raw(n: int, sum_x: float, l: float) -> float:
    """Closed-form bound at the near-optimal alpha, clamped to [0, 1]."""
    if n <= 0 or l <= 0:
        return 1.0
    mean_x = sum_x / n
    if l <= mean_x:
        return 1.0
    scale = math.sqrt(2.0 * n) * l
    log_term = max(0.0, math.log(scale))
    bound = (1.0 + math.sqrt(log_term)) / scale + mean_x / l
    return bound if bound < 1.0 else 1.0


def bound_p_h(history: SampleHistory, l: float) -> float:
    return bound_p_h_raw(history.n, history.sum_x, l)


def effective_p_h(policy: DecisionPolicy, history: SampleHistory, l: float) -> float:
    """The p_h a policy feeds into the decision rule at a node with level l."""
    if policy.kind is PolicyKind.CONSTANT:
        return policy.p_h
    if policy.kind is PolicyKind.ADAPTIVE:
        return min(bound_p_h(history, l), policy.cap)
    return 1.0 if policy.kind is PolicyKind.ALWAYS else 0.0
