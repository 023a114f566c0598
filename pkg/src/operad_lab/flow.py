"""Retraction of unbounded restricted configurations into the unit disc.

Discs that touch (directly or through a chain) form rigid blocks. Each
block moves with velocity ``-x_B``, minus its weighted barycentre, so with
``λ = 1 - e^{-s}`` a block starting at barycentre ``b`` sits at
``x(0) - λ b`` until the next event. Events are the first time two blocks
touch (they merge and stay merged) and the first time
``r = max_i |x_i| + t_i`` falls to 1, where the flow stops.

Between events everything is closed form; only the event times are found
numerically, by bisection on functions that are convex in ``λ``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from . import disc_operads as D
from . import geometry as g
from .disc_operads import DiscConfig
from .errors import DomainError, NumericalError
from .geometry import Norm

__all__ = [
    "ComponentPartition", "FlowEvent", "FlowTrace", "r_func", "partition_of",
    "field_eval", "flow_retract", "retraction_H", "BISECTION_TOL",
]

BISECTION_TOL = 1e-12


@dataclass(frozen=True)
class ComponentPartition:
    blocks: tuple

    @classmethod
    def of(cls, blocks) -> "ComponentPartition":
        bs = [frozenset(b) for b in blocks]
        bs.sort(key=lambda b: g.label_key(min(b, key=g.label_key)))
        return cls(tuple(bs))

    def block_of(self, label) -> frozenset:
        for b in self.blocks:
            if label in b:
                return b
        raise KeyError(label)

    def as_lists(self) -> list:
        return [g.sorted_labels(b) for b in self.blocks]

    def __len__(self):
        return len(self.blocks)


@dataclass(frozen=True)
class FlowEvent:
    time: float
    config: DiscConfig
    partition: ComponentPartition
    r_value: float
    kind: str  # "merge" or "radius"


@dataclass
class FlowTrace:
    initial: DiscConfig
    initial_partition: ComponentPartition
    events: list = field(default_factory=list)
    terminal: DiscConfig = None
    norm: object = Norm.LINF

    @property
    def total_time(self) -> float:
        return self.events[-1].time if self.events else 0.0


def r_func(c: DiscConfig, norm=Norm.LINF):
    """``max_i |x_i| + t_i``."""
    return max(g.norm_eval(c.x[k], norm) + c.t[k] for k in c.t)


def _union_find(labels, pairs) -> list:
    parent = {k: k for k in labels}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups = {}
    for k in labels:
        groups.setdefault(find(k), set()).add(k)
    return list(groups.values())


def partition_of(c: DiscConfig, norm=Norm.LINF, eps=g.DEFAULT_EPS) -> ComponentPartition:
    """Transitive closure of ``|x_i - x_j| <= t_i + t_j``."""
    ks = c.ordered_labels()
    pairs = []
    for a in range(len(ks)):
        for b in ks[a + 1:]:
            i = ks[a]
            if g.le(g.norm_eval(g.vsub(c.x[i], c.x[b]), norm), c.t[i] + c.t[b], eps):
                pairs.append((i, b))
    return ComponentPartition.of(_union_find(ks, pairs))


def field_eval(c: DiscConfig, pi: ComponentPartition) -> dict:
    """``X_i = -x_B`` for the block ``B`` containing ``i``."""
    out = {}
    for B in pi.blocks:
        v = g.vneg(g.weighted_barycentre(c.x, c.t, B))
        for k in B:
            out[k] = v
    return out


# -- root finding on convex functions of λ --------------------------------

def _bisect(f, lo, hi):
    """``f(lo) > 0 >= f(hi)``; returns a point with ``f <= 0`` within
    ``BISECTION_TOL`` of the crossing."""
    for _ in range(200):
        if hi - lo <= BISECTION_TOL:
            return hi
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return hi


def _argmin_convex(f, lo, hi):
    for _ in range(200):
        if hi - lo <= BISECTION_TOL:
            break
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if f(m1) <= f(m2):
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


def _first_zero(f, hi):
    """First ``λ`` in ``(0, hi]`` with ``f(λ) <= 0`` for convex ``f`` with
    ``f(0) > 0``, or ``None``."""
    if f(hi) <= 0:
        return _bisect(f, 0.0, hi)
    m = _argmin_convex(f, 0.0, hi)
    if f(m) > 0:
        return None
    return _bisect(f, 0.0, m)


# -- the integrator --------------------------------------------------------

def _as_float(c: DiscConfig) -> DiscConfig:
    return c if not c.exact else c.to_float()


def _positions(x0: Mapping, shift: Mapping, lam: float) -> dict:
    return {k: tuple(a - lam * b for a, b in zip(x0[k], shift[k])) for k in x0}


def flow_retract(c: DiscConfig, norm=Norm.LINF, tol: float = 1e-9, max_events: int = None) -> FlowTrace:
    """Run the block flow from ``c`` until ``r <= 1``."""
    norm = g.parse_norm(norm)
    c = _as_float(c)
    if not D.in_RD(c, norm, tol):
        raise DomainError("flow starts from an unbounded restricted configuration")
    t = dict(c.t)
    labels = c.ordered_labels()
    part = partition_of(c, norm, tol)
    trace = FlowTrace(c, part, norm=norm)
    limit = max_events if max_events is not None else 2 * len(labels) + 2
    x0, s0 = dict(c.x), 0.0
    while True:
        current = DiscConfig(x0, t)
        r0 = r_func(current, norm)
        if r0 <= 1 + tol:
            trace.terminal = current
            return trace
        if len(part) == 1:
            raise NumericalError("single block with r > 1; barycentre drifted", trace=trace)
        if len(trace.events) >= limit:
            raise NumericalError("event budget exhausted", trace=trace)
        shift = {k: g.vneg(v) for k, v in field_eval(current, part).items()}

        def r_minus_one(lam):
            return max(g.norm_eval(tuple(a - lam * s for a, s in zip(x0[k], shift[k])), norm) + t[k]
                       for k in labels) - 1.0

        if r_minus_one(1.0) > 0:
            raise NumericalError("blocks centred at the origin still leave the unit disc", trace=trace)
        lam_r = _bisect(r_minus_one, 0.0, 1.0)
        lam_hit, hits = lam_r, []
        for a in range(len(labels)):
            for j in labels[a + 1:]:
                i = labels[a]
                if part.block_of(i) == part.block_of(j):
                    continue
                d0 = g.vsub(x0[i], x0[j])
                db = g.vsub(shift[i], shift[j])
                gap = t[i] + t[j]

                def sep(lam, d0=d0, db=db, gap=gap):
                    return g.norm_eval(tuple(p - lam * q for p, q in zip(d0, db)), norm) - gap

                if sep(0.0) <= 0:
                    hits.append((0.0, i, j))
                    lam_hit = 0.0
                    continue
                lam = _first_zero(sep, lam_hit)
                if lam is not None:
                    hits.append((lam, i, j))
                    lam_hit = min(lam_hit, lam)
        touching = [(i, j) for lam, i, j in hits if lam <= lam_hit + BISECTION_TOL]
        lam = lam_hit
        x1 = _positions(x0, shift, lam)
        s1 = s0 - math.log1p(-lam)
        cfg = DiscConfig(x1, t)
        if touching:
            detected = partition_of(cfg, norm, tol)
            pairs = [(min(B, key=g.label_key), k) for B in part.blocks + detected.blocks for k in B]
            part = ComponentPartition.of(_union_find(labels, pairs + touching))
            kind = "merge"
        else:
            kind = "radius"
        trace.events.append(FlowEvent(s1, cfg, part, r_func(cfg, norm), kind))
        x0, s0 = x1, s1
        if kind == "radius":
            trace.terminal = cfg
            return trace


def retraction_H(c: DiscConfig, u: float, norm=Norm.LINF, tol: float = 1e-9, trace: FlowTrace = None) -> DiscConfig:
    """The flow read at time ``-log(1 - u)``; ``u = 1`` gives the terminal point."""
    if not 0.0 <= u <= 1.0:
        raise DomainError("u must lie in [0, 1]")
    if trace is None:
        trace = flow_retract(c, norm, tol)
    norm = trace.norm
    if u == 1.0:
        return trace.terminal
    s = -math.log1p(-u)
    if s >= trace.total_time:
        return trace.terminal
    start_cfg, start_part, start_s = trace.initial, trace.initial_partition, 0.0
    for ev in trace.events:
        if ev.time > s:
            break
        start_cfg, start_part, start_s = ev.config, ev.partition, ev.time
    lam = -math.expm1(-(s - start_s))
    shift = {k: g.vneg(v) for k, v in field_eval(start_cfg, start_part).items()}
    return DiscConfig(_positions(start_cfg.x, shift, lam), dict(start_cfg.t))
