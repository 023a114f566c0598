"""Deterministic random points of every configuration class.

Every sample ``k`` of a stream with seed ``s`` draws from its own
``random.Random`` seeded with the string ``"{s}:{salt}:{k}"``, so samples
are reproducible one at a time and independent of worker scheduling.

Rationals have numerators and denominators bounded by ``bound``.

Restricted little disc points (class ``D``) are built constructively:

* along a random axis the discs tile ``[-1, 1]`` in a random order (in one
  dimension this is every such configuration); the remaining coordinates
  are random, recentred to weighted mean 0 and shrunk until every centre
  satisfies ``|x_i| <= 1 - t_i``;
* optionally a random signed permutation of coordinates is applied;
* optionally further such points are composed into random discs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import disc_operads as D
from . import fulton_macpherson as FM
from . import geometry as g
from .disc_operads import DiscConfig
from .errors import DomainError, SamplingError
from .geometry import Backend, Norm
from .trees import LabelledTree

__all__ = [
    "SampleSpec", "rng_for", "rand_rational", "rand_simplex", "sample_config",
    "sample_tree", "sample_tree_point", "sample_vertex_points", "aligned_fm_point", "aligned_weights",
    "CLASSES", "label_set",
]

CLASSES = ("P", "E", "D", "R", "RD", "S", "U")


@dataclass(frozen=True)
class SampleSpec:
    seed: int = 0
    dim: int = 1
    norm: Norm = Norm.LINF
    min_labels: int = 2
    max_labels: int = 5
    backend: Backend = Backend.EXACT
    count: int = 100
    bound: int = 64
    max_dim: int = None   # when set, dimensions are drawn from [0 or 1, max_dim]

    def rng(self, index: int, salt: str = "") -> random.Random:
        return rng_for(self.seed, index, salt)

    def draw_dim(self, rng, allow_zero=False) -> int:
        if self.max_dim is None:
            return self.dim
        return rng.randint(0 if allow_zero else 1, self.max_dim)

    def draw_size(self, rng) -> int:
        return rng.randint(self.min_labels, self.max_labels)


def rng_for(seed, index, salt="") -> random.Random:
    return random.Random(f"{seed}:{salt}:{index}")


def label_set(prefix, n):
    if prefix is None:
        return list(range(1, n + 1))
    return [f"{prefix}{k}" for k in range(1, n + 1)]


def rand_rational(rng, bound=64, lo=None, hi=None) -> Fraction:
    q = rng.randint(1, bound)
    if lo is None:
        return Fraction(rng.randint(-bound, bound), q)
    return Fraction(lo) + (Fraction(hi) - Fraction(lo)) * Fraction(rng.randint(0, q), q)


def rand_simplex(rng, labels, bound=64) -> dict:
    w = {k: rng.randint(1, bound) for k in labels}
    total = sum(w.values())
    return {k: Fraction(v, total) for k, v in w.items()}


def _rand_vec(rng, dim, bound):
    return tuple(rand_rational(rng, bound) for _ in range(dim))


def _centre(x, t):
    labels = list(x)
    if not labels or not x[labels[0]]:
        return x
    m = g.weighted_barycentre(x, t, labels)
    return {k: g.vsub(v, m) for k, v in x.items()}


def _signed_permutation(rng, dim):
    perm = list(range(dim))
    rng.shuffle(perm)
    signs = [rng.choice((-1, 1)) for _ in range(dim)]
    return [[Fraction(signs[r]) if c == perm[r] else Fraction(0) for c in range(dim)]
            for r in range(dim)]


# -- class samplers (exact) ------------------------------------------------

def _sample_P(rng, labels, dim, bound):
    return DiscConfig({k: _rand_vec(rng, dim, bound) for k in labels},
                      {k: Fraction(rng.randint(1, bound), rng.randint(1, bound)) for k in labels})


def _sample_R(rng, labels, dim, bound):
    t = rand_simplex(rng, labels, bound)
    x = _centre({k: _rand_vec(rng, dim, bound) for k in labels}, t)
    return DiscConfig(x, t)


def _tiling(rng, labels, dim, axis, norm, bound):
    t = rand_simplex(rng, labels, bound)
    order = list(labels)
    rng.shuffle(order)
    x = {}
    left = Fraction(-1)
    for k in order:
        x[k] = left + t[k]
        left += 2 * t[k]
    other = {}
    if norm is Norm.LINF and dim > 1:
        raw = {k: _rand_vec(rng, dim - 1, bound) for k in labels}
        raw = _centre(raw, t)
        s = Fraction(1)
        for k in labels:
            n = g.norm_eval(raw[k], Norm.LINF)
            if n > 0:
                s = min(s, (1 - t[k]) / n)
        s *= rand_rational(rng, bound, 0, 1)
        other = {k: g.vscale(s, raw[k]) for k in labels}
    pts = {}
    for k in labels:
        rest = list(other[k]) if other else [Fraction(0)] * (dim - 1)
        rest.insert(axis, x[k])
        pts[k] = tuple(rest)
    return DiscConfig(pts, t)


def _sample_D_vertex(rng, labels, dim, norm, bound):
    if dim == 0:
        if len(labels) > 1:
            raise SamplingError("disjoint discs need a positive dimension")
        return DiscConfig({k: () for k in labels}, rand_simplex(rng, labels, bound))
    c = _tiling(rng, labels, dim, rng.randrange(dim), norm, bound)
    if dim > 1 and rng.random() < 0.5:
        c = D.act(_signed_permutation(rng, dim), c)
    return c


def _sample_D(rng, labels, dim, norm, bound):
    labels = list(labels)
    if len(labels) <= 2 or rng.random() < 0.4:
        return _sample_D_vertex(rng, labels, dim, norm, bound)
    # split the labels into an outer and an inner block and compose
    rng.shuffle(labels)
    cut = rng.randint(2, len(labels) - 1) if len(labels) > 2 else 1
    inner, outer = labels[:cut], labels[cut:]
    hole = f"_h{len(labels)}"
    a = _sample_D(rng, outer + [hole], dim, norm, bound)
    b = _sample_D(rng, inner, dim, norm, bound)
    return D.compose(a, b, hole)


def _sample_E(rng, labels, dim, norm, bound):
    c = _sample_D(rng, labels, dim, norm, bound)
    nu = rand_rational(rng, bound, Fraction(1, 2), 1)
    mu = nu * rand_rational(rng, bound, Fraction(1, 2), 1)
    return DiscConfig({k: g.vscale(nu, v) for k, v in c.x.items()},
                      {k: mu * v for k, v in c.t.items()})


def _sample_RD(rng, labels, dim, norm, bound):
    if dim == 0:
        raise SamplingError("disjoint discs need a positive dimension")
    if rng.random() < 0.5:
        while True:
            pts = {k: _rand_vec(rng, dim, bound) for k in labels}
            if len(set(pts.values())) == len(pts):
                return D.config_homotopy_inverse(pts, norm)
    c = _sample_D(rng, labels, dim, norm, bound)
    lam = rand_rational(rng, bound, 1, 3)
    return DiscConfig({k: g.vscale(lam, v) for k, v in c.x.items()}, dict(c.t))


def _sample_S(rng, labels, dim, norm, bound):
    c = _sample_R(rng, labels, dim, bound)
    ks = c.ordered_labels()
    b = max(g.norm_eval(c.x[k], norm) / c.t[k] for k in ks)
    for a in range(len(ks)):
        for j in ks[a + 1:]:
            i = ks[a]
            b = max(b, g.norm_eval(g.vsub(c.x[i], c.x[j]), norm) / min(c.t[i], c.t[j]))
    if b == 0:
        return c
    s = Fraction(rng.randint(1, bound - 1), bound) / b
    return DiscConfig({k: g.vscale(s, v) for k, v in c.x.items()}, dict(c.t))


def _sample_RD_float(rng, labels, dim, bound):
    if dim == 0:
        raise SamplingError("disjoint discs need a positive dimension")
    if rng.random() < 0.5:
        while True:
            pts = {k: tuple(float(v) for v in _rand_vec(rng, dim, bound)) for k in labels}
            if len(set(pts.values())) == len(pts):
                return D.config_homotopy_inverse(pts, Norm.L2)
    c = _sample_D(rng, labels, dim, Norm.L1, bound)
    lam = rand_rational(rng, bound, 1, 3)
    return DiscConfig({k: g.vscale(lam, v) for k, v in c.x.items()}, dict(c.t)).to_float()


def _sample_S_float(rng, labels, dim, bound):
    c = _sample_R(rng, labels, dim, bound).to_float()
    ks = c.ordered_labels()
    b = max(g.norm_eval(c.x[k], Norm.L2) / c.t[k] for k in ks)
    for a in range(len(ks)):
        for j in ks[a + 1:]:
            i = ks[a]
            b = max(b, g.norm_eval(g.vsub(c.x[i], c.x[j]), Norm.L2) / min(c.t[i], c.t[j]))
    if b == 0:
        return c
    s = rng.randint(1, bound - 1) / bound / b
    return DiscConfig({k: g.vscale(s, v) for k, v in c.x.items()}, dict(c.t))


def _sample_U(rng, labels, dim, bound):
    if dim == 0 and len(labels) > 1:
        raise SamplingError("distinct centres need a positive dimension")
    for _ in range(1000):
        c = _sample_R(rng, labels, dim, bound)
        if D.in_U(c):
            return c
    raise SamplingError("rejection budget exceeded for distinct centres")


def sample_config(spec: SampleSpec, cls: str, rng=None, labels=None, dim=None) -> DiscConfig:
    """A configuration of the requested class (one of :data:`CLASSES`)."""
    if rng is None:
        rng = spec.rng(0, cls)
    if labels is None:
        labels = label_set(None, spec.draw_size(rng))
    dim = spec.dim if dim is None else dim
    norm = g.parse_norm(spec.norm)
    if norm is Norm.L2 and spec.backend is Backend.EXACT and cls in ("D", "E", "RD", "S", "U"):
        raise SamplingError("the L2 norm needs the float backend")
    # tilings without off-axis spread lie in D for every norm
    exact_norm = Norm.L1 if norm is Norm.L2 else norm
    if cls == "P":
        c = _sample_P(rng, labels, dim, spec.bound)
    elif cls == "R":
        c = _sample_R(rng, labels, dim, spec.bound)
    elif cls == "D":
        c = _sample_D(rng, labels, dim, exact_norm, spec.bound)
    elif cls == "E":
        c = _sample_E(rng, labels, dim, exact_norm, spec.bound)
    elif cls == "RD":
        if norm is Norm.L2:
            c = _sample_RD_float(rng, labels, dim, spec.bound)
        else:
            c = _sample_RD(rng, labels, dim, exact_norm, spec.bound)
    elif cls in ("S", "open_star"):
        if norm is Norm.L2:
            c = _sample_S_float(rng, labels, dim, spec.bound)
        else:
            c = _sample_S(rng, labels, dim, exact_norm, spec.bound)
    elif cls == "U":
        c = _sample_U(rng, labels, dim, spec.bound)
    else:
        raise DomainError(f"unknown configuration class {cls!r}")
    if spec.backend is Backend.FLOAT:
        c = c.to_float()
    return c


# -- trees and tree-indexed points ----------------------------------------

def _random_partition(rng, items):
    while True:
        k = rng.randint(2, len(items))
        blocks = [[] for _ in range(k)]
        for it in items:
            blocks[rng.randrange(k)].append(it)
        blocks = [b for b in blocks if b]
        if len(blocks) >= 2:
            return blocks


def sample_tree(rng, labels) -> LabelledTree:
    """A random tree: split the root into random blocks and recurse."""
    labels = list(labels)
    edges = [frozenset([k]) for k in labels]

    def grow(items):
        edges.append(frozenset(items))
        for b in _random_partition(rng, items):
            if len(b) >= 2:
                grow(b)

    grow(labels)
    return LabelledTree(labels, edges)


def sample_tree_point(rng, T: LabelledTree, dim, norm=Norm.LINF, bound=64) -> DiscConfig:
    """A point of the tree-indexed subspace: random vertex factors composed
    along ``T``."""
    from .bar_duality import tree_compose
    factors = {}
    for e in T.internal_edges:
        reps = [FM.child_rep(c) for c in T.children(e)]
        factors[e] = _sample_D(rng, reps, dim, norm, bound)
    return tree_compose(T, factors)


def sample_vertex_points(rng, T: LabelledTree, dim, bound=64) -> dict:
    """Distinct random vertex vectors for each non-leaf edge of ``T``."""
    out = {}
    for e in T.internal_edges:
        reps = [FM.child_rep(c) for c in T.children(e)]
        while True:
            pts = {k: _rand_vec(rng, dim, bound) for k in reps}
            if len(set(pts.values())) == len(pts):
                break
        out[e] = pts
    return out


def aligned_fm_point(rng, T: LabelledTree, z: DiscConfig, norm=Norm.LINF, bound=64, tight=0.5):
    """An FM point in the stratum of ``T`` whose vertex data are the vertex
    factors of ``z``, with edge weights that almost cancel them.

    Pairing such data moves every centre close to the origin, which makes
    finite values of the pairing common. With probability ``tight`` the
    leftover at each edge is bounded by the smallest radius below it, which
    keeps the pairing finite. Returns ``(y, r)``, ``y`` normalized for
    ``z``'s weights.
    """
    from .bar_duality import tree_factors
    factors = tree_factors(z, T)
    y = FM.fm_from_tree(T, {e: f.x for e, f in factors.items()}, norm)
    y = FM.fm_normalize(y, z.t, norm)
    return y, aligned_weights(rng, T, z, norm, tight, factors)


def aligned_weights(rng, T: LabelledTree, z: DiscConfig, norm=Norm.LINF, tight=0.5, factors=None):
    """Edge weights ``r_e = (1 - ε_e) Σ_c t_c |x_c|`` over the vertex factor
    at ``e``; see :func:`aligned_fm_point`."""
    from .bar_duality import tree_factors
    if factors is None:
        factors = tree_factors(z, T)
    n = len(T.labels)
    snug = rng.random() < tight
    r = {}
    for e, f in factors.items():
        scale = None
        for k in f.t:
            term = f.t[k] * g.norm_eval(f.x[k], norm)
            scale = term if scale is None else scale + term
        if snug:
            te = g.combined_weight(z.t, e)
            low = min(z.t[k] for k in e)
            eps = Fraction(rng.randint(1, 16), 16) * low / (2 * n * te)
        else:
            eps = Fraction(1, rng.choice((2, 3, 4, 8, 16, 64)))
        r[e] = scale * (1 - eps)
    return r
