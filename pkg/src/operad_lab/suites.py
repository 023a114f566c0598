"""Named property suites, the sample runner and formula mutants.

A suite is a function ``check(spec, k)`` that draws sample ``k`` from its
own random stream and returns the violated properties as
``(property_id, witness)`` pairs. :func:`run_suite` fans samples out over
a thread pool (``OPERAD_LAB_THREADS`` workers, default 1), records any
exception as a failure and sorts failures canonically, so a report depends
only on the suite name and the sample spec.

Suites call library functions through their modules (``D.compose``, not a
local alias) so that :func:`mutant` can patch a formula for every caller.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Callable
from unittest import mock

from . import bar_duality as B
from . import disc_operads as D
from . import flow as F
from . import fulton_macpherson as FM
from . import geometry as g
from . import sampling as SM
from . import serialize as SZ
from . import spheres as S
from . import trees as TR
from .disc_operads import DiscConfig
from .errors import DomainError, UsageError
from .geometry import INF, Backend, Basepoint, Norm, is_basepoint

__all__ = [
    "Suite", "SuiteReport", "SUITES", "MUTANTS", "run_suite", "mutant",
    "list_suites", "tree_shapes",
]


@dataclass(frozen=True)
class Suite:
    name: str
    check: Callable
    description: str
    exact_only: bool = True
    float_only: bool = False


@dataclass
class SuiteReport:
    name: str
    samples: int
    failures: list = field(default_factory=list)
    wall_time: float = 0.0
    seed: int = 0
    mutant: str = None

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_json(self, with_time=True) -> dict:
        out = {"suite": self.name, "seed": self.seed, "samples": self.samples,
               "failures": [{"property": p, "witness": w} for w, p in self.failures]}
        if self.mutant:
            out["mutant"] = self.mutant
        if with_time:
            out["wall_time"] = round(self.wall_time, 3)
        return out

    def summary(self) -> str:
        tag = f" [mutant {self.mutant}]" if self.mutant else ""
        return (f"{self.name}{tag}: {self.samples} samples, {len(self.failures)} failures, "
                f"{self.wall_time:.2f}s")


SUITES: dict = {}


def _suite(name, description, exact_only=True, float_only=False):
    def register(fn):
        SUITES[name] = Suite(name, fn, description, exact_only, float_only)
        return fn
    return register


def list_suites() -> list:
    return sorted(SUITES)


# -- small helpers ---------------------------------------------------------

def _enc(v):
    try:
        return SZ.to_json(v)
    except TypeError:
        return repr(v)


def _fail(out, prop, **witness):
    out.append((prop, {k: _enc(v) for k, v in witness.items()}))


def _norm(spec):
    return g.parse_norm(spec.norm)


def _same(a, b, exact=True, eps=1e-9) -> bool:
    """Equality of configurations or basepoints; tolerant in float mode."""
    if is_basepoint(a) or is_basepoint(b):
        return is_basepoint(a) and is_basepoint(b) and a.labels == b.labels
    if exact:
        return a == b
    if a.labels != b.labels:
        return False
    return all(g.vec_eq(a.x[k], b.x[k], eps) and g.eq(a.t[k], b.t[k], eps) for k in a.t)


def _conv(spec, c):
    return c.to_float() if spec.backend is Backend.FLOAT and not is_basepoint(c) else c


def _labels(prefix, n):
    return SM.label_set(prefix, n)


def _config(rng, cls, labels, dim, norm, bound=64, backend=Backend.EXACT):
    spec = SM.SampleSpec(dim=dim, norm=norm, bound=bound, backend=backend)
    return SM.sample_config(spec, cls, rng=rng, labels=labels, dim=dim)


def _random_subset(rng, labels, lo, hi):
    labels = list(labels)
    n = rng.randint(lo, hi)
    return frozenset(rng.sample(labels, n))


def _rand_matrix(rng, dim, bound=8):
    """A random invertible rational matrix."""
    while True:
        m = [[Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) for _ in range(dim)]
             for _ in range(dim)]
        if _det(m) != 0:
            return m


def _det(m):
    m = [row[:] for row in m]
    n, det = len(m), Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


def _random_fm(rng, labels, dim, norm, bound=64, tree_prob=0.5):
    """A random FM point: the open stratum, or a random tree stratum."""
    labels = list(labels)
    if len(labels) > 2 and rng.random() < tree_prob:
        T = SM.sample_tree(rng, labels)
    else:
        T = TR.corolla(labels)
    return FM.fm_from_tree(T, SM.sample_vertex_points(rng, T, dim, bound), norm), T


# -- geometry --------------------------------------------------------------

@_suite("geometry", "barycentre invariance under permutation and rescaling; norm axioms")
def _geometry(spec, k):
    rng = spec.rng(k, "geometry")
    out = []
    norm = _norm(spec)
    dim = spec.draw_dim(rng)
    labels = _labels(None, spec.draw_size(rng))
    x = {i: tuple(SM.rand_rational(rng, spec.bound) for _ in range(dim)) for i in labels}
    t = {i: Fraction(rng.randint(1, spec.bound), rng.randint(1, spec.bound)) for i in labels}
    J = list(_random_subset(rng, labels, 1, len(labels)))
    base = g.weighted_barycentre(x, t, J)
    perm = J[:]
    rng.shuffle(perm)
    if g.weighted_barycentre(x, t, perm) != base:
        _fail(out, "barycentre-permutation", x=x, t=t, J=J)
    lam = Fraction(rng.randint(1, spec.bound), rng.randint(1, spec.bound))
    if g.weighted_barycentre(x, {i: lam * v for i, v in t.items()}, J) != base:
        _fail(out, "barycentre-rescaling", x=x, t=t, J=J, lam=lam)
    if g.combined_weight({i: lam * v for i, v in t.items()}, J) != lam * g.combined_weight(t, J):
        _fail(out, "weight-rescaling", t=t, J=J, lam=lam)
    if dim and norm is not Norm.L2:
        u, v = x[labels[0]], x[labels[1]]
        if g.norm_eval(g.vadd(u, v), norm) > g.norm_eval(u, norm) + g.norm_eval(v, norm):
            _fail(out, "norm-triangle", u=u, v=v)
        c = SM.rand_rational(rng, spec.bound)
        if g.norm_eval(g.vscale(c, u), norm) != abs(c) * g.norm_eval(u, norm):
            _fail(out, "norm-homogeneity", u=u, c=c)
    return out


# -- operad axioms, inverses, closure --------------------------------------

def _three_points(spec, rng, cls, dim, sizes=(2, 5)):
    norm = _norm(spec)
    lo, hi = sizes
    a = _config(rng, cls, _labels(None, rng.randint(lo, hi)), dim, norm, spec.bound)
    b = _config(rng, cls, _labels("b", rng.randint(lo, hi)), dim, norm, spec.bound)
    c = _config(rng, cls, _labels("c", rng.randint(lo, hi)), dim, norm, spec.bound)
    return _conv(spec, a), _conv(spec, b), _conv(spec, c)


@_suite("operad-axioms", "both associativity shapes for P/R/D composition, relabelling naturality, "
        "linear equivariance", exact_only=False)
def _operad_axioms(spec, k):
    rng = spec.rng(k, "operad-axioms")
    out = []
    cls = ("P", "R", "D")[k % 3]
    dim = rng.randint(1 if cls == "D" else 0, spec.max_dim or 3)
    exact = spec.backend is Backend.EXACT
    a, b, c = _three_points(spec, rng, cls, dim)
    i = rng.choice(a.ordered_labels())
    j = rng.choice(b.ordered_labels())
    left = D.compose(D.compose(a, b, i), c, j)
    right = D.compose(a, D.compose(b, c, j), i)
    if not _same(left, right, exact):
        _fail(out, "assoc-sequential", operad=cls, a=a, b=b, c=c, i=i, j=j)
    i1, i2 = rng.sample(a.ordered_labels(), 2)
    left = D.compose(D.compose(a, b, i1), c, i2)
    right = D.compose(D.compose(a, c, i2), b, i1)
    if not _same(left, right, exact):
        _fail(out, "assoc-parallel", operad=cls, a=a, b=b, c=c, i=i1, j=i2)
    # relabel a and b by bijections onto fresh labels
    sa = {x: f"u{x}" for x in a.labels}
    sb = {x: f"v{x}" for x in b.labels}
    whole = dict(sb)
    whole.update({x: y for x, y in sa.items() if x != i})
    lhs = D.relabel(D.compose(a, b, i), whole)
    rhs = D.compose(D.relabel(a, sa), D.relabel(b, sb), sa[i])
    if not _same(lhs, rhs, exact):
        _fail(out, "naturality", a=a, b=b, i=i)
    if dim and exact:
        m = _rand_matrix(rng, dim)
        if D.act(m, D.compose(a, b, i)) != D.compose(D.act(m, a), D.act(m, b), i):
            _fail(out, "linear-equivariance", a=a, b=b, i=i, matrix=m)
    return out


def _btcalc(c, J, i, out):
    q = D.quotient(c, J, i)
    rr = D.restrict(c, J)
    tJ = g.combined_weight(c.t, J)
    xJ = g.weighted_barycentre(c.x, c.t, J)
    ql = q.ordered_labels()
    for n in range(1, len(ql) + 1):
        for K in combinations(ql, n):
            K = frozenset(K)
            src = K if i not in K else (K - {i}) | J
            tag = "outside" if i not in K else "through"
            if g.weighted_barycentre(q.x, q.t, K) != g.weighted_barycentre(c.x, c.t, src):
                _fail(out, f"btcalc-quotient-{tag}-x", c=c, J=J, K=K)
            if g.combined_weight(q.t, K) != g.combined_weight(c.t, src):
                _fail(out, f"btcalc-quotient-{tag}-t", c=c, J=J, K=K)
    jl = g.sorted_labels(J)
    for n in range(1, len(jl) + 1):
        for K in combinations(jl, n):
            want = tuple(a / tJ for a in g.vsub(g.weighted_barycentre(c.x, c.t, K), xJ))
            if g.weighted_barycentre(rr.x, rr.t, K) != want:
                _fail(out, "btcalc-restrict-x", c=c, J=J, K=K)
            if g.combined_weight(rr.t, K) != g.combined_weight(c.t, K) / tJ:
                _fail(out, "btcalc-restrict-t", c=c, J=J, K=K)


@_suite("inverse", "compose/decompose are mutually inverse on barycentre points; "
        "barycentre calculus of quotients and restrictions", exact_only=False)
def _inverse(spec, k):
    rng = spec.rng(k, "inverse")
    out = []
    exact = spec.backend is Backend.EXACT
    dim = rng.randint(0, spec.max_dim or 3)
    norm = _norm(spec)
    a = _conv(spec, _config(rng, "R", _labels(None, rng.randint(2, 5)), dim, norm, spec.bound))
    b = _conv(spec, _config(rng, "R", _labels("b", rng.randint(2, 5)), dim, norm, spec.bound))
    i = rng.choice(a.ordered_labels())
    c = D.compose(a, b, i)
    a2, b2 = D.decompose(c, b.labels, i)
    if not (_same(a2, a, exact) and _same(b2, b, exact)):
        _fail(out, "decompose-after-compose", a=a, b=b, i=i)
    c = _conv(spec, _config(rng, "R", _labels(None, rng.randint(3, 6)), dim, norm, spec.bound))
    J = _random_subset(rng, c.labels, 2, len(c.labels) - 1)
    h = D.fresh_label(c.labels, "h")
    q, r = D.decompose(c, J, h)
    if not _same(D.compose(q, r, h), c, exact):
        _fail(out, "compose-after-decompose", c=c, J=J)
    if exact:
        _btcalc(c, J, h, out)
    return out


@_suite("closure", "restricted and little disc points are closed under composition; the open "
        "star region is closed under decomposition and satisfies the block inequalities",
        exact_only=False)
def _closure(spec, k):
    rng = spec.rng(k, "closure")
    out = []
    norm = _norm(spec)
    dim = rng.randint(1, spec.max_dim or 3)
    for cls, pred in (("D", D.in_D), ("E", D.in_E)):
        a = _conv(spec, _config(rng, cls, _labels(None, rng.randint(2, 5)), dim, norm, spec.bound))
        b = _conv(spec, _config(rng, cls, _labels("b", rng.randint(2, 5)), dim, norm, spec.bound))
        i = rng.choice(a.ordered_labels())
        if not pred(D.compose(a, b, i), norm):
            _fail(out, f"{cls}-compose-closure", a=a, b=b, i=i)
    s = _conv(spec, _config(rng, "S", _labels(None, rng.randint(3, 5)), dim, norm, spec.bound))
    J = _random_subset(rng, s.labels, 2, len(s.labels) - 1)
    q, r = D.decompose(s, J, "h")
    if not (D.in_open_star(q, norm) and D.in_open_star(r, norm)):
        _fail(out, "star-decompose-closure", c=s, J=J)
    s = _conv(spec, _config(rng, "S", _labels(None, rng.randint(2, 5)), dim, norm, spec.bound))
    for K, K2 in S.star_block_violations(s, norm):
        _fail(out, "star-block-inequalities", c=s, K=K, K2=K2)
    return out


# -- trees and the tree-indexed subspace ----------------------------------

def _shape(T, e=None):
    e = T.root if e is None else e
    kids = T.children(e)
    if not kids:
        return "()"
    return "(" + "".join(sorted(_shape(T, c) for c in kids)) + ")"


_SHAPES = None


def tree_shapes(max_leaves=5) -> list:
    """One representative tree per isomorphism class, 2 to ``max_leaves``
    leaves, in a fixed order."""
    global _SHAPES
    if _SHAPES is None or len({len(T.labels) for T in _SHAPES}) != max_leaves - 1:
        reps = {}
        for n in range(2, max_leaves + 1):
            for T in TR.enumerate_trees(range(1, n + 1)):
                reps.setdefault((n, _shape(T)), T)
        _SHAPES = [reps[key] for key in sorted(reps)]
    return _SHAPES


def _random_relabel(rng, T):
    ls = g.sorted_labels(T.labels)
    perm = ls[:]
    rng.shuffle(perm)
    return T.relabel(dict(zip(ls, perm)))


@_suite("trees", "graft and degraft are inverse; the identity is a morphism exactly for "
        "edge inclusions")
def _trees(spec, k):
    rng = spec.rng(k, "trees")
    out = []
    T = SM.sample_tree(rng, _labels(None, rng.randint(2, 4)))
    T2 = SM.sample_tree(rng, _labels("b", rng.randint(2, 4)))
    i = rng.choice(g.sorted_labels(T.labels))
    G = TR.graft(T, T2, i)
    back = TR.decompose_along(G, T2.labels, i)
    if back is None or back[0] != T or back[1] != T2:
        _fail(out, "degraft-after-graft", outer=T, inner=T2, i=i)
    U = SM.sample_tree(rng, T.labels)
    ident = {x: x for x in T.labels}
    if TR.is_morphism(T, U, ident) != (T.edges <= U.edges) or TR.leq(T, U) != (T.edges <= U.edges):
        _fail(out, "identity-morphism", T=T, U=U)
    return out


def _perturbed_factors(rng, T, dim, norm, bound):
    """Vertex factors: restricted disc points, some nudged off the
    restricted region while staying barycentric."""
    factors = {}
    for e in T.internal_edges:
        reps = [FM.child_rep(c) for c in T.children(e)]
        f = SM._sample_D(rng, reps, dim, norm, bound)
        if rng.random() < 0.5:
            d = {k2: tuple(SM.rand_rational(rng, bound) / 8 for _ in range(dim)) for k2 in reps}
            d = SM._centre(d, f.t)
            f = DiscConfig({k2: g.vadd(f.x[k2], d[k2]) for k2 in reps}, dict(f.t))
        factors[e] = f
    return factors


@_suite("dv-trees", "tree-composed restricted points satisfy the nested/disjoint edge "
        "inequalities, and a composite satisfies them exactly when every vertex factor is a "
        "restricted point")
def _dv_trees(spec, k):
    shapes = tree_shapes(5)
    rng = spec.rng(k, "dv-trees")
    out = []
    norm = _norm(spec)
    dim = rng.randint(1, spec.max_dim or 3)
    T = _random_relabel(rng, shapes[k % len(shapes)])
    z = SM.sample_tree_point(rng, T, dim, norm, spec.bound)
    bad = B.dv_violations(z, T, norm)
    if bad:
        _fail(out, "composed-point-inequalities", tree=T, z=z, pairs=bad)
    if not D.in_D(z, norm):
        _fail(out, "composed-point-restricted", tree=T, z=z)
    factors = _perturbed_factors(rng, T, dim, norm, spec.bound)
    w = B.tree_compose(T, factors)
    back = B.tree_factors(w, T)
    if any(back[e] != factors[e] for e in factors):
        _fail(out, "factor-round-trip", tree=T, z=w)
    member = B.dv_tree_membership(w, T, norm)
    factors_ok = all(D.in_D(f, norm) for f in factors.values())
    if member != factors_ok:
        _fail(out, "membership-iff-factors", tree=T, z=w, member=member, factors_in_D=factors_ok)
    return out


# -- Fulton-MacPherson points ---------------------------------------------

@_suite("fm", "composition is associative modulo translation and scaling, composites are "
        "coherent, weighted normalization is preserved, strata graft")
def _fm(spec, k):
    rng = spec.rng(k, "fm")
    out = []
    norm = _norm(spec)
    dim = rng.randint(1, spec.max_dim or 2)
    sizes = rng.choice([(2, 2, 2), (3, 2, 2), (2, 3, 2), (2, 2, 3)])
    ws = [SM.rand_simplex(rng, _labels(p, n), spec.bound) for p, n in zip((None, "b", "c"), sizes)]
    pts = []
    trees = []
    for w in ws:
        y, T = _random_fm(rng, list(w), dim, norm, spec.bound)
        pts.append(FM.fm_normalize(y, w, norm))
        trees.append(T)
    y, z, u = pts
    i = rng.choice(g.sorted_labels(y.labels))
    j = rng.choice(g.sorted_labels(z.labels))
    left = FM.fm_compose(FM.fm_compose(y, z, i), u, j)
    right = FM.fm_compose(y, FM.fm_compose(z, u, j), i)
    if not FM.fm_equal(left, right):
        _fail(out, "fm-assoc-sequential", y=y, z=z, u=u, i=i, j=j)
    if len(y.labels) >= 2:
        i1, i2 = rng.sample(g.sorted_labels(y.labels), 2)
        left = FM.fm_compose(FM.fm_compose(y, z, i1), u, i2)
        right = FM.fm_compose(FM.fm_compose(y, u, i2), z, i1)
        if not FM.fm_equal(left, right):
            _fail(out, "fm-assoc-parallel", y=y, z=z, u=u, i=i1, j=i2)
    comp = FM.fm_compose(y, z, i)
    try:
        FM.fm_validate(comp.table, comp.labels, comp.dim, norm=norm)
    except Exception as exc:  # noqa: BLE001 - any rejection is the failure
        _fail(out, "fm-composite-valid", y=y, z=z, i=i, error=str(exc))
    bad = FM.fm_norm_check(y, z, i, ws[0], ws[1])
    if bad:
        _fail(out, "fm-weighted-normalization", y=y, z=z, i=i, subsets=bad)
    want = TR.graft(trees[0], trees[1], i)
    if FM.stratum_tree(comp) != want:
        _fail(out, "fm-stratum-graft", y=y, z=z, i=i, want=want)
    for p, T in zip(pts, trees):
        if FM.stratum_tree(p) != T:
            _fail(out, "fm-stratum-of-tree-point", y=p, tree=T)
    return out


@_suite("sinha", "distinct points have distinct direction/ratio coordinates; equal points "
        "have equal coordinates")
def _sinha(spec, k):
    rng = spec.rng(k, "sinha")
    out = []
    norm = _norm(spec)
    dim = rng.randint(1, spec.max_dim or 2)
    labels = _labels(None, rng.randint(2, 5))
    p, _ = _random_fm(rng, labels, dim, norm, spec.bound)
    if rng.random() < 0.3:
        w = SM.rand_simplex(rng, labels, spec.bound)
        q = FM.fm_normalize(p, w, norm)
    else:
        q, _ = _random_fm(rng, labels, dim, norm, spec.bound)
    same = FM.fm_equal(p, q)
    if same != (FM.sinha_coords(p, norm) == FM.sinha_coords(q, norm)):
        _fail(out, "sinha-injective", p=p, q=q, equal=same)
    return out


# -- spheres ---------------------------------------------------------------

def _maybe_basepoint(rng, c, prob=0.15):
    return Basepoint(c.labels) if rng.random() < prob else c


@_suite("spheres", "sphere and quotient-sphere composition are associative with basepoint "
        "absorption; pairing with the compactified space is associative")
def _spheres(spec, k):
    rng = spec.rng(k, "spheres")
    out = []
    norm = _norm(spec)
    dim = rng.randint(0, spec.max_dim or 3)
    a, b, c = _three_points(spec, rng, "R", dim, (2, 4))
    a, b, c = (_maybe_basepoint(rng, p) for p in (a, b, c))
    i = rng.choice(g.sorted_labels(a.labels))
    j = rng.choice(g.sorted_labels(b.labels))
    if not _same(S.sphere_compose(S.sphere_compose(a, b, i), c, j),
                 S.sphere_compose(a, S.sphere_compose(b, c, j), i)):
        _fail(out, "sphere-assoc", a=a, b=b, c=c, i=i, j=j)
    if dim:
        sa, sb, sc = (_maybe_basepoint(rng, _config(rng, "S", _labels(p, rng.randint(2, 4)), dim,
                                                    norm, spec.bound), 0.1)
                      for p in (None, "b", "c"))
        i = rng.choice(g.sorted_labels(sa.labels))
        j = rng.choice(g.sorted_labels(sb.labels))
        left = S.barS_compose(S.barS_compose(sa, sb, i, norm), sc, j, norm)
        right = S.barS_compose(sa, S.barS_compose(sb, sc, j, norm), i, norm)
        if not _same(left, right):
            _fail(out, "quotient-sphere-assoc", a=sa, b=sb, c=sc, i=i, j=j)
    v = INF if rng.random() < 0.1 else tuple(SM.rand_rational(rng, spec.bound) for _ in range(dim))
    i = rng.choice(g.sorted_labels(a.labels))
    direct, stepwise = S.coend_square(v, a, b, i)
    if direct != stepwise:
        _fail(out, "pairing-square", v=v, a=a, b=b, i=i)
    return out


# -- the duality pairing ---------------------------------------------------

def _random_weights(rng, T, bound, zero_prob=0.15, inf_prob=0.0):
    r = {}
    for e in T.internal_edges:
        u = rng.random()
        if u < inf_prob:
            r[e] = INF
        elif u < inf_prob + zero_prob and e != T.root:
            r[e] = Fraction(0)
        else:
            r[e] = SM.rand_rational(rng, bound, 0, 2)
    return r


def _bar_sample(rng, spec, labels, dim, norm):
    T = SM.sample_tree(rng, labels)
    z = SM.sample_tree_point(rng, T, dim, norm, spec.bound)
    return T, z


@_suite("alpha-edge", "the pairing lands in barycentre points and its edge barycentres have "
        "the closed form")
def _alpha_edge(spec, k):
    rng = spec.rng(k, "alpha-edge")
    out = []
    norm = _norm(spec)
    dim = rng.randint(1, spec.max_dim or 2)
    T, z = _bar_sample(rng, spec, _labels(None, rng.randint(2, 5)), dim, norm)
    if rng.random() < 0.5:
        y, r = SM.aligned_fm_point(rng, T, z, norm, spec.bound)
    else:
        y, _ = _random_fm(rng, g.sorted_labels(T.labels), dim, norm, spec.bound)
        y = FM.fm_normalize(y, z.t, norm)
        r = _random_weights(rng, T, spec.bound)
    if not FM.is_normalized(y, z.t, norm):
        _fail(out, "alpha-input-normalized", y=y, z=z)
        return out
    p = B.BarPoint(T, r, z)
    x = B.alpha_raw(y, p)
    if not D.in_R(x):
        _fail(out, "alpha-barycentric", y=y, p=p)
    for e in T.edges:
        if B.alpha_edge_barycentre(y, p, e) != B.alpha_edge_closed_form(y, p, e):
            _fail(out, "alpha-edge-closed-form", y=y, p=p, edge=e)
    return out


def _diagram_sample(rng, spec, norm):
    """``(y1, y2, p, i)`` for the pairing square. Mostly the tree of ``p``
    has the inner labels as an edge (the composable case)."""
    dim = rng.randint(1, spec.max_dim or 2)
    n = rng.randint(3, 5)
    labels = _labels(None, n)
    T = SM.sample_tree(rng, labels)
    inner = [e for e in T.internal_edges if e != T.root]
    if inner and rng.random() < 0.8:
        J = rng.choice(inner)
    else:
        J = _random_subset(rng, labels, 2, n - 1)
    i = "h"
    z = SM.sample_tree_point(rng, T, dim, norm, spec.bound)
    split = TR.decompose_along(T, J, i)
    if split is not None and rng.random() < 0.7:
        T1, T2 = split
        z1, z2 = D.decompose(z, J, i)
        y1, _ = SM.aligned_fm_point(rng, T1, z1, norm, spec.bound)
        y2, _ = SM.aligned_fm_point(rng, T2, z2, norm, spec.bound)
        r = SM.aligned_weights(rng, T, z, norm, tight=0.7)
        for e in T.internal_edges:
            u = rng.random()
            if u < 0.05:
                r[e] = INF
            elif u < 0.15 and e != T.root:
                r[e] = Fraction(0)
    else:
        outer = g.sorted_labels((T.labels - J) | {i})
        y1, _ = _random_fm(rng, outer, dim, norm, spec.bound)
        y2, _ = _random_fm(rng, g.sorted_labels(J), dim, norm, spec.bound)
        r = _random_weights(rng, T, spec.bound, inf_prob=0.05)
    return y1, y2, B.BarPoint(T, r, z), i


@_suite("alpha-diagram", "pairing then composing in quotient spheres equals composing FM "
        "points then pairing; non-composable trees give the basepoint")
def _alpha_diagram(spec, k):
    rng = spec.rng(k, "alpha-diagram")
    out = []
    norm = _norm(spec)
    y1, y2, p, i = _diagram_sample(rng, spec, norm)
    rep = B.alpha_diagram_check(y1, y2, p, i, norm)
    if not rep.ok:
        prop = "alpha-square-composable" if rep.composable else "alpha-square-basepoint"
        _fail(out, prop, y1=y1, y2=y2, p=p, i=i, clockwise=rep.clockwise,
              anticlockwise=rep.anticlockwise)
    return out


@_suite("alpha-naturality", "adding edges of weight zero does not change the pairing")
def _alpha_naturality(spec, k):
    rng = spec.rng(k, "alpha-naturality")
    out = []
    norm = _norm(spec)
    dim = rng.randint(1, spec.max_dim or 2)
    big, z = _bar_sample(rng, spec, _labels(None, rng.randint(3, 5)), dim, norm)
    drop = [e for e in big.internal_edges if e != big.root and rng.random() < 0.5]
    small = big
    for e in drop:
        small = small.without_edge(e)
    u = rng.random()
    if u < 0.6:
        # aligned with the coarser tree, so the pairing is often finite
        y, r = SM.aligned_fm_point(rng, small, z, norm, spec.bound, tight=0.8)
    else:
        y, _ = _random_fm(rng, g.sorted_labels(big.labels), dim, norm, spec.bound)
        y = FM.fm_normalize(y, z.t, norm)
        r = _random_weights(rng, small, spec.bound, inf_prob=0.05)
    r_big = {e: r.get(e, Fraction(0)) for e in big.internal_edges}
    a = B.alpha_eval(y, B.BarPoint(small, r, z), norm)
    b = B.alpha_eval(y, B.BarPoint(big, r_big, z), norm)
    if not _same(a, b):
        _fail(out, "alpha-zero-edges", y=y, small=small, big=big, r=r, z=z)
    return out


def _corolla_sample(rng, spec, norm):
    dim = rng.randint(1, spec.max_dim or 2)
    labels = _labels(None, rng.randint(2, 5))
    z = _config(rng, "D", labels, dim, norm, spec.bound)
    u = rng.random()
    if u < 0.6:
        y, r = _aligned_corolla(rng, z, norm)
    else:
        pts = SM.sample_vertex_points(rng, TR.corolla(labels), dim, spec.bound)[frozenset(labels)]
        y = FM.fm_normalize(FM.fm_from_configuration(pts, norm), z.t, norm)
        r = INF if u < 0.65 else Fraction(0) if u < 0.7 else SM.rand_rational(rng, spec.bound, 0, 2)
    return z, y, r


def _aligned_corolla(rng, c, norm):
    """FM point read off the centres of ``c`` (distinct) and a weight that
    nearly cancels them; usually the leftover is within every radius."""
    y = FM.fm_normalize(FM.fm_from_configuration(c.x, norm), c.t, norm)
    scale = sum((c.t[j] * g.norm_eval(c.x[j], norm) for j in c.t), Fraction(0))
    if rng.random() < 0.7:
        eps = Fraction(rng.randint(1, 16), 16) * min(c.t.values()) / 2
    else:
        eps = Fraction(1, rng.choice((2, 4, 8, 32)))
    return y, scale * (1 - eps)


@_suite("rho", "on corollas the direct pairing, the pairing through the configuration "
        "homeomorphism and the tree pairing agree")
def _rho(spec, k):
    rng = spec.rng(k, "rho")
    out = []
    norm = _norm(spec)
    z, y, r = _corolla_sample(rng, spec, norm)
    T = TR.corolla(z.labels)
    q = B.BFPoint(T, {T.root: r}, y)
    direct = B.rho(q, z, norm)
    via = B.psi(z, B.phi(z.t, q, norm), norm)
    if g.is_inf(r):
        tree = Basepoint(z.labels)
    else:
        tree = B.alpha_eval(y, B.BarPoint(T, {T.root: r}, z), norm)
    if not (_same(direct, via) and _same(direct, tree)):
        _fail(out, "rho-psi-phi-alpha", z=z, y=y, r=r, rho=direct, psi_phi=via, alpha=tree)
    return out


@_suite("phi", "the configuration homeomorphism inverts exactly")
def _phi(spec, k):
    rng = spec.rng(k, "phi")
    out = []
    norm = _norm(spec)
    dim = rng.randint(1, spec.max_dim or 3)
    u = _config(rng, "U", _labels(None, rng.randint(2, 5)), dim, norm, spec.bound)
    t, q = B.phi_inverse(u, norm)
    back = B.phi(t, q, norm)
    if not _same(back, u):
        _fail(out, "phi-after-inverse", u=u, back=back)
    bq = B.bf_normalize(q.tree, q.r, q.y)
    if is_basepoint(bq) or B.phi(t, bq, norm) != u:
        _fail(out, "phi-canonical", u=u)
    return out


def _smash(*parts):
    """Smash-product comparison form: a tuple with any basepoint collapses."""
    if any(is_basepoint(p) for p in parts):
        return ("*",)
    return tuple(parts)


@_suite("bar-coassoc", "degrafting bar points is coassociative in both shapes")
def _bar_coassoc(spec, k):
    rng = spec.rng(k, "bar-coassoc")
    out = []
    norm = _norm(spec)
    dim = rng.randint(1, spec.max_dim or 2)
    T, z = _bar_sample(rng, spec, _labels(None, rng.randint(3, 5)), dim, norm)
    p = B.BarPoint(T, _random_weights(rng, T, spec.bound, inf_prob=0.03), z)
    inner = [e for e in T.internal_edges if e != T.root]
    candidates = [frozenset(s) for n in range(2, len(T.labels))
                  for s in combinations(g.sorted_labels(T.labels), n)]
    pick = inner if inner and rng.random() < 0.8 else candidates
    K = rng.choice(pick)
    nested = [e for e in candidates if e < K]
    disjoint = [e for e in candidates if not (e & K)]
    if nested and (not disjoint or rng.random() < 0.5):
        J = rng.choice([e for e in nested if e in T.edges] or nested)
        p1, p2 = B.bar_decompose(p, K, "k", norm)
        if is_basepoint(p2):
            first = _smash(p1)
        else:
            p21, p22 = B.bar_decompose(p2, J, "j", norm)
            first = _smash(p1, p21, p22)
        q1, q2 = B.bar_decompose(p, J, "j", norm)
        if is_basepoint(q1):
            second = _smash(q1)
        else:
            q11, q12 = B.bar_decompose(q1, (K - J) | {"j"}, "k", norm)
            second = _smash(q11, q12, q2)
        if first != second:
            _fail(out, "coassoc-nested", p=p, J=J, K=K)
    elif disjoint:
        J = rng.choice([e for e in disjoint if e in T.edges] or disjoint)
        p1, p2 = B.bar_decompose(p, K, "k", norm)
        first = _smash(p1) if is_basepoint(p1) else _smash(*B.bar_decompose(p1, J, "j", norm), p2)
        q1, q2 = B.bar_decompose(p, J, "j", norm)
        second = _smash(q1) if is_basepoint(q1) else _smash(*B.bar_decompose(q1, K, "k", norm), q2)
        # both routes end with (outer, J-part, K-part); reorder the second
        if len(second) == 3:
            second = (second[0], second[2], second[1])
        if first != second:
            _fail(out, "coassoc-disjoint", p=p, J=J, K=K)
    return out


# -- kappa, sigma and the suspension square -------------------------------

def _star_part(rng, t, dim, norm, bound):
    """W coordinates in the open star region for weights ``t``."""
    labels = g.sorted_labels(t)
    w = SM._centre({k: tuple(SM.rand_rational(rng, bound) for _ in range(dim)) for k in labels}, t)
    b = Fraction(0)
    for k in labels:
        b = max(b, g.norm_eval(w[k], norm) / t[k], g.norm_eval(w[k], norm) / (1 - t[k]))
    for a, k in enumerate(labels):
        for j in labels[a + 1:]:
            b = max(b, g.norm_eval(g.vsub(w[k], w[j]), norm) / min(t[k], t[j]))
    if b == 0:
        return w
    s = Fraction(rng.randint(1, bound - 1), bound) / b
    return {k: g.vscale(s, v) for k, v in w.items()}


@_suite("kappa-pro", "the splitting map lands in restricted and open-star points, split and "
        "merge are inverse, and the suspension square commutes on corollas")
def _kappa_pro(spec, k):
    rng = spec.rng(k, "kappa-pro")
    out = []
    norm = _norm(spec)
    dv = rng.randint(1, 2)
    dw = rng.randint(1, 2)
    labels = _labels(None, rng.randint(2, 4))
    total = g.DirectSumNorm(norm, (dv, dw))
    if norm is not Norm.LINF or rng.random() < 0.6:
        cv = _config(rng, "D", labels, dv, norm, spec.bound)
        w = _star_part(rng, cv.t, dw, norm, spec.bound)
        c = DiscConfig({j: cv.x[j] + w[j] for j in labels}, dict(cv.t))
    else:
        c = _config(rng, "D", labels, dv + dw, Norm.LINF, spec.bound)
    if not D.in_D(c, total):
        _fail(out, "kappa-sample", c=c)
        return out
    kap = D.kappa(c, (dv, dw), norm)
    if not is_basepoint(kap):
        cv, cw = kap
        if not D.in_D(cv, norm) or not D.in_open_star(cw, norm):
            _fail(out, "kappa-total", c=c)
    a = _config(rng, "R", labels, dv + dw, norm, spec.bound)
    a = _maybe_basepoint(rng, a, 0.1)
    if not _same(S.sigma_merge(*S.sigma_split(a, (dv, dw))), a):
        _fail(out, "sigma-split-merge", a=a)
    y, _ = _random_fm(rng, labels, dv, norm, spec.bound)
    u = rng.random()
    if u < 0.05:
        r = INF
    elif u < 0.6 and len(set(D.split_config(c, dv)[0].x.values())) == len(labels):
        y, r = _aligned_corolla(rng, D.split_config(c, dv)[0], norm)
    else:
        r = SM.rand_rational(rng, spec.bound, 0, 2)
    rep = B.pro_diagram_check(c, y, r, (dv, dw), norm)
    if not rep.ok:
        _fail(out, "suspension-square", c=c, y=y, r=r, left=rep.clockwise, right=rep.anticlockwise)
    return out


# -- the retraction flow ---------------------------------------------------

FLOW_TOL = 1e-6


def _flow_start(rng, spec, r_max=3.0):
    dim = rng.randint(1, spec.max_dim or 3)
    labels = _labels(None, rng.randint(max(2, spec.min_labels), min(5, spec.max_labels)))
    norm = _norm(spec)
    for _ in range(100):
        c = _config(rng, "RD", labels, dim, norm, spec.bound, Backend.FLOAT)
        if F.r_func(c, norm) <= r_max:
            return c
    raise SM.SamplingError("no unbounded restricted start with small radius")


@_suite("flow", "the retraction flow ends in the unit disc within its time bound, keeps discs "
        "apart and the barycentre fixed, and shrinks faster than the smallest radius",
        exact_only=False, float_only=True)
def _flow(spec, k):
    rng = spec.rng(k, "flow")
    out = []
    norm = _norm(spec)
    c = _flow_start(rng, spec)
    tr = F.flow_retract(c, norm, 1e-9)
    r0 = F.r_func(c, norm)
    that = min(c.t.values())
    if F.r_func(tr.terminal, norm) > 1 + FLOW_TOL:
        _fail(out, "flow-terminal-radius", c=c)
    if not D.in_D(tr.terminal, norm, FLOW_TOL):
        _fail(out, "flow-terminal-restricted", c=c)
    bound = max(r0 - 1, 0.0) / that
    if tr.total_time >= bound + FLOW_TOL:
        _fail(out, "flow-time-bound", c=c, time=tr.total_time, bound=bound)
    checkpoints = [ev.config for ev in tr.events] + [tr.terminal]
    total = tr.total_time
    for n in range(1, 16):
        s = total * n / 16
        checkpoints.append(F.retraction_H(c, -math.expm1(-s), norm, trace=tr))
    for cfg in checkpoints:
        ks = cfg.ordered_labels()
        for a, i in enumerate(ks):
            for j in ks[a + 1:]:
                d = g.norm_eval(g.vsub(cfg.x[i], cfg.x[j]), norm)
                if d < cfg.t[i] + cfg.t[j] - FLOW_TOL:
                    _fail(out, "flow-non-overlap", c=c, i=i, j=j, gap=d - cfg.t[i] - cfg.t[j])
        m = [sum(cfg.t[q] * cfg.x[q][d] for q in ks) for d in range(cfg.dim)]
        if any(abs(v) >= 1e-9 for v in m):
            _fail(out, "flow-barycentre", c=c, moment=m)
    times = [0.0] + [ev.time for ev in tr.events]
    radii = [r0] + [ev.r_value for ev in tr.events]
    for n in range(1, len(times)):
        ds = times[n] - times[n - 1]
        if ds <= 0:
            if ds < 0:
                _fail(out, "flow-times-increasing", c=c)
            continue
        if radii[n] > radii[n - 1] + FLOW_TOL or (radii[n - 1] - radii[n]) / ds < that - FLOW_TOL:
            _fail(out, "flow-rate", c=c, step=n)
    return out


# -- mutants ---------------------------------------------------------------

def _compose_drop_t(a, b, i):
    if i not in a.labels:
        raise DomainError(f"label {i!r} is not a label of the outer point")
    x = {k: v for k, v in a.x.items() if k != i}
    t = {k: v for k, v in a.t.items() if k != i}
    for j in b.labels:
        x[j] = g.vadd(a.x[i], b.x[j])
        t[j] = a.t[i] * b.t[j]
    return DiscConfig(x, t)


def _restrict_no_tJ(c, J):
    J = frozenset(J)
    xJ = g.weighted_barycentre(c.x, c.t, J)
    return DiscConfig({j: g.vsub(c.x[j], xJ) for j in J}, {j: c.t[j] for j in J})


def _alpha_drop_te(y, p, eps=g.DEFAULT_EPS):
    z = p.z
    x = dict(z.x)
    for e in p.tree.internal_edges:
        if p.r[e] == 0:
            continue
        for j in e:
            x[j] = g.vsub(x[j], g.vscale(p.r[e], y.table[e][j]))
    return DiscConfig(x, dict(z.t))


_real_fm_normalize = FM.fm_normalize


def _fm_normalize_uniform(p, t, norm=None):
    return _real_fm_normalize(p, {k: 1 for k in p.labels}, norm)


def _field_pointwise(c, pi):
    return {k: g.vneg(c.x[k]) for k in c.x}


@dataclass(frozen=True)
class Mutant:
    name: str
    module: object
    attr: str
    replacement: Callable
    description: str
    suites: tuple


MUTANTS = {m.name: m for m in [
    Mutant("compose-drop-t", D, "compose", _compose_drop_t,
           "composition forgets to scale inner centres by the outer radius", ("inverse", "closure")),
    Mutant("decompose-no-tJ", D, "restrict", _restrict_no_tJ,
           "restriction forgets to divide by the combined weight", ("inverse",)),
    Mutant("alpha-drop-te", B, "alpha_raw", _alpha_drop_te,
           "pairing forgets the combined weight of each edge", ("alpha-edge", "alpha-diagram")),
    Mutant("fm-normalize-uniform", FM, "fm_normalize", _fm_normalize_uniform,
           "FM normalization ignores the weights", ("fm", "alpha-edge")),
    Mutant("flow-field-pointwise", F, "field_eval", _field_pointwise,
           "the flow field moves discs individually instead of as rigid blocks", ("flow",)),
]}


@contextmanager
def mutant(name):
    """Patch one documented formula mutation for the duration of the block."""
    if name not in MUTANTS:
        raise UsageError(f"unknown mutant {name!r}; known: {', '.join(sorted(MUTANTS))}")
    m = MUTANTS[name]
    with mock.patch.object(m.module, m.attr, m.replacement):
        yield m


# -- the runner ------------------------------------------------------------

def _workers() -> int:
    raw = os.environ.get("OPERAD_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"OPERAD_LAB_THREADS must be an integer, got {raw!r}") from None


def _one(suite, spec, k):
    try:
        found = suite.check(spec, k)
    except Exception as exc:  # noqa: BLE001 - a crash on a sample is a failure
        found = [("exception", {"error": f"{type(exc).__name__}: {exc}"})]
    out = []
    for prop, witness in found:
        w = dict(witness)
        w["sample"] = k
        out.append((w, prop))
    return out


def _canonical_key(failure):
    w, prop = failure
    return (prop, w.get("sample", -1), json.dumps(w, sort_keys=True, default=str))


def run_suite(name, spec: SM.SampleSpec = None, mutant_name=None) -> SuiteReport:
    """Run suite ``name`` on samples ``0 .. spec.count - 1``."""
    if name not in SUITES:
        raise UsageError(f"unknown suite {name!r}; known: {', '.join(list_suites())}")
    suite = SUITES[name]
    spec = spec or SM.SampleSpec()
    if suite.float_only:
        spec = replace(spec, backend=Backend.FLOAT)
    elif suite.exact_only and spec.backend is Backend.FLOAT:
        raise UsageError(f"suite {name!r} is exact-only")
    if _norm(spec) is Norm.L2 and spec.backend is Backend.EXACT:
        raise UsageError("the L2 norm needs the float backend")
    start = time.perf_counter()
    ctx = mutant(mutant_name) if mutant_name else _null()
    with ctx:
        workers = _workers()
        if workers == 1:
            results = [_one(suite, spec, k) for k in range(spec.count)]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda k: _one(suite, spec, k), range(spec.count)))
    failures = sorted((f for r in results for f in r), key=_canonical_key)
    return SuiteReport(name, spec.count, failures, time.perf_counter() - start, spec.seed, mutant_name)


@contextmanager
def _null():
    yield None
