"""Bar construction points and the duality maps into quotient spheres.

A bar point over ``I`` is a tree ``T``, edge weights ``r`` in
``[0, ∞]`` on the non-leaf edges ``E(T)``, and a restricted little disc
configuration ``z`` in the image of the tree's composition embedding, or
the basepoint. The pairing ``alpha`` moves each centre ``z_i`` by the
weighted directions ``t_e r_e y(e)_i`` of a Fulton-MacPherson point along
all non-leaf edges containing ``i`` and reads the result in the quotient
sphere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import disc_operads as D
from . import fulton_macpherson as FM
from . import geometry as g
from . import spheres as S
from . import trees as TR
from .disc_operads import DiscConfig
from .errors import DomainError, PreconditionError
from .geometry import INF, Basepoint, Norm, is_basepoint
from .trees import LabelledTree

__all__ = [
    "BarPoint", "BFPoint", "make_bar_point", "dv_tree_membership", "dv_violations",
    "tree_factors", "tree_compose", "bar_normalize", "bar_decompose",
    "alpha_raw", "alpha_eval", "alpha_edge_barycentre", "alpha_edge_closed_form",
    "alpha_diagram_check", "DiagramReport", "bf_normalize", "phi", "phi_inverse",
    "psi", "rho", "pro_diagram_check", "pad_fm", "edge_weights_of",
]


@dataclass(frozen=True, eq=False)
class BarPoint:
    """A finite bar point ``(T, r, z)``. Not forced into canonical form;
    see :func:`bar_normalize`."""

    tree: LabelledTree
    r: dict
    z: DiscConfig

    @property
    def labels(self) -> frozenset:
        return self.tree.labels

    def __eq__(self, other):
        if not isinstance(other, BarPoint):
            return NotImplemented
        return self.tree == other.tree and self.r == other.r and self.z == other.z

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BFPoint:
    """A finite point ``(T, r, y)`` of the tree-indexed bar construction
    on Fulton-MacPherson points."""

    tree: LabelledTree
    r: dict
    y: FM.FMPoint

    @property
    def labels(self) -> frozenset:
        return self.tree.labels

    def __eq__(self, other):
        if not isinstance(other, BFPoint):
            return NotImplemented
        return self.tree == other.tree and self.r == other.r and self.y == other.y

    __hash__ = None


def _weight(v, backend):
    if g.is_inf(v):
        return INF
    v = g.coerce(v, backend)
    if v < 0:
        raise DomainError("edge weights must be non-negative")
    return v


def edge_weights_of(T: LabelledTree, r: Mapping, backend) -> dict:
    keys = {frozenset(e) for e in r}
    if keys != set(T.internal_edges):
        raise DomainError("edge weights must be indexed by exactly the non-leaf edges")
    return {frozenset(e): _weight(v, backend) for e, v in r.items()}


def make_bar_point(T: LabelledTree, r: Mapping, z: DiscConfig, norm=Norm.LINF,
                   eps=g.DEFAULT_EPS) -> BarPoint:
    """Validated constructor: ``z`` must lie in the image of the tree embedding."""
    if z.labels != T.labels:
        raise DomainError("configuration and tree have different labels")
    if not dv_tree_membership(z, T, norm, eps):
        raise PreconditionError("configuration is not in the image of the tree embedding")
    return BarPoint(T, edge_weights_of(T, r, z.backend), z)


# -- the tree-indexed subspace --------------------------------------------

def dv_violations(z: DiscConfig, T: LabelledTree, norm=Norm.LINF, eps=g.DEFAULT_EPS) -> list:
    """Edge pairs breaking ``|x_e' - x_e| <= t_e - t_e'`` (nested) or
    ``|x_e'' - x_e| >= t_e + t_e''`` (disjoint)."""
    if not D.in_R(z, eps):
        raise PreconditionError("tree membership is defined on barycentre configurations")
    edges = sorted(T.edges, key=lambda e: (-len(e), TR.edge_key(e)))
    bar = {e: g.weighted_barycentre(z.x, z.t, e) for e in edges}
    wt = {e: g.combined_weight(z.t, e) for e in edges}
    bad = []
    for a, e in enumerate(edges):
        for f in edges[a + 1:]:
            d = g.norm_eval(g.vsub(bar[e], bar[f]), norm)
            if f <= e:
                ok = g.le(d, wt[e] - wt[f], eps)
            elif not (e & f):
                ok = g.le(wt[e] + wt[f], d, eps)
            else:
                continue
            if not ok:
                bad.append((g.sorted_labels(e), g.sorted_labels(f)))
    return bad


def dv_tree_membership(z: DiscConfig, T: LabelledTree, norm=Norm.LINF, eps=g.DEFAULT_EPS) -> bool:
    return not dv_violations(z, T, norm, eps)


def tree_factors(z: DiscConfig, T: LabelledTree) -> dict:
    """Vertex configurations of ``z`` along ``T``: for each non-leaf edge
    ``e`` the children recentred at ``x_e`` and scaled by ``1/t_e``,
    labelled by their least labels."""
    out = {}
    for e in T.internal_edges:
        xe = g.weighted_barycentre(z.x, z.t, e)
        te = g.combined_weight(z.t, e)
        x, t = {}, {}
        for c in T.children(e):
            k = FM.child_rep(c)
            x[k] = tuple(a / te for a in g.vsub(g.weighted_barycentre(z.x, z.t, c), xe))
            t[k] = g.combined_weight(z.t, c) / te
        out[e] = DiscConfig(x, t)
    return out


def tree_compose(T: LabelledTree, factors: Mapping) -> DiscConfig:
    """Inverse of :func:`tree_factors`: compose vertex configurations down
    the tree, starting from the root at the origin with weight 1."""
    first = factors[T.root]
    pos = {T.root: g.vzero(first.dim, first.backend)}
    wt = {T.root: g.coerce(1, first.backend)}
    for e in T.internal_edges:
        f = factors[e]
        for c in T.children(e):
            k = FM.child_rep(c)
            pos[c] = g.vadd(pos[e], g.vscale(wt[e], f.x[k]))
            wt[c] = wt[e] * f.t[k]
    return DiscConfig({i: pos[frozenset([i])] for i in T.labels},
                      {i: wt[frozenset([i])] for i in T.labels})


# -- canonical forms and the cooperad structure ---------------------------

def bar_normalize(T: LabelledTree, r: Mapping, z: DiscConfig, norm=Norm.LINF,
                  eps=g.DEFAULT_EPS):
    """Canonical representative: the basepoint when some weight is infinite
    or the root weight is 0; otherwise internal edges of weight 0 are
    contracted (``z`` is unchanged)."""
    if not dv_tree_membership(z, T, norm, eps):
        raise PreconditionError("configuration is not in the image of the tree embedding")
    rr = edge_weights_of(T, r, z.backend)
    if any(g.is_inf(v) for v in rr.values()) or rr[T.root] == 0:
        return Basepoint(T.labels)
    keep = {e: v for e, v in rr.items() if v != 0}
    edges = [e for e in T.edges if len(e) < 2 or e in keep]
    return BarPoint(LabelledTree(T.labels, edges), keep, z)


def bar_decompose(p, J, i, norm=Norm.LINF, eps=g.DEFAULT_EPS):
    """Degrafting along ``J``: split the tree, the weights and the
    configuration. Trees without ``J`` as an edge, and any factor collapsing
    to the basepoint, give the basepoint pair."""
    J = frozenset(J)
    outer_labels = (p.labels - J) | {i}
    base = (Basepoint(outer_labels), Basepoint(J))
    if is_basepoint(p):
        return base
    split = TR.decompose_along(p.tree, J, i)
    if split is None:
        return base
    T1, T2 = split
    r1 = {}
    for e in T1.internal_edges:
        r1[e] = p.r[(e - {i}) | J if i in e else e]
    r2 = {e: p.r[e] for e in T2.internal_edges}
    z1, z2 = D.decompose(p.z, J, i, eps)
    a = bar_normalize(T1, r1, z1, norm, eps)
    b = bar_normalize(T2, r2, z2, norm, eps)
    if is_basepoint(a) or is_basepoint(b):
        return base
    return a, b


# -- the duality pairing ---------------------------------------------------

def _check_normalized(y: FM.FMPoint, p: BarPoint, eps):
    if y.labels != p.labels:
        raise DomainError("FM point and bar point have different labels")
    w = {k: g.coerce(v, y.backend) for k, v in p.z.t.items()}
    for e in p.tree.internal_edges:
        if not FM._weighted_ok(y.table[e], w, y.norm, eps):
            raise PreconditionError(
                f"FM term {g.sorted_labels(e)!r} is not normalized for the bar point weights")


def alpha_raw(y: FM.FMPoint, p: BarPoint, eps=g.DEFAULT_EPS) -> DiscConfig:
    """``x_i = z_i - Σ_{i ∈ e ∈ E(T)} t_e r_e y(e)_i`` with all weights finite."""
    _check_normalized(y, p, eps)
    if any(g.is_inf(v) for v in p.r.values()):
        raise DomainError("infinite edge weight has no finite image")
    z = p.z
    x = {k: z.x[k] for k in z.x}
    for e in p.tree.internal_edges:
        te = g.combined_weight(z.t, e)
        c = te * p.r[e]
        if c == 0:
            continue
        ye = y.table[e]
        for k in e:
            x[k] = g.vsub(x[k], g.vscale(c, ye[k]))
    return DiscConfig(x, dict(z.t))


def alpha_eval(y: FM.FMPoint, p, norm=Norm.LINF, eps=g.DEFAULT_EPS):
    """The pairing read in the quotient sphere."""
    if is_basepoint(p):
        return Basepoint(p.labels)
    if any(g.is_inf(v) for v in p.r.values()):
        _check_normalized(y, p, eps)
        return Basepoint(p.labels)
    return S.project_barS(alpha_raw(y, p, eps), norm, eps)


def alpha_edge_barycentre(y: FM.FMPoint, p: BarPoint, e, eps=g.DEFAULT_EPS):
    x = alpha_raw(y, p, eps)
    return g.weighted_barycentre(x.x, x.t, frozenset(e))


def alpha_edge_closed_form(y: FM.FMPoint, p: BarPoint, e, eps=g.DEFAULT_EPS):
    """``z_e - Σ_{e ⊊ e'} t_e' r_e' y(e')_e`` over non-leaf edges ``e'``."""
    _check_normalized(y, p, eps)
    e = frozenset(e)
    z = p.z
    out = g.weighted_barycentre(z.x, z.t, e)
    for f in p.tree.internal_edges:
        if e < f:
            c = g.combined_weight(z.t, f) * p.r[f]
            yf = g.weighted_barycentre(y.table[f], z.t, e)
            out = g.vsub(out, g.vscale(c, yf))
    return out


@dataclass
class DiagramReport:
    composable: bool
    clockwise: object
    anticlockwise: object
    ok: bool
    notes: list = field(default_factory=list)


def _same(a, b) -> bool:
    if is_basepoint(a) or is_basepoint(b):
        return is_basepoint(a) and is_basepoint(b) and a.labels == b.labels
    return a == b


def alpha_diagram_check(y1: FM.FMPoint, y2: FM.FMPoint, p, i, norm=Norm.LINF,
                        eps=g.DEFAULT_EPS) -> DiagramReport:
    """Both ways around the square relating FM composition, bar
    decomposition, the pairing and composition of quotient spheres.

    ``y1``, ``y2`` are arbitrary representatives; each is normalized for
    the weights it is paired with. Clockwise: pair ``y1 ∘_i y2`` with
    ``p``. Anticlockwise: degraft ``p`` along the labels of ``y2``, pair
    factorwise, compose in the quotient sphere.
    """
    J = y2.labels
    labels = (y1.labels - {i}) | J
    if is_basepoint(p):
        bp = Basepoint(labels)
        return DiagramReport(False, bp, bp, True)
    y = FM.fm_normalize(FM.fm_compose(y1, y2, i), p.z.t)
    clockwise = alpha_eval(y, p, norm, eps)
    split = TR.decompose_along(p.tree, J, i)
    if split is None:
        ok = is_basepoint(clockwise)
        notes = [] if ok else ["tree does not degraft but the pairing is finite"]
        return DiagramReport(False, clockwise, Basepoint(labels), ok, notes)
    parts = bar_decompose(p, J, i, norm, eps)
    if is_basepoint(parts[0]):
        anti = Basepoint(labels)
    else:
        p1, p2 = parts
        a1 = alpha_eval(FM.fm_normalize(y1, p1.z.t), p1, norm, eps)
        a2 = alpha_eval(FM.fm_normalize(y2, p2.z.t), p2, norm, eps)
        anti = S.barS_compose(a1, a2, i, norm, eps)
    ok = _same(clockwise, anti)
    return DiagramReport(True, clockwise, anti, ok, [] if ok else ["composites differ"])


# -- corollas: the Fulton-MacPherson bar construction ---------------------

def bf_normalize(T: LabelledTree, r: Mapping, y: FM.FMPoint):
    """Basepoint when a weight is infinite, the root weight is 0, or the
    point clusters along a subset that is not a weighted edge of ``T``.
    Otherwise internal edges of weight 0 are contracted."""
    if y.labels != T.labels:
        raise DomainError("FM point and tree have different labels")
    rr = edge_weights_of(T, r, y.backend)
    if any(g.is_inf(v) for v in rr.values()) or rr[T.root] == 0:
        return Basepoint(T.labels)
    for K in FM.stratum_tree(y).internal_edges:
        if K == T.root:
            continue
        if K not in rr or rr[K] == 0:
            return Basepoint(T.labels)
    keep = {e: v for e, v in rr.items() if v != 0}
    edges = [e for e in T.edges if len(e) < 2 or e in keep]
    return BFPoint(LabelledTree(T.labels, edges), keep, y)


def _corolla_weight(q: BFPoint):
    if not q.tree.is_corolla():
        raise DomainError("expected a point over the corolla")
    return q.r[q.tree.root]


def phi(t: Mapping, q, norm=Norm.LINF, eps=g.DEFAULT_EPS):
    """``(t, (r, y)) -> (r y(I), t)`` into the compactified distinct-centre
    configurations; ``y`` must be normalized for ``t``."""
    if is_basepoint(q):
        return Basepoint(q.labels)
    r = _corolla_weight(q)
    if g.is_inf(r) or r == 0:
        return Basepoint(q.labels)
    I = q.labels
    yI = q.y.table[I]
    w = {k: g.coerce(t[k], q.y.backend) for k in I}
    if not FM._weighted_ok(yI, w, q.y.norm, eps):
        raise PreconditionError("FM root term is not normalized for the weights")
    c = DiscConfig({k: g.vscale(r, yI[k]) for k in I}, w)
    return c if D.in_U(c, norm, eps) else Basepoint(I)


def phi_inverse(u, norm=Norm.LINF):
    """``(x, t) -> (t, (r, [x]))`` with ``r = Σ t_i |x_i|`` the unique
    scale making ``x / r`` satisfy the weighted norm condition."""
    if is_basepoint(u):
        return None, Basepoint(u.labels)
    if not D.in_U(u, norm):
        raise DomainError("expected distinct centres with the barycentre conditions")
    r = None
    for k in u.t:
        term = u.t[k] * g.norm_eval(u.x[k], norm)
        r = term if r is None else r + term
    y = FM.fm_from_configuration({k: tuple(c / r for c in u.x[k]) for k in u.x}, norm)
    y = FM.fm_normalize(y, u.t, norm)
    return dict(u.t), BFPoint(TR.corolla(u.labels), {u.labels: r}, y)


def psi(z: DiscConfig, u, norm=Norm.LINF, eps=g.DEFAULT_EPS):
    """``((z, t), (x, t)) -> (z - x, t)`` in the quotient sphere."""
    if is_basepoint(u):
        return Basepoint(z.labels)
    if u.labels != z.labels or u.t != z.t:
        raise DomainError("the two configurations must carry identical weights")
    return S.project_barS(DiscConfig({k: g.vsub(z.x[k], u.x[k]) for k in z.x}, dict(z.t)),
                          norm, eps)


def rho(q, z: DiscConfig, norm=Norm.LINF, eps=g.DEFAULT_EPS):
    """``((r, y), (z, t)) -> (z - r y(I), t)`` in the quotient sphere."""
    if is_basepoint(q):
        return Basepoint(z.labels)
    r = _corolla_weight(q)
    if g.is_inf(r) or r == 0:
        return Basepoint(z.labels)
    I = z.labels
    yI = q.y.table[I]
    w = {k: g.coerce(v, q.y.backend) for k, v in z.t.items()}
    if not FM._weighted_ok(yI, w, q.y.norm, eps):
        raise PreconditionError("FM root term is not normalized for the weights")
    x = DiscConfig({k: g.vsub(z.x[k], g.vscale(r, yI[k])) for k in I}, dict(z.t))
    return S.project_barS(x, norm, eps)


# -- compatibility with V -> V ⊕ W ----------------------------------------

def pad_fm(y: FM.FMPoint, dim_w: int) -> FM.FMPoint:
    """Include a point for ``V`` into ``V ⊕ W`` by zero ``W`` coordinates."""
    zero = g.vzero(dim_w, y.backend)
    tab = {J: {k: v + zero for k, v in yJ.items()} for J, yJ in y.table.items()}
    norm = g.DirectSumNorm(y.norm, (y.dim, dim_w))
    return FM.FMPoint(y.labels, y.dim + dim_w, tab, y.reference_weights, norm, y.backend)


def pro_diagram_check(c: DiscConfig, y: FM.FMPoint, r, split, norm=Norm.LINF,
                      eps=g.DEFAULT_EPS) -> DiagramReport:
    """Corolla instance of the square comparing pairings in ``V`` and in
    ``V ⊕ W``: pad ``y`` and pair with ``c`` directly, or split ``c`` by
    ``kappa``, pair the ``V`` part, and merge with the ``W`` part."""
    dim_v, dim_w = split
    base = g.parse_norm(norm)
    total = g.DirectSumNorm(base, (dim_v, dim_w))
    T = TR.corolla(c.labels)
    y = FM.fm_normalize(y, c.t, base)
    left = alpha_eval(pad_fm(y, dim_w), BarPoint(T, {T.root: r}, c), total, eps)
    k = D.kappa(c, split, base, eps)
    if is_basepoint(k):
        right = Basepoint(c.labels)
    else:
        cv, cw = k
        av = alpha_eval(y, BarPoint(T, {T.root: r}, cv), base, eps)
        merged = S.sigma_merge(av, cw)
        right = S.project_barS(merged, total, eps)
    ok = _same(left, right)
    return DiagramReport(True, left, right, ok, [] if ok else ["composites differ"])
