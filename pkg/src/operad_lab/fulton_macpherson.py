"""Points of the Fulton-MacPherson operad as coherent tables.

A point over ``I`` stores, for every subset ``J`` with at least two
elements, a non-constant tuple ``y(J)`` of vectors indexed by ``J``, read
modulo translation and positive scaling. Coherence: for ``J ⊆ J'`` the
restriction ``y(J')|_J`` is either constant or congruent to ``y(J)``.

Canonical representatives are taken with respect to weights ``t``:
weighted barycentre 0 and weighted norm ``(Σ t_j |y_j|) / t_J = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Iterable, Mapping

from . import geometry as g
from .errors import BackendError, DomainError, ResourceError, ValidationError
from .geometry import INF, Norm
from .trees import LabelledTree, validate as validate_tree

__all__ = [
    "FMPoint", "SinhaCoords", "fm_validate", "fm_normalize", "fm_compose",
    "fm_norm_check", "sinha_coords", "stratum_tree", "fm_equal", "congruent",
    "fm_from_configuration", "fm_from_tree", "child_rep", "is_normalized",
    "subsets", "MAX_FM_LABELS",
]

MAX_FM_LABELS = 8


def subsets(labels) -> list:
    """All subsets with at least two elements, largest first."""
    ls = g.sorted_labels(labels)
    out = []
    for k in range(len(ls), 1, -1):
        out.extend(frozenset(c) for c in combinations(ls, k))
    return out


class FMPoint:
    """A coherent table ``J -> y(J)``. Build with :func:`fm_validate`."""

    __slots__ = ("labels", "dim", "table", "reference_weights", "norm", "backend")

    def __init__(self, labels, dim, table, reference_weights=None, norm=Norm.LINF, backend=None):
        self.labels = frozenset(labels)
        self.dim = dim
        self.table = table
        self.reference_weights = reference_weights
        self.norm = norm
        self.backend = backend

    def __getitem__(self, J) -> dict:
        return self.table[frozenset(J)]

    @property
    def exact(self) -> bool:
        return self.backend is g.Backend.EXACT

    def __eq__(self, other):
        if not isinstance(other, FMPoint):
            return NotImplemented
        return self.labels == other.labels and self.table == other.table

    __hash__ = None

    def __repr__(self):
        return f"FMPoint(labels={g.sorted_labels(self.labels)!r}, dim={self.dim})"


@dataclass(frozen=True)
class SinhaCoords:
    directions: dict   # (j1, j2) with j1 < j2 -> unit vector
    ratios: dict       # (k1, k2, k3) -> |y_k1 - y_k2| / |y_k1 - y_k3| or INF


# -- tuple helpers ---------------------------------------------------------

def _is_constant(y: Mapping) -> bool:
    vs = list(y.values())
    return all(v == vs[0] for v in vs[1:])


def _is_constant_tol(y: Mapping, eps) -> bool:
    vs = list(y.values())
    return all(g.vec_eq(v, vs[0], eps) for v in vs[1:])


def _canonical(y: Mapping, w: Mapping, norm=Norm.LINF) -> dict:
    """Representative of ``y`` modulo translation and positive scaling with
    ``w``-barycentre 0 and ``w``-weighted norm 1."""
    J = list(y)
    centre = g.weighted_barycentre(y, w, J)
    shifted = {j: g.vsub(y[j], centre) for j in J}
    wJ = g.combined_weight(w, J)
    total = None
    for j in J:
        term = w[j] * g.norm_eval(shifted[j], norm)
        total = term if total is None else total + term
    scale = total / wJ
    if scale == 0:
        raise DomainError("cannot normalize a constant tuple")
    return {j: tuple(c / scale for c in shifted[j]) for j in J}


def _uniform(J, backend):
    one = Fraction(1) if backend is g.Backend.EXACT else 1.0
    return {j: one for j in J}


def congruent(u: Mapping, v: Mapping, backend=None, eps=g.DEFAULT_EPS) -> bool:
    """Equality modulo translation and positive scaling of two non-constant
    tuples over the same labels, decided on uniform-weight canonical forms."""
    if set(u) != set(v):
        return False
    if backend is None:
        backend = g.infer_backend(c for vec in list(u.values()) + list(v.values()) for c in vec)
    w = _uniform(u, backend)
    cu, cv = _canonical(u, w), _canonical(v, w)
    if backend is g.Backend.EXACT:
        return cu == cv
    return all(g.vec_eq(cu[j], cv[j], eps) for j in cu)


def _restrict(y: Mapping, J) -> dict:
    return {j: y[j] for j in J}


# -- validation ------------------------------------------------------------

def fm_validate(table: Mapping, labels: Iterable, dim: int, reference_weights=None,
                norm=Norm.LINF, eps=g.DEFAULT_EPS) -> FMPoint:
    """Check shape, non-constancy and coherence; return the point."""
    I = frozenset(labels)
    if len(I) < 2:
        raise ValidationError("a point needs at least two labels")
    if len(I) > MAX_FM_LABELS:
        raise ResourceError(f"full tables are limited to {MAX_FM_LABELS} labels")
    if not 0 <= dim <= g.MAX_DIM:
        raise DomainError(f"dimension {dim} out of range")
    norm = g.parse_norm(norm)
    raw = {frozenset(J): y for J, y in table.items()}
    expected = set(subsets(I))
    if set(raw) != expected:
        missing = expected - set(raw)
        bad = missing or (set(raw) - expected)
        raise ValidationError("table keys must be exactly the subsets of size >= 2",
                              witness=g.sorted_labels(next(iter(bad))))
    backend = g.infer_backend(c for y in raw.values() for v in y.values() for c in v)
    tab = {}
    for J, y in raw.items():
        if set(y) != set(J):
            raise ValidationError("tuple labels differ from its subset", witness=g.sorted_labels(J))
        if any(len(v) != dim for v in y.values()):
            raise ValidationError("tuple of wrong dimension", witness=g.sorted_labels(J))
        tab[J] = {j: tuple(g.coerce(c, backend) for c in y[j]) for j in g.sorted_labels(J)}
    exact = backend is g.Backend.EXACT
    constant = (lambda y: _is_constant(y)) if exact else (lambda y: _is_constant_tol(y, eps))
    for J in subsets(I):
        if constant(tab[J]):
            raise ValidationError("constant tuple", witness=g.sorted_labels(J))
    for J2 in subsets(I):
        for J in subsets(J2):
            if J == J2:
                continue
            r = _restrict(tab[J2], J)
            if not constant(r) and not congruent(r, tab[J], backend, eps):
                raise ValidationError("coherence fails",
                                      witness=[g.sorted_labels(J), g.sorted_labels(J2)])
    w = None
    if reference_weights is not None:
        w = {k: g.coerce(reference_weights[k], backend) for k in I}
        for J in subsets(I):
            if not _weighted_ok(tab[J], w, norm, eps):
                raise ValidationError("tuple is not normalized for the reference weights",
                                      witness=g.sorted_labels(J))
    return FMPoint(I, dim, tab, w, norm, backend)


def _weighted_ok(y: Mapping, w: Mapping, norm, eps) -> bool:
    J = list(y)
    wJ = g.combined_weight(w, J)
    moment = g.vzero(len(y[J[0]]), g.backend_of(wJ))
    total = 0 * wJ
    for j in J:
        moment = g.vadd(moment, g.vscale(w[j], y[j]))
        total += w[j] * g.norm_eval(y[j], norm)
    zero = 0 * wJ
    return all(g.eq(m, zero, eps) for m in moment) and g.eq(total, wJ, eps)


def is_normalized(p: FMPoint, t: Mapping, norm=None, eps=g.DEFAULT_EPS) -> bool:
    norm = p.norm if norm is None else g.parse_norm(norm)
    try:
        w = {k: g.coerce(t[k], p.backend) for k in p.labels}
    except KeyError:
        return False
    return all(_weighted_ok(p.table[J], w, norm, eps) for J in p.table)


def fm_normalize(p: FMPoint, t: Mapping, norm=None) -> FMPoint:
    """Replace every ``y(J)`` by its representative normalized for ``t|_J``."""
    norm = p.norm if norm is None else g.parse_norm(norm)
    if set(t) < p.labels:
        raise DomainError("weights do not cover the labels")
    w = {k: g.coerce(t[k], p.backend) for k in p.labels}
    if any(v <= 0 for v in w.values()):
        raise DomainError("weights must be positive")
    tab = {J: _canonical(y, w, norm) for J, y in p.table.items()}
    return FMPoint(p.labels, p.dim, tab, w, norm, p.backend)


def fm_equal(p: FMPoint, q: FMPoint, eps=g.DEFAULT_EPS) -> bool:
    """Equality of points: every term agrees modulo translation and scaling."""
    if p.labels != q.labels or p.dim != q.dim:
        return False
    backend = p.backend if p.backend is q.backend else g.Backend.FLOAT
    return all(congruent(p.table[J], q.table[J], backend, eps) for J in p.table)


# -- constructors ----------------------------------------------------------

def fm_from_configuration(x: Mapping, norm=Norm.LINF) -> FMPoint:
    """The point of the open stratum given by distinct centres ``x``."""
    I = frozenset(x)
    dims = {len(v) for v in x.values()}
    if len(dims) != 1:
        raise DomainError("centres of mixed dimensions")
    (dim,) = dims
    table = {J: {j: tuple(x[j]) for j in J} for J in subsets(I)}
    return fm_validate(table, I, dim, norm=norm)


# -- operad structure ------------------------------------------------------

def fm_compose(y: FMPoint, z: FMPoint, i) -> FMPoint:
    """``(y ∘_i z)(K)`` is ``z(K)`` for ``K ⊆ J`` and ``y(π(K))`` pulled
    back along the collapse ``π: J -> i`` otherwise. Not renormalized."""
    if i not in y.labels:
        raise DomainError(f"label {i!r} is not a label of the outer point")
    J = z.labels
    clash = (y.labels - {i}) & J
    if clash:
        raise DomainError(f"label collision in composition: {g.sorted_labels(clash)!r}")
    if y.dim != z.dim:
        raise DomainError("dimensions differ")
    if y.backend is not z.backend:
        raise BackendError("points from different scalar backends")
    labels = (y.labels - {i}) | J
    if len(labels) > MAX_FM_LABELS:
        raise ResourceError(f"full tables are limited to {MAX_FM_LABELS} labels")

    def pi(k):
        return i if k in J else k

    tab = {}
    for K in subsets(labels):
        if K <= J:
            tab[K] = dict(z.table[K])
        else:
            src = y.table[frozenset(pi(k) for k in K)]
            tab[K] = {k: src[pi(k)] for k in K}
    return FMPoint(labels, y.dim, tab, None, y.norm, y.backend)


def fm_norm_check(y: FMPoint, z: FMPoint, i, t: Mapping, u: Mapping, eps=g.DEFAULT_EPS) -> list:
    """Terms of ``y ∘_i z`` with ``K ⊆ J``, ``K ⊇ J`` or ``K ∩ J = ∅``
    that fail the weighted conditions for ``t ∘_i u``. Empty means pass."""
    comp = fm_compose(y, z, i)
    J = z.labels
    w = {k: v for k, v in t.items() if k != i}
    for j in J:
        w[j] = t[i] * u[j]
    w = {k: g.coerce(v, comp.backend) for k, v in w.items()}
    bad = []
    for K, yk in comp.table.items():
        if K <= J or J <= K or not (K & J):
            if not _weighted_ok(yk, w, comp.norm, eps):
                bad.append(g.sorted_labels(K))
    return bad


# -- coordinates and strata -----------------------------------------------

def sinha_coords(p: FMPoint, norm=Norm.LINF) -> SinhaCoords:
    """Unit directions of pair terms and distance ratios of triple terms.

    Ratios are recorded for every ordering of every 3-subset.
    """
    norm = g.parse_norm(norm)
    directions = {}
    ls = g.sorted_labels(p.labels)
    for j1, j2 in combinations(ls, 2):
        y = p.table[frozenset((j1, j2))]
        d = g.vsub(y[j1], y[j2])
        n = g.norm_eval(d, norm)
        directions[(j1, j2)] = tuple(c / n for c in d)
    ratios = {}
    for triple in combinations(ls, 3):
        y = p.table[frozenset(triple)]
        for k1, k2, k3 in permutations(triple):
            num = g.norm_eval(g.vsub(y[k1], y[k2]), norm)
            den = g.norm_eval(g.vsub(y[k1], y[k3]), norm)
            ratios[(k1, k2, k3)] = INF if den == 0 else num / den
    return SinhaCoords(directions, ratios)


def stratum_tree(p: FMPoint, eps=g.DEFAULT_EPS) -> LabelledTree:
    """Subsets ``J`` on which every larger term is constant, with the root
    and the leaves: the clusters the point resolves infinitesimally."""
    constant = _is_constant if p.exact else (lambda y: _is_constant_tol(y, eps))
    edges = [p.labels] + [frozenset([k]) for k in p.labels]
    all_subsets = subsets(p.labels)
    for J in all_subsets:
        if J == p.labels:
            continue
        if all(constant(_restrict(p.table[K], J)) for K in all_subsets if J < K):
            edges.append(J)
    return validate_tree(edges, p.labels)


def child_rep(edge) -> object:
    """Label used for a child edge in vertex data: its least label."""
    return min(edge, key=g.label_key)


def fm_from_tree(T: LabelledTree, vertex_points: Mapping, norm=Norm.LINF) -> FMPoint:
    """The point in the stratum of ``T`` with vertex configurations
    ``vertex_points[e]``: a map from each child representative of ``e`` to
    a vector, pairwise distinct. ``y(K)`` is read off the smallest edge
    containing ``K``."""
    internal = T.internal_edges
    child_of = {}
    for e in internal:
        pts = vertex_points[e]
        kids = T.children(e)
        if set(pts) != {child_rep(c) for c in kids}:
            raise DomainError(f"vertex data for {g.sorted_labels(e)!r} has the wrong labels")
        for c in kids:
            for k in c:
                child_of[(e, k)] = child_rep(c)
    dims = {len(v) for pts in vertex_points.values() for v in pts.values()}
    if len(dims) != 1:
        raise DomainError("vertex vectors of mixed dimensions")
    (dim,) = dims
    by_size = sorted(internal, key=len)
    table = {}
    for K in subsets(T.labels):
        e = next(f for f in by_size if K <= f)
        pts = vertex_points[e]
        table[K] = {k: tuple(pts[child_of[(e, k)]]) for k in K}
    return fm_validate(table, T.labels, dim, norm=norm)
