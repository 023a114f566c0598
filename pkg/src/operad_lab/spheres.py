"""Sphere operads: one-point compactified barycentre configurations.

A sphere point is either a finite :class:`DiscConfig` satisfying the simplex
and barycentre conditions or the single :class:`Basepoint` of its label
set. The quotient sphere keeps only finite points in the open star region
and sends everything else to the basepoint.
"""

from __future__ import annotations

import math
from itertools import combinations
from . import disc_operads as D
from . import geometry as g
from .disc_operads import DiscConfig
from .errors import BackendError, DomainError
from .geometry import INF, Basepoint, Norm, is_basepoint

__all__ = [
    "as_sphere_point", "sphere_compose", "sphere_decompose", "project_barS",
    "barS_compose", "barS_decompose", "barS_retraction", "retraction_scale",
    "coend_pairing", "coend_square", "sigma_split", "sigma_merge",
    "star_block_violations", "labels_of",
]


def labels_of(a) -> frozenset:
    return a.labels


def as_sphere_point(c: DiscConfig, eps=g.DEFAULT_EPS) -> DiscConfig:
    if not D.in_R(c, eps):
        raise DomainError("sphere points must satisfy the simplex and barycentre conditions")
    return c


def _composite_labels(a, b, i):
    return (a.labels - {i}) | b.labels


def sphere_compose(a, b, i):
    """Composition with basepoint absorption."""
    if i not in a.labels:
        raise DomainError(f"label {i!r} is not a label of the outer point")
    if is_basepoint(a) or is_basepoint(b):
        clash = (a.labels - {i}) & b.labels
        if clash:
            raise DomainError(f"label collision in composition: {g.sorted_labels(clash)!r}")
        return Basepoint(_composite_labels(a, b, i))
    return D.compose(a, b, i)


def sphere_decompose(a, J, i, eps=g.DEFAULT_EPS):
    J = frozenset(J)
    if is_basepoint(a):
        return Basepoint((a.labels - J) | {i}), Basepoint(J)
    return D.decompose(a, J, i, eps)


def project_barS(a, norm=Norm.LINF, eps=g.DEFAULT_EPS):
    """Finite points of the open star region pass; all else is the basepoint."""
    if is_basepoint(a):
        return a
    if D.in_open_star(a, norm, eps):
        return a
    return Basepoint(a.labels)


def barS_compose(a, b, i, norm=Norm.LINF, eps=g.DEFAULT_EPS):
    return project_barS(sphere_compose(a, b, i), norm, eps)


def barS_decompose(a, J, i, norm=Norm.LINF, eps=g.DEFAULT_EPS):
    out = sphere_decompose(project_barS(a, norm, eps), J, i, eps)
    return tuple(project_barS(p, norm, eps) for p in out)


def retraction_scale(c: DiscConfig, norm=Norm.LINF) -> float:
    """``b(x, t) = max(|x_i| / t_i, |x_i - x_j| / (t_i + t_j))``."""
    b = max(g.norm_eval(c.x[k], norm) / c.t[k] for k in c.t)
    ks = c.ordered_labels()
    for a in range(len(ks)):
        for k in ks[a + 1:]:
            i = ks[a]
            b = max(b, g.norm_eval(g.vsub(c.x[i], c.x[k]), norm) / (c.t[i] + c.t[k]))
    return b


def barS_retraction(a, norm=Norm.LINF, eps=g.DEFAULT_EPS):
    """Stretch the open star region over the whole sphere:
    ``(x, t) -> (-log(1 - b(x, t)) x, t)``. Float backend only."""
    if is_basepoint(a):
        return a
    if a.exact:
        raise BackendError("the retraction uses a logarithm; use the float backend")
    if not D.in_open_star(a, norm, eps):
        return Basepoint(a.labels)
    b = retraction_scale(a, norm)
    if b >= 1.0:
        return Basepoint(a.labels)
    s = -math.log1p(-b)
    return DiscConfig({k: g.vscale(s, v) for k, v in a.x.items()}, dict(a.t))


# -- pairing with the one-point compactification of V ---------------------

def coend_pairing(v, a) -> dict:
    """``v -> ((v + x_i) / t_i)_i``; infinity or the basepoint give all infinity."""
    if is_basepoint(a) or g.is_inf(v):
        return {k: INF for k in a.labels}
    if len(v) != a.dim:
        raise DomainError("vector and configuration dimensions differ")
    return {k: tuple(c / a.t[k] for c in g.vadd(v, a.x[k])) for k in a.t}


def coend_square(v, a, b, i):
    """Both ways around the associativity square: pair with the composite,
    or pair with ``a`` and then pair entry ``i`` with ``b``. Tuples with an
    infinite entry are returned as all-infinite."""
    direct = coend_pairing(v, sphere_compose(a, b, i))
    first = coend_pairing(v, a)
    second = {k: w for k, w in first.items() if k != i}
    second.update(coend_pairing(first[i], b) if not is_basepoint(a) else
                  {j: INF for j in b.labels})
    return _collapse(direct), _collapse(second)


def _collapse(values: dict) -> dict:
    """In a smash power any infinite coordinate is the basepoint."""
    if any(g.is_inf(w) for w in values.values()):
        return {k: INF for k in values}
    return values


# -- splitting V ⊕ W -------------------------------------------------------

def sigma_split(a, split):
    dim_v, dim_w = split
    if is_basepoint(a):
        return Basepoint(a.labels), Basepoint(a.labels)
    if dim_v + dim_w != a.dim:
        raise DomainError(f"split {split} does not match dimension {a.dim}")
    return D.split_config(a, dim_v)


def sigma_merge(av, aw):
    """``((x, t), (y, t)) -> ((x, y), t)``; a basepoint factor gives the basepoint."""
    if av.labels != aw.labels:
        raise DomainError("factors over different label sets")
    if is_basepoint(av) or is_basepoint(aw):
        return Basepoint(av.labels)
    if av.t != aw.t:
        raise DomainError("factors carry different weights")
    return DiscConfig({k: av.x[k] + aw.x[k] for k in av.x}, dict(av.t))


# -- barycentre inequalities in the open star region ----------------------

def star_block_violations(c: DiscConfig, norm=Norm.LINF, eps=g.DEFAULT_EPS) -> list:
    """For a point of the open star region, every pair of disjoint nonempty
    blocks ``K, K'`` must satisfy ``|x_K| < t_K`` and
    ``|x_K - x_K'| < min(t_K, t_K')``. Returns the failing pairs."""
    ls = c.ordered_labels()
    blocks = [frozenset(s) for k in range(1, len(ls) + 1) for s in combinations(ls, k)]
    bar = {K: g.weighted_barycentre(c.x, c.t, K) for K in blocks}
    wt = {K: g.combined_weight(c.t, K) for K in blocks}
    bad = []
    for K in blocks:
        if not g.lt(g.norm_eval(bar[K], norm), wt[K], eps):
            bad.append((g.sorted_labels(K), None))
    for a, K in enumerate(blocks):
        for K2 in blocks[a + 1:]:
            if K & K2:
                continue
            d = g.norm_eval(g.vsub(bar[K], bar[K2]), norm)
            if not g.lt(d, min(wt[K], wt[K2]), eps):
                bad.append((g.sorted_labels(K), g.sorted_labels(K2)))
    return bad
