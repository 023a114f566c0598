"""Configurations of discs and the overlapping-discs operad.

A :class:`DiscConfig` is a labelled family of centres ``x_i`` and radii
``t_i``. It carries points of every operad built on the same data: the
overlapping discs ``P``, little discs ``E``, the barycentre operad ``R``,
restricted little discs ``D = E ∩ R``, the simplex operad (dimension 0),
the distinct-centre configurations ``U``, unbounded restricted discs
``RD`` and the open star region. Membership is a property computed by
:func:`classify`, not a type.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from . import geometry as g
from .errors import BackendError, DomainError, PreconditionError
from .geometry import Backend, Basepoint, Norm

__all__ = [
    "DiscConfig", "ConfigClass", "compose", "decompose", "quotient", "restrict",
    "classify", "config_homotopy_inverse", "kappa", "relabel", "act",
    "in_R", "in_E", "in_D", "in_RD", "in_U", "in_open_star", "fresh_label",
]


@dataclass(frozen=True, eq=False)
class DiscConfig:
    """Centres ``x`` and radii ``t`` over a common finite label set."""

    x: dict
    t: dict

    def __init__(self, x: Mapping, t: Mapping):
        if set(x) != set(t):
            raise DomainError("centres and radii must share one label set")
        if not x:
            raise DomainError("a configuration needs at least one label")
        backend = g.infer_backend(list(t.values()) + [c for v in x.values() for c in v])
        dims = {len(v) for v in x.values()}
        if len(dims) != 1:
            raise DomainError(f"centres of mixed dimensions {sorted(dims)}")
        (dim,) = dims
        if dim > g.MAX_DIM:
            raise DomainError(f"dimension {dim} exceeds the bound {g.MAX_DIM}")
        xs = {k: tuple(g.coerce(c, backend) for c in v) for k, v in x.items()}
        ts = {k: g.coerce(v, backend) for k, v in t.items()}
        if any(v <= 0 for v in ts.values()):
            raise DomainError("radii must be strictly positive")
        object.__setattr__(self, "x", xs)
        object.__setattr__(self, "t", ts)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "backend", backend)

    @classmethod
    def from_lists(cls, labels, xs, ts):
        labels = list(labels)
        if not (len(labels) == len(xs) == len(ts)):
            raise DomainError("labels, centres and radii differ in length")
        return cls(dict(zip(labels, (tuple(v) for v in xs))), dict(zip(labels, ts)))

    @property
    def labels(self) -> frozenset:
        return frozenset(self.t)

    def ordered_labels(self) -> list:
        return g.sorted_labels(self.t)

    @property
    def exact(self) -> bool:
        return self.backend is Backend.EXACT

    def to_float(self) -> "DiscConfig":
        return DiscConfig({k: tuple(float(c) for c in v) for k, v in self.x.items()},
                          {k: float(v) for k, v in self.t.items()})

    def __eq__(self, other):
        if not isinstance(other, DiscConfig):
            return NotImplemented
        return self.x == other.x and self.t == other.t

    __hash__ = None

    def __repr__(self):
        ks = self.ordered_labels()
        body = ", ".join(f"{k!r}: ({_fmt_vec(self.x[k])}; {self.t[k]})" for k in ks)
        return f"DiscConfig({{{body}}})"


def _fmt_vec(v):
    return ", ".join(str(c) for c in v)


def _check_backends(*configs):
    backends = {c.backend for c in configs}
    if len(backends) > 1:
        raise BackendError("configurations from different scalar backends")


def fresh_label(existing: Iterable, stem: str = "q") -> str:
    existing = set(existing)
    k = 0
    while f"{stem}{k}" in existing:
        k += 1
    return f"{stem}{k}"


# -- operad structure ------------------------------------------------------

def compose(a: DiscConfig, b: DiscConfig, i) -> DiscConfig:
    """Insert ``b``, dilated by ``t_i``, in place of disc ``i`` of ``a``.

    Labels of ``b`` must avoid the labels of ``a`` other than ``i``; no
    silent relabelling is done (see :func:`relabel`).
    """
    if i not in a.t:
        raise DomainError(f"label {i!r} is not a label of the outer configuration")
    clash = (a.labels - {i}) & b.labels
    if clash:
        raise DomainError(f"label collision in composition: {g.sorted_labels(clash)!r}")
    if a.dim != b.dim:
        raise DomainError("cannot compose configurations of different dimensions")
    _check_backends(a, b)
    ti, xi = a.t[i], a.x[i]
    x = {k: v for k, v in a.x.items() if k != i}
    t = {k: v for k, v in a.t.items() if k != i}
    for j, yj in b.x.items():
        x[j] = g.vadd(xi, g.vscale(ti, yj))
        t[j] = ti * b.t[j]
    return DiscConfig(x, t)


def quotient(c: DiscConfig, J, i) -> DiscConfig:
    """``(x/J, t/J)``: the block ``J`` collapsed to one disc labelled ``i``
    at its weighted barycentre with the combined weight."""
    J = _block(c, J)
    rest = c.labels - J
    if i in rest:
        raise DomainError(f"label {i!r} already names a disc outside the block")
    x = {k: c.x[k] for k in rest}
    t = {k: c.t[k] for k in rest}
    x[i] = g.weighted_barycentre(c.x, c.t, J)
    t[i] = g.combined_weight(c.t, J)
    return DiscConfig(x, t)


def restrict(c: DiscConfig, J) -> DiscConfig:
    """``(x|J, t|J)``: the block ``J`` recentred at its barycentre and
    rescaled by ``1/t_J``."""
    J = _block(c, J)
    xJ = g.weighted_barycentre(c.x, c.t, J)
    tJ = g.combined_weight(c.t, J)
    return DiscConfig({j: tuple(a / tJ for a in g.vsub(c.x[j], xJ)) for j in J},
                      {j: c.t[j] / tJ for j in J})


def decompose(c: DiscConfig, J, i, eps: float = g.DEFAULT_EPS):
    """Inverse of :func:`compose` on the barycentre operad: returns the
    pair ``((x/J, t/J), (x|J, t|J))``."""
    if not in_R(c, eps):
        raise PreconditionError("decomposition is only defined on barycentre configurations")
    J = _block(c, J)
    if J == c.labels:
        raise DomainError("the block must be a proper subset of the labels")
    return quotient(c, J, i), restrict(c, J)


def _block(c: DiscConfig, J) -> frozenset:
    J = frozenset(J)
    if not J:
        raise DomainError("empty block")
    if not J <= c.labels:
        raise DomainError(f"block {g.sorted_labels(J - c.labels)!r} not among the labels")
    return J


def relabel(c: DiscConfig, mapping: Mapping) -> DiscConfig:
    """Transport along a bijection of labels; unmapped labels are kept."""
    f = {k: mapping.get(k, k) for k in c.t}
    if len(set(f.values())) != len(f):
        raise DomainError("relabelling is not injective")
    return DiscConfig({f[k]: v for k, v in c.x.items()}, {f[k]: v for k, v in c.t.items()})


def act(matrix, c: DiscConfig) -> DiscConfig:
    """Diagonal action of a linear map on the centres."""
    if any(len(row) != c.dim for row in matrix) or len(matrix) != c.dim:
        raise DomainError("matrix does not match the configuration dimension")
    coerced = [[g.coerce(a, c.backend) for a in row] for row in matrix]
    return DiscConfig({k: g.matvec(coerced, v) for k, v in c.x.items()}, dict(c.t))


# -- membership ------------------------------------------------------------

def _pairs(c: DiscConfig):
    ks = c.ordered_labels()
    for a in range(len(ks)):
        for b in range(a + 1, len(ks)):
            yield ks[a], ks[b]


def _zero(c: DiscConfig):
    return Fraction(0) if c.exact else 0.0


def in_delta_fibre(c: DiscConfig, eps=g.DEFAULT_EPS) -> bool:
    return g.eq(g.combined_weight(c.t, c.t), 1 + _zero(c), eps)


def in_R(c: DiscConfig, eps=g.DEFAULT_EPS) -> bool:
    if not in_delta_fibre(c, eps):
        return False
    moment = g.vzero(c.dim, c.backend)
    for k in c.t:
        moment = g.vadd(moment, g.vscale(c.t[k], c.x[k]))
    return all(g.eq(m, _zero(c), eps) for m in moment)


def _bounded(c, norm, eps):
    one = 1 + _zero(c)
    return all(g.le(g.norm_eval(c.x[k], norm), one - c.t[k], eps) for k in c.t)


def _disjoint(c, norm, eps):
    return all(g.le(c.t[i] + c.t[j], g.norm_eval(g.vsub(c.x[i], c.x[j]), norm), eps)
               for i, j in _pairs(c))


def _distinct(c, norm, eps):
    return all(g.lt(_zero(c), g.norm_eval(g.vsub(c.x[i], c.x[j]), norm), eps)
               for i, j in _pairs(c))


def _star(c, norm, eps):
    if not all(g.lt(g.norm_eval(c.x[k], norm), c.t[k], eps) for k in c.t):
        return False
    return all(g.lt(g.norm_eval(g.vsub(c.x[i], c.x[j]), norm), min(c.t[i], c.t[j]), eps)
               for i, j in _pairs(c))


def in_E(c, norm=Norm.LINF, eps=g.DEFAULT_EPS) -> bool:
    return _bounded(c, norm, eps) and _disjoint(c, norm, eps)


def in_D(c, norm=Norm.LINF, eps=g.DEFAULT_EPS) -> bool:
    return in_R(c, eps) and in_E(c, norm, eps)


def in_RD(c, norm=Norm.LINF, eps=g.DEFAULT_EPS) -> bool:
    return in_R(c, eps) and _disjoint(c, norm, eps)


def in_U(c, norm=Norm.LINF, eps=g.DEFAULT_EPS) -> bool:
    return in_R(c, eps) and _distinct(c, norm, eps)


def in_open_star(c, norm=Norm.LINF, eps=g.DEFAULT_EPS) -> bool:
    """Every disc contains the origin and the centre of every other disc,
    both strictly (pairs ``i != j``)."""
    return in_R(c, eps) and _star(c, norm, eps)


@dataclass(frozen=True)
class ConfigClass:
    in_P: bool
    in_E: bool
    in_D: bool
    in_R: bool
    in_Delta_fibre: bool
    in_U: bool
    in_RD: bool
    in_open_star: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def classify(c: DiscConfig, norm=Norm.LINF, eps: float = g.DEFAULT_EPS) -> ConfigClass:
    norm = g.parse_norm(norm)
    R = in_R(c, eps)
    E = _bounded(c, norm, eps) and _disjoint(c, norm, eps)
    return ConfigClass(
        in_P=True,
        in_E=E,
        in_D=R and E,
        in_R=R,
        in_Delta_fibre=in_delta_fibre(c, eps),
        in_U=R and _distinct(c, norm, eps),
        in_RD=R and _disjoint(c, norm, eps),
        in_open_star=R and _star(c, norm, eps),
    )


# -- maps out of configuration spaces -------------------------------------

def config_homotopy_inverse(x: Mapping, norm=Norm.LINF) -> DiscConfig:
    """Send distinct points to an unbounded restricted configuration.

    Each radius is half the distance to the nearest other point; the result
    is translated to weighted barycentre 0 and scaled so radii sum to 1.
    """
    labels = g.sorted_labels(x)
    if len(labels) < 2:
        raise DomainError("need at least two points")
    backend = g.infer_backend(c for v in x.values() for c in v)
    pts = {k: tuple(g.coerce(c, backend) for c in x[k]) for k in labels}
    u = {}
    for i in labels:
        d = min(g.norm_eval(g.vsub(pts[j], pts[i]), norm) for j in labels if j != i)
        if d == 0:
            raise DomainError(f"point {i!r} coincides with another point")
        u[i] = d / 2
    uI = g.combined_weight(u, labels)
    xI = g.weighted_barycentre(pts, u, labels)
    return DiscConfig({k: tuple(a / uI for a in g.vsub(pts[k], xI)) for k in labels},
                      {k: u[k] / uI for k in labels})


def split_config(c: DiscConfig, dim_v: int):
    """Project a configuration in ``V ⊕ W`` to its two coordinate blocks."""
    if not 0 <= dim_v <= c.dim:
        raise DomainError(f"cannot split dimension {c.dim} at {dim_v}")
    return (DiscConfig({k: v[:dim_v] for k, v in c.x.items()}, dict(c.t)),
            DiscConfig({k: v[dim_v:] for k, v in c.x.items()}, dict(c.t)))


def kappa(c: DiscConfig, split, norm=Norm.LINF, eps: float = g.DEFAULT_EPS):
    """``((x, y), t) -> ((x, t), (y, t))`` into ``D_V ∧ S̄_W``.

    Returns the basepoint when the ``W`` part leaves the open star region;
    otherwise the ``V`` part is a restricted little disc configuration.
    """
    dim_v, dim_w = split
    if dim_v + dim_w != c.dim:
        raise DomainError(f"split {split} does not match dimension {c.dim}")
    base = g.parse_norm(norm)
    if not in_D(c, g.DirectSumNorm(base, (dim_v, dim_w)), eps):
        raise PreconditionError("kappa is defined on restricted little discs in V ⊕ W")
    xv, yw = split_config(c, dim_v)
    if not in_open_star(yw, base, eps):
        return Basepoint(c.labels)
    return xv, yw
