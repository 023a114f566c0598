"""Scalars, vectors, norms and weighted barycentres.

Two scalar backends are supported. Exact values are ``fractions.Fraction``;
approximate values are Python floats. The backend of a value is read off
the value itself and a single configuration never mixes the two. Vectors
are plain tuples of scalars.

Comparisons go through :func:`le`, :func:`lt` and :func:`eq`, which are
exact on fractions and use a relative tolerance on floats.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Hashable, Iterable, Mapping, Sequence, Union

from .errors import BackendError, DomainError

Scalar = Union[Fraction, float]
Vector = tuple
Label = Hashable

DEFAULT_EPS = 1e-9
MAX_DIM = 16


class Backend(enum.Enum):
    EXACT = "exact"
    FLOAT = "float"


class _Infinity:
    """The extended value at infinity, used for edge weights and the
    basepoint of a one-point compactification."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_inf(value) -> bool:
    return value is INF


class Norm(enum.Enum):
    LINF = "linf"
    L1 = "l1"
    L2 = "l2"

    def evaluate(self, v: Sequence[Scalar]) -> Scalar:
        if self is Norm.LINF:
            return max((abs(c) for c in v), default=_zero_like(v))
        if self is Norm.L1:
            return sum((abs(c) for c in v), _zero_like(v))
        if any(isinstance(c, Fraction) for c in v):
            raise BackendError("the L2 norm is irrational in general; use the float backend")
        return math.hypot(*v)


@dataclass(frozen=True)
class DirectSumNorm:
    """``|(v, w)| = max(|v|, |w|)`` on a direct sum of blocks of the given
    dimensions, each carrying ``base``."""

    base: Norm
    dims: tuple

    def evaluate(self, v: Sequence[Scalar]) -> Scalar:
        if len(v) != sum(self.dims):
            raise DomainError(f"vector of length {len(v)} does not split as {self.dims}")
        out, start = None, 0
        for d in self.dims:
            part = self.base.evaluate(v[start:start + d])
            out = part if out is None or part > out else out
            start += d
        return out


def _zero_like(v):
    for c in v:
        return Fraction(0) if isinstance(c, Fraction) else 0.0
    return Fraction(0)


def parse_norm(name) -> Norm:
    if isinstance(name, (Norm, DirectSumNorm)):
        return name
    try:
        return Norm(str(name).lower())
    except ValueError:
        raise DomainError(f"unknown norm {name!r}; expected one of linf, l1, l2") from None


def norm_eval(v: Sequence[Scalar], norm=Norm.LINF) -> Scalar:
    return parse_norm(norm).evaluate(v)


# -- scalars ---------------------------------------------------------------

def backend_of(value) -> Backend:
    if isinstance(value, Fraction):
        return Backend.EXACT
    if isinstance(value, float):
        return Backend.FLOAT
    raise BackendError(f"not a scalar: {value!r}")


def to_exact(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise BackendError("booleans are not scalars")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise DomainError(f"malformed rational {value!r}") from None
    raise BackendError(f"{value!r} cannot enter the exact backend")


def to_float(value) -> float:
    if isinstance(value, bool):
        raise BackendError("booleans are not scalars")
    return float(value)


def coerce(value, backend: Backend) -> Scalar:
    return to_exact(value) if backend is Backend.EXACT else to_float(value)


def infer_backend(values: Iterable) -> Backend:
    """Backend shared by ``values``: floats select FLOAT, everything else
    (ints, fractions, rational strings) EXACT. Mixing floats with fractions
    is rejected."""
    seen_float = seen_exact = False
    for v in values:
        if isinstance(v, float):
            seen_float = True
        elif isinstance(v, Fraction):
            seen_exact = True
    if seen_float and seen_exact:
        raise BackendError("exact and float scalars mixed in one value")
    return Backend.FLOAT if seen_float else Backend.EXACT


def _scale(a, b):
    return max(1.0, abs(a), abs(b))


def le(a, b, eps: float = DEFAULT_EPS) -> bool:
    """``a <= b``; in float mode with slack ``eps`` relative to magnitude."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a <= b
    return a <= b + eps * _scale(a, b)


def lt(a, b, eps: float = DEFAULT_EPS) -> bool:
    """Strict ``a < b``; in float mode ``a`` must clear ``b`` by the margin."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a < b
    return a < b - eps * _scale(a, b)


def eq(a, b, eps: float = DEFAULT_EPS) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(a - b) <= eps * _scale(a, b)


def vec_eq(u, v, eps: float = DEFAULT_EPS) -> bool:
    return len(u) == len(v) and all(eq(a, b, eps) for a, b in zip(u, v))


# -- vectors ---------------------------------------------------------------

def vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v):
    return tuple(c * a for a in v)


def vneg(v):
    return tuple(-a for a in v)


def vzero(n: int, backend: Backend = Backend.EXACT):
    z = Fraction(0) if backend is Backend.EXACT else 0.0
    return (z,) * n


def matvec(m: Sequence[Sequence[Scalar]], v):
    return tuple(sum((a * b for a, b in zip(row, v)), 0 * v[0]) for row in m)


# -- weighted barycentres --------------------------------------------------

def combined_weight(t: Mapping[Label, Scalar], J: Iterable[Label]) -> Scalar:
    """``t_J``, the sum of the weights over ``J``."""
    J = list(J)
    if not J:
        raise DomainError("combined weight over an empty set")
    total = t[J[0]]
    for j in J[1:]:
        total = total + t[j]
    return total


def weighted_barycentre(x: Mapping[Label, Vector], t: Mapping[Label, Scalar],
                        J: Iterable[Label]) -> Vector:
    """``x_J = (sum_j t_j x_j) / t_J`` over a nonempty subset ``J``."""
    J = list(J)
    if not J:
        raise DomainError("weighted barycentre over an empty set")
    if len(J) == 1:
        return tuple(x[J[0]])
    tJ = combined_weight(t, J)
    acc = vscale(t[J[0]], x[J[0]])
    for j in J[1:]:
        acc = vadd(acc, vscale(t[j], x[j]))
    return tuple(a / tJ for a in acc)


@dataclass(frozen=True)
class Basepoint:
    """The basepoint of a pointed space indexed by a label set.

    All points at infinity of a Thom space, and every collapsed region of a
    quotient, are represented by this single value."""

    labels: frozenset

    def __init__(self, labels):
        object.__setattr__(self, "labels", frozenset(labels))

    def __repr__(self):
        return f"Basepoint({sorted_labels(self.labels)!r})"


def is_basepoint(value) -> bool:
    return isinstance(value, Basepoint)


# -- labels ----------------------------------------------------------------

def label_key(label):
    """Total order on labels: ints numerically, then strings, then
    anything else by its repr."""
    if isinstance(label, bool):
        return (2, repr(label))
    if isinstance(label, int):
        return (0, label, "")
    if isinstance(label, str):
        return (1, 0, label)
    if isinstance(label, frozenset):
        return (3, tuple(sorted(label_key(x) for x in label)))
    return (4, repr(label))


def sorted_labels(labels: Iterable[Label]) -> list:
    return sorted(labels, key=label_key)
