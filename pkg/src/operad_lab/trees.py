"""Labelled trees as laminar families of subsets.

A tree on a label set ``I`` is a family of nonempty subsets (its edges)
containing every singleton and ``I`` itself, any two of which are nested
or disjoint. Singletons are the leaves, ``I`` is the root edge, and the
remaining edges together with the root are the non-leaf edges ``E(T)``.
Vertices are never materialized.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Mapping

from . import geometry as g
from .errors import DomainError, ResourceError, ValidationError

__all__ = [
    "LabelledTree", "validate", "corolla", "graft", "enumerate_trees",
    "enumerate_laminar", "decompose_along", "is_morphism", "leq",
    "edge_key", "MAX_ENUM_LABELS",
]

MAX_ENUM_LABELS = 7


def edge_key(e) -> tuple:
    return tuple(g.label_key(x) for x in g.sorted_labels(e))


class LabelledTree:
    """An ``I``-labelled tree. Construct through :func:`validate`."""

    __slots__ = ("labels", "edges", "_key")

    def __init__(self, labels, edges):
        self.labels = frozenset(labels)
        self.edges = frozenset(frozenset(e) for e in edges)
        self._key = None

    @property
    def internal_edges(self) -> list:
        """``E(T)``: edges with at least two labels, root included, in
        canonical order (larger edges first, then lexicographic)."""
        return sorted((e for e in self.edges if len(e) >= 2),
                      key=lambda e: (-len(e), edge_key(e)))

    @property
    def root(self) -> frozenset:
        return self.labels

    def children(self, e) -> list:
        """Maximal edges strictly inside ``e``."""
        e = frozenset(e)
        inside = [f for f in self.edges if f < e]
        kids = [f for f in inside if not any(f < h for h in inside)]
        return sorted(kids, key=edge_key)

    def parent(self, e):
        e = frozenset(e)
        above = [f for f in self.edges if e < f]
        return min(above, key=len) if above else None

    def key(self) -> tuple:
        if self._key is None:
            self._key = (edge_key(self.labels),
                         tuple(sorted(edge_key(e) for e in self.edges)))
        return self._key

    def is_corolla(self) -> bool:
        return len(self.internal_edges) == 1

    def without_edge(self, e) -> "LabelledTree":
        e = frozenset(e)
        if e not in self.edges or len(e) < 2 or e == self.labels:
            raise DomainError("only a non-root internal edge can be contracted")
        return LabelledTree(self.labels, self.edges - {e})

    def relabel(self, mapping: Mapping) -> "LabelledTree":
        f = {k: mapping.get(k, k) for k in self.labels}
        if len(set(f.values())) != len(f):
            raise DomainError("relabelling is not injective")
        return LabelledTree(f.values(), [{f[x] for x in e} for e in self.edges])

    def __eq__(self, other):
        if not isinstance(other, LabelledTree):
            return NotImplemented
        return self.labels == other.labels and self.edges == other.edges

    def __hash__(self):
        return hash((self.labels, self.edges))

    def __lt__(self, other):
        return self.key() < other.key()

    def __repr__(self):
        es = sorted((g.sorted_labels(e) for e in self.edges if len(e) >= 2),
                    key=lambda e: (-len(e), [g.label_key(x) for x in e]))
        return f"LabelledTree({g.sorted_labels(self.labels)!r}, internal={es!r})"


def validate(edges: Iterable, labels: Iterable) -> LabelledTree:
    """Check the tree axioms and return the tree.

    Raises :class:`ValidationError` naming the offending edge or pair.
    """
    I = frozenset(labels)
    if len(I) < 2:
        raise ValidationError("a tree needs at least two labels", witness=sorted(I, key=g.label_key))
    es = {frozenset(e) for e in edges}
    for e in es:
        if not e:
            raise ValidationError("empty edge", witness=[])
        if not e <= I:
            raise ValidationError("edge uses labels outside the label set",
                                  witness=g.sorted_labels(e))
    if I not in es:
        raise ValidationError("missing root edge", witness=g.sorted_labels(I))
    for i in g.sorted_labels(I):
        if frozenset([i]) not in es:
            raise ValidationError(f"missing leaf {i!r}", witness=[i])
    ordered = sorted(es, key=lambda e: (len(e), edge_key(e)))
    for a in range(len(ordered)):
        for b in range(a + 1, len(ordered)):
            e, f = ordered[a], ordered[b]
            if e & f and not (e <= f or f <= e):
                raise ValidationError("edges neither nested nor disjoint",
                                      witness=[g.sorted_labels(e), g.sorted_labels(f)])
    tree = LabelledTree(I, es)
    for e in tree.internal_edges:
        if len(tree.children(e)) < 2:
            raise ValidationError("unary vertex", witness=g.sorted_labels(e))
    return tree


def corolla(labels: Iterable) -> LabelledTree:
    I = frozenset(labels)
    return validate([I] + [{i} for i in I], I)


def graft(T: LabelledTree, T2: LabelledTree, i) -> LabelledTree:
    """``T ∪_i T2``: plug the root of ``T2`` into leaf ``i`` of ``T``."""
    if i not in T.labels:
        raise DomainError(f"label {i!r} is not a leaf of the outer tree")
    J = T2.labels
    clash = (T.labels - {i}) & J
    if clash:
        raise DomainError(f"label collision in grafting: {g.sorted_labels(clash)!r}")
    edges = set(T2.edges)
    for e in T.edges:
        edges.add((e - {i}) | J if i in e else e)
    return LabelledTree((T.labels - {i}) | J, edges)


def decompose_along(T: LabelledTree, J, i):
    """Inverse of :func:`graft`: returns ``(outer, inner)`` with
    ``graft(outer, inner, i) == T``, or ``None`` when ``J`` is not a
    non-root internal edge of ``T`` (or ``i`` would collide)."""
    J = frozenset(J)
    if J not in T.edges or len(J) < 2 or J == T.labels:
        return None
    if i in T.labels - J:
        return None
    inner = LabelledTree(J, [e for e in T.edges if e <= J])
    outer_edges = []
    for e in T.edges:
        if e <= J:
            continue
        outer_edges.append((e - J) | {i} if J <= e else e)
    outer_edges.append({i})
    outer = LabelledTree((T.labels - J) | {i}, outer_edges)
    return outer, inner


def leq(T: LabelledTree, T2: LabelledTree) -> bool:
    """Poset relation witnessed by the identity bijection."""
    return T.labels == T2.labels and T.edges <= T2.edges


def is_morphism(T: LabelledTree, T2: LabelledTree, f: Mapping) -> bool:
    """Whether the bijection ``f`` sends every edge of ``T`` to an edge of ``T2``."""
    if set(f) != set(T.labels) or set(f.values()) != set(T2.labels) or len(set(f.values())) != len(f):
        return False
    return all(frozenset(f[x] for x in e) in T2.edges for e in T.edges)


# -- enumeration -----------------------------------------------------------

def _check_size(I):
    if len(I) > MAX_ENUM_LABELS:
        raise ResourceError(f"enumeration is limited to {MAX_ENUM_LABELS} labels, got {len(I)}")
    if len(I) < 2:
        raise DomainError("trees need at least two labels")


def _set_partitions(items: tuple):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [(first,) + part[k]] + part[k + 1:]
        yield [(first,)] + part


@lru_cache(maxsize=None)
def _nested_families(items: tuple) -> tuple:
    """All sets of internal edges (root included) of trees on ``items``."""
    out = []
    root = frozenset(items)
    for blocks in _set_partitions(items):
        if len(blocks) < 2:
            continue
        options = [[frozenset()]]
        for b in blocks:
            options.append(_nested_families(b) if len(b) >= 2 else (frozenset(),))
        acc = [frozenset([root])]
        for opts in options[1:]:
            acc = [a | o for a in acc for o in opts]
        out.extend(acc)
    return tuple(out)


def enumerate_trees(labels: Iterable) -> list:
    """All trees on ``labels`` in canonical order, built recursively by
    splitting the root into blocks and choosing a tree on each block."""
    I = frozenset(labels)
    _check_size(I)
    items = tuple(g.sorted_labels(I))
    leaves = [frozenset([i]) for i in items]
    trees = {LabelledTree(I, list(fam) + leaves) for fam in _nested_families(items)}
    return sorted(trees)


def enumerate_laminar(labels: Iterable) -> list:
    """Independent enumeration: every laminar family of proper subsets of
    size at least two, found by backtracking over candidate subsets."""
    I = frozenset(labels)
    _check_size(I)
    items = g.sorted_labels(I)
    n = len(items)
    candidates = []
    for mask in range(1, 1 << n):
        size = bin(mask).count("1")
        if 2 <= size < n:
            candidates.append(frozenset(items[k] for k in range(n) if mask >> k & 1))
    base = [I] + [frozenset([i]) for i in items]
    found = []

    def extend(start, chosen):
        found.append(LabelledTree(I, base + chosen))
        for k in range(start, len(candidates)):
            c = candidates[k]
            if all(not (c & e) or c <= e or e <= c for e in chosen):
                chosen.append(c)
                extend(k + 1, chosen)
                chosen.pop()

    extend(0, [])
    return sorted(found)
