"""Composition of covariant maps in terms of their parameter pairs / triples."""

import numpy as np

from .errors import DimMismatch, KindUnsupported
from .maps import CovariantMap, LduiPair, LdoiTriple, MapKind, embed_to_doc


def _same_dim(*objs):
    dims = {o.dim for o in objs}
    if len(dims) != 1:
        raise DimMismatch(f"cannot compose objects of dimensions {sorted(dims)}")


def _diag(M):
    return np.diag(np.diag(M))


def compose1(p1: LduiPair, p2: LduiPair) -> LduiPair:
    """``(A1 A2, B1 * B2.T + diag(A1 A2 - B1 * B2))``."""
    _same_dim(p1, p2)
    AA = p1.A @ p2.A
    return LduiPair(AA, p1.B * p2.B.T + _diag(AA - p1.B * p2.B))


def compose2(p1: LduiPair, p2: LduiPair) -> LduiPair:
    """``(A1 A2, B1 * B2 + diag(A1 A2 - B1 * B2))``."""
    _same_dim(p1, p2)
    AA = p1.A @ p2.A
    return LduiPair(AA, p1.B * p2.B + _diag(AA - p1.B * p2.B))


def compose_maps(m1: CovariantMap, m2: CovariantMap) -> CovariantMap:
    """The map ``m1 o m2`` (``m2`` acts first).

    Same kinds give a CDUC map, mixed kinds a DUC map; the pair rule is
    selected by the kind of ``m1``.
    """
    if MapKind.DOC in (m1.kind, m2.kind):
        raise KindUnsupported("compose_maps handles DUC/CDUC only; use compose_doc for triples")
    rule = compose1 if m1.kind is MapKind.DUC else compose2
    kind = MapKind.CDUC if m1.kind is m2.kind else MapKind.DUC
    return CovariantMap(kind, rule(m1.data, m2.data))


def compose_doc(t1: LdoiTriple, t2: LdoiTriple) -> LdoiTriple:
    """Triple of the composition of two DOC maps (``t2`` acts first)."""
    _same_dim(t1, t2)
    AA = t1.A @ t2.A
    corr = _diag(AA - 2 * t1.A * t2.A)
    B = t1.B * t2.B + t1.C * t2.C.T + corr
    C = t1.B * t2.C + t1.C * t2.B.T + corr
    return LdoiTriple(AA, B, C)


def as_doc(m: CovariantMap) -> LdoiTriple:
    return m.data if m.kind is MapKind.DOC else embed_to_doc(m.data, m.kind)


def compose_any(m1: CovariantMap, m2: CovariantMap) -> CovariantMap:
    """Compose maps of any kinds, embedding pairs as DOC triples when a DOC map is involved."""
    if MapKind.DOC in (m1.kind, m2.kind):
        return CovariantMap(MapKind.DOC, compose_doc(as_doc(m1), as_doc(m2)))
    return compose_maps(m1, m2)
