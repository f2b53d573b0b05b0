import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from covmaps.composition import compose1, compose2, compose_any, compose_doc, compose_maps
from covmaps.cones import check_ppt
from covmaps.engine import random_ppt_doc_triple, random_ppt_pair
from covmaps.errors import DimMismatch, KindUnsupported
from covmaps.maps import CovariantMap, LduiPair, LdoiTriple, MapKind, apply, embed_to_doc, ginibre, offdiag

from conftest import I3, J3


def same(p, q):
    return all(np.allclose(X, Y, atol=1e-12) for X, Y in zip(p, q))


def rand_pair(rng, d):
    A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return LduiPair(A, offdiag(ginibre(d, rng)) + np.diag(np.diag(A)))


def rand_triple(rng, d):
    A = rng.standard_normal((d, d))
    dA = np.diag(np.diag(A))
    return LdoiTriple(A, offdiag(ginibre(d, rng)) + dA, offdiag(ginibre(d, rng)) + dA)


def test_compose1_examples(rng):
    assert same(compose1(LduiPair(I3, I3), LduiPair(I3, I3)), (I3, I3))
    assert same(compose1(LduiPair(I3, J3), LduiPair(I3, J3)), (I3, J3))
    p1, p2 = rand_pair(rng, 4), rand_pair(rng, 4)
    assert same(compose1(p1, p2), compose2(p1, LduiPair(p2.A, p2.B.T)))


def test_compose2_examples():
    assert same(compose2(LduiPair(I3, J3), LduiPair(I3, J3)), (I3, J3))
    assert same(compose2(LduiPair(J3, J3), LduiPair(J3, J3)), (3 * J3, J3 + 2 * I3))
    assert same(compose2(LduiPair(I3, I3), LduiPair(I3, J3)), (I3, I3))


def test_dimension_mismatch():
    with pytest.raises(DimMismatch):
        compose2(LduiPair(I3, I3), LduiPair(np.eye(2), np.eye(2)))
    with pytest.raises(DimMismatch):
        compose_doc(LdoiTriple(I3, I3, I3), LdoiTriple(np.eye(2), np.eye(2), np.eye(2)))


def test_kind_algebra():
    ident = CovariantMap.cduc(I3, J3)
    out = compose_maps(ident, ident)
    assert out.kind is MapKind.CDUC and same(out.data, (I3, J3))
    out = compose_maps(CovariantMap.duc(I3, I3), ident)
    assert out.kind is MapKind.DUC and same(out.data, (I3, I3))
    table = {(1, 1): 2, (1, 2): 1, (2, 1): 1, (2, 2): 2}
    for (i, j), k in table.items():
        m = compose_maps(CovariantMap(MapKind(i), LduiPair(J3, J3)), CovariantMap(MapKind(j), LduiPair(J3, J3)))
        assert m.kind is MapKind(k)


def test_compose_maps_refuses_doc():
    with pytest.raises(KindUnsupported):
        compose_maps(CovariantMap.doc(I3, I3, I3), CovariantMap.cduc(I3, J3))


def test_compose_doc_examples(rng):
    assert same(compose_doc(LdoiTriple(I3, I3, I3), LdoiTriple(I3, I3, I3)), (I3, I3, I3))
    p1, p2 = rand_pair(rng, 4), rand_pair(rng, 4)
    lhs = compose_doc(embed_to_doc(p1, MapKind.CDUC), embed_to_doc(p2, MapKind.CDUC))
    assert same(lhs, embed_to_doc(compose2(p1, p2), MapKind.CDUC))
    t1, t2 = rand_triple(rng, 4), rand_triple(rng, 4)
    comp = CovariantMap(MapKind.DOC, compose_doc(t1, t2))
    m1, m2 = CovariantMap(MapKind.DOC, t1), CovariantMap(MapKind.DOC, t2)
    for _ in range(100):
        X = ginibre(4, rng)
        assert np.linalg.norm(apply(comp, X) - m1(m2(X))) <= 1e-10 * (1 + np.linalg.norm(X)) * 100


def test_compose_any_embeds(rng):
    p = rand_pair(rng, 3)
    t = rand_triple(rng, 3)
    m_pair, m_doc = CovariantMap(MapKind.DUC, p), CovariantMap(MapKind.DOC, t)
    out = compose_any(m_doc, m_pair)
    assert out.kind is MapKind.DOC
    X = ginibre(3, rng)
    assert np.allclose(out(X), m_doc(m_pair(X)))
    assert compose_any(m_pair, m_pair).kind is MapKind.CDUC


def _scale(*objs):
    return np.prod([1 + max(np.linalg.norm(M) for M in o) for o in objs])


@settings(deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6), st.integers(1, 2), st.integers(1, 2))
def test_functional_soundness(seed, d, i, j):
    rng = np.random.default_rng(seed)
    p1, p2 = rand_pair(rng, d), rand_pair(rng, d)
    m1, m2 = CovariantMap(MapKind(i), p1), CovariantMap(MapKind(j), p2)
    comp = compose_maps(m1, m2)
    for _ in range(5):
        X = ginibre(d, rng)
        err = np.linalg.norm(comp(X) - m1(m2(X)))
        assert err <= 1e-10 * _scale(p1, p2) * (1 + np.linalg.norm(X))


@settings(deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6))
def test_doc_functional_soundness(seed, d):
    rng = np.random.default_rng(seed)
    t1, t2 = rand_triple(rng, d), rand_triple(rng, d)
    comp = CovariantMap(MapKind.DOC, compose_doc(t1, t2))
    assert np.array_equal(np.diag(comp.data.B), np.diag(comp.data.A))
    X = ginibre(d, rng)
    want = apply(CovariantMap(MapKind.DOC, t1), apply(CovariantMap(MapKind.DOC, t2), X))
    assert np.linalg.norm(comp(X) - want) <= 1e-10 * _scale(t1, t2) * (1 + np.linalg.norm(X))


@given(st.integers(0, 10_000), st.integers(1, 6))
def test_compose2_associative_on_action(seed, d):
    rng = np.random.default_rng(seed)
    p, q, r = (rand_pair(rng, d) for _ in range(3))
    left = CovariantMap(MapKind.CDUC, compose2(compose2(p, q), r))
    right = CovariantMap(MapKind.CDUC, compose2(p, compose2(q, r)))
    X = ginibre(d, rng)
    assert np.linalg.norm(left(X) - right(X)) <= 1e-10 * _scale(p, q, r) * (1 + np.linalg.norm(X))


@given(st.integers(0, 10_000), st.integers(1, 6))
def test_diagonal_bookkeeping(seed, d):
    rng = np.random.default_rng(seed)
    for rule in (compose1, compose2):
        out = rule(rand_pair(rng, d), rand_pair(rng, d))
        assert np.array_equal(np.diag(out.B), np.diag(out.A))


@settings(deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 7), st.integers(1, 2), st.integers(1, 2))
def test_ppt_closure(seed, d, i, j):
    m1 = CovariantMap(MapKind(i), random_ppt_pair(d, [seed, 1]))
    m2 = CovariantMap(MapKind(j), random_ppt_pair(d, [seed, 2]))
    assert check_ppt(compose_maps(m1, m2)).holds


@settings(deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6))
def test_doc_ppt_closure(seed, d):
    t1, t2 = random_ppt_doc_triple(d, [seed, 1]), random_ppt_doc_triple(d, [seed, 2])
    assert check_ppt(CovariantMap(MapKind.DOC, compose_doc(t1, t2))).holds
