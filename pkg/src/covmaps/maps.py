"""Diagonal unitary / orthogonal covariant maps on ``d x d`` matrices.

A DUC or CDUC map is parameterized by a pair ``(A, B)`` with equal
diagonals, a DOC map by a triple ``(A, B, C)``. Their action is::

    DUC:   X -> diag(A diag(X)) + B~ * X.T
    CDUC:  X -> diag(A diag(X)) + B~ * X
    DOC:   X -> diag(A diag(X)) + B~ * X + C~ * X.T

where ``B~`` is ``B`` with its diagonal zeroed and ``*`` is entrywise.
"""

import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .errors import BadKind, DimMismatch
from .matrix_core import DEFAULT_TOL, Tolerances, as_matrix, maxabs
from .reports import PropertyReport, Verdict


class DiagonalCanonicalizationWarning(UserWarning):
    """Diagonal of ``B`` (or ``C``) disagreed with ``diag(A)`` and was overwritten."""


class MapKind(Enum):
    DUC = 1
    CDUC = 2
    DOC = 3

    @classmethod
    def parse(cls, value) -> "MapKind":
        if isinstance(value, MapKind):
            return value
        if isinstance(value, (int, np.integer)):
            return cls(int(value))
        text = str(value).strip().upper()
        if text.isdigit():
            return cls(int(text))
        try:
            return cls[text]
        except KeyError:
            raise BadKind(f"unknown map kind {value!r}") from None


def _canonical(A, other, name, tol):
    other = np.array(other, dtype=complex)
    diag = np.diag(A).astype(complex)
    mismatch = maxabs(np.diag(other) - diag)
    if mismatch > tol.eq_tol * (1.0 + maxabs(A)):
        warnings.warn(
            f"diag({name}) differs from diag(A) by {mismatch:.3g}; overwriting it",
            DiagonalCanonicalizationWarning,
            stacklevel=4,
        )
    np.fill_diagonal(other, diag)
    other.setflags(write=False)
    return other


def _frozen(M, name):
    M = np.array(as_matrix(M, name), dtype=complex)
    M.setflags(write=False)
    return M


@dataclass(frozen=True, eq=False)
class LduiPair:
    A: np.ndarray
    B: np.ndarray

    def __init__(self, A, B, tol: Tolerances = DEFAULT_TOL):
        A = _frozen(A, "A")
        B = as_matrix(B, "B")
        if B.shape != A.shape:
            raise DimMismatch(f"A is {A.shape} but B is {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", _canonical(A, B, "B", tol))

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def __iter__(self):
        return iter((self.A, self.B))

    def __repr__(self):
        return f"LduiPair(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class LdoiTriple:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __init__(self, A, B, C, tol: Tolerances = DEFAULT_TOL):
        A = _frozen(A, "A")
        B = as_matrix(B, "B")
        C = as_matrix(C, "C")
        if B.shape != A.shape or C.shape != A.shape:
            raise DimMismatch(f"shapes differ: A {A.shape}, B {B.shape}, C {C.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", _canonical(A, B, "B", tol))
        object.__setattr__(self, "C", _canonical(A, C, "C", tol))

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def __iter__(self):
        return iter((self.A, self.B, self.C))

    def __repr__(self):
        return f"LdoiTriple(dim={self.dim})"


@dataclass(frozen=True)
class CovariantMap:
    kind: MapKind
    data: Union[LduiPair, LdoiTriple]

    def __post_init__(self):
        kind = MapKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is MapKind.DOC and not isinstance(self.data, LdoiTriple):
            raise BadKind("a DOC map needs an LdoiTriple")
        if kind is not MapKind.DOC and not isinstance(self.data, LduiPair):
            raise BadKind(f"a {kind.name} map needs an LduiPair")

    @classmethod
    def duc(cls, A, B, tol=DEFAULT_TOL):
        return cls(MapKind.DUC, LduiPair(A, B, tol))

    @classmethod
    def cduc(cls, A, B, tol=DEFAULT_TOL):
        return cls(MapKind.CDUC, LduiPair(A, B, tol))

    @classmethod
    def doc(cls, A, B, C, tol=DEFAULT_TOL):
        return cls(MapKind.DOC, LdoiTriple(A, B, C, tol))

    @property
    def dim(self) -> int:
        return self.data.dim

    def __call__(self, X):
        return apply(self, X)


@dataclass(frozen=True, eq=False)
class ChoiMap:
    """An arbitrary linear map given by its Choi matrix ``sum_ij Phi(E_ij) (x) E_ij``.

    ``kind`` is the covariance class the map claims; it is only used by
    :func:`check_covariance`.
    """

    J: np.ndarray
    kind: MapKind

    def __post_init__(self):
        J = np.array(self.J, dtype=complex)
        d = int(round(np.sqrt(J.shape[0])))
        if J.ndim != 2 or J.shape != (d * d, d * d):
            raise DimMismatch(f"Choi matrix must be d^2 x d^2, got {J.shape}")
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "kind", MapKind.parse(self.kind))

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.J.shape[0])))


def offdiag(M) -> np.ndarray:
    M = np.array(M)
    np.fill_diagonal(M, 0)
    return M


def _check_dim(m, X):
    X = np.asarray(X)
    if X.shape != (m.dim, m.dim):
        raise DimMismatch(f"map acts on {m.dim}x{m.dim} matrices, got {X.shape}")
    return X


def apply(m, X) -> np.ndarray:
    """Action of a covariant (or raw Choi) map on the matrix ``X``."""
    X = _check_dim(m, X)
    if isinstance(m, ChoiMap):
        d = m.dim
        T = m.J.reshape(d, d, d, d)
        return np.einsum("aibj,ij->ab", T, X)
    data = m.data
    out = np.diag(data.A @ np.diag(X))
    if m.kind is MapKind.DUC:
        return out + offdiag(data.B) * X.T
    if m.kind is MapKind.CDUC:
        return out + offdiag(data.B) * X
    return out + offdiag(data.B) * X + offdiag(data.C) * X.T


def choi(m) -> np.ndarray:
    """Choi matrix ``J = sum_ij Phi(E_ij) (x) E_ij`` assembled from matrix units."""
    if isinstance(m, ChoiMap):
        return m.J.copy()
    d = m.dim
    J = np.zeros((d * d, d * d), dtype=complex)
    E = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            E[i, j] = 1.0
            J += np.kron(apply(m, E), E)
            E[i, j] = 0.0
    return J


def is_trace_preserving(m, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Column sums of ``A`` all equal one."""
    A = m.data.A
    return maxabs(A.sum(axis=0) - 1.0) <= tol.eq_tol * (1.0 + maxabs(A))


def embed_to_doc(pair: LduiPair, kind) -> LdoiTriple:
    """Triple with the same action: DUC -> (A, diag A, B), CDUC -> (A, B, diag A)."""
    kind = MapKind.parse(kind)
    dA = np.diag(np.diag(pair.A))
    if kind is MapKind.DUC:
        return LdoiTriple(pair.A, dA, pair.B)
    if kind is MapKind.CDUC:
        return LdoiTriple(pair.A, pair.B, dA)
    raise BadKind("only DUC and CDUC pairs embed into DOC triples")


def random_diagonal_group_element(kind: MapKind, d: int, rng) -> np.ndarray:
    """Diagonal of a random diagonal unitary (DUC/CDUC) or orthogonal (DOC)."""
    if kind is MapKind.DOC:
        return rng.choice([-1.0, 1.0], size=d).astype(complex)
    return np.exp(2j * np.pi * rng.random(d))


def ginibre(d: int, rng, cols: int = None) -> np.ndarray:
    cols = d if cols is None else cols
    return (rng.standard_normal((d, cols)) + 1j * rng.standard_normal((d, cols))) / np.sqrt(2)


def covariance_residuals(m, u, X):
    """Residuals of the defining covariance identity and of the Choi invariance
    identity for a diagonal group element with diagonal ``u``."""
    U = np.diag(u)
    Uh = U.conj().T
    lhs = apply(m, U @ X @ Uh)
    J = choi(m)
    if m.kind is MapKind.DUC:
        rhs = Uh @ apply(m, X) @ U
        L, R = np.kron(U, U), np.kron(Uh, Uh)
    elif m.kind is MapKind.CDUC:
        rhs = U @ apply(m, X) @ Uh
        L, R = np.kron(U, Uh), np.kron(Uh, U)
    else:
        rhs = U @ apply(m, X) @ U
        L, R = np.kron(U, U), np.kron(U, U)
    return maxabs(lhs - rhs), maxabs(L @ J @ R - J)


def check_covariance(m, samples: int = 32, seed: int = 0, tol: Tolerances = DEFAULT_TOL) -> PropertyReport:
    """Randomized check of the covariance identity for the map's kind.

    Sample ``s`` draws from a generator seeded with ``(seed, s)``.
    """
    d = m.dim
    worst_action = worst_choi = 0.0
    witness = None
    scale = 1.0 + maxabs(choi(m))
    for s in range(samples):
        rng = np.random.default_rng([seed, s])
        u = random_diagonal_group_element(m.kind, d, rng)
        X = ginibre(d, rng)
        r_act, r_choi = covariance_residuals(m, u, X)
        r_act /= 1.0 + maxabs(X)
        if witness is None and max(r_act, r_choi) > tol.eq_tol * scale:
            witness = {"sample": s, "U_diagonal": u, "action_residual": r_act, "choi_residual": r_choi}
        worst_action = max(worst_action, r_act)
        worst_choi = max(worst_choi, r_choi)
    verdict = Verdict.FAILS if witness else Verdict.HOLDS
    return PropertyReport(
        f"{m.kind.name}-covariance",
        verdict,
        witness,
        max(worst_action, worst_choi),
        {"action_residual": worst_action, "choi_residual": worst_choi, "samples": samples, "seed": seed},
    )
