"""Dense matrix primitives: cone membership tests, comparison matrices,
support graphs, a Hermitian Jacobi eigensolver and Perron power iteration.

Matrices are plain ``numpy`` arrays (complex or real). Every routine is a
pure function of its arguments.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotHermitian, NotIrreducible, NotNonnegative


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances.

    ``psd_tol`` and ``eq_tol`` are relative, ``zero_tol`` is absolute.
    """

    psd_tol: float = 1e-9
    eq_tol: float = 1e-10
    zero_tol: float = 1e-12

    def __post_init__(self):
        for name in ("psd_tol", "eq_tol", "zero_tol"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")


DEFAULT_TOL = Tolerances()


def as_matrix(M, name="matrix") -> np.ndarray:
    """Validate ``M`` as a finite square matrix and return it as an ndarray."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    if not np.iscomplexobj(M):
        M = M.astype(float)
    return M


def maxabs(M) -> float:
    M = np.asarray(M)
    return float(np.max(np.abs(M))) if M.size else 0.0


def support(v, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Indices of the entries of ``v`` with modulus above ``zero_tol``."""
    return np.flatnonzero(np.abs(np.asarray(v)) > tol.zero_tol)


def support_size(v, tol: Tolerances = DEFAULT_TOL) -> int:
    return int(support(v, tol).size)


def is_hermitian(M, tol: Tolerances = DEFAULT_TOL) -> bool:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    return maxabs(M - M.conj().T) <= tol.eq_tol * (1.0 + maxabs(M))


def is_ewp(M, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Entrywise non-negative: every entry real (up to ``zero_tol``) and >= 0."""
    M = np.asarray(M)
    return bool(np.all(np.abs(M.imag) <= tol.zero_tol) and np.all(M.real >= -tol.zero_tol))


def jacobi_eigh(H, tol: Tolerances = DEFAULT_TOL, max_sweeps: int = 100):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, V)`` with ascending eigenvalues ``w`` and ``H V = V diag(w)``.
    """
    H = as_matrix(H)
    if not is_hermitian(H, tol):
        raise NotHermitian("jacobi_eigh needs a hermitian matrix")
    n = H.shape[0]
    H = (0.5 * (H + H.conj().T)).astype(complex)
    V = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(H), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.linalg.norm(H - np.diag(np.diag(H)))
        if off <= np.finfo(float).eps * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                h = H[p, q]
                habs = abs(h)
                if habs <= np.finfo(float).eps * 1e-3 * scale:
                    continue
                e = h / habs
                theta = (H[q, q].real - H[p, p].real) / (2.0 * habs)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                R = np.array([[c, s * e], [-s * np.conj(e), c]])
                idx = [p, q]
                H[:, idx] = H[:, idx] @ R
                H[idx, :] = R.conj().T @ H[idx, :]
                H[p, q] = H[q, p] = 0.0
                V[:, idx] = V[:, idx] @ R
    else:
        raise NoConvergence(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")
    w = np.diag(H).real
    order = np.argsort(w)
    return w[order], V[:, order]


def hermitian_eig(M, tol: Tolerances = DEFAULT_TOL, method: str = "lapack"):
    """Ascending eigenvalues and eigenvectors of a hermitian matrix."""
    M = as_matrix(M)
    if not is_hermitian(M, tol):
        raise NotHermitian("matrix is not hermitian")
    if method == "jacobi":
        return jacobi_eigh(M, tol)
    if method == "lapack":
        return np.linalg.eigh(0.5 * (M + M.conj().T))
    raise ValueError(f"unknown eigensolver {method!r}")


def psd_margin(M, tol: Tolerances = DEFAULT_TOL, method: str = "lapack"):
    """Return ``(lambda_min, lambda_max, eigenvector_of_lambda_min)``."""
    w, V = hermitian_eig(M, tol, method)
    return float(w[0]), float(w[-1]), V[:, 0]


def is_psd(M, tol: Tolerances = DEFAULT_TOL, method: str = "lapack") -> bool:
    lmin, lmax, _ = psd_margin(M, tol, method)
    return lmin >= -tol.psd_tol * max(1.0, lmax)


def comparison_matrix(M, k: int = 1) -> np.ndarray:
    """``k |M_ii|`` on the diagonal and ``-|M_ij|`` off it (real output)."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    A = np.abs(np.asarray(M, dtype=complex))
    C = -A
    np.fill_diagonal(C, k * np.diag(A))
    return C


def dd_slack(M) -> np.ndarray:
    """Per-index slack ``min(row, column)`` of diagonal dominance; >= 0 means DD."""
    A = np.abs(np.asarray(M))
    d = np.diag(A)
    rows = A.sum(axis=1) - d
    cols = A.sum(axis=0) - d
    return d - np.maximum(rows, cols)


def is_diagonally_dominant(M, tol: Tolerances = DEFAULT_TOL, slack: float = None) -> bool:
    """Row and column diagonal dominance up to an absolute ``slack`` (default ``zero_tol``)."""
    if slack is None:
        slack = tol.zero_tol
    return bool(np.all(dd_slack(M) >= -slack))


def support_components(M, tol: Tolerances = DEFAULT_TOL) -> list:
    """Connected components of the off-diagonal support graph of ``M``.

    Indices are 0-based; each component is a sorted list and components are
    ordered by their smallest index.
    """
    A = np.abs(np.asarray(M))
    n = A.shape[0]
    adj = (A > tol.zero_tol) | (A.T > tol.zero_tol)
    np.fill_diagonal(adj, False)
    seen = np.zeros(n, dtype=bool)
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        stack, comp = [start], []
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in np.flatnonzero(adj[i] & ~seen):
                seen[j] = True
                stack.append(int(j))
        comps.append(sorted(comp))
    return comps


def perron(P, tol: Tolerances = DEFAULT_TOL, max_iter: int = None):
    """Perron root and positive unit eigenvector of a symmetric, irreducible,
    entrywise non-negative matrix, by power iteration on ``P + eps I``.

    Raises :class:`NoConvergence` when the iteration cap is hit.
    """
    P = as_matrix(P, "P")
    if not is_ewp(P, tol):
        raise NotNonnegative("Perron iteration needs an entrywise non-negative matrix")
    if not is_hermitian(P, tol):
        raise NotHermitian("Perron iteration needs a symmetric matrix")
    P = np.real(P)
    P = 0.5 * (P + P.T)
    n = P.shape[0]
    if len(support_components(P, tol)) != 1:
        raise NotIrreducible("matrix is reducible; split it with support_components first")
    if n == 1:
        return float(P[0, 0]), np.ones(1)
    if max_iter is None:
        max_iter = 100 * n
    shift = 1e-3 * maxabs(P)
    S = P + shift * np.eye(n)
    x = np.full(n, 1.0 / np.sqrt(n))
    rho_prev = np.inf
    for _ in range(max_iter):
        y = S @ x
        # x is a unit vector, so x.Sx - shift is the Rayleigh quotient of P
        rho = float(x @ y) - shift
        if abs(rho - rho_prev) <= 1e-13 * (1.0 + abs(rho)):
            r = y - (rho + shift) * x
            if np.sqrt(r @ r) <= tol.eq_tol * (1.0 + abs(rho)):
                if np.min(x) <= 0:
                    raise NoConvergence("power iteration produced a non-positive Perron vector")
                return rho, x
        rho_prev = rho
        x = y / np.sqrt(y @ y)
    raise NoConvergence(f"power iteration did not converge in {max_iter} iterations")


def perron_eigh(P, tol: Tolerances = DEFAULT_TOL, strict: bool = True):
    """Perron pair from a full symmetric eigensolve (fallback for slow power iteration).

    With ``strict=False`` entries that round to zero are returned as zero
    instead of raising.
    """
    P = np.real(as_matrix(P, "P"))
    P = 0.5 * (P + P.T)
    w, V = np.linalg.eigh(P)
    p = V[:, -1]
    p = p * np.sign(p[np.argmax(np.abs(p))])
    p = np.abs(p)
    if strict and np.min(p) <= 0:
        raise NoConvergence("eigensolver Perron vector is not strictly positive")
    return float(w[-1]), p / np.linalg.norm(p)


def partial_transpose(J, d: int, subsystem: int = 1) -> np.ndarray:
    """Partial transpose of a ``d^2 x d^2`` bipartite matrix on factor 0 or 1."""
    T = np.asarray(J).reshape(d, d, d, d)
    if subsystem == 1:
        T = T.transpose(0, 3, 2, 1)
    elif subsystem == 0:
        T = T.transpose(2, 1, 0, 3)
    else:
        raise ValueError("subsystem must be 0 or 1")
    return T.reshape(d * d, d * d)
