"""Cone membership for matrix pairs and triples.

Covers the CP / coCP / PPT criteria for covariant maps, the necessary
conditions for PCP and TCP membership, and the constructive factor-width-2
machinery: a Perron scaling ``D`` that makes ``D B D`` diagonally dominant,
and an explicit PCP decomposition with vectors supported on at most two
coordinates.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DecompositionFailure, NoConvergence, NotDD, NotFactorWidth2, NotHermitian, NotIrreducible
from .maps import LduiPair, LdoiTriple, MapKind
from .matrix_core import (
    DEFAULT_TOL,
    Tolerances,
    comparison_matrix,
    dd_slack,
    is_ewp,
    is_hermitian,
    maxabs,
    perron,
    perron_eigh,
    psd_margin,
    support_components,
)
from .reports import PropertyReport, Verdict, combine


# -- elementary checks ---------------------------------------------------------

def _ewp_report(name, A, tol):
    A = np.asarray(A)
    if is_ewp(A, tol):
        return PropertyReport(f"{name} in EWP", Verdict.HOLDS)
    bad = np.argwhere((np.abs(A.imag) > tol.zero_tol) | (A.real < -tol.zero_tol))[0]
    i, j = int(bad[0]), int(bad[1])
    return PropertyReport(f"{name} in EWP", Verdict.FAILS, {"index": [i, j], "value": A[i, j]})


def _hermitian_report(name, B, tol):
    B = np.asarray(B)
    if is_hermitian(B, tol):
        return PropertyReport(f"{name} hermitian", Verdict.HOLDS)
    diff = np.abs(B - B.conj().T)
    i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
    return PropertyReport(f"{name} hermitian", Verdict.FAILS, {"index": [int(i), int(j)]}, float(diff[i, j]))


def _psd_report(name, B, tol):
    if not is_hermitian(B, tol):
        return _hermitian_report(name, B, tol)
    lmin, lmax, vec = psd_margin(B, tol)
    if lmin >= -tol.psd_tol * max(1.0, lmax):
        return PropertyReport(f"{name} in PSD", Verdict.HOLDS, None, 0.0, {"lambda_min": lmin})
    return PropertyReport(
        f"{name} in PSD", Verdict.FAILS, {"eigenvalue": lmin, "eigenvector": vec}, -lmin, {"lambda_min": lmin}
    )


def _entrywise_report(A, names, mats, tol):
    """``A_ij A_ji >= |M_ij|^2`` for every ``M`` in ``mats`` and ``i != j``."""
    A = np.real(np.asarray(A))
    prod = A * A.T
    label = "A_ij A_ji >= " + " , ".join(f"|{n}_ij|^2" for n in names)
    worst = 0.0
    for name, M in zip(names, mats):
        sq = np.abs(np.asarray(M)) ** 2
        viol = sq - prod
        np.fill_diagonal(viol, -np.inf)
        allowed = tol.eq_tol * (1.0 + prod + sq)
        excess = viol - allowed
        i, j = np.unravel_index(int(np.argmax(excess)), excess.shape)
        if excess[i, j] > 0:
            return PropertyReport(
                label, Verdict.FAILS, {"index": [int(i), int(j)], "matrix": name, "A_ij*A_ji": prod[i, j],
                                       f"|{name}_ij|^2": sq[i, j]}, float(viol[i, j]))
        worst = max(worst, float(np.max(viol)))
    return PropertyReport(label, Verdict.HOLDS, None, max(worst, 0.0))


# -- map properties ------------------------------------------------------------

def _cp_parts(kind, data, tol, transposed):
    """Criteria for CP (``transposed=False``) or coCP (``transposed=True``)."""
    A = data.A
    if kind is MapKind.DOC:
        _, B, C = data
        if transposed:
            B, C = C, B
            nb, nc = "C", "B"
        else:
            nb, nc = "B", "C"
        return [_ewp_report("A", A, tol), _psd_report(nb, B, tol), _hermitian_report(nc, C, tol),
                _entrywise_report(A, [nc], [C], tol)]
    B = data.B
    # CP of a CDUC map and coCP of a DUC map need B PSD; the other two need the entrywise bound.
    spectral = (kind is MapKind.CDUC) != transposed
    if spectral:
        return [_ewp_report("A", A, tol), _psd_report("B", B, tol)]
    return [_ewp_report("A", A, tol), _hermitian_report("B", B, tol), _entrywise_report(A, ["B"], [B], tol)]


def check_cp(m, tol: Tolerances = DEFAULT_TOL) -> PropertyReport:
    return combine("completely positive", _cp_parts(m.kind, m.data, tol, False), {"kind": m.kind.name})


def check_ccp(m, tol: Tolerances = DEFAULT_TOL) -> PropertyReport:
    return combine("completely copositive", _cp_parts(m.kind, m.data, tol, True), {"kind": m.kind.name})


def check_ppt(m, tol: Tolerances = DEFAULT_TOL) -> PropertyReport:
    if m.kind is MapKind.DOC:
        A, B, C = m.data
        parts = [_ewp_report("A", A, tol), _psd_report("B", B, tol), _psd_report("C", C, tol),
                 _entrywise_report(A, ["B", "C"], [B, C], tol)]
    else:
        A, B = m.data
        parts = [_ewp_report("A", A, tol), _psd_report("B", B, tol), _entrywise_report(A, ["B"], [B], tol)]
    return combine("PPT", parts, {"kind": m.kind.name})


def pcp_necessary(pair: LduiPair, tol: Tolerances = DEFAULT_TOL) -> PropertyReport:
    """Necessary conditions for PCP. ``holds`` does not certify membership."""
    A, B = pair
    parts = [_ewp_report("A", A, tol), _psd_report("B", B, tol), _entrywise_report(A, ["B"], [B], tol)]
    return combine("PCP necessary conditions", parts)


def necessary_factor_width_k(B, k: int, tol: Tolerances = DEFAULT_TOL) -> PropertyReport:
    """``M_{k-1}(B)`` PSD; failure certifies factor width greater than ``k``."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if not is_hermitian(B, tol):
        raise NotHermitian("factor width is defined for hermitian matrices")
    rep = _psd_report(f"M_{k - 1}(B)", comparison_matrix(B, k - 1), tol)
    rep.name = f"factor width <= {k} necessary condition"
    rep.details["k"] = k
    return rep


def tcp_necessary(triple: LdoiTriple, k: int = None, tol: Tolerances = DEFAULT_TOL) -> PropertyReport:
    """Necessary conditions for ``(A, B, C)`` in TCP^k (``k`` defaults to the dimension).

    A ``holds`` verdict only means "not refuted".
    """
    A, B, C = triple
    k = triple.dim if k is None else k
    parts = [pcp_necessary(LduiPair(A, B), tol), pcp_necessary(LduiPair(A, C), tol)]
    parts[0].name, parts[1].name = "(A,B) PCP necessary", "(A,C) PCP necessary"
    for name, M in (("B", B), ("C", C)):
        if k >= 2 and is_hermitian(M, tol):
            r = necessary_factor_width_k(M, k, tol)
            r.name = f"M_{k - 1}({name}) PSD"
            parts.append(r)
    return combine("TCP necessary conditions", parts, {"k": k})


# -- factor width two ------------------------------------------------------------

@dataclass
class ScalingCertificate:
    """Positive diagonal ``D`` with ``D B D`` diagonally dominant."""

    D: np.ndarray
    component_partition: list
    min_eigenvalue: float = 0.0
    dd_tolerance: float = 0.0
    details: dict = field(default_factory=dict)

    def scaled(self, M) -> np.ndarray:
        return self.D[:, None] * np.asarray(M) * self.D[None, :]

    def check(self, B) -> bool:
        return bool(np.all(self.D > 0)) and bool(np.all(dd_slack(self.scaled(B)) >= -self.dd_tolerance))


def _perron_scaling(Bc, root, tol):
    """Perron vector of ``s I - M(B)`` for ``B = Bc / (root root^T)``, mapped back and refined."""
    n = Bc.shape[0]
    Bn = Bc / np.outer(root, root)
    M = comparison_matrix(Bn, 1)
    s = float(np.max(np.diag(M)))
    P = s * np.eye(n) - M
    P[P < 0] = 0.0
    try:
        _, p = perron(P, tol)
        method = "power"
    except (NoConvergence, NotIrreducible):
        # NotIrreducible: normalization pushed a coupling just under zero_tol
        _, p = perron_eigh(P, tol, strict=False)
        method = "eigh"
    C = p[:, None] * np.abs(Bn) * p[None, :]
    if np.min(dd_slack(C)) < -_dd_tolerance(Bn, s, tol) and method == "power":
        _, p = perron_eigh(P, tol, strict=False)
        method = "eigh"
    p = p / root
    return _refine_scaling(Bc, p / np.max(p)), method


def _rows_dominant(Bc, p, tol):
    """Row dominance of ``D B D`` measured relative to each row's own size."""
    N = np.abs(Bc) * p[None, :]
    diag = np.diag(N) * 1.0
    off = N.sum(axis=1) - diag
    return bool(np.all(diag - off >= -tol.eq_tol * (diag + off)))


def _component_scaling(Bc, tol):
    """Perron scaling for one irreducible block; entries normalized to max 1.

    When the diagonal of ``B`` spans many decades the Perron vector of
    ``s I - M(B)`` loses its small entries; the block is then normalized to
    unit diagonal (a diagonal congruence, which preserves factor width) and
    the Perron vector recomputed.
    """
    n = Bc.shape[0]
    if n == 1:
        return np.ones(1), "trivial"
    p, method = _perron_scaling(Bc, np.ones(n), tol)
    root = np.sqrt(np.abs(np.diag(Bc)))
    if not _rows_dominant(Bc, p, tol) and np.all(root > 0):
        p, method = _perron_scaling(Bc, root, tol)
        method += "+normalized"
    return p, method


def _refine_scaling(Bc, p, sweeps: int = None):
    """Raise ``p_i`` to ``sum_j |B_ij| p_j / |B_ii|`` wherever row ``i`` of
    ``D B D`` is not dominant.

    Eigensolvers resolve ``p`` only to normwise accuracy, so entries many
    decades below the largest can be pure noise. Sweeping from the largest
    entry down rebuilds each small entry from its (accurate) larger
    neighbours without cancellation. ``p`` only ever increases.
    """
    N = np.abs(Bc)
    diag = np.diag(N).copy()
    np.fill_diagonal(N, 0.0)
    live = np.flatnonzero(diag > 0)
    p = np.maximum(p, 0.0)
    if sweeps is None:
        sweeps = 10 * len(diag) + 10
    for _ in range(sweeps):
        changed = False
        for i in live[np.argsort(-p[live], kind="stable")]:
            need = (N[i] @ p) / diag[i]
            if need > p[i]:
                p[i] = need
                changed = True
        if not changed:
            break
    return p / np.max(p)


def _dd_tolerance(B, lmax, tol):
    return tol.zero_tol + tol.psd_tol * max(1.0, lmax) + tol.eq_tol * maxabs(B)


def factor_width2_scaling(B, tol: Tolerances = DEFAULT_TOL) -> ScalingCertificate:
    """Decide whether hermitian ``B`` has factor width at most two.

    Returns a :class:`ScalingCertificate` on success and raises
    :class:`NotFactorWidth2` (carrying the negative eigenpair of ``M(B)``)
    otherwise.
    """
    B = np.asarray(B)
    if not is_hermitian(B, tol):
        raise NotHermitian("factor width is defined for hermitian matrices")
    M = comparison_matrix(B, 1)
    lmin, lmax, vec = psd_margin(M, tol)
    if lmin < -tol.psd_tol * max(1.0, lmax):
        raise NotFactorWidth2(f"M(B) has eigenvalue {lmin:.6g} < 0", lmin, vec)
    D = np.ones(B.shape[0])
    comps = support_components(B, tol)
    methods = []
    for comp in comps:
        D[comp], method = _component_scaling(B[np.ix_(comp, comp)], tol)
        methods.append(method)
    cert = ScalingCertificate(D, comps, lmin, _dd_tolerance(B, lmax, tol), {"perron_methods": methods})
    if not cert.check(B):
        raise NoConvergence("Perron scaling failed to make D B D diagonally dominant")
    return cert


def decompose_dd_psd2(B, tol: Tolerances = DEFAULT_TOL, slack: float = None, support=None) -> list:
    """Rank-one vectors with support size <= 2 summing (as ``v v^*``) to a
    hermitian diagonally dominant ``B``.

    ``support`` is an optional boolean mask of the off-diagonal entries to
    treat as nonzero (default ``|B_ij| > zero_tol``); pass it when ``B`` is a
    rescaled matrix whose small entries are still meaningful.
    """
    B = np.asarray(B, dtype=complex)
    if not is_hermitian(B, tol):
        raise NotHermitian("B must be hermitian")
    if slack is None:
        slack = tol.zero_tol
    res = dd_slack(B)
    if np.any(res < -slack):
        raise NotDD(f"B is not diagonally dominant (worst slack {np.min(res):.3g})")
    d = B.shape[0]
    mask = np.abs(B) > tol.zero_tol if support is None else np.asarray(support, dtype=bool)
    vectors = []
    for i in range(d):
        for j in range(i + 1, d):
            b = B[i, j]
            if not mask[i, j] or b == 0:
                continue
            v = np.zeros(d, dtype=complex)
            v[i] = np.sqrt(abs(b)) * b / abs(b)
            v[j] = np.sqrt(abs(b))
            vectors.append(v)
    offmass = np.where(mask | mask.T, np.abs(B), 0.0)
    np.fill_diagonal(offmass, 0.0)
    rest = np.real(np.diag(B)) - offmass.sum(axis=1)
    for i in range(d):
        if rest[i] > (tol.zero_tol if support is None else 0.0):
            v = np.zeros(d, dtype=complex)
            v[i] = np.sqrt(rest[i])
            vectors.append(v)
    return vectors


def psd2_decompose(B, tol: Tolerances = DEFAULT_TOL) -> list:
    """Vectors ``v_n`` with at most two nonzero entries and ``sum v_n v_n^* = B``.

    Scales ``B`` with :func:`factor_width2_scaling`, splits the diagonally
    dominant result and undoes the scaling. Raises :class:`NotFactorWidth2`
    when no such vectors exist.
    """
    B = np.asarray(B, dtype=complex)
    cert = factor_width2_scaling(B, tol)
    vectors = decompose_dd_psd2(cert.scaled(B), tol, slack=cert.dd_tolerance, support=np.abs(B) > tol.zero_tol)
    vectors = [v / cert.D for v in vectors]
    R = sum((np.outer(v, v.conj()) for v in vectors), np.zeros_like(B))
    err = float(np.linalg.norm(R - B))
    if err > 1e-8 * (1.0 + np.linalg.norm(B)):
        raise NoConvergence(f"width-2 reconstruction is off by {err:.3g}")
    return vectors


class PcpDecomposition:
    """Vector pairs ``(v_n, w_n)`` with

    ``A = sum |v_n * conj(v_n)><w_n * conj(w_n)|`` and ``B = sum |v_n * w_n><v_n * w_n|``.
    """

    def __init__(self, V, W, tol: Tolerances = DEFAULT_TOL):
        V = np.atleast_2d(np.asarray(V, dtype=complex))
        W = np.atleast_2d(np.asarray(W, dtype=complex))
        if V.shape != W.shape:
            raise ValueError("v and w stacks must have the same shape")
        self.V, self.W = V, W
        self.scaling = None
        self.width = self.actual_width(tol) if V.size else 0

    @classmethod
    def from_pairs(cls, pairs, dim, tol: Tolerances = DEFAULT_TOL):
        pairs = list(pairs)
        if not pairs:
            return cls(np.zeros((0, dim)), np.zeros((0, dim)), tol)
        return cls([p[0] for p in pairs], [p[1] for p in pairs], tol)

    @property
    def dim(self) -> int:
        return self.V.shape[1]

    @property
    def vector_pairs(self) -> list:
        return list(zip(self.V, self.W))

    def __len__(self):
        return self.V.shape[0]

    def actual_width(self, tol: Tolerances = DEFAULT_TOL) -> int:
        if not len(self):
            return 0
        return int(np.max(np.sum(np.abs(self.V * self.W) > tol.zero_tol, axis=1)))

    def reconstruct(self):
        """The pair ``(A, B)`` generated by the vectors."""
        Va, Wa = np.abs(self.V) ** 2, np.abs(self.W) ** 2
        X = self.V * self.W
        return Va.T @ Wa, X.T @ X.conj()

    def terms(self):
        """Per-vector contributions ``(A_n, B_n)``."""
        for v, w in self.vector_pairs:
            x = v * w
            yield np.outer(np.abs(v) ** 2, np.abs(w) ** 2), np.outer(x, x.conj())

    def drop(self, index: int) -> "PcpDecomposition":
        keep = [n for n in range(len(self)) if n != index]
        out = PcpDecomposition(self.V[keep], self.W[keep])
        out.width = self.width
        return out


def _two_by_two_pcp(i, j, a_ij, a_ji, b, d, zero_tol):
    """PCP vectors for the pair ``([[|b|, a_ij], [a_ji, |b|]], [[|b|, b], [conj b, |b|]])``
    placed on coordinates ``(i, j)``."""
    out = []

    def unit_pair(k, l, mass):
        v = np.zeros(d, dtype=complex)
        w = np.zeros(d, dtype=complex)
        v[k] = np.sqrt(mass)
        w[l] = 1.0
        return v, w

    beta = abs(b)
    if beta <= zero_tol:
        x_ij = x_ji = 0.0
    else:
        # geometric mean lies in [beta^2 / a_ji, a_ij] whenever a_ij a_ji >= beta^2
        x_ij = beta * np.sqrt(a_ij / a_ji) if a_ij > 0 and a_ji > 0 else beta
        x_ji = beta * beta / x_ij
        v = np.zeros(d, dtype=complex)
        w = np.zeros(d, dtype=complex)
        v[i] = np.sqrt(x_ij)
        v[j] = np.sqrt(beta) * np.conj(b) / beta
        w[i] = np.sqrt(x_ji / beta)
        w[j] = 1.0
        out.append((v, w))
    for k, l, mass in ((i, j, a_ij - x_ij), (j, i, a_ji - x_ji)):
        if mass > zero_tol:
            out.append(unit_pair(k, l, mass))
    return out


def pcp2_decompose(pair: LduiPair, tol: Tolerances = DEFAULT_TOL) -> PcpDecomposition:
    """Explicit PCP decomposition of factor width <= 2.

    Raises :class:`DecompositionFailure` when the pair violates the PCP
    necessary conditions or ``B`` has factor width > 2.
    """
    nec = pcp_necessary(pair, tol)
    if not nec.holds:
        raise DecompositionFailure("pair fails the PCP necessary conditions", nec)
    A = np.real(pair.A)
    B = pair.B
    try:
        cert = factor_width2_scaling(B, tol)
    except NotFactorWidth2 as exc:
        rep = PropertyReport("B has factor width <= 2", Verdict.FAILS,
                             {"eigenvalue": exc.eigenvalue, "eigenvector": exc.eigenvector}, -exc.eigenvalue)
        raise DecompositionFailure(str(exc), rep) from exc
    d = pair.dim
    As, Bs = cert.scaled(A), cert.scaled(B)
    absB = np.abs(Bs)
    absB[np.abs(B) <= tol.zero_tol] = 0.0
    np.fill_diagonal(absB, 0.0)
    pairs = []
    for i in range(d):
        for j in range(i + 1, d):
            b = Bs[i, j] if absB[i, j] > 0 else 0.0
            # support was decided on the unscaled B; scaled entries may be tiny but are kept
            pairs.extend(_two_by_two_pcp(i, j, max(As[i, j], 0.0), max(As[j, i], 0.0), b, d, 0.0))
    rest = np.diag(As) - absB.sum(axis=1)
    for i in range(d):
        if rest[i] > 0:
            v = np.zeros(d, dtype=complex)
            w = np.zeros(d, dtype=complex)
            v[i] = np.sqrt(rest[i])
            w[i] = 1.0
            pairs.append((v, w))
    root = np.sqrt(cert.D)
    pairs = [(v / root, w / root) for v, w in pairs]
    dec = PcpDecomposition.from_pairs(pairs, d, tol)
    dec.scaling = cert
    return dec


def reconstruction_bound(pair: LduiPair) -> float:
    return 1e-8 * (1.0 + np.linalg.norm(pair.A) + np.linalg.norm(pair.B))


def verify_pcp_decomposition(pair: LduiPair, dec: PcpDecomposition, tol: Tolerances = DEFAULT_TOL) -> PropertyReport:
    """Recompute both sums and compare with the target pair (Frobenius norms)."""
    if dec.dim != pair.dim:
        raise ValueError(f"decomposition has dim {dec.dim}, pair has dim {pair.dim}")
    A_rec, B_rec = dec.reconstruct()
    rA = float(np.linalg.norm(A_rec - pair.A))
    rB = float(np.linalg.norm(B_rec - pair.B))
    residual = float(np.hypot(rA, rB))
    bound = reconstruction_bound(pair)
    width = dec.actual_width(tol)
    details = {"residual_A": rA, "residual_B": rB, "bound": bound, "width": width,
               "reported_width": dec.width, "terms": len(dec)}
    if residual > bound:
        return PropertyReport("PCP decomposition", Verdict.FAILS,
                              {"reason": "reconstruction residual exceeds bound"}, residual, details)
    if width != dec.width:
        return PropertyReport("PCP decomposition", Verdict.FAILS,
                              {"reason": "reported width is wrong", "actual": width}, residual, details)
    return PropertyReport("PCP decomposition", Verdict.HOLDS, None, residual, details)


def pcp_membership(pair: LduiPair, tol: Tolerances = DEFAULT_TOL) -> PropertyReport:
    """PCP verdict from the available tests.

    ``holds`` comes with a verified width-2 decomposition, ``fails`` with a
    violated necessary condition; everything else is ``unknown``.
    """
    nec = pcp_necessary(pair, tol)
    if nec.fails:
        return PropertyReport("PCP", Verdict.FAILS, nec.witness, nec.residual, {"test": "necessary"})
    try:
        dec = pcp2_decompose(pair, tol)
    except DecompositionFailure as exc:
        return PropertyReport("PCP", Verdict.UNKNOWN, None, 0.0,
                              {"test": "factor width 2", "reason": str(exc)})
    ver = verify_pcp_decomposition(pair, dec, tol)
    if ver.holds:
        return PropertyReport("PCP", Verdict.HOLDS, None, ver.residual, {"test": "factor width 2", "width": dec.width})
    return PropertyReport("PCP", Verdict.UNKNOWN, None, ver.residual, {"reason": "decomposition did not verify"})
