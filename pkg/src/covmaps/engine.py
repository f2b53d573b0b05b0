"""End-to-end entanglement-breaking certification for compositions of PPT
(C)DUC maps, random PPT instance generators, Choi splitting and the DOC
factor-width scanner."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .composition import compose_doc, compose_maps
from .cones import (
    PcpDecomposition,
    check_ppt,
    pcp2_decompose,
    reconstruction_bound,
    tcp_necessary,
    verify_pcp_decomposition,
)
from .errors import DecompositionFailure, KindUnsupported, NoConvergence, UnverifiedDecomposition
from .maps import CovariantMap, LduiPair, LdoiTriple, MapKind, choi, embed_to_doc, ginibre
from .matrix_core import DEFAULT_TOL, Tolerances, comparison_matrix, is_psd, partial_transpose, psd_margin


class CertVerdict(str, Enum):
    CERTIFIED_EB = "certified_EB"
    REFUTED_INPUTS_NOT_PPT = "refuted_inputs_not_PPT"
    INTERNAL_FAILURE = "internal_failure"


@dataclass
class Ppt2Certificate:
    input_kinds: tuple
    inputs: tuple
    composed_pair: Optional[LduiPair]
    composed_kind: Optional[MapKind]
    decomposition: Optional[PcpDecomposition]
    residuals: dict
    verdict: CertVerdict
    notes: list = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.verdict is CertVerdict.CERTIFIED_EB

    @property
    def composed_map(self) -> CovariantMap:
        return CovariantMap(self.composed_kind, self.composed_pair)


def certify_ppt2(m1: CovariantMap, m2: CovariantMap, tol: Tolerances = DEFAULT_TOL) -> Ppt2Certificate:
    """Certify that ``m1 o m2`` is entanglement breaking via a factor-width-2
    PCP decomposition of the composed pair."""
    if MapKind.DOC in (m1.kind, m2.kind):
        raise KindUnsupported("certification covers DUC/CDUC maps only")
    kinds = (m1.kind.value, m2.kind.value)
    reports = [check_ppt(m1, tol), check_ppt(m2, tol)]
    if not all(r.holds for r in reports):
        notes = [f"input {n + 1} is not PPT: {r.witness}" for n, r in enumerate(reports) if not r.holds]
        return Ppt2Certificate(kinds, (m1, m2), None, None, None, {}, CertVerdict.REFUTED_INPUTS_NOT_PPT, notes)
    composed = compose_maps(m1, m2)
    pair = composed.data
    residuals = {"bound": reconstruction_bound(pair)}
    try:
        dec = pcp2_decompose(pair, tol)
    except (DecompositionFailure, NoConvergence) as exc:
        return Ppt2Certificate(kinds, (m1, m2), pair, composed.kind, None, residuals,
                               CertVerdict.INTERNAL_FAILURE, [f"decomposition failed: {exc}"])
    ver = verify_pcp_decomposition(pair, dec, tol)
    residuals.update(reconstruction=ver.residual, residual_A=ver.details["residual_A"],
                     residual_B=ver.details["residual_B"])
    if ver.holds and dec.width <= 2:
        verdict, notes = CertVerdict.CERTIFIED_EB, []
    else:
        verdict, notes = CertVerdict.INTERNAL_FAILURE, [f"decomposition did not verify: {ver.details}"]
    return Ppt2Certificate(kinds, (m1, m2), pair, composed.kind, dec, residuals, verdict, notes)


def is_ppt_matrix(J, d: int, tol: Tolerances = DEFAULT_TOL) -> bool:
    """PSD before and after partial transposition of the second factor."""
    return is_psd(J, tol) and is_psd(partial_transpose(J, d, 1), tol)


def split_choi(m: CovariantMap, dec: PcpDecomposition, tol: Tolerances = DEFAULT_TOL) -> list:
    """Choi matrices of the rank-one maps generated by each vector pair; they sum to ``J(m)``."""
    if m.kind is MapKind.DOC:
        raise KindUnsupported("Choi splitting is defined for DUC/CDUC maps")
    if not verify_pcp_decomposition(m.data, dec, tol).holds:
        raise UnverifiedDecomposition("decomposition does not reconstruct the map's pair")
    parts = []
    for A_n, B_n in dec.terms():
        parts.append(choi(CovariantMap(m.kind, LduiPair(A_n, B_n, tol))))
    return parts


# -- generators ----------------------------------------------------------------

def _rng(seed):
    if isinstance(seed, (tuple, list)):
        return np.random.default_rng(list(seed))
    return np.random.default_rng(seed)


def random_ppt_pair(dim: int, seed, slack: float = 1.0) -> LduiPair:
    """Random pair whose DUC and CDUC maps are PPT.

    ``B = G G^*`` for complex Ginibre ``G``; ``A_ij = |B_ij| + slack * |g_ij|``
    off the diagonal with ``g`` standard normal.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = _rng(seed)
    G = ginibre(dim, rng)
    B = G @ G.conj().T
    B = 0.5 * (B + B.conj().T)
    A = np.abs(B) + slack * np.abs(rng.standard_normal((dim, dim)))
    np.fill_diagonal(A, np.real(np.diag(B)))
    return LduiPair(A, B)


def random_ppt_doc_triple(dim: int, seed, slack: float = 1.0) -> LdoiTriple:
    """Random triple whose DOC map is PPT; ``C`` is rescaled so ``diag C = diag B``."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = _rng(seed)
    G1, G2 = ginibre(dim, rng), ginibre(dim, rng)
    B = G1 @ G1.conj().T
    B = 0.5 * (B + B.conj().T)
    C0 = G2 @ G2.conj().T
    scale = np.sqrt(np.real(np.diag(B)) / np.real(np.diag(C0)))
    C = scale[:, None] * C0 * scale[None, :]
    C = 0.5 * (C + C.conj().T)
    A = np.maximum(np.abs(B), np.abs(C)) + slack * np.abs(rng.standard_normal((dim, dim)))
    np.fill_diagonal(A, np.real(np.diag(B)))
    return LdoiTriple(A, B, C)


# -- DOC scanner ---------------------------------------------------------------

SCAN_MODES = ("abb", "general", "embedded")


@dataclass
class ScanFinding:
    seed: int
    trial: int
    mode: str
    inputs: tuple
    composed: LdoiTriple
    m1_psd: dict
    min_eigenvalues: dict
    tcp_necessary: str
    notes: dict = field(default_factory=dict)


def _scan_pair(dim, rng):
    """PPT pair with random rank, real/complex ``B`` and random slack scale."""
    rank = int(rng.integers(1, dim + 1))
    real = bool(rng.integers(0, 2))
    if real:
        G = rng.standard_normal((dim, rank))
    else:
        G = ginibre(dim, rng, rank)
    B = G @ G.conj().T
    B = 0.5 * (B + B.conj().T)
    slack_scale = float(rng.choice([0.0, 0.01, 0.1, 1.0]))
    A = np.abs(B) + slack_scale * np.abs(rng.standard_normal((dim, dim)))
    np.fill_diagonal(A, np.real(np.diag(B)))
    return LduiPair(A, B), {"rank": rank, "real": real, "slack_scale": slack_scale, "slack": "half-normal"}


def scan_inputs(mode: str, dim: int, seed: int, trial: int):
    """The two input triples used by ``trial`` of a scan, with generator metadata."""
    rng = np.random.default_rng([seed, trial])
    if mode == "abb":
        pair, meta = _scan_pair(dim, rng)
        t = LdoiTriple(pair.A, pair.B, pair.B)
        return (t, t), meta
    if mode == "general":
        t1 = random_ppt_doc_triple(dim, [seed, trial, 1], slack=float(rng.choice([0.0, 0.1, 1.0])))
        t2 = random_ppt_doc_triple(dim, [seed, trial, 2], slack=float(rng.choice([0.0, 0.1, 1.0])))
        return (t1, t2), {"generator": "random_ppt_doc_triple"}
    if mode == "embedded":
        k1, k2 = (MapKind(int(k)) for k in rng.integers(1, 3, size=2))
        p1, m1 = _scan_pair(dim, rng)
        p2, m2 = _scan_pair(dim, rng)
        return (embed_to_doc(p1, k1), embed_to_doc(p2, k2)), {"kinds": [k1.value, k2.value], "first": m1,
                                                              "second": m2}
    raise ValueError(f"unknown scan mode {mode!r}; expected one of {SCAN_MODES}")


def evaluate_trial(t1: LdoiTriple, t2: LdoiTriple, tol: Tolerances = DEFAULT_TOL):
    """Compose and test ``M(B)``, ``M(C)`` of the result for PSD-ness."""
    comp = compose_doc(t1, t2)
    verdicts, mins = {}, {}
    for name, M in (("B", comp.B), ("C", comp.C)):
        lmin, lmax, _ = psd_margin(comparison_matrix(M, 1), tol)
        mins[name] = lmin
        verdicts[name] = bool(lmin >= -tol.psd_tol * max(1.0, lmax))
    return comp, verdicts, mins


def scan_doc_conjecture(dim: int, trials: int, seed: int = 0, tol: Tolerances = DEFAULT_TOL,
                        mode: str = "abb") -> list:
    """Search compositions of PPT DOC maps whose ``M(B)`` or ``M(C)`` is not PSD
    (so the composed triple has factor width > 2).

    Trial ``n`` depends only on ``(seed, n)``; findings are ordered by trial.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    findings = []
    for trial in range(trials):
        (t1, t2), meta = scan_inputs(mode, dim, seed, trial)
        comp, verdicts, mins = evaluate_trial(t1, t2, tol)
        if all(verdicts.values()):
            continue
        tcp = tcp_necessary(comp, None, tol)
        findings.append(ScanFinding(seed, trial, mode, (t1, t2), comp, verdicts, mins, tcp.verdict.value, meta))
    return findings


def verify_finding(f: ScanFinding, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Recompute the composition from the recorded inputs and confirm the witness:
    both inputs PPT, stored composition reproduced, and ``M(B)`` or ``M(C)`` not PSD."""
    t1, t2 = f.inputs
    if not all(check_ppt(CovariantMap(MapKind.DOC, t), tol).holds for t in (t1, t2)):
        return False
    comp, verdicts, _ = evaluate_trial(t1, t2, tol)
    scale = 1.0 + max(np.max(np.abs(M)) for M in comp)
    if any(np.max(np.abs(X - Y)) > tol.eq_tol * scale for X, Y in zip(comp, f.composed)):
        return False
    return not all(verdicts.values())
