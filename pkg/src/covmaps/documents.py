"""JSON document formats for pairs, triples, certificates and scan findings.

Complex scalars are read as a bare real number or a ``[re, im]`` list and
always written as ``[re, im]``. Floats are written with Python's shortest
round-trip representation, so ``parse(serialize(x))`` is bitwise exact.
"""

import json
import math
import warnings

import numpy as np

from . import __version__
from .cones import PcpDecomposition, verify_pcp_decomposition
from .composition import compose_maps
from .engine import Ppt2Certificate, ScanFinding, verify_finding
from .errors import BadKind, DimMismatch, DocumentError
from .maps import CovariantMap, DiagonalCanonicalizationWarning, LduiPair, LdoiTriple, MapKind
from .matrix_core import DEFAULT_TOL, Tolerances
from .reports import PropertyReport, Verdict

TOOL = "covmaps"


# -- scalars and matrices --------------------------------------------------------

def encode_scalar(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_scalar(value, field) -> complex:
    if isinstance(value, bool):
        raise DocumentError(field, "booleans are not numbers")
    if isinstance(value, (int, float)):
        z = complex(float(value), 0.0)
    elif isinstance(value, list) and len(value) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in value):
        z = complex(float(value[0]), float(value[1]))
    else:
        raise DocumentError(field, f"expected a number or [re, im], got {value!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DocumentError(field, "non-finite entry")
    return z


def encode_matrix(M) -> list:
    return [[encode_scalar(z) for z in row] for row in np.asarray(M)]


def decode_matrix(grid, field, dim) -> np.ndarray:
    if not isinstance(grid, list) or len(grid) != dim:
        raise DocumentError(field, f"expected {dim} rows")
    out = np.empty((dim, dim), dtype=complex)
    for i, row in enumerate(grid):
        if not isinstance(row, list) or len(row) != dim:
            raise DocumentError(f"{field}[{i}]", f"expected {dim} entries")
        for j, value in enumerate(row):
            out[i, j] = decode_scalar(value, f"{field}[{i}][{j}]")
    return out


def encode_vector(v) -> list:
    return [encode_scalar(z) for z in np.asarray(v)]


def decode_vector(values, field, dim) -> np.ndarray:
    if not isinstance(values, list) or len(values) != dim:
        raise DocumentError(field, f"expected {dim} entries")
    return np.array([decode_scalar(x, f"{field}[{i}]") for i, x in enumerate(values)], dtype=complex)


# -- pairs and triples -------------------------------------------------------------

def _kind_name(kind) -> str:
    return MapKind.parse(kind).name.lower()


def pair_to_doc(pair: LduiPair, kind=None) -> dict:
    doc = {"dim": pair.dim}
    if kind is not None:
        doc["kind"] = _kind_name(kind)
    doc["A"] = encode_matrix(pair.A)
    doc["B"] = encode_matrix(pair.B)
    return doc


def triple_to_doc(triple: LdoiTriple) -> dict:
    return {"dim": triple.dim, "kind": "doc", "A": encode_matrix(triple.A), "B": encode_matrix(triple.B),
            "C": encode_matrix(triple.C)}


def map_to_doc(m: CovariantMap) -> dict:
    return triple_to_doc(m.data) if m.kind is MapKind.DOC else pair_to_doc(m.data, m.kind)


def doc_to_map(doc, kind=None, tol: Tolerances = DEFAULT_TOL, field="document") -> CovariantMap:
    """Parse a pair or triple document; ``kind`` overrides the document's tag.

    Emits :class:`DiagonalCanonicalizationWarning` when diagonals disagree.
    """
    if not isinstance(doc, dict):
        raise DocumentError(field, "expected an object")
    dim = doc.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise DocumentError(f"{field}.dim", f"expected a positive integer, got {dim!r}")
    for name in ("A", "B"):
        if name not in doc:
            raise DocumentError(f"{field}.{name}", "missing")
    is_triple = "C" in doc
    tag = kind if kind is not None else doc.get("kind")
    try:
        tag = MapKind.parse(tag) if tag is not None else (MapKind.DOC if is_triple else MapKind.CDUC)
    except BadKind as exc:
        raise DocumentError(f"{field}.kind", str(exc)) from None
    if (tag is MapKind.DOC) != is_triple:
        raise DocumentError(f"{field}.kind", f"kind {tag.name} does not match a {'triple' if is_triple else 'pair'}")
    mats = [decode_matrix(doc[n], f"{field}.{n}", dim) for n in ("A", "B", "C") if n in doc]
    try:
        if is_triple:
            return CovariantMap(tag, LdoiTriple(*mats, tol=tol))
        return CovariantMap(tag, LduiPair(*mats, tol=tol))
    except DimMismatch as exc:
        raise DocumentError(field, str(exc)) from None


def load_json(path, field="document"):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DocumentError(str(path), f"cannot read: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DocumentError(str(path), f"invalid JSON: {exc}") from None


def dump_json(doc) -> str:
    return json.dumps(doc, indent=1, allow_nan=False)


# -- certificates -------------------------------------------------------------------

def decomposition_to_doc(dec: PcpDecomposition) -> dict:
    return {"width": dec.width, "vectors": [{"v": encode_vector(v), "w": encode_vector(w)} for v, w in dec.vector_pairs]}


def doc_to_decomposition(doc, dim, tol: Tolerances = DEFAULT_TOL, field="decomposition") -> PcpDecomposition:
    if not isinstance(doc, dict) or not isinstance(doc.get("vectors"), list):
        raise DocumentError(f"{field}.vectors", "expected a list")
    pairs = []
    for n, item in enumerate(doc["vectors"]):
        if not isinstance(item, dict):
            raise DocumentError(f"{field}.vectors[{n}]", "expected an object with v and w")
        pairs.append((decode_vector(item.get("v"), f"{field}.vectors[{n}].v", dim),
                      decode_vector(item.get("w"), f"{field}.vectors[{n}].w", dim)))
    dec = PcpDecomposition.from_pairs(pairs, dim, tol)
    width = doc.get("width")
    if isinstance(width, int) and not isinstance(width, bool):
        dec.width = width
    return dec


def tolerances_to_doc(tol: Tolerances) -> dict:
    return {"psd_tol": tol.psd_tol, "eq_tol": tol.eq_tol, "zero_tol": tol.zero_tol}


def certificate_to_doc(cert: Ppt2Certificate, tol: Tolerances = DEFAULT_TOL, config=None) -> dict:
    m1, m2 = cert.inputs
    doc = {
        "type": "ppt2-certificate",
        "tool": TOOL,
        "version": __version__,
        "verdict": cert.verdict.value,
        "kinds": list(cert.input_kinds),
        "inputs": [map_to_doc(m1), map_to_doc(m2)],
        "composed": None,
        "decomposition": None,
        "residuals": {k: float(v) for k, v in cert.residuals.items()},
        "notes": list(cert.notes),
        "config": {"tolerances": tolerances_to_doc(tol), **(config or {})},
    }
    if cert.composed_pair is not None:
        doc["composed"] = pair_to_doc(cert.composed_pair, cert.composed_kind)
    if cert.decomposition is not None:
        doc["decomposition"] = decomposition_to_doc(cert.decomposition)
    return doc


def verify_certificate_document(doc, tol: Tolerances = None) -> PropertyReport:
    """Re-derive a certificate's claims from the document alone.

    Recomputes the composition from the inline inputs, compares it with the
    stored composed pair and re-checks the reconstruction and width of the
    stored decomposition.
    """
    if not isinstance(doc, dict) or doc.get("type") != "ppt2-certificate":
        raise DocumentError("type", "not a ppt2-certificate document")
    if tol is None:
        t = doc.get("config", {}).get("tolerances", {})
        tol = Tolerances(**t) if t else DEFAULT_TOL
    inputs = doc.get("inputs")
    if not isinstance(inputs, list) or len(inputs) != 2:
        raise DocumentError("inputs", "expected two input documents")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DiagonalCanonicalizationWarning)
        m1 = doc_to_map(inputs[0], tol=tol, field="inputs[0]")
        m2 = doc_to_map(inputs[1], tol=tol, field="inputs[1]")
    if doc.get("verdict") != "certified_EB":
        return PropertyReport("certificate", Verdict.UNKNOWN, None, 0.0, {"verdict": doc.get("verdict")})
    composed = compose_maps(m1, m2)
    stored = doc_to_map(doc.get("composed"), tol=tol, field="composed")
    mismatch = max(float(np.max(np.abs(x - y))) for x, y in zip(composed.data, stored.data))
    scale = 1.0 + max(float(np.max(np.abs(x))) for x in composed.data)
    if stored.kind is not composed.kind or mismatch > tol.eq_tol * scale:
        return PropertyReport("certificate", Verdict.FAILS,
                              {"reason": "composed pair does not match inputs", "mismatch": mismatch}, mismatch)
    dec = doc_to_decomposition(doc.get("decomposition"), composed.dim, tol)
    ver = verify_pcp_decomposition(composed.data, dec, tol)
    if ver.holds and dec.width > 2:
        return PropertyReport("certificate", Verdict.FAILS, {"reason": "width exceeds 2", "width": dec.width},
                              ver.residual, ver.details)
    ver.name = "certificate"
    return ver


# -- scan findings --------------------------------------------------------------------

def finding_to_doc(f: ScanFinding) -> dict:
    return {
        "seed": f.seed,
        "trial": f.trial,
        "mode": f.mode,
        "inputs": [triple_to_doc(t) for t in f.inputs],
        "composed": triple_to_doc(f.composed),
        "m1_psd": dict(f.m1_psd),
        "min_eigenvalues": {k: float(v) for k, v in f.min_eigenvalues.items()},
        "tcp_necessary": f.tcp_necessary,
        "notes": f.notes,
    }


def doc_to_finding(doc, tol: Tolerances = DEFAULT_TOL, field="finding") -> ScanFinding:
    if not isinstance(doc, dict):
        raise DocumentError(field, "expected an object")
    ts = [doc_to_map(d, tol=tol, field=f"{field}.inputs[{n}]").data for n, d in enumerate(doc.get("inputs", []))]
    if len(ts) != 2:
        raise DocumentError(f"{field}.inputs", "expected two triples")
    comp = doc_to_map(doc.get("composed"), tol=tol, field=f"{field}.composed").data
    return ScanFinding(doc.get("seed"), doc.get("trial"), doc.get("mode"), tuple(ts), comp,
                       doc.get("m1_psd", {}), doc.get("min_eigenvalues", {}), doc.get("tcp_necessary"),
                       doc.get("notes", {}))


def scan_to_doc(findings, dim, trials, seed, mode, tol: Tolerances = DEFAULT_TOL) -> dict:
    return {
        "type": "doc-scan",
        "tool": TOOL,
        "version": __version__,
        "config": {"dim": dim, "trials": trials, "seed": seed, "mode": mode, "tolerances": tolerances_to_doc(tol)},
        "finding_count": len(findings),
        "findings": [finding_to_doc(f) for f in sorted(findings, key=lambda f: f.trial)],
    }


def verify_scan_document(doc, tol: Tolerances = None) -> PropertyReport:
    if not isinstance(doc, dict) or doc.get("type") != "doc-scan":
        raise DocumentError("type", "not a doc-scan document")
    if tol is None:
        t = doc.get("config", {}).get("tolerances", {})
        tol = Tolerances(**t) if t else DEFAULT_TOL
    bad = [n for n, f in enumerate(doc.get("findings", []))
           if not verify_finding(doc_to_finding(f, tol, f"findings[{n}]"), tol)]
    if bad:
        return PropertyReport("scan findings", Verdict.FAILS, {"unverified": bad}, float(len(bad)))
    return PropertyReport("scan findings", Verdict.HOLDS, None, 0.0, {"verified": len(doc.get("findings", []))})
