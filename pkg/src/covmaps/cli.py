"""Command line interface.

Exit codes: 0 success / certified, 1 refuted, 2 input error, 3 internal failure.
"""

import argparse
import json
import sys
import warnings

from . import __version__
from .cones import (
    check_ccp,
    check_cp,
    check_ppt,
    factor_width2_scaling,
    necessary_factor_width_k,
    pcp_membership,
    pcp_necessary,
    tcp_necessary,
)
from .composition import compose_any
from .documents import (
    certificate_to_doc,
    doc_to_map,
    dump_json,
    load_json,
    map_to_doc,
    pair_to_doc,
    scan_to_doc,
    triple_to_doc,
    verify_certificate_document,
    verify_scan_document,
)
from .engine import SCAN_MODES, CertVerdict, certify_ppt2, random_ppt_doc_triple, random_ppt_pair, scan_doc_conjecture
from .errors import BadKind, CovMapsError, DocumentError, NotFactorWidth2, NotHermitian
from .maps import DiagonalCanonicalizationWarning, MapKind
from .matrix_core import DEFAULT_TOL, Tolerances
from .reports import PropertyReport, Verdict

EXIT_OK, EXIT_REFUTED, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


def _tolerances(args) -> Tolerances:
    return Tolerances(
        psd_tol=DEFAULT_TOL.psd_tol if args.tol_psd is None else args.tol_psd,
        eq_tol=DEFAULT_TOL.eq_tol if args.tol_eq is None else args.tol_eq,
        zero_tol=DEFAULT_TOL.zero_tol,
    )


def _emit(doc, path):
    text = dump_json(doc)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_map(path, kind, tol):
    doc = load_json(path)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DiagonalCanonicalizationWarning)
        m = doc_to_map(doc, kind=kind, tol=tol, field=str(path))
    for w in caught:
        print(f"warning: {path}: {w.message}", file=sys.stderr)
    return m


def _parse_kinds(text):
    if text is None:
        return None, None
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 2:
        raise DocumentError("--kinds", "expected two comma separated kinds, e.g. 1,2 or duc,cduc")
    try:
        return tuple(MapKind.parse(p) for p in parts)
    except BadKind as exc:
        raise DocumentError("--kinds", str(exc)) from None


def _width2_report(name, B, tol):
    try:
        cert = factor_width2_scaling(B, tol)
    except NotFactorWidth2 as exc:
        return PropertyReport(name, Verdict.FAILS, {"eigenvalue": exc.eigenvalue, "eigenvector": exc.eigenvector},
                              -exc.eigenvalue)
    except NotHermitian:
        return PropertyReport(name, Verdict.FAILS, {"reason": "not hermitian"})
    return PropertyReport(name, Verdict.HOLDS, None, 0.0, {"D": cert.D, "components": cert.component_partition})


def cmd_check(args) -> int:
    tol = _tolerances(args)
    m = _load_map(args.input, args.kind, tol)
    reports = [check_cp(m, tol), check_ccp(m, tol), check_ppt(m, tol)]
    if m.kind is MapKind.DOC:
        reports.append(tcp_necessary(m.data, None, tol))
        reports.append(_width2_report("B factor width <= 2", m.data.B, tol))
        reports.append(_width2_report("C factor width <= 2", m.data.C, tol))
    else:
        reports.append(pcp_necessary(m.data, tol))
        reports.append(_width2_report("B factor width <= 2", m.data.B, tol))
        reports.append(pcp_membership(m.data, tol))
    doc = {"input": str(args.input), "kind": m.kind.name.lower(), "dim": m.dim,
           "reports": [r.to_dict() for r in reports]}
    _emit(doc, args.output)
    return EXIT_OK


def cmd_compose(args) -> int:
    tol = _tolerances(args)
    k1, k2 = _parse_kinds(args.kinds)
    m1 = _load_map(args.first, k1, tol)
    m2 = _load_map(args.second, k2, tol)
    if m1.dim != m2.dim:
        raise DocumentError(str(args.second), f"dimension {m2.dim} does not match {m1.dim}")
    out = compose_any(m1, m2)
    _emit(map_to_doc(out), args.output)
    return EXIT_OK


def cmd_certify(args) -> int:
    tol = _tolerances(args)
    k1, k2 = _parse_kinds(args.kinds)
    m1 = _load_map(args.first, k1, tol)
    m2 = _load_map(args.second, k2, tol)
    if m1.dim != m2.dim:
        raise DocumentError(str(args.second), f"dimension {m2.dim} does not match {m1.dim}")
    if MapKind.DOC in (m1.kind, m2.kind):
        raise DocumentError("--kinds", "certification covers DUC/CDUC pairs only")
    cert = certify_ppt2(m1, m2, tol)
    doc = certificate_to_doc(cert, tol, {"inputs": [str(args.first), str(args.second)]})
    _emit(doc, args.output)
    if cert.verdict is CertVerdict.CERTIFIED_EB:
        return EXIT_OK
    if cert.verdict is CertVerdict.REFUTED_INPUTS_NOT_PPT:
        return EXIT_REFUTED
    return EXIT_INTERNAL


def cmd_random(args) -> int:
    if args.dim < 1:
        raise DocumentError("--dim", "must be >= 1")
    if args.ppt_triple:
        doc = triple_to_doc(random_ppt_doc_triple(args.dim, args.seed))
    else:
        doc = pair_to_doc(random_ppt_pair(args.dim, args.seed), args.kind or "cduc")
    doc["seed"] = args.seed
    _emit(doc, args.output)
    return EXIT_OK


def cmd_scan(args) -> int:
    tol = _tolerances(args)
    if args.dim < 1:
        raise DocumentError("--dim", "must be >= 1")
    if args.trials < 1:
        raise DocumentError("--trials", "must be >= 1")
    findings = scan_doc_conjecture(args.dim, args.trials, args.seed, tol, args.mode)
    _emit(scan_to_doc(findings, args.dim, args.trials, args.seed, args.mode, tol), args.output)
    print(f"{len(findings)} finding(s) in {args.trials} trial(s)", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    doc = load_json(args.input)
    kind = doc.get("type") if isinstance(doc, dict) else None
    if kind == "ppt2-certificate":
        rep = verify_certificate_document(doc)
    elif kind == "doc-scan":
        rep = verify_scan_document(doc)
    else:
        raise DocumentError("type", "expected a ppt2-certificate or doc-scan document")
    print(json.dumps(rep.to_dict(), indent=1))
    return {Verdict.HOLDS: EXIT_OK, Verdict.FAILS: EXIT_REFUTED}.get(rep.verdict, EXIT_INTERNAL)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="covmaps", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-psd", type=float, default=None, help="relative PSD tolerance")
    common.add_argument("--tol-eq", type=float, default=None, help="relative equality tolerance")
    common.add_argument("-o", "--output", default=None, help="output file (default: stdout)")

    p = sub.add_parser("check", parents=[common], help="report CP/coCP/PPT and cone conditions")
    p.add_argument("input")
    p.add_argument("--kind", default=None, help="duc, cduc or doc (overrides the document tag)")
    p.set_defaults(func=cmd_check)

    for name, func, text in (("compose", cmd_compose, "compose two maps (the second acts first)"),
                             ("certify", cmd_certify, "certify that the composition is entanglement breaking")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("first")
        p.add_argument("second")
        p.add_argument("--kinds", default=None, help="kinds of the two maps, e.g. 1,2 or duc,cduc")
        p.set_defaults(func=func)

    p = sub.add_parser("random", parents=[common], help="random PPT pair or triple")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--ppt-pair", action="store_true", help="(C)DUC pair (default)")
    g.add_argument("--ppt-triple", action="store_true", help="DOC triple")
    p.add_argument("--kind", default=None, help="kind tag for pairs (default cduc)")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("scan", parents=[common], help="search DOC compositions of factor width > 2")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=SCAN_MODES, default="abb")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("verify", help="re-verify a certificate or scan document offline")
    p.add_argument("input")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CovMapsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
