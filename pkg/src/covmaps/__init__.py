"""Diagonal unitary/orthogonal covariant maps: PPT, entanglement breaking and
factor-width-two certificates for compositions of PPT maps."""

__version__ = "0.1.0"

from .matrix_core import DEFAULT_TOL, Tolerances  # noqa: E402
from .maps import CovariantMap, LduiPair, LdoiTriple, MapKind, apply, choi  # noqa: E402
from .composition import compose1, compose2, compose_doc, compose_maps  # noqa: E402
from .cones import (  # noqa: E402
    PcpDecomposition,
    check_ccp,
    check_cp,
    check_ppt,
    factor_width2_scaling,
    pcp2_decompose,
    verify_pcp_decomposition,
)
from .engine import certify_ppt2, random_ppt_doc_triple, random_ppt_pair, scan_doc_conjecture, split_choi  # noqa: E402

__all__ = [
    "DEFAULT_TOL", "Tolerances", "CovariantMap", "LduiPair", "LdoiTriple", "MapKind", "apply", "choi",
    "compose1", "compose2", "compose_doc", "compose_maps", "PcpDecomposition", "check_ccp", "check_cp",
    "check_ppt", "factor_width2_scaling", "pcp2_decompose", "verify_pcp_decomposition", "certify_ppt2",
    "random_ppt_doc_triple", "random_ppt_pair", "scan_doc_conjecture", "split_choi",
]
