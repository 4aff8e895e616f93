"""Universal-rigidity certificates for tensegrities, with or without point-group symmetry."""

__version__ = "0.1.0"

from .certify import (  # noqa: E402
    CertifyOptions,
    StressCertificate,
    Tolerances,
    Verdict,
    certify_universal_rigidity,
    check_super_stable,
    conic_condition,
    neighbor_span_check,
)
from .gain_graph import SignedGainGraph  # noqa: E402
from .groups import FiniteGroup, catalogue_group, from_table  # noqa: E402
from .io import parse_instance, parse_instance_data  # noqa: E402
from .irreps import IrrepSet, catalogue_irreps  # noqa: E402
from .linalg import numeric_rank  # noqa: E402
from .search import SearchConfig, search  # noqa: E402
from .tensegrity import PointGroup, SymmetricTensegrity  # noqa: E402

__all__ = [
    "CertifyOptions", "StressCertificate", "Tolerances", "Verdict", "certify_universal_rigidity",
    "check_super_stable", "conic_condition", "neighbor_span_check", "SignedGainGraph", "FiniteGroup",
    "catalogue_group", "from_table", "parse_instance", "parse_instance_data", "IrrepSet",
    "catalogue_irreps", "numeric_rank", "SearchConfig", "search", "PointGroup", "SymmetricTensegrity",
]
