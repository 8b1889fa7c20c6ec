"""Numerical verification of LP-Sasakian geometry with generalized symmetric metric connections."""

__version__ = "0.1.0"

from .builtin import builtin_manifest
from .connection import (
    ConnectionParams,
    covariant_derivative,
    generalized_connection,
    levi_civita,
    metric_compatibility_residual,
    torsion,
)
from .curvature import eta_einstein_fit, ricci, riemann, theorem44_verify
from .expr import parse_expression
from .frame import ManifoldSpec, lie_bracket
from .manifest import ManifestError, load_manifest, parse_manifest
from .report import IdentityReport
from .structure import LPStructure, build_example3, phi_form, verify_lp_axioms
from .submanifold import (
    DistributionSplit,
    EmbeddingSpec,
    build_example3_leaf,
    build_submanifold,
    second_fundamental_form,
    split_tangent_normal,
)

__all__ = [
    "ConnectionParams", "DistributionSplit", "EmbeddingSpec", "IdentityReport", "LPStructure",
    "ManifestError", "ManifoldSpec", "build_example3", "build_example3_leaf", "build_submanifold",
    "builtin_manifest", "covariant_derivative", "eta_einstein_fit", "generalized_connection",
    "levi_civita", "lie_bracket", "load_manifest", "metric_compatibility_residual", "parse_expression",
    "parse_manifest", "phi_form", "ricci", "riemann", "second_fundamental_form", "split_tangent_normal",
    "theorem44_verify", "torsion", "verify_lp_axioms",
]
