"""Bell-diagonal covariant entanglement witnesses on C^n (x) C^n.

Submodules:

* ``tensor_core``     dense bipartite linear algebra and JSON interchange
* ``bell_basis``      Weyl operators, Bell states, covariance diagnostics
* ``witness_factory`` circulant witnesses and their one-parameter families
* ``positivity``      product-vector contractions, see-saw certification, zero loci
* ``optimality``      projector subtraction, decomposition certificates,
                      closed-form determinant evaluators
* ``cli``             the ``witnesslab`` command
"""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("witnesslab")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0"

from .witness_factory import (FamilyParam, class1_witness, class2_witness, family_params,
                              family_witness, n3_witness, parse_descriptor, witness_from_alpha)
from .positivity import ProductVector, seesaw_minimize, span_analysis, zero_locus_families
from .optimality import (lambda_star_bisect, optimality_report, theorem1_projector,
                         verify_decomposition_classI, verify_decomposition_classII)

__all__ = [
    "__version__", "FamilyParam", "ProductVector", "class1_witness", "class2_witness",
    "family_params", "family_witness", "lambda_star_bisect", "n3_witness",
    "optimality_report", "parse_descriptor", "seesaw_minimize", "span_analysis",
    "theorem1_projector", "verify_decomposition_classI", "verify_decomposition_classII",
    "witness_from_alpha", "zero_locus_families",
]
