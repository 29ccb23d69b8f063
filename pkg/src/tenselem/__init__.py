"""Symbolic algebra on finite elements with numerical tabulation.

The library builds Ciarlet elements on the interval and triangle,
combines them through tensor products, direct sums and the HCurl/HDiv
modifiers into elements on quadrilaterals, prisms and hexahedra, and
verifies the constructions by tabulation, quadrature and assembly on
structured extruded meshes.
"""

from .cells import (
    ReferenceCell,
    facet_regions,
    flatten_cell,
    make_simplex,
    product_cell,
)
from .simplex import (
    CiarletElement,
    discontinuous_lagrange,
    lagrange,
    raviart_thomas_face,
    rotate_90,
    tabulate,
)
from .algebra import (
    EnrichedElement,
    FlattenedElement,
    ModifiedElement,
    TensorProductElement,
    build_complex,
    enrich,
    hcurl,
    hdiv,
    tabulate_product,
    tensor_product,
)
from .bases import PrimeBasis, nodal_coefficients, prime_basis, tabulate_prime
from .quadrature import (
    QuadratureRule,
    cell_rule,
    facet_rule,
    gauss_legendre,
    product_rule,
    simplex_rule,
)

__all__ = [
    "ReferenceCell", "make_simplex", "product_cell", "flatten_cell",
    "facet_regions",
    "PrimeBasis", "prime_basis", "tabulate_prime", "nodal_coefficients",
    "CiarletElement", "lagrange", "discontinuous_lagrange",
    "raviart_thomas_face", "rotate_90", "tabulate",
    "TensorProductElement", "EnrichedElement", "ModifiedElement",
    "FlattenedElement", "tensor_product", "enrich", "hcurl", "hdiv",
    "tabulate_product", "build_complex",
    "QuadratureRule", "gauss_legendre", "simplex_rule", "product_rule",
    "facet_rule", "cell_rule",
]
