"""Quadrature on simple cells, product cells and their facets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cells import facet_regions, flatten_cell, make_simplex, product_cell
from .errors import BadFacet, BadOrder, NotProduct


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Points and weights on a cell, or on one facet of a product cell.

    Weights carry the reference measure of the integration domain, so
    they sum to the cell volume (or facet measure, including embedding
    scale factors such as sqrt(2) on the triangle hypotenuse).
    """

    cell: object
    points: np.ndarray
    weights: np.ndarray
    region: str = None
    facet: int = None


def gauss_legendre(n):
    """Gauss-Legendre rule with n points on [0, 1], exact to degree 2n - 1."""
    if not 1 <= n <= 20:
        raise BadOrder(f"gauss_legendre supports 1 <= n <= 20, got {n}")
    t, w = np.polynomial.legendre.leggauss(n)
    return QuadratureRule(make_simplex("interval"),
                          ((t + 1.0) / 2.0).reshape(-1, 1), w / 2.0)


def simplex_rule(cell, degree):
    """Rule on the unit triangle exact to the given degree.

    Built by mapping a Gauss-Legendre product rule through the Duffy
    transform (u, v) -> (u(1 - v), v); the Jacobian factor (1 - v)
    raises the v-degree by one, which the point count accounts for.
    """
    if cell.kind != "triangle":
        raise ValueError("simplex_rule expects the triangle")
    if not 0 <= degree <= 12:
        raise BadOrder(f"simplex_rule supports degree <= 12, got {degree}")
    gl = gauss_legendre((degree + 3) // 2)
    u = gl.points[:, 0]
    w = gl.weights
    uu, vv = np.meshgrid(u, u, indexing="ij")
    ww = np.outer(w, w * (1.0 - u))
    points = np.column_stack([(uu * (1.0 - vv)).ravel(), vv.ravel()])
    return QuadratureRule(cell, points, ww.ravel())


def product_rule(ra, rb):
    """Cartesian product rule on the product of the factor cells.

    Points are A-major with A coordinates first and weights multiply.
    A rule whose cell is itself a product is flattened so the result
    stays one product level deep.
    """
    cell_a = ra.cell
    if cell_a.kind == "product":
        cell_a = flatten_cell(cell_a)
    cell = product_cell(cell_a, rb.cell)
    na, nb = len(ra.points), len(rb.points)
    points = np.hstack([np.repeat(ra.points, nb, axis=0),
                        np.tile(rb.points, (na, 1))])
    weights = np.outer(ra.weights, rb.weights).ravel()
    return QuadratureRule(cell, points, weights)


def cell_rule(cell, degree):
    """Volume rule exact to the given degree on any supported cell."""
    npts = max(1, (degree + 2) // 2)
    if cell.kind == "interval":
        return gauss_legendre(npts)
    if cell.kind == "triangle":
        return simplex_rule(cell, degree)
    if cell.kind == "quadrilateral":
        r = product_rule(gauss_legendre(npts), gauss_legendre(npts))
        return QuadratureRule(cell, r.points, r.weights)
    if cell.kind == "product":
        A, B = cell.factors
        return product_rule(cell_rule(A, degree), cell_rule(B, degree))
    raise ValueError(f"no volume rule for cell kind {cell.kind!r}")


def _edge_rule(cell2d, edge_index, degree):
    """Rule on one edge of a 2D cell, embedded in cell coordinates.

    Weights include the reference edge length.
    """
    v = cell2d.entity_coords((1,), edge_index)
    gl = gauss_legendre(max(1, (degree + 2) // 2))
    t = gl.points[:, 0]
    points = v[0] + np.outer(t, v[1] - v[0])
    length = float(np.linalg.norm(v[1] - v[0]))
    return points, gl.weights * length


def facet_rule(cell, region, facet_index, degree):
    """Rule on one facet of a product cell, in cell coordinates.

    Horizontal facets carry a volume rule of the A factor at a fixed
    B vertex; vertical facets combine a facet rule of A with a volume
    rule of B.
    """
    try:
        regions = facet_regions(cell)
    except NotProduct as exc:
        raise BadFacet("facet rules are defined on product cells") from exc
    if region not in regions:
        raise BadFacet(f"unknown facet region {region!r}")
    key, = regions[region]
    if not 0 <= facet_index < cell.entity_count(key):
        raise BadFacet(f"no {region} facet {facet_index} on this cell")
    A, B = cell.factors

    if region == "horizontal":
        # Entity order is A-major with a single A cell, so the facet
        # index is the B vertex index.
        ra = cell_rule(A, degree)
        z = B.vertices[facet_index][0]
        points = np.hstack([ra.points,
                            np.full((len(ra.points), 1), float(z))])
        return QuadratureRule(cell, points, ra.weights.copy(),
                              region=region, facet=facet_index)

    if A.kind == "interval":
        pa = np.asarray([A.vertices[facet_index]], dtype=float)
        wa = np.ones(1)
    else:
        pa, wa = _edge_rule(A, facet_index, degree)
    rb = gauss_legendre(max(1, (degree + 2) // 2))
    na, nb = len(pa), len(rb.points)
    points = np.hstack([np.repeat(pa, nb, axis=0),
                        np.tile(rb.points, (na, 1))])
    weights = np.outer(wa, rb.weights).ravel()
    return QuadratureRule(cell, points, weights,
                          region=region, facet=facet_index)
