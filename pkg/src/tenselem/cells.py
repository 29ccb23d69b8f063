"""Reference cells with labelled topological entities.

Simple cells are the point, the unit interval and the unit triangle.
A product cell concatenates factor coordinates (A first) and keys its
entities by dimension pairs (p, q).  One product level is supported;
hexahedra are reached by flattening a quadrilateral product cell back
to single-dimension keys and taking its product with an interval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NestedProduct, NotProduct


@dataclass(frozen=True)
class ReferenceCell:
    """Cell topology: vertex coordinates plus entity lists per key.

    Entities are keyed by dimension tuples, (p,) on simple cells and
    (p, q) on product cells.  Each entity is an ordered tuple of
    vertex indices; the ordering fixes tangent directions and the
    lattice layout of nodes placed on the entity.
    """

    kind: str
    vertices: tuple
    entities: dict
    factors: tuple = None

    @property
    def dimension(self):
        return len(self.vertices[0])

    def entity_count(self, key):
        return len(self.entities[key])

    def entity_coords(self, key, index):
        """Vertex coordinates of one entity as an array."""
        idx = list(self.entities[key][index])
        return np.asarray(self.vertices, dtype=float)[idx]

    def __repr__(self):
        return f"<ReferenceCell {self.kind} dim={self.dimension}>"


def make_simplex(kind):
    """Build the point, the unit interval [0, 1] or the unit triangle."""
    if kind == "point":
        return ReferenceCell("point", ((),), {(0,): ((0,),)})
    if kind == "interval":
        return ReferenceCell(
            "interval",
            ((0.0,), (1.0,)),
            {(0,): ((0,), (1,)), (1,): ((0, 1),)})
    if kind == "triangle":
        # Edge i is opposite vertex i.
        return ReferenceCell(
            "triangle",
            ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0)),
            {(0,): ((0,), (1,), (2,)),
             (1,): ((1, 2), (0, 2), (0, 1)),
             (2,): ((0, 1, 2),)})
    raise ValueError(f"unknown simplex kind {kind!r}")


def product_cell(A, B):
    """Cartesian product of two cells, A coordinates first.

    Entities of key (p, q) enumerate the pairs of factor entities in
    A-major lexicographic order; the vertex list of each product
    entity is likewise A-major.
    """
    if A.kind == "product" or B.kind == "product":
        raise NestedProduct("product cells cannot be factors; flatten first")
    nB = len(B.vertices)
    vertices = tuple(va + vb for va in A.vertices for vb in B.vertices)
    entities = {}
    for (p,), ents_a in A.entities.items():
        for (q,), ents_b in B.entities.items():
            entities[(p, q)] = tuple(
                tuple(ia * nB + ib for ia in ea for ib in eb)
                for ea in ents_a for eb in ents_b)
    return ReferenceCell("product", vertices, entities, factors=(A, B))


def flatten_cell(cell):
    """Collapse an interval x interval product cell to single-dimension keys.

    Keys (p, q) with p + q = m merge, in sorted key order, into the
    entity list of key (m,).  The result is a non-product cell that can
    itself be a factor of a 3D product.
    """
    if cell.kind != "product":
        raise NotProduct("only product cells can be flattened")
    A, B = cell.factors
    if A.kind != "interval" or B.kind != "interval":
        raise ValueError("only quadrilateral product cells are flattened")
    entities = {}
    for m in range(cell.dimension + 1):
        merged = []
        for key in sorted(k for k in cell.entities if sum(k) == m):
            merged.extend(cell.entities[key])
        entities[(m,)] = tuple(merged)
    return ReferenceCell("quadrilateral", cell.vertices, entities,
                         factors=cell.factors)


def flattened_key_offsets(cell):
    """Map each product key to (merged key, entity index offset).

    Matches the merge order used by flatten_cell, so entity index e of
    key (p, q) lands at offset + e within the merged entity list.
    """
    offsets = {}
    for m in range(cell.dimension + 1):
        count = 0
        for key in sorted(k for k in cell.entities if sum(k) == m):
            offsets[key] = ((m,), count)
            count += len(cell.entities[key])
    return offsets


def facet_regions(cell):
    """Facet keys of a product cell split by region.

    Horizontal facets are full A-cell times B-facet; vertical facets
    are A-facet times full B-cell.
    """
    if cell.kind != "product":
        raise NotProduct("facet regions are defined on product cells")
    A, B = cell.factors
    return {"horizontal": [(A.dimension, B.dimension - 1)],
            "vertical": [(A.dimension - 1, B.dimension)]}


def lattice(cell, n):
    """Closed equispaced lattice with n subdivisions per direction.

    Product cells (and the flattened quadrilateral) use the product of
    their factor lattices, A-major.
    """
    if n < 1:
        raise ValueError("lattice needs n >= 1")
    if cell.kind == "point":
        return np.zeros((1, 0))
    if cell.kind == "interval":
        return np.linspace(0.0, 1.0, n + 1).reshape(-1, 1)
    if cell.kind == "triangle":
        pts = [(i / n, j / n)
               for i in range(n + 1) for j in range(n + 1 - i)]
        return np.asarray(pts)
    A, B = cell.factors
    la, lb = lattice(A, n), lattice(B, n)
    return np.asarray([tuple(p) + tuple(q) for p in la for q in lb])


def cell_name(cell):
    """Conventional display name for a cell."""
    if cell.kind != "product":
        return cell.kind
    A, B = cell.factors
    names = (A.kind, B.kind)
    if names == ("interval", "interval"):
        return "quadrilateral"
    if names == ("triangle", "interval"):
        return "prism"
    if names == ("quadrilateral", "interval"):
        return "hexahedron"
    return f"{A.kind} x {B.kind}"
