"""Symbolic algebra on elements: products, direct sums, modifiers.

TensorProductElement forms the outer product of two constituent
elements.  EnrichedElement concatenates elements sharing a cell and
value shape.  ModifiedElement embeds a product element's values into
d-vectors with the signed component map determined by the constituent
continuities, making the result curl- or div-conforming under the
matching Piola map.  Tabulation is factored: derivatives in A-block
coordinates hit only the A factor, B-block coordinates only the B
factor, and the component map is applied last.
"""

from __future__ import annotations

import numpy as np

from .cells import flatten_cell, flattened_key_offsets, product_cell
from .errors import (
    BothVectorValued,
    IncompatibleParts,
    InvalidModifier,
    OrderUnsupported,
)
from .nodes import map_components, product_functional

MAX_ORDER = 2

# Component maps per (modifier, (continuity A, continuity B)), as
# (source component or None, sign) per output component, plus the
# pushforward kind the result must be mapped by.
_TABLE_2D = {
    ("HCurl", ("H1", "L2")): ([(None, 1.0), (0, 1.0)], "covariantPiola"),
    ("HCurl", ("L2", "H1")): ([(0, 1.0), (None, 1.0)], "covariantPiola"),
    ("HDiv", ("H1", "L2")): ([(0, -1.0), (None, 1.0)], "contravariantPiola"),
    ("HDiv", ("L2", "H1")): ([(None, 1.0), (0, 1.0)], "contravariantPiola"),
}
_TABLE_3D = {
    ("HCurl", ("H1", "L2")):
        ([(None, 1.0), (None, 1.0), (0, 1.0)], "covariantPiola"),
    ("HCurl", ("HCurl", "H1")):
        ([(0, 1.0), (1, 1.0), (None, 1.0)], "covariantPiola"),
    ("HCurl", ("HDiv", "H1")):
        ([(1, -1.0), (0, 1.0), (None, 1.0)], "covariantPiola"),
    ("HDiv", ("L2", "H1")):
        ([(None, 1.0), (None, 1.0), (0, 1.0)], "contravariantPiola"),
    ("HDiv", ("HDiv", "L2")):
        ([(0, 1.0), (1, 1.0), (None, 1.0)], "contravariantPiola"),
    ("HDiv", ("HCurl", "L2")):
        ([(1, 1.0), (0, -1.0), (None, 1.0)], "contravariantPiola"),
}


class TensorProductElement:
    """Outer product of two elements, A-major in every index.

    DOF (i, j) is the product functional of node i of A and node j of
    B and sits on the entity pairing their home entities.  The degree
    is the tuple of constituent degrees, never summed.
    """

    def __init__(self, A, B):
        if A.value_shape != () and B.value_shape != ():
            raise BothVectorValued(
                "at most one product constituent may be vector-valued")
        if A.cell.kind == "product":
            A = FlattenedElement(A)
        self.A = A
        self.B = B
        self.cell = product_cell(A.cell, B.cell)
        self.degree = (A.degree, B.degree)
        self.value_shape = A.value_shape + B.value_shape
        if (A.continuity, B.continuity) == ("H1", "H1"):
            self.continuity = "H1"
        elif (A.continuity, B.continuity) == ("L2", "L2"):
            self.continuity = "L2"
        else:
            self.continuity = None
        # Scalar products pull back by composition; vector-valued
        # products on 3D cells have no mapping until modified.
        self.mapping = "identity" if self.value_shape == () else None
        self.nodes = [product_functional(na, nb)
                      for na in A.nodes for nb in B.nodes]
        entity_dofs = {}
        for ka, amap in A.entity_dofs.items():
            for kb, bmap in B.entity_dofs.items():
                nbe = len(bmap)
                ent = {}
                for ea, dofs_a in amap.items():
                    for eb, dofs_b in bmap.items():
                        ent[ea * nbe + eb] = [i * B.ndof + j
                                              for i in dofs_a
                                              for j in dofs_b]
                entity_dofs[ka + kb] = ent
        self.entity_dofs = entity_dofs

    @property
    def ndof(self):
        return self.A.ndof * self.B.ndof

    def tabulate(self, order, points):
        if order > MAX_ORDER:
            raise OrderUnsupported(f"derivative order {order} not supported")
        points = np.atleast_2d(np.asarray(points, dtype=float))
        da = self.A.cell.dimension
        ta = self.A.tabulate(order, points[:, :da])
        tb = self.B.tabulate(order, points[:, da:])
        out = {}
        for aa, va in ta.items():
            for ab, vb in tb.items():
                if sum(aa) + sum(ab) > order:
                    continue
                na, ca, npts = va.shape
                nb, cb, _ = vb.shape
                comb = np.einsum("iap,jbp->ijabp", va, vb)
                out[aa + ab] = comb.reshape(na * nb, ca * cb, npts)
        return out

    def __repr__(self):
        return f"<TensorProduct {self.A!r} x {self.B!r}>"


class EnrichedElement:
    """Direct sum of elements on one cell; DOFs concatenate in order."""

    def __init__(self, parts):
        parts = list(parts)
        first = parts[0]
        for p in parts[1:]:
            if p.cell != first.cell:
                raise IncompatibleParts("parts live on different cells")
            if p.value_shape != first.value_shape:
                raise IncompatibleParts("parts have different value shapes")
            if p.mapping != first.mapping:
                raise IncompatibleParts("parts have different mapping kinds")
        self.parts = parts
        self.cell = first.cell
        self.degree = tuple(p.degree for p in parts)
        self.value_shape = first.value_shape
        self.mapping = first.mapping
        cont = {p.continuity for p in parts}
        self.continuity = cont.pop() if len(cont) == 1 else None
        self.nodes = [n for p in parts for n in p.nodes]
        entity_dofs = {key: {e: [] for e in range(first.cell.entity_count(key))}
                       for key in first.cell.entities}
        offset = 0
        for p in parts:
            for key, emap in p.entity_dofs.items():
                for e, dofs in emap.items():
                    entity_dofs[key][e].extend(d + offset for d in dofs)
            offset += p.ndof
        self.entity_dofs = entity_dofs

    @property
    def ndof(self):
        return sum(p.ndof for p in self.parts)

    def tabulate(self, order, points):
        tabs = [p.tabulate(order, points) for p in self.parts]
        return {alpha: np.concatenate([t[alpha] for t in tabs], axis=0)
                for alpha in tabs[0]}

    def __repr__(self):
        return f"<Enriched {len(self.parts)} parts, {self.ndof} dofs>"


class ModifiedElement:
    """Product element embedded into d-vector values.

    The component map is the table row selected by the constituent
    continuity pair; the node functionals are pushed through the same
    map, which preserves nodal duality because the embedding is
    orthogonal.
    """

    def __init__(self, base, modifier):
        if not isinstance(base, TensorProductElement):
            raise InvalidModifier(
                f"{modifier} applies to tensor-product elements")
        pair = (base.A.continuity, base.B.continuity)
        table = _TABLE_2D if base.cell.dimension == 2 else _TABLE_3D
        try:
            cmap, mapping = table[(modifier, pair)]
        except KeyError:
            raise InvalidModifier(
                f"no {modifier} rule for continuity pair {pair}") from None
        self.base = base
        self.modifier = modifier
        self.component_map = cmap
        self.mapping = mapping
        self.cell = base.cell
        self.degree = base.degree
        self.value_shape = (base.cell.dimension,)
        self.continuity = modifier
        self.entity_dofs = base.entity_dofs
        self.nodes = [map_components(n, cmap) for n in base.nodes]

    @property
    def ndof(self):
        return self.base.ndof

    def tabulate(self, order, points):
        tabs = self.base.tabulate(order, points)
        d = len(self.component_map)
        out = {}
        for alpha, vals in tabs.items():
            nv = np.zeros((vals.shape[0], d, vals.shape[2]))
            for c, (src, sign) in enumerate(self.component_map):
                if src is not None:
                    nv[:, c] = sign * vals[:, src]
            out[alpha] = nv
        return out

    def __repr__(self):
        return f"<{self.modifier}({self.base!r})>"


class FlattenedElement:
    """The same element viewed on the flattened quadrilateral cell.

    Entity DOF maps are re-keyed through the flatten merge order;
    values, nodes and tabulation are untouched.
    """

    def __init__(self, base):
        self.base = base
        self.cell = flatten_cell(base.cell)
        self.degree = base.degree
        self.value_shape = base.value_shape
        self.continuity = base.continuity
        self.mapping = base.mapping
        self.nodes = base.nodes
        offsets = flattened_key_offsets(base.cell)
        entity_dofs = {key: {e: [] for e in range(self.cell.entity_count(key))}
                       for key in self.cell.entities}
        for pkey, emap in base.entity_dofs.items():
            mkey, off = offsets[pkey]
            for e, dofs in emap.items():
                entity_dofs[mkey][off + e] = list(dofs)
        self.entity_dofs = entity_dofs

    @property
    def ndof(self):
        return self.base.ndof

    def tabulate(self, order, points):
        return self.base.tabulate(order, points)

    def __repr__(self):
        return f"<Flattened {self.base!r}>"


def tensor_product(U, V):
    """Outer product element; at most one factor vector-valued."""
    return TensorProductElement(U, V)


def enrich(U, V):
    """Direct sum.  Nested sums flatten into one ordered part list."""
    parts = list(U.parts) if isinstance(U, EnrichedElement) else [U]
    parts += list(V.parts) if isinstance(V, EnrichedElement) else [V]
    return EnrichedElement(parts)


def hcurl(T):
    """Curl-conforming modifier; distributes over direct sums."""
    if isinstance(T, EnrichedElement):
        return EnrichedElement([hcurl(p) for p in T.parts])
    return ModifiedElement(T, "HCurl")


def hdiv(T):
    """Div-conforming modifier; distributes over direct sums."""
    if isinstance(T, EnrichedElement):
        return EnrichedElement([hdiv(p) for p in T.parts])
    return ModifiedElement(T, "HDiv")


def tabulate_product(element, order, points):
    """Tabulate a product-algebra element by factored evaluation."""
    if order > MAX_ORDER:
        raise OrderUnsupported(f"derivative order {order} not supported")
    return element.tabulate(order, points)


def build_complex(U, V, flavour="div"):
    """Product complex of a base complex U and an interval complex V.

    A three-space U gives W0..W3 on the 3D product cell; a two-space U
    gives W0..W2 on the quadrilateral, with the middle space div- or
    curl-flavoured as requested (flavour is ignored in 3D).
    """
    U, V = list(U), list(V)
    V0, V1 = V
    if len(U) == 2:
        U0, U1 = U
        W0 = tensor_product(U0, V0)
        if flavour == "div":
            W1 = enrich(hdiv(tensor_product(U0, V1)),
                        hdiv(tensor_product(U1, V0)))
        elif flavour == "curl":
            W1 = enrich(hcurl(tensor_product(U0, V1)),
                        hcurl(tensor_product(U1, V0)))
        else:
            raise ValueError("flavour must be 'div' or 'curl'")
        return [W0, W1, tensor_product(U1, V1)]
    U0, U1, U2 = U
    W0 = tensor_product(U0, V0)
    W1 = enrich(hcurl(tensor_product(U0, V1)),
                hcurl(tensor_product(U1, V0)))
    W2 = enrich(hdiv(tensor_product(U1, V1)),
                hdiv(tensor_product(U2, V0)))
    W3 = tensor_product(U2, V1)
    return [W0, W1, W2, W3]


def mapping_label(element):
    """Display name of an element's pushforward kind."""
    return {"identity": "identity",
            "covariantPiola": "covariant Piola",
            "contravariantPiola": "contravariant Piola",
            None: "*"}[element.mapping]


def component_map_string(element):
    """Symbolic value components of a product-algebra element.

    Scalar products read fg; vector constituents contribute f_x g and
    f_y g; modified elements show the signed embedded components.
    """
    if isinstance(element, EnrichedElement):
        return " + ".join(component_map_string(p) for p in element.parts)
    if isinstance(element, ModifiedElement):
        src = _constituent_components(element.base)
        terms = []
        for comp, sign in element.component_map:
            if comp is None:
                terms.append("0")
            else:
                terms.append(("-" if sign < 0 else "") + src[comp])
        return "(" + ", ".join(terms) + ")"
    if isinstance(element, (TensorProductElement, FlattenedElement)):
        comps = _constituent_components(element)
        return comps[0] if len(comps) == 1 else "(" + ", ".join(comps) + ")"
    return "f"


def _constituent_components(element):
    if isinstance(element, FlattenedElement):
        return _constituent_components(element.base)
    A, B = element.A, element.B
    if A.value_shape == (2,):
        return ("f_x g", "f_y g")
    if B.value_shape == (2,):
        return ("f g_x", "f g_y")
    return ("fg",)
