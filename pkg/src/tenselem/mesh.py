"""Structured extruded meshes, cell geometry and function spaces.

A base line or triangulated unit square is swept through regular
vertical layers, giving quadrilateral or prism cells.  Geometry is
piecewise multilinear in the vertex coordinates, so perturbing
vertices yields non-constant Jacobians; the Jacobian is evaluated at
quadrature points per cell.  Function spaces number DOFs by (entity
key, global entity, slot) and record per-cell scatter indices with
orientation signs.
"""

from __future__ import annotations

import numpy as np

from .algebra import TensorProductElement, tensor_product
from .cells import make_simplex, product_cell
from .errors import BadLayers, CellMismatch, MappingUnset
from .simplex import lagrange


class BaseMesh:
    """Structured base layer: coordinates, cells, shared entities.

    conn[p] lists per cell the global dim-p entity ids in local entity
    order; directed[p] the matching directed global vertex tuples.  A
    cell traverses a shared edge in reverse when its directed tuple
    descends; slot maps account for that.
    """

    def __init__(self, cell, coords, conn, directed, counts):
        self.cell = cell
        self.coords = np.asarray(coords, dtype=float)
        self.conn = conn
        self.directed = directed
        self.counts = counts

    @property
    def ncells(self):
        return len(self.conn[self.cell.dimension])


def line_base(n):
    """Uniform mesh of [0, 1] with n cells."""
    coords = np.linspace(0.0, 1.0, n + 1).reshape(-1, 1)
    cells = np.stack([np.arange(n), np.arange(1, n + 1)], axis=1)
    conn = {0: cells.copy(), 1: np.arange(n).reshape(-1, 1)}
    directed = {0: cells.reshape(n, 2, 1), 1: cells.reshape(n, 1, 2)}
    return BaseMesh(make_simplex("interval"), coords, conn, directed,
                    {0: n + 1, 1: n})


def square_triangle_base(n):
    """Criss-cross-free triangulation of the unit square, 2 n^2 cells.

    Each grid square splits along the diagonal from its lower-right to
    its upper-left corner; both triangles are counterclockwise.
    """
    def g(i, j):
        return j * (n + 1) + i

    coords = np.array([[i / n, j / n]
                       for j in range(n + 1) for i in range(n + 1)])
    tris = []
    for j in range(n):
        for i in range(n):
            v00, v10 = g(i, j), g(i + 1, j)
            v01, v11 = g(i, j + 1), g(i + 1, j + 1)
            tris.append((v00, v10, v01))
            tris.append((v10, v11, v01))
    tris = np.asarray(tris)
    edge_ids = {}
    conn1 = np.empty((len(tris), 3), dtype=int)
    directed1 = np.empty((len(tris), 3, 2), dtype=int)
    for c, (a, b, d) in enumerate(tris):
        # Local edge e is opposite local vertex e.
        for e, pair in enumerate(((b, d), (a, d), (a, b))):
            key = tuple(sorted(pair))
            conn1[c, e] = edge_ids.setdefault(key, len(edge_ids))
            directed1[c, e] = pair
    conn = {0: tris.copy(), 1: conn1,
            2: np.arange(len(tris)).reshape(-1, 1)}
    directed = {0: tris.reshape(-1, 3, 1), 1: directed1,
                2: tris.reshape(-1, 1, 3)}
    counts = {0: (n + 1) ** 2, 1: len(edge_ids), 2: len(tris)}
    return BaseMesh(make_simplex("triangle"), coords, conn, directed, counts)


class ExtrudedMesh:
    """Base mesh swept through vertical layers of equal height.

    Vertex (ia, l) has global id ia * (layers + 1) + l; cell (c, l)
    has index c * layers + l.  Coordinates are mutable so tests can
    perturb them; geometry stays multilinear per cell.
    """

    def __init__(self, base, layers, layer_height, geometry="planar"):
        if layers < 1:
            raise BadLayers("an extruded mesh needs at least one layer")
        self.base = base
        self.layers = layers
        self.layer_height = layer_height
        self.cell = product_cell(base.cell, make_simplex("interval"))
        nl = layers + 1
        nbv = len(base.coords)
        levels = np.arange(nl) * layer_height
        coords = np.empty((nbv * nl, base.coords.shape[1] + 1))
        coords[:, :-1] = np.repeat(base.coords, nl, axis=0)
        coords[:, -1] = np.tile(levels, nbv)
        self.coordinates = coords
        bcv = base.conn[0]
        nbc, m = bcv.shape
        bottom = bcv[:, None, :] * nl + np.arange(layers)[None, :, None]
        cv = np.stack([bottom, bottom + 1], axis=-1)
        self.cell_vertices = cv.reshape(nbc * layers, 2 * m)
        self.ncells = nbc * layers
        if geometry == "nonAffinePerturbed":
            self._perturb()
        elif geometry != "planar":
            raise ValueError(f"unknown geometry {geometry!r}")
        self._geom_element = tensor_product(
            lagrange(base.cell, 1), lagrange(make_simplex("interval"), 1))

    def _perturb(self):
        """Smooth bounded interior displacement, zero on the boundary."""
        c = self.coordinates
        height = self.layers * self.layer_height
        u = [np.sin(np.pi * c[:, k]) for k in range(c.shape[1] - 1)]
        v = np.sin(np.pi * c[:, -1] / height)
        bump = v * np.prod(u, axis=0)
        for k in range(c.shape[1] - 1):
            c[:, k] = c[:, k] + 0.03 * bump
        c[:, -1] = c[:, -1] + 0.04 * height * bump


class CellGeometry:
    """Per-cell, per-point geometry of the multilinear reference map."""

    def __init__(self, x, J, detJ, JinvT):
        self.x = x
        self.J = J
        self.detJ = detJ
        self.JinvT = JinvT

    @property
    def ncells(self):
        return self.x.shape[0]


def cell_geometry(mesh, points):
    """Physical points, Jacobians, determinants and inverse transposes.

    points are reference coordinates, shape (npts, dim); arrays come
    back batched over cells.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    dim = mesh.cell.dimension
    tab = mesh._geom_element.tabulate(1, points)
    phi = tab[(0,) * dim][:, 0, :]
    vc = mesh.coordinates[mesh.cell_vertices]
    x = np.einsum("cvd,vp->cpd", vc, phi)
    grads = np.stack(
        [tab[tuple(1 if i == k else 0 for i in range(dim))][:, 0, :]
         for k in range(dim)], axis=-1)
    J = np.einsum("cvd,vpk->cpdk", vc, grads)
    detJ = np.linalg.det(J)
    if np.any(detJ <= 0):
        raise ValueError("geometry map is not orientation-preserving")
    JinvT = np.linalg.inv(J).transpose(0, 1, 3, 2)
    return CellGeometry(x, J, detJ, JinvT)


def pushforward(mapping, table, geom):
    """Map a reference tabulation to physical values on each cell.

    Identity elements keep values and get first derivatives by the
    inverse-transpose chain rule; contravariant values are scaled by
    J/detJ, covariant by the inverse transpose.  Arrays come back as
    [cell][function][component][point].  Derivative entries are
    transformed for identity-mapped elements only.
    """
    if mapping is None:
        raise MappingUnset("this element has no reference-physical mapping")
    dim = geom.J.shape[-1]
    zero = (0,) * dim
    vals = table[zero]
    out = {}
    if mapping == "identity":
        out[zero] = np.broadcast_to(
            vals[None], (geom.ncells,) + vals.shape)
        units = [tuple(1 if i == k else 0 for i in range(dim))
                 for k in range(dim)]
        if all(u in table for u in units):
            ref = np.stack([table[u] for u in units], axis=-1)
            for k, u in enumerate(units):
                out[u] = np.einsum("cpm,japm->cjap",
                                   geom.JinvT[:, :, k, :], ref)
        return out
    if mapping == "contravariantPiola":
        out[zero] = (np.einsum("cpim,jmp->cjip", geom.J, vals)
                     / geom.detJ[:, None, None, :])
        return out
    if mapping == "covariantPiola":
        out[zero] = np.einsum("cpim,jmp->cjip", geom.JinvT, vals)
        return out
    raise ValueError(f"unknown mapping {mapping!r}")


class FunctionSpace:
    """Global DOF numbering of one element over an extruded mesh.

    gdofs and signs give the per-cell scatter map.  Numbering runs by
    sorted entity key, then global entity, then slot; slots of a shared
    base edge follow the ascending-vertex traversal, so cells crossing
    an edge backwards permute their slot order.
    """

    def __init__(self, mesh, element):
        if element.cell != mesh.cell:
            raise CellMismatch("element and mesh cells differ")
        self.mesh = mesh
        self.element = element
        base = mesh.base
        layers = mesh.layers
        keys = sorted(element.entity_dofs)
        layer_count = {0: layers + 1, 1: layers}
        nbe_of = {0: 2, 1: 1}
        offsets = {}
        total = 0
        per_key = {}
        for key in keys:
            counts = {len(v) for v in element.entity_dofs[key].values()}
            if len(counts) != 1:
                raise ValueError("entity DOF counts differ within a key")
            per = counts.pop()
            per_key[key] = per
            offsets[key] = total
            total += base.counts[key[0]] * layer_count[key[1]] * per
        self.ndof = total

        ncells = mesh.ncells
        gdofs = np.empty((ncells, element.ndof), dtype=int)
        signs = np.ones((ncells, element.ndof))
        for cell in range(ncells):
            bc, l = divmod(cell, layers)
            for key in keys:
                p, q = key
                per = per_key[key]
                if per == 0:
                    continue
                nbe = nbe_of[q]
                for e, slots in element.entity_dofs[key].items():
                    ea, eb = divmod(e, nbe)
                    a_gid = base.conn[p][bc, ea]
                    b_gid = l + eb if q == 0 else l
                    gent = a_gid * layer_count[q] + b_gid
                    rev = (p == 1 and
                           base.directed[1][bc, ea, 0]
                           > base.directed[1][bc, ea, 1])
                    order = self._slot_order(key, ea, eb, slots, rev)
                    for gs, ldof in enumerate(order):
                        gdofs[cell, ldof] = offsets[key] + gent * per + gs
        self.gdofs = gdofs
        self.signs = signs

    def _slot_order(self, key, ea, eb, slots, reversed_a):
        """Local DOFs of one entity in global slot order."""
        if not reversed_a:
            return slots
        el = self.element
        if not (isinstance(el, TensorProductElement)
                and el.value_shape == ()):
            raise NotImplementedError(
                "reversed shared edges are supported for scalar "
                "tensor-product elements only")
        na = len(el.A.entity_dofs[(key[0],)][ea])
        nb = len(el.B.entity_dofs[(key[1],)][eb])
        # Local slot s = a * nb + b with a counted along the cell's own
        # edge direction; the canonical slot flips a.
        return [slots[(na - 1 - a) * nb + b]
                for a in range(na) for b in range(nb)]

    def cell_coefficients(self, coefficients):
        """Per-cell local coefficients, signs applied."""
        return coefficients[self.gdofs] * self.signs


def build_space(mesh, element):
    return FunctionSpace(mesh, element)


def facet_sets(mesh):
    """Facet connectivity of a line-base extruded mesh.

    Interior facets are grouped by region with minus = lower cell
    index; vstart/vend are the facet's vertex ids in ascending
    parameter order, shared by both sides on a structured mesh.
    Exterior facets are grouped by side.
    """
    if mesh.base.cell.kind != "interval":
        raise NotImplementedError(
            "facet connectivity is built for line-base meshes")
    n = mesh.base.ncells
    layers = mesh.layers
    nl = layers + 1

    def gid(v, l):
        return v * nl + l

    def cid(c, l):
        return c * layers + l

    interior = {}
    vs, ve, cm, cp = [], [], [], []
    for v in range(1, n):
        for l in range(layers):
            vs.append(gid(v, l))
            ve.append(gid(v, l + 1))
            cm.append(cid(v - 1, l))
            cp.append(cid(v, l))
    interior["vertical"] = {
        "minus": np.array(cm, dtype=int), "plus": np.array(cp, dtype=int),
        "vstart": np.array(vs, dtype=int), "vend": np.array(ve, dtype=int),
        "minus_entity": ((0, 1), 1), "plus_entity": ((0, 1), 0)}
    vs, ve, cm, cp = [], [], [], []
    for c in range(n):
        for l in range(1, layers):
            vs.append(gid(c, l))
            ve.append(gid(c + 1, l))
            cm.append(cid(c, l - 1))
            cp.append(cid(c, l))
    interior["horizontal"] = {
        "minus": np.array(cm, dtype=int), "plus": np.array(cp, dtype=int),
        "vstart": np.array(vs, dtype=int), "vend": np.array(ve, dtype=int),
        "minus_entity": ((1, 0), 1), "plus_entity": ((1, 0), 0)}

    exterior = {}
    ls = np.arange(layers)
    cs = np.arange(n)
    exterior["left"] = {
        "cell": cid(0, ls), "entity": ((0, 1), 0),
        "vstart": gid(0, ls), "vend": gid(0, ls + 1)}
    exterior["right"] = {
        "cell": cid(n - 1, ls), "entity": ((0, 1), 1),
        "vstart": gid(n, ls), "vend": gid(n, ls + 1)}
    exterior["bottom"] = {
        "cell": cid(cs, 0), "entity": ((1, 0), 0),
        "vstart": gid(cs, 0), "vend": gid(cs + 1, 0)}
    exterior["top"] = {
        "cell": cid(cs, layers - 1), "entity": ((1, 0), 1),
        "vstart": gid(cs, layers), "vend": gid(cs + 1, layers)}
    return {"interior": interior, "exterior": exterior}


def facet_reference_points(entity, t):
    """Reference trace points of a quad-cell facet at parameters t."""
    key, e = entity
    t = np.asarray(t, dtype=float)
    const = np.full_like(t, float(e))
    if key == (0, 1):
        return np.column_stack([const, t])
    if key == (1, 0):
        return np.column_stack([t, const])
    raise ValueError(f"not a quadrilateral facet entity: {entity}")
