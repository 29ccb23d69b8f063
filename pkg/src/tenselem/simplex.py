"""Ciarlet elements on the interval and triangle.

Families: continuous Lagrange P_r, discontinuous Lagrange DP_r, the
Raviart-Thomas face element RTF_r on the triangle, and its 90-degree
rotation RTE_r.  Elements hold their nodal basis as coefficients over
the scalar prime basis, one coefficient block per value component.
"""

from __future__ import annotations

import numpy as np

from .bases import (
    nodal_coefficients,
    prime_basis,
    prime_values,
    tabulate_prime,
)
from .errors import (
    DegreeUnsupported,
    NotVector2D,
    OrderUnsupported,
    SingularVandermonde,
)
from .nodes import Functional, map_components
from .quadrature import gauss_legendre, simplex_rule

MAX_DEGREE = 6
MAX_RT_DEGREE = 4


class CiarletElement:
    """A (cell, space, nodes) triple with the nodal basis precomputed.

    coeffs has shape (ndof, ncomp, nprime): each basis function is a
    per-component linear combination of scalar prime functions.
    entity_dofs maps entity key -> entity index -> DOF id list and
    partitions the DOF range.
    """

    def __init__(self, family, cell, degree, prime, coeffs, nodes,
                 entity_dofs, continuity, mapping):
        self.family = family
        self.cell = cell
        self.degree = degree
        self.prime = prime
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.nodes = list(nodes)
        self.entity_dofs = entity_dofs
        self.continuity = continuity
        self.mapping = mapping

    @property
    def ndof(self):
        return self.coeffs.shape[0]

    @property
    def ncomp(self):
        return self.coeffs.shape[1]

    @property
    def value_shape(self):
        return () if self.ncomp == 1 else (self.ncomp,)

    def tabulate(self, order, points):
        """Nodal basis values and derivatives, keyed by multi-index.

        Arrays are indexed [function][component][point].
        """
        if order > 2:
            raise OrderUnsupported(f"derivative order {order} not supported")
        tabs = tabulate_prime(self.prime, points, order)
        return {alpha: np.einsum("jck,kp->jcp", self.coeffs, tab)
                for alpha, tab in tabs.items()}

    def __repr__(self):
        return f"<{self.family}{self.degree} on {self.cell.kind}>"


def tabulate(element, order, points):
    """Tabulate any element of this module at the given points."""
    return element.tabulate(order, points)


def _entity_interior_lattice(cell, key, index, r):
    """Interior lattice points of one entity at resolution r."""
    dim = key[0]
    coords = cell.entity_coords(key, index)
    if dim == 0:
        return [tuple(coords[0])]
    if dim == 1:
        v0, v1 = coords
        return [tuple(v0 + (i / r) * (v1 - v0)) for i in range(1, r)]
    # Triangle interior: barycentric lattice with all weights positive.
    v0, v1, v2 = coords
    return [tuple(v0 + (i / r) * (v1 - v0) + (j / r) * (v2 - v0))
            for i in range(1, r) for j in range(1, r - i)]


def lagrange(cell, r):
    """Continuous Lagrange element with equispaced nodes (family P).

    Nodes attach to vertices first, then edges, then the interior,
    giving the H1 geometric decomposition.
    """
    if not 1 <= r <= MAX_DEGREE:
        raise DegreeUnsupported(f"P_r supports 1 <= r <= {MAX_DEGREE}")
    nodes = []
    entity_dofs = {}
    for key in sorted(cell.entities):
        entity_dofs[key] = {}
        for e in range(cell.entity_count(key)):
            pts = _entity_interior_lattice(cell, key, e, r)
            entity_dofs[key][e] = list(range(len(nodes), len(nodes) + len(pts)))
            nodes.extend(Functional.point_evaluation(p) for p in pts)
    prime = prime_basis(cell, r)
    C = nodal_coefficients(prime, nodes)
    return CiarletElement("P", cell, r, prime,
                          C.reshape(len(nodes), 1, prime.size),
                          nodes, entity_dofs, "H1", "identity")


def discontinuous_lagrange(cell, r):
    """Discontinuous Lagrange element (family DP); all DOFs interior."""
    if not 0 <= r <= MAX_DEGREE:
        raise DegreeUnsupported(f"DP_r supports 0 <= r <= {MAX_DEGREE}")
    if r == 0:
        pts = [tuple(np.mean(np.asarray(cell.vertices), axis=0))]
    elif cell.kind == "interval":
        pts = [(i / r,) for i in range(r + 1)]
    else:
        pts = [(i / r, j / r)
               for i in range(r + 1) for j in range(r + 1 - i)]
    nodes = [Functional.point_evaluation(p) for p in pts]
    top = (cell.dimension,)
    entity_dofs = {key: {e: [] for e in range(cell.entity_count(key))}
                   for key in sorted(cell.entities)}
    entity_dofs[top][0] = list(range(len(nodes)))
    prime = prime_basis(cell, r)
    C = nodal_coefficients(prime, nodes)
    return CiarletElement("DP", cell, r, prime,
                          C.reshape(len(nodes), 1, prime.size),
                          nodes, entity_dofs, "L2", "identity")


def _edge_frames(cell):
    """Per edge: vertex coords, unit tangent, outward unit normal, length."""
    bary = np.mean(np.asarray(cell.vertices), axis=0)
    frames = []
    for e in range(cell.entity_count((1,))):
        v = cell.entity_coords((1,), e)
        t = v[1] - v[0]
        length = float(np.linalg.norm(t))
        t = t / length
        n = np.array([t[1], -t[0]])
        if np.dot(n, 0.5 * (v[0] + v[1]) - bary) < 0:
            n = -n
        frames.append((v, t, n, length))
    return frames


def raviart_thomas_face(cell, r):
    """Raviart-Thomas face element on the triangle (family RTF).

    Span [P_{r-1}]^2 + x * (homogeneous degree r - 1), dimension
    r(r + 2).  Nodes are normal moments against shifted Legendre
    polynomials on each edge (scaled by edge length, so the lowest
    moment is the plain flux) and interior moments against [P_{r-2}]^2.
    """
    if cell.kind != "triangle":
        raise ValueError("RTF is defined on the triangle")
    if not 1 <= r <= MAX_RT_DEGREE:
        raise DegreeUnsupported(f"RTF_r supports 1 <= r <= {MAX_RT_DEGREE}")

    prime = prime_basis(cell, r)
    nk = prime.size
    nk1 = (r * (r + 1)) // 2          # primes of degree <= r - 1
    nk2 = ((r - 1) * r) // 2          # primes of degree <= r - 2
    vol = simplex_rule(cell, 2 * r)
    psi = prime_values(prime, vol.points)

    # Spanning set in prime coefficients, shape (dim, 2, nk).
    span = []
    for c in range(2):
        for k in range(nk1):
            s = np.zeros((2, nk))
            s[c, k] = 1.0
            span.append(s)
    x, y = vol.points[:, 0], vol.points[:, 1]
    for a in range(r):
        mono = x**a * y**(r - 1 - a)
        s = np.empty((2, nk))
        s[0] = psi @ (vol.weights * x * mono)
        s[1] = psi @ (vol.weights * y * mono)
        span.append(s)
    span = np.asarray(span)

    edge_prime = prime_basis(make_interval_cache(), r - 1)
    gl = gauss_legendre(r + 1)
    t = gl.points[:, 0]
    qvals = prime_values(edge_prime, gl.points)

    nodes = []
    entity_dofs = {(0,): {e: [] for e in range(3)}, (1,): {}, (2,): {}}
    for e, (v, _, n, length) in enumerate(_edge_frames(cell)):
        pts = v[0] + np.outer(t, v[1] - v[0])
        ids = []
        for m in range(r):
            w = np.outer(gl.weights * length * qvals[m], n)
            ids.append(len(nodes))
            nodes.append(Functional(pts, w))
        entity_dofs[(1,)][e] = ids
    interior = []
    for c in range(2):
        for k in range(nk2):
            w = np.zeros((len(vol.points), 2))
            w[:, c] = vol.weights * psi[k]
            interior.append(len(nodes))
            nodes.append(Functional(vol.points, w))
    entity_dofs[(2,)][0] = interior

    V = np.empty((len(nodes), len(span)))
    for i, node in enumerate(nodes):
        tab = prime_values(prime, node.points)
        wk = np.einsum("pc,kp->ck", node.weights, tab)
        V[i] = np.einsum("jck,ck->j", span, wk)
    if np.linalg.cond(V) > 1e12:
        raise SingularVandermonde("RT node set is not unisolvent")
    coeffs = np.einsum("mj,mck->jck", np.linalg.inv(V), span)
    return CiarletElement("RTF", cell, r, prime, coeffs, nodes,
                          entity_dofs, "HDiv", "contravariantPiola")


_INTERVAL = None


def make_interval_cache():
    global _INTERVAL
    if _INTERVAL is None:
        from .cells import make_simplex
        _INTERVAL = make_simplex("interval")
    return _INTERVAL


ROTATE_MAP = [(1, -1.0), (0, 1.0)]      # (f_x, f_y) -> (-f_y, f_x)


def rotate_90(element):
    """Rotate a 2-vector element by 90 degrees: (f_x, f_y) -> (-f_y, f_x).

    Continuity and mapping toggle between the div- and curl-conforming
    kinds; entity DOF layout is unchanged, with edge normals becoming
    tangents.
    """
    if element.value_shape != (2,) or element.cell.dimension != 2:
        raise NotVector2D("rotate_90 needs a 2-vector element on a 2D cell")
    coeffs = np.empty_like(element.coeffs)
    coeffs[:, 0] = -element.coeffs[:, 1]
    coeffs[:, 1] = element.coeffs[:, 0]
    nodes = [map_components(n, ROTATE_MAP) for n in element.nodes]
    toggle_cont = {"HDiv": "HCurl", "HCurl": "HDiv"}
    toggle_map = {"contravariantPiola": "covariantPiola",
                  "covariantPiola": "contravariantPiola"}
    family = {"RTF": "RTE", "RTE": "RTF"}.get(element.family,
                                              element.family + "rot")
    return CiarletElement(
        family, element.cell, element.degree, element.prime, coeffs,
        nodes, element.entity_dofs,
        toggle_cont.get(element.continuity, element.continuity),
        toggle_map.get(element.mapping, element.mapping))
