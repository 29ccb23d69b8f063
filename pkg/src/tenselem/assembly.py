"""Forms, interpolation, norms and solvers on extruded meshes.

Four forms are built in: mass, stiffness, the mixed Poisson blocks and
the upwind DG advection operator.  Cell kernels are vectorized over
all cells of the mesh; scatter applies per-cell orientation signs.
Facet terms exist for line-base (quadrilateral) meshes, where every
facet of a bilinear cell is a straight segment and the normal-times-
measure factor is the rotated edge vector.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .errors import IncompatibleSpaces, NoConvergence, NotBlockDiagonal
from .mesh import (
    cell_geometry,
    facet_reference_points,
    facet_sets,
    pushforward,
)
from .quadrature import cell_rule, gauss_legendre


class FieldFunction:
    """Coefficients over a function space."""

    def __init__(self, space, coefficients):
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.shape != (space.ndof,):
            raise ValueError("one coefficient per global DOF required")
        self.space = space
        self.coefficients = coefficients

    def values_on_cells(self, points, geom=None):
        """Physical values per cell at reference points, (cell, comp, pt)."""
        space = self.space
        if geom is None:
            geom = cell_geometry(space.mesh, points)
        table = space.element.tabulate(0, points)
        phys = pushforward(space.element.mapping, table, geom)
        local = space.cell_coefficients(self.coefficients)
        zero = (0,) * space.mesh.cell.dimension
        return np.einsum("cj,cjap->cap", local, phys[zero])


def _check_spaces(spaces, mesh, n):
    if len(spaces) != n:
        raise IncompatibleSpaces(f"form needs {n} space(s)")
    for s in spaces:
        if s.mesh is not mesh:
            raise IncompatibleSpaces("spaces live on different meshes")


def _scatter(space_row, space_col, cellmats):
    rows = np.broadcast_to(space_row.gdofs[:, :, None], cellmats.shape)
    cols = np.broadcast_to(space_col.gdofs[:, None, :], cellmats.shape)
    vals = (cellmats * space_row.signs[:, :, None]
            * space_col.signs[:, None, :])
    A = sp.coo_matrix(
        (vals.ravel(), (rows.ravel(), cols.ravel())),
        shape=(space_row.ndof, space_col.ndof))
    return A.tocsr()


def _mass_cell_matrices(space, rule, geom):
    el = space.element
    zero = (0,) * space.mesh.cell.dimension
    phys = pushforward(el.mapping, el.tabulate(0, rule.points), geom)
    w = rule.weights[None, :] * geom.detJ
    return np.einsum("cjap,ckap,cp->cjk", phys[zero], phys[zero], w)


def assemble(form, spaces, mesh, quadrature_degree, **params):
    """Assemble one of the built-in forms over the mesh.

    mass -> M; stiffness -> K (identity-mapped scalar spaces);
    mixedPoisson -> {"M": vector mass, "B": div coupling};
    dgAdvection -> upwind transport operator for a given velocity
    (params: velocity=(fx, fy) FieldFunctions, flip=False to upwind
    against the reversed velocity).
    """
    spaces = tuple(spaces)
    if form == "mass":
        _check_spaces(spaces, mesh, 1)
        rule = cell_rule(mesh.cell, quadrature_degree)
        geom = cell_geometry(mesh, rule.points)
        return _scatter(spaces[0], spaces[0],
                        _mass_cell_matrices(spaces[0], rule, geom))
    if form == "stiffness":
        _check_spaces(spaces, mesh, 1)
        return _stiffness(spaces[0], mesh, quadrature_degree)
    if form == "mixedPoisson":
        _check_spaces(spaces, mesh, 2)
        return _mixed_poisson(spaces[0], spaces[1], mesh, quadrature_degree)
    if form == "dgAdvection":
        _check_spaces(spaces, mesh, 1)
        return _dg_advection(spaces[0], mesh, quadrature_degree,
                             params["velocity"], params.get("flip", False))
    raise ValueError(f"unknown form {form!r}")


def _stiffness(space, mesh, qdeg):
    el = space.element
    if el.mapping != "identity" or el.value_shape != ():
        raise IncompatibleSpaces("stiffness needs a scalar identity space")
    dim = mesh.cell.dimension
    rule = cell_rule(mesh.cell, qdeg)
    geom = cell_geometry(mesh, rule.points)
    phys = pushforward("identity", el.tabulate(1, rule.points), geom)
    units = [tuple(1 if i == k else 0 for i in range(dim))
             for k in range(dim)]
    grads = np.stack([phys[u][:, :, 0, :] for u in units], axis=-1)
    w = rule.weights[None, :] * geom.detJ
    cellmats = np.einsum("cjpd,ckpd,cp->cjk", grads, grads, w)
    return _scatter(space, space, cellmats)


def _mixed_poisson(sigma_space, u_space, mesh, qdeg):
    if sigma_space.element.mapping != "contravariantPiola":
        raise IncompatibleSpaces("flux space must be div-conforming")
    if u_space.element.value_shape != ():
        raise IncompatibleSpaces("potential space must be scalar")
    rule = cell_rule(mesh.cell, qdeg)
    geom = cell_geometry(mesh, rule.points)
    M = _scatter(sigma_space, sigma_space,
                 _mass_cell_matrices(sigma_space, rule, geom))
    # Contravariant divergence: div_x sigma = (1/detJ) ref-div, so the
    # coupling with an identity-mapped test function is geometry-free.
    dim = mesh.cell.dimension
    tab = sigma_space.element.tabulate(1, rule.points)
    refdiv = sum(tab[tuple(1 if i == k else 0 for i in range(dim))][:, k, :]
                 for k in range(dim))
    uvals = u_space.element.tabulate(0, rule.points)[(0,) * dim][:, 0, :]
    bref = np.einsum("kp,jp,p->kj", uvals, refdiv, rule.weights)
    bcell = np.broadcast_to(bref[None], (mesh.ncells,) + bref.shape)
    return {"M": M, "B": _scatter(u_space, sigma_space, bcell)}


def _field_values_at(fields, cells, table_zero):
    """Stack scalar identity fields to (nsel, npts, nfields)."""
    out = []
    for f in fields:
        local = (f.coefficients[f.space.gdofs[cells]]
                 * f.space.signs[cells])
        out.append(np.einsum("cj,jp->cp", local, table_zero))
    return np.stack(out, axis=-1)


def _dg_advection(space, mesh, qdeg, velocity, flip):
    el = space.element
    if el.continuity != "L2":
        raise IncompatibleSpaces("dgAdvection needs a discontinuous space")
    dim = mesh.cell.dimension
    zero = (0,) * dim
    vel_el = velocity[0].space.element
    for f in velocity:
        if f.space.mesh is not mesh:
            raise IncompatibleSpaces("velocity lives on a different mesh")

    rule = cell_rule(mesh.cell, qdeg)
    geom = cell_geometry(mesh, rule.points)
    phys = pushforward("identity", el.tabulate(1, rule.points), geom)
    units = [tuple(1 if i == k else 0 for i in range(dim))
             for k in range(dim)]
    grads = np.stack([phys[u][:, :, 0, :] for u in units], axis=-1)
    vals = el.tabulate(0, rule.points)[zero][:, 0, :]
    vel_tab = vel_el.tabulate(0, rule.points)[zero][:, 0, :]
    u_at = _field_values_at(velocity, np.arange(mesh.ncells), vel_tab)
    w = rule.weights[None, :] * geom.detJ
    cellmats = np.einsum("cipd,cpd,jp,cp->cij", grads, u_at, vals, w)
    rows, cols, data = [], [], []

    def add(r, c, v):
        rows.append(r.ravel())
        cols.append(c.ravel())
        data.append(v.ravel())

    gd = space.gdofs
    add(np.broadcast_to(gd[:, :, None], cellmats.shape),
        np.broadcast_to(gd[:, None, :], cellmats.shape), cellmats)

    nq = (qdeg + 2) // 2
    gl = gauss_legendre(nq)
    t = gl.points[:, 0]
    coords = mesh.coordinates
    fs = facet_sets(mesh)

    for rec in fs["interior"].values():
        if len(rec["minus"]) == 0:
            continue
        pm = facet_reference_points(rec["minus_entity"], t)
        pp = facet_reference_points(rec["plus_entity"], t)
        trm = el.tabulate(0, pm)[zero][:, 0, :]
        trp = el.tabulate(0, pp)[zero][:, 0, :]
        vel_tr = vel_el.tabulate(0, pm)[zero][:, 0, :]
        u_f = _field_values_at(velocity, rec["minus"], vel_tr)
        A, B = coords[rec["vstart"]], coords[rec["vend"]]
        T = B - A
        nraw = np.stack([T[:, 1], -T[:, 0]], axis=-1)
        mid = 0.5 * (A + B)
        cent = np.mean(coords[mesh.cell_vertices[rec["minus"]]], axis=1)
        orient = np.sign(np.einsum("fd,fd->f", nraw, mid - cent))
        nds = nraw * orient[:, None]
        un = np.einsum("fpd,fd->fp", u_f, nds)
        if flip:
            un_sel = -un
        else:
            un_sel = un
        wm = gl.weights[None, :] * un * (un_sel >= 0)
        wp = gl.weights[None, :] * un * (un_sel < 0)
        gm, gp = gd[rec["minus"]], gd[rec["plus"]]
        for wgt, src, gsrc in ((wm, trm, gm), (wp, trp, gp)):
            blk_m = np.einsum("fp,ip,jp->fij", wgt, trm, src)
            blk_p = np.einsum("fp,ip,jp->fij", wgt, trp, src)
            add(np.broadcast_to(gm[:, :, None], blk_m.shape),
                np.broadcast_to(gsrc[:, None, :], blk_m.shape), -blk_m)
            add(np.broadcast_to(gp[:, :, None], blk_p.shape),
                np.broadcast_to(gsrc[:, None, :], blk_p.shape), blk_p)

    for rec in fs["exterior"].values():
        cells = np.atleast_1d(rec["cell"])
        pref = facet_reference_points(rec["entity"], t)
        tr = el.tabulate(0, pref)[zero][:, 0, :]
        vel_tr = vel_el.tabulate(0, pref)[zero][:, 0, :]
        u_f = _field_values_at(velocity, cells, vel_tr)
        A, B = coords[rec["vstart"]], coords[rec["vend"]]
        T = B - A
        nraw = np.stack([T[:, 1], -T[:, 0]], axis=-1)
        mid = 0.5 * (A + B)
        cent = np.mean(coords[mesh.cell_vertices[cells]], axis=1)
        orient = np.sign(np.einsum("fd,fd->f", nraw, mid - cent))
        nds = nraw * orient[:, None]
        un = np.einsum("fpd,fd->fp", u_f, nds)
        un_sel = -un if flip else un
        # Outflow takes the interior trace; inflow data is zero.
        wgt = gl.weights[None, :] * un * (un_sel > 0)
        blk = np.einsum("fp,ip,jp->fij", wgt, tr, tr)
        g = gd[cells]
        add(np.broadcast_to(g[:, :, None], blk.shape),
            np.broadcast_to(g[:, None, :], blk.shape), -blk)

    A = sp.coo_matrix(
        (np.concatenate(data),
         (np.concatenate(rows), np.concatenate(cols))),
        shape=(space.ndof, space.ndof))
    return A.tocsr()


def load_vector(space, fn, quadrature_degree):
    """Assemble b_i = integral of fn times the i-th basis function."""
    mesh = space.mesh
    el = space.element
    rule = cell_rule(mesh.cell, quadrature_degree)
    geom = cell_geometry(mesh, rule.points)
    zero = (0,) * mesh.cell.dimension
    phys = pushforward(el.mapping, el.tabulate(0, rule.points), geom)
    fx = np.asarray(fn(geom.x.reshape(-1, mesh.cell.dimension)))
    fx = fx.reshape(geom.ncells, len(rule.points), -1)
    w = rule.weights[None, :] * geom.detJ
    cellvecs = np.einsum("cjap,cpa,cp->cj", phys[zero], fx, w)
    b = np.zeros(space.ndof)
    np.add.at(b, space.gdofs, cellvecs * space.signs)
    return b


def boundary_load(space, flux, quadrature_degree):
    """Assemble the natural-boundary term with flux density g(x, n).

    flux receives physical points (N, d) and outward unit normals
    (N, d) and returns scalar values; the result is added against the
    trace of each basis function.
    """
    mesh = space.mesh
    el = space.element
    zero = (0,) * mesh.cell.dimension
    nq = (quadrature_degree + 2) // 2
    gl = gauss_legendre(nq)
    t = gl.points[:, 0]
    coords = mesh.coordinates
    b = np.zeros(space.ndof)
    for rec in facet_sets(mesh)["exterior"].values():
        cells = np.atleast_1d(rec["cell"])
        pref = facet_reference_points(rec["entity"], t)
        tr = el.tabulate(0, pref)[zero][:, 0, :]
        A, B = coords[rec["vstart"]], coords[rec["vend"]]
        T = B - A
        nraw = np.stack([T[:, 1], -T[:, 0]], axis=-1)
        mid = 0.5 * (A + B)
        cent = np.mean(coords[mesh.cell_vertices[cells]], axis=1)
        orient = np.sign(np.einsum("fd,fd->f", nraw, mid - cent))
        nds = nraw * orient[:, None]
        ds = np.linalg.norm(nds, axis=1)
        nunit = nds / ds[:, None]
        pts = A[:, None, :] + t[None, :, None] * T[:, None, :]
        g = np.asarray(flux(pts.reshape(-1, 2),
                            np.repeat(nunit, len(t), axis=0)))
        g = g.reshape(len(cells), len(t))
        cellvecs = np.einsum("fp,ip,p,f->fi", g, tr, gl.weights, ds)
        np.add.at(b, space.gdofs[cells],
                  cellvecs * space.signs[cells])
    return b


class BlockInverse:
    """Per-cell dense inverses of a block-diagonal operator."""

    def __init__(self, gdofs, inverses):
        self.gdofs = gdofs
        self.inverses = inverses

    def apply(self, vec):
        out = np.empty_like(vec)
        local = np.einsum("cij,cj->ci", self.inverses, vec[self.gdofs])
        out[self.gdofs.ravel()] = local.ravel()
        return out


def invert_block_diagonal_mass(space, quadrature_degree):
    """Cellwise inverse of the mass matrix of a fully discontinuous space."""
    flat = space.gdofs.ravel()
    if len(np.unique(flat)) != space.ndof or flat.size != space.ndof:
        raise NotBlockDiagonal("space shares DOFs between cells")
    rule = cell_rule(space.mesh.cell, quadrature_degree)
    geom = cell_geometry(space.mesh, rule.points)
    blocks = _mass_cell_matrices(space, rule, geom)
    return BlockInverse(space.gdofs, np.linalg.inv(blocks))


def solve_cg(A, b, tol=1e-10, maxiter=20000):
    """Unpreconditioned conjugate gradients; A is a matrix or callable."""
    matvec = A if callable(A) else (lambda v: A @ v)
    x = np.zeros_like(b)
    r = b - matvec(x)
    p = r.copy()
    rs = float(r @ r)
    bnorm = float(np.sqrt(b @ b)) or 1.0
    for _ in range(maxiter):
        if np.sqrt(rs) <= tol * bnorm:
            return x
        Ap = matvec(p)
        alpha = rs / float(p @ Ap)
        x = x + alpha * p
        r = r - alpha * Ap
        rs_new = float(r @ r)
        p = r + (rs_new / rs) * p
        rs = rs_new
    if np.sqrt(rs) <= tol * bnorm:
        return x
    raise NoConvergence(f"cg did not reach tol {tol} in {maxiter} iterations")


def interpolate(fn, space):
    """Apply the element's node functionals to a physical expression.

    Vector expressions are pulled back per the element's mapping kind
    before the reference node weights are applied.
    """
    mesh = space.mesh
    el = space.element
    dim = mesh.cell.dimension
    coefs = np.zeros(space.ndof)
    for j, node in enumerate(el.nodes):
        geom = cell_geometry(mesh, node.points)
        raw = np.asarray(fn(geom.x.reshape(-1, dim)), dtype=float)
        v = raw.reshape(geom.ncells, len(node.points), -1)
        if el.mapping == "identity":
            vhat = v
        elif el.mapping == "contravariantPiola":
            Jinv = geom.JinvT.transpose(0, 1, 3, 2)
            vhat = geom.detJ[:, :, None] * np.einsum(
                "cpmi,cpi->cpm", Jinv, v)
        elif el.mapping == "covariantPiola":
            vhat = np.einsum("cpim,cpi->cpm", geom.J, v)
        else:
            raise ValueError(f"cannot interpolate into mapping {el.mapping!r}")
        local = np.einsum("pm,cpm->c", node.weights, vhat)
        coefs[space.gdofs[:, j]] = space.signs[:, j] * local
    return FieldFunction(space, coefs)


def l2_error(field, exact, quadrature_degree):
    """L2 distance between a field and a physical-space callback."""
    space = field.space
    mesh = space.mesh
    rule = cell_rule(mesh.cell, quadrature_degree)
    geom = cell_geometry(mesh, rule.points)
    vals = field.values_on_cells(rule.points, geom=geom)
    ex = np.asarray(exact(geom.x.reshape(-1, mesh.cell.dimension)))
    ex = ex.reshape(geom.ncells, len(rule.points), -1).transpose(0, 2, 1)
    diff = vals - ex
    w = rule.weights[None, :] * geom.detJ
    return float(np.sqrt(np.einsum("cap,cap,cp->", diff, diff, w)))


def ssprk3_step(state, rhs, dt, t=0.0):
    """One strong-stability-preserving RK3 step of q' = rhs(q, t)."""
    q1 = state + dt * rhs(state, t)
    q2 = 0.75 * state + 0.25 * (q1 + dt * rhs(q1, t + dt))
    return state / 3.0 + (2.0 / 3.0) * (q2 + dt * rhs(q2, t + 0.5 * dt))
