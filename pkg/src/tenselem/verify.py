"""Self-check registry behind the verify subcommand.

Each check is a zero-argument callable returning None on success or a
short failure message.  Checks are grouped into suites named after the
library layer they exercise; run() executes one suite or all of them.
"""

from __future__ import annotations

import numpy as np

from . import families
from .algebra import (component_map_string, mapping_label, tensor_product)
from .assembly import (assemble, interpolate, invert_block_diagonal_mass,
                       solve_cg, ssprk3_step)
from .bases import prime_basis, tabulate_prime
from .cells import facet_regions, flatten_cell, make_simplex, product_cell
from .mesh import ExtrudedMesh, build_space, cell_geometry, line_base
from .quadrature import cell_rule, facet_rule, gauss_legendre, simplex_rule
from .simplex import (discontinuous_lagrange, lagrange, raviart_thomas_face)

CHECKS = []


def _check(suite, name):
    def register(fn):
        CHECKS.append((suite, name, fn))
        return fn
    return register


def available_suites():
    seen = []
    for suite, _, _ in CHECKS:
        if suite not in seen:
            seen.append(suite)
    return seen


def run(suite=None):
    """Run one suite (or all); returns (suite, name, ok, detail) rows."""
    if suite is not None and suite not in available_suites():
        raise ValueError(f"unknown suite {suite!r}; "
                         f"available: {', '.join(available_suites())}")
    results = []
    for s, name, fn in CHECKS:
        if suite is not None and s != suite:
            continue
        try:
            detail = fn()
        except Exception as exc:
            detail = f"{type(exc).__name__}: {exc}"
        results.append((s, name, detail is None, detail or ""))
    return results


def _duality_defect(element):
    V = np.array([node.apply_table(element.tabulate(0, node.points)[
        (0,) * element.cell.dimension]) for node in element.nodes])
    return float(np.abs(V - np.eye(element.ndof)).max())


# cells

@_check("cells", "simplex structure")
def _simplex_structure():
    tri = make_simplex("triangle")
    if tri.entity_count((0,)) != 3 or tri.entity_count((1,)) != 3:
        return "triangle entity counts wrong"
    for e in range(3):
        if e in tri.entities[(1,)][e]:
            return f"edge {e} touches vertex {e}"
    itv = make_simplex("interval")
    if itv.dimension != 1 or itv.entity_count((0,)) != 2:
        return "interval structure wrong"
    return None


@_check("cells", "product entity counts")
def _product_counts():
    itv = make_simplex("interval")
    quad = product_cell(itv, itv)
    want = {(0, 0): 4, (1, 0): 2, (0, 1): 2, (1, 1): 1}
    got = {k: quad.entity_count(k) for k in quad.entities}
    if got != want:
        return f"quad counts {got}"
    prism = product_cell(make_simplex("triangle"), itv)
    want = {(0, 0): 6, (0, 1): 3, (1, 0): 6, (1, 1): 3, (2, 0): 2, (2, 1): 1}
    got = {k: prism.entity_count(k) for k in prism.entities}
    if got != want:
        return f"prism counts {got}"
    return None


@_check("cells", "flattened quadrilateral")
def _flatten_quad():
    itv = make_simplex("interval")
    quad = flatten_cell(product_cell(itv, itv))
    got = {k: quad.entity_count(k) for k in quad.entities}
    if got != {(0,): 4, (1,): 4, (2,): 1}:
        return f"flat quad counts {got}"
    regions = facet_regions(product_cell(itv, itv))
    if set(regions) != {"horizontal", "vertical"}:
        return f"facet regions {sorted(regions)}"
    return None


# bases

@_check("bases", "interval orthonormality")
def _interval_orthonormal():
    basis = prime_basis(make_simplex("interval"), 5)
    rule = gauss_legendre(8)
    vals = tabulate_prime(basis, rule.points, 0)[(0,)]
    gram = np.einsum("kp,lp,p->kl", vals, vals, rule.weights)
    defect = np.abs(gram - np.eye(basis.size)).max()
    return None if defect < 1e-12 else f"gram defect {defect:.2e}"


@_check("bases", "triangle orthonormality")
def _triangle_orthonormal():
    tri = make_simplex("triangle")
    basis = prime_basis(tri, 4)
    rule = simplex_rule(tri, 10)
    vals = tabulate_prime(basis, rule.points, 0)[(0, 0)]
    gram = np.einsum("kp,lp,p->kl", vals, vals, rule.weights)
    defect = np.abs(gram - np.eye(basis.size)).max()
    return None if defect < 1e-12 else f"gram defect {defect:.2e}"


@_check("bases", "derivatives match finite differences")
def _derivative_fd():
    tri = make_simplex("triangle")
    basis = prime_basis(tri, 3)
    pts = np.array([[0.21, 0.33], [0.4, 0.11], [0.05, 0.6]])
    h = 1e-6
    tabs = tabulate_prime(basis, pts, 1)
    for axis, alpha in ((0, (1, 0)), (1, (0, 1))):
        step = np.zeros(2)
        step[axis] = h
        up = tabulate_prime(basis, pts + step, 0)[(0, 0)]
        dn = tabulate_prime(basis, pts - step, 0)[(0, 0)]
        defect = np.abs((up - dn) / (2 * h) - tabs[alpha]).max()
        if defect > 1e-5:
            return f"axis {axis} fd defect {defect:.2e}"
    return None


# simplex elements

@_check("simplex", "Lagrange duality")
def _lagrange_duality():
    defect = _duality_defect(lagrange(make_simplex("triangle"), 4))
    return None if defect < 1e-10 else f"defect {defect:.2e}"


@_check("simplex", "discontinuous Lagrange duality")
def _dp_duality():
    defect = _duality_defect(discontinuous_lagrange(make_simplex("triangle"), 3))
    return None if defect < 1e-10 else f"defect {defect:.2e}"


@_check("simplex", "Raviart-Thomas duality")
def _rt_duality():
    tri = make_simplex("triangle")
    for el in (raviart_thomas_face(tri, 3),
               families.raviart_thomas_edge(2)):
        defect = _duality_defect(el)
        if defect > 1e-10:
            return f"{el.family}{el.degree} defect {defect:.2e}"
    return None


@_check("simplex", "partition of unity")
def _partition_of_unity():
    tri = make_simplex("triangle")
    pts = np.array([[0.2, 0.3], [0.1, 0.05], [0.33, 0.64], [0.5, 0.25]])
    vals = lagrange(tri, 3).tabulate(0, pts)[(0, 0)]
    defect = np.abs(vals.sum(axis=0) - 1.0).max()
    return None if defect < 1e-12 else f"defect {defect:.2e}"


# product algebra

_TABLE_2D_ROWS = [
    ("P", "P", None, "fg", "identity"),
    ("P", "DP", None, "fg", "identity"),
    ("P", "DP", "hcurl", "(0, fg)", "covariant Piola"),
    ("P", "DP", "hdiv", "(-fg, 0)", "contravariant Piola"),
    ("DP", "P", None, "fg", "identity"),
    ("DP", "P", "hcurl", "(fg, 0)", "covariant Piola"),
    ("DP", "P", "hdiv", "(0, fg)", "contravariant Piola"),
    ("DP", "DP", None, "fg", "identity"),
]

_TABLE_3D_ROWS = [
    ("P", "P", None, "fg", "identity"),
    ("P", "DP", None, "fg", "identity"),
    ("P", "DP", "hcurl", "(0, 0, fg)", "covariant Piola"),
    ("RTE", "P", None, "(f_x g, f_y g)", "*"),
    ("RTE", "P", "hcurl", "(f_x g, f_y g, 0)", "covariant Piola"),
    ("RTF", "P", None, "(f_x g, f_y g)", "*"),
    ("RTF", "P", "hcurl", "(-f_y g, f_x g, 0)", "covariant Piola"),
    ("RTE", "DP", None, "(f_x g, f_y g)", "*"),
    ("RTE", "DP", "hdiv", "(f_y g, -f_x g, 0)", "contravariant Piola"),
    ("RTF", "DP", None, "(f_x g, f_y g)", "*"),
    ("RTF", "DP", "hdiv", "(f_x g, f_y g, 0)", "contravariant Piola"),
    ("DP", "P", None, "fg", "identity"),
    ("DP", "P", "hdiv", "(0, 0, fg)", "contravariant Piola"),
    ("DP", "DP", None, "fg", "identity"),
]


def _table_factor(name, cell, degree=1):
    from .algebra import hcurl, hdiv
    if name == "P":
        return lagrange(cell, degree)
    if name == "DP":
        return discontinuous_lagrange(cell, degree)
    if name == "RTF":
        return raviart_thomas_face(cell, degree)
    if name == "RTE":
        return families.raviart_thomas_edge(degree)
    raise ValueError(name)


def table_row_strings(rows, a_cell):
    """(componentMap, mapping) strings built for each table row."""
    from .algebra import hcurl, hdiv
    itv = make_simplex("interval")
    out = []
    for a_name, b_name, modifier, _, _ in rows:
        element = tensor_product(_table_factor(a_name, a_cell),
                                 _table_factor(b_name, itv))
        if modifier == "hcurl":
            element = hcurl(element)
        elif modifier == "hdiv":
            element = hdiv(element)
        out.append((component_map_string(element), mapping_label(element)))
    return out


@_check("algebra", "2D component table")
def _table_2d():
    itv = make_simplex("interval")
    got = table_row_strings(_TABLE_2D_ROWS, itv)
    for row, (comp, mapping) in zip(_TABLE_2D_ROWS, got):
        if (comp, mapping) != (row[3], row[4]):
            return f"row {row[:3]} built ({comp}, {mapping})"
    return None


@_check("algebra", "3D component table")
def _table_3d():
    tri = make_simplex("triangle")
    got = table_row_strings(_TABLE_3D_ROWS, tri)
    for row, (comp, mapping) in zip(_TABLE_3D_ROWS, got):
        if (comp, mapping) != (row[3], row[4]):
            return f"row {row[:3]} built ({comp}, {mapping})"
    return None


@_check("algebra", "product duality")
def _product_duality():
    for el in (families.q_quad(2), families.rtcf_quad(2),
               families.ncf_prism(1)):
        defect = _duality_defect(el)
        if defect > 1e-10:
            return f"defect {defect:.2e}"
    return None


@_check("algebra", "factored tabulation")
def _factored_tabulation():
    rng = np.random.default_rng(3)
    el = families.rtcf_quad(2)
    pts = rng.uniform(0.05, 0.95, (6, 2))
    tabs = el.tabulate(1, pts)
    for alpha, table in tabs.items():
        direct = []
        for part in el.parts:
            base = part.base
            ta = base.A.tabulate(1, pts[:, :1])[(alpha[0],)]
            tb = base.B.tabulate(1, pts[:, 1:])[(alpha[1],)]
            prod = np.einsum("iap,jbp->ijabp", ta, tb)
            prod = prod.reshape(base.ndof, 1, len(pts))
            embedded = np.zeros((base.ndof, 2, len(pts)))
            for c, (src, sign) in enumerate(part.component_map):
                if src is not None:
                    embedded[:, c, :] = sign * prod[:, src, :]
            direct.append(embedded)
        defect = np.abs(np.concatenate(direct) - table).max()
        if defect > 1e-12:
            return f"alpha {alpha} defect {defect:.2e}"
    return None


def complex_containment_defect(spaces, flavour="div", degree_hint=6):
    """Worst least-squares residual of d(W_k) against span(W_{k+1})."""
    cell = spaces[0].cell
    dim = cell.dimension
    rule = cell_rule(cell, degree_hint)
    sw = np.sqrt(rule.weights)
    worst = 0.0
    for k in range(len(spaces) - 1):
        Wk, Wnext = spaces[k], spaces[k + 1]
        tabs = Wk.tabulate(1, rule.points)
        if dim == 2:
            dx = tabs[(1, 0)]
            dy = tabs[(0, 1)]
            if k == 0:
                image = (np.stack([dy[:, 0], -dx[:, 0]], axis=1)
                         if flavour == "div"
                         else np.stack([dx[:, 0], dy[:, 0]], axis=1))
            else:
                image = (dx[:, 0] + dy[:, 1] if flavour == "div"
                         else dx[:, 1] - dy[:, 0])[:, None, :]
        else:
            dx = tabs[(1, 0, 0)]
            dy = tabs[(0, 1, 0)]
            dz = tabs[(0, 0, 1)]
            if k == 0:
                image = np.stack([dx[:, 0], dy[:, 0], dz[:, 0]], axis=1)
            elif k == 1:
                image = np.stack([dy[:, 2] - dz[:, 1],
                                  dz[:, 0] - dx[:, 2],
                                  dx[:, 1] - dy[:, 0]], axis=1)
            else:
                image = (dx[:, 0] + dy[:, 1] + dz[:, 2])[:, None, :]
        span = Wnext.tabulate(0, rule.points)[(0,) * dim]
        ncomp = span.shape[1]
        A = (span * sw).reshape(Wnext.ndof, ncomp * len(rule.points)).T
        Bmat = (image * sw).reshape(Wk.ndof, ncomp * len(rule.points)).T
        coef = np.linalg.lstsq(A, Bmat, rcond=None)[0]
        resid = np.linalg.norm(Bmat - A @ coef, axis=0)
        scale = np.maximum(np.linalg.norm(Bmat, axis=0), 1.0)
        worst = max(worst, float((resid / scale).max()))
    return worst


@_check("algebra", "complex containment")
def _complex_containment():
    for flavour in ("div", "curl"):
        defect = complex_containment_defect(
            families.quad_complex(2, flavour), flavour)
        if defect > 1e-8:
            return f"quad {flavour} defect {defect:.2e}"
    defect = complex_containment_defect(families.prism_complex(2))
    return None if defect < 1e-8 else f"prism defect {defect:.2e}"


@_check("algebra", "enrichment dof merge")
def _enrichment_merge():
    el = families.rtcf_quad(1)
    edges = el.entity_dofs
    per_edge = sorted(len(edges[key][e]) for key in ((1, 0), (0, 1))
                      for e in range(2))
    interior = len(edges[(1, 1)][0])
    if per_edge != [1, 1, 1, 1] or interior != 0:
        return f"edge dofs {per_edge}, interior {interior}"
    return None


# quadrature

@_check("quadrature", "Gauss-Legendre exactness")
def _gl_exact():
    for k in range(1, 9):
        rule = gauss_legendre(k)
        p = 2 * k - 1
        val = float(rule.weights @ rule.points[:, 0] ** p)
        if abs(val - 1.0 / (p + 1)) > 1e-14:
            return f"n={k} error {abs(val - 1.0 / (p + 1)):.2e}"
    return None


@_check("quadrature", "triangle moments")
def _triangle_moments():
    from math import factorial
    tri = make_simplex("triangle")
    for degree in (2, 5, 8):
        rule = simplex_rule(tri, degree)
        for i in range(degree + 1):
            for j in range(degree + 1 - i):
                got = float(rule.weights
                            @ (rule.points[:, 0] ** i * rule.points[:, 1] ** j))
                want = (factorial(i) * factorial(j)) / factorial(i + j + 2)
                if abs(got - want) > 1e-13:
                    return f"x^{i} y^{j} at degree {degree}: {got - want:.2e}"
    return None


@_check("quadrature", "prism moments")
def _prism_moments():
    from math import factorial
    prism = product_cell(make_simplex("triangle"), make_simplex("interval"))
    rule = cell_rule(prism, 5)
    for (i, j, k) in ((0, 0, 0), (2, 1, 2), (1, 1, 1), (0, 3, 2)):
        got = float(rule.weights @ (rule.points[:, 0] ** i
                                    * rule.points[:, 1] ** j
                                    * rule.points[:, 2] ** k))
        want = (factorial(i) * factorial(j) / factorial(i + j + 2)) / (k + 1)
        if abs(got - want) > 1e-13:
            return f"moment {(i, j, k)} error {abs(got - want):.2e}"
    return None


@_check("quadrature", "facet measures")
def _facet_measures():
    itv = make_simplex("interval")
    quad = product_cell(itv, itv)
    for region in ("horizontal", "vertical"):
        total = 0.0
        for key in facet_regions(quad)[region]:
            for facet in range(quad.entity_count(key)):
                rule = facet_rule(quad, region, facet, 3)
                total += float(rule.weights.sum())
        if abs(total - 2.0) > 1e-14:
            return f"{region} measure {total}"
    return None


# mesh and assembly

@_check("mesh", "global dof counts")
def _dof_counts():
    mesh = ExtrudedMesh(line_base(2), 2, 0.5)
    counts = (build_space(mesh, families.q_quad(1)).ndof,
              build_space(mesh, families.dq_quad(1)).ndof,
              build_space(mesh, families.rtcf_quad(1)).ndof)
    return None if counts == (9, 16, 12) else f"counts {counts}"


@_check("mesh", "mass equals polygon area")
def _mass_area():
    rng = np.random.default_rng(11)
    mesh = ExtrudedMesh(line_base(3), 3, 1.0 / 3.0)
    mesh.coordinates += rng.uniform(-0.05, 0.05, mesh.coordinates.shape)
    space = build_space(mesh, families.dq_quad(0))
    rule = cell_rule(mesh.cell, 3)
    geom = cell_geometry(mesh, rule.points)
    areas = geom.detJ @ rule.weights
    shoelace = np.zeros(mesh.ncells)
    for c in range(mesh.ncells):
        cv = mesh.coordinates[mesh.cell_vertices[c]]
        poly = cv[[0, 2, 3, 1]]
        x, y = poly[:, 0], poly[:, 1]
        shoelace[c] = 0.5 * abs(np.dot(x, np.roll(y, -1))
                                - np.dot(y, np.roll(x, -1)))
    defect = np.abs(areas - shoelace).max()
    return None if defect < 1e-13 else f"defect {defect:.2e}"


@_check("mesh", "stiffness annihilates constants")
def _stiffness_nullspace():
    mesh = ExtrudedMesh(line_base(3), 3, 1.0 / 3.0, geometry="nonAffinePerturbed")
    space = build_space(mesh, families.q_quad(2))
    K = assemble("stiffness", (space,), mesh, 6)
    defect = np.abs(K @ np.ones(space.ndof)).max()
    return None if defect < 1e-12 else f"defect {defect:.2e}"


@_check("mesh", "interpolation reproduces polynomials")
def _interpolation_exact():
    mesh = ExtrudedMesh(line_base(2), 2, 0.5, geometry="nonAffinePerturbed")
    space = build_space(mesh, families.q_quad(2))

    def f(X):
        return 1.0 + 2.0 * X[:, 0] - X[:, 1] + 3.0 * X[:, 0] * X[:, 1]

    field = interpolate(f, space)
    rule = cell_rule(mesh.cell, 4)
    geom = cell_geometry(mesh, rule.points)
    vals = field.values_on_cells(rule.points, geom)[:, 0, :]
    want = f(geom.x.reshape(-1, 2)).reshape(vals.shape)
    defect = np.abs(vals - want).max()
    return None if defect < 1e-12 else f"defect {defect:.2e}"


# experiments layer

@_check("experiments", "reference interval mass matrix")
def _p1_mass():
    itv = make_simplex("interval")
    el = lagrange(itv, 1)
    rule = gauss_legendre(2)
    vals = el.tabulate(0, rule.points)[(0,)][:, 0, :]
    M = np.einsum("ip,jp,p->ij", vals, vals, rule.weights)
    want = np.array([[1 / 3, 1 / 6], [1 / 6, 1 / 3]])
    defect = np.abs(M - want).max()
    return None if defect < 1e-14 else f"defect {defect:.2e}"


@_check("experiments", "ssprk3 amplification")
def _ssprk3_amp():
    dt = 0.1
    state = np.array([1.0])
    out = ssprk3_step(state, lambda q, t: -q, dt)
    want = 1.0 - dt + dt ** 2 / 2.0 - dt ** 3 / 6.0
    defect = abs(float(out[0]) - want)
    return None if defect < 1e-14 else f"defect {defect:.2e}"


@_check("experiments", "upwind keeps the max bounded")
def _upwind_monotone():
    from .experiments import cosine_hill
    mesh = ExtrudedMesh(line_base(8), 8, 0.125)
    V = build_space(mesh, families.dq_quad(0))
    Q2 = build_space(mesh, families.q_quad(2))
    ones = interpolate(lambda X: np.ones(len(X)), Q2)
    zero = interpolate(lambda X: np.zeros(len(X)), Q2)
    A = assemble("dgAdvection", (V,), mesh, 4, velocity=(ones, zero))
    minv = invert_block_diagonal_mass(V, 4)
    q = interpolate(cosine_hill, V).coefficients
    peak = np.abs(q).max()
    dt = 0.3 / 8
    for _ in range(100):
        q = ssprk3_step(q, lambda s, t: minv.apply(A @ s), dt)
        now = np.abs(q).max()
        if now > peak + 1e-12:
            return f"max grew {peak:.6g} -> {now:.6g}"
        peak = now
    return None


@_check("experiments", "conjugate gradient residual")
def _cg_residual():
    rng = np.random.default_rng(5)
    B = rng.normal(size=(40, 40))
    A = B @ B.T + 40 * np.eye(40)
    b = rng.normal(size=40)
    x = solve_cg(A, b, tol=1e-12)
    rel = np.linalg.norm(b - A @ x) / np.linalg.norm(b)
    return None if rel < 1e-11 else f"residual {rel:.2e}"


@_check("experiments", "advection conserves mass")
def _mass_conserved():
    from .experiments import run_dg_advection
    _, drift = run_dg_advection(8, 0, return_mass_drift=True)
    return None if drift < 1e-10 else f"drift {drift:.2e}"
