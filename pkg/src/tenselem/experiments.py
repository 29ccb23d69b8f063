"""Convergence experiments on the structured unit-square mesh.

Three drivers: Poisson with natural boundary data on Q_r, mixed
Poisson on RTCF1 x DQ0, and upwind DG advection of a cosine hill in a
time-reversing swirl velocity.  Each returns the measured L2 error(s)
for one mesh size; rate helpers reduce error sequences.
"""

from __future__ import annotations

import numpy as np

from .assembly import (
    FieldFunction,
    assemble,
    boundary_load,
    interpolate,
    invert_block_diagonal_mass,
    l2_error,
    load_vector,
    solve_cg,
    ssprk3_step,
)
from .families import dq_quad, q_quad, rtcf_quad
from .mesh import ExtrudedMesh, build_space, line_base

HILL_RADIUS = 0.15
HILL_CENTRE = (0.25, 0.5)
PERIOD = 1.5


def unit_square_mesh(n, geometry="planar"):
    """n x n quadrilateral mesh of the unit square."""
    return ExtrudedMesh(line_base(n), n, 1.0 / n, geometry=geometry)


def _u_exact(X):
    return np.sin(np.pi * X[:, 0]) * np.sin(np.pi * X[:, 1])


def _poisson_source(X):
    return 2.0 * np.pi**2 * _u_exact(X)


def _u_grad(X):
    return np.pi * np.stack(
        [np.cos(np.pi * X[:, 0]) * np.sin(np.pi * X[:, 1]),
         np.sin(np.pi * X[:, 0]) * np.cos(np.pi * X[:, 1])], axis=-1)


def run_poisson(n, degree, tol=1e-11):
    """Neumann Poisson solve on Q_degree; returns the L2 error.

    The flux data is the exact normal derivative; the constant null
    space is removed by pinning the discrete mean to the exact mean
    through a rank-one augmentation.
    """
    mesh = unit_square_mesh(n)
    V = build_space(mesh, q_quad(degree))
    qdeg = 2 * degree + 2
    K = assemble("stiffness", (V,), mesh, qdeg)
    M = assemble("mass", (V,), mesh, qdeg)
    b = load_vector(V, _poisson_source, qdeg)
    b = b + boundary_load(
        V, lambda X, nrm: np.einsum("pd,pd->p", _u_grad(X), nrm), qdeg)
    ones = np.ones(V.ndof)
    m = M @ ones
    b = b - (float(ones @ b) / float(ones @ m)) * m
    mean_exact = 4.0 / np.pi**2
    sigma = float(K.diagonal().mean() / (m @ m))

    def op(x):
        return K @ x + sigma * m * float(m @ x)

    u = solve_cg(op, b + sigma * mean_exact * m, tol=tol)
    return l2_error(FieldFunction(V, u), _u_exact, qdeg + 2)


def run_mixed_poisson(n, tol=1e-10):
    """Mixed Poisson on RTCF1 x DQ0 via the Schur complement.

    sigma = -grad u, div sigma = f; returns (error_u, error_sigma).
    """
    mesh = unit_square_mesh(n)
    S = build_space(mesh, rtcf_quad(1))
    U = build_space(mesh, dq_quad(0))
    qdeg = 4
    blocks = assemble("mixedPoisson", (S, U), mesh, qdeg)
    M, B = blocks["M"], blocks["B"]
    F = load_vector(U, _poisson_source, qdeg)

    def schur(u):
        return B @ solve_cg(M, B.T @ u, tol=1e-12)

    u = solve_cg(schur, F, tol=tol)
    sig = solve_cg(M, B.T @ u, tol=1e-12)
    err_u = l2_error(FieldFunction(U, u), _u_exact, qdeg + 2)
    err_sig = l2_error(FieldFunction(S, sig),
                       lambda X: -_u_grad(X), qdeg + 2)
    return err_u, err_sig


def swirl_velocity_x(X):
    return np.sin(np.pi * X[:, 0]) ** 2 * np.sin(2.0 * np.pi * X[:, 1])


def swirl_velocity_y(X):
    return -np.sin(np.pi * X[:, 1]) ** 2 * np.sin(2.0 * np.pi * X[:, 0])


def cosine_hill(X):
    d = np.linalg.norm(X - np.asarray(HILL_CENTRE), axis=-1)
    return np.where(d < HILL_RADIUS,
                    0.5 * (1.0 + np.cos(np.pi * d / HILL_RADIUS)), 0.0)


def run_dg_advection(n, degree, return_mass_drift=False):
    """Advect the cosine hill for one reversing period on DQ_degree.

    The swirl velocity is modulated by cos(pi t / T), so the exact
    final state equals the initial one; the error is the L2 distance
    between the two discrete fields.  CFL 0.3 with the usual DG
    stability factor: dt = 0.3 dx / (2 degree + 1), so 5n(2r+1) steps.
    """
    mesh = unit_square_mesh(n)
    V = build_space(mesh, dq_quad(degree))
    Q2 = build_space(mesh, q_quad(2))
    ux = interpolate(swirl_velocity_x, Q2)
    uy = interpolate(swirl_velocity_y, Q2)
    qdeg = 2 * degree + 4
    a_fwd = assemble("dgAdvection", (V,), mesh, qdeg,
                     velocity=(ux, uy), flip=False)
    a_rev = assemble("dgAdvection", (V,), mesh, qdeg,
                     velocity=(ux, uy), flip=True)
    minv = invert_block_diagonal_mass(V, qdeg)
    M = assemble("mass", (V,), mesh, qdeg)

    def rhs(q, t):
        c = float(np.cos(np.pi * t / PERIOD))
        op = a_fwd if c >= 0 else a_rev
        return minv.apply(c * (op @ q))

    q = interpolate(cosine_hill, V).coefficients
    q0 = q.copy()
    steps = 5 * n * (2 * degree + 1)
    dt = PERIOD / steps
    mvec = M @ np.ones(V.ndof)
    mass0 = float(mvec @ q)
    drift = 0.0
    for s in range(steps):
        q = ssprk3_step(q, rhs, dt, t=s * dt)
        drift = max(drift, abs(float(mvec @ q) - mass0))
    diff = q - q0
    err = float(np.sqrt(diff @ (M @ diff)))
    if return_mass_drift:
        return err, drift / abs(mass0)
    return err


def observed_rates(errors):
    """log2 ratios of consecutive errors (mesh size doubling)."""
    e = np.asarray(errors, dtype=float)
    return list(np.log2(e[:-1] / e[1:]))
