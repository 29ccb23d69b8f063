"""Orthonormal prime bases on the interval and triangle.

The interval basis is shifted Legendre, orthonormal on [0, 1].  The
triangle basis is the Dubiner family, evaluated through a recurrence
that never forms the collapsed coordinate itself, so points on the
singular edge y = 1 are handled exactly.  Derivatives up to second
order are carried through the recurrences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import eval_jacobi, eval_legendre

from .errors import OrderUnsupported, SingularVandermonde

MAX_ORDER = 2


@dataclass(frozen=True)
class PrimeBasis:
    """Orthonormal polynomial basis of one value component per block.

    ncomp > 1 denotes the vector basis whose functions are e_c times
    the scalar prime functions, indexed component-major.
    """

    cell: object
    degree: int
    size: int
    ncomp: int = 1


def prime_basis(cell, degree, ncomp=1):
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if cell.kind == "interval":
        size = degree + 1
    elif cell.kind == "triangle":
        size = (degree + 1) * (degree + 2) // 2
    else:
        raise ValueError(f"no prime basis on cell kind {cell.kind!r}")
    return PrimeBasis(cell, degree, size, ncomp)


def multiindices(dim, order):
    """Derivative multi-indices with |alpha| <= order, graded order."""
    out = []
    for total in range(order + 1):
        def rec(prefix, remaining, slots):
            if slots == 1:
                out.append(tuple(prefix) + (remaining,))
                return
            for k in range(remaining, -1, -1):
                rec(prefix + [k], remaining - k, slots - 1)
        if dim == 0:
            if total == 0:
                out.append(())
        else:
            rec([], total, dim)
    return out


def _legendre_channels(degree, x):
    """Shifted Legendre values and x-derivatives, shape (3, n+1, npts)."""
    t = 2.0 * x - 1.0
    out = np.zeros((3, degree + 1, len(x)))
    for k in range(degree + 1):
        scale = np.sqrt(2.0 * k + 1.0)
        out[0, k] = scale * eval_legendre(k, t)
        if k >= 1:
            # dP_k/dt = (k + 1)/2 * P_{k-1}^(1,1); chain rule gives 2 per x.
            out[1, k] = scale * (k + 1.0) * eval_jacobi(k - 1, 1, 1, t)
        if k >= 2:
            out[2, k] = scale * (k + 1.0) * (k + 2.0) * \
                eval_jacobi(k - 2, 2, 2, t)
    return out


def _interval_tables(degree, points, order):
    x = points[:, 0]
    ch = _legendre_channels(degree, x)
    return {(d,): ch[d] for d in range(order + 1)}


def _triangle_tables(degree, points, order):
    x, y = points[:, 0], points[:, 1]
    X = 2.0 * x - 1.0
    Y = 2.0 * y - 1.0
    a = (1.0 + 2.0 * X + Y) / 2.0     # da/dX = 1, da/dY = 1/2
    b = (1.0 - Y) / 2.0               # db/dY = -1/2
    b2 = b * b
    npts = len(x)

    # chi_p with channels (v, vX, vY, vXX, vXY, vYY); chi_p equals
    # P_p(eta) * b**p written as a polynomial, via the Legendre
    # recurrence multiplied through by b**(p+1).
    chi = np.zeros((degree + 1, 6, npts))
    chi[0, 0] = 1.0
    if degree >= 1:
        chi[1, 0] = a
        chi[1, 1] = 1.0
        chi[1, 2] = 0.5
    for p in range(1, degree):
        c1 = (2.0 * p + 1.0) / (p + 1.0)
        c2 = p / (p + 1.0)
        v, vX, vY, vXX, vXY, vYY = chi[p]
        u, uX, uY, uXX, uXY, uYY = chi[p - 1]
        chi[p + 1, 0] = c1 * a * v - c2 * b2 * u
        chi[p + 1, 1] = c1 * (v + a * vX) - c2 * b2 * uX
        chi[p + 1, 2] = c1 * (0.5 * v + a * vY) - c2 * (b2 * uY - b * u)
        chi[p + 1, 3] = c1 * (2.0 * vX + a * vXX) - c2 * b2 * uXX
        chi[p + 1, 4] = c1 * (vY + 0.5 * vX + a * vXY) \
            - c2 * (b2 * uXY - b * uX)
        chi[p + 1, 5] = c1 * (vY + a * vYY) \
            - c2 * (0.5 * u - 2.0 * b * uY + b2 * uYY)

    size = (degree + 1) * (degree + 2) // 2
    chans = np.zeros((6, size, npts))
    i = 0
    for total in range(degree + 1):
        for q in range(total + 1):
            p = total - q
            alpha = 2 * p + 1
            J = eval_jacobi(q, alpha, 0, Y)
            JY = np.zeros(npts)
            JYY = np.zeros(npts)
            if q >= 1:
                JY = (q + alpha + 1.0) / 2.0 * \
                    eval_jacobi(q - 1, alpha + 1, 1, Y)
            if q >= 2:
                JYY = (q + alpha + 1.0) * (q + alpha + 2.0) / 4.0 * \
                    eval_jacobi(q - 2, alpha + 2, 2, Y)
            v, vX, vY, vXX, vXY, vYY = chi[p]
            norm = np.sqrt(2.0 * (2.0 * p + 1.0) * (p + q + 1.0))
            chans[0, i] = norm * v * J
            chans[1, i] = norm * vX * J
            chans[2, i] = norm * (vY * J + v * JY)
            chans[3, i] = norm * vXX * J
            chans[4, i] = norm * (vXY * J + vX * JY)
            chans[5, i] = norm * (vYY * J + 2.0 * vY * JY + v * JYY)
            i += 1

    # Chain rule from (X, Y) back to (x, y): factor 2 per derivative.
    pos = {(0, 0): (0, 1.0), (1, 0): (1, 2.0), (0, 1): (2, 2.0),
           (2, 0): (3, 4.0), (1, 1): (4, 4.0), (0, 2): (5, 4.0)}
    tables = {}
    for alpha in multiindices(2, order):
        chan, scale = pos[alpha]
        tables[alpha] = scale * chans[chan]
    return tables


def tabulate_prime(basis, points, order):
    """Prime values and derivatives up to `order` at the given points.

    Returns a map from derivative multi-index to an array indexed
    [function][point].
    """
    if order > MAX_ORDER or order < 0:
        raise OrderUnsupported(f"derivative order {order} not supported")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if basis.cell.kind == "interval":
        return _interval_tables(basis.degree, points, order)
    return _triangle_tables(basis.degree, points, order)


def prime_values(basis, points):
    key = (0,) * basis.cell.dimension
    return tabulate_prime(basis, points, 0)[key]


def nodal_coefficients(prime, nodes, cond_limit=1e12):
    """Coefficients of the nodal basis dual to the given node set.

    Returns C with Phi_i = sum_s C[i, s] prime_s, the prime index
    running component-major through vector blocks.  Applying node i to
    Phi_j then gives the Kronecker delta.
    """
    n = prime.size * prime.ncomp
    if len(nodes) != n:
        raise ValueError(f"need {n} nodes, got {len(nodes)}")
    V = np.empty((n, n))
    for i, node in enumerate(nodes):
        if node.ncomp != prime.ncomp:
            raise ValueError("node and prime component counts differ")
        tab = prime_values(prime, node.points)
        V[i] = np.einsum("pc,kp->ck", node.weights, tab).ravel()
    if not np.all(np.isfinite(V)) or np.linalg.cond(V) > cond_limit:
        raise SingularVandermonde("node set is not unisolvent")
    return np.linalg.inv(V).T
