"""Node functionals represented as weighted point evaluations.

Every functional in the library has the form

    n(f) = sum_k sum_c weights[k, c] * f_c(points[k]),

which covers point evaluations, directional point evaluations and
quadrature-backed moments against fixed weight functions.  The closure
of this form under outer products and signed component embeddings is
what makes the product-element node sets mechanical to build.
"""

from __future__ import annotations

import numpy as np


class Functional:

    __slots__ = ("points", "weights")

    def __init__(self, points, weights):
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        w = np.asarray(weights, dtype=float)
        if w.ndim == 1:
            w = w.reshape(-1, 1)
        if len(w) != len(self.points):
            raise ValueError("one weight row per point required")
        self.weights = w

    @property
    def ncomp(self):
        return self.weights.shape[1]

    @classmethod
    def point_evaluation(cls, point):
        return cls([point], np.ones((1, 1)))

    @classmethod
    def point_component(cls, point, component, ncomp, scale=1.0):
        w = np.zeros((1, ncomp))
        w[0, component] = scale
        return cls([point], w)

    def __call__(self, fn):
        """Apply to a callable mapping (npts, dim) to per-component values."""
        vals = np.asarray(fn(self.points), dtype=float)
        if vals.ndim == 1:
            vals = vals.reshape(-1, 1)
        return float(np.sum(self.weights * vals))

    def apply_table(self, values):
        """Apply to tabulated values indexed [function][component][point]."""
        return np.einsum("pc,jcp->j", self.weights, values)

    def __repr__(self):
        return (f"<Functional {len(self.points)} pts x "
                f"{self.ncomp} comps>")


def product_functional(na, nb):
    """Outer product of two nodes, A coordinates and A-major points first."""
    pa, pb = na.points, nb.points
    points = np.hstack([np.repeat(pa, len(pb), axis=0),
                        np.tile(pb, (len(pa), 1))])
    w = np.einsum("ka,lb->klab", na.weights, nb.weights)
    return Functional(points, w.reshape(len(pa) * len(pb),
                                        na.ncomp * nb.ncomp))


def map_components(node, component_map):
    """Push a node through a signed component embedding.

    component_map lists (source index or None, sign) per output
    component.  Because the embedding is orthogonal (each source used
    once, signs square to one), applying the same map to node weights
    preserves the duality pairing with the embedded basis.
    """
    w = np.zeros((len(node.points), len(component_map)))
    for c, (src, sign) in enumerate(component_map):
        if src is not None:
            w[:, c] = sign * node.weights[:, src]
    return Functional(node.points, w)
