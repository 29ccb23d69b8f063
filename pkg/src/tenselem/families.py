"""Named product families on quadrilaterals, prisms and hexahedra.

Each constructor composes tensor products, direct sums and the HCurl/
HDiv modifiers over the interval and triangle families.  Quadrilateral
elements are built on the interval x interval product cell; using one
as the first factor of a 3D product flattens it automatically.
"""

from __future__ import annotations

from .algebra import build_complex, enrich, hcurl, hdiv, tensor_product
from .cells import make_simplex
from .simplex import (
    discontinuous_lagrange,
    lagrange,
    raviart_thomas_face,
    rotate_90,
)

_INT = make_simplex("interval")
_TRI = make_simplex("triangle")


def raviart_thomas_edge(r):
    """Curl-conforming rotation of the triangle face element."""
    return rotate_90(raviart_thomas_face(_TRI, r))


def q_quad(r):
    return tensor_product(lagrange(_INT, r), lagrange(_INT, r))


def dq_quad(r):
    return tensor_product(discontinuous_lagrange(_INT, r),
                          discontinuous_lagrange(_INT, r))


def rtce_quad(r):
    return enrich(
        hcurl(tensor_product(lagrange(_INT, r),
                             discontinuous_lagrange(_INT, r - 1))),
        hcurl(tensor_product(discontinuous_lagrange(_INT, r - 1),
                             lagrange(_INT, r))))


def rtcf_quad(r):
    return enrich(
        hdiv(tensor_product(lagrange(_INT, r),
                            discontinuous_lagrange(_INT, r - 1))),
        hdiv(tensor_product(discontinuous_lagrange(_INT, r - 1),
                            lagrange(_INT, r))))


def n2ce_quad(r):
    return enrich(
        hcurl(tensor_product(lagrange(_INT, r),
                             discontinuous_lagrange(_INT, r))),
        hcurl(tensor_product(discontinuous_lagrange(_INT, r),
                             lagrange(_INT, r))))


def n2cf_quad(r):
    return enrich(
        hdiv(tensor_product(lagrange(_INT, r),
                            discontinuous_lagrange(_INT, r))),
        hdiv(tensor_product(discontinuous_lagrange(_INT, r),
                            lagrange(_INT, r))))


def p_prism(r):
    return tensor_product(lagrange(_TRI, r), lagrange(_INT, r))


def dp_prism(r):
    return tensor_product(discontinuous_lagrange(_TRI, r),
                          discontinuous_lagrange(_INT, r))


def nce_prism(r):
    return enrich(
        hcurl(tensor_product(lagrange(_TRI, r),
                             discontinuous_lagrange(_INT, r - 1))),
        hcurl(tensor_product(raviart_thomas_edge(r), lagrange(_INT, r))))


def ncf_prism(r):
    return enrich(
        hdiv(tensor_product(raviart_thomas_face(_TRI, r),
                            discontinuous_lagrange(_INT, r - 1))),
        hdiv(tensor_product(discontinuous_lagrange(_TRI, r - 1),
                            lagrange(_INT, r))))


def q_hex(r):
    return tensor_product(q_quad(r), lagrange(_INT, r))


def dq_hex(r):
    return tensor_product(dq_quad(r), discontinuous_lagrange(_INT, r))


def nce_hex(r):
    return enrich(
        hcurl(tensor_product(q_quad(r),
                             discontinuous_lagrange(_INT, r - 1))),
        hcurl(tensor_product(rtce_quad(r), lagrange(_INT, r))))


def ncf_hex(r):
    return enrich(
        hdiv(tensor_product(rtcf_quad(r),
                            discontinuous_lagrange(_INT, r - 1))),
        hdiv(tensor_product(dq_quad(r - 1), lagrange(_INT, r))))


def interval_complex(r):
    """The 1D complex (P_r, DP_{r-1})."""
    return [lagrange(_INT, r), discontinuous_lagrange(_INT, r - 1)]


def triangle_complex(r):
    """The div-flavoured 2D complex (P_r, RTF_r, DP_{r-1})."""
    return [lagrange(_TRI, r), raviart_thomas_face(_TRI, r),
            discontinuous_lagrange(_TRI, r - 1)]


def quad_complex(r, flavour="div"):
    """(Q_r, RTCF_r, DQ_{r-1}) or the curl-flavoured analogue."""
    return build_complex(interval_complex(r), interval_complex(r),
                         flavour=flavour)


def prism_complex(r):
    """W0..W3 on the prism from the degree-r triangle and interval."""
    return build_complex(triangle_complex(r), interval_complex(r))
