"""Exception types shared across the library."""


class TenselemError(Exception):
    """Base class for all library errors."""


class NestedProduct(TenselemError):
    """A product cell was used as a factor of another product."""


class NotProduct(TenselemError):
    """A product cell was required but a simple cell was given."""


class OrderUnsupported(TenselemError):
    """Derivatives were requested beyond the supported order."""


class SingularVandermonde(TenselemError):
    """The node set does not determine a nodal basis."""


class DegreeUnsupported(TenselemError):
    """The polynomial degree is outside the supported range."""


class NotVector2D(TenselemError):
    """rotate_90 needs a 2-vector valued element on a 2D cell."""


class BothVectorValued(TenselemError):
    """At most one factor of a tensor product may be vector valued."""


class InvalidModifier(TenselemError):
    """No HCurl/HDiv construction exists for this continuity pair."""


class IncompatibleParts(TenselemError):
    """Enrichment requires matching cell, value shape and mapping."""


class MappingUnset(TenselemError):
    """The element has no reference-to-physical mapping defined."""


class BadOrder(TenselemError):
    """Quadrature order outside the supported range."""


class BadFacet(TenselemError):
    """Unknown facet region or facet index."""


class BadLayers(TenselemError):
    """An extruded mesh needs at least one layer."""


class CellMismatch(TenselemError):
    """The element reference cell does not match the mesh cell."""


class IncompatibleSpaces(TenselemError):
    """The function spaces do not fit the requested form."""


class NoConvergence(TenselemError):
    """The iterative solver exhausted its iteration budget."""


class NotBlockDiagonal(TenselemError):
    """Block inversion needs a space without inter-cell coupling."""


class UnknownFamily(TenselemError):
    """Unrecognised element family, or family/cell combination."""


class ParseError(TenselemError):
    """Malformed element expression."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset
