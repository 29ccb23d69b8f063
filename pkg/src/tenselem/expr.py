"""Element expression language: parse, print, evaluate.

Grammar:

    expr := term ('+' term)*
    term := 'HDiv(' expr ')' | 'HCurl(' expr ')' | atom ('x' atom)?
    atom := FAMILY '(' INT ',' CELL ')'

with FAMILY in {P, DP, Q, DQ, RTF, RTE, RTCF, RTCE} and CELL in
{int, tri, quad}.  '+' maps to enrich, 'x' to tensor_product, and the
quadrilateral families expand to their interval-product definitions.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import families
from .algebra import enrich, hcurl, hdiv, tensor_product
from .cells import make_simplex
from .errors import ParseError, UnknownFamily
from .simplex import discontinuous_lagrange, lagrange, raviart_thomas_face


@dataclass(frozen=True)
class Family:
    name: str
    degree: int
    cell_name: str


@dataclass(frozen=True)
class Product:
    left: Family
    right: Family


@dataclass(frozen=True)
class Enriched:
    left: object
    right: object


@dataclass(frozen=True)
class HDiv:
    expr: object


@dataclass(frozen=True)
class HCurl:
    expr: object


FAMILY_NAMES = ("P", "DP", "Q", "DQ", "RTF", "RTE", "RTCF", "RTCE")
CELL_NAMES = ("int", "tri", "quad")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(text):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "(),+":
            tokens.append(Token(c, c, i))
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("INT", text[i:j], i))
            i = j
            continue
        if c.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("NAME", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(Token("EOF", "", n))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind, what):
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {what}", tok.offset)
        return self.advance()

    def parse(self):
        node = self.parse_expr()
        tok = self.peek()
        if tok.kind != "EOF":
            raise ParseError("unexpected trailing input", tok.offset)
        return node

    def parse_expr(self):
        node = self.parse_term()
        while self.peek().kind == "+":
            self.advance()
            node = Enriched(node, self.parse_term())
        return node

    def parse_term(self):
        tok = self.peek()
        if (tok.kind == "NAME" and tok.text in ("HDiv", "HCurl")
                and self.tokens[self.pos + 1].kind == "("):
            self.advance()
            self.advance()
            inner = self.parse_expr()
            self.expect(")", "')'")
            return HDiv(inner) if tok.text == "HDiv" else HCurl(inner)
        atom = self.parse_atom()
        nxt = self.peek()
        if nxt.kind == "NAME" and nxt.text == "x":
            self.advance()
            return Product(atom, self.parse_atom())
        return atom

    def parse_atom(self):
        name = self.expect("NAME", "a family name")
        if name.text not in FAMILY_NAMES:
            raise UnknownFamily(f"unknown family {name.text!r}")
        self.expect("(", "'('")
        degree = self.expect("INT", "a degree")
        self.expect(",", "',' and a cell name")
        cell = self.expect("NAME", "a cell name")
        if cell.text not in CELL_NAMES:
            raise ParseError(f"unknown cell {cell.text!r}", cell.offset)
        self.expect(")", "')'")
        return Family(name.text, int(degree.text), cell.text)


def parse(text):
    """Parse an element expression into its AST."""
    return _Parser(text).parse()


def print_expr(node):
    """Canonical textual form; parse(print_expr(e)) round-trips."""
    if isinstance(node, Family):
        return f"{node.name}({node.degree},{node.cell_name})"
    if isinstance(node, Product):
        return f"{print_expr(node.left)} x {print_expr(node.right)}"
    if isinstance(node, Enriched):
        return f"{print_expr(node.left)} + {print_expr(node.right)}"
    if isinstance(node, HDiv):
        return f"HDiv({print_expr(node.expr)})"
    if isinstance(node, HCurl):
        return f"HCurl({print_expr(node.expr)})"
    raise TypeError(f"not an expression node: {node!r}")


_INT = make_simplex("interval")
_TRI = make_simplex("triangle")

_SIMPLEX_FAMILIES = {
    ("P", "int"): lambda r: lagrange(_INT, r),
    ("P", "tri"): lambda r: lagrange(_TRI, r),
    ("DP", "int"): lambda r: discontinuous_lagrange(_INT, r),
    ("DP", "tri"): lambda r: discontinuous_lagrange(_TRI, r),
    ("RTF", "tri"): lambda r: raviart_thomas_face(_TRI, r),
    ("RTE", "tri"): families.raviart_thomas_edge,
    ("Q", "quad"): families.q_quad,
    ("DQ", "quad"): families.dq_quad,
    ("RTCF", "quad"): families.rtcf_quad,
    ("RTCE", "quad"): families.rtce_quad,
}


def evaluate(node):
    """Build the element described by an expression AST."""
    if isinstance(node, Family):
        key = (node.name, node.cell_name)
        try:
            ctor = _SIMPLEX_FAMILIES[key]
        except KeyError:
            raise UnknownFamily(
                f"family {node.name} is not defined on cell "
                f"{node.cell_name!r}") from None
        return ctor(node.degree)
    if isinstance(node, Product):
        return tensor_product(evaluate(node.left), evaluate(node.right))
    if isinstance(node, Enriched):
        return enrich(evaluate(node.left), evaluate(node.right))
    if isinstance(node, HDiv):
        return hdiv(evaluate(node.expr))
    if isinstance(node, HCurl):
        return hcurl(evaluate(node.expr))
    raise TypeError(f"not an expression node: {node!r}")


def element_from_string(text):
    """Parse and evaluate in one step."""
    return evaluate(parse(text))
