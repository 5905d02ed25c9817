"""Parser, canonical printer, and evaluator for cohomology class
expressions over a squared group.

Grammar:
    expr   := term (('+') term)*
    term   := factor (('*')? factor)*
    factor := atom ('^' int)*
    atom   := gen | macro | '(' expr ')'
    gen    := xL | xR | yL | yR | eL | eR

xL means x (x) 1, xR means 1 (x) x, and so on, where x, y are the named
degree-1 generators of the group's cohomology (and e the degree-4
periodicity class of a quaternion group).  Macros:

    tau_x     = xL + xR
    tau_y     = yL + yR
    v1        = tau_x^2*yR + tau_x*tau_y*xL
    v2        = tau_x^2*yR + tau_x*tau_y*yR
    v3        = tau_x^2*yL + tau_y^2*xL
    v<i>_pulled = v<i> evaluated over the Klein-four square and pulled
                  back along the quotient map (quaternion groups only)

Sums must be degree-homogeneous.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

GENERATORS = ("xL", "xR", "yL", "yR", "eL", "eR")
MACROS = {
    "tau_x": "xL + xR",
    "tau_y": "yL + yR",
    "v1": "tau_x^2*yR + tau_x*tau_y*xL",
    "v2": "tau_x^2*yR + tau_x*tau_y*yR",
    "v3": "tau_x^2*yL + tau_y^2*xL",
}
PULLED = {"v1_pulled": 1, "v2_pulled": 2, "v3_pulled": 3}


class ClassExprError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at byte {position}")
        self.position = position


@dataclass(frozen=True)
class Gen:
    name: str


@dataclass(frozen=True)
class Pulled:
    index: int


@dataclass(frozen=True)
class Power:
    base: object
    exponent: int


@dataclass(frozen=True)
class Product:
    factors: tuple


@dataclass(frozen=True)
class Sum:
    terms: tuple


_TOKEN = re.compile(r"\s*(?:(\w+)|([()^*+])|(\S))")


def _tokenize(text):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        word, sym, bad = m.groups()
        start = m.start(1) if word else m.start(2) if sym else m.start(3)
        if bad:
            raise ClassExprError(f"unexpected character {bad!r}", start)
        out.append((word or sym, start))
        pos = m.end()
    out.append((None, len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self):
        node = self.expr()
        tok, pos = self.peek()
        if tok is not None:
            raise ClassExprError(f"unexpected token {tok!r}", pos)
        return node

    def expr(self):
        terms = [self.term()]
        while self.peek()[0] == "+":
            self.next()
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self):
        factors = [self.factor()]
        while True:
            tok, _ = self.peek()
            if tok == "*":
                self.next()
                factors.append(self.factor())
            elif tok == "(" or (tok is not None and re.fullmatch(r"\w+", tok)
                                and not tok.isdigit()):
                factors.append(self.factor())
            else:
                break
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def factor(self):
        node = self.atom()
        while self.peek()[0] == "^":
            self.next()
            tok, pos = self.next()
            if tok is None or not tok.isdigit():
                raise ClassExprError("expected an integer exponent", pos)
            k = int(tok)
            if k < 1:
                raise ClassExprError("exponent must be >= 1", pos)
            node = Power(node, k)
        return node

    def atom(self):
        tok, pos = self.next()
        if tok == "(":
            node = self.expr()
            tok2, pos2 = self.next()
            if tok2 != ")":
                raise ClassExprError("unbalanced parenthesis", pos2)
            return node
        if tok in GENERATORS:
            return Gen(tok)
        if tok in MACROS:
            return parse_class_expr(MACROS[tok])
        if tok in PULLED:
            return Pulled(PULLED[tok])
        if tok is None:
            raise ClassExprError("unexpected end of expression", pos)
        if re.fullmatch(r"\w+", tok):
            raise ClassExprError(f"unknown generator {tok!r}", pos)
        raise ClassExprError(f"unexpected token {tok!r}", pos)


def parse_class_expr(text):
    return _Parser(text).parse()


def print_class_expr(node):
    """Canonical printer; parse -> print -> parse is a fixed point."""
    if isinstance(node, Gen):
        return node.name
    if isinstance(node, Pulled):
        return f"v{node.index}_pulled"
    if isinstance(node, Power):
        base = print_class_expr(node.base)
        if isinstance(node.base, (Sum, Product, Power)):
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Product):
        parts = []
        for f in node.factors:
            s = print_class_expr(f)
            if isinstance(f, (Sum, Product)):
                s = f"({s})"
            parts.append(s)
        return "*".join(parts)
    if isinstance(node, Sum):
        parts = []
        for t in node.terms:
            s = print_class_expr(t)
            if isinstance(t, Sum):
                s = f"({s})"
            parts.append(s)
        return " + ".join(parts)
    raise TypeError(f"not a class expression node: {node!r}")


class ClassExprContext:
    """Maps generator names to cohomology classes over a squared group
    and evaluates expressions to (degree, class) pairs."""

    def __init__(self, ws, generators, pull=None):
        """generators: {name: (degree, CohomologyClass)}; pull: callable
        index -> (degree, class) for the pulled macros, or None."""
        self.ws = ws
        self.generators = generators
        self.pull = pull

    def evaluate(self, node):
        if isinstance(node, Gen):
            entry = self.generators.get(node.name)
            if entry is None:
                raise ClassExprError(
                    f"generator {node.name!r} undefined for this group", 0)
            return entry
        if isinstance(node, Pulled):
            if self.pull is None:
                raise ClassExprError(
                    "pulled classes are only defined over quaternion groups", 0)
            return self.pull(node.index)
        if isinstance(node, Power):
            d, z = self.evaluate(node.base)
            out_d, out = d, z
            for _ in range(node.exponent - 1):
                out = self.ws.cup_trivial(out, z)
                out_d += d
            return out_d, out
        if isinstance(node, Product):
            d, z = self.evaluate(node.factors[0])
            for f in node.factors[1:]:
                d2, z2 = self.evaluate(f)
                z = self.ws.cup_trivial(z, z2)
                d += d2
            return d, z
        if isinstance(node, Sum):
            d, z = self.evaluate(node.terms[0])
            for t in node.terms[1:]:
                d2, z2 = self.evaluate(t)
                if d2 != d:
                    raise ClassExprError(
                        f"inhomogeneous sum (degrees {d} and {d2})", 0)
                z = z + z2
            return d, z
        raise TypeError(f"not a class expression node: {node!r}")


def context_for_group(ws, G):
    """Build an evaluation context for a base group's square: Klein four
    and quaternion groups get named x, y (and e, pulled v_i for
    quaternion groups)."""
    from .groups import make_klein_four, make_quaternion
    from .spaces import (
        QuaternionRingData,
        cross_class,
        klein_square_classes,
        pull_to_quaternion_square,
    )

    if G.name == "V4":
        gens, _ = klein_square_classes(ws)
        return ClassExprContext(ws, {k: (1, v) for k, v in gens.items()})
    if G.name.startswith("Q"):
        m = G.order // 8
        ring = QuaternionRingData(ws, m)
        one = ws.cohomology(ring.Q, ws.trivial(ring.Q), 0).basis_classes()[0]
        gens = {
            "xL": (1, cross_class(ws, ring.x, one)),
            "xR": (1, cross_class(ws, one, ring.x)),
            "yL": (1, cross_class(ws, ring.y, one)),
            "yR": (1, cross_class(ws, one, ring.y)),
            "eL": (4, cross_class(ws, ring.e, one)),
            "eR": (4, cross_class(ws, one, ring.e)),
        }
        _, v = klein_square_classes(ws, ring.x_V, ring.y_source)

        def pull(i):
            return 3, pull_to_quaternion_square(ws, ring, v[i])

        return ClassExprContext(ws, gens, pull=pull)
    raise ValueError(
        f"class expressions are defined over V4 and quaternion groups, "
        f"not {G.name}")
