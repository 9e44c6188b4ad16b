"""Exact sparse multivariate polynomials over the rationals.

A polynomial is a mapping from exponent tuples to nonzero Fractions, tied to
a VarContext that fixes the variable names and their exceptional-divisor
history tags.  All arithmetic is exact; there is no floating point anywhere
in this package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple

Exponent = Tuple[int, ...]


class ContextMismatch(ValueError):
    """Raised when an operation mixes polynomials from different contexts."""


@dataclass(frozen=True)
class VarContext:
    """An ordered tuple of variable names plus per-variable history tags.

    A tag records the blow-up step at which the variable's zero divisor was
    born as an exceptional divisor; None means the variable is not
    exceptional.
    """

    names: Tuple[str, ...]
    tags: Tuple[object, ...] = None  # tuple of int | None, same length as names

    def __post_init__(self):
        if self.tags is None:
            object.__setattr__(self, "tags", (None,) * len(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names: {self.names}")
        if len(self.tags) != len(self.names):
            raise ValueError("tags length must match names length")

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r} in context {self.names}") from None

    def tag_of(self, name: str):
        return self.tags[self.index(name)]

    def exceptional_vars(self) -> Tuple[Tuple[str, int], ...]:
        """Variables carrying a history tag, in context order."""
        return tuple((v, t) for v, t in zip(self.names, self.tags) if t is not None)

    def with_tags(self, tags: Mapping[str, object]) -> "VarContext":
        new = tuple(tags.get(v, t) for v, t in zip(self.names, self.tags))
        return VarContext(self.names, new)


def ctx(*names: str) -> VarContext:
    """Shorthand constructor used pervasively in tests."""
    return VarContext(tuple(names))


# ---------------------------------------------------------------------------
# exponent-tuple helpers

def exp_mul(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def exp_divides(a: Exponent, b: Exponent) -> bool:
    """True when monomial a divides monomial b."""
    return all(x <= y for x, y in zip(a, b))


def exp_div(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x - y for x, y in zip(a, b))


def exp_lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(max(x, y) for x, y in zip(a, b))


def exp_gcd(a: Exponent, b: Exponent) -> Exponent:
    return tuple(min(x, y) for x, y in zip(a, b))


def exp_deg(a: Exponent) -> int:
    return sum(a)


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order: grevlex or lex, over a variable precedence.

    ``precedence`` lists variable indices from most to least significant;
    by default it is the context order.  The order is total and compatible
    with multiplication.
    """

    kind: str = "grevlex"
    precedence: Tuple[int, ...] = None

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex"):
            raise ValueError(f"unknown order kind {self.kind!r}")

    def key(self, e: Exponent):
        """Sort key: greater key means greater monomial."""
        perm = self.precedence if self.precedence is not None else tuple(range(len(e)))
        v = tuple(e[i] for i in perm)
        if self.kind == "lex":
            return v
        # grevlex: total degree first, then reversed exponents negated
        return (exp_deg(e), tuple(-x for x in reversed(v)))

    def greater(self, a: Exponent, b: Exponent) -> bool:
        return self.key(a) > self.key(b)


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def elimination_order(context: VarContext, keep: Sequence[str]) -> MonomialOrder:
    """Lex order with the variables NOT in `keep` ranked first.

    A Groebner basis for this order intersected with the kept subring
    generates the elimination ideal.
    """
    keep_set = set(keep)
    drop = [i for i, v in enumerate(context.names) if v not in keep_set]
    hold = [i for i, v in enumerate(context.names) if v in keep_set]
    return MonomialOrder("lex", tuple(drop + hold))


# ---------------------------------------------------------------------------


class Polynomial:
    """Immutable exact polynomial: dict of exponent tuple -> nonzero Fraction."""

    __slots__ = ("context", "_terms", "_hash")

    def __init__(self, context: VarContext, terms: Mapping[Exponent, Fraction]):
        self.context = context
        self._terms = {e: c for e, c in terms.items() if c != 0}
        self._hash = None

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(context: VarContext) -> "Polynomial":
        return Polynomial(context, {})

    @staticmethod
    def const(context: VarContext, c) -> "Polynomial":
        c = Fraction(c)
        if c == 0:
            return Polynomial.zero(context)
        return Polynomial(context, {(0,) * context.n: c})

    @staticmethod
    def var(context: VarContext, name: str) -> "Polynomial":
        e = [0] * context.n
        e[context.index(name)] = 1
        return Polynomial(context, {tuple(e): Fraction(1)})

    @staticmethod
    def monomial(context: VarContext, e: Exponent, c=1) -> "Polynomial":
        c = Fraction(c)
        if c == 0:
            return Polynomial.zero(context)
        return Polynomial(context, {tuple(e): c})

    # -- basic queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(exp_deg(e) == 0 for e in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.context.n, Fraction(0))

    def is_unit_constant(self) -> bool:
        return self.is_constant() and not self.is_zero()

    def terms(self) -> Dict[Exponent, Fraction]:
        return dict(self._terms)

    def num_terms(self) -> int:
        return len(self._terms)

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(exp_deg(e) for e in self._terms)

    def degree_in(self, name: str) -> int:
        i = self.context.index(name)
        if not self._terms:
            return -1
        return max(e[i] for e in self._terms)

    def order(self) -> int:
        """Order at the origin: minimal total degree of a term (zero poly -> None)."""
        if not self._terms:
            return None
        return min(exp_deg(e) for e in self._terms)

    def order_along(self, names: Sequence[str]) -> int:
        """Order at the generic point of the coordinate subspace {names = 0}.

        The other variables are units there, so this is the minimal sum of
        exponents of `names` over the terms.
        """
        idx = [self.context.index(v) for v in names]
        if not self._terms:
            return None
        return min(sum(e[i] for i in idx) for e in self._terms)

    def leading(self, order: MonomialOrder) -> Tuple[Exponent, Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self._terms, key=order.key)
        return e, self._terms[e]

    def sorted_terms(self, order: MonomialOrder = GREVLEX, reverse: bool = True):
        return sorted(self._terms.items(), key=lambda t: order.key(t[0]), reverse=reverse)

    def coeff(self, e: Exponent) -> Fraction:
        return self._terms.get(tuple(e), Fraction(0))

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.context is not other.context and self.context != other.context:
            raise ContextMismatch(
                f"context mismatch: {self.context.names} vs {other.context.names}")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, Fraction(0)) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return Polynomial(self.context, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.context, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        out: Dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = exp_mul(e1, e2)
                s = out.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return Polynomial(self.context, out)

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        c = Fraction(c)
        if c == 0:
            return Polynomial.zero(self.context)
        return Polynomial(self.context, {e: c * k for e, k in self._terms.items()})

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.const(self.context, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def mul_term(self, e: Exponent, c: Fraction) -> "Polynomial":
        if c == 0:
            return Polynomial.zero(self.context)
        return Polynomial(self.context,
                          {exp_mul(e0, tuple(e)): c0 * c for e0, c0 in self._terms.items()})

    def monic(self, order: MonomialOrder = GREVLEX) -> "Polynomial":
        if self.is_zero():
            return self
        _, lc = self.leading(order)
        return self.scale(Fraction(1) / lc)

    # -- calculus / structure --------------------------------------------------

    def derivative(self, name: str) -> "Polynomial":
        """Formal partial derivative with respect to a context variable."""
        i = self.context.index(name)
        out: Dict[Exponent, Fraction] = {}
        for e, c in self._terms.items():
            if e[i] == 0:
                continue
            ne = list(e)
            ne[i] -= 1
            out[tuple(ne)] = c * e[i]
        return Polynomial(self.context, out)

    def gcd_monomial(self) -> Exponent:
        """The largest monomial dividing every term (exponent-wise min)."""
        if not self._terms:
            return (0,) * self.context.n
        it = iter(self._terms)
        g = next(it)
        for e in it:
            g = exp_gcd(g, e)
        return g

    def div_monomial(self, e: Exponent) -> "Polynomial":
        """Exact division by a monomial; raises if some term is not divisible."""
        out = {}
        for e0, c in self._terms.items():
            if not exp_divides(e, e0):
                raise ValueError("monomial does not divide polynomial")
            out[exp_div(e0, e)] = c
        return Polynomial(self.context, out)

    def max_var_power_dividing(self, name: str) -> int:
        """Largest k with name^k dividing the polynomial (0 for the zero poly)."""
        i = self.context.index(name)
        if not self._terms:
            return 0
        return min(e[i] for e in self._terms)

    def substitute(self, assignment: Mapping[str, "Polynomial"],
                   target: VarContext = None) -> "Polynomial":
        """Evaluate with each context variable replaced by a polynomial.

        The assignment must cover every variable of the context; all images
        must share one target context.
        """
        if target is None:
            target = next(iter(assignment.values())).context
        images = []
        for v in self.context.names:
            if v not in assignment:
                raise KeyError(f"substitution misses variable {v!r}")
            images.append(assignment[v])
        out = Polynomial.zero(target)
        for e, c in self._terms.items():
            term = Polynomial.const(target, c)
            for i, k in enumerate(e):
                if k:
                    term = term * (images[i] ** k)
            out = out + term
        return out

    def translate(self, point: "Point") -> "Polynomial":
        """Substitute v -> v + point(v), moving the point to the origin."""
        assignment = {}
        for v in self.context.names:
            pv = Polynomial.var(self.context, v)
            c = point.coordinates.get(v, Fraction(0))
            if c:
                pv = pv + Polynomial.const(self.context, c)
            assignment[v] = pv
        return self.substitute(assignment, self.context)

    def eval(self, point: "Point") -> Fraction:
        idx = {v: point.coordinates[v] for v in self.context.names}
        total = Fraction(0)
        for e, c in self._terms.items():
            val = c
            for i, k in enumerate(e):
                if k:
                    val *= idx[self.context.names[i]] ** k
            total += val
        return total

    def rename(self, target: VarContext) -> "Polynomial":
        """Reinterpret over a context with the same arity (positional renaming)."""
        if target.n != self.context.n:
            raise ContextMismatch("rename requires same variable count")
        return Polynomial(target, dict(self._terms))

    # -- dunder plumbing -------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (isinstance(other, Polynomial)
                and self.context == other.context
                and self._terms == other._terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.context.names,
                               tuple(sorted(self._terms.items()))))
        return self._hash

    def __repr__(self):
        return f"Polynomial({to_string(self)!r})"

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True)
class Point:
    """A rational point: assigns every variable of a context a Fraction."""

    context: VarContext
    coordinates: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        coords = {v: Fraction(self.coordinates.get(v, 0)) for v in self.context.names}
        object.__setattr__(self, "coordinates", coords)

    def tuple(self) -> Tuple[Fraction, ...]:
        return tuple(self.coordinates[v] for v in self.context.names)

    def is_origin(self) -> bool:
        return all(c == 0 for c in self.coordinates.values())

    def __str__(self):
        inner = ", ".join(f"{v}={self.coordinates[v]}" for v in self.context.names)
        return f"({inner})"


def origin(context: VarContext) -> Point:
    return Point(context, {})


def order_at_point(f: Polynomial, p: Point) -> int:
    """Multiplicity of {f=0} at p: lowest total degree after translating p to 0.

    Returns None for the zero polynomial (order +infinity).
    """
    if f.is_zero():
        return None
    if p.is_origin():
        return f.order()
    return f.translate(p).order()


# ---------------------------------------------------------------------------
# text grammar: identifiers, ^ powers, optional * between factors, a/b rationals


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class _Parser:
    def __init__(self, text: str, context: VarContext):
        self.text = text
        self.pos = 0
        self.context = context

    def error(self, msg):
        raise ParseError(msg, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> Polynomial:
        result = self.parse_sum()
        self.skip_ws()
        if self.pos != len(self.text):
            self.error(f"unexpected character {self.text[self.pos]!r}")
        return result

    def parse_sum(self) -> Polynomial:
        sign = 1
        c = self.peek()
        if c in "+-":
            self.pos += 1
            sign = -1 if c == "-" else 1
        term = self.parse_product().scale(sign)
        while True:
            c = self.peek()
            if c == "+":
                self.pos += 1
                term = term + self.parse_product()
            elif c == "-":
                self.pos += 1
                term = term - self.parse_product()
            else:
                return term

    def parse_product(self) -> Polynomial:
        result = self.parse_power()
        while True:
            c = self.peek()
            if c == "*":
                self.pos += 1
                result = result * self.parse_power()
            elif c == "(" or c.isalnum():
                # implicit product: whitespace or juxtaposed parenthesis
                result = result * self.parse_power()
            else:
                return result

    def parse_power(self) -> Polynomial:
        base = self.parse_atom()
        if self.peek() == "^":
            self.pos += 1
            self.skip_ws()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if start == self.pos:
                self.error("expected integer exponent after '^'")
            return base ** int(self.text[start:self.pos])
        return base

    def parse_atom(self) -> Polynomial:
        self.skip_ws()
        if self.pos >= len(self.text):
            self.error("unexpected end of input")
        c = self.text[self.pos]
        if c == "(":
            self.pos += 1
            inner = self.parse_sum()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return inner
        if c.isdigit():
            return Polynomial.const(self.context, self.parse_rational())
        if c.isalpha() or c == "_":
            start = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isalnum()
                                                 or self.text[self.pos] == "_"):
                self.pos += 1
            name = self.text[start:self.pos]
            if name not in self.context.names:
                self.pos = start
                self.error(f"unknown variable {name!r}")
            return Polynomial.var(self.context, name)
        self.error(f"unexpected character {c!r}")

    def parse_rational(self) -> Fraction:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        num = int(self.text[start:self.pos])
        if self.pos < len(self.text) and self.text[self.pos] == "/":
            save = self.pos
            self.pos += 1
            dstart = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if dstart == self.pos:
                self.pos = save
                return Fraction(num)
            return Fraction(num, int(self.text[dstart:self.pos]))
        return Fraction(num)


def parse(text: str, context: VarContext) -> Polynomial:
    """Parse the canonical text grammar into a polynomial."""
    return _Parser(text, context).parse()


def _coeff_str(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def to_string(f: Polynomial) -> str:
    """Canonical serialization: grevlex-descending terms, no spaces around ^."""
    if f.is_zero():
        return "0"
    parts = []
    for e, c in f.sorted_terms(GREVLEX, reverse=True):
        factors = []
        for i, k in enumerate(e):
            if k == 1:
                factors.append(f.context.names[i])
            elif k > 1:
                factors.append(f"{f.context.names[i]}^{k}")
        mono = "*".join(factors)
        neg = c < 0
        a = abs(c)
        if not mono:
            body = _coeff_str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_coeff_str(a)}*{mono}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)
