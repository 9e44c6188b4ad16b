"""Charts of a blow-up tree and the geometric predicates on them.

A Chart is one affine coordinate patch: a variable context, the hypersurface
equation transformed to this patch, the exceptional history, and the
substitution back to its parent patch.  Charts can be localized (a list of
inverted polynomials) so drivers can run on principal opens D(h) and so
simultaneous blow-ups can separate their sub-charts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import IrrationalLocusError, NotZeroDimensionalError
from .ideals import (Ideal, buchberger, derivative_ideal, eliminate, ideal,
                     in_radical, is_zero_dimensional, reduce_poly, saturate,
                     saturate_by_ideal)
from .poly import (GREVLEX, Point, Polynomial, VarContext, order_at_point,
                   origin, to_string)


@dataclass(frozen=True)
class Substitution:
    """Assignment of a polynomial (in the child context) to each parent variable."""

    assignment: Dict[str, Polynomial]

    def apply(self, f: Polynomial) -> Polynomial:
        target = next(iter(self.assignment.values())).context
        return f.substitute(self.assignment, target)

    def target_context(self) -> VarContext:
        return next(iter(self.assignment.values())).context

    def compose(self, inner: "Substitution") -> "Substitution":
        """self ∘ inner: first rewrite by self, then by inner."""
        return Substitution({v: inner.apply(p) for v, p in self.assignment.items()})


@dataclass(frozen=True)
class Divisor:
    """A locally principal divisor with its birth step."""

    equation: Polynomial
    history: int


@dataclass
class Chart:
    """One affine patch of a resolution tree."""

    id: str
    context: VarContext
    equation: Polynomial
    exceptional: List[Tuple[str, int]] = field(default_factory=list)
    parent: Optional[Tuple[str, Substitution]] = None
    birth_step: int = 0
    inverted: List[Polynomial] = field(default_factory=list)
    # divisors whose equation is not a plain coordinate (rare; pair driver)
    extra_divisors: List[Divisor] = field(default_factory=list)
    name_index: int = 0

    def vars(self) -> Tuple[str, ...]:
        return self.context.names

    def poly(self, text: str) -> Polynomial:
        from .poly import parse
        return parse(text, self.context)

    def point(self, *coords) -> Point:
        return Point(self.context, dict(zip(self.context.names, coords)))

    def point_visible(self, p: Point) -> bool:
        """True unless some inverted polynomial vanishes at p."""
        return all(h.eval(p) != 0 for h in self.inverted)

    def restrict_ideal(self, I: Ideal) -> Ideal:
        """Saturate away the locus excluded by the localization."""
        out = I
        for h in self.inverted:
            out = saturate(out, h)
        return out

    def ideal_empty_here(self, I: Ideal) -> bool:
        """True when V(I) does not meet this (localized) chart."""
        return self.restrict_ideal(I).is_unit()


def root_chart(names: Sequence[str], equation_text: str, chart_id: str = "c0",
               inverted_texts: Sequence[str] = ()) -> Chart:
    import re
    from .poly import parse
    context = VarContext(tuple(names))
    eq = parse(equation_text, context)
    inv = [parse(t, context) for t in inverted_texts]
    idx = 0
    for v in names:
        m = re.match(r"^.*?(\d+)$", v)
        if m:
            idx = max(idx, int(m.group(1)))
    return Chart(id=chart_id, context=context, equation=eq, inverted=inv,
                 name_index=idx)


# ---------------------------------------------------------------------------
# predicates


def singular_locus(c: Chart, f: Polynomial = None) -> Ideal:
    """Jacobian ideal (f, df/dv1, ..., df/dvn) of the chart hypersurface."""
    if f is None:
        f = c.equation
    gens = [f] + [f.derivative(v) for v in c.context.names]
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        gens = [Polynomial.zero(c.context)]
    return Ideal(gens)


def is_smooth(c: Chart, f: Polynomial = None) -> bool:
    """True iff the singular ideal is the unit ideal on the (localized) chart."""
    if f is None:
        f = c.equation
    if f.is_unit_constant():
        return True  # empty hypersurface
    return c.ideal_empty_here(singular_locus(c, f))


def smooth_certificate(c: Chart, f: Polynomial = None) -> dict:
    """Serializable evidence for is_smooth: the saturated reduced basis."""
    if f is None:
        f = c.equation
    if f.is_unit_constant():
        return {"unit_equation": to_string(f)}
    J = c.restrict_ideal(singular_locus(c, f))
    return {
        "groebner": [to_string(g) for g in J.groebner()],
        "inverted": [to_string(h) for h in c.inverted],
    }


def _integer_divisors(n: int) -> List[int]:
    n = abs(n)
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


def _univariate_coeffs(f: Polynomial, var: str) -> List[Fraction]:
    """Coefficient list (ascending) of a polynomial that only involves var."""
    i = f.context.index(var)
    deg = 0
    for e in f.terms():
        if any(k > 0 for j, k in enumerate(e) if j != i):
            raise ValueError("polynomial is not univariate in " + var)
        deg = max(deg, e[i])
    coeffs = [Fraction(0)] * (deg + 1)
    for e, c in f.terms().items():
        coeffs[e[i]] = c
    return coeffs


def _integerize(coeffs: List[Fraction]) -> List[int]:
    den = 1
    for c in coeffs:
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    g = 0
    for c in ints:
        g = _gcd(g, c)
    if g > 1:
        ints = [c // g for c in ints]
    return ints


def rational_roots(coeffs: List[Fraction]) -> Tuple[List[Fraction], int]:
    """All rational roots (multiplicities collapsed) and the residual degree.

    Returns (roots, degree of the factor left after dividing every rational
    root out).  A positive residual degree means irrational roots remain.
    """
    work = list(coeffs)
    while work and work[-1] == 0:
        work.pop()
    if not work:
        raise ValueError("zero polynomial has every root")
    roots = set()
    k = 0
    while work[k] == 0:
        k += 1
    if k > 0:
        roots.add(Fraction(0))
        work = work[k:]
    while len(work) > 1:
        ints = _integerize(work)
        found = None
        for p in _integer_divisors(ints[0]):
            for q in _integer_divisors(ints[-1]):
                for sign in (1, -1):
                    r = Fraction(sign * p, q)
                    if _eval_int_poly(ints, r) == 0:
                        found = r
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        roots.add(found)
        work = _deflate(work, found)
    return sorted(roots), len(work) - 1


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _eval_int_poly(coeffs, x: Fraction) -> Fraction:
    total = Fraction(0)
    for c in reversed(coeffs):
        total = total * x + c
    return total


def _deflate(coeffs, root: Fraction):
    """Divide by (x - root) exactly; coefficients ascending."""
    n = len(coeffs) - 1
    out = [Fraction(0)] * n
    carry = Fraction(coeffs[n])
    for i in range(n - 1, -1, -1):
        out[i] = carry
        carry = coeffs[i] + carry * root
    assert carry == 0
    return out


def rational_points(I: Ideal, chart: Chart = None) -> List[Point]:
    """All rational solutions of a zero-dimensional ideal, sorted lex.

    Raises NotZeroDimensionalError for positive-dimensional input and
    IrrationalLocusError when a univariate factor of degree >= 1 without
    rational roots remains: irrational points are never silently dropped.
    """
    context = I.context
    if chart is not None:
        I = chart.restrict_ideal(I)
    if I.is_unit():
        return []
    if not is_zero_dimensional(I):
        raise NotZeroDimensionalError(f"not zero-dimensional: {I}")
    pts = _solve(list(I.generators), list(context.names), context)
    pts = [Point(context, dict(zip(context.names, t))) for t in sorted(pts)]
    if chart is not None:
        pts = [p for p in pts if chart.point_visible(p)]
    return pts


def _solve(gens: List[Polynomial], names: List[str], context: VarContext):
    """Recursive lex-elimination solver; returns coordinate tuples."""
    if all(g.is_zero() for g in gens):
        raise NotZeroDimensionalError("zero ideal on remaining variables")
    I = Ideal([g for g in gens if not g.is_zero()])
    if I.is_unit():
        return []
    last = names[-1]
    if len(names) == 1:
        gb = I.groebner()
        u = gb[0]
        coeffs = _univariate_coeffs(u, last)
        roots, residual = rational_roots(coeffs)
        if residual > 0:
            raise IrrationalLocusError(to_string(u))
        return [(r,) for r in roots]
    elim = eliminate(I, [last])
    nonzero = [g for g in elim.generators if not g.is_zero()]
    if not nonzero:
        raise NotZeroDimensionalError(f"no univariate eliminant in {last}")
    u = buchberger(nonzero)[0]
    coeffs = _univariate_coeffs(u, last)
    roots, residual = rational_roots(coeffs)
    if residual > 0:
        raise IrrationalLocusError(to_string(u))
    solutions = []
    for r in roots:
        subs = {v: Polynomial.var(context, v) for v in context.names}
        subs[last] = Polynomial.const(context, r)
        reduced = [g.substitute(subs, context) for g in gens]
        for head in _solve(reduced, names[:-1], context):
            solutions.append(head + (r,))
    return solutions


def multiplicity_stratification(c: Chart, points: Sequence[Point]):
    """Map each point to its multiplicity; also return the max and its argmax set."""
    result = {}
    for p in points:
        if c.equation.eval(p) != 0:
            raise ValueError(f"point {p} is not on the hypersurface")
        result[p] = order_at_point(c.equation, p)
    if not result:
        return result, 0, []
    top = max(result.values())
    argmax = sorted((p for p, m in result.items() if m == top),
                    key=lambda p: p.tuple())
    return result, top, argmax


def is_strictly_monomial_at(f: Polynomial, p: Point, c: Chart = None) -> bool:
    """Coordinate-aligned monomiality test at a point.

    After translating p to the origin, factor out the largest monomial m
    dividing every term; f is strictly monomial at p iff the cofactor has a
    nonzero constant term.  Sufficient but coordinate-bound: it does not
    search for a better parameter system.
    """
    if f.is_zero():
        raise ValueError("zero polynomial")
    g = f.translate(p) if not p.is_origin() else f
    m = g.gcd_monomial()
    u = g.div_monomial(m)
    return u.constant_term() != 0


# ---------------------------------------------------------------------------
# coordinate-aligned component hunting (desk scale)


def aligned_lines_in(J: Ideal, chart: Chart) -> List[Tuple[str, ...]]:
    """Coordinate lines {v_i = 0, i in S} (|S| = n-1... here codim n-1 lines
    for n>=2) contained in V(J) and visible in the chart.

    Returns the tuples of vanishing variables, sorted.  Only offset-zero
    lines are searched; the corpus never needs shifted singular curves.
    """
    names = chart.context.names
    n = len(names)
    found = []
    if n < 2:
        return found
    import itertools
    for S in itertools.combinations(names, n - 1):
        # V(S) is the coordinate axis of the one remaining variable
        zero = {v: Polynomial.zero(chart.context) if v in S
                else Polynomial.var(chart.context, v) for v in names}
        if all(g.substitute(zero, chart.context).is_zero() for g in J.generators):
            line_free_var = [v for v in names if v not in S][0]
            if any(h.substitute(zero, chart.context).is_zero() for h in chart.inverted):
                continue  # the whole line is cut away by the localization
            found.append(S)
            del line_free_var
    return sorted(found)


def residual_after_lines(J: Ideal, lines: Sequence[Tuple[str, ...]],
                         chart: Chart) -> Ideal:
    """Saturate J by each line ideal, leaving the zero-dimensional residue."""
    out = J
    for S in lines:
        L = Ideal([Polynomial.var(chart.context, v) for v in S])
        out = saturate_by_ideal(out, L)
    return chart.restrict_ideal(out)
