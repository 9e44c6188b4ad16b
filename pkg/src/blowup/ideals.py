"""Commutative-algebra kernels: division, Buchberger, quotient, saturation.

Everything is deterministic: bases are reduced, monic and sorted, so ideal
computations can be compared byte-for-byte across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .poly import (GREVLEX, LEX, ContextMismatch, MonomialOrder, Polynomial,
                   VarContext, elimination_order, exp_deg, exp_div,
                   exp_divides, exp_lcm, exp_mul)


def normal_form(f: Polynomial, basis: Sequence[Polynomial],
                order: MonomialOrder = GREVLEX):
    """Multivariate division: returns (quotients, remainder).

    f == sum(q_i * b_i) + remainder, and no remainder term is divisible by
    any leading term of the basis.  The identity is exact and re-verifiable
    by multiplication.
    """
    basis = [b for b in basis if not b.is_zero()]
    lead = [b.leading(order) for b in basis]
    quotients = [Polynomial.zero(f.context) for _ in basis]
    remainder = Polynomial.zero(f.context)
    work = f
    while not work.is_zero():
        e, c = work.leading(order)
        for i, (le, lc) in enumerate(lead):
            if exp_divides(le, e):
                q = Polynomial.monomial(f.context, exp_div(e, le), c / lc)
                quotients[i] = quotients[i] + q
                work = work - q * basis[i]
                break
        else:
            t = Polynomial.monomial(f.context, e, c)
            remainder = remainder + t
            work = work - t
    return quotients, remainder


def reduce_poly(f: Polynomial, basis: Sequence[Polynomial],
                order: MonomialOrder = GREVLEX) -> Polynomial:
    return normal_form(f, basis, order)[1]


def s_polynomial(f: Polynomial, g: Polynomial, order: MonomialOrder) -> Polynomial:
    ef, cf = f.leading(order)
    eg, cg = g.leading(order)
    L = exp_lcm(ef, eg)
    return (f.mul_term(exp_div(L, ef), Fraction(1) / cf)
            - g.mul_term(exp_div(L, eg), Fraction(1) / cg))


def buchberger(gens: Sequence[Polynomial], order: MonomialOrder = GREVLEX
               ) -> List[Polynomial]:
    """Reduced Groebner basis via Buchberger with Gebauer-Moeller pruning."""
    G: List[Polynomial] = []
    for g in gens:
        if not g.is_zero():
            G.append(g.monic(order))
    if not G:
        return []
    lead = [g.leading(order)[0] for g in G]
    pairs = set()

    def add_pairs(j):
        # Gebauer-Moeller: drop pairs whose lcm is a proper multiple of
        # another's, and coprime-leading-term pairs (Buchberger 1st criterion)
        nonlocal pairs
        lmj = lead[j]
        survived = set()
        for (a, b) in pairs:
            lab = exp_lcm(lead[a], lead[b])
            if (exp_divides(lmj, lab)
                    and exp_lcm(lead[a], lmj) != lab
                    and exp_lcm(lead[b], lmj) != lab):
                continue
            survived.add((a, b))
        pairs = survived
        fresh: Dict[Tuple[int, ...], int] = {}
        for i in range(j):
            L = exp_lcm(lead[i], lmj)
            if L not in fresh or fresh[L] > i:
                fresh[L] = i
        kept = []
        for L, i in sorted(fresh.items(), key=lambda kv: order.key(kv[0])):
            if any(exp_divides(L2, L) and L2 != L for L2 in fresh):
                continue
            kept.append((i, L))
        for i, L in kept:
            if L == exp_mul(lead[i], lmj):
                continue  # coprime criterion
            pairs.add((i, j))

    for j in range(len(G)):
        add_pairs(j)

    while pairs:
        i, j = min(pairs, key=lambda p: order.key(exp_lcm(lead[p[0]], lead[p[1]])))
        pairs.discard((i, j))
        s = s_polynomial(G[i], G[j], order)
        r = reduce_poly(s, G, order)
        if r.is_zero():
            continue
        G.append(r.monic(order))
        lead.append(G[-1].leading(order)[0])
        add_pairs(len(G) - 1)

    # minimalize: drop generators whose leading term another one divides
    minimal: List[Polynomial] = []
    for i in sorted(range(len(G)), key=lambda k: order.key(lead[k])):
        if any(exp_divides(m.leading(order)[0], lead[i]) for m in minimal):
            continue
        minimal.append(G[i])
    # interreduce to the unique reduced basis
    reduced = []
    for i, g in enumerate(minimal):
        rest = minimal[:i] + minimal[i + 1:]
        r = reduce_poly(g, rest, order)
        if not r.is_zero():
            reduced.append(r.monic(order))
    reduced.sort(key=lambda p: order.key(p.leading(order)[0]))
    return reduced


@dataclass
class Ideal:
    """A finitely generated ideal with a write-once Groebner cache."""

    generators: List[Polynomial]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.generators:
            raise ValueError("ideal needs at least one generator (use 0 for the zero ideal)")
        c = self.generators[0].context
        for g in self.generators:
            if g.context != c:
                raise ContextMismatch("ideal generators in mixed contexts")

    @property
    def context(self) -> VarContext:
        return self.generators[0].context

    def groebner(self, order: MonomialOrder = GREVLEX) -> List[Polynomial]:
        key = (order.kind, order.precedence)
        if key not in self._cache:
            self._cache[key] = buchberger(self.generators, order)
        return self._cache[key]

    def is_zero(self) -> bool:
        return all(g.is_zero() for g in self.generators)

    def is_unit(self) -> bool:
        gb = self.groebner()
        return len(gb) == 1 and gb[0].is_unit_constant()

    def contains(self, f: Polynomial) -> bool:
        if f.is_zero():
            return True
        return reduce_poly(f, self.groebner(), GREVLEX).is_zero()

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.generators) + ")"


def ideal(*gens: Polynomial) -> Ideal:
    return Ideal(list(gens))


def ideal_member(f: Polynomial, I: Ideal) -> bool:
    return I.contains(f)


def ideal_equal(I: Ideal, J: Ideal) -> bool:
    """Equality by two-way membership against reduced bases."""
    return all(J.contains(g) for g in I.generators) and \
        all(I.contains(g) for g in J.generators)


def eliminate(I: Ideal, keep: Sequence[str]) -> Ideal:
    """Generators of I intersected with the subring in the kept variables."""
    c = I.context
    for v in keep:
        c.index(v)
    order = elimination_order(c, keep)
    gb = buchberger(I.generators, order)
    keep_idx = {c.index(v) for v in keep}
    out = []
    for g in gb:
        if all(all(k == 0 or i in keep_idx for i, k in enumerate(e))
               for e in g.terms()):
            out.append(g)
    if not out:
        out = [Polynomial.zero(c)]
    return Ideal(out)


def _with_aux_var(context: VarContext, polys: Sequence[Polynomial], aux: str):
    names = (aux,) + context.names
    bigger = VarContext(names)
    lifted = []
    for p in polys:
        lifted.append(Polynomial(bigger, {(0,) + e: c for e, c in p.terms().items()}))
    return bigger, lifted


def intersect(I: Ideal, J: Ideal) -> Ideal:
    """I ∩ J via the t-trick: eliminate t from t*I + (1-t)*J."""
    c = I.context
    aux = "_t"
    while aux in c.names:
        aux += "_"
    bigger, fi = _with_aux_var(c, I.generators, aux)
    _, fj = _with_aux_var(c, J.generators, aux)
    t = Polynomial.var(bigger, aux)
    one = Polynomial.const(bigger, 1)
    gens = [t * f for f in fi] + [(one - t) * g for g in fj]
    big = Ideal(gens)
    elim = eliminate(big, list(c.names))
    dropped = []
    for g in elim.generators:
        dropped.append(Polynomial(c, {e[1:]: k for e, k in g.terms().items()}))
    return Ideal(dropped if dropped else [Polynomial.zero(c)])


def ideal_quotient(I: Ideal, g: Polynomial) -> Ideal:
    """(I : g) for a single nonzero polynomial g."""
    if g.is_zero():
        raise ValueError("quotient by zero")
    if I.is_zero():
        return Ideal([Polynomial.zero(I.context)])
    meet = intersect(I, Ideal([g]))
    out = []
    for h in meet.generators:
        if h.is_zero():
            continue
        q, r = normal_form(h, [g])
        if not r.is_zero():
            raise AssertionError("intersection element not divisible by g")
        out.append(q[0])
    return Ideal(out if out else [Polynomial.zero(I.context)])


def quotient_by_ideal(I: Ideal, J: Ideal) -> Ideal:
    """(I : J) = intersection of the single-element quotients."""
    result = None
    for g in J.generators:
        if g.is_zero():
            continue
        q = ideal_quotient(I, g)
        result = q if result is None else intersect(result, q)
    if result is None:
        raise ValueError("quotient by the zero ideal")
    return result


def saturate(I: Ideal, g: Polynomial, max_steps: int = 40) -> Ideal:
    """(I : g^∞) by iterated quotient until stabilization."""
    current = I
    for _ in range(max_steps):
        nxt = ideal_quotient(current, g)
        if ideal_equal(nxt, current):
            return current
        current = nxt
    raise RuntimeError("saturation did not stabilize")


def saturate_by_ideal(I: Ideal, J: Ideal, max_steps: int = 40) -> Ideal:
    current = I
    for _ in range(max_steps):
        nxt = quotient_by_ideal(current, J)
        if ideal_equal(nxt, current):
            return current
        current = nxt
    raise RuntimeError("saturation did not stabilize")


def saturation_steps(I: Ideal, g: Polynomial, max_steps: int = 40) -> int:
    """Number of quotient iterations until the saturation stabilizes."""
    current = I
    for k in range(max_steps):
        nxt = ideal_quotient(current, g)
        if ideal_equal(nxt, current):
            return k
        current = nxt
    raise RuntimeError("saturation did not stabilize")


def in_radical(f: Polynomial, I: Ideal) -> bool:
    """f ∈ √I  iff  (I : f^∞) is the unit ideal ... for V(I) ⊆ V(f) tests."""
    if f.is_zero():
        return I.is_unit()
    return saturate(I, f).is_unit()


def derivative_ideal(I: Ideal) -> Ideal:
    """D(I): the ideal plus all first partials of its generators."""
    gens = list(I.generators)
    for g in I.generators:
        for v in I.context.names:
            d = g.derivative(v)
            if not d.is_zero():
                gens.append(d)
    return Ideal(gens)


def derivative_closure(I: Ideal, steps: int) -> Ideal:
    """D^steps(I); V of it is the locus where ord(I) > steps."""
    out = I
    for _ in range(steps):
        out = derivative_ideal(out)
    return out


def is_zero_dimensional(I: Ideal) -> bool:
    """Leading-term criterion: every variable has a pure-power leading term."""
    gb = I.groebner()
    if not gb:
        return False
    if len(gb) == 1 and gb[0].is_unit_constant():
        return True  # empty locus counts as zero-dimensional here
    n = I.context.n
    covered = [False] * n
    for g in gb:
        e, _ = g.leading(GREVLEX)
        nz = [i for i, k in enumerate(e) if k > 0]
        if len(nz) == 1:
            covered[nz[0]] = True
    return all(covered)


# ---------------------------------------------------------------------------
# degree-bounded linear-algebra membership oracle (independent of Groebner)


def _monomials_exact(n: int, deg: int):
    if n == 0:
        if deg == 0:
            yield ()
        return
    for head in range(deg + 1):
        for tail in _monomials_exact(n - 1, deg - head):
            yield (head,) + tail


def _monomials_up_to(n: int, deg: int):
    """All exponent tuples in n variables of total degree <= deg."""
    for d in range(deg + 1):
        yield from _monomials_exact(n, d)


def linear_membership_oracle(f: Polynomial, gens: Sequence[Polynomial],
                             cofactor_degree: int) -> bool:
    """Decide f ∈ (gens) with cofactors of bounded total degree.

    Sets up the exact linear system sum_i q_i g_i = f over the unknown
    cofactor coefficients and solves it by fraction-free Gaussian
    elimination.  Completely independent of the division/Buchberger path.
    """
    context = f.context
    n = context.n
    cof_monos = sorted(_monomials_up_to(n, cofactor_degree))
    # column index: (generator index, cofactor monomial)
    columns = []
    for gi, g in enumerate(gens):
        for m in cof_monos:
            columns.append((gi, m))
    row_index: Dict[Tuple[int, ...], int] = {}
    rows: List[Dict[int, Fraction]] = []

    def row_of(e):
        if e not in row_index:
            row_index[e] = len(rows)
            rows.append({})
        return row_index[e]

    for col, (gi, m) in enumerate(columns):
        for e, c in gens[gi].terms().items():
            r = row_of(exp_mul(e, m))
            rows[r][col] = rows[r].get(col, Fraction(0)) + c
    rhs: Dict[int, Fraction] = {}
    for e, c in f.terms().items():
        rhs[row_of(e)] = c

    ncols = len(columns)
    dense = []
    for r, row in enumerate(rows):
        vec = [row.get(c, Fraction(0)) for c in range(ncols)]
        vec.append(rhs.get(r, Fraction(0)))
        dense.append(vec)

    # Gaussian elimination over Q, consistency check only
    pivot_row = 0
    for col in range(ncols):
        sel = None
        for r in range(pivot_row, len(dense)):
            if dense[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        dense[pivot_row], dense[sel] = dense[sel], dense[pivot_row]
        pv = dense[pivot_row][col]
        prow = dense[pivot_row]
        for r in range(len(dense)):
            if r != pivot_row and dense[r][col] != 0:
                factor = dense[r][col] / pv
                row_r = dense[r]
                for k in range(col, ncols + 1):
                    if prow[k] != 0:
                        row_r[k] -= factor * prow[k]
        pivot_row += 1
        if pivot_row == len(dense):
            break
    for r in range(len(dense)):
        if all(dense[r][c] == 0 for c in range(ncols)) and dense[r][ncols] != 0:
            return False
    return True
