"""The marked-ideal resolution engine.

Resolves a marked ideal (I, d, boundary) by the classical descent: split off
the boundary-monomial part M, form the companion of the non-monomial part N,
and blow up the maximal stratum of the companion; pure boundary monomials are
resolved combinatorially.  Control d = 1 runs a monomialization loop instead,
driven by failures of the coordinate monomiality test.

When the ambient is 3-dimensional the engine first descends to a maximal
contact hyperplane {v = 0} via the squared-gradient coefficient ideal (only
the control-2 normalization is implemented; higher controls abort), then
mirrors every plane blow-up as an ambient blow-up with the contact variable
added to the center.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .blowup_calc import (Center, MarkedIdeal, ResolutionTree, SubBlowup,
                          aligned_center, principal_transform)
from .charts import (Chart, Divisor, is_strictly_monomial_at, rational_points)
from .errors import (AlignmentError, CoefficientExponentError,
                     NoMaximalContactError)
from .ideals import (Ideal, derivative_closure, is_zero_dimensional, saturate)
from .poly import Point, Polynomial, VarContext, to_string


@dataclass
class Proposal:
    """One center the engine wants to blow in the coming slot."""

    chart_id: str            # ambient chart (in the shared tree)
    center: Center           # ambient center
    rank: tuple              # higher rank is blown earlier
    tag: str                 # 'companion' or 'monomial-case'
    info: dict = field(default_factory=dict)
    plane_leaf: Optional[str] = None   # descent-tree leaf the center came from
    plane_pairs: Optional[List[Tuple[str, Fraction]]] = None


def _boundary_vars(chart: Chart, m: MarkedIdeal) -> Dict[str, int]:
    """Boundary divisors of the marked state that read as chart variables."""
    out = {}
    for d in m.boundary:
        pairs = _as_variable(d.equation)
        if pairs is None:
            raise AlignmentError(
                f"non-coordinate boundary divisor {to_string(d.equation)} in a "
                "control>=2 run")
        out[pairs] = d.history
    return out


def _as_variable(g: Polynomial) -> Optional[str]:
    terms = g.terms()
    if len(terms) != 1:
        return None
    (e, c), = terms.items()
    if c != 1 or sum(e) != 1:
        return None
    return g.context.names[e.index(1)]


def _monomial_split(chart: Chart, m: MarkedIdeal):
    """I = M * N with M the largest boundary-monomial factor (gcd over gens)."""
    bvars = _boundary_vars(chart, m)
    gens = [g for g in m.ideal.generators if not g.is_zero()]
    exps = {}
    for v in bvars:
        exps[v] = min(g.max_var_power_dividing(v) for g in gens)
    e = [0] * chart.context.n
    for v, k in exps.items():
        e[chart.context.index(v)] = k
    n_gens = [g.div_monomial(tuple(e)) for g in gens]
    return exps, tuple(e), n_gens


def _restricted_unit(chart: Chart, I: Ideal) -> bool:
    return chart.restrict_ideal(I).is_unit()


def _max_order_on(chart: Chart, N: Sequence[Polynomial], E: Ideal,
                  cap: int) -> int:
    """Largest k with {ord(N) >= k} meeting V(E) on the chart; 0 if none."""
    NI = Ideal(list(N))
    best = 0
    for k in range(1, cap + 2):
        J = Ideal(list(derivative_closure(NI, k - 1).generators) + list(E.generators))
        if _restricted_unit(chart, J):
            break
        best = k
    return best


def _recognize_stratum(chart: Chart, W: Ideal):
    """V(W) as rational points or a coordinate subspace {v=0 : v in S}."""
    W_res = chart.restrict_ideal(W)
    if W_res.is_unit():
        return None
    if is_zero_dimensional(W_res):
        pts = rational_points(W_res, chart)
        if not pts:
            return None
        return ("points", pts)
    names = chart.context.names
    zero_sub = {}
    import itertools
    for size in range(1, len(names)):
        for S in itertools.combinations(names, size):
            sub = {v: (Polynomial.zero(chart.context) if v in S
                       else Polynomial.var(chart.context, v)) for v in names}
            if not all(g.substitute(sub, chart.context).is_zero()
                       for g in W_res.generators):
                continue
            ok = True
            for v in S:
                if not saturate(W_res, Polynomial.var(chart.context, v)).is_unit():
                    ok = False
                    break
            if ok:
                return ("aligned", [(v, Fraction(0)) for v in S])
    raise AlignmentError(
        "companion stratum is not coordinate-aligned: "
        f"({', '.join(to_string(g) for g in W_res.groebner())})")


class MarkedEngine:
    """Drives one marked-ideal resolution over a shared ambient tree.

    The engine proposes centers slot by slot; the caller blows them up in the
    shared tree (possibly merged with other engines' proposals) and hands the
    resulting step parts back via commit().
    """

    def __init__(self, tree: ResolutionTree, leaf_id: str, marked: MarkedIdeal,
                 contact_var: Optional[str], label_prefix: str = ""):
        self.tree = tree
        self.contact = contact_var
        self.label_prefix = label_prefix
        chart = tree.chart(leaf_id)
        if contact_var is None:
            self.descent = None
            self.states: Dict[str, MarkedIdeal] = {leaf_id: marked}
            self.plane_of: Dict[str, Optional[str]] = {leaf_id: leaf_id}
        else:
            plane_ctx = VarContext(
                tuple(v for v in chart.context.names if v != contact_var))
            plane_root = Chart(id="p0", context=plane_ctx,
                               equation=Polynomial.const(plane_ctx, 1),
                               inverted=[_drop_var(h, contact_var, plane_ctx)
                                         for h in chart.inverted
                                         if _drop_var(h, contact_var, plane_ctx) is not None],
                               name_index=chart.name_index)
            self.descent = ResolutionTree(plane_root)
            self.states = {"p0": marked}
            self.plane_of = {leaf_id: "p0"}
        self.done = False

    # -- slot protocol -------------------------------------------------------

    def propose(self) -> List[Proposal]:
        if self.done:
            return []
        proposals = []
        for amb_leaf, plane_leaf in sorted(self.plane_of.items()):
            if plane_leaf is None:
                continue
            m = self.states.get(plane_leaf)
            if m is None:
                continue
            proposals.extend(self._analyze(amb_leaf, plane_leaf, m))
        if not proposals:
            self.done = True
            return []
        top = max(p.rank for p in proposals)
        chosen = sorted((p for p in proposals if p.rank == top),
                        key=lambda p: (p.chart_id, p.center.gens_text()))
        # one center per leaf per slot
        seen = set()
        unique = []
        for p in chosen:
            if p.plane_leaf in seen:
                continue
            seen.add(p.plane_leaf)
            unique.append(p)
        return unique

    def commit(self, blown: Sequence[Tuple[Proposal, SubBlowup]]):
        """Mirror the ambient blow-ups on the descent tree and transform states."""
        for proposal, part in blown:
            plane_leaf = proposal.plane_leaf
            m = self.states.pop(plane_leaf)
            old_amb = proposal.chart_id
            self.plane_of.pop(old_amb, None)
            if self.descent is None:
                for child_id in part.children:
                    child = self.tree.chart(child_id)
                    self.states[child_id] = principal_transform(m, child)
                    self.plane_of[child_id] = child_id
            else:
                plane_chart = self.descent.chart(plane_leaf)
                pc = aligned_center(plane_chart, proposal.plane_pairs,
                                    label=proposal.center.label)
                dstep = self.descent.blow_up([(plane_leaf, pc)])
                plane_children = dstep.parts[0].children
                # ambient children: plane directions first, contact last
                for pchild, achild in zip(plane_children, part.children):
                    child = self.descent.chart(pchild)
                    self.states[pchild] = principal_transform(m, child)
                    self.plane_of[achild] = pchild
                self.plane_of[part.children[-1]] = None  # contact direction

    def verify_resolved(self):
        """Assert the co-support emptied out everywhere the engine stopped."""
        for amb_leaf, plane_leaf in self.plane_of.items():
            if plane_leaf is None:
                continue
            m = self.states.get(plane_leaf)
            if m is None:
                continue
            chart = self._plane_chart(plane_leaf)
            E = derivative_closure(m.ideal, m.control - 1)
            if not _restricted_unit(chart, E):
                raise AlignmentError(
                    f"marked resolution stalled on chart {amb_leaf}: co-support "
                    f"({', '.join(to_string(g) for g in chart.restrict_ideal(E).groebner())})")

    # -- analysis -------------------------------------------------------------

    def _plane_chart(self, plane_leaf: str) -> Chart:
        if self.descent is None:
            return self.tree.chart(plane_leaf)
        return self.descent.chart(plane_leaf)

    def _analyze(self, amb_leaf: str, plane_leaf: str, m: MarkedIdeal
                 ) -> List[Proposal]:
        """Candidate centers for one leaf: the companion stratum (Case B) and,
        independently, the combinatorial monomial center (Case A).

        Ranks order the global queue: companions of full order first, then
        monomial centers, then low-order blends; a blend point sitting on a
        monomial center gets swept up by the earlier line blow-up, matching
        the trace the paper reports for the descent ideal.
        """
        chart = self._plane_chart(plane_leaf)
        d = m.control
        E = derivative_closure(m.ideal, d - 1)
        if _restricted_unit(chart, E):
            return []
        out = []
        exps, e_mono, n_gens = _monomial_split(chart, m)
        n_is_unit = any(g.is_unit_constant() for g in n_gens)
        if not n_is_unit:
            J1 = Ideal(list(n_gens) + list(E.generators))
            n_meets = not _restricted_unit(chart, J1)
        else:
            n_meets = False
        if n_meets:
            p = self._companion_case(amb_leaf, plane_leaf, chart, m,
                                     e_mono, n_gens, E)
            if p is not None:
                out.append(p)
        p = self._monomial_case(amb_leaf, plane_leaf, chart, m, exps, E)
        if p is not None:
            out.append(p)
        if not out:
            raise AlignmentError(
                f"no admissible center on chart {amb_leaf} with nonempty co-support")
        return out

    def _companion_case(self, amb_leaf, plane_leaf, chart, m, e_mono, n_gens, E
                        ) -> Optional[Proposal]:
        d = m.control
        cap = max(g.total_degree() for g in n_gens)
        d_N = _max_order_on(chart, n_gens, E, cap)
        if d_N >= d:
            G = list(n_gens)
            rank = (2, d_N)
        else:
            num, den = d_N, d - d_N
            if num % den != 0:
                raise CoefficientExponentError(
                    f"companion blend needs exponent {num}/{den} "
                    f"(ord N = {d_N} < d = {d})")
            power = num // den
            Mpoly = Polynomial.monomial(chart.context, e_mono)
            G = list(n_gens) + [Mpoly ** power]
            rank = (0, d_N)
        d_G = d_N
        W = Ideal(list(derivative_closure(Ideal(G), d_G - 1).generators)
                  + list(E.generators))
        stratum = _recognize_stratum(chart, W)
        if stratum is None:
            return None
        kind, payload = stratum
        if kind == "points":
            # several companion points in one chart would re-propose in later
            # slots at the same rank; the corpus never produces more than one
            p0 = payload[0]
            plane_pairs = [(v, p0.coordinates[v]) for v in chart.context.names]
        else:
            plane_pairs = payload
        center = self._ambientize(amb_leaf, plane_pairs, tag="companion")
        return Proposal(chart_id=amb_leaf, center=center,
                        rank=rank, tag="companion",
                        info={"ord_N": d_N, "control": d,
                              "N": [to_string(g) for g in n_gens]},
                        plane_leaf=plane_leaf, plane_pairs=plane_pairs)

    def _monomial_case(self, amb_leaf, plane_leaf, chart, m, exps, E
                       ) -> Optional[Proposal]:
        """Case A: a minimal set of boundary divisors with enough joint order,
        contained in the co-support."""
        import itertools
        d = m.control
        names = [v for v in chart.context.names if exps.get(v, 0) > 0]
        best = None
        for size in range(1, len(names) + 1):
            feasible = []
            for S in itertools.combinations(names, size):
                total = sum(exps[v] for v in S)
                if total < d:
                    continue
                sub = {v: (Polynomial.zero(chart.context) if v in S
                           else Polynomial.var(chart.context, v))
                       for v in chart.context.names}
                if not all(g.substitute(sub, chart.context).is_zero()
                           for g in E.generators):
                    continue  # center would poke out of the co-support
                SI = Ideal([Polynomial.var(chart.context, v) for v in S])
                if _restricted_unit(chart, SI):
                    continue
                feasible.append((-total, tuple(S)))
            if feasible:
                feasible.sort()
                best = feasible[0][1]
                break
        if best is None:
            return None
        plane_pairs = [(v, Fraction(0)) for v in best]
        center = self._ambientize(amb_leaf, plane_pairs, tag="monomial-case")
        return Proposal(chart_id=amb_leaf, center=center, rank=(1, 0),
                        tag="monomial-case",
                        info={"exponents": dict(exps), "control": d},
                        plane_leaf=plane_leaf, plane_pairs=plane_pairs)

    def _ambientize(self, amb_leaf: str, plane_pairs, tag: str) -> Center:
        chart = self.tree.chart(amb_leaf)
        pairs = list(plane_pairs)
        if self.contact is not None:
            pairs = pairs + [(self.contact_var_on(amb_leaf), Fraction(0))]
        label = f"{self.label_prefix}{tag}"
        return aligned_center(chart, pairs, label=label)

    def contact_var_on(self, amb_leaf: str) -> str:
        """The contact variable's name in this chart (renamed along the lineage)."""
        chart = self.tree.chart(amb_leaf)
        plane_leaf = self.plane_of[amb_leaf]
        plane_chart = self._plane_chart(plane_leaf)
        plane_names = set(plane_chart.context.names)
        rest = [v for v in chart.context.names if v not in plane_names]
        if len(rest) != 1:
            raise AssertionError("cannot identify contact variable")
        return rest[0]


def _drop_var(h: Polynomial, var: str, target: VarContext) -> Optional[Polynomial]:
    """Restrict a polynomial to {var = 0}; None if it vanishes there."""
    i = h.context.index(var)
    out = {}
    for e, c in h.terms().items():
        if e[i]:
            continue
        out[tuple(k for j, k in enumerate(e) if j != i)] = c
    p = Polynomial(target, out)
    return None if p.is_zero() else p


# ---------------------------------------------------------------------------
# control-1 monomialization engine (principal ideals)


class MonomializeEngine:
    """Control-1 loop: blow rational points where the tracked principal ideal
    fails the coordinate monomiality test, ranked by boundary contact."""

    def __init__(self, tree: ResolutionTree, leaf_id: str, marked: MarkedIdeal,
                 label_prefix: str = ""):
        if len(marked.ideal.groebner()) != 1:
            raise AlignmentError("control-1 monomialization needs a principal ideal")
        gen = marked.ideal.groebner()[0]
        self.tree = tree
        self.label_prefix = label_prefix
        self.states: Dict[str, MarkedIdeal] = {
            leaf_id: MarkedIdeal(Ideal([gen]), 1, list(marked.boundary))}
        self.done = False

    def propose(self) -> List[Proposal]:
        if self.done:
            return []
        proposals = []
        for leaf_id in sorted(self.states):
            m = self.states[leaf_id]
            p = self._analyze(leaf_id, m)
            proposals.extend(p)
        if not proposals:
            self.done = True
            return []
        top = max(p.rank for p in proposals)
        return sorted((p for p in proposals if p.rank == top),
                      key=lambda p: (p.chart_id, p.center.gens_text()))

    def commit(self, blown: Sequence[Tuple[Proposal, SubBlowup]]):
        for proposal, part in blown:
            m = self.states.pop(proposal.chart_id)
            for child_id in part.children:
                child = self.tree.chart(child_id)
                self.states[child_id] = principal_transform(m, child)

    def _analyze(self, leaf_id: str, m: MarkedIdeal) -> List[Proposal]:
        chart = self.tree.chart(leaf_id)
        f = m.ideal.generators[0]
        if f.is_unit_constant():
            return []
        comps, residual = divisor_components(chart, m)
        candidates: List[Point] = []
        for i, a in enumerate(comps):
            sing = Ideal([a] + [a.derivative(v) for v in chart.context.names])
            candidates.extend(_zero_dim_points(sing, chart))
            for b in comps[i + 1:]:
                candidates.extend(_zero_dim_points(Ideal([a, b]), chart))
        seen = set()
        failures = []
        for p in candidates:
            key = p.tuple()
            if key in seen:
                continue
            seen.add(key)
            if not is_strictly_monomial_at(f, p, chart):
                failures.append(p)
        out = []
        for p in sorted(failures, key=lambda q: q.tuple()):
            n_b = sum(1 for d in m.boundary
                      if not d.equation.is_unit_constant() and d.equation.eval(p) == 0)
            pairs = [(v, p.coordinates[v]) for v in chart.context.names]
            center = aligned_center(chart, pairs,
                                    label=f"{self.label_prefix}monomialize")
            from .poly import order_at_point
            rank = (order_at_point(f, p) or 0, n_b)
            out.append(Proposal(chart_id=leaf_id, center=center, rank=rank,
                                tag="monomial-case",
                                info={"boundary_through": n_b},
                                plane_leaf=leaf_id,
                                plane_pairs=pairs))
        return out


def divisor_components(chart: Chart, m: MarkedIdeal):
    """Split a principal marked ideal into boundary equations and the
    residual non-boundary factor: generator = prod(boundary^k) * residual."""
    from .ideals import normal_form
    f = m.ideal.generators[0]
    comps = []
    residual = f
    for d in m.boundary:
        eq = d.equation
        if eq.is_unit_constant():
            continue
        while True:
            q, r = normal_form(residual, [eq])
            if r.is_zero() and not q[0].is_zero():
                residual = q[0]
            else:
                break
        comps.append(eq)
    if not residual.is_constant():
        comps.append(residual)
    return comps, residual


def monomial_test_points(chart: Chart, m: MarkedIdeal) -> List[Point]:
    """Rational points where monomiality is at risk: singular points of each
    tracked component and pairwise component intersections."""
    comps, _res = divisor_components(chart, m)
    pts = {}
    for i, a in enumerate(comps):
        sing = Ideal([a] + [d for v in chart.context.names
                            if not (d := a.derivative(v)).is_zero()])
        for p in _zero_dim_points(sing, chart):
            pts[p.tuple()] = p
        for b in comps[i + 1:]:
            for p in _zero_dim_points(Ideal([a, b]), chart):
                pts[p.tuple()] = p
    return [pts[k] for k in sorted(pts)]


def _zero_dim_points(I: Ideal, chart: Chart) -> List[Point]:
    J = chart.restrict_ideal(I)
    if J.is_unit():
        return []
    if not is_zero_dimensional(J):
        return []
    return rational_points(J, chart)


# ---------------------------------------------------------------------------


def run_engines(tree: ResolutionTree, engines: Sequence, log: List,
                max_slots: int = 40, tag_override: str = None):
    """Advance all engines in lockstep until each reports done.

    Each global slot takes one proposal round from every live engine and
    blows the union simultaneously.  Finished engines simply stop proposing;
    explicit padding is only added by merge utilities, not here.
    """
    for _ in range(max_slots):
        rounds = []
        for eng in engines:
            props = eng.propose()
            if props:
                rounds.append((eng, props))
        if not rounds:
            return
        entries = []
        flat = []
        for eng, props in rounds:
            for p in props:
                entries.append((p.chart_id, p.center))
                flat.append((eng, p))
        step = tree.blow_up(entries)
        by_engine: Dict[int, List] = {}
        for (eng, proposal), part in zip(flat, step.parts):
            by_engine.setdefault(id(eng), (eng, []))[1].append((proposal, part))
            log.append({
                "slot": step.slot,
                "chart": part.parent,
                "center": proposal.center.gens_text(),
                "root_image": [to_string(g) for g in part.root_image.groebner()]
                if part.root_image else [],
                "tag": tag_override or proposal.tag,
                "info": proposal.info,
                "label": proposal.center.label,
            })
        for eng, blown in by_engine.values():
            eng.commit(blown)
    raise RuntimeError("marked resolution exceeded the slot budget")
