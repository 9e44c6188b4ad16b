"""Desingularization drivers.

Two families, matching the two algorithms compared in the worked traces:

* ``resolve_curve`` / ``fvar_surface``: the classical maximal-contact driver,
  synchronized by multiplicity (curves) or by the marked-ideal invariant
  (surfaces in 3-space).
* ``floc_curve`` / ``floc_surface``: the localization-stage driver, which
  first blows up all the bad points at once and then repairs the rest with
  the classical driver on the localized charts.

``resolve_pair`` composes blow-up of a subscheme, desingularization, and
control-1 monomialization of the pullback.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .blowup_calc import (Center, MarkedIdeal, ResolutionTree, SubBlowup,
                          aligned_center, principal_transform,
                          strict_transform_ideal, _recognize_aligned)
from .charts import (Chart, Divisor, aligned_lines_in, is_smooth,
                     is_strictly_monomial_at, rational_points,
                     residual_after_lines, root_chart, singular_locus,
                     smooth_certificate)
from .errors import (AlignmentError, CoefficientExponentError,
                     NoMaximalContactError, NonReducedError, ResolutionError)
from .ideals import Ideal, derivative_closure, is_zero_dimensional, saturate
from .marked import (MarkedEngine, MonomializeEngine, Proposal,
                     monomial_test_points, run_engines)
from .poly import Point, Polynomial, VarContext, order_at_point, to_string


@dataclass
class DriverReport:
    """Everything a driver run produces: the tree, the ordered center log
    with justification tags, and per-leaf smoothness certificates."""

    driver: str
    tree: ResolutionTree
    centers_log: List[dict] = field(default_factory=list)
    smooth_certificates: Dict[str, dict] = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    def slot_count(self) -> int:
        return len({e["slot"] for e in self.centers_log})

    def slots(self) -> List[List[dict]]:
        out: Dict[int, List[dict]] = {}
        for e in self.centers_log:
            out.setdefault(e["slot"], []).append(e)
        return [out[k] for k in sorted(out)]

    def leaf_ids(self) -> List[str]:
        return self.tree.leaves()

    def to_json_dict(self) -> dict:
        d = self.tree.to_json_dict()
        d["driver"] = self.driver
        d["centers_log"] = [
            {k: v for k, v in e.items() if k != "info"} | {"info": _plain(e["info"])}
            for e in self.centers_log
        ]
        d["certificates"] = {k: self.smooth_certificates[k]
                             for k in sorted(self.smooth_certificates)}
        return d


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def _collect_certificates(report: DriverReport):
    tree = report.tree
    for leaf in tree.leaves():
        ch = tree.chart(leaf)
        if not is_smooth(ch):
            raise ResolutionError(
                f"driver {report.driver} left chart {leaf} singular: "
                f"{to_string(ch.equation)}")
        report.smooth_certificates[leaf] = smooth_certificate(ch)


def _postcondition_checks(report: DriverReport, enforce: bool = True):
    """Theorem-style postconditions: regular centers supported in the root
    singular locus.  Stored per log entry; drivers that promise them enforce."""
    tree = report.tree
    root = tree.chart(tree.root)
    j_root = singular_locus(root)
    for entry in report.centers_log:
        chart = tree.chart(entry["chart"])
        gens = [chart.poly(t) for t in entry["center"]]
        regular = _center_regular(chart, gens)
        supported = None
        if entry.get("root_image"):
            image = Ideal([_parse_on(root, t) for t in entry["root_image"]])
            supported = all(
                saturate(image, g).is_unit()
                for g in j_root.generators if not g.is_zero())
        entry["check_center_regular"] = regular
        entry["check_in_singular_support"] = supported
        if enforce and regular is False:
            raise ResolutionError(f"irregular center at slot {entry['slot']}")
        if enforce and supported is False:
            raise ResolutionError(
                f"center at slot {entry['slot']} not supported in the singular locus")


def _parse_on(chart: Chart, text: str) -> Polynomial:
    from .poly import parse
    return parse(text, chart.context)


def _center_regular(chart: Chart, gens: Sequence[Polynomial]) -> bool:
    if len(gens) == 1:
        g = gens[0]
        if g.is_unit_constant():
            return True
        J = Ideal([g] + [d for v in chart.context.names
                         if not (d := g.derivative(v)).is_zero()])
        return chart.ideal_empty_here(J)
    # coordinate-aligned centers are affine subspaces
    return _recognize_aligned(Ideal(list(gens))) is not None


# ---------------------------------------------------------------------------
# curves


class CurveEngine:
    """Blows up singular points of plane curves, one multiplicity class per
    slot; in localization mode the first slot takes every singular point."""

    def __init__(self, tree: ResolutionTree, leaf_id: str, localized_first: bool):
        self.tree = tree
        self.frontier = [leaf_id]
        self.first = localized_first
        self.done = False

    def _singular_points(self):
        found = []
        for leaf in sorted(self.frontier):
            ch = self.tree.chart(leaf)
            f = ch.equation
            if f.is_unit_constant():
                continue
            J = ch.restrict_ideal(singular_locus(ch))
            if J.is_unit():
                continue
            if not is_zero_dimensional(J):
                raise NonReducedError(
                    f"positive-dimensional singular locus of a plane curve on "
                    f"{leaf}: non-reduced component")
            for p in rational_points(J, ch):
                found.append((leaf, p, order_at_point(f, p)))
        return found

    def propose(self) -> List[Proposal]:
        if self.done:
            return []
        pts = self._singular_points()
        if not pts:
            self.done = True
            return []
        if self.first:
            chosen = pts
            tag = "step1-points"
        else:
            top = max(m for (_, _, m) in pts)
            chosen = [t for t in pts if t[2] == top]
            tag = "max-multiplicity"
        self.first = False
        out = []
        for leaf, p, mult in sorted(chosen, key=lambda t: (t[0], t[1].tuple())):
            ch = self.tree.chart(leaf)
            pairs = [(v, p.coordinates[v]) for v in ch.context.names]
            out.append(Proposal(
                chart_id=leaf, center=aligned_center(ch, pairs, label=tag),
                rank=(mult,), tag=tag, info={"multiplicity": mult},
                plane_leaf=leaf, plane_pairs=pairs))
        return out

    def commit(self, blown: Sequence[Tuple[Proposal, SubBlowup]]):
        for proposal, part in blown:
            if proposal.chart_id in self.frontier:
                self.frontier.remove(proposal.chart_id)
            self.frontier.extend(part.children)


def _run_curve(chart: Chart, localized_first: bool, name: str) -> DriverReport:
    if chart.context.n != 2:
        raise ValueError("curve drivers need a 2-variable chart")
    tree = ResolutionTree(chart)
    log: List[dict] = []
    engine = CurveEngine(tree, chart.id, localized_first)
    run_engines(tree, [engine], log)
    report = DriverReport(name, tree, log)
    _collect_certificates(report)
    _postcondition_checks(report)
    return report


def resolve_curve(chart: Chart) -> DriverReport:
    """Classical driver: blow up the points of maximal multiplicity each step."""
    return _run_curve(chart, localized_first=False, name="curve-fvar")


def floc_curve(chart: Chart) -> DriverReport:
    """Localization driver: blow up all singular points once, then proceed by
    maximal multiplicity."""
    return _run_curve(chart, localized_first=True, name="curve-floc")


# ---------------------------------------------------------------------------
# surfaces


def _find_contact_var(f: Polynomial, chart: Chart) -> str:
    """A chart variable whose partial of f is a nonzero constant times it."""
    for v in chart.context.names:
        d = f.derivative(v)
        terms = d.terms()
        if len(terms) != 1:
            continue
        (e, c), = terms.items()
        if sum(e) == 1 and e[chart.context.index(v)] == 1:
            return v
    raise NoMaximalContactError(
        f"no coordinate-aligned maximal contact for {to_string(f)}")


def _drop_contact(f: Polynomial, contact: str, plane_ctx: VarContext) -> Polynomial:
    i = f.context.index(contact)
    out = {}
    for e, c in f.terms().items():
        if e[i]:
            continue
        out[tuple(k for j, k in enumerate(e) if j != i)] = c
    return Polynomial(plane_ctx, out)


def coefficient_ideal(f: Polynomial, contact: str, chart: Chart) -> Ideal:
    """Control-2 coefficient ideal on {contact = 0}: the restriction of f
    plus the squared gradient, all restricted to the contact hyperplane."""
    plane_ctx = VarContext(
        tuple(v for v in chart.context.names if v != contact))
    gens = []
    f0 = _drop_contact(f, contact, plane_ctx)
    if not f0.is_zero():
        gens.append(f0)
    partials = []
    for v in chart.context.names:
        p0 = _drop_contact(f.derivative(v), contact, plane_ctx)
        if not p0.is_zero():
            partials.append(p0)
    for i, a in enumerate(partials):
        for b in partials[i:]:
            gens.append(a * b)
    if not gens:
        raise AlignmentError("coefficient ideal is zero: equation is a "
                             "multiple of the contact variable")
    return Ideal(gens)


def _surface_max_order(chart: Chart, f: Polynomial) -> int:
    """Maximal multiplicity of {f=0} over its singular locus (desk scale)."""
    J = chart.restrict_ideal(singular_locus(chart, f))
    if J.is_unit():
        return 1
    lines = aligned_lines_in(J, chart)
    orders = [f.order_along(list(S)) for S in lines]
    residual = residual_after_lines(J, lines, chart)
    if not residual.is_unit():
        if not is_zero_dimensional(residual):
            raise AlignmentError(
                "singular locus has a curve component that is not a "
                "coordinate line: "
                f"({', '.join(to_string(g) for g in residual.groebner())})")
        for p in rational_points(residual, chart):
            orders.append(order_at_point(f, p))
    if not orders:
        return 1
    return max(orders)


class FvarEngine:
    """The classical surface driver as a slot-wise engine.

    Round one resolves the marked ideal (f, max multiplicity) through the
    maximal-contact descent; if lower-multiplicity singularities survive, new
    rounds start fresh on the singular leaves until everything is smooth.
    """

    def __init__(self, tree: ResolutionTree, leaf_id: str, label_prefix: str = ""):
        self.tree = tree
        self.domain = leaf_id
        self.label_prefix = label_prefix
        self.inner: List[MarkedEngine] = []
        self.rounds = 0
        self.done = False
        self._spawn([leaf_id])

    def _spawn(self, leaves: Sequence[str]):
        created = []
        for leaf in leaves:
            ch = self.tree.chart(leaf)
            f = ch.equation
            if f.is_unit_constant() or is_smooth(ch):
                continue
            d = _surface_max_order(ch, f)
            if d <= 1:
                continue
            if d > 2:
                raise CoefficientExponentError(
                    f"multiplicity {d} needs a coefficient-ideal normalization "
                    "beyond the squared-gradient form")
            contact = _find_contact_var(f, ch)
            C = coefficient_ideal(f, contact, ch)
            marked = MarkedIdeal(C, d)
            created.append(MarkedEngine(self.tree, leaf, marked, contact,
                                        label_prefix=self.label_prefix))
        self.inner = created
        self.rounds += 1
        if self.rounds > 5:
            raise ResolutionError("surface driver did not terminate in 5 rounds")

    def _sub_leaves(self) -> List[str]:
        sub = set(self.tree.subtree(self.domain))
        return [l for l in self.tree.leaves() if l in sub]

    def propose(self) -> List[Proposal]:
        if self.done:
            return []
        while True:
            out = []
            for eng in self.inner:
                out.extend(eng.propose())
            if out:
                return out
            for eng in self.inner:
                eng.verify_resolved()
            singular = [l for l in self._sub_leaves()
                        if not is_smooth(self.tree.chart(l))]
            if not singular:
                self.done = True
                return []
            self._spawn(sorted(singular))
            if not self.inner:
                self.done = True
                return []

    def commit(self, blown: Sequence[Tuple[Proposal, SubBlowup]]):
        by_engine: Dict[int, Tuple[MarkedEngine, list]] = {}
        owner = {}
        for eng in self.inner:
            for leaf in eng.plane_of:
                owner[leaf] = eng
        for proposal, part in blown:
            eng = owner[proposal.chart_id]
            by_engine.setdefault(id(eng), (eng, []))[1].append((proposal, part))
        for eng, items in by_engine.values():
            eng.commit(items)


def fvar_surface(chart: Chart) -> DriverReport:
    """Classical maximal-contact driver for a hypersurface in 3-space."""
    if chart.context.n != 3:
        raise ValueError("fvar_surface needs a 3-variable chart")
    tree = ResolutionTree(chart)
    log: List[dict] = []
    if not is_smooth(chart):
        engine = FvarEngine(tree, chart.id)
        run_engines(tree, [engine], log)
    report = DriverReport("fvar", tree, log)
    _collect_certificates(report)
    _postcondition_checks(report)
    return report


# -- the localization driver -------------------------------------------------


def _f1_stage(tree: ResolutionTree, log: List[dict], max_rounds: int = 5):
    """Blow up the coordinate-aligned singular curves until none remain."""
    for _ in range(max_rounds):
        entries = []
        for leaf in tree.leaves():
            ch = tree.chart(leaf)
            if ch.equation.is_unit_constant():
                continue
            J = ch.restrict_ideal(singular_locus(ch))
            if J.is_unit():
                continue
            lines = aligned_lines_in(J, ch)
            if not lines:
                if not is_zero_dimensional(J):
                    raise AlignmentError(
                        "1-dimensional singular locus without aligned "
                        f"components on {leaf}")
                continue
            residual_after_lines(J, lines, ch)  # raises when not alignable
            for S in lines:
                pairs = [(v, Fraction(0)) for v in S]
                entries.append((leaf, aligned_center(
                    ch, pairs, label="generic-singular-curve")))
        if not entries:
            return
        step = tree.blow_up(entries)
        for part in step.parts:
            log.append({
                "slot": step.slot, "chart": part.parent,
                "center": part.center.gens_text(),
                "root_image": [to_string(g) for g in part.root_image.groebner()],
                "tag": "max-multiplicity",
                "info": {"stage": "generic-curve"},
                "label": part.center.label,
            })
    raise ResolutionError("generic-curve stage did not terminate")


def _clone_root(chart: Chart) -> Chart:
    return Chart(id="c0", context=chart.context, equation=chart.equation,
                 exceptional=list(chart.exceptional), parent=None,
                 inverted=list(chart.inverted),
                 extra_divisors=list(chart.extra_divisors),
                 name_index=chart.name_index)


def _unresolved_points(tree: ResolutionTree) -> List[Point]:
    """Root points over which the current tree is not a strong
    desingularization: images of residual singular points of the leaves."""
    root_ctx = tree.chart(tree.root).context
    found = {}
    for leaf in tree.leaves():
        ch = tree.chart(leaf)
        if ch.equation.is_unit_constant():
            continue
        J = ch.restrict_ideal(singular_locus(ch))
        if J.is_unit():
            continue
        sub = tree.substitution_to_root(leaf)
        for p in rational_points(J, ch):
            if sub is None:
                rp = Point(root_ctx, dict(p.coordinates))
            else:
                coords = {v: sub.assignment[v].eval(p) for v in root_ctx.names}
                rp = Point(root_ctx, coords)
            found[rp.tuple()] = rp
    return [found[k] for k in sorted(found)]


def floc_surface(chart: Chart) -> DriverReport:
    """The localization-stage driver for a hypersurface in 3-space.

    Stage one resolves the generic singular curve; if the result is already a
    strong desingularization nothing else happens.  Otherwise the true run
    starts with the simultaneous blow-up of the bad points b, replays the
    inherited curve centers as strict transforms (repairing them first if
    they were singular over b; aligned centers never are), and finishes the
    residual singularities over b with the classical driver run fresh on
    each localized leaf chart, slot-synchronized.
    """
    if chart.context.n != 3:
        raise ValueError("floc_surface needs a 3-variable chart")
    # dry run of the generic-curve stage to locate b
    scratch = ResolutionTree(_clone_root(chart))
    scratch_log: List[dict] = []
    _f1_stage(scratch, scratch_log)
    b = _unresolved_points(scratch)

    if not b:
        tree = ResolutionTree(_clone_root(chart))
        log: List[dict] = []
        _f1_stage(tree, log)
        report = DriverReport("floc", tree, log)
        _collect_certificates(report)
        _postcondition_checks(report)
        return report

    tree = ResolutionTree(_clone_root(chart))
    log = []
    root = tree.chart(tree.root)
    entries = []
    for p in b:
        pairs = [(v, p.coordinates[v]) for v in root.context.names]
        entries.append((tree.root, aligned_center(root, pairs, label="step1-points")))
    step = tree.blow_up(entries)
    for part in step.parts:
        log.append({"slot": step.slot, "chart": part.parent,
                    "center": part.center.gens_text(),
                    "root_image": [to_string(g) for g in part.root_image.groebner()],
                    "tag": "step1-points", "info": {"points": len(b)},
                    "label": "step1-points"})

    # replay the inherited generic-curve centers on their strict transforms
    for sc_entry in scratch_log:
        root_image = Ideal([_parse_on(root, t) for t in sc_entry["root_image"]])
        entries = []
        for leaf in tree.leaves():
            ch = tree.chart(leaf)
            sub = tree.substitution_to_root(leaf)
            gens = [sub.apply(g) for g in root_image.generators] if sub else \
                [g.rename(ch.context) for g in root_image.generators]
            I = Ideal(gens)
            for v, _h in ch.exceptional:
                I = saturate(I, Polynomial.var(ch.context, v))
            I = ch.restrict_ideal(I)
            if I.is_unit():
                continue
            aligned = _recognize_aligned(Ideal(list(I.groebner())))
            if aligned is None:
                raise AlignmentError(
                    "inherited center strict transform is not aligned on "
                    f"{leaf}: ({', '.join(to_string(g) for g in I.groebner())})")
            # Step 2 hook: the center must be regular over b before we blow
            # it up; aligned strict transforms are, so nothing is inserted.
            entries.append((leaf, Center([Polynomial.var(ch.context, v) -
                                          Polynomial.const(ch.context, c)
                                          for v, c in aligned],
                                         aligned=aligned,
                                         label="inherited-curve")))
        if not entries:
            continue
        step = tree.blow_up(entries)
        for part in step.parts:
            log.append({"slot": step.slot, "chart": part.parent,
                        "center": part.center.gens_text(),
                        "root_image": [to_string(g) for g in
                                       part.root_image.groebner()],
                        "tag": "max-multiplicity",
                        "info": {"stage": "inherited-curve"},
                        "label": "inherited-curve"})

    # Step 3: classical driver, fresh, on every leaf still singular over b
    engines = []
    for leaf in tree.leaves():
        ch = tree.chart(leaf)
        if ch.equation.is_unit_constant() or is_smooth(ch):
            continue
        engines.append(FvarEngine(tree, leaf, label_prefix="step3:"))
    if engines:
        run_engines(tree, engines, log, tag_override="step3-small")
    report = DriverReport("floc", tree, log)
    _collect_certificates(report)
    _postcondition_checks(report)
    return report


# ---------------------------------------------------------------------------
# marked-ideal driver and the pair functor


def bm_resolve_marked(marked: MarkedIdeal, chart: Chart) -> DriverReport:
    """Resolve a marked ideal on the given chart.

    Control 1 monomializes a principal ideal; control 2 runs the descent
    (through a maximal-contact hyperplane when the ambient has one to give);
    higher controls with a non-monomial part abort.
    """
    tree = ResolutionTree(chart)
    log: List[dict] = []
    if marked.control == 1:
        engine = MonomializeEngine(tree, chart.id, marked)
        run_engines(tree, [engine], log)
        report = DriverReport("marked", tree, log)
        report.checks["monomial_points"] = _monomiality_report(tree, engine)
        return report
    contact = None
    if chart.context.n >= 3 and len(marked.ideal.generators) == 1:
        contact = _find_contact_var(marked.ideal.generators[0], chart)
        C = coefficient_ideal(marked.ideal.generators[0], contact, chart)
        inner = MarkedIdeal(C, marked.control, list(marked.boundary))
    else:
        inner = marked
    engine = MarkedEngine(tree, chart.id, inner, contact)
    run_engines(tree, [engine], log)
    engine.verify_resolved()
    report = DriverReport("marked", tree, log)
    report.checks["final_states"] = {
        leaf: [to_string(g) for g in m.ideal.groebner()]
        for leaf, m in sorted(engine.states.items())}
    return report


def _monomiality_report(tree: ResolutionTree, engine: MonomializeEngine) -> dict:
    out = {}
    for leaf, m in sorted(engine.states.items()):
        ch = tree.chart(leaf)
        f = m.ideal.generators[0]
        pts = monomial_test_points(ch, m)
        out[leaf] = {
            "equation": to_string(f),
            "points": [{"point": str(p),
                        "monomial": is_strictly_monomial_at(f, p, ch)}
                       for p in pts],
        }
    return out


def resolve_pair(chart: Chart, z_gens: Sequence[Polynomial]) -> DriverReport:
    """Theorem-3.3 shape: blow up Z, desingularize, monomialize the pullback."""
    z_gens = [g for g in z_gens if not g.is_zero()]
    if not z_gens or any(g.is_unit_constant() for g in z_gens):
        report = (floc_surface(chart) if chart.context.n == 3 and
                  not chart.equation.is_unit_constant() else
                  DriverReport("pair", ResolutionTree(chart)))
        report.driver = "pair"
        report.checks["phases"] = {"blowup_z": 0, "desingularize": 0,
                                   "monomialize": 0}
        for e in report.centers_log:
            e["phase"] = "desingularize"
        if not report.smooth_certificates:
            _collect_certificates(report)
        return report

    tree = ResolutionTree(chart)
    log: List[dict] = []
    phases = {"blowup_z": 0, "desingularize": 0, "monomialize": 0}

    # phase 1: make Z a Cartier divisor
    zc = Ideal(list(z_gens))
    aligned = _recognize_aligned(zc)
    center = Center(list(z_gens), aligned=aligned, label="phase1:Z")
    step = tree.blow_up([(tree.root, center)])
    phases["blowup_z"] = 1
    for part in step.parts:
        log.append({"slot": step.slot, "chart": part.parent,
                    "center": part.center.gens_text(),
                    "root_image": [to_string(g) for g in part.root_image.groebner()],
                    "tag": "monomial-case", "phase": "blowup_z",
                    "info": {"empty": part.empty}, "label": "phase1:Z"})

    # phase 2: desingularize the blown-up object
    mark = len(log)
    engines = []
    for leaf in tree.leaves():
        ch = tree.chart(leaf)
        if ch.equation.is_unit_constant() or is_smooth(ch):
            continue
        if ch.context.n == 2:
            engines.append(CurveEngine(tree, leaf, localized_first=True))
        else:
            engines.append(FvarEngine(tree, leaf, label_prefix="phase2:"))
    if engines:
        run_engines(tree, engines, log)
        phases["desingularize"] = len({e["slot"] for e in log[mark:]})
    for e in log[mark:]:
        e["phase"] = "desingularize"

    # phase 3: monomialize the pullback of Z with control 1
    mark = len(log)
    engines = []
    for leaf in tree.leaves():
        ch = tree.chart(leaf)
        sub = tree.substitution_to_root(leaf)
        gens = [sub.apply(g) for g in z_gens] if sub else \
            [g.rename(ch.context) for g in z_gens]
        pull = Ideal(gens).groebner()
        if len(pull) != 1:
            raise AlignmentError(
                f"pullback of Z on {leaf} is not principal: "
                f"({', '.join(to_string(g) for g in pull)})")
        if pull[0].is_unit_constant():
            continue
        boundary = [Divisor(Polynomial.var(ch.context, v), h)
                    for v, h in ch.exceptional]
        boundary += list(ch.extra_divisors)
        engines.append(MonomializeEngine(
            tree, leaf, MarkedIdeal(Ideal([pull[0]]), 1, boundary),
            label_prefix="phase3:"))
    monomial_engines = engines
    if engines:
        run_engines(tree, engines, log)
        phases["monomialize"] = len({e["slot"] for e in log[mark:]})
    for e in log[mark:]:
        e["phase"] = "monomialize"

    report = DriverReport("pair", tree, log)
    report.checks["phases"] = phases
    points = {}
    for eng in monomial_engines:
        for leaf, m in sorted(eng.states.items()):
            ch = tree.chart(leaf)
            sub = tree.substitution_to_root(leaf)
            pull = sub.apply(z_gens[0]) if sub else z_gens[0].rename(ch.context)
            pts = monomial_test_points(ch, m)
            points[leaf] = {
                "pullback": to_string(pull),
                "points": [{"point": str(p),
                            "monomial": is_strictly_monomial_at(pull, p, ch)}
                           for p in pts]}
    report.checks["monomial_points"] = points
    _collect_certificates(report)
    return report
