"""Blow-up charts, remembered centers, transforms, and the resolution tree.

Blow-ups are computed chart-by-chart: a center aligned to k variables (after
an affine translation) produces k affine children.  Every step remembers its
center; empty steps (unit-ideal or already-principal centers) are first-class
and carry one child, used for synchronization padding and for the principal
divisor steps of the marked-ideal calculus.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .charts import Chart, Divisor, Substitution
from .errors import AlignmentError
from .ideals import Ideal, eliminate, ideal_equal, saturate
from .poly import (Point, Polynomial, VarContext, parse, to_string)

_BASE_RE = re.compile(r"^(.*?)(\d+)$")


def _base_name(name: str) -> str:
    m = _BASE_RE.match(name)
    return m.group(1) if m else name


def child_names(parent: VarContext, index: int) -> Tuple[str, ...]:
    """Paper-style renaming: every variable gets the new subscript index."""
    return tuple(f"{_base_name(v)}{index}" for v in parent.names)


@dataclass
class Center:
    """A blow-up center: generator ideal plus its coordinate alignment.

    ``aligned`` lists (variable, offset) pairs: after translating each listed
    variable by its offset the generators are exactly those variables.  A
    principal center (one generator) needs no alignment: blowing it up is the
    identity map.
    """

    generators: List[Polynomial]
    aligned: Optional[List[Tuple[str, Fraction]]] = None
    label: str = ""

    @property
    def context(self) -> VarContext:
        return self.generators[0].context

    def is_unit(self) -> bool:
        return any(g.is_unit_constant() for g in self.generators)

    def is_principal(self) -> bool:
        return len(self.generators) == 1

    def ideal(self) -> Ideal:
        return Ideal(list(self.generators))

    def gens_text(self) -> List[str]:
        return [to_string(g) for g in self.generators]


def aligned_center(chart: Chart, pairs: Sequence[Tuple[str, Fraction]],
                   label: str = "") -> Center:
    gens = []
    for v, c in pairs:
        g = Polynomial.var(chart.context, v)
        if c:
            g = g - Polynomial.const(chart.context, c)
        gens.append(g)
    return Center(gens, aligned=[(v, Fraction(c)) for v, c in pairs], label=label)


def point_center(chart: Chart, p: Point, label: str = "") -> Center:
    pairs = [(v, p.coordinates[v]) for v in chart.context.names]
    return aligned_center(chart, pairs, label=label)


@dataclass
class SubBlowup:
    """One (parent chart, center) part of a possibly simultaneous step."""

    parent: str
    center: Center
    children: List[str]
    empty: bool
    root_image: Optional[Ideal] = None


@dataclass
class BlowupStep:
    slot: int
    parts: List[SubBlowup] = field(default_factory=list)

    def is_empty(self) -> bool:
        return all(p.empty for p in self.parts)


class ResolutionTree:
    """DAG of charts plus the ordered list of (synchronized) blow-up steps."""

    def __init__(self, root: Chart):
        self.charts: Dict[str, Chart] = {root.id: root}
        self.steps: List[BlowupStep] = []
        self.root: str = root.id
        self._counter = 0

    # -- structure helpers ---------------------------------------------------

    def chart(self, cid: str) -> Chart:
        return self.charts[cid]

    def fresh_id(self) -> str:
        self._counter += 1
        return f"c{self._counter}"

    def children_of(self, cid: str) -> List[str]:
        out = []
        for step in self.steps:
            for part in step.parts:
                if part.parent == cid:
                    out.extend(part.children)
        return out

    def leaves(self) -> List[str]:
        parents = set()
        for step in self.steps:
            for part in step.parts:
                if part.children:
                    parents.add(part.parent)
        return sorted((cid for cid in self.charts if cid not in parents),
                      key=_chart_sort_key)

    def subtree(self, cid: str) -> List[str]:
        out = [cid]
        i = 0
        while i < len(out):
            out.extend(self.children_of(out[i]))
            i += 1
        return out

    def substitution_to_root(self, cid: str) -> Optional[Substitution]:
        """Root variables expressed as polynomials in the chart's variables."""
        chain = []
        cur = cid
        while self.charts[cur].parent is not None:
            pid, sub = self.charts[cur].parent
            chain.append(sub)
            cur = pid
        if not chain:
            return None
        total = chain[-1]  # maps root vars into its child
        for sub in reversed(chain[:-1]):
            total = total.compose(sub)
        # compose() above rewrote root vars through each deeper substitution
        return total

    def root_image(self, cid: str, gens: Sequence[Polynomial]) -> Ideal:
        """Closure of the image of V(gens) in the root chart, by elimination."""
        root_ctx = self.charts[self.root].context
        sub = self.substitution_to_root(cid)
        if sub is None:
            return Ideal(list(gens))
        chart_ctx = self.charts[cid].context
        names = tuple(f"r_{v}" for v in root_ctx.names) + chart_ctx.names
        big = VarContext(names)

        def lift(p: Polynomial, offset: int) -> Polynomial:
            return Polynomial(big, {(0,) * offset + e + (0,) * (big.n - offset - p.context.n): c
                                    for e, c in p.terms().items()})

        k = root_ctx.n
        rel = []
        for v in root_ctx.names:
            img = sub.assignment[v]  # poly in chart vars
            rel.append(Polynomial.var(big, f"r_{v}") - lift(img, k))
        for g in gens:
            rel.append(lift(g, k))
        elim = eliminate(Ideal(rel), [f"r_{v}" for v in root_ctx.names])
        out = []
        for g in elim.generators:
            out.append(Polynomial(root_ctx, {e[:k]: c for e, c in g.terms().items()}))
        return Ideal(out if out else [Polynomial.zero(root_ctx)])

    # -- the blow-up itself ----------------------------------------------------

    def new_slot(self) -> int:
        return len(self.steps) + 1

    def blow_up(self, entries: Sequence[Tuple[str, Center]], slot: int = None
                ) -> BlowupStep:
        """Blow up one or more disjoint centers simultaneously as one step."""
        if slot is None:
            slot = self.new_slot()
        step = BlowupStep(slot=slot)
        by_parent: Dict[str, List[Center]] = {}
        for cid, center in entries:
            by_parent.setdefault(cid, []).append(center)
        for cid, center in entries:
            others = [c for c in by_parent[cid] if c is not center]
            part = self._blow_one(cid, center, slot, others)
            part.root_image = self.root_image(cid, center.generators)
            step.parts.append(part)
        self.steps.append(step)
        return step

    def _blow_one(self, cid: str, center: Center, slot: int,
                  siblings: Sequence[Center]) -> SubBlowup:
        chart = self.charts[cid]
        if center.is_unit():
            clone = self._clone_chart(chart, rename=False)
            return SubBlowup(cid, center, [clone.id], empty=True)
        if center.is_principal():
            child = self._principal_child(chart, center, slot)
            return SubBlowup(cid, center, [child.id], empty=True)
        if center.aligned is None:
            raise AlignmentError(
                f"center {center.gens_text()} on chart {cid} is not coordinate-aligned")
        children = []
        for j in range(len(center.aligned)):
            children.append(self._aligned_child(chart, center, j, slot, siblings).id)
        return SubBlowup(cid, center, children, empty=False)

    def _clone_chart(self, chart: Chart, rename: bool) -> Chart:
        new_id = self.fresh_id()
        ident = Substitution({v: Polynomial.var(chart.context, v)
                              for v in chart.context.names})
        clone = Chart(id=new_id, context=chart.context, equation=chart.equation,
                      exceptional=list(chart.exceptional), parent=(chart.id, ident),
                      birth_step=len(self.steps) + 1,
                      inverted=list(chart.inverted),
                      extra_divisors=list(chart.extra_divisors),
                      name_index=chart.name_index)
        self.charts[new_id] = clone
        return clone

    def _rename_context(self, chart: Chart, tag_updates: Dict[str, int] = None
                        ) -> Tuple[VarContext, Dict[str, str]]:
        idx = chart.name_index + 1
        names = child_names(chart.context, idx)
        mapping = dict(zip(chart.context.names, names))
        tags = list(chart.context.tags)
        ctx2 = VarContext(names, tuple(tags))
        if tag_updates:
            ctx2 = ctx2.with_tags({mapping[v]: t for v, t in tag_updates.items()})
        return ctx2, mapping

    def _principal_child(self, chart: Chart, center: Center, slot: int) -> Chart:
        """Blow-up along a Cartier divisor: an isomorphism, but the divisor
        becomes exceptional.  The child is the parent with renamed variables."""
        g = center.generators[0]
        is_var = (center.aligned is not None and len(center.aligned) == 1
                  and center.aligned[0][1] == 0)
        ctx2, mapping = self._rename_context(
            chart, {center.aligned[0][0]: slot} if is_var else None)
        sub = Substitution({v: Polynomial.var(ctx2, mapping[v])
                            for v in chart.context.names})
        equation = sub.apply(chart.equation)
        exceptional = [(mapping[v], h) for v, h in chart.exceptional]
        extra = [Divisor(sub.apply(d.equation), d.history) for d in chart.extra_divisors]
        if is_var:
            exceptional.append((mapping[center.aligned[0][0]], slot))
        else:
            extra.append(Divisor(sub.apply(g), slot))
        child = Chart(id=self.fresh_id(), context=ctx2, equation=equation,
                      exceptional=exceptional, parent=(chart.id, sub),
                      birth_step=len(self.steps) + 1,
                      inverted=[sub.apply(h) for h in chart.inverted],
                      extra_divisors=extra, name_index=chart.name_index + 1)
        self.charts[child.id] = child
        return child

    def _aligned_child(self, chart: Chart, center: Center, j: int, slot: int,
                       siblings: Sequence[Center]) -> Chart:
        pairs = center.aligned
        wj, cj = pairs[j]
        # exceptional tags: direction variable gets the new history index;
        # other center variables keep their tag only at offset zero
        tag_updates = {wj: slot}
        ctx2, mapping = self._rename_context(chart, tag_updates)
        ej = Polynomial.var(ctx2, mapping[wj])
        assignment: Dict[str, Polynomial] = {}
        for v in chart.context.names:
            assignment[v] = Polynomial.var(ctx2, mapping[v])
        assignment[wj] = ej + Polynomial.const(ctx2, cj)
        for i, (wi, ci) in enumerate(pairs):
            if i == j:
                continue
            assignment[wi] = ej * Polynomial.var(ctx2, mapping[wi]) \
                + Polynomial.const(ctx2, ci)
        sub = Substitution(assignment)
        # old tags on off-direction center variables survive only if the
        # divisor still reads {w_i = 0} here, i.e. the offset is zero
        drop_tags = {}
        extra = [Divisor(sub.apply(d.equation), d.history) for d in chart.extra_divisors]
        for i, (wi, ci) in enumerate(pairs):
            if i != j and ci != 0 and chart.context.tag_of(wi) is not None:
                drop_tags[mapping[wi]] = None
        if drop_tags:
            ctx2 = ctx2.with_tags(drop_tags)
        total = sub.apply(chart.equation)
        k = total.max_var_power_dividing(mapping[wj])
        equation = total.div_monomial(_var_power(ctx2, mapping[wj], k))
        exceptional = []
        for v, h in chart.exceptional:
            if v == wj:
                continue  # its strict transform left this chart
            exceptional.append((mapping[v], h))
        exceptional.append((mapping[wj], slot))
        inverted = [sub.apply(h) for h in chart.inverted]
        inverted = [h for h in inverted if not h.is_unit_constant()]
        for other in siblings:
            v, c = other.aligned[0] if other.aligned else (None, None)
            if v is None:
                sep = other.generators[0]
            else:
                sep = Polynomial.var(chart.context, v) - Polynomial.const(chart.context, c)
            sep_img = sub.apply(sep)
            if not sep_img.is_unit_constant():
                inverted.append(sep_img)
        child = Chart(id=self.fresh_id(), context=ctx2, equation=equation,
                      exceptional=exceptional, parent=(chart.id, sub),
                      birth_step=len(self.steps) + 1, inverted=inverted,
                      extra_divisors=extra, name_index=chart.name_index + 1)
        self.charts[child.id] = child
        return child

    # -- serialization -----------------------------------------------------------

    def to_json_dict(self) -> dict:
        charts = []
        for cid in sorted(self.charts, key=_chart_sort_key):
            ch = self.charts[cid]
            entry = {
                "id": ch.id,
                "vars": list(ch.context.names),
                "equation": to_string(ch.equation),
                "exceptional": [{"var": v, "history": h} for v, h in ch.exceptional],
            }
            if ch.parent is not None:
                pid, sub = ch.parent
                entry["parent"] = {
                    "id": pid,
                    "subst": {v: to_string(p) for v, p in sorted(sub.assignment.items())},
                }
            else:
                entry["parent"] = None
            charts.append(entry)
        steps = []
        for step in self.steps:
            for part in step.parts:
                steps.append({
                    "parent": part.parent,
                    "center": {"gens": part.center.gens_text(),
                               "label": part.center.label},
                    "children": list(part.children),
                    "empty": part.empty,
                    "slot": step.slot,
                })
        return {"root": self.root, "charts": charts, "steps": steps}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def _chart_sort_key(cid: str):
    m = re.match(r"^c(\d+)$", cid)
    return (0, int(m.group(1))) if m else (1, cid)


def _var_power(context: VarContext, name: str, k: int) -> Tuple[int, ...]:
    e = [0] * context.n
    e[context.index(name)] = k
    return tuple(e)


# ---------------------------------------------------------------------------
# transforms


def total_transform(f: Polynomial, s: Substitution) -> Polynomial:
    """Plain pullback f ∘ s."""
    return s.apply(f)


def strict_transform(f: Polynomial, child: Chart) -> Polynomial:
    """Total transform divided by the maximal new-exceptional power (hypersurface)."""
    if child.parent is None:
        return f
    _, sub = child.parent
    total = sub.apply(f)
    if not child.exceptional:
        return total
    e_var, _ = child.exceptional[-1]
    k = total.max_var_power_dividing(e_var)
    if k == 0:
        return total
    return total.div_monomial(_var_power(child.context, e_var, k))


def strict_transform_ideal(I: Ideal, child: Chart) -> Ideal:
    """Saturation of the total transform by the new exceptional equation."""
    if child.parent is None:
        return I
    _, sub = child.parent
    total = Ideal([sub.apply(g) for g in I.generators])
    if not child.exceptional:
        return total
    e_var, _ = child.exceptional[-1]
    return saturate(total, Polynomial.var(child.context, e_var))


@dataclass
class MarkedIdeal:
    """(ideal, control d, ordered boundary divisors)."""

    ideal: Ideal
    control: int
    boundary: List[Divisor] = field(default_factory=list)

    def __post_init__(self):
        if self.control < 1:
            raise ValueError("control must be >= 1")


class PrincipalTransformError(ValueError):
    """A generator's full transform is not divisible by e^d: the order of the
    marked ideal dropped below d along the center (impermissible center)."""


def principal_transform(m: MarkedIdeal, child: Chart) -> MarkedIdeal:
    """Full transform of every generator divided by e^control; boundary
    updated with strict transforms of the old divisors plus the new one."""
    if child.parent is None:
        raise ValueError("child chart has no parent blow-up")
    _, sub = child.parent
    e_var, e_hist = child.exceptional[-1]
    e_mono = _var_power(child.context, e_var, m.control)
    gens = []
    for g in m.ideal.generators:
        total = sub.apply(g)
        if total.is_zero():
            continue
        try:
            gens.append(total.div_monomial(e_mono))
        except ValueError:
            raise PrincipalTransformError(
                f"full transform of {to_string(g)} not divisible by "
                f"{e_var}^{m.control}: order dropped below control along the center")
    if not gens:
        gens = [Polynomial.zero(child.context)]
    boundary = []
    for d in m.boundary:
        total = sub.apply(d.equation)
        k = total.max_var_power_dividing(e_var)
        strict = total.div_monomial(_var_power(child.context, e_var, k))
        if not strict.is_unit_constant():
            boundary.append(Divisor(strict, d.history))
    boundary.append(Divisor(Polynomial.var(child.context, e_var), e_hist))
    return MarkedIdeal(Ideal(gens), m.control, boundary)


def pushforward_center(center: Center, from_chart: Chart, ambient: Chart) -> Center:
    """Push a center on a principal localization D(h) forward to the ambient
    chart: the schematic closure, computed by saturating with the inverted h's."""
    if from_chart.context != ambient.context:
        raise ValueError("unsupported localization kind: contexts differ")
    extra = [h for h in from_chart.inverted if h not in ambient.inverted]
    I = center.ideal()
    for h in extra:
        I = saturate(I, h)
    gens = I.groebner()
    if not gens:
        gens = [Polynomial.zero(ambient.context)]
    aligned = _recognize_aligned(Ideal(gens))
    return Center(list(gens), aligned=aligned,
                  label=center.label or "pushforward")


def _recognize_aligned(I: Ideal) -> Optional[List[Tuple[str, Fraction]]]:
    """Detect generators of the exact shape {v_i - c_i}."""
    pairs = []
    seen = set()
    for g in I.groebner():
        terms = g.terms()
        linear = None
        const = Fraction(0)
        for e, c in terms.items():
            if sum(e) == 0:
                const = c
            elif sum(e) == 1 and c == 1:
                linear = e
            else:
                return None
        if linear is None:
            return None
        vi = linear.index(1)
        name = I.context.names[vi]
        if name in seen:
            return None
        seen.add(name)
        pairs.append((name, -const))
    return pairs or None


# ---------------------------------------------------------------------------
# synchronized merging and localization restriction


@dataclass
class SynchronizedTrace:
    """Several trees over disjoint charts, padded to a common slot count."""

    components: List[ResolutionTree]
    slots: int

    def to_json_dict(self) -> dict:
        return {"slots": self.slots,
                "components": [t.to_json_dict() for t in self.components]}


def pad_with_empty(tree: ResolutionTree, upto: int):
    """Append empty synchronization steps until the tree has `upto` slots."""
    while len(tree.steps) < upto:
        leaf = tree.leaves()[0]
        unit = Center([Polynomial.const(tree.charts[leaf].context, 1)],
                      label="sync-padding")
        tree.blow_up([(leaf, unit)])


def merge_synchronized(trees: Sequence[ResolutionTree]) -> SynchronizedTrace:
    """Merge trees over disjoint charts into one synchronized trace.

    Shorter sequences are padded with empty steps at the end; slot k of the
    merge blows up the union of the slot-k centers.
    """
    roots = set()
    for t in trees:
        names = t.charts[t.root].context.names
        key = (names, t.charts[t.root].id)
        if key in roots:
            raise ValueError("merge requires disjoint root charts")
        roots.add(key)
    top = max((len(t.steps) for t in trees), default=0)
    for t in trees:
        pad_with_empty(t, top)
    return SynchronizedTrace(list(trees), top)


def restrict_sequence(tree: ResolutionTree, h_text: str) -> ResolutionTree:
    """Restrict a resolution tree to the principal open D(h) of its root.

    Every center is pulled back; steps whose restricted center no longer
    meets D(h) (or is empty/principal) are omitted, and the surviving steps
    are replayed on the localized root.
    """
    root = tree.charts[tree.root]
    h = parse(h_text, root.context)
    new_root = Chart(id="c0", context=root.context, equation=root.equation,
                     exceptional=list(root.exceptional), parent=None,
                     inverted=list(root.inverted) + [h],
                     extra_divisors=list(root.extra_divisors),
                     name_index=root.name_index)
    out = ResolutionTree(new_root)
    chart_map: Dict[str, str] = {tree.root: new_root.id}

    for step in tree.steps:
        decisions: List[Tuple[SubBlowup, bool]] = []
        for part in step.parts:
            if part.empty:
                decisions.append((part, False))
                continue
            image = part.root_image if part.root_image is not None \
                else tree.root_image(part.parent, part.center.generators)
            restricted = saturate(image, h)
            decisions.append((part, not restricted.is_unit()))
        entries = []
        kept_parts = []
        for part, keep in decisions:
            target = chart_map.get(part.parent)
            if target is None:
                continue
            if not keep:
                for ch in part.children:
                    chart_map[ch] = target
                continue
            entries.append((target, _transfer_center(tree, part, out, target)))
            kept_parts.append(part)
        if not entries:
            continue
        sub_step = out.blow_up(entries)
        for part, new_part in zip(kept_parts, sub_step.parts):
            for old_c, new_c in zip(part.children, new_part.children):
                chart_map[old_c] = new_c
    return out


def _transfer_center(src: ResolutionTree, part: SubBlowup,
                     dst: ResolutionTree, target_id: str) -> Center:
    """Re-express a center on the chart it collapsed onto after omissions."""
    old_chart = src.charts[part.parent]
    new_chart = dst.charts[target_id]
    if old_chart.context.names == new_chart.context.names:
        gens = [g.rename(new_chart.context) for g in part.center.generators]
        aligned = part.center.aligned
        return Center(gens, aligned=[(v, c) for v, c in aligned] if aligned else None,
                      label=part.center.label)
    # the creating steps were omitted: push the center down to the target via
    # its root image (omission only happens over loci where the omitted
    # blow-ups were isomorphisms, so the image is faithful there)
    image = part.root_image if part.root_image is not None else \
        src.root_image(part.parent, part.center.generators)
    sub = dst.substitution_to_root(target_id)
    if sub is None:
        gens = [g.rename(new_chart.context) for g in image.generators]
    else:
        gens = [sub.apply(g) for g in image.generators]
    I = Ideal(gens)
    for v, _h in new_chart.exceptional:
        I = saturate(I, Polynomial.var(new_chart.context, v))
    gens = list(I.groebner()) or [Polynomial.zero(new_chart.context)]
    aligned = _recognize_aligned(Ideal(gens))
    if aligned is None and len(gens) > 1:
        raise AlignmentError(
            f"restricted center {[to_string(g) for g in gens]} is not aligned")
    return Center(gens, aligned=aligned, label=part.center.label)
