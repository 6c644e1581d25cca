"""Exact one-variable definable sets.

A set on the circle is stored as a cell decomposition: cut points sorted by
value, a flag per cut and a flag per open gap between consecutive cuts.  That
covers finite point sets, arcs, arcs minus points and all finite unions of
them, and boolean operations are pointwise on the merged cuts.

In a pair (A, G) a definable set also depends on the coset of G: it is
described by one cell set per special coset c + G and one "generic" cell set
used on every other coset.  Since A/G is infinite and every coset is dense,
both pieces are nonempty as soon as some gap is marked.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional

from ..circle import (CircleElement, Component, ZERO_ELEMENT, format_combo,
                      in_support, rat, sort_values, value_key)
from ..models import Model, PairDescriptor


class UnsupportedRegionError(ValueError):
    pass


# -- cell sets ---------------------------------------------------------------

@dataclass(frozen=True)
class CellSet:
    """A subset of the circle given by cuts, cut flags and gap flags.

    gaps[i] is the open arc from cuts[i] counterclockwise to cuts[i+1] (the
    last one wraps to cuts[0]).  With no cuts the set is everything or
    nothing according to ``whole``.
    """

    cuts: tuple = ()
    points: tuple = ()
    gaps: tuple = ()
    whole: bool = False

    def _index(self, x: CircleElement) -> tuple[int, bool]:
        """(i, on_cut): x is cuts[i], or lies in gaps[i]."""
        i = bisect_left(self.cuts, value_key(x), key=value_key)
        if i < len(self.cuts) and self.cuts[i] == x:
            return i, True
        return (i - 1) % len(self.cuts), False

    def contains(self, x: CircleElement) -> bool:
        if not self.cuts:
            return self.whole
        i, on_cut = self._index(x)
        return self.points[i] if on_cut else self.gaps[i]

    def after(self, x: CircleElement) -> bool:
        """Status of the points immediately counterclockwise of x."""
        if not self.cuts:
            return self.whole
        return self.gaps[self._index(x)[0]]

    def combine(self, other: CellSet, op: Callable[[bool, bool], bool]) -> CellSet:
        cuts = tuple(sort_values(set(self.cuts) | set(other.cuts)))
        if not cuts:
            return CellSet(whole=op(self.whole, other.whole))
        points = tuple(op(self.contains(p), other.contains(p)) for p in cuts)
        gaps = tuple(op(self.after(p), other.after(p)) for p in cuts)
        return CellSet(cuts, points, gaps)

    def complement(self) -> CellSet:
        return CellSet(self.cuts, tuple(not b for b in self.points),
                       tuple(not b for b in self.gaps), not self.whole)

    def normalized(self, relevant: Callable[[CircleElement], bool]) -> CellSet:
        """Canonical form over the points where ``relevant`` holds.

        A cut that is not a point of the universe inherits the flag of the gap
        before it; cuts whose flag agrees with both neighbouring gaps go.
        """
        if not self.cuts:
            return self
        m = len(self.cuts)
        pts = [self.points[i] if relevant(p) else self.gaps[i - 1]
               for i, p in enumerate(self.cuts)]
        keep = [i for i in range(m)
                if not (pts[i] == self.gaps[i - 1] == self.gaps[i])]
        if not keep:
            return CellSet(whole=self.gaps[0])
        cuts = tuple(self.cuts[i] for i in keep)
        points = tuple(pts[i] for i in keep)
        # gap after a kept cut runs to the next kept cut, flags between agree
        gaps = tuple(self.gaps[i] for i in keep)
        return CellSet(cuts, points, gaps)

    def is_empty(self) -> bool:
        """Exact for normalized cell sets on a dense universe."""
        if not self.cuts:
            return not self.whole
        return not (any(self.gaps) or any(self.points))


def _single(cuts: Iterable[CircleElement], flag_of_point, flag_of_gap) -> CellSet:
    cuts = tuple(sort_values(set(cuts)))
    return CellSet(cuts, tuple(flag_of_point(p) for p in cuts),
                   tuple(flag_of_gap(i) for i in range(len(cuts))))


# -- model helpers -----------------------------------------------------------

def _ambient_support(model: Model) -> frozenset:
    return model.ambient.support


def coset_key(x: CircleElement, pd: PairDescriptor) -> CircleElement:
    """Canonical representative of x + G: the components G lacks, with the
    rational part dropped when the ambient group has none."""
    amb, sub = pd.ambient.support, pd.sub.support
    a = x.a if (Component.Q in amb and Component.Q not in sub) else 0
    b = x.b if Component.R2 not in sub else 0
    c = x.c if Component.R3 not in sub else 0
    return CircleElement.normalize(rat(a), rat(b), rat(c))


# -- regions -----------------------------------------------------------------

class Region:
    """A definable subset of the model's universe (of A, for a pair)."""

    __slots__ = ("model", "generic", "special", "reps")

    def __init__(self, model: Model, generic: CellSet,
                 special: Optional[Mapping[CircleElement, CellSet]] = None,
                 reps: Optional[Mapping[CircleElement, CircleElement]] = None):
        self.model = model
        special = dict(special or {})
        reps = dict(reps or {})
        if special and not isinstance(model, PairDescriptor):
            raise UnsupportedRegionError("coset pieces need a pair model")
        amb = _ambient_support(model)
        keep = {}
        for k, cs in special.items():
            rel = self._rel_coset(k)
            cs = cs.normalized(rel)
            # a special coset that behaves like the generic part is dropped
            if cs != generic.normalized(rel):
                keep[k] = cs
        keys = set(keep)
        if isinstance(model, PairDescriptor):
            def rel_generic(p):
                return in_support(p, amb) and coset_key(p, model) not in keys
        else:
            def rel_generic(p):
                return in_support(p, amb)
        self.generic = generic.normalized(rel_generic)
        self.special = {k: keep[k] for k in sorted(keep, key=value_key)}
        self.reps = {k: reps.get(k, k) for k in self.special}

    def _rel_coset(self, k: CircleElement):
        amb = _ambient_support(self.model)
        model = self.model

        def rel(p):
            return in_support(p, amb) and coset_key(p, model) == k
        return rel

    # -- queries -----------------------------------------------------------
    def piece(self, key: Optional[CircleElement]) -> CellSet:
        if key is None:
            return self.generic
        return self.special.get(key, self.generic)

    def contains(self, x: CircleElement) -> bool:
        if not in_support(x, _ambient_support(self.model)):
            raise ValueError(f"{x} is not an element of the model")
        if self.special:
            cs = self.special.get(coset_key(x, self.model))
            if cs is not None:
                return cs.contains(x)
        return self.generic.contains(x)

    __contains__ = contains

    def is_empty(self) -> bool:
        return self.generic.is_empty() and all(cs.is_empty() for cs in self.special.values())

    def keys(self) -> list:
        return list(self.special)

    def __eq__(self, other) -> bool:
        return isinstance(other, Region) and region_equal(self, other)

    def __hash__(self):  # regions are compared semantically
        raise TypeError("Region is unhashable")

    def __repr__(self) -> str:
        return f"Region({format_region(self)})"

    def __str__(self) -> str:
        return format_region(self)


def _binary(r1: Region, r2: Region, op) -> Region:
    if r1.model != r2.model:
        raise UnsupportedRegionError("regions live in different models")
    keys = set(r1.special) | set(r2.special)
    special = {k: r1.piece(k).combine(r2.piece(k), op) for k in keys}
    reps = {**r2.reps, **r1.reps}
    return Region(r1.model, r1.generic.combine(r2.generic, op), special, reps)


def region_intersect(r1: Region, r2: Region) -> Region:
    return _binary(r1, r2, lambda a, b: a and b)


def region_union(r1: Region, r2: Region) -> Region:
    return _binary(r1, r2, lambda a, b: a or b)


def region_difference(r1: Region, r2: Region) -> Region:
    return _binary(r1, r2, lambda a, b: a and not b)


def region_complement(r: Region) -> Region:
    return Region(r.model, r.generic.complement(),
                  {k: cs.complement() for k, cs in r.special.items()}, r.reps)


def region_is_empty(r: Region) -> bool:
    return r.is_empty()


def region_equal(r1: Region, r2: Region) -> bool:
    return region_difference(r1, r2).is_empty() and region_difference(r2, r1).is_empty()


def region_subset(r1: Region, r2: Region) -> bool:
    return region_difference(r1, r2).is_empty()


def intersect_all(regions: Iterable[Region]) -> Region:
    regions = list(regions)
    if not regions:
        raise ValueError("empty intersection of no regions")
    out = regions[0]
    for r in regions[1:]:
        out = region_intersect(out, r)
    return out


# -- constructors ------------------------------------------------------------

def empty(model: Model) -> Region:
    return Region(model, CellSet())


def full(model: Model) -> Region:
    return Region(model, CellSet(whole=True))


def points(model: Model, elems: Iterable[CircleElement]) -> Region:
    elems = list(elems)
    return Region(model, _single(elems, lambda p: True, lambda i: False))


def arc(model: Model, lo: CircleElement, hi: CircleElement) -> Region:
    """The open arc (lo, hi); empty when lo == hi."""
    if lo == hi:
        return empty(model)
    cs = CellSet(tuple(sort_values([lo, hi])), (False, False),
                 (True, False) if value_key(lo) < value_key(hi) else (False, True))
    return Region(model, cs)


def anchored_arc(model: Model, a: CircleElement) -> Region:
    """(0, a), the solution set of O(0, x, a)."""
    return arc(model, ZERO_ELEMENT, a)


def coset(model: PairDescriptor, rep: CircleElement) -> Region:
    """rep + G."""
    if not isinstance(model, PairDescriptor):
        raise UnsupportedRegionError("cosets need a pair model")
    k = coset_key(rep, model)
    return Region(model, CellSet(), {k: CellSet(whole=True)}, {k: rep})


# -- printing ----------------------------------------------------------------

def _fmt(x: CircleElement) -> str:
    return format_combo(x.value)


def _pieces(cs: CellSet, relevant) -> list[str]:
    if not cs.cuts:
        return ["all"] if cs.whole else []
    m = len(cs.cuts)
    if all(cs.gaps):
        missing = [_fmt(cs.cuts[i]) for i in range(m)
                   if not cs.points[i] and relevant(cs.cuts[i])]
        return ["all ∖ {" + ", ".join(missing) + "}"] if missing else ["all"]
    arcs = []
    lonely = [_fmt(cs.cuts[i]) for i in range(m)
              if cs.points[i] and relevant(cs.cuts[i])
              and not (cs.gaps[i - 1] and cs.gaps[i])]
    # walk from a cut whose preceding gap is outside the set
    s = next(i for i in range(m) if not cs.gaps[i - 1])
    i = 0
    while i < m:
        j = (s + i) % m
        if not cs.gaps[j]:
            i += 1
            continue
        k, holes = i + 1, []
        while cs.gaps[(s + k - 1) % m] and cs.gaps[(s + k) % m]:
            if not cs.points[(s + k) % m] and relevant(cs.cuts[(s + k) % m]):
                holes.append(_fmt(cs.cuts[(s + k) % m]))
            k += 1
        text = f"arc({_fmt(cs.cuts[j])},{_fmt(cs.cuts[(s + k) % m])})"
        if holes:
            text += " ∖ {" + ", ".join(holes) + "}"
        arcs.append(text)
        i = k
    return (["{" + ", ".join(lonely) + "}"] if lonely else []) + arcs


def format_region(r: Region) -> str:
    amb = _ambient_support(r.model)
    keys = set(r.special)
    if isinstance(r.model, PairDescriptor):
        def rel_generic(p):
            return in_support(p, amb) and coset_key(p, r.model) not in keys
    else:
        def rel_generic(p):
            return in_support(p, amb)
    gen = _pieces(r.generic, rel_generic)
    parts: list[str] = []
    cosets = []
    generic_fits = True
    for k, cs in r.special.items():
        name = f"coset({_fmt(r.reps[k])}+G)"
        cosets.append(name)
        rel = r._rel_coset(k)
        if not r.generic.combine(cs, lambda a, b: a and not b).normalized(rel).is_empty():
            generic_fits = False
        inner = _pieces(cs, rel)
        if inner == ["all"]:
            parts.append(name)
        elif inner:
            body = inner[0] if len(inner) == 1 else "(" + " ∪ ".join(inner) + ")"
            parts.append(body + " ∩ " + name)
    if gen:
        text = " ∪ ".join(gen)
        if not generic_fits:
            minus = cosets[0] if len(cosets) == 1 else "(" + " ∪ ".join(cosets) + ")"
            text = ("(" + text + ")" if len(gen) > 1 else text) + " ∖ " + minus
        parts.insert(0, text)
    return " ∪ ".join(parts) if parts else "∅"
