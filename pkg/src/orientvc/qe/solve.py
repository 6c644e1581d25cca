"""Solution sets of one-variable quantifier-free formulas as exact regions."""
from __future__ import annotations

from typing import Mapping

from gmpy2 import mpq

from ..circle import (Arc, CircleElement, Component, element, in_support, real_roots,
                      sample_in_arc, sort_values)
from ..formula import (Eq, Formula, InV, Orient, free_vars, is_quantifier_free,
                       iter_atoms)
from ..models import Model, PairDescriptor, QuantifiedFormulaError, eval as eval_qf
from ..models import term_value
from ..vclab.region import CellSet, Region, coset_key

_FRESH_DENOMS = (1009, 1013, 1019, 1021, 1031, 1033, 1039, 1049, 1051, 1061)


def _forms(f: Formula, x: str):
    """(linear form, from_v) for every atom term difference mentioning x."""
    for a in iter_atoms(f):
        if isinstance(a, Eq):
            ts = [(a.left - a.right, False)]
        elif isinstance(a, Orient):
            ts = [(a.second - a.first, False), (a.third - a.first, False),
                  (a.third - a.second, False)]
        elif isinstance(a, InV):
            ts = [(a.term, True)]
        else:  # pragma: no cover
            continue
        for t, fv in ts:
            if t.coeff(x):
                yield t, fv


def _fresh_shift(pd: PairDescriptor, taken) -> CircleElement:
    comp = pd.outside_component()
    for d in _FRESH_DENOMS:
        t = mpq(1, d)
        fresh = element(t if comp is Component.Q else 0,
                        t if comp is Component.R2 else 0,
                        t if comp is Component.R3 else 0)
        if coset_key(fresh, pd) not in taken:
            return fresh
    raise AssertionError("no fresh coset found")  # pragma: no cover


def critical_points(f: Formula, x: str, sigma: Mapping[str, CircleElement],
                    model: Model) -> tuple[list[CircleElement], dict]:
    """Sorted cut points for x, and the special cosets (key -> representative)
    named by V atoms."""
    cuts: set = set()
    cosets: dict = {}
    pair = isinstance(model, PairDescriptor)
    amb = model.ambient.support
    for t, from_v in _forms(f, x):
        m = t.coeff(x)
        if m.denominator != 1:
            raise ValueError("solve_unary takes integer coefficients on the variable")
        m = int(m)
        r = term_value(t.without(x), sigma, model)
        if m < 0:
            m, r = -m, -r
        roots = real_roots(-r, m)
        cuts.update(roots)
        if pair and from_v:
            for p in roots:
                k = coset_key(p, model)
                if k not in cosets:
                    cosets[k] = p if in_support(p, amb) else k
    return sort_values(cuts), cosets


def solve_unary(f: Formula, x: str, pd: Model,
                sigma: Mapping[str, CircleElement] | None = None) -> Region:
    """The set {x in the model : f(x, sigma)} as a Region.

    The truth of f is constant on each open gap between cut points and, in a
    pair, on each coset class (a special coset or any other one), so one
    evaluation per cut and one per gap and class determine the set.
    """
    sigma = dict(sigma or {})
    if not is_quantifier_free(f):
        raise QuantifiedFormulaError("solve_unary takes quantifier-free formulas")
    missing = free_vars(f) - set(sigma) - {x}
    if missing:
        raise KeyError(f"no value for {sorted(missing)}")
    cuts, cosets = critical_points(f, x, sigma, pd)
    amb = pd.ambient.support

    def holds(v: CircleElement) -> bool:
        return eval_qf(f, {**sigma, x: v}, pd)

    if not cuts:
        # x does not occur: the answer is everything or nothing
        return Region(pd, CellSet(whole=holds(element())))
    arcs = [Arc(p, cuts[(i + 1) % len(cuts)]) for i, p in enumerate(cuts)]
    if len(cuts) == 1:
        # (p, p) denotes the whole circle minus p; split it in two halves
        cuts = sort_values([cuts[0], cuts[0] + _half(amb)])
        arcs = [Arc(cuts[0], cuts[1]), Arc(cuts[1], cuts[0])]

    def cellset(sample_gap, relevant) -> CellSet:
        pts = tuple(holds(p) if relevant(p) else False for p in cuts)
        gaps = tuple(holds(sample_gap(a)) for a in arcs)
        return CellSet(tuple(cuts), pts, gaps)

    if not isinstance(pd, PairDescriptor):
        cs = cellset(lambda a: sample_in_arc(a, amb), lambda p: in_support(p, amb))
        return Region(pd, cs)

    sub = pd.sub.support
    fresh = _fresh_shift(pd, cosets)
    generic = cellset(lambda a: sample_in_arc(a, sub, fresh),
                      lambda p: in_support(p, amb) and coset_key(p, pd) not in cosets)
    special = {}
    for k, rep in cosets.items():
        special[k] = cellset(lambda a, rep=rep: sample_in_arc(a, sub, rep),
                             lambda p, k=k: in_support(p, amb) and coset_key(p, pd) == k)
    return Region(pd, generic, special, cosets)


def cell_samples(f: Formula, x: str, sigma: Mapping[str, CircleElement],
                 pd: Model) -> list[CircleElement]:
    """Values of x realizing every truth pattern the atoms of f can take:
    the cut points in the model plus one sample per gap and coset class."""
    cuts, cosets = critical_points(f, x, sigma, pd)
    amb = pd.ambient.support
    if not cuts:
        return [element()]
    if len(cuts) == 1:
        cuts = sort_values([cuts[0], cuts[0] + _half(amb)])
    out = [p for p in cuts if in_support(p, amb)]
    arcs = [Arc(p, cuts[(i + 1) % len(cuts)]) for i, p in enumerate(cuts)]
    if not isinstance(pd, PairDescriptor):
        out.extend(sample_in_arc(a, amb) for a in arcs)
        return out
    sub = pd.sub.support
    shifts = list(cosets.values()) + [_fresh_shift(pd, cosets)]
    out.extend(sample_in_arc(a, sub, sh) for a in arcs for sh in shifts)
    return out


def _half(support: frozenset) -> CircleElement:
    comp = min(support)
    t = mpq(1, 2)
    return element(t if comp is Component.Q else 0,
                   t if comp is Component.R2 else 0,
                   t if comp is Component.R3 else 0)
