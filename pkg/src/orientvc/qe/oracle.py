"""Semantic decision of quantified formulas by exact witness search.

This is deliberately independent of the syntactic engine: it never rewrites
formulas, it only picks finitely many candidate values for each quantified
variable and evaluates.

For E x. body under an assignment, collect the linear forms of the body (term
differences of its atoms, each inner bound variable alone, x alone), eliminate
inner bound variables pairwise by cross-multiplication, and solve the remaining
forms for x.  Between consecutive solutions the truth of the body is constant,
so one sample per open cell plus the solutions themselves suffice.  In pairs
a cell is sampled once per special coset of G and once in a fresh coset.

Torsion-free groups need one more step.  There, inner division such as
2 z = x is the lift-level halving, which jumps around the circle as x moves.
Writing x = N x' with N the lcm of inner coefficients makes every inner
solution an integer multiple of x', so the cell argument applies to x'.
"""
from __future__ import annotations

import random
from math import lcm
from typing import Iterable, Iterator, Mapping, Optional

from gmpy2 import mpq

from ..circle import (Arc, CircleElement, Component, circ_add, circ_neg,
                      circ_scale, element, in_support, real_roots, sample_in_arc,
                      sort_values)
from ..formula import (And, Eq, Exists, Forall, Formula, InV, Not, Or, Orient,
                       Term, Truth, atom_terms, is_atom)
from ..models import GroupDescriptor, Model, PairDescriptor, eval_atom, term_value

_ALL_LINES = frozenset(Component)
_FRESH_DENOMS = (1009, 1013, 1019, 1021, 1031, 1033, 1039, 1049)


def _forms_of(f: Formula, out: list, bound: list) -> None:
    """Append (term, from_v) pairs for the atoms of f."""
    if isinstance(f, Eq):
        out.append((f.left - f.right, False))
    elif isinstance(f, Orient):
        out.extend(((f.second - f.first, False), (f.third - f.first, False),
                    (f.third - f.second, False)))
    elif isinstance(f, InV):
        out.append((f.term, True))
    elif isinstance(f, Not):
        _forms_of(f.body, out, bound)
    elif isinstance(f, (And, Or)):
        for g in f.args:
            _forms_of(g, out, bound)
    elif isinstance(f, (Exists, Forall)):
        bound.append(f.var)
        out.append((Term.var(f.var), False))
        _forms_of(f.body, out, bound)


def _sign_key(t: Term) -> Term:
    lead = t.coeffs[0][1] if t.coeffs else 1
    return -t if lead < 0 else t


def _integral(t: Term) -> bool:
    return all(q.denominator == 1 for _, q in t.coeffs)


class Oracle:
    """Exact decision in one model by finite witness search.

    extra: number of additional random candidates per quantifier, used to
    check that a verdict is stable when the search is enlarged.
    """

    def __init__(self, model: Model, extra: int = 0, seed: int = 0):
        self.model = model
        self.pair = isinstance(model, PairDescriptor)
        self.support = model.ambient.support
        self.sub_support = model.sub.support if self.pair else None
        self.extra = extra
        self.rng = random.Random(seed)
        self.calls = 0
        self._forms: dict = {}

    # -- public -------------------------------------------------------------
    def decide(self, f: Formula, sigma: Mapping[str, CircleElement]) -> bool:
        self.calls += 1
        if isinstance(f, Truth):
            return f.value
        if is_atom(f):
            return eval_atom(f, sigma, self.model)
        if isinstance(f, Not):
            return not self.decide(f.body, sigma)
        if isinstance(f, And):
            return all(self.decide(g, sigma) for g in f.args)
        if isinstance(f, Or):
            return any(self.decide(g, sigma) for g in f.args)
        if isinstance(f, Exists):
            return any(self.decide(f.body, {**sigma, f.var: v})
                       for v in self.candidates(f.body, f.var, sigma))
        if isinstance(f, Forall):
            return all(self.decide(f.body, {**sigma, f.var: v})
                       for v in self.candidates(f.body, f.var, sigma))
        raise TypeError(f"unknown formula node {f!r}")

    def witness(self, f: Exists, sigma: Mapping[str, CircleElement]) -> Optional[CircleElement]:
        """A value of the bound variable making the body true, if any."""
        for v in self.candidates(f.body, f.var, sigma):
            if self.decide(f.body, {**sigma, f.var: v}):
                return v
        return None

    # -- candidates ---------------------------------------------------------
    def candidates(self, body: Formula, x: str,
                   sigma: Mapping[str, CircleElement]) -> Iterator[CircleElement]:
        """Finitely many values of x that realize every truth value of body
        over the group; produced lazily so that searches can stop early."""
        key = (body, x)
        hit = self._forms.get(key)
        if hit is None:
            hit = self._forms[key] = self._critical_forms(body, x)
        forms, scale = hit

        roots: dict[CircleElement, bool] = {}
        model = self.model
        for m, rest, names, from_v in forms:
            if not names <= sigma.keys():
                continue
            # every real root of m x + rest bounds a cell, group member or not
            for v in real_roots(term_value(rest, sigma, model), m):
                roots[v] = roots.get(v, False) or from_v
        points = sort_values(roots)
        if len(points) < 2:
            points = sort_values(set(points) | {circ_add(points[0], self._half())})

        seen: set = set()

        def emit(v: CircleElement):
            if scale != 1:
                v = circ_scale(scale, v)
            if v in seen:
                return None
            seen.add(v)
            return v

        for p in points:
            if in_support(p, self.support):
                v = emit(p)
                if v is not None:
                    yield v
        shifts = [None]
        if self.pair:
            special = [p for p in points if roots.get(p)]
            if special or any(f[3] for f in forms):
                shifts = self._coset_shifts(special)
        for i, lo in enumerate(points):
            arc = Arc(lo, points[(i + 1) % len(points)])
            for sh in shifts:
                if sh is None:
                    v = emit(sample_in_arc(arc, self.support))
                else:
                    v = emit(sample_in_arc(arc, self.sub_support, sh))
                if v is not None:
                    yield v
        for _ in range(self.extra):
            v = emit(self._random_element())
            if v is not None:
                yield v

    def _critical_forms(self, body: Formula, x: str) -> tuple[list, int]:
        """(form, from_v) pairs in x and free variables whose roots bound the
        cells; from_v marks forms whose roots also name special cosets."""
        forms: list = [(Term.var(x), False)]
        inner: list[str] = []
        _forms_of(body, forms, inner)
        for t, _ in forms:
            if not _integral(t):
                raise ValueError("the oracle takes integer-coefficient formulas only")
        inner = [z for z in dict.fromkeys(inner) if z != x]

        scale = 1
        if not self.model.has_torsion:
            for z in inner:
                scale *= lcm(*[abs(int(t.coeff(z))) for t, _ in forms if t.coeff(z)] or [1])
        if scale != 1:
            forms = [(t.substitute(x, Term(((x, scale),))), fv) for t, fv in forms]

        for z in inner:
            keep = [tf for tf in forms if not tf[0].coeff(z)]
            have = [tf for tf in forms if tf[0].coeff(z)]
            for i, (f1, v1) in enumerate(have):
                a1 = f1.coeff(z)
                for f2, v2 in have[i + 1:]:
                    a2 = f2.coeff(z)
                    keep.append((f1.scale(a2) - f2.scale(a1), v1 or v2))
            forms = keep
        merged: dict[Term, bool] = {}
        for t, fv in forms:
            if t.coeff(x):
                k = _sign_key(t)
                merged[k] = merged.get(k, False) or fv
        # m x + rest = 0 is solved as m x = -rest with m > 0
        out = []
        for t, fv in merged.items():
            m = int(t.coeff(x))
            rest = -t.without(x) if m > 0 else t.without(x)
            out.append((abs(m), rest, frozenset(rest.variables()), fv))
        return out, scale

    def _half(self) -> CircleElement:
        comp = min(self.support)
        t = mpq(1, 2)
        return element(t if comp is Component.Q else 0,
                       t if comp is Component.R2 else 0,
                       t if comp is Component.R3 else 0)

    def _coset_shifts(self, points: Iterable[CircleElement]) -> list[CircleElement]:
        reps: list[CircleElement] = []
        for p in points:
            if not in_support(p, self.support):
                continue
            if not any(in_support(p - q, self.sub_support) for q in reps):
                reps.append(p)
        comp = self.model.outside_component()
        for d in _FRESH_DENOMS:
            t = mpq(1, d)
            fresh = element(t if comp is Component.Q else 0,
                            t if comp is Component.R2 else 0,
                            t if comp is Component.R3 else 0)
            if not any(in_support(fresh - q, self.sub_support) for q in reps):
                return reps + [fresh]
        raise AssertionError("no fresh coset found")

    def _random_element(self) -> CircleElement:
        def coord(present: bool):
            if not present:
                return 0
            d = self.rng.choice((7, 11, 13, 60, 97, 210))
            return mpq(self.rng.randrange(-5 * d, 5 * d + 1), d)
        a = coord(Component.Q in self.support)
        b = coord(Component.R2 in self.support)
        c = coord(Component.R3 in self.support)
        return element(a, b, c)
