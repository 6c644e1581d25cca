"""Random formulas and structured assignments for elimination soundness runs."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from gmpy2 import mpq

from ..circle import CircleElement, Component, RealCombo, circ_add, circ_neg, circ_scale, element
from ..formula import (And, Eq, Exists, Forall, Formula, InV, Not, Or, Orient,
                       Term, TheoryId, free_vars)
from ..models import Model, PairDescriptor, canonical_model

PARAMS = ("y1", "y2", "y3")
# small coefficients dominate; the largest allowed still appear
_MAGNITUDES = (1, 2, 3, 4)
_WEIGHTS = (0.45, 0.3, 0.15, 0.1)


@dataclass
class GeneratorConfig:
    max_params: int = 3
    coeff: int = 4              # |k| bound for one-quantifier formulas
    coeff_nested: int = 2       # |k| bound when there are two quantifiers
    # |k| bound on the inner variable in torsion-free theories, where the
    # witness search must rescale by the inner coefficients
    coeff_inner_tf: int = 1
    nested_rate: float = 0.25   # share of two-quantifier formulas
    max_atoms: int = 3
    max_atoms_nested: int = 2
    const_rate: float = 0.08


def _model_constant(model: Model, rng: random.Random) -> RealCombo:
    sup = model.ambient.support
    q = mpq(rng.choice((1, 1, 2, 3)), rng.choice((2, 3, 4, 5)))
    if Component.Q in sup:
        return RealCombo(q)
    if Component.R2 in sup:
        return RealCombo(0, q)
    return RealCombo(0, 0, q)


class FormulaGenerator:
    def __init__(self, theory: TheoryId, seed: int = 0,
                 config: Optional[GeneratorConfig] = None):
        self.theory = theory
        self.model = canonical_model(theory)
        self.rng = random.Random(seed)
        self.cfg = config or GeneratorConfig()
        self.inner_bound = (self.cfg.coeff_nested if theory.has_torsion
                            else self.cfg.coeff_inner_tf)

    def term(self, names: list[str], bound: int, must: Optional[str] = None) -> Term:
        rng = self.rng
        coeffs = {}
        for v in names:
            if rng.random() < 0.45 or v == must:
                b = self.inner_bound if v == "z" else bound
                mags = _MAGNITUDES[:b]
                k = rng.choices(mags, _WEIGHTS[:b])[0]
                coeffs[v] = k if rng.random() < 0.5 else -k
        t = Term(coeffs)
        if rng.random() < self.cfg.const_rate:
            t = t + Term.constant(_model_constant(self.model, rng))
        return t

    def atom(self, names: list[str], bound: int, must: Optional[str]) -> Formula:
        rng = self.rng
        kinds = ["eq", "o", "o"] + (["v", "v"] if self.theory.is_pair else [])
        kind = rng.choice(kinds)
        if kind == "eq":
            return Eq(self.term(names, bound, must), self.term(names, bound))
        if kind == "v":
            return InV(self.term(names, bound, must))
        slots = [self.term(names, bound) for _ in range(3)]
        slots[rng.randrange(3)] = self.term(names, bound, must)
        if rng.random() < 0.4:
            slots[0] = Term()
        return Orient(*slots)

    def body(self, names: list[str], bound: int, n_atoms: int, must: list[str]) -> Formula:
        atoms = [self.atom(names, bound, must[i % len(must)] if must else None)
                 for i in range(n_atoms)]
        rng = self.rng
        atoms = [Not(a) if rng.random() < 0.3 else a for a in atoms]
        while len(atoms) > 1:
            i = rng.randrange(len(atoms) - 1)
            node = And if rng.random() < 0.6 else Or
            merged = node((atoms[i], atoms[i + 1]))
            if rng.random() < 0.15:
                merged = Not(merged)
            atoms[i:i + 2] = [merged]
        return atoms[0]

    def formula(self) -> Formula:
        rng, cfg = self.rng, self.cfg
        nested = rng.random() < cfg.nested_rate
        if nested:
            params = list(PARAMS[:rng.randint(1, min(2, cfg.max_params))])
            bound = cfg.coeff_nested
            n_inner = rng.randint(1, cfg.max_atoms_nested)
            inner = self.body(params + ["x", "z"], bound, n_inner, ["z", "x"])
            q_inner = Exists if rng.random() < 0.6 else Forall
            f = q_inner("z", inner)
            # the total atom budget of nested formulas is max_atoms_nested
            if n_inner < cfg.max_atoms_nested and rng.random() < 0.5:
                extra = self.atom(params + ["x"], bound, "x")
                f = And((f, extra)) if rng.random() < 0.5 else Or((f, extra))
            q_outer = Exists if rng.random() < 0.6 else Forall
            return q_outer("x", f)
        params = list(PARAMS[:rng.randint(1, cfg.max_params)])
        bound = cfg.coeff
        body = self.body(params + ["x"], bound, rng.randint(1, cfg.max_atoms), ["x"])
        q = Exists if rng.random() < 0.65 else Forall
        return q("x", body)


class AssignmentGenerator:
    """Assignments with small denominators and deliberate coincidences, so
    that boundary cases (equal parameters, multiples, shared cosets) occur."""

    def __init__(self, model: Model, seed: int = 0):
        self.model = model
        self.rng = random.Random(seed)
        self.pair = isinstance(model, PairDescriptor)

    def _coord(self) -> mpq:
        rng = self.rng
        d = rng.choice((1, 2, 3, 4, 5, 6, 8, 12))
        return mpq(rng.randrange(-2 * d, 2 * d + 1), d)

    def _fresh(self, sup: frozenset) -> CircleElement:
        a = self._coord() if Component.Q in sup else 0
        b = self._coord() if Component.R2 in sup else 0
        c = self._coord() if Component.R3 in sup else 0
        return element(a, b, c)

    def element(self, pool: list[CircleElement]) -> CircleElement:
        rng = self.rng
        sup = self.model.ambient.support
        r = rng.random()
        if not pool or r < 0.35:
            return self._fresh(sup)
        base = rng.choice(pool)
        if r < 0.45:
            return base
        if r < 0.55:
            return circ_neg(base)
        if r < 0.7:
            return circ_scale(rng.choice((2, 3, -2, 4)), base)
        if r < 0.8 and len(pool) > 1:
            other = rng.choice(pool)
            return circ_add(base, other)
        if r < 0.92 and self.pair:
            return circ_add(base, self._fresh(self.model.sub.support))
        if Component.Q in sup:
            return circ_add(base, element(mpq(1, rng.choice((2, 3, 4)))))
        if r < 0.96:
            return element()
        return self._fresh(sup)

    def assignment(self, names) -> dict:
        pool: list[CircleElement] = []
        out = {}
        for v in sorted(names):
            e = self.element(pool)
            pool.append(e)
            out[v] = e
        return out
