"""Concrete divisible oriented groups and dense pairs inside C.

A group is described by which generator lines (Q, r2Q, r3Q) its elements may
use; a pair adds a distinguished subgroup with strictly smaller support.  The
module computes the elementary invariants, classifies descriptors into the
five complete theories, evaluates quantifier-free formulas exactly, and
provides the mod-1 and universal-cover constructions.

Term semantics.  A term sum(q_i v_i) + K denotes the image mod 1 of the real
sum(q_i L(v_i)) + K, where L lifts group elements to the reals.  In groups
with torsion (Q in the support) L(v) is the representative in [0, 1).  In
torsion-free groups L drops the rational part, which makes L an injective
homomorphism into r2Q + r3Q, so rational coefficients denote the unique
division.  The constant K is the literal as written; it may denote a point of
C outside the group (the elimination engine uses such points as cell
boundaries).  With integer coefficients and constants from the group both
readings agree with the group operations.
"""
from __future__ import annotations

import functools
import math
import random
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from gmpy2 import mpq

from . import circle
from .circle import (ZERO, CircleElement, Component, RealCombo, circ_add,
                     circ_scale, element, in_support, nth_parts, orient,
                     torsion_elements, value_lt)
from .formula import (And, Eq, Exists, Forall, Formula, InV, Not, Or, Orient,
                      Term, TheoryId, Truth)

INFINITY = math.inf
DEFAULT_PRIMES = (2, 3, 5, 7, 11)

_COMPONENT_TEXT = {Component.Q: "Q", Component.R2: "r2Q", Component.R3: "r3Q"}


class InvalidPairError(ValueError):
    pass


class QuantifiedFormulaError(ValueError):
    """eval is quantifier-free only; eliminate quantifiers first."""


def _parse_support(text: str) -> frozenset:
    parts = [p.strip() for p in text.replace(" ", "").split("+") if p.strip()]
    if not parts:
        raise ValueError(f"empty group descriptor {text!r}")
    out = set()
    for p in parts:
        try:
            out.add(Component(p))
        except ValueError:
            raise ValueError(f"unknown generator line {p!r} (use Q, r2Q, r3Q)") from None
    return frozenset(out)


@dataclass(frozen=True)
class GroupDescriptor:
    support: frozenset

    def __post_init__(self):
        sup = circle.support_of(self.support)
        if not sup:
            raise ValueError("a group descriptor needs a nonempty support")
        object.__setattr__(self, "support", sup)

    @classmethod
    def parse(cls, text: str) -> GroupDescriptor:
        return cls(_parse_support(text))

    @functools.cached_property
    def has_torsion(self) -> bool:
        return Component.Q in self.support

    # a group is its own ambient structure; pairs override these
    @property
    def ambient(self) -> GroupDescriptor:
        return self

    @property
    def sub(self) -> None:
        return None

    def contains(self, v: CircleElement) -> bool:
        return in_support(v, self.support)

    def __str__(self) -> str:
        return "+".join(_COMPONENT_TEXT[c] for c in sorted(self.support))


@dataclass(frozen=True)
class PairDescriptor:
    ambient: GroupDescriptor
    sub: GroupDescriptor

    def __post_init__(self):
        if not self.sub.support < self.ambient.support:
            raise InvalidPairError(
                f"sub support {self.sub} must be a proper subset of ambient {self.ambient}")

    @classmethod
    def parse(cls, text: str) -> PairDescriptor:
        body = text.strip()
        if body.startswith("(") and body.endswith(")"):
            body = body[1:-1]
        fields = {}
        for chunk in body.split(","):
            if "=" not in chunk:
                raise ValueError(f"bad pair descriptor {text!r}; expected (A=..., G=...)")
            key, val = chunk.split("=", 1)
            fields[key.strip().upper()] = val
        if set(fields) != {"A", "G"}:
            raise ValueError(f"bad pair descriptor {text!r}; expected (A=..., G=...)")
        return cls(GroupDescriptor.parse(fields["A"]), GroupDescriptor.parse(fields["G"]))

    @functools.cached_property
    def has_torsion(self) -> bool:
        return self.ambient.has_torsion

    @property
    def support(self) -> frozenset:
        return self.ambient.support

    def contains(self, v: CircleElement) -> bool:
        return self.ambient.contains(v)

    def outside_component(self) -> Component:
        """First generator line of the ambient group missing from the sub."""
        return min(self.ambient.support - self.sub.support)

    def __str__(self) -> str:
        return f"(A={self.ambient}, G={self.sub})"


Model = Union[GroupDescriptor, PairDescriptor]


def parse_model(text: str) -> Model:
    s = text.strip()
    if "=" in s:
        return PairDescriptor.parse(s)
    return GroupDescriptor.parse(s)


def member(v: CircleElement, g: GroupDescriptor) -> bool:
    return in_support(v, g.support)


# -- invariants --------------------------------------------------------------

def invariant_e(g: GroupDescriptor, p: int, cap: int = 5) -> float:
    """e(g, p): infinite iff the chain |Tor_{p^k}| keeps growing up to cap."""
    if cap < 2:
        raise ValueError("cap must be at least 2")
    sizes = [len(torsion_elements(p ** k, g.support)) for k in range(1, cap + 1)]
    growing = all(b > a for a, b in zip([1] + sizes, sizes))
    return INFINITY if growing else 0


def invariant_p_index(g: GroupDescriptor, p: int, samples: int = 8,
                      seed: int = 0) -> int:
    """[p]g = |g / p g|, certified to be 1 by solving p x = v for samples v."""
    rng = random.Random(seed)
    for _ in range(samples):
        v = random_element(g, rng)
        parts = nth_parts(v, p, g.support)
        if not parts or any(circ_scale(p, x) != v or not member(x, g) for x in parts):
            raise AssertionError(f"divisibility certificate failed for {v} in {g}")
    return 1


@dataclass(frozen=True)
class Invariants:
    e: Mapping[int, float]
    p_index: Mapping[int, int]
    is_torsion_free: bool
    has_full_prufer_torsion: bool

    def key(self) -> tuple:
        return (tuple(sorted(self.e.items())), tuple(sorted(self.p_index.items())))


@functools.lru_cache(maxsize=64)
def invariants(g: GroupDescriptor, primes=DEFAULT_PRIMES, cap: int = 5) -> Invariants:
    e = {p: invariant_e(g, p, cap) for p in primes}
    idx = {p: invariant_p_index(g, p) for p in primes}
    return Invariants(e, idx,
                      is_torsion_free=all(v == 0 for v in e.values()),
                      has_full_prufer_torsion=all(v == INFINITY for v in e.values()))


def elementarily_equivalent(g1: GroupDescriptor, g2: GroupDescriptor,
                            primes=DEFAULT_PRIMES) -> bool:
    return invariants(g1, primes).key() == invariants(g2, primes).key()


def theory_of(g: GroupDescriptor) -> TheoryId:
    return TheoryId.DOG_TOR if invariants(g).has_full_prufer_torsion else TheoryId.DOG_TF


def theory_of_pair(pd: PairDescriptor) -> TheoryId:
    amb = theory_of(pd.ambient) is TheoryId.DOG_TOR
    sub = theory_of(pd.sub) is TheoryId.DOG_TOR
    if amb and sub:
        return TheoryId.PAIR_TOR_TOR
    if amb:
        return TheoryId.PAIR_TOR_TF
    if not sub:
        return TheoryId.PAIR_TF_TF
    raise InvalidPairError("a torsion-free group has no subgroup with torsion")


def theory_of_model(m: Model) -> TheoryId:
    return theory_of_pair(m) if isinstance(m, PairDescriptor) else theory_of(m)


_CANONICAL = {
    TheoryId.DOG_TOR: "Q",
    TheoryId.DOG_TF: "r2Q",
    TheoryId.PAIR_TOR_TOR: "(A=Q+r2Q, G=Q)",
    TheoryId.PAIR_TOR_TF: "(A=Q+r2Q, G=r2Q)",
    TheoryId.PAIR_TF_TF: "(A=r2Q+r3Q, G=r2Q)",
}


def canonical_model(theory: TheoryId) -> Model:
    return parse_model(_CANONICAL[theory])


def mod1_construct(ordered_support) -> GroupDescriptor:
    """Image mod 1 of the ordered group Z + sum of the given lines."""
    sup = circle.support_of(ordered_support)
    if not sup:
        raise ValueError("Z alone has trivial image mod 1")
    return GroupDescriptor(sup)


# -- sampling ----------------------------------------------------------------

_SMALL_DENOMS = (1, 2, 3, 4, 5, 6, 8, 12)


def random_element(g: GroupDescriptor, rng: random.Random,
                   denoms=_SMALL_DENOMS) -> CircleElement:
    """Random element of the group with small-denominator coordinates."""
    def coord() -> mpq:
        d = rng.choice(denoms)
        return mpq(rng.randrange(-3 * d, 3 * d + 1), d)

    a = coord() if Component.Q in g.support else ZERO
    b = coord() if Component.R2 in g.support else ZERO
    c = coord() if Component.R3 in g.support else ZERO
    return element(a, b, c)


def inequivalent_elements(pd: PairDescriptor, count: int = 20) -> list[CircleElement]:
    """count ambient elements, pairwise distinct modulo the sub."""
    comp = pd.outside_component()
    out = []
    for j in range(1, count + 1):
        t = mpq(j, 1000)
        out.append(element(*(t if c is comp else ZERO for c in circle._GEN_PREFERENCE)))
    return out


# -- evaluation --------------------------------------------------------------

def _lift(v: CircleElement, torsion: bool) -> tuple:
    if torsion:
        return v.a, v.b, v.c
    return ZERO, v.b, v.c


def term_value(t: Term, sigma: Mapping[str, CircleElement], model: Model) -> CircleElement:
    """Exact value of t under sigma in the model (see module docstring)."""
    torsion = model.has_torsion
    k = t.const
    a, b, c = k.a, k.b, k.c
    for name, q in t.coeffs:
        try:
            v = sigma[name]
        except KeyError:
            raise KeyError(f"assignment has no value for variable {name!r}") from None
        if torsion:
            a += q * v.a
        b += q * v.b
        c += q * v.c
    return CircleElement.normalize(a, b, c)


def eval_atom(a: Formula, sigma: Mapping[str, CircleElement], model: Model) -> bool:
    if isinstance(a, Eq):
        return term_value(a.left, sigma, model) == term_value(a.right, sigma, model)
    if isinstance(a, Orient):
        return orient(term_value(a.first, sigma, model),
                      term_value(a.second, sigma, model),
                      term_value(a.third, sigma, model))
    if isinstance(a, InV):
        if not isinstance(model, PairDescriptor):
            raise ValueError("V atoms need a pair model")
        return member(term_value(a.term, sigma, model), model.sub)
    raise TypeError(f"not an atom: {a!r}")


def eval(f: Formula, sigma: Mapping[str, CircleElement], model: Model) -> bool:  # noqa: A001
    """Truth of a quantifier-free formula under sigma."""
    if isinstance(f, Truth):
        return f.value
    if isinstance(f, Not):
        return not eval(f.body, sigma, model)
    if isinstance(f, And):
        return all(eval(g, sigma, model) for g in f.args)
    if isinstance(f, Or):
        return any(eval(g, sigma, model) for g in f.args)
    if isinstance(f, (Exists, Forall)):
        raise QuantifiedFormulaError("eval takes quantifier-free formulas; run qe.eliminate first")
    return eval_atom(f, sigma, model)


def constants_in_model(f: Formula, model: Model) -> bool:
    """Whether every circle literal of f denotes an element of the model."""
    from .formula import atom_terms, iter_atoms
    for a in iter_atoms(f):
        for t in atom_terms(a):
            if not t.const.is_zero():
                if not model.contains(CircleElement.from_combo(t.const)):
                    return False
    return True


# -- ordered cover Z x A -----------------------------------------------------

@dataclass(frozen=True, order=False)
class CoverElement:
    k: int
    x: CircleElement

    def __str__(self) -> str:
        return f"({self.k}, {self.x})"


def cover_add(u: CoverElement, v: CoverElement) -> CoverElement:
    s = circ_add(u.x, v.x)
    # the representative sum reached 1 exactly when it wrapped below an addend
    carry = 1 if value_lt(s, u.x) else 0
    return CoverElement(u.k + v.k + carry, s)


def cover_neg(u: CoverElement) -> CoverElement:
    if u.x.is_zero():
        return CoverElement(-u.k, u.x)
    return CoverElement(-u.k - 1, circle.circ_neg(u.x))


def cover_lt(u: CoverElement, v: CoverElement) -> bool:
    if u.k != v.k:
        return u.k < v.k
    return value_lt(u.x, v.x)


def regular_density_witness(a: CircleElement, b: CircleElement, p: int,
                            g: GroupDescriptor) -> CircleElement:
    """c in g with O(a, p c, b) and c <_0 2c <_0 ... <_0 p c."""
    if not orient(element(), a, b):
        raise ValueError("regular density needs O(0, a, b)")
    lo = a.value.scale(mpq(1, p))
    hi = b.value.scale(mpq(1, p))
    c = circle.find_lift_in_interval(lo, hi, g.support)
    assert orient(a, circ_scale(p, c), b)
    return c
