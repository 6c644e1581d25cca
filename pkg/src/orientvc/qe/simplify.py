"""Boolean simplification and atom canonicalization for quantifier-free output."""
from __future__ import annotations

import functools

from ..circle import ZERO, CircleElement, RealCombo, in_support, orient
from ..formula import (FALSE, TRUE, And, Eq, Exists, Forall, Formula, InV, Not,
                       Or, Orient, Term, TheoryId, Truth, ZERO_TERM, is_atom,
                       normalize_atom)


@functools.lru_cache(maxsize=None)
def _canonical(theory: TheoryId):
    from ..models import canonical_model
    return canonical_model(theory)


def reduce_constant(t: Term, theory: TheoryId) -> Term:
    """Reduce the constant's rational part into [0, 1); only its class mod 1
    is visible to the term's value."""
    k = t.const
    a = k.a - (k.a.numerator // k.a.denominator)
    if a == k.a:
        return t
    return Term._make(t.coeffs, RealCombo._raw(a, k.b, k.c))


def off_group(t: Term, theory: TheoryId) -> bool:
    """Whether t never denotes a group element: in torsion-free theories the
    rational part of a value comes from the constant alone."""
    return not theory.has_torsion and t.const.a.denominator != 1


def _sign_canonical(t: Term) -> Term:
    """t or -t, whichever has a positive leading coefficient (or constant)."""
    if t.coeffs:
        lead = t.coeffs[0][1]
    else:
        lead = t.const.a or t.const.b or t.const.c
    return -t if lead < 0 else t


def _closed_value(t: Term, theory: TheoryId) -> CircleElement:
    k = t.const
    return CircleElement.normalize(k.a, k.b, k.c)


def canonical_atom(a: Formula, theory: TheoryId) -> Formula:
    """Anchor, sign-normalize and fold an atom; may return TRUE or FALSE."""
    a = normalize_atom(a)
    if isinstance(a, Eq):
        t = reduce_constant(a.left, theory)
        if off_group(t, theory):
            return FALSE
        if t.is_closed():
            return Truth(_closed_value(t, theory).is_zero())
        t = reduce_constant(_sign_canonical(t), theory)
        return Eq(t, ZERO_TERM)
    if isinstance(a, Orient):
        u = reduce_constant(a.second, theory)
        w = reduce_constant(a.third, theory)
        if u.is_zero() or w.is_zero() or u == w:
            return FALSE
        if u.is_closed() and w.is_closed():
            zero = CircleElement()
            return Truth(orient(zero, _closed_value(u, theory), _closed_value(w, theory)))
        return Orient(ZERO_TERM, u, w)
    if isinstance(a, InV):
        t = reduce_constant(a.term, theory)
        if off_group(t, theory):
            return FALSE
        if t.is_zero():
            return TRUE
        if t.is_closed():
            model = _canonical(theory)
            if model.sub is None:
                raise ValueError("V atom outside a pair theory")
            return Truth(in_support(_closed_value(t, theory), model.sub.support))
        t = reduce_constant(_sign_canonical(t), theory)
        return InV(t)
    raise TypeError(f"not an atom: {a!r}")


def _negate(f: Formula) -> Formula:
    if isinstance(f, Truth):
        return Truth(not f.value)
    if isinstance(f, Not):
        return f.body
    return Not(f)


def simplify(f: Formula, theory: TheoryId) -> Formula:
    """Constant folding, flattening, deduplication and complementary-literal
    detection.  Quantifiers are simplified inside but kept."""
    cache: dict = {}

    def go(g: Formula) -> Formula:
        hit = cache.get(g)
        if hit is not None:
            return hit
        out = _go(g)
        cache[g] = out
        return out

    def _go(g: Formula) -> Formula:
        if is_atom(g):
            return canonical_atom(g, theory)
        if isinstance(g, Truth):
            return g
        if isinstance(g, Not):
            return _negate(go(g.body))
        if isinstance(g, (And, Or)):
            is_and = isinstance(g, And)
            absorbing = FALSE if is_and else TRUE
            parts: list[Formula] = []
            seen: set = set()
            for h in g.args:
                h = go(h)
                if h == absorbing:
                    return absorbing
                if isinstance(h, Truth):
                    continue
                subs = h.args if type(h) is type(g) else (h,)
                for s in subs:
                    if s in seen:
                        continue
                    seen.add(s)
                    parts.append(s)
            for s in parts:
                if _negate(s) in seen:
                    return absorbing
            if not parts:
                return Truth(is_and)
            if len(parts) == 1:
                return parts[0]
            return (And if is_and else Or)(tuple(parts))
        if isinstance(g, (Exists, Forall)):
            body = go(g.body)
            if isinstance(body, Truth):
                return body
            return type(g)(g.var, body)
        raise TypeError(f"unknown formula node {g!r}")

    return go(f)
