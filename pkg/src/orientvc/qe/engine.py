"""Quantifier elimination by virtual substitution on the circle.

For a quantifier-free body phi and a variable x, the set {x : phi} is a finite
union of points and open arcs whose endpoints solve n x + s = 0 for critical
terms n x + s of the body.  Hence

    E x. phi  <->  OR_p phi[x := p]  |  OR_c phi[x := c + eps]

where p ranges over roots of terms in closed literals (positive equations and
negated orientations) and c over roots of all critical terms; ``c + eps``
stands for a point immediately counterclockwise of c.

Rational coefficients.  A body may mention x with coefficient p/q.  We write
x = d x' for d the lcm of the denominators.  In torsion-free theories this is
a bijection.  With torsion, x' is confined to [0, 1/d) by an added guard, and
then the lift of x is d times the lift of x'.

Pairs.  Inside an open cell, x can be moved into any coset of G without
changing the order atoms, since every coset is dense.  Only finitely many
cosets affect the V atoms: those of the roots c_j of V(n_j x + s_j), shifted
by torsion that the sub misses, plus a generic one that meets no V atom.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import lcm
from typing import Iterable, Optional

from gmpy2 import mpq

from ..circle import RealCombo
from ..formula import (FALSE, TRUE, And, Eq, Exists, Forall, Formula, InV, Not,
                       Or, Orient, Term, TheoryId, Truth, ZERO_TERM, atom_count,
                       atom_terms, conj, disj, free_vars, is_atom,
                       is_quantifier_free, map_atoms, nnf, substitute)
from .simplify import canonical_atom, simplify


class UnsupportedTheoryError(ValueError):
    pass


@dataclass
class QEStats:
    atoms_in: int = 0
    atoms_out: int = 0
    test_points: int = 0
    coset_branches: int = 0
    eliminations: int = 0
    elapsed: float = 0.0

    def as_dict(self) -> dict:
        return {"atoms_in": self.atoms_in, "atoms_out": self.atoms_out,
                "test_points": self.test_points, "coset_branches": self.coset_branches,
                "eliminations": self.eliminations, "elapsed_s": round(self.elapsed, 6)}


@dataclass
class QEResult:
    output: Formula
    stats: QEStats = field(default_factory=QEStats)


def _const(a) -> Term:
    return Term.constant(RealCombo(mpq(a)))


def _split_x(t: Term, x: str) -> tuple[mpq, Term]:
    return t.coeff(x), t.without(x)


def _roots(n: mpq, s: Term, theory: TheoryId) -> list[Term]:
    """All real solutions of n x + s = 0 mod 1 (n a nonzero integer) as terms.

    In torsion-free theories only the first can be a group element; the
    others are still cell boundaries for the order atoms.
    """
    n = int(n)
    if n < 0:
        n, s = -n, -s
    base = s.scale(mpq(-1, n))
    return [base + _const(mpq(k, n)) if k else base for k in range(n)]


def _group_roots(n: mpq, s: Term, theory: TheoryId) -> list[Term]:
    """Solutions of n x + s = 0 inside the group."""
    roots = _roots(n, s, theory)
    if theory.has_torsion:
        return roots
    # torsion-free: s has a constant with rational part in [0, 1) after
    # canonicalization, and a root is in the group iff that part is 0
    if s.const.a.denominator != 1 or s.const.a % 1:
        return []
    return roots[:1]


def _gaps(n: mpq, theory: TheoryId) -> list[mpq]:
    """Torsion of the ambient group that the sub misses, up to G."""
    n = abs(int(n))
    if theory is TheoryId.PAIR_TOR_TF:
        return [mpq(k, n) for k in range(n)]
    return [mpq(0)]


def _critical(a: Formula, x: str) -> list[Term]:
    if isinstance(a, Eq):
        return [a.left] if a.left.coeff(x) else []
    if isinstance(a, Orient):
        u, w = a.second, a.third
        return [t for t in (u, w, w - u) if t.coeff(x)]
    return []


def _collect(f: Formula, x: str, negated: bool, closed: list, every: list,
             vatoms: list) -> None:
    if is_atom(f):
        crit = _critical(f, x)
        every.extend(crit)
        if isinstance(f, Eq) and not negated:
            closed.extend(crit)
        elif isinstance(f, Orient) and negated:
            closed.extend(crit)
        elif isinstance(f, InV) and f.term.coeff(x):
            vatoms.append(f)
        return
    if isinstance(f, Not):
        _collect(f.body, x, not negated, closed, every, vatoms)
    elif isinstance(f, (And, Or)):
        for g in f.args:
            _collect(g, x, negated, closed, every, vatoms)


def _unique(items: Iterable) -> list:
    seen = set()
    out = []
    for it in items:
        if it not in seen:
            seen.add(it)
            out.append(it)
    return out


def _eps_orient(u: Term, w: Term, x: str, p: Term) -> Formula:
    """O(0, u, w) at x = p + eps."""
    m1, _ = _split_x(u, x)
    m2, _ = _split_x(w, x)
    u0 = u.substitute(x, p)
    w0 = w.substitute(x, p)
    zu, zw, zuw = Eq(u0, ZERO_TERM), Eq(w0, ZERO_TERM), Eq(w0 - u0, ZERO_TERM)
    cases = [Orient(ZERO_TERM, u0, w0)]
    if m1 < m2:
        cases.append(And((Not(zu), zuw)))
    if m1 > 0:
        cases.append(And((zu, Not(zw))))
    if m2 < 0:
        cases.append(And((Not(zu), zw)))
    both = ((m1 > 0 and m2 > 0 and m1 < m2) or (m1 > 0 and m2 < 0)
            or (m1 < 0 and m2 < 0 and m1 < m2))
    if both:
        cases.append(And((zu, zw)))
    return Or(tuple(cases))


def _at_eps(f: Formula, x: str, p: Term, v_truth) -> Formula:
    def atom(a: Formula) -> Formula:
        if isinstance(a, Eq):
            return FALSE if a.left.coeff(x) else a
        if isinstance(a, Orient):
            if not (a.second.coeff(x) or a.third.coeff(x)):
                return a
            return _eps_orient(a.second, a.third, x, p)
        if isinstance(a, InV):
            return v_truth(a) if a.term.coeff(x) else a
        raise TypeError(a)
    return map_atoms(f, atom)


def _canonicalize(f: Formula, theory: TheoryId) -> Formula:
    return map_atoms(nnf(f), lambda a: canonical_atom(a, theory))


def _rescale(body: Formula, x: str, theory: TheoryId) -> Formula:
    """Make every coefficient of x an integer (see module docstring)."""
    d = 1
    for a in _iter_atoms(body):
        for t in atom_terms(a):
            q = t.coeff(x)
            if q:
                d = lcm(d, int(q.denominator))
    if d == 1:
        return body
    scaled = substitute(body, x, Term(((x, d),)))
    if theory.has_torsion:
        xt = Term.var(x)
        guard = Or((Eq(xt, ZERO_TERM), Orient(ZERO_TERM, xt, _const(mpq(1, d)))))
        scaled = And((scaled, guard))
    return scaled


def _iter_atoms(f: Formula):
    from ..formula import iter_atoms
    return iter_atoms(f)


def _eliminate_conjunct(body: Formula, x: str, theory: TheoryId,
                        stats: QEStats) -> Formula:
    """E x. body for a body already in negation normal form."""
    # an equation conjunct pins x to its roots
    if isinstance(body, And) or isinstance(body, Eq):
        parts = body.args if isinstance(body, And) else (body,)
        for g in parts:
            if isinstance(g, Eq) and g.left.coeff(x):
                n, s = _split_x(g.left, x)
                roots = _group_roots(n, s, theory)
                stats.test_points += len(roots)
                return disj(substitute(body, x, r) for r in roots)

    closed: list[Term] = []
    every: list[Term] = []
    vatoms: list[Formula] = []
    _collect(body, x, False, closed, every, vatoms)
    points = _unique(r for t in _unique(closed)
                     for r in _group_roots(*_split_x(t, x), theory))
    eps = _unique(r for t in _unique(every) for r in _roots(*_split_x(t, x), theory))
    stats.test_points += len(points) + len(eps)

    out = [substitute(body, x, p) for p in points]

    if not vatoms:
        out.extend(_at_eps(body, x, c, None) for c in eps)
        return disj(out)

    # coset classes of x relative to the V atoms
    vinfo = []
    for a in _unique(vatoms):
        n, s = _split_x(a.term, x)
        vinfo.append((a, n, _roots(n, s, theory)[0]))
    kappas: list[Optional[Term]] = _unique(
        c + _const(l) if l else c for _, n, c in vinfo for l in _gaps(n, theory))
    kappas.append(None)
    stats.coset_branches += len(kappas)

    for kappa in kappas:
        table = {}
        for a, n, c in vinfo:
            if kappa is None:
                table[a] = FALSE
            else:
                table[a] = disj(InV(kappa - c - _const(l) if l else kappa - c)
                                for l in _gaps(n, theory))

        def v_truth(a, table=table):
            return table[a]

        if eps:
            out.extend(_at_eps(body, x, c, v_truth) for c in eps)
        else:
            out.append(map_atoms(body, lambda a: v_truth(a) if isinstance(a, InV)
                                 and a.term.coeff(x) else a))
    return disj(out)


def eliminate_one(body: Formula, x: str, theory: TheoryId,
                  stats: Optional[QEStats] = None) -> Formula:
    """Quantifier-free equivalent of E x. body in the theory."""
    if not isinstance(theory, TheoryId):
        raise UnsupportedTheoryError(f"not a theory: {theory!r}")
    if not is_quantifier_free(body):
        raise ValueError("eliminate_one needs a quantifier-free body")
    stats = stats if stats is not None else QEStats()
    stats.eliminations += 1
    body = simplify(_canonicalize(body, theory), theory)
    if x not in free_vars(body):
        return body
    body = _rescale(body, x, theory)
    body = simplify(_canonicalize(body, theory), theory)
    if x not in free_vars(body):
        return body
    disjuncts = body.args if isinstance(body, Or) else (body,)
    results = []
    for d in disjuncts:
        if x not in free_vars(d):
            results.append(d)
            continue
        r = simplify(_canonicalize(_eliminate_conjunct(d, x, theory, stats), theory), theory)
        if r == TRUE:
            return TRUE
        results.append(r)
    return simplify(disj(results), theory)


def _eliminate(f: Formula, theory: TheoryId, stats: QEStats) -> Formula:
    if is_atom(f) or isinstance(f, Truth):
        return f
    if isinstance(f, Not):
        return Not(_eliminate(f.body, theory, stats))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_eliminate(g, theory, stats) for g in f.args))
    if isinstance(f, Exists):
        return eliminate_one(_eliminate(f.body, theory, stats), f.var, theory, stats)
    if isinstance(f, Forall):
        inner = _eliminate(f.body, theory, stats)
        return simplify(Not(eliminate_one(Not(inner), f.var, theory, stats)), theory)
    raise TypeError(f"unknown formula node {f!r}")


def eliminate(f: Formula, theory: TheoryId) -> QEResult:
    """Innermost-first elimination; universal quantifiers as not-exists-not."""
    if not isinstance(theory, TheoryId):
        raise UnsupportedTheoryError(f"not a theory: {theory!r}")
    stats = QEStats(atoms_in=atom_count(f))
    t0 = time.perf_counter()
    if is_quantifier_free(f):
        out = f
    else:
        out = simplify(_eliminate(f, theory, stats), theory)
    stats.elapsed = time.perf_counter() - t0
    stats.atoms_out = atom_count(out)
    return QEResult(out, stats)


def decide_sentence(s: Formula, theory: TheoryId) -> bool:
    fv = free_vars(s)
    if fv:
        raise ValueError(f"not a sentence; free variables {sorted(fv)}")
    out = simplify(eliminate(s, theory).output, theory)
    if isinstance(out, Truth):
        return out.value
    from ..models import canonical_model, eval as eval_qf
    return eval_qf(out, {}, canonical_model(theory))
