"""Terms, formulas, parsing and printing for the languages L_O and L_O^p.

Surface syntax (ASCII)::

    formula := atom | "!" formula | formula "&" formula | formula "|" formula
             | "E" var "." formula | "A" var "." formula | "(" formula ")"
             | "true" | "false"
    atom    := term "=" term | term "!=" term
             | "O(" term "," term "," term ")" | "V(" term ")"
    term    := ["-"] addend { ("+" | "-") addend }
    addend  := [coef "*"] (var | "0" | const)
    const   := "c[" a " + " b "*r2" " + " c "*r3" "]"

``!`` binds tighter than ``&``, which binds tighter than ``|``; a quantifier
body extends as far right as possible.  Coefficients are integers in input
formulas; the elimination engine may produce rational coefficients ``p/q*x``,
and the parser accepts those too so that its output reads back.
"""
from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Optional, Union

from gmpy2 import mpq

from .circle import ZERO, RealCombo, Rat, format_combo, parse_combo, rat


class ParseError(ValueError):
    """Syntax error, with the 0-based character offset of the offending token."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class LanguageError(ValueError):
    """A symbol that the chosen language does not have (V outside pair theories)."""


class TheoryId(enum.Enum):
    DOG_TF = "DOG-TF"
    DOG_TOR = "DOG-TOR"
    PAIR_TF_TF = "PAIR-TF-TF"
    PAIR_TOR_TOR = "PAIR-TOR-TOR"
    PAIR_TOR_TF = "PAIR-TOR-TF"

    @property
    def is_pair(self) -> bool:
        return self.value.startswith("PAIR")

    @property
    def has_torsion(self) -> bool:
        """Whether the (ambient) group has nonzero torsion."""
        return self in (TheoryId.DOG_TOR, TheoryId.PAIR_TOR_TOR, TheoryId.PAIR_TOR_TF)

    @property
    def sub_has_torsion(self) -> bool:
        return self is TheoryId.PAIR_TOR_TOR

    @classmethod
    def parse(cls, text: str) -> TheoryId:
        key = text.strip().upper().replace("_", "-")
        for t in cls:
            if t.value == key:
                return t
        raise ValueError(f"unknown theory {text!r}; expected one of "
                         + ", ".join(t.value.lower() for t in cls))


# -- terms -------------------------------------------------------------------

class Term:
    """Linear term sum(q_i * v_i) + K with rational q_i and a constant combo K.

    The constant is kept as the raw real combination written in the literal,
    not reduced mod 1, because scaling by a rational coefficient is only
    meaningful on a fixed representative.
    """

    __slots__ = ("coeffs", "const", "_hash")

    def __init__(self, coeffs: Mapping[str, object] | Iterable = (),
                 const: Optional[RealCombo] = None):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[str, Rat] = {}
        for name, q in items:
            acc[name] = acc.get(name, ZERO) + rat(q)
        self.coeffs = tuple(sorted((k, v) for k, v in acc.items() if v))
        self.const = const if const is not None else RealCombo()
        self._hash = None

    @classmethod
    def var(cls, name: str) -> Term:
        return cls(((name, 1),))

    @classmethod
    def constant(cls, value: RealCombo) -> Term:
        return cls((), value)

    @classmethod
    def _make(cls, coeffs: tuple, const: RealCombo) -> Term:
        obj = object.__new__(cls)
        obj.coeffs = coeffs
        obj.const = const
        obj._hash = None
        return obj

    def coeff(self, name: str) -> Rat:
        for k, v in self.coeffs:
            if k == name:
                return v
        return ZERO

    def variables(self) -> frozenset:
        return frozenset(k for k, _ in self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs and self.const.is_zero()

    def is_closed(self) -> bool:
        return not self.coeffs

    def has_rational_coeffs(self) -> bool:
        return any(v.denominator != 1 for _, v in self.coeffs)

    def __add__(self, other: Term) -> Term:
        acc = dict(self.coeffs)
        for k, v in other.coeffs:
            acc[k] = acc.get(k, ZERO) + v
        return Term._make(tuple(sorted((k, v) for k, v in acc.items() if v)),
                          self.const + other.const)

    def __neg__(self) -> Term:
        return Term._make(tuple((k, -v) for k, v in self.coeffs), -self.const)

    def __sub__(self, other: Term) -> Term:
        return self + (-other)

    def scale(self, q) -> Term:
        q = rat(q)
        if not q:
            return ZERO_TERM
        return Term._make(tuple((k, q * v) for k, v in self.coeffs), self.const.scale(q))

    def without(self, name: str) -> Term:
        return Term._make(tuple(kv for kv in self.coeffs if kv[0] != name), self.const)

    def substitute(self, name: str, t: Term) -> Term:
        q = self.coeff(name)
        if not q:
            return self
        return self.without(name) + t.scale(q)

    def rename(self, mapping: Mapping[str, str]) -> Term:
        return Term([(mapping.get(k, k), v) for k, v in self.coeffs], self.const)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Term) and self.coeffs == other.coeffs
                and self.const == other.const)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.coeffs, self.const))
        return self._hash

    def sort_key(self) -> tuple:
        return (tuple((k, float(v)) for k, v in self.coeffs),
                tuple(float(x) for x in self.const))

    def __repr__(self) -> str:
        return f"Term({format_term(self)!r})"

    def __str__(self) -> str:
        return format_term(self)


ZERO_TERM = Term()


def format_term(t: Term) -> str:
    pieces: list[tuple[bool, str]] = []
    for name, q in t.coeffs:
        mag = abs(q)
        body = name if mag == 1 else f"{mag}*{name}"
        pieces.append((q < 0, body))
    if not t.const.is_zero():
        pieces.append((False, f"c[{format_combo(t.const)}]"))
    if not pieces:
        return "0"
    out = ("-" if pieces[0][0] else "") + pieces[0][1]
    for neg, body in pieces[1:]:
        out += (" - " if neg else " + ") + body
    return out


# -- formulas ----------------------------------------------------------------

class Formula:
    """Base class of the immutable formula AST."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_formula(self)

    def __and__(self, other: Formula) -> Formula:
        return And((self, other))

    def __or__(self, other: Formula) -> Formula:
        return Or((self, other))

    def __invert__(self) -> Formula:
        return Not(self)


@dataclass(frozen=True, slots=True)
class Truth(Formula):
    value: bool

    def __repr__(self) -> str:
        return "TRUE" if self.value else "FALSE"


TRUE = Truth(True)
FALSE = Truth(False)


@dataclass(frozen=True, slots=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Orient(Formula):
    first: Term
    second: Term
    third: Term


@dataclass(frozen=True, slots=True)
class InV(Formula):
    term: Term


Atom = Union[Eq, Orient, InV]
ATOM_TYPES = (Eq, Orient, InV)


@dataclass(frozen=True, slots=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True, slots=True)
class Or(Formula):
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True, slots=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class Forall(Formula):
    var: str
    body: Formula


def is_atom(f: Formula) -> bool:
    return isinstance(f, ATOM_TYPES)


def atom_terms(a: Formula) -> tuple:
    if isinstance(a, Eq):
        return (a.left, a.right)
    if isinstance(a, Orient):
        return (a.first, a.second, a.third)
    if isinstance(a, InV):
        return (a.term,)
    return ()


def map_terms(a: Formula, fn: Callable[[Term], Term]) -> Formula:
    if isinstance(a, Eq):
        return Eq(fn(a.left), fn(a.right))
    if isinstance(a, Orient):
        return Orient(fn(a.first), fn(a.second), fn(a.third))
    if isinstance(a, InV):
        return InV(fn(a.term))
    raise TypeError(f"not an atom: {a!r}")


def conj(items: Iterable[Formula]) -> Formula:
    items = tuple(items)
    if not items:
        return TRUE
    return items[0] if len(items) == 1 else And(items)


def disj(items: Iterable[Formula]) -> Formula:
    items = tuple(items)
    if not items:
        return FALSE
    return items[0] if len(items) == 1 else Or(items)


def implies(a: Formula, b: Formula) -> Formula:
    return Or((Not(a), b))


def map_atoms(f: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    """Rebuild f with every atom replaced by fn(atom); quantifiers pass through."""
    if is_atom(f):
        return fn(f)
    if isinstance(f, Truth):
        return f
    if isinstance(f, Not):
        return Not(map_atoms(f.body, fn))
    if isinstance(f, And):
        return And(tuple(map_atoms(g, fn) for g in f.args))
    if isinstance(f, Or):
        return Or(tuple(map_atoms(g, fn) for g in f.args))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, map_atoms(f.body, fn))
    raise TypeError(f"unknown formula node {f!r}")


def iter_atoms(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        if is_atom(g):
            yield g
        elif isinstance(g, Not):
            stack.append(g.body)
        elif isinstance(g, (And, Or)):
            stack.extend(reversed(g.args))
        elif isinstance(g, (Exists, Forall)):
            stack.append(g.body)


def atom_count(f: Formula) -> int:
    return sum(1 for _ in iter_atoms(f))


def is_quantifier_free(f: Formula) -> bool:
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Exists, Forall)):
            return False
        if isinstance(g, Not):
            stack.append(g.body)
        elif isinstance(g, (And, Or)):
            stack.extend(g.args)
    return True


def quantifier_depth(f: Formula) -> int:
    if isinstance(f, (Exists, Forall)):
        return 1 + quantifier_depth(f.body)
    if isinstance(f, Not):
        return quantifier_depth(f.body)
    if isinstance(f, (And, Or)):
        return max((quantifier_depth(g) for g in f.args), default=0)
    return 0


def uses_v(f: Formula) -> bool:
    return any(isinstance(a, InV) for a in iter_atoms(f))


def free_vars(f: Formula) -> frozenset:
    if is_atom(f):
        out = set()
        for t in atom_terms(f):
            out.update(k for k, _ in t.coeffs)
        return frozenset(out)
    if isinstance(f, Truth):
        return frozenset()
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        out = set()
        for g in f.args:
            out |= free_vars(g)
        return frozenset(out)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"unknown formula node {f!r}")


def all_vars(f: Formula) -> frozenset:
    out = set(free_vars(f))
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Exists, Forall)):
            out.add(g.var)
            stack.append(g.body)
        elif isinstance(g, Not):
            stack.append(g.body)
        elif isinstance(g, (And, Or)):
            stack.extend(g.args)
    return frozenset(out)


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    stem = base.rstrip("0123456789'") or "v"
    for i in itertools.count(1):
        cand = f"{stem}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def substitute(f: Formula, v: str, t: Term) -> Formula:
    """Capture-avoiding substitution f[v := t]."""
    if is_atom(f):
        return map_terms(f, lambda s: s.substitute(v, t))
    if isinstance(f, Truth):
        return f
    if isinstance(f, Not):
        return Not(substitute(f.body, v, t))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(substitute(g, v, t) for g in f.args))
    if isinstance(f, (Exists, Forall)):
        if f.var == v or v not in free_vars(f.body):
            return f
        body, var = f.body, f.var
        if var in t.variables():
            new = fresh_name(var, all_vars(f) | t.variables() | {v})
            body = substitute(body, var, Term.var(new))
            var = new
        return type(f)(var, substitute(body, v, t))
    raise TypeError(f"unknown formula node {f!r}")


def rename_free(f: Formula, mapping: Mapping[str, str]) -> Formula:
    out = f
    for old, new in mapping.items():
        out = substitute(out, old, Term.var(new))
    return out


def canonical_rename(f: Formula, prefix: str = "_b") -> Formula:
    """Rename bound variables to prefix1, prefix2, ... in left-to-right binder
    order, so alpha-equivalent formulas become identical."""
    taken = set(free_vars(f))
    counter = itertools.count(1)

    def go(g: Formula, env: dict) -> Formula:
        if is_atom(g):
            return map_terms(g, lambda s: s.rename(env))
        if isinstance(g, Truth):
            return g
        if isinstance(g, Not):
            return Not(go(g.body, env))
        if isinstance(g, (And, Or)):
            return type(g)(tuple(go(h, env) for h in g.args))
        if isinstance(g, (Exists, Forall)):
            while True:
                name = f"{prefix}{next(counter)}"
                if name not in taken:
                    break
            inner = dict(env)
            inner[g.var] = name
            return type(g)(name, go(g.body, inner))
        raise TypeError(f"unknown formula node {g!r}")

    return go(f, {})


def relativize_to_V(f: Formula) -> Formula:
    """Restrict every quantifier to the distinguished subgroup."""
    if is_atom(f) or isinstance(f, Truth):
        return f
    if isinstance(f, Not):
        return Not(relativize_to_V(f.body))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(relativize_to_V(g) for g in f.args))
    guard = InV(Term.var(f.var))
    body = relativize_to_V(f.body)
    if isinstance(f, Exists):
        return Exists(f.var, And((guard, body)))
    return Forall(f.var, Or((Not(guard), body)))


def normalize_atom(a: Formula) -> Formula:
    """Anchor an atom at 0: t1 = t2 becomes t1 - t2 = 0 and O(t1,t2,t3)
    becomes O(0, t2 - t1, t3 - t1); membership atoms are left alone."""
    if isinstance(a, Eq):
        return Eq(a.left - a.right, ZERO_TERM)
    if isinstance(a, Orient):
        return Orient(ZERO_TERM, a.second - a.first, a.third - a.first)
    if isinstance(a, InV):
        return a
    raise TypeError(f"not an atom: {a!r}")


def nnf(f: Formula, negate: bool = False) -> Formula:
    """Push negations down to atoms; quantifiers dualize."""
    if is_atom(f):
        return Not(f) if negate else f
    if isinstance(f, Truth):
        return Truth(f.value != negate)
    if isinstance(f, Not):
        return nnf(f.body, not negate)
    if isinstance(f, And):
        parts = tuple(nnf(g, negate) for g in f.args)
        return Or(parts) if negate else And(parts)
    if isinstance(f, Or):
        parts = tuple(nnf(g, negate) for g in f.args)
        return And(parts) if negate else Or(parts)
    if isinstance(f, Exists):
        return Forall(f.var, nnf(f.body, True)) if negate else Exists(f.var, nnf(f.body))
    if isinstance(f, Forall):
        return Exists(f.var, nnf(f.body, True)) if negate else Forall(f.var, nnf(f.body))
    raise TypeError(f"unknown formula node {f!r}")


# -- printing ----------------------------------------------------------------

_PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3


def format_atom(a: Formula) -> str:
    if isinstance(a, Eq):
        return f"{format_term(a.left)} = {format_term(a.right)}"
    if isinstance(a, Orient):
        return f"O({format_term(a.first)}, {format_term(a.second)}, {format_term(a.third)})"
    if isinstance(a, InV):
        return f"V({format_term(a.term)})"
    raise TypeError(f"not an atom: {a!r}")


def format_formula(f: Formula) -> str:
    return _fmt(f, 0)


def _fmt(f: Formula, ctx: int) -> str:
    if isinstance(f, Truth):
        return "true" if f.value else "false"
    if isinstance(f, Eq):
        text = format_atom(f)
        return f"({text})" if ctx >= _PREC_UNARY else text
    if is_atom(f):
        return format_atom(f)
    if isinstance(f, Not):
        return "!" + _fmt(f.body, _PREC_UNARY)
    if isinstance(f, (And, Or)):
        if not f.args:
            return "true" if isinstance(f, And) else "false"
        prec = _PREC_AND if isinstance(f, And) else _PREC_OR
        sep = " & " if isinstance(f, And) else " | "
        if len(f.args) == 1:
            return _fmt(f.args[0], ctx)
        # a nested node of the same kind keeps its parentheses for round trip
        text = sep.join(_fmt(g, prec + 1 if type(g) is type(f) else prec)
                        for g in f.args)
        return f"({text})" if ctx >= prec else text
    if isinstance(f, (Exists, Forall)):
        q = "E" if isinstance(f, Exists) else "A"
        text = f"{q} {f.var}. {_fmt(f.body, 0)}"
        return f"({text})" if ctx > 0 else text
    raise TypeError(f"unknown formula node {f!r}")


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<const>c\[[^\]]*\])
  | (?P<num>\d+(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>!=|[!&|().,=*+\-])
""", re.VERBOSE)

KEYWORDS = frozenset({"E", "A", "O", "V", "true", "false"})


class _Parser:
    def __init__(self, text: str, theory: Optional[TheoryId]):
        self.text = text
        self.theory = theory
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
            kind = m.lastgroup
            if kind != "ws":
                self.tokens.append((kind, m.group(), pos))
            pos = m.end()
        self.tokens.append(("eof", "", len(text)))
        self.i = 0

    def peek(self, offset: int = 0) -> tuple[str, str, int]:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, val, pos = self.next()
        if val != value or kind not in ("op",):
            shown = val or "end of input"
            raise ParseError(f"expected {value!r}, found {shown!r}", pos, self.text)

    def fail(self, message: str) -> None:
        _, val, pos = self.peek()
        raise ParseError(f"{message}, found {val or 'end of input'!r}", pos, self.text)

    # formula levels
    def parse(self) -> Formula:
        f = self.parse_or()
        if self.peek()[0] != "eof":
            self.fail("unexpected trailing input")
        return f

    def parse_or(self) -> Formula:
        args = [self.parse_and()]
        while self.peek()[1] == "|":
            self.next()
            args.append(self.parse_and())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def parse_and(self) -> Formula:
        args = [self.parse_unary()]
        while self.peek()[1] == "&":
            self.next()
            args.append(self.parse_unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def parse_unary(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "op" and val == "!":
            self.next()
            return Not(self.parse_unary())
        if kind == "ident" and val in ("E", "A"):
            self.next()
            vkind, vname, vpos = self.next()
            if vkind != "ident" or vname in KEYWORDS:
                raise ParseError(f"expected a variable after {val!r}", vpos, self.text)
            self.expect(".")
            body = self.parse_or()
            return Exists(vname, body) if val == "E" else Forall(vname, body)
        if kind == "ident" and val in ("true", "false"):
            self.next()
            return TRUE if val == "true" else FALSE
        if kind == "op" and val == "(":
            self.next()
            f = self.parse_or()
            self.expect(")")
            return f
        if kind == "ident" and val == "O" and self.peek(1)[1] == "(":
            self.next()
            self.next()
            args = [self.parse_term()]
            while self.peek()[1] == ",":
                self.next()
                args.append(self.parse_term())
            if len(args) != 3:
                raise ParseError(f"O takes 3 arguments, got {len(args)}", pos, self.text)
            self.expect(")")
            return Orient(*args)
        if kind == "ident" and val == "V" and self.peek(1)[1] == "(":
            if self.theory is not None and not self.theory.is_pair:
                raise LanguageError(
                    f"predicate V is not in the language of {self.theory.value} "
                    f"(position {pos})")
            self.next()
            self.next()
            args = [self.parse_term()]
            while self.peek()[1] == ",":
                self.next()
                args.append(self.parse_term())
            if len(args) != 1:
                raise ParseError(f"V takes 1 argument, got {len(args)}", pos, self.text)
            self.expect(")")
            return InV(args[0])
        left = self.parse_term()
        kind, val, pos = self.peek()
        if val == "=":
            self.next()
            return Eq(left, self.parse_term())
        if val == "!=":
            self.next()
            return Not(Eq(left, self.parse_term()))
        self.fail("expected '=' after term")
        raise AssertionError("unreachable")

    def parse_term(self) -> Term:
        negate = False
        if self.peek()[1] == "-":
            self.next()
            negate = True
        total = self.parse_addend()
        if negate:
            total = -total
        while self.peek()[1] in ("+", "-"):
            op = self.next()[1]
            nxt = self.parse_addend()
            total = total + nxt if op == "+" else total - nxt
        return total

    def parse_addend(self) -> Term:
        kind, val, pos = self.peek()
        coef = None
        if kind == "num" and self.peek(1)[1] == "*":
            self.next()
            self.next()
            coef = mpq(val)
            kind, val, pos = self.peek()
        self.next()
        if kind == "num":
            if val != "0":
                raise ParseError("bare number; only 0 denotes a group element", pos, self.text)
            t = ZERO_TERM
        elif kind == "const":
            try:
                t = Term.constant(parse_combo(val[2:-1]))
            except ValueError as exc:
                raise ParseError(f"bad constant literal ({exc})", pos, self.text) from None
        elif kind == "ident" and val not in KEYWORDS:
            t = Term.var(val)
        else:
            raise ParseError(f"expected a term, found {val or 'end of input'!r}", pos, self.text)
        return t.scale(coef) if coef is not None else t


def parse_formula(text: str, theory: Optional[TheoryId] = None) -> Formula:
    """Parse a formula; with a single-group theory, V atoms are rejected."""
    if isinstance(theory, str):
        theory = TheoryId.parse(theory)
    return _Parser(text, theory).parse()


def parse_term(text: str) -> Term:
    p = _Parser(text, None)
    t = p.parse_term()
    if p.peek()[0] != "eof":
        p.fail("unexpected trailing input")
    return t


def check_language(f: Formula, theory: TheoryId) -> None:
    if not theory.is_pair and uses_v(f):
        raise LanguageError(f"predicate V is not in the language of {theory.value}")
