"""Exact arithmetic in the computable circle group C = (Q + r2*Q + r3*Q) / Z.

An element is stored as a triple of rationals (a, b, c) denoting the real
number a + b*sqrt(2) + c*sqrt(3), normalized into [0, 1) by shifting the
rational part by an integer.  Because 1, sqrt(2), sqrt(3) are linearly
independent over Q, two normalized triples denote the same point exactly
when their fields agree.

Signs and floors of irrational combinations are decided by interval
refinement over integer square-root bounds.  A float evaluation with a
rigorous error bound runs first and is trusted only when the bound
separates the value from the decision threshold.
"""
from __future__ import annotations

import enum
import functools
import math
import re
from typing import Iterable, Optional, Sequence

import gmpy2
from gmpy2 import mpq

Rat = type(mpq(0))

ZERO = mpq(0)
ONE = mpq(1)

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)
# per-term relative error of the float evaluation, generously rounded up
_REL = 2.0 ** -49


def rat(x) -> Rat:
    """Coerce ints, strings ('3/4'), Fractions and mpqs to an mpq."""
    if isinstance(x, Rat):
        return x
    if isinstance(x, str):
        return mpq(x.replace(" ", ""))
    return mpq(x)


class Component(enum.Enum):
    """Generator lines of C."""

    Q = "Q"
    R2 = "r2Q"
    R3 = "r3Q"

    def __lt__(self, other: Component) -> bool:
        return _COMPONENT_ORDER[self] < _COMPONENT_ORDER[other]


_COMPONENT_ORDER = {Component.Q: 0, Component.R2: 1, Component.R3: 2}


def support_of(items: Iterable[Component | str]) -> frozenset:
    out = set()
    for item in items:
        out.add(item if isinstance(item, Component) else Component(item))
    return frozenset(out)


# -- square-root bounds ------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _root_bounds(n: int, bits: int) -> tuple[Rat, Rat]:
    r = gmpy2.isqrt(n << (2 * bits))
    scale = mpq(1, 1 << bits)
    return r * scale, (r + 1) * scale


def _interval(a: Rat, b: Rat, c: Rat, bits: int) -> tuple[Rat, Rat]:
    lo2, hi2 = _root_bounds(2, bits)
    lo3, hi3 = _root_bounds(3, bits)
    lo = hi = a
    if b:
        if b > 0:
            lo += b * lo2
            hi += b * hi2
        else:
            lo += b * hi2
            hi += b * lo2
    if c:
        if c > 0:
            lo += c * lo3
            hi += c * hi3
        else:
            lo += c * hi3
            hi += c * lo3
    return lo, hi


def _approx(a: Rat, b: Rat, c: Rat) -> tuple[float, float]:
    # float(mpq) is correctly rounded; with the rounded roots and two sums the
    # error stays below 5 ulps of |fa| + |fb| + |fc|, and _REL is 16 ulps
    fa = float(a)
    if not b and not c:
        return fa, _REL * abs(fa) + 1e-300
    fb = float(b) * _SQRT2
    fc = float(c) * _SQRT3
    return fa + fb + fc, _REL * (abs(fa) + abs(fb) + abs(fc)) + 1e-300


def _sign3(a: Rat, b: Rat, c: Rat) -> int:
    if not b and not c:
        return (a > 0) - (a < 0)
    value, err = _approx(a, b, c)
    if math.isfinite(value):
        if value > err:
            return 1
        if value < -err:
            return -1
    bits = 64
    while True:
        lo, hi = _interval(a, b, c, bits)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        bits *= 2


def _floor3(a: Rat, b: Rat, c: Rat) -> int:
    if not b and not c:
        return int(a.numerator // a.denominator)
    value, err = _approx(a, b, c)
    if math.isfinite(value):
        f1 = math.floor(value - err)
        if f1 == math.floor(value + err):
            return f1
    bits = 64
    while True:
        lo, hi = _interval(a, b, c, bits)
        f1 = lo.numerator // lo.denominator
        if f1 == hi.numerator // hi.denominator:
            return int(f1)
        bits *= 2


# -- real combinations -------------------------------------------------------

class RealCombo:
    """The real number a + b*sqrt(2) + c*sqrt(3) with rational a, b, c."""

    __slots__ = ("a", "b", "c")

    def __init__(self, a=ZERO, b=ZERO, c=ZERO):
        self.a = rat(a)
        self.b = rat(b)
        self.c = rat(c)

    @classmethod
    def _raw(cls, a: Rat, b: Rat, c: Rat) -> RealCombo:
        obj = object.__new__(cls)
        obj.a, obj.b, obj.c = a, b, c
        return obj

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RealCombo):
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.c == other.c

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.c))

    def __add__(self, other: RealCombo) -> RealCombo:
        return RealCombo._raw(self.a + other.a, self.b + other.b, self.c + other.c)

    def __sub__(self, other: RealCombo) -> RealCombo:
        return RealCombo._raw(self.a - other.a, self.b - other.b, self.c - other.c)

    def __neg__(self) -> RealCombo:
        return RealCombo._raw(-self.a, -self.b, -self.c)

    def scale(self, q) -> RealCombo:
        q = rat(q)
        return RealCombo._raw(q * self.a, q * self.b, q * self.c)

    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c)

    def __float__(self) -> float:
        return _approx(self.a, self.b, self.c)[0]

    def __repr__(self) -> str:
        return f"RealCombo({self.a}, {self.b}, {self.c})"

    def __str__(self) -> str:
        return format_combo(self)


def sign(r: RealCombo) -> int:
    """Sign of the denoted real: -1, 0 or +1, decided exactly."""
    if not (r.a or r.b or r.c):
        return 0
    return _sign3(r.a, r.b, r.c)


def floor_value(r: RealCombo) -> int:
    """Greatest integer not exceeding the denoted real."""
    return _floor3(r.a, r.b, r.c)


def compare(r: RealCombo, s: RealCombo) -> int:
    return sign(r - s)


# -- circle elements ---------------------------------------------------------

class CircleElement:
    """A point of C, stored as its representative in [0, 1)."""

    __slots__ = ("a", "b", "c", "_f", "_e", "_h")

    def __init__(self, a=ZERO, b=ZERO, c=ZERO):
        a, b, c = rat(a), rat(b), rat(c)
        a -= _floor3(a, b, c)
        self._set(a, b, c)

    def _set(self, a: Rat, b: Rat, c: Rat) -> None:
        self.a, self.b, self.c = a, b, c
        self._f, self._e = _approx(a, b, c)
        self._h = None

    @classmethod
    def normalize(cls, a: Rat, b: Rat, c: Rat) -> CircleElement:
        obj = object.__new__(cls)
        if b or c:
            value, err = _approx(a, b, c)
            if math.isfinite(value):
                f = math.floor(value - err)
                if f == math.floor(value + err):
                    obj.a, obj.b, obj.c = a - f, b, c
                    # subtracting an integer is exact up to one rounding
                    obj._f, obj._e = value - f, err + _REL
                    obj._h = None
                    return obj
        obj._set(a - _floor3(a, b, c), b, c)
        return obj

    @classmethod
    def from_combo(cls, r: RealCombo) -> CircleElement:
        return cls.normalize(r.a, r.b, r.c)

    @property
    def value(self) -> RealCombo:
        return RealCombo._raw(self.a, self.b, self.c)

    def __float__(self) -> float:
        return self._f

    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CircleElement):
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.c == other.c

    def __hash__(self) -> int:
        if self._h is None:
            self._h = hash((self.a, self.b, self.c))
        return self._h

    def __add__(self, other: CircleElement) -> CircleElement:
        return circ_add(self, other)

    def __sub__(self, other: CircleElement) -> CircleElement:
        return circ_add(self, circ_neg(other))

    def __neg__(self) -> CircleElement:
        return circ_neg(self)

    def __repr__(self) -> str:
        return f"CircleElement({self.a}, {self.b}, {self.c})"

    def __str__(self) -> str:
        return format_constant(self.value)


ZERO_ELEMENT = CircleElement()


def element(a=ZERO, b=ZERO, c=ZERO) -> CircleElement:
    return CircleElement(a, b, c)


def circ_add(x: CircleElement, y: CircleElement) -> CircleElement:
    """x +_1 y: add representatives, subtract 1 on overflow."""
    a, b, c = x.a + y.a, x.b + y.b, x.c + y.c
    s = x._f + y._f
    err = x._e + y._e
    if s + err < 1.0:
        carry = 0
    elif s - err >= 1.0:
        carry = 1
    else:
        carry = 1 if _sign3(a - 1, b, c) >= 0 else 0
    obj = object.__new__(CircleElement)
    obj._set(a - carry, b, c)
    return obj


def circ_neg(x: CircleElement) -> CircleElement:
    if x.is_zero():
        return x
    obj = object.__new__(CircleElement)
    obj._set(1 - x.a, -x.b, -x.c)
    return obj


def circ_sub(x: CircleElement, y: CircleElement) -> CircleElement:
    return circ_add(x, circ_neg(y))


def circ_scale(n: int, x: CircleElement) -> CircleElement:
    """n-fold sum of x (n may be negative)."""
    n = int(n)
    return CircleElement.normalize(n * x.a, n * x.b, n * x.c)


def value_lt(x: CircleElement, y: CircleElement) -> bool:
    """Strict order of representatives in [0, 1)."""
    d = x._f - y._f
    e = x._e + y._e
    if d < -e:
        return True
    if d > e:
        return False
    if x == y:
        return False
    return _sign3(x.a - y.a, x.b - y.b, x.c - y.c) < 0


def value_cmp(x: CircleElement, y: CircleElement) -> int:
    if x == y:
        return 0
    return -1 if value_lt(x, y) else 1


value_key = functools.cmp_to_key(value_cmp)


def orient(a: CircleElement, b: CircleElement, c: CircleElement) -> bool:
    """Counterclockwise cyclic order: a, b, c pairwise distinct and in order."""
    if a == b or b == c or a == c:
        return False
    ab = value_lt(a, b)
    bc = value_lt(b, c)
    ca = value_lt(c, a)
    return (ab and bc) or (bc and ca) or (ca and ab)


def lt0(x: CircleElement, y: CircleElement) -> bool:
    """The linear order <_0 on nonzero elements (0 sorts first)."""
    return value_lt(x, y)


def sort_lt0(items: Iterable[CircleElement]) -> list[CircleElement]:
    return sort_values(set(items))


def sort_values(items: Iterable[CircleElement]) -> list[CircleElement]:
    """Sort by value; floats decide unless two neighbours are too close."""
    out = sorted(items, key=_float_of)
    for x, y in zip(out, out[1:]):
        if y._f - x._f <= x._e + y._e:
            return sorted(out, key=value_key)
    return out


def _float_of(x: CircleElement) -> float:
    return x._f


# -- subgroups: division, torsion, density -----------------------------------

_FLAGS: dict = {}


def _flags(support: frozenset) -> tuple[bool, bool, bool]:
    hit = _FLAGS.get(support)
    if hit is None:
        hit = _FLAGS[support] = (Component.Q in support, Component.R2 in support,
                                 Component.R3 in support)
    return hit


def in_support(v: CircleElement, support: frozenset) -> bool:
    q, r2, r3 = _flags(support)
    if not q and v.a.denominator != 1:
        return False
    if not r2 and v.b:
        return False
    if not r3 and v.c:
        return False
    return True


def real_roots(v: CircleElement, n: int) -> list[CircleElement]:
    """All n solutions of n*x = v in C (unsorted)."""
    # (value(v) + j) / n already lies in [0, 1), so no reduction is needed
    b, c = v.b / n, v.c / n
    f, e = v._f, v._e / n + _REL
    out = []
    for j in range(n):
        obj = object.__new__(CircleElement)
        obj.a, obj.b, obj.c = (v.a + j) / n, b, c
        obj._f, obj._e, obj._h = (f + j) / n, e, None
        out.append(obj)
    return out


def nth_parts(v: CircleElement, n: int, support: frozenset) -> list[CircleElement]:
    """All solutions of n*x = v inside the subgroup with the given support.

    Supports without Q are torsion free, so the solution is unique; with Q
    every n-torsion translate of the componentwise quotient is a solution.
    """
    n = int(n)
    if n <= 0:
        raise ValueError("n must be a positive integer")
    if not in_support(v, support):
        raise ValueError(f"{v} is not in the subgroup {sorted(support)}")
    if _flags(support)[0]:
        # (value(v) + j) / n increases with j and 0 is the first root when v = 0
        return real_roots(v, n)
    return [CircleElement.normalize(ZERO, v.b / n, v.c / n)]


def torsion_elements(n: int, support: frozenset) -> list[CircleElement]:
    """The n-torsion subgroup {x : n*x = 0}, sorted by <_0."""
    return nth_parts(ZERO_ELEMENT, n, support)


class Arc:
    """Open orientation interval (lo, hi): points strictly counterclockwise
    from lo before reaching hi.  Empty when lo == hi."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: CircleElement, hi: CircleElement):
        self.lo = lo
        self.hi = hi

    def is_empty(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: CircleElement) -> bool:
        return orient(self.lo, x, self.hi)

    __contains__ = contains

    def lifted_bounds(self) -> tuple[RealCombo, RealCombo]:
        """Real bounds (L, H) with L in [0,1) and points of the arc having
        lifts in (L, H); H may exceed 1 when the arc wraps through 0."""
        lo = self.lo.value
        hi = self.hi.value
        if not value_lt(self.lo, self.hi):
            hi = RealCombo._raw(hi.a + 1, hi.b, hi.c)
        return lo, hi

    def __eq__(self, other) -> bool:
        return isinstance(other, Arc) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __repr__(self) -> str:
        return f"Arc({self.lo}, {self.hi})"


_GEN_PREFERENCE = (Component.Q, Component.R2, Component.R3)


def _gen_combo(comp: Component, t: Rat) -> RealCombo:
    if comp is Component.Q:
        return RealCombo._raw(t, ZERO, ZERO)
    if comp is Component.R2:
        return RealCombo._raw(ZERO, t, ZERO)
    return RealCombo._raw(ZERO, ZERO, t)


def simplest_rational(lo_cmp, hi_cmp, guess: float = 0.0) -> Rat:
    """Smallest-denominator rational strictly between two reals.

    The reals are only accessed through comparators: lo_cmp(p, q) returns the
    sign of p/q - lo, hi_cmp likewise for hi.  The smallest-denominator
    rational in a nonempty open interval is unique.
    """
    if lo_cmp(0, 1) > 0 and hi_cmp(0, 1) < 0:
        return ZERO
    # n = floor(lo): the last integer not above lo
    n = math.floor(guess) if math.isfinite(guess) else 0
    while lo_cmp(n, 1) > 0:
        n -= 1
    while lo_cmp(n + 1, 1) <= 0:
        n += 1
    if hi_cmp(n + 1, 1) < 0:
        if n + 1 > 0:
            return mpq(n + 1)
        # interval below 0: the integer nearest 0 is the largest one below hi
        m = n + 1
        while hi_cmp(m + 1, 1) < 0:
            m += 1
        return mpq(m)
    # no integer inside: Stern-Brocot descent between n and n + 1
    a, b, c, d = n, 1, n + 1, 1
    while True:
        p, q = a + c, b + d
        if lo_cmp(p, q) <= 0:
            k = 1
            while lo_cmp(a + 2 * k * c, b + 2 * k * d) <= 0:
                k *= 2
            lo_k, hi_k = k, 2 * k
            while hi_k - lo_k > 1:
                mid = (lo_k + hi_k) // 2
                if lo_cmp(a + mid * c, b + mid * d) <= 0:
                    lo_k = mid
                else:
                    hi_k = mid
            a, b = a + lo_k * c, b + lo_k * d
        elif hi_cmp(p, q) >= 0:
            k = 1
            while hi_cmp(c + 2 * k * a, d + 2 * k * b) >= 0:
                k *= 2
            lo_k, hi_k = k, 2 * k
            while hi_k - lo_k > 1:
                mid = (lo_k + hi_k) // 2
                if hi_cmp(c + mid * a, d + mid * b) >= 0:
                    lo_k = mid
                else:
                    hi_k = mid
            c, d = c + lo_k * a, d + lo_k * b
        else:
            return mpq(p, q)


def find_lift_in_interval(lo: RealCombo, hi: RealCombo, support: frozenset,
                          shift: Optional[CircleElement] = None) -> CircleElement:
    """Deterministic point of (shift + subgroup) whose lift shift + t*gen lies
    strictly between the reals lo and hi; t is the smallest-denominator
    rational that works and gen the first generator line in the support."""
    if sign(hi - lo) <= 0:
        raise ValueError("empty target window")
    comp = next(c for c in _GEN_PREFERENCE if c in support)
    base = shift.value if shift is not None else RealCombo()
    d_lo = lo - base
    d_hi = hi - base

    def make_cmp(target: RealCombo):
        def cmp(p: int, q: int) -> int:
            return sign(_gen_combo(comp, mpq(p, q)) - target)
        return cmp

    scale = {Component.Q: 1.0, Component.R2: _SQRT2, Component.R3: _SQRT3}[comp]
    guess = float(d_lo) / scale
    t = simplest_rational(make_cmp(d_lo), make_cmp(d_hi), guess)
    return CircleElement.from_combo(base + _gen_combo(comp, t))


def _float_simplest(x: float, y: float, depth: int = 0) -> tuple[int, int]:
    """Simplest fraction p/q with x < p/q < y (floats, x < y), by continued
    fractions.  Only a candidate: callers verify it exactly."""
    n = math.floor(x)
    if n + 1 < y:
        return n + 1, 1
    if depth > 40:
        raise OverflowError("float continued fraction too deep")
    # x - n in [0, 1), y - n in (x - n, 1]
    lo = 1.0 / (y - n)
    hi = math.inf if x == n else 1.0 / (x - n)
    p, q = _float_simplest(lo, hi, depth + 1)
    return n * p + q, p


_GEN_FLOAT = {Component.Q: 1.0, Component.R2: _SQRT2, Component.R3: _SQRT3}


def sample_in_interval(lo: RealCombo, hi: RealCombo, support: frozenset,
                       shift: Optional[CircleElement] = None) -> CircleElement:
    """Some point of (shift + subgroup) with lift strictly between lo and hi.

    Faster than find_lift_in_interval: the search runs in floating point on
    the middle half of the window and the candidate is then checked exactly.
    The result is deterministic but not necessarily the smallest-denominator
    point.
    """
    comp = next(c for c in _GEN_PREFERENCE if c in support)
    base = shift.value if shift is not None else RealCombo()
    d_lo = lo - base
    d_hi = hi - base
    g = _GEN_FLOAT[comp]
    flo, elo = _approx(d_lo.a, d_lo.b, d_lo.c)
    fhi, ehi = _approx(d_hi.a, d_hi.b, d_hi.c)
    width = fhi - flo
    if width > 1e-9 * (1.0 + abs(flo)) and width > 4 * (elo + ehi):
        try:
            p, q = _float_simplest((flo + width / 4) / g, (fhi - width / 4) / g)
        except (OverflowError, ZeroDivisionError):
            p = None
        if p is not None:
            t = mpq(p, q)
            cand = base + _gen_combo(comp, t)
            if sign(cand - lo) > 0 and sign(hi - cand) > 0:
                return CircleElement.from_combo(cand)
    return find_lift_in_interval(lo, hi, support, shift)


def sample_in_arc(target: Arc, support: frozenset,
                  coset_shift: Optional[CircleElement] = None) -> CircleElement:
    """Fast deterministic element of (coset_shift + subgroup) in the open arc."""
    if target.is_empty():
        raise ValueError("empty arc")
    lo, hi = target.lifted_bounds()
    return sample_in_interval(lo, hi, support, coset_shift)


def find_in_arc(target: Arc, support: frozenset,
                coset_shift: Optional[CircleElement] = None) -> CircleElement:
    """Deterministic element of (coset_shift + subgroup) inside the open arc."""
    if target.is_empty():
        raise ValueError("empty arc")
    lo, hi = target.lifted_bounds()
    found = find_lift_in_interval(lo, hi, support, coset_shift)
    if not target.contains(found):  # pragma: no cover - guarded by construction
        raise AssertionError("find_in_arc produced a point outside the arc")
    return found


# -- text form of constants ---------------------------------------------------

def _fmt_rat(q: Rat) -> str:
    return str(q)


def format_combo(r: RealCombo) -> str:
    parts = []
    for coeff, suffix in ((r.a, ""), (r.b, "*r2"), (r.c, "*r3")):
        if not coeff:
            continue
        mag = abs(coeff)
        text = suffix[1:] if (suffix and mag == 1) else _fmt_rat(mag) + suffix
        if not parts:
            parts.append(("-" if coeff < 0 else "") + text)
        else:
            parts.append(("- " if coeff < 0 else "+ ") + text)
    return " ".join(parts) if parts else "0"


def format_constant(r: RealCombo) -> str:
    return f"c[{format_combo(r)}]"


_ADDEND = re.compile(r"\s*([+-])?\s*(\d+(?:/\d+)?)?\s*(\*?\s*(r2|r3))?\s*")


def parse_combo(text: str) -> RealCombo:
    """Parse 'a + b*r2 + c*r3' (any subset, any order) into a RealCombo."""
    s = text.strip()
    if not s:
        raise ValueError("empty constant")
    acc = [ZERO, ZERO, ZERO]
    pos = 0
    first = True
    while pos < len(s):
        m = _ADDEND.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad constant near {s[pos:]!r}")
        sgn, num, _, root = m.groups()
        if not first and sgn is None:
            raise ValueError(f"missing operator near {s[pos:]!r}")
        if num is None and root is None:
            raise ValueError(f"bad constant near {s[pos:]!r}")
        q = mpq(num) if num is not None else ONE
        if sgn == "-":
            q = -q
        idx = {None: 0, "r2": 1, "r3": 2}[root]
        acc[idx] += q
        pos = m.end()
        first = False
    return RealCombo(*acc)


def parse_element(text: str) -> CircleElement:
    """Parse 'c[...]' or a bare combination into a normalized element."""
    s = text.strip()
    if s.startswith("c[") and s.endswith("]"):
        s = s[2:-1]
    return CircleElement.from_combo(parse_combo(s))


def elements_sorted(items: Sequence[CircleElement]) -> list[CircleElement]:
    return sorted(items, key=value_key)
