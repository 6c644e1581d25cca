"""Explicit witnesses: a k-set on which sigma cuts out every subset of size at
most two, and depth-two ict patterns for O(y, x, 2y) and V(x - y)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from gmpy2 import mpq

from ..circle import (Arc, CircleElement, Component, element, find_in_arc,
                      in_support, orient)
from ..formula import parse_formula
from ..models import PairDescriptor, eval as eval_qf
from .shatter import binomial_lower, sigma_formula, trace

PHI_TEXT = "O(y, x, 2*y)"
PSI_TEXT = "V(x - y)"

# ict sequence: alpha_i = ALPHA0 * RATIO**i, so alpha_39 = 1/3 and 2 alpha_39 < 1
RATIO = mpq(3, 2)
ALPHA0 = mpq(1, 3) * mpq(2, 3) ** 39
ICT_MAX_N = 40


def _outside(pd: PairDescriptor, t) -> CircleElement:
    """t times the generator of the first ambient line missing from G."""
    comp = pd.outside_component()
    t = mpq(t)
    return element(t if comp is Component.Q else 0,
                   t if comp is Component.R2 else 0,
                   t if comp is Component.R3 else 0)


def _point(q) -> CircleElement:
    return element(mpq(q))


def _near(pd: PairDescriptor, target, rel, shift: CircleElement) -> CircleElement:
    """An element of shift + G within a relative distance rel of target."""
    target = mpq(target)
    window = Arc(_point(target * (1 - rel)), _point(target * (1 + rel)))
    return find_in_arc(window, pd.sub.support, shift)


def _half(x: CircleElement) -> CircleElement:
    return CircleElement.from_combo(x.value.scale(mpq(1, 2)))


def _require_pair(pd) -> None:
    if not isinstance(pd, PairDescriptor):
        raise TypeError("the construction needs a pair model")


# -- sharpness ---------------------------------------------------------------

@dataclass
class SharpnessReport:
    k: int
    lower_bound: int
    distinct_traces: int
    verified: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.distinct_traces >= self.lower_bound

    def as_dict(self) -> dict:
        return {"k": self.k, "lower_bound": self.lower_bound,
                "distinct_traces": self.distinct_traces, "verified": self.verified,
                "failures": self.failures, "ok": self.ok}


def sharpness_basis(k: int, pd: PairDescriptor) -> list[CircleElement]:
    """x_1..x_k near 3^i / 3^(k+1), with x_i in the coset of (i/1000) * gen."""
    _require_pair(pd)
    if k < 2:
        raise ValueError("k must be at least 2")
    return [_near(pd, mpq(3 ** i, 3 ** (k + 1)), mpq(1, 10), _outside(pd, mpq(i, 1000)))
            for i in range(1, k + 1)]


def build_sharpness_instance(k: int, pd: PairDescriptor):
    """(B, alphas, report): alphas maps a target subset (as a sorted tuple of
    indices into B) to a parameter whose sigma-trace on B is that subset."""
    B = sharpness_basis(k, pd)
    sub = pd.sub.support
    alphas: dict[tuple, CircleElement] = {}
    for i in range(k):
        alphas[(i,)] = B[i]
        lo = _half(B[i])
        if i > 0 and orient(element(), lo, B[i - 1]):
            lo = B[i - 1]
        window = Arc(lo, B[i])
        for j in range(k):
            if j != i:
                alphas[tuple(sorted((i, j)))] = find_in_arc(window, sub, B[j])
    # (alpha, 2 alpha) misses B and alpha lies in no coset of B
    alphas[()] = find_in_arc(Arc(_point(mpq(2, 5)), _point(mpq(9, 20))), sub,
                             _outside(pd, mpq(1, 1009)))

    phi = sigma_formula()
    seen = set()
    failures = []
    for want, a in alphas.items():
        got = trace(phi, B, a, pd)
        if got != frozenset(want):
            failures.append({"target": list(want), "got": sorted(got)})
        seen.add(got)
    report = SharpnessReport(k=k, lower_bound=binomial_lower(k), distinct_traces=len(seen),
                             verified=len(alphas) - len(failures), failures=failures)
    return B, alphas, report


# -- ict patterns ------------------------------------------------------------

@dataclass
class IctPattern:
    alphas: list
    betas: list
    i: int
    j: int
    witness: CircleElement
    checks: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {"i": self.i, "j": self.j, "witness": str(self.witness),
                "checks": self.checks, "failures": self.failures, "ok": self.ok}


def ict_sequence(n: int, pd: PairDescriptor) -> list[CircleElement]:
    """alpha_0..alpha_{n-1}: geometric targets, pairwise distinct modulo G."""
    _require_pair(pd)
    if not 1 <= n <= ICT_MAX_N:
        raise ValueError(f"n must lie in 1..{ICT_MAX_N} with the default alpha_0")
    return [_near(pd, ALPHA0 * RATIO ** i, mpq(1, 10 ** 4), _outside(pd, mpq(i, 1000)))
            for i in range(n)]


def build_ict_pattern(n: int, i: int, j: int, pd: PairDescriptor,
                      alphas: Optional[list] = None) -> IctPattern:
    """c with phi(c; alpha_i), psi(c; alpha_j) and no other row true."""
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError("indices out of range")
    alphas = alphas if alphas is not None else ict_sequence(n, pd)
    betas = list(alphas)
    # window inside (alpha_i, 2 alpha_i) and outside every other arc
    lo = alphas[i] if i == 0 else alphas[i - 1] + alphas[i - 1]
    hi = alphas[i] + alphas[i] if i == n - 1 else alphas[i + 1]
    c = find_in_arc(Arc(lo, hi), pd.sub.support, betas[j])
    phi, psi = parse_formula(PHI_TEXT), parse_formula(PSI_TEXT)
    failures = []
    for k, a in enumerate(alphas):
        if eval_qf(phi, {"x": c, "y": a}, pd) != (k == i):
            failures.append(f"phi row {k}")
    for l, b in enumerate(betas):
        if eval_qf(psi, {"x": c, "y": b}, pd) != (l == j):
            failures.append(f"psi row {l}")
    if not in_support(c, pd.ambient.support):  # pragma: no cover
        failures.append("witness outside the model")
    return IctPattern(alphas, betas, i, j, c, 2 * n, failures)


def ict_table(n: int, pd: PairDescriptor) -> list[IctPattern]:
    alphas = ict_sequence(n, pd)
    return [build_ict_pattern(n, i, j, pd, alphas) for i in range(n) for j in range(n)]
