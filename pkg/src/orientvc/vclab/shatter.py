"""Traces of one-parameter formulas on finite sets, and shatter tables."""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from ..circle import CircleElement
from ..formula import (And, Formula, Term, free_vars, is_quantifier_free, parse_formula,
                       substitute)
from ..models import Model, PairDescriptor, eval as eval_qf, random_element
from ..qe import solve as _solve

SIGMA_TEXT = "O(y, x, 2*y) | V(x - y)"


class ShatterError(ValueError):
    pass


def sigma_formula() -> Formula:
    return parse_formula(SIGMA_TEXT)


def trace(phi: Formula, B: Sequence[CircleElement], y_value: CircleElement,
          pd: Model, x: str = "x", y: str = "y") -> frozenset:
    """Indices i with phi(B[i]; y_value)."""
    return frozenset(i for i, b in enumerate(B) if eval_qf(phi, {x: b, y: y_value}, pd))


def _instances(phi: Formula, B: Sequence[CircleElement], x: str) -> tuple[Formula, dict]:
    names = [f"_x{i}" for i in range(len(B))]
    body = And(tuple(substitute(phi, x, Term.var(n)) for n in names))
    return body, dict(zip(names, B))


def shatter_exact_unary(phi: Formula, B: Sequence[CircleElement], pd: Model,
                        x: str = "x", y: str = "y") -> set[frozenset]:
    """Every trace {b in B : phi(b; c)} over parameters c in the model.

    The parameter space is cut at the roots in y of every atom with x set to
    some b; one sample per cell (and per coset class in pairs) realizes every
    pattern of atom truth values, hence every trace.
    """
    if not is_quantifier_free(phi):
        raise ShatterError("exact traces need a quantifier-free formula")
    extra = free_vars(phi) - {x, y}
    if extra:
        raise ShatterError(f"exact traces take one parameter; also free: {sorted(extra)}")
    body, sigma = _instances(phi, B, x)
    return {trace(phi, B, c, pd, x, y) for c in _solve.cell_samples(body, y, sigma, pd)}


def sampled_traces(phi: Formula, B: Sequence[CircleElement], pd: Model,
                   samples: int, seed: int = 0, x: str = "x") -> set[frozenset]:
    """Traces seen at random parameter tuples (a lower bound)."""
    params = sorted(free_vars(phi) - {x})
    rng = random.Random(seed)
    out = set()
    for _ in range(samples):
        sigma = {p: random_element(pd, rng) for p in params}
        out.add(frozenset(i for i, b in enumerate(B)
                          if eval_qf(phi, {**sigma, x: b}, pd)))
    return out


def loglog_slope(ks: Sequence[int], counts: Sequence[int]) -> float:
    """Least-squares slope of log(count) against log(k)."""
    xs = [math.log(k) for k in ks]
    ys = [math.log(c) for c in counts]
    n = len(xs)
    if n < 2:
        raise ValueError("a slope needs two points")
    mx, my = sum(xs) / n, sum(ys) / n
    sxx = sum((a - mx) ** 2 for a in xs)
    sxy = sum((a - mx) * (b - my) for a, b in zip(xs, ys))
    return sxy / sxx


def binomial_lower(k: int) -> int:
    """1 + k + k(k-1)/2: subsets of size at most 2."""
    return 1 + k + k * (k - 1) // 2


@dataclass
class ShatterRow:
    k: int
    pi_k: int
    lower_bound: Optional[int]
    exact: bool

    def as_dict(self) -> dict:
        return {"k": self.k, "pi_k": self.pi_k, "lower_bound": self.lower_bound,
                "exact": self.exact}


@dataclass
class ShatterReport:
    formula: str
    model: str
    rows: list[ShatterRow] = field(default_factory=list)
    slope: Optional[float] = None
    vc_upper: int = 1
    slope_range: Optional[tuple[int, int]] = None

    def as_dict(self) -> dict:
        return {"formula": self.formula, "model": self.model,
                "rows": [r.as_dict() for r in self.rows],
                "slope": None if self.slope is None else round(self.slope, 6),
                "slope_range": list(self.slope_range) if self.slope_range else None,
                "vc_upper": self.vc_upper}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    TSV_COLUMNS = ("k", "pi_k", "lower_bound", "exact", "slope", "vc_upper")

    def to_tsv(self) -> str:
        lines = ["\t".join(self.TSV_COLUMNS)]
        slope = "" if self.slope is None else f"{self.slope:.6f}"
        for r in self.rows:
            lb = "" if r.lower_bound is None else str(r.lower_bound)
            lines.append("\t".join((str(r.k), str(r.pi_k), lb, str(r.exact).lower(),
                                    slope, str(self.vc_upper))))
        return "\n".join(lines) + "\n"


def random_basis(pd: Model, k: int, seed: int = 0) -> list[CircleElement]:
    """k distinct nonzero elements."""
    rng = random.Random(seed * 7919 + k)
    out: list[CircleElement] = []
    while len(out) < k:
        v = random_element(pd, rng)
        if not v.is_zero() and v not in out:
            out.append(v)
    return out


def shatter_report(phi: Formula, k_range: Sequence[int], pd: Model,
                   basis: Optional[Callable[[int], Sequence[CircleElement]]] = None,
                   lower_bound: Optional[Callable[[int], int]] = None,
                   samples: int = 2000, seed: int = 0,
                   slope_range: Optional[tuple[int, int]] = None,
                   x: str = "x", y: str = "y") -> ShatterReport:
    """Trace counts on one k-set per k, the log-log slope over the exact rows
    (restricted to slope_range when given) and the theoretical bound d*|y|."""
    basis = basis or (lambda k: random_basis(pd, k, seed))
    params = sorted(free_vars(phi) - {x})
    d = 2 if isinstance(pd, PairDescriptor) else 1
    rep = ShatterReport(formula=str(phi), model=str(pd), vc_upper=d * max(1, len(params)),
                        slope_range=slope_range)
    for k in k_range:
        B = list(basis(k))
        lb = lower_bound(k) if lower_bound else None
        if params == [y]:
            traces = shatter_exact_unary(phi, B, pd, x, y)
            exact = True
        else:
            traces = sampled_traces(phi, B, pd, samples, seed, x)
            exact = False
        rep.rows.append(ShatterRow(k, len(traces), lb, exact))
    use = [r for r in rep.rows if r.exact and
           (slope_range is None or slope_range[0] <= r.k <= slope_range[1])]
    if len(use) >= 2:
        rep.slope = loglog_slope([r.k for r in use], [r.pi_k for r in use])
    return rep
