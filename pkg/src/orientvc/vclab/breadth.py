"""Breadth of set families: every nonempty finite intersection should equal
the intersection of at most d of its members."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..circle import CircleElement
from ..formula import Eq, Formula, InV, Orient, Term, ZERO_TERM
from ..models import Model, PairDescriptor, random_element
from ..qe import solve as _solve  # module import: qe.solve itself imports region
from .region import Region, intersect_all, region_equal

FAMILIES = ("omega", "pair-omega")
PARAMS = ("y1", "y2")


def omega_formula(kind: str, ks: Sequence[int]) -> Formula:
    """x = k.y, O(0, x, k.y) or V(x + k.y)."""
    ky = Term({p: k for p, k in zip(PARAMS, ks) if k})
    x = Term.var("x")
    if kind == "point":
        return Eq(x, ky)
    if kind == "arc":
        return Orient(ZERO_TERM, x, ky)
    if kind == "coset":
        return InV(x + ky)
    raise ValueError(f"unknown omega kind {kind!r}")


@dataclass
class SetFamily:
    """Instances of a formula family with parameters drawn from a small
    pool, so that shared endpoints and shared cosets occur often."""

    name: str
    model: Model
    seed: int = 0
    kmax: int = 2
    pool_size: int = 4
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise ValueError(f"unknown family {self.name!r}; known: {FAMILIES}")
        if self.name == "pair-omega" and not isinstance(self.model, PairDescriptor):
            raise ValueError("pair-omega needs a pair model")
        self.rng = random.Random(self.seed)
        self.kinds = ("point", "arc", "arc") + (("coset", "coset") if self.name == "pair-omega" else ())

    def fresh_pool(self) -> list[CircleElement]:
        return [random_element(self.model, self.rng) for _ in range(self.pool_size)]

    def instance(self, pool: Sequence[CircleElement]) -> tuple[Formula, dict, Region]:
        rng = self.rng
        kind = rng.choice(self.kinds)
        ks = [rng.randint(-self.kmax, self.kmax) for _ in PARAMS]
        if not any(ks):
            ks[0] = 1
        phi = omega_formula(kind, ks)
        sigma = {p: rng.choice(pool) for p in PARAMS}
        key = (phi, tuple(sigma[p] for p in PARAMS))
        reg = self._cache.get(key)
        if reg is None:
            reg = self._cache[key] = _solve.solve_unary(phi, "x", self.model, sigma)
        return phi, sigma, reg


def minimal_cover(regions: Sequence[Region], d: int) -> Optional[tuple[int, ...]]:
    """Indices of at most d members with the same intersection as all of
    them, smallest first; None if there are none."""
    total = intersect_all(regions)
    for size in range(1, min(d, len(regions)) + 1):
        for idx in itertools.combinations(range(len(regions)), size):
            if region_equal(intersect_all(regions[i] for i in idx), total):
                return idx
    return None


@dataclass
class BreadthReport:
    family: str
    model: str
    d: int
    m: int
    trials: int
    nonempty: int = 0
    violations: list = field(default_factory=list)
    needs: dict = field(default_factory=dict)
    exact_d_example: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {"family": self.family, "model": self.model, "d": self.d, "m": self.m,
                "trials": self.trials, "nonempty": self.nonempty,
                "violations": len(self.violations),
                "violation_examples": self.violations[:3],
                "cover_sizes": {str(k): v for k, v in sorted(self.needs.items())},
                "exact_d_example": self.exact_d_example, "ok": self.ok}


def breadth_check(family: SetFamily, d: int, m: int = 6, trials: int = 1000,
                  max_attempts: int = 50) -> BreadthReport:
    """Sample subfamilies of 2..m members until `trials` of them have a
    nonempty intersection, and check each of those against breadth d."""
    rep = BreadthReport(family.name, str(family.model), d, m, trials)
    rng = family.rng
    attempts = 0
    while rep.nonempty < trials:
        attempts += 1
        if attempts > trials * max_attempts:
            raise RuntimeError("the family rarely has nonempty intersections")
        pool = family.fresh_pool()
        size = rng.randint(2, m)
        inst = [family.instance(pool) for _ in range(size)]
        regions = [r for _, _, r in inst]
        if intersect_all(regions).is_empty():
            continue
        rep.nonempty += 1
        cover = minimal_cover(regions, max(d, m))
        need = len(cover) if cover else None
        rep.needs[need] = rep.needs.get(need, 0) + 1
        if need is None or need > d:
            rep.violations.append([f"{phi} @ {_fmt_sigma(s)}" for phi, s, _ in inst])
        elif need == d and d > 1 and rep.exact_d_example is None:
            rep.exact_d_example = {
                "members": [f"{phi} @ {_fmt_sigma(s)}" for phi, s, _ in inst],
                "intersection": str(intersect_all(regions)),
                "cover": list(cover)}
    return rep


def check_regions(regions: Sequence[Region], d: int) -> Optional[tuple[int, ...]]:
    """Breadth-d certificate for one explicit list (None: violation)."""
    if intersect_all(regions).is_empty():
        return ()
    return minimal_cover(regions, d)


def _fmt_sigma(s: dict) -> str:
    return ", ".join(f"{k}={v}" for k, v in sorted(s.items()))
