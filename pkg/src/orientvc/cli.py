"""Command-line front end.

Every command builds a report with the same top-level keys (command, config,
result, timing, verifications, ok) and prints it as text, JSON or TSV.  The
exit status is 0 iff every embedded verification passed, 1 if one failed and
2 for usage, parse and range errors.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from typing import Optional

from .circle import CircleElement, parse_element
from .formula import (Exists, Formula, LanguageError, ParseError, TheoryId,
                      format_formula, free_vars, is_quantifier_free, parse_formula)
from .models import (GroupDescriptor, InvalidPairError, Model, PairDescriptor,
                     canonical_model, elementarily_equivalent, eval as eval_qf,
                     invariants, parse_model, theory_of_model)

KMAX_LIMIT = 16
DEFAULTS = {"samples": 200, "trials": 1000, "kmax": 12, "seed": 0}


class UsageError(ValueError):
    pass


# -- argument helpers --------------------------------------------------------

def parse_assignment(text: Optional[str]) -> dict[str, CircleElement]:
    """'y=c[1/4], z=1/2 + r2' -> {'y': ..., 'z': ...}."""
    out: dict[str, CircleElement] = {}
    if not text:
        return out
    for item in text.replace(";", ",").split(","):
        if not item.strip():
            continue
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"bad assignment item {item.strip()!r}; use name=value")
        try:
            out[name.strip()] = parse_element(value)
        except ValueError as exc:
            raise UsageError(f"bad value for {name.strip()}: {exc}") from None
    return out


def _model(args, need_pair: bool = False) -> tuple[Model, TheoryId]:
    try:
        if getattr(args, "pair", None):
            m = parse_model(args.pair)
            if not isinstance(m, PairDescriptor):
                raise UsageError(f"--pair needs '(A=..., G=...)', got {args.pair!r}")
        elif getattr(args, "group", None):
            m = parse_model(args.group)
        elif getattr(args, "theory", None):
            m = canonical_model(TheoryId.parse(args.theory))
        else:
            raise UsageError("give --theory, --pair or --group")
    except (InvalidPairError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(str(exc)) from None
    if need_pair and not isinstance(m, PairDescriptor):
        raise UsageError("this command needs a pair model")
    return m, theory_of_model(m)


def _formula_text(args) -> str:
    text = args.formula_opt or args.formula
    if not text:
        raise UsageError("no formula given")
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            text = fh.read()
    return text.strip()


def _parse(args, theory: TheoryId) -> Formula:
    return parse_formula(_formula_text(args), theory)


def _config(args) -> dict:
    skip = {"func", "format", "out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


# -- commands ----------------------------------------------------------------

def cmd_qe(args) -> dict:
    from .qe import eliminate
    from .qe.generator import AssignmentGenerator
    from .qe.oracle import Oracle
    m, theory = _model(args)
    f = _parse(args, theory)
    res = eliminate(f, theory)
    out = {"input": format_formula(f), "output": format_formula(res.output),
           "stats": {k: v for k, v in res.stats.as_dict().items() if k != "elapsed_s"}}
    checks = {"quantifier_free": is_quantifier_free(res.output),
              "free_vars_contained": free_vars(res.output) <= free_vars(f)}
    if args.verify:
        ag = AssignmentGenerator(m, seed=args.seed)
        orc = Oracle(m)
        bad = []
        for _ in range(args.samples):
            s = ag.assignment(free_vars(f))
            if eval_qf(res.output, s, m) != orc.decide(f, s):
                bad.append({k: str(v) for k, v in s.items()})
        out["oracle_disagreements"] = bad[:5]
        checks["oracle_agreement"] = not bad
    return {"result": out, "verifications": checks,
            "text": format_formula(res.output)}


def cmd_decide(args) -> dict:
    from .qe import decide_sentence
    m, theory = _model(args)
    f = _parse(args, theory)
    if free_vars(f):
        raise UsageError(f"not a sentence; free variables {sorted(free_vars(f))}")
    value = decide_sentence(f, theory)
    checks = {}
    if args.verify:
        from .qe.oracle import Oracle
        checks["oracle_agreement"] = Oracle(m).decide(f, {}) == value
    return {"result": {"sentence": format_formula(f), "value": value},
            "verifications": checks, "text": "true" if value else "false"}


def cmd_eval(args) -> dict:
    from .qe import eliminate
    from .qe.oracle import Oracle
    m, theory = _model(args)
    f = _parse(args, theory)
    sigma = parse_assignment(args.assign)
    missing = free_vars(f) - set(sigma)
    if missing:
        raise UsageError(f"no value for {sorted(missing)}")
    for k, v in sigma.items():
        if not m.contains(v):
            raise UsageError(f"{k}={v} is not an element of {m}")
    checks = {}
    if is_quantifier_free(f):
        value = eval_qf(f, sigma, m)
    else:
        value = eval_qf(eliminate(f, theory).output, sigma, m)
        if args.verify:
            checks["oracle_agreement"] = Oracle(m).decide(f, sigma) == value
    return {"result": {"formula": format_formula(f), "value": value},
            "verifications": checks, "text": "true" if value else "false"}


def cmd_solve(args) -> dict:
    from .qe.solve import cell_samples, solve_unary
    m, theory = _model(args)
    f = _parse(args, theory)
    sigma = parse_assignment(args.assign)
    free = free_vars(f) - set(sigma)
    var = args.var or (sorted(free)[0] if len(free) == 1 else None)
    if var is None or free - {var}:
        raise UsageError(f"need exactly one unassigned variable; unassigned: {sorted(free)}")
    region = solve_unary(f, var, m, sigma)
    checks = {}
    if args.verify:
        rng = random.Random(args.seed)
        from .models import random_element
        pts = cell_samples(f, var, sigma, m) + [random_element(m, rng) for _ in range(args.samples)]
        checks["membership_agrees"] = all(
            region.contains(p) == eval_qf(f, {**sigma, var: p}, m) for p in pts)
    return {"result": {"formula": format_formula(f), "variable": var,
                       "region": str(region), "empty": region.is_empty()},
            "verifications": checks, "text": str(region)}


def cmd_shatter(args) -> dict:
    from .vclab import (binomial_lower, sharpness_basis, shatter_report)
    m, theory = _model(args)
    f = _parse(args, theory)
    kmax = _kmax(args)
    basis = None
    lower = None
    if args.basis == "sharpness":
        if not isinstance(m, PairDescriptor):
            raise UsageError("the sharpness basis needs a pair model")
        basis = lambda k: sharpness_basis(k, m)  # noqa: E731
        lower = binomial_lower
    rep = shatter_report(f, range(2, kmax + 1), m, basis=basis, lower_bound=lower,
                         samples=args.samples, seed=args.seed,
                         slope_range=(min(4, kmax - 1), kmax))
    checks = {"trace_bounds": all(
        (r.lower_bound is None or r.lower_bound <= r.pi_k) and r.pi_k <= 2 ** r.k
        for r in rep.rows)}
    text = rep.to_tsv()
    return {"result": rep.as_dict(), "verifications": checks, "text": text, "tsv": text}


def cmd_breadth(args) -> dict:
    from .vclab import SetFamily, breadth_check
    m, theory = _model(args) if (args.theory or args.pair or args.group) else (None, None)
    family = args.family
    if m is None:
        theory = TheoryId.PAIR_TOR_TOR if family == "pair-omega" else TheoryId.DOG_TF
        m = canonical_model(theory)
    d = args.d if args.d is not None else (2 if family == "pair-omega" else 1)
    try:
        fam = SetFamily(family, m, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = breadth_check(fam, d, args.m, args.trials)
    checks = {"no_violations": rep.ok}
    return {"result": rep.as_dict(), "verifications": checks,
            "text": f"violations: {len(rep.violations)}"}


def cmd_sharpness(args) -> dict:
    from .vclab import build_sharpness_instance, shatter_exact_unary, sigma_formula
    m, _ = _model(args, need_pair=True)
    ks = [args.k] if args.k is not None else list(range(2, _kmax(args) + 1))
    rows, lines = [], []
    checks = {"lower_bound_met": True}
    for k in ks:
        if not 2 <= k <= KMAX_LIMIT:
            raise UsageError(f"k must lie in 2..{KMAX_LIMIT}")
        B, _alphas, rep = build_sharpness_instance(k, m)
        row = rep.as_dict()
        checks["lower_bound_met"] &= rep.ok
        if args.verify:
            row["exact_traces"] = len(shatter_exact_unary(sigma_formula(), B, m))
            checks["exact_count_at_least_constructed"] = (
                checks.get("exact_count_at_least_constructed", True)
                and row["exact_traces"] >= rep.distinct_traces)
        rows.append(row)
        prefix = f"k={k} " if len(ks) > 1 else ""
        lines.append(f"{prefix}traces ≥ {rep.lower_bound}: {'PASS' if rep.ok else 'FAIL'}")
    return {"result": {"rows": rows}, "verifications": checks, "text": "\n".join(lines)}


def cmd_ict(args) -> dict:
    from .vclab import ICT_MAX_N, build_ict_pattern, ict_sequence
    m, _ = _model(args, need_pair=True)
    n = args.n
    if not 1 <= n <= ICT_MAX_N:
        raise UsageError(f"n must lie in 1..{ICT_MAX_N}")
    alphas = ict_sequence(n, m)
    if args.i is not None or args.j is not None:
        if args.i is None or args.j is None:
            raise UsageError("give both --i and --j, or neither")
        if not (0 <= args.i < n and 0 <= args.j < n):
            raise UsageError("indices out of range")
        pairs = [(args.i, args.j)]
    else:
        pairs = [(i, j) for i in range(n) for j in range(n)]
    pats = [build_ict_pattern(n, i, j, m, alphas) for i, j in pairs]
    good = sum(p.ok for p in pats)
    result = {"n": n, "pairs": len(pats), "verified": good,
              "failures": [p.as_dict() for p in pats if not p.ok][:5]}
    if len(pats) == 1:
        result["witness"] = str(pats[0].witness)
    return {"result": result, "verifications": {"all_patterns_verified": good == len(pats)},
            "text": f"ict patterns verified: {good}/{len(pats)}"}


def cmd_classify(args) -> dict:
    texts = [t.strip() for t in (args.groups or "").split(",") if t.strip()]
    if not texts:
        raise UsageError("give --groups 'Q, r2Q, ...'")
    try:
        groups = [GroupDescriptor.parse(t) for t in texts]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    for g in groups:
        inv = invariants(g)
        rows.append({"group": str(g), "theory": theory_of_model(g).value,
                     "torsion_free": inv.is_torsion_free})
    table = [[elementarily_equivalent(a, b) for b in groups] for a in groups]
    width = max(len(str(g)) for g in groups)
    lines = [" " * width + "  " + "  ".join(str(g) for g in groups)]
    for g, row in zip(groups, table):
        cells = ["≡".center(len(str(h))) if e else "≢".center(len(str(h)))
                 for h, e in zip(groups, row)]
        lines.append(str(g).ljust(width) + "  " + "  ".join(cells))
    # the table must agree with the invariant-derived theory labels
    consistent = all(table[i][j] == (rows[i]["theory"] == rows[j]["theory"])
                     for i in range(len(groups)) for j in range(len(groups)))
    return {"result": {"groups": rows, "equivalent": table},
            "verifications": {"table_matches_invariants": consistent},
            "text": "\n".join(lines)}


def cmd_oracle_compare(args) -> dict:
    from .qe import eliminate
    from .qe.generator import AssignmentGenerator, FormulaGenerator
    from .qe.oracle import Oracle
    m, theory = _model(args)
    gen = FormulaGenerator(theory, seed=args.seed)
    ag = AssignmentGenerator(m, seed=args.seed + 1)
    orc = Oracle(m)
    checks = disagreements = not_qf = 0
    examples = []
    for _ in range(args.trials):
        f = gen.formula()
        out = eliminate(f, theory).output
        if not is_quantifier_free(out):
            not_qf += 1
        for _ in range(args.samples):
            s = ag.assignment(free_vars(f))
            checks += 1
            if eval_qf(out, s, m) != orc.decide(f, s):
                disagreements += 1
                if len(examples) < 5:
                    examples.append({"formula": format_formula(f),
                                     "assignment": {k: str(v) for k, v in s.items()}})
    return {"result": {"formulas": args.trials, "assignments_each": args.samples,
                       "checks": checks, "disagreements": disagreements,
                       "examples": examples},
            "verifications": {"outputs_quantifier_free": not_qf == 0,
                              "no_disagreements": disagreements == 0},
            "text": f"checks: {checks}  disagreements: {disagreements}"}


def _kmax(args) -> int:
    kmax = args.kmax if args.kmax is not None else DEFAULTS["kmax"]
    if not 2 <= kmax <= KMAX_LIMIT:
        raise UsageError(f"--kmax must lie in 2..{KMAX_LIMIT}")
    return kmax


COMMANDS = {
    "qe": (cmd_qe, "eliminate quantifiers"),
    "decide": (cmd_decide, "decide a sentence in a theory"),
    "eval": (cmd_eval, "evaluate a formula under an assignment"),
    "solve": (cmd_solve, "solution set of a one-variable formula"),
    "shatter": (cmd_shatter, "trace counts and log-log slope"),
    "breadth": (cmd_breadth, "breadth check over sampled intersections"),
    "sharpness": (cmd_sharpness, "k-set cut out in all subsets of size <= 2 by sigma"),
    "ict": (cmd_ict, "depth-two ict patterns"),
    "classify": (cmd_classify, "elementary equivalence of group descriptors"),
    "oracle-compare": (cmd_oracle_compare, "elimination versus witness search"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orientvc", description=__doc__.split("\n")[0])
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--theory", help="dog-tf, dog-tor, pair-tf-tf, pair-tor-tor, pair-tor-tf")
    shared.add_argument("--pair", help="pair descriptor, e.g. '(A=Q+r2Q,G=Q)'")
    shared.add_argument("--group", help="group descriptor, e.g. 'Q+r2Q'")
    shared.add_argument("-f", "--formula", dest="formula_opt",
                        help="formula text, or @file")
    shared.add_argument("--assign", help="assignment, e.g. 'y=c[1/4], z=c[r2]'")
    shared.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    shared.add_argument("--samples", type=int, default=DEFAULTS["samples"])
    shared.add_argument("--trials", type=int, default=DEFAULTS["trials"])
    shared.add_argument("--kmax", type=int)
    shared.add_argument("--format", choices=("text", "json", "tsv"), default="text")
    shared.add_argument("--out", help="write the report here instead of stdout")
    shared.add_argument("--verify", action="store_true", help="run the built-in self-checks")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (fn, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[shared], help=help_text)
        sp.add_argument("formula", nargs="?", help="formula text (or use -f)")
        sp.set_defaults(func=fn)
        if name == "solve":
            sp.add_argument("--var", help="the unknown (default: the only unassigned variable)")
        if name == "shatter":
            sp.add_argument("--basis", choices=("random", "sharpness"), default="random")
        if name == "breadth":
            sp.add_argument("--family", choices=("omega", "pair-omega"), default="omega")
            sp.add_argument("--d", type=int)
            sp.add_argument("--m", type=int, default=6)
        if name == "sharpness":
            sp.add_argument("--k", type=int)
        if name == "ict":
            sp.add_argument("--n", type=int, default=10)
            sp.add_argument("--i", type=int)
            sp.add_argument("--j", type=int)
        if name == "classify":
            sp.add_argument("--groups", help="comma separated descriptors")
    return p


def _render(report: dict, fmt: str, payload: dict) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True, default=str, ensure_ascii=False) + "\n"
    if fmt == "tsv":
        if "tsv" in payload:
            return payload["tsv"]
        lines = ["key\tvalue"]
        for k, v in sorted(report["result"].items()):
            lines.append(f"{k}\t{json.dumps(v, sort_keys=True, default=str)}")
        return "\n".join(lines) + "\n"
    lines = [payload.get("text", "").rstrip("\n")]
    for name, passed in sorted(report["verifications"].items()):
        lines.append(f"{name}: {'PASS' if passed else 'FAIL'}")
    return "\n".join(l for l in lines if l) + "\n"


def _error(msg: str) -> int:
    print(f"orientvc: error: {msg}", file=sys.stderr)
    return 2


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        payload = args.func(args)
    except ParseError as exc:
        if exc.text:
            print(f"  {exc.text}\n  {' ' * exc.position}^", file=sys.stderr)
        return _error(str(exc))
    except (UsageError, LanguageError, OSError) as exc:
        return _error(str(exc))
    elapsed = time.perf_counter() - t0
    checks = payload["verifications"]
    report = {"command": args.command, "config": _config(args),
              "result": payload["result"], "timing": {"elapsed_s": round(elapsed, 6)},
              "verifications": checks, "ok": all(checks.values())}
    text = _render(report, args.format, payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report["ok"] else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
