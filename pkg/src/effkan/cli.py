"""Command-line driver: load an instance, validate it, compute lifts, run checkers.

Exit codes: 0 success, 1 violations or failed checks, 2 bad input or refusal.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass
from math import comb

from . import awfs, kan, salg
from .sieve import HornSpec, SieveError

DEFAULT_CAP = 1_000_000
CHECKS = ("kan", "dp", "symmetric", "effective", "dsquares", "facesquares")


class UsageError(Exception):
    """Bad configuration; reported with exit code 2."""


@dataclass
class Instance:
    label: str
    alpha: salg.SimplicialMap
    beta: salg.DegeneracySection

    @property
    def X(self) -> salg.TruncatedSimplicialSet:
        return self.alpha.source


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def load_simplicial_set(path: str, check: bool = True) -> salg.TruncatedSimplicialSet:
    try:
        return salg.TruncatedSimplicialSet.from_json(_read_json(path), check=check)
    except salg.StructureError as exc:
        raise UsageError(str(exc)) from exc


def load_instance(spec: str | None, truncation: int, check: bool = True) -> Instance:
    """``constant:<algebra>``, ``nerve:<group>``, ``nerve-proj:<A>,<B>`` or a JSON path."""
    if spec is None:
        raise UsageError("no instance: pass --generator or an input file")
    kind, _, arg = spec.partition(":")
    try:
        if kind == "constant":
            X = salg.constant_algebra(salg.builtin_algebra(arg), truncation)
        elif kind == "nerve":
            X = salg.nerve_abelian(salg.parse_group(arg), truncation)
        elif kind == "nerve-proj":
            a, _, b = arg.partition(",")
            if not b:
                raise UsageError("nerve-proj expects two groups, e.g. nerve-proj:Z2,Z2")
            alpha, beta = salg.nerve_projection(salg.parse_group(a), salg.parse_group(b), truncation)
            return Instance(spec, alpha, beta)
        else:
            path = arg if kind == "file" else spec
            if not os.path.exists(path):
                raise UsageError(f"unknown generator {spec!r}")
            X = load_simplicial_set(path, check)
    except (ValueError, salg.StructureError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"cannot build {spec!r}: {exc}") from exc
    beta = salg.section_from_point(X)
    return Instance(spec, beta.alpha, beta)


def choose_lift(inst: Instance, which: str) -> kan.LiftAssignment:
    if not (inst.X.has_malcev and inst.alpha.target.has_malcev):
        raise UsageError("the instance carries no Malcev operation, so there is no builtin lift")
    base = kan.malcev_assignment(inst.alpha, inst.beta)
    if which == "dp":
        return kan.degenerate_preferring_assignment(inst.alpha, base)
    return base


def _emit(args, payload: dict, text_lines: list[str]):
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print("\n".join(text_lines))


# --- commands ----------------------------------------------------------------------------

def cmd_validate(args) -> int:
    inst = load_instance(args.input or args.generator, args.truncation, check=False)
    report = salg.validate(inst.X)
    reports = {"simplicial-set": report}
    Y = inst.alpha.target
    if any(Y.size(n) > 1 for n in range(Y.N + 1)):
        reports["map"] = inst.alpha.validate()
        reports["section"] = inst.beta.validate()
    if args.emit:
        with open(args.emit, "w", encoding="utf-8") as fh:
            json.dump(inst.X.to_json(), fh, sort_keys=True)
    ok = all(r.ok for r in reports.values())
    lines = [f"{inst.label}: {'valid' if ok else 'INVALID'}"]
    for name, r in reports.items():
        lines.append(f"  {name}: {r.checked} instances, {len(r.violations)} violations")
        lines.extend(f"    {v}" for v in r.violations[:50])
    _emit(args, {"instance": inst.label, "ok": ok,
                 "reports": {k: r.to_json() for k, r in reports.items()}}, lines)
    return 0 if ok else 1


def _parse_facets(items) -> dict:
    out = {}
    for item in items or []:
        k, sep, v = item.partition("=")
        if not sep or not k.strip().isdigit():
            raise UsageError(f"facet must look like k=name, got {item!r}")
        out[int(k)] = v
    return out


def cmd_lift(args) -> int:
    inst = load_instance(args.input or args.generator, args.truncation)
    try:
        n, m = (int(t) for t in args.horn.split(","))
        spec = HornSpec(n, m)
    except (ValueError, SieveError) as exc:
        raise UsageError(f"bad --horn {args.horn!r}: {exc}") from exc
    facets = _parse_facets(args.facet)
    if set(facets) != set(range(n + 1)) - {m}:
        raise UsageError(f"horn {spec} needs facets {sorted(set(range(n + 1)) - {m})}, got {sorted(facets)}")
    lift = choose_lift(inst, args.lift)
    X = inst.X
    try:
        p = kan.make_problem(inst.alpha, n, m, facets, args.y)
    except (KeyError, salg.StructureError) as exc:
        raise UsageError(f"unknown element name: {exc}") from exc
    except salg.TruncationError as exc:
        raise UsageError(str(exc)) from exc
    except kan.LiftingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    h = lift(p)
    payload = {"instance": inst.label, "problem": p.encode(), "filler": X.name(n, h),
               "solves": kan.solves(p, h)}
    lines = [f"filler: {X.name(n, h)}"]
    if args.trace:
        trace = kan.trace_malcev(inst.alpha, inst.beta, p)
        payload["trace"] = [{"k": k, "w": X.name(n, w)} for k, w in trace]
        lines += [f"  w_{k} = {X.name(n, w)}" for k, w in trace]
    _emit(args, payload, lines)
    return 0 if payload["solves"] else 1


def _resolve_maxdim(args, inst: Instance, prop: str) -> int:
    headroom = 1 if prop in ("symmetric", "effective") else 0
    top = inst.X.N - headroom
    maxdim = args.maxdim if args.maxdim is not None else min(3, top)
    if maxdim < 1:
        raise UsageError(f"maxdim must be at least 1 (truncation {inst.X.N} is too small for {prop})")
    if maxdim > top:
        raise UsageError(f"maxdim {maxdim} needs truncation {maxdim + headroom}, instance has {inst.X.N}")
    return maxdim


def expected_dsquare_count(inst: Instance, maxdim: int) -> int:
    """Non-identity epis ``[n] -> [b]`` times horns times ``z`` in ``X_b``."""
    X = inst.X
    return sum(comb(n, b) * (n + 1) * X.size(b) for n in range(1, maxdim + 1) for b in range(n))


def face_square_targets(maxdim: int):
    """Sequences of length at most 2 over ``Delta^b``, ``b <= min(maxdim, 2)``, plus the
    standard horn sequences up to ``maxdim``."""
    seen = set()
    for tau in awfs._short_sequences(1, min(maxdim, 2), 2):
        if len(tau) and tau not in seen:
            seen.add(tau)
            yield tau
    for n in range(3, maxdim + 1):
        for m in range(n + 1):
            yield awfs.horn_sequence(HornSpec(n, m))


def run_check(inst: Instance, prop: str, maxdim: int, lift: kan.LiftAssignment, cap: int,
              seed: int | None, jobs: int) -> tuple[kan.CheckReport, dict]:
    alpha = inst.alpha
    meta: dict = {"instance": inst.label, "property": prop, "maxdim": maxdim, "sampled": False}
    problems = None
    if prop in ("kan", "dp", "symmetric", "effective"):
        estimate = kan.estimate_problem_count(alpha, maxdim)
        meta["estimated_problems"] = estimate
        if estimate > cap:
            if seed is None:
                raise UsageError(f"refusing exhaustive sweep: about {estimate} problems exceeds --cap {cap}; "
                                 "raise --cap or pass --seed to sample")
            problems = kan.sample_problems(alpha, maxdim, cap, random.Random(seed))
            meta.update(sampled=True, seed=seed, sample_size=len(problems))
    elif prop == "dsquares" and expected_dsquare_count(inst, maxdim) > cap:
        raise UsageError(f"refusing: {expected_dsquare_count(inst, maxdim)} squares exceeds --cap {cap}")

    if prop == "kan":
        report = kan.check_lifts(alpha, lift, maxdim, jobs, problems=problems)
        expected = kan.expected_problem_count(alpha, maxdim) if problems is None else len(problems)
    elif prop == "dp":
        report = kan.check_degenerate_preferring(alpha, lift, maxdim, jobs, problems=problems)
        expected = kan.expected_problem_count(alpha, maxdim) if problems is None else len(problems)
    elif prop == "symmetric":
        report = kan.check_symmetric_effective(alpha, lift, maxdim, jobs, problems=problems)
        expected = kan.expected_symmetric_count(alpha, maxdim) if problems is None else None
    elif prop == "effective":
        signed = kan.SignedLiftAssignment.duplicated(lift)
        report = kan.check_effective(alpha, signed, maxdim, jobs, problems=problems)
        expected = kan.expected_effective_count(alpha, maxdim) if problems is None else None
    elif prop == "dsquares":
        report = awfs.check_D_squares(alpha, lift, maxdim)
        expected = expected_dsquare_count(inst, maxdim)
    else:
        targets = list(face_square_targets(maxdim))
        report = awfs.sweep_face_squares(lift, targets)
        expected = sum(awfs.count_square_instances_bruteforce(alpha, sq)
                       for tau in targets for i in range(tau.ambient + 1)
                       for sq in awfs.face_squares(tau, i))
    report.expected_instances = expected
    return report, meta


def cmd_check(args) -> int:
    inst = load_instance(args.input or args.generator, args.truncation)
    prop = args.property
    maxdim = _resolve_maxdim(args, inst, prop)
    lift = choose_lift(inst, args.lift)
    report, meta = run_check(inst, prop, maxdim, lift, args.cap, args.seed, args.jobs)
    payload = {**meta, **report.to_json(), "ok": report.ok}
    lines = [report.summary()]
    if report.expected_instances is not None:
        lines.append(f"  expected instances: {report.expected_instances}")
    if meta["sampled"]:
        lines.append(f"  sampled {meta['sample_size']} problems with seed {meta['seed']}")
    for f in payload["failures"][:20]:
        lines.append("  counterexample: " + json.dumps(f, sort_keys=True))
    _emit(args, payload, lines)
    return 0 if report.ok else 1


def cmd_awfs_decompose(args) -> int:
    if args.probe:
        amb = args.maxdim if args.maxdim is not None else 2
        found, missing = awfs.probe_decompositions(amb, 1, args.limit, args.words)
        payload = {"max_ambient": amb, "words": args.words, "decomposed": len(found),
                   "not_found": len(missing),
                   "not_found_examples": [sq.to_json() for sq in missing[:5]]}
        _emit(args, payload, [f"ambient <= {amb}, {args.words} words: {len(found)} decomposed, "
                              f"{len(missing)} not found"])
        return 0
    if not args.input:
        raise UsageError("awfs-decompose needs a square document or --probe")
    try:
        sq = awfs.SequenceSquare.from_json(_read_json(args.input))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad square document: {exc}") from exc
    res = awfs.decompose_horizontal(sq, args.limit, args.words)
    if isinstance(res, awfs.NotFound):
        _emit(args, {"status": "not_found", "reason": res.reason}, [f"not found: {res.reason}"])
        return 0
    payload = {"status": "found", "squares": [p.to_json() for p in res]}
    lines = [f"found {len(res)} squares"]
    lines += [f"  {p.kind} over {list(p.f.values)}, reindex {list(p.mu)}" for p in res]
    _emit(args, payload, lines)
    return 0


def cmd_report(args) -> int:
    inst = load_instance(args.input or args.generator, args.truncation)
    vrep = salg.validate(inst.X)
    lift = choose_lift(inst, args.lift)
    results = {"validate": {"ok": vrep.ok, "checked": vrep.checked}}
    lines = [f"instance {inst.label} (truncation {inst.X.N})",
             f"validate: {'PASS' if vrep.ok else 'FAIL'} over {vrep.checked} instances"]
    ok = vrep.ok
    for prop in CHECKS:
        try:
            maxdim = _resolve_maxdim(args, inst, prop)
        except UsageError as exc:
            results[prop] = {"skipped": str(exc)}
            lines.append(f"{prop}: skipped ({exc})")
            continue
        report, meta = run_check(inst, prop, maxdim, lift, args.cap, args.seed, args.jobs)
        results[prop] = {**meta, **report.to_json(), "ok": report.ok}
        lines.append(report.summary())
        ok = ok and report.ok
    _emit(args, {"instance": inst.label, "ok": ok, "results": results}, lines)
    return 0 if ok else 1


# --- argument parsing ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--generator", help="constant:<alg> | nerve:<group> | nerve-proj:<A>,<B> | file:<path>")
    common.add_argument("--truncation", type=int, default=4)
    common.add_argument("--maxdim", type=int)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--trace", action="store_true")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int)
    common.add_argument("--lift", choices=("malcev", "dp"), default="malcev")

    parser = argparse.ArgumentParser(prog="effkan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("validate", parents=[common], help="check simplicial identities and Malcev laws")
    v.add_argument("--emit", help="write the instance as JSON to this path")
    v.set_defaults(func=cmd_validate)
    lf = sub.add_parser("lift", parents=[common], help="fill one horn")
    lf.add_argument("--horn", required=True, help="n,m")
    lf.add_argument("--facet", action="append", help="k=name, once per present face")
    lf.add_argument("--y", help="base simplex name (omit over a terminal base)")
    lf.set_defaults(func=cmd_lift)
    c = sub.add_parser("check", parents=[common], help="exhaustive property sweep")
    c.add_argument("property", choices=CHECKS)
    c.set_defaults(func=cmd_check)
    d = sub.add_parser("awfs-decompose", parents=[common], help="split a square into face/degeneracy squares")
    d.add_argument("--probe", action="store_true", help="search every small square instead")
    d.add_argument("--words", choices=("canonical", "minimal"), default="canonical")
    d.add_argument("--limit", type=int, default=200)
    d.set_defaults(func=cmd_awfs_decompose)
    r = sub.add_parser("report", parents=[common], help="validate and run every checker")
    r.set_defaults(func=cmd_report)
    for p in (v, lf, c, d, r):
        p.add_argument("input", nargs="?", help="JSON document (simplicial set, or a square for awfs-decompose)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1 or args.cap < 1:
        parser.error("--jobs and --cap must be positive")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (salg.TruncationError, kan.SignConstraintError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
