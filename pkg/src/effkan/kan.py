"""Horn lifting problems, the Malcev filler, and Kan-structure checkers.

A lifting problem against ``Lambda^n_m -> Delta^n`` for ``alpha: X -> Y`` is
a tuple of facets ``x_k`` in ``X_{n-1}`` (``k != m``) together with ``y`` in
``Y_n``.  Lift assignments are memoised functions of the canonical problem
key ``(n, m, facets, y)``, so two assignments can be compared extensionally.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Iterator

import numpy as np

from .delta import MonotoneMap, compose, degeneracy_map, face_map
from .salg import DegeneracySection, SimplicialMap, StructureError, TruncationError
from .sieve import HornSpec


class LiftingError(ValueError):
    pass


class SignConstraintError(LiftingError):
    pass


# --- horn maps and problems -------------------------------------------------------

@dataclass(frozen=True)
class HornMap:
    spec: HornSpec
    facets: tuple  # entry k is x_k in X_{n-1}; None at the missing index m
    X: object = field(compare=False, hash=False, repr=False, default=None)

    def __post_init__(self):
        n, m = self.spec.n, self.spec.m
        if len(self.facets) != n + 1:
            raise LiftingError(f"horn {self.spec} needs {n + 1} facet slots")
        if self.facets[m] is not None:
            raise LiftingError(f"facet {m} must be empty for horn {self.spec}")
        if any(self.facets[k] is None for k in range(n + 1) if k != m):
            raise LiftingError("missing facet")

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def m(self) -> int:
        return self.spec.m

    def compatibility_violations(self) -> list[str]:
        X, n, m = self.X, self.n, self.m
        out = []
        if n < 2:
            return out
        for k in range(n + 1):
            for l in range(k + 1, n + 1):
                if m in (k, l):
                    continue
                if X.face(n - 1, k, self.facets[l]) != X.face(n - 1, l - 1, self.facets[k]):
                    out.append(f"x_{l} d_{k} != x_{k} d_{l - 1}")
        return out

    def evaluate(self, f: MonotoneMap) -> int:
        """The value of the horn map on a simplex ``f: [r] -> [n]`` lying in the horn."""
        if f.cod != self.n:
            raise LiftingError("simplex does not land in Delta^n")
        for k in range(self.n + 1):
            if k != self.m and k not in f.image:
                inner = MonotoneMap(f.dom, self.n - 1, tuple(v if v < k else v - 1 for v in f.values))
                return self.X.act(self.facets[k], inner)
        raise LiftingError(f"simplex {f.values} is not in the horn {self.spec}")


@dataclass(frozen=True)
class LiftingProblem:
    alpha: SimplicialMap = field(compare=False, hash=False, repr=False)
    horn: HornMap
    y: int

    @property
    def n(self) -> int:
        return self.horn.n

    @property
    def m(self) -> int:
        return self.horn.m

    @property
    def key(self) -> tuple:
        return (self.n, self.m, tuple(None if x is None else int(x) for x in self.horn.facets), int(self.y))

    def violations(self) -> list[str]:
        out = self.horn.compatibility_violations()
        Y, a = self.alpha.target, self.alpha.components
        for k in range(self.n + 1):
            if k != self.m and a[self.n - 1][self.horn.facets[k]] != Y.face(self.n, k, self.y):
                out.append(f"alpha(x_{k}) != y d_{k}")
        return out

    def encode(self) -> dict:
        X, Y = self.alpha.source, self.alpha.target
        return {
            "horn": [self.n, self.m],
            "facets": {str(k): X.name(self.n - 1, int(x))
                       for k, x in enumerate(self.horn.facets) if x is not None},
            "y": Y.name(self.n, int(self.y)),
        }


def make_problem(alpha: SimplicialMap, n: int, m: int, facets: dict, y=None) -> LiftingProblem:
    """Build and check a problem; facets/``y`` may be element names or indices."""
    X, Y = alpha.source, alpha.target
    if n > X.N:
        raise TruncationError(f"dimension {n} exceeds truncation {X.N}")
    spec = HornSpec(n, m)
    slots = [None] * (n + 1)
    for k, v in facets.items():
        slots[int(k)] = X.index(n - 1, v) if isinstance(v, str) else int(v)
    if y is None:
        if Y.size(n) != 1:
            raise LiftingError("y must be given unless the base is terminal")
        y = 0
    elif isinstance(y, str):
        y = Y.index(n, y)
    p = LiftingProblem(alpha, HornMap(spec, tuple(slots), X), int(y))
    bad = p.violations()
    if bad:
        raise LiftingError("lifting square does not commute: " + "; ".join(bad))
    return p


def solves(p: LiftingProblem, h: int) -> bool:
    X, n = p.alpha.source, p.n
    if p.alpha.components[n][h] != p.y:
        return False
    return all(X.faces[n][k][h] == x for k, x in enumerate(p.horn.facets) if x is not None)


def fillers(p: LiftingProblem) -> np.ndarray:
    """All solutions of ``p`` by brute force over ``X_n``."""
    X, n = p.alpha.source, p.n
    ok = p.alpha.components[n] == p.y
    for k, x in enumerate(p.horn.facets):
        if x is not None:
            ok &= X.faces[n][k] == x
    return np.flatnonzero(ok)


def enumerate_problems(alpha: SimplicialMap, n: int, m: int | None = None) -> Iterator[LiftingProblem]:
    """Every lifting problem in dimension ``n`` (for one ``m`` or all), in a fixed order.

    Facets are chosen in increasing ``k`` and pruned against the base and
    against the earlier facets as soon as they are chosen.
    """
    X, Y = alpha.source, alpha.target
    if not 1 <= n <= X.N:
        raise TruncationError(f"dimension {n} outside 1..{X.N}")
    ms = range(n + 1) if m is None else [m]
    below = alpha.components[n - 1]
    fx = X.faces[n - 1] if n >= 2 else None
    for mm in ms:
        spec = HornSpec(n, mm)
        ks = [k for k in range(n + 1) if k != mm]
        for y in range(Y.size(n)):
            targets = [Y.faces[n][k][y] for k in range(n + 1)]

            def extend(pos, chosen):
                if pos == len(ks):
                    slots = [None] * (n + 1)
                    for k, v in zip(ks, chosen):
                        slots[k] = v
                    yield LiftingProblem(alpha, HornMap(spec, tuple(slots), X), y)
                    return
                k = ks[pos]
                cand = below == targets[k]
                for l, xl in zip(ks[:pos], chosen):
                    # l < k: x_k d_l == x_l d_{k-1}
                    cand &= fx[l] == fx[k - 1][xl]
                for v in np.flatnonzero(cand):
                    yield from extend(pos + 1, chosen + [int(v)])

            yield from extend(0, [])


def count_problems_bruteforce(alpha: SimplicialMap, n: int, m: int) -> int:
    """Independent count of problems: filter the full product of candidate facets."""
    X, Y = alpha.source, alpha.target
    ks = [k for k in range(n + 1) if k != m]
    total = 0
    for y in range(Y.size(n)):
        for xs in product(range(X.size(n - 1)), repeat=len(ks)):
            x = dict(zip(ks, xs))
            if any(alpha.components[n - 1][x[k]] != Y.faces[n][k][y] for k in ks):
                continue
            if n >= 2 and any(X.faces[n - 1][k][x[l]] != X.faces[n - 1][l - 1][x[k]]
                              for k in ks for l in ks if k < l):
                continue
            total += 1
    return total


# --- lift assignments -------------------------------------------------------------

class LiftAssignment:
    """A chosen filler for every lifting problem, memoised by problem key."""

    def __init__(self, alpha: SimplicialMap, rule: Callable[[LiftingProblem], int], name: str = "lift",
                 overrides: dict | None = None):
        self.alpha = alpha
        self.rule = rule
        self.name = name
        self.overrides = dict(overrides or {})
        self._memo: dict[tuple, int] = {}

    def __call__(self, p: LiftingProblem) -> int:
        key = p.key
        if key in self.overrides:
            return self.overrides[key]
        val = self._memo.get(key)
        if val is None:
            val = int(self.rule(p))
            self._memo[key] = val
        return val

    def with_overrides(self, mapping: dict, name: str | None = None) -> "LiftAssignment":
        merged = dict(self.overrides)
        for k, v in mapping.items():
            merged[k.key if isinstance(k, LiftingProblem) else k] = int(v)
        return LiftAssignment(self.alpha, self.rule, name or self.name + "'", merged)

    def agrees_with(self, other: "LiftAssignment", problems: Iterable[LiftingProblem]) -> list[LiftingProblem]:
        return [p for p in problems if self(p) != other(p)]

    def __repr__(self):
        return f"LiftAssignment({self.name!r}, overrides={len(self.overrides)})"


def sign_allowed(spec: HornSpec, sign: str) -> bool:
    if sign not in ("+", "-"):
        raise SignConstraintError(f"unknown sign {sign!r}")
    if spec.m == 0 and sign != "-":
        return False
    if spec.m == spec.n and sign != "+":
        return False
    return True


class SignedLiftAssignment:
    """``lift_+`` and ``lift_-``, each used only on horns its sign admits."""

    def __init__(self, plus: LiftAssignment, minus: LiftAssignment):
        self.plus, self.minus = plus, minus
        self.alpha = plus.alpha

    @classmethod
    def duplicated(cls, lift: LiftAssignment) -> "SignedLiftAssignment":
        return cls(lift, lift)

    def __call__(self, sign: str, p: LiftingProblem) -> int:
        if not sign_allowed(p.horn.spec, sign):
            raise SignConstraintError(f"sign {sign} not allowed on horn {p.horn.spec}")
        return (self.plus if sign == "+" else self.minus)(p)


# --- the Malcev filler ----------------------------------------------------------------

def _require_malcev(alpha: SimplicialMap, beta: DegeneracySection, p: LiftingProblem):
    X, Y = alpha.source, alpha.target
    if not (X.has_malcev and Y.has_malcev):
        raise StructureError("both sides need a Malcev structure")
    if beta.alpha is not alpha and beta.alpha.components is not alpha.components:
        raise StructureError("section belongs to a different map")
    if p.n > X.N:
        raise TruncationError(f"dimension {p.n} exceeds truncation {X.N}")


def trace_malcev(alpha: SimplicialMap, beta: DegeneracySection, p: LiftingProblem) -> list[tuple[int, int]]:
    """The helper simplices ``(k, w_k)`` in the order they are defined.

    Starts from ``w_{-1} = beta(y)``, applies ``N_k`` upwards for
    ``k < m``, copies ``w_{n+1} = w_{m-1}``, then applies ``N_k``
    downwards for ``n >= k > m``.  The filler is the last entry.
    """
    _require_malcev(alpha, beta, p)
    X = alpha.source
    n, m = p.n, p.m
    mu = X.mu[n]
    fac, deg = X.faces[n], X.degeneracies[n - 1]
    x = p.horn.facets

    def step(k, w):
        kp = k if k < m else k - 1
        return int(mu[w, deg[kp][fac[k][w]], deg[kp][x[k]]])

    w = int(beta(n, p.y))
    trace = [(-1, w)]
    for k in range(m):
        w = step(k, w)
        trace.append((k, w))
    trace.append((n + 1, w))
    for k in range(n, m, -1):
        w = step(k, w)
        trace.append((k, w))
    return trace


def malcev_lift(alpha: SimplicialMap, beta: DegeneracySection, p: LiftingProblem) -> int:
    return trace_malcev(alpha, beta, p)[-1][1]


def malcev_step(alpha: SimplicialMap, p: LiftingProblem, k: int, w: int) -> int:
    """``N_k(w) = mu(w, w d_k s_k', x_k s_k')``."""
    X = alpha.source
    n, m = p.n, p.m
    if k == m or not 0 <= k <= n:
        raise LiftingError(f"N_{k} undefined for horn {p.horn.spec}")
    kp = k if k < m else k - 1
    deg = X.degeneracies[n - 1][kp]
    return int(X.mu[n][w, deg[X.faces[n][k][w]], deg[p.horn.facets[k]]])


def malcev_assignment(alpha: SimplicialMap, beta: DegeneracySection) -> LiftAssignment:
    return LiftAssignment(alpha, lambda p: malcev_lift(alpha, beta, p), "malcev")


# --- degenerate solutions --------------------------------------------------------

def find_degenerate_solutions(p: LiftingProblem) -> list[tuple[int, int]]:
    """All ``(z, j)`` with ``z s_j`` solving ``p`` (exhaustive search)."""
    X = p.alpha.source
    n = p.n
    if n > X.N:
        raise TruncationError(f"dimension {n} exceeds truncation {X.N}")
    sols = set(fillers(p).tolist())
    out = []
    for j in range(n):
        deg = X.degeneracies[n - 1][j]
        for z in range(X.size(n - 1)):
            if int(deg[z]) in sols:
                out.append((z, j))
    return out


def degenerate_filler(p: LiftingProblem) -> int | None:
    sols = find_degenerate_solutions(p)
    if not sols:
        return None
    z, j = sols[0]
    return int(p.alpha.source.degeneracies[p.n - 1][j][z])


def degenerate_preferring_assignment(alpha: SimplicialMap, base: LiftAssignment) -> LiftAssignment:
    def rule(p):
        h = degenerate_filler(p)
        return base(p) if h is None else h

    return LiftAssignment(alpha, rule, f"dp({base.name})")


# --- pulling horns back along degeneracies -------------------------------------------

def horn_pullback_indices(n: int, m: int, j: int) -> list[tuple[int, int | None]]:
    """Admissible ``(m*, j*)`` for pulling ``Lambda^n_m`` back along ``s_j``.

    ``j*`` satisfies ``s_j d_{m*} = d_m s_{j*}`` and is ``None`` when ``j == m``.
    """
    HornSpec(n, m)
    if not 0 <= j <= n:
        raise LiftingError(f"degeneracy index {j} out of range for dimension {n}")
    if m < j:
        return [(m, j - 1)]
    if m > j:
        return [(m + 1, j)]
    return [(m, None), (m + 1, None)]


def _check_mstar(n, m, j, mstar):
    if mstar not in [ms for ms, _ in horn_pullback_indices(n, m, j)]:
        raise LiftingError(f"m*={mstar} not admissible for n={n}, m={m}, j={j}")


def pullback_horn_map(p: LiftingProblem, filler: int | LiftAssignment, j: int, mstar: int) -> HornMap:
    """``s_j^*(x)`` on ``Lambda^{n+1}_{m*}`` from the face-value description.

    Faces outside ``{j, j+1, m*}`` are ``x s_j d_k``; the faces ``j`` and
    ``j+1`` (other than ``m*``) carry the filler of ``p``.
    """
    n = p.n
    _check_mstar(n, p.m, j, mstar)
    if isinstance(filler, LiftAssignment):
        filler = filler(p)
    X = p.alpha.source
    if n + 1 > X.N:
        raise TruncationError(f"pullback needs level {n + 1} > truncation {X.N}")
    sj = degeneracy_map(n, j)
    slots = [None] * (n + 2)
    for k in range(n + 2):
        if k == mstar:
            continue
        if k in (j, j + 1):
            slots[k] = int(filler)
        else:
            slots[k] = p.horn.evaluate(compose(sj, face_map(n, k)))
    return HornMap(HornSpec(n + 1, mstar), tuple(slots), X)


def composite_horn_map(p: LiftingProblem, filler: int | LiftAssignment, j: int, mstar: int) -> HornMap:
    """``lift o s_j o iota*``: restrict the degenerate simplex to the new horn."""
    n = p.n
    _check_mstar(n, p.m, j, mstar)
    if isinstance(filler, LiftAssignment):
        filler = filler(p)
    X = p.alpha.source
    if n + 1 > X.N:
        raise TruncationError(f"pullback needs level {n + 1} > truncation {X.N}")
    sj = degeneracy_map(n, j)
    slots = tuple(None if k == mstar else X.act(int(filler), compose(sj, face_map(n, k)))
                  for k in range(n + 2))
    return HornMap(HornSpec(n + 1, mstar), slots, X)


def pullback_problem(p: LiftingProblem, filler, j: int, mstar: int, via_composite: bool = False) -> LiftingProblem:
    Y = p.alpha.target
    hm = (composite_horn_map if via_composite else pullback_horn_map)(p, filler, j, mstar)
    return LiftingProblem(p.alpha, hm, Y.act(p.y, degeneracy_map(p.n, j)))


# --- reports and checkers -------------------------------------------------------------

@dataclass
class CheckReport:
    checker: str
    instances: int = 0
    failures: list[dict] = field(default_factory=list)
    expected_instances: int | None = None

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        out = {"checker": self.checker, "instances": self.instances,
               "failures": sorted(self.failures, key=lambda f: json.dumps(f, sort_keys=True))}
        if self.expected_instances is not None:
            out["expected_instances"] = self.expected_instances
        return out

    def summary(self) -> str:
        status = "PASS" if self.ok else f"FAIL ({len(self.failures)} counterexamples)"
        return f"{self.checker}: {status} over {self.instances} instances"


def _sweep(alpha, maxdim, fn, jobs=1, min_dim=1, problems=None):
    """Run ``fn(p) -> (count, failures)`` over every problem, merged in (n, m) order.

    ``problems`` replaces the exhaustive enumeration (used for sampling).
    """
    X = alpha.source
    if maxdim > X.N:
        raise TruncationError(f"maxdim {maxdim} exceeds truncation {X.N}")
    if problems is not None:
        total, failures = 0, []
        for p in problems:
            c, f = fn(p)
            total += c
            failures.extend(f)
        return total, failures
    parts = [(n, m) for n in range(min_dim, maxdim + 1) for m in range(n + 1)]

    def run(part):
        cnt, fails = 0, []
        for p in enumerate_problems(alpha, *part):
            c, f = fn(p)
            cnt += c
            fails.extend(f)
        return cnt, fails

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            results = list(pool.map(run, parts))
    else:
        results = [run(part) for part in parts]
    total, failures = 0, []
    for c, f in results:
        total += c
        failures.extend(f)
    return total, failures


def expected_problem_count(alpha: SimplicialMap, maxdim: int) -> int:
    return sum(count_problems_bruteforce(alpha, n, m) for n in range(1, maxdim + 1) for m in range(n + 1))


def check_lifts(alpha, lift: LiftAssignment, maxdim: int, jobs: int = 1, problems=None) -> CheckReport:
    """Every chosen filler actually solves its problem."""
    def fn(p):
        h = lift(p)
        if solves(p, h):
            return 1, []
        return 1, [{**p.encode(), "lift": alpha.source.name(p.n, h)}]

    total, fails = _sweep(alpha, maxdim, fn, jobs, problems=problems)
    return CheckReport("kan", total, fails)


def check_degenerate_preferring(alpha, lift: LiftAssignment, maxdim: int, jobs: int = 1, problems=None) -> CheckReport:
    X = alpha.source

    def fn(p):
        h = degenerate_filler(p)
        if h is None:
            return 1, []
        got = lift(p)
        if got == h:
            return 1, []
        return 1, [{**p.encode(), "lift": X.name(p.n, got), "degenerate": X.name(p.n, h)}]

    total, fails = _sweep(alpha, maxdim, fn, jobs, problems=problems)
    return CheckReport("degenerate-preferring", total, fails)


def check_symmetric_effective(alpha, lift: LiftAssignment, maxdim: int, jobs: int = 1, problems=None) -> CheckReport:
    """``lift(s_j^*(x), y s_j) == lift(x, y) s_j`` for all ``j`` and admissible ``m*``."""
    X = alpha.source
    if maxdim + 1 > X.N:
        raise TruncationError(f"symmetric check at maxdim {maxdim} needs truncation {maxdim + 1}")

    def fn(p):
        h = lift(p)
        cnt, fails = 0, []
        for j in range(p.n + 1):
            want = X.act(h, degeneracy_map(p.n, j))
            for mstar, _ in horn_pullback_indices(p.n, p.m, j):
                cnt += 1
                got = lift(pullback_problem(p, h, j, mstar))
                if got != want:
                    fails.append({**p.encode(), "j": j, "mstar": mstar,
                                  "lift": X.name(p.n + 1, got), "expected": X.name(p.n + 1, want)})
        return cnt, fails

    total, fails = _sweep(alpha, maxdim, fn, jobs, problems=problems)
    return CheckReport("symmetric-effective", total, fails)


def check_effective(alpha, signed: SignedLiftAssignment, maxdim: int, jobs: int = 1, problems=None) -> CheckReport:
    """``lift_+-(lift_+-(x,y) s_j iota*, y s_j) == lift_+-(x,y) s_j`` on signed horns."""
    X = alpha.source
    if maxdim + 1 > X.N:
        raise TruncationError(f"effective check at maxdim {maxdim} needs truncation {maxdim + 1}")

    def fn(p):
        cnt, fails = 0, []
        for sign in ("+", "-"):
            if not sign_allowed(p.horn.spec, sign):
                continue
            h = signed(sign, p)
            for j in range(p.n + 1):
                want = X.act(h, degeneracy_map(p.n, j))
                for mstar, _ in horn_pullback_indices(p.n, p.m, j):
                    q = pullback_problem(p, h, j, mstar, via_composite=True)
                    if not sign_allowed(q.horn.spec, sign):
                        raise SignConstraintError(f"pulled-back horn {q.horn.spec} refuses sign {sign}")
                    cnt += 1
                    got = signed(sign, q)
                    if got != want:
                        fails.append({**p.encode(), "sign": sign, "j": j, "mstar": mstar,
                                      "lift": X.name(p.n + 1, got), "expected": X.name(p.n + 1, want)})
        return cnt, fails

    total, fails = _sweep(alpha, maxdim, fn, jobs, problems=problems)
    return CheckReport("effective", total, fails)


def estimate_problem_count(alpha: SimplicialMap, maxdim: int) -> int:
    """Cheap upper bound: every facet tuple times every base simplex."""
    X, Y = alpha.source, alpha.target
    return sum((n + 1) * X.size(n - 1) ** n * Y.size(n) for n in range(1, maxdim + 1))


def sample_problems(alpha: SimplicialMap, maxdim: int, k: int, rng, attempts: int = 200) -> list[LiftingProblem]:
    """Up to ``k`` problems drawn by rejection: random facets and base, kept if they commute."""
    X, Y = alpha.source, alpha.target
    out = []
    parts = [(n, m) for n in range(1, maxdim + 1) for m in range(n + 1)]
    for _ in range(k * attempts):
        if len(out) >= k:
            break
        n, m = parts[rng.randrange(len(parts))]
        slots = tuple(None if i == m else rng.randrange(X.size(n - 1)) for i in range(n + 1))
        p = LiftingProblem(alpha, HornMap(HornSpec(n, m), slots, X), rng.randrange(Y.size(n)))
        if not p.violations():
            out.append(p)
    return out


def expected_symmetric_count(alpha, maxdim: int) -> int:
    """Number of ``(p, j, m*)`` triples, counted from the brute-force problem counts."""
    total = 0
    for n in range(1, maxdim + 1):
        for m in range(n + 1):
            triples = sum(2 if j == m else 1 for j in range(n + 1))
            total += triples * count_problems_bruteforce(alpha, n, m)
    return total


def expected_effective_count(alpha, maxdim: int) -> int:
    total = 0
    for n in range(1, maxdim + 1):
        for m in range(n + 1):
            signs = sum(sign_allowed(HornSpec(n, m), s) for s in "+-")
            triples = sum(2 if j == m else 1 for j in range(n + 1))
            total += signs * triples * count_problems_bruteforce(alpha, n, m)
    return total


def symmetric_not_dp_witness(alpha: SimplicialMap, lift: LiftAssignment):
    """Re-point ``lift`` at one ``Lambda^1_1`` problem to a non-degenerate 1-cell.

    Returns ``(modified_lift, problem)``.  No pulled-back problem is ever a
    1-dimensional horn, so symmetric effectiveness survives the change while
    degenerate preference does not.
    """
    X, Y = alpha.source, alpha.target
    degenerate = set(X.degeneracies[0][0].tolist())
    base_degenerate = set(Y.degeneracies[0][0].tolist())
    for e in range(X.size(1)):
        if e in degenerate or int(alpha.components[1][e]) not in base_degenerate:
            continue
        p = make_problem(alpha, 1, 1, {0: int(X.faces[1][0][e])}, int(alpha.components[1][e]))
        return lift.with_overrides({p: e}, name=lift.name + "+witness"), p
    raise LiftingError("no non-degenerate 1-cell to build the witness from")
