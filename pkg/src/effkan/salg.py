"""Truncated finite simplicial sets and simplicial Malcev algebras.

Elements are opaque tokens: at each level ``n`` they are the integers
``0 .. |X_n|-1`` with display names kept alongside.  All structure lives in
integer tables, ``faces[n][i]`` (``X_n -> X_{n-1}``) and
``degeneracies[n][i]`` (``X_n -> X_{n+1}``), plus an optional ternary
table ``mu[n]`` per level.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce
from itertools import permutations, product

import numpy as np

from .delta import MonotoneMap, factorize

MAX_MU_ENTRIES = 1 << 22


class TruncationError(ValueError):
    pass


class StructureError(ValueError):
    pass


class TruncatedSimplicialSet:
    """Levels ``0..N`` of a simplicial set, optionally with a Malcev operation."""

    def __init__(self, names, faces, degeneracies, mu=None):
        self.names = [tuple(str(x) for x in level) for level in names]
        self.N = len(self.names) - 1
        if self.N < 0:
            raise StructureError("need at least level 0")
        self.faces = [None] + [np.asarray(faces[n], dtype=np.int64).reshape(n + 1, -1)
                               for n in range(1, self.N + 1)]
        self.degeneracies = [np.asarray(degeneracies[n], dtype=np.int64).reshape(n + 1, -1)
                             for n in range(self.N)]
        self.mu = None if mu is None else [np.asarray(t, dtype=np.int64) for t in mu]
        self._index = [{name: i for i, name in enumerate(level)} for level in self.names]
        self._actions: dict[MonotoneMap, np.ndarray] = {}

    # -- basic access ----------------------------------------------------
    def size(self, n: int) -> int:
        return len(self.names[n])

    @property
    def has_malcev(self) -> bool:
        return self.mu is not None

    def name(self, n: int, x: int) -> str:
        return self.names[n][x]

    def index(self, n: int, name: str) -> int:
        try:
            return self._index[n][name]
        except KeyError:
            raise StructureError(f"no element {name!r} at level {n}") from None

    def _level(self, n: int):
        if not 0 <= n <= self.N:
            raise TruncationError(f"level {n} outside truncation 0..{self.N}")

    def face(self, n: int, i: int, x):
        """``x o d_i`` for ``x`` in ``X_n``."""
        self._level(n)
        if n == 0:
            raise TruncationError("0-simplices have no faces")
        return self.faces[n][i][x]

    def degen(self, n: int, i: int, x):
        """``x o s_i`` for ``x`` in ``X_n``."""
        self._level(n + 1)
        return self.degeneracies[n][i][x]

    def malcev(self, n: int, a, b, c):
        if self.mu is None:
            raise StructureError("no Malcev structure")
        self._level(n)
        return self.mu[n][a, b, c]

    # -- presheaf action -------------------------------------------------
    def action(self, f: MonotoneMap) -> np.ndarray:
        """Table of ``x |-> x o f`` from ``X_cod`` to ``X_dom``."""
        table = self._actions.get(f)
        if table is not None:
            return table
        self._level(f.dom)
        self._level(f.cod)
        table = np.arange(self.size(f.cod))
        # outermost generator acts first on the presheaf side
        for gen in reversed(factorize(f).word()):
            if gen.kind == "d":
                table = self.faces[gen.n + 1][gen.index][table]
            else:
                table = self.degeneracies[gen.n][gen.index][table]
        self._actions[f] = table
        return table

    def act(self, x: int, f: MonotoneMap) -> int:
        return int(self.action(f)[x])

    def apply_word(self, level: int, word) -> np.ndarray:
        """Apply generators ``[("d"|"s", i), ...]`` in presheaf order, starting at ``level``."""
        table = np.arange(self.size(level))
        for kind, i in word:
            if kind == "d":
                table = self.faces[level][i][table]
                level -= 1
            else:
                table = self.degeneracies[level][i][table]
                level += 1
        return table

    def __repr__(self):
        sizes = [self.size(n) for n in range(self.N + 1)]
        return f"TruncatedSimplicialSet(N={self.N}, sizes={sizes}, malcev={self.has_malcev})"

    # -- serialisation ---------------------------------------------------
    def to_json(self) -> dict:
        levels = []
        for n in range(self.N + 1):
            lv: dict = {"carrier": list(self.names[n])}
            lower = self.names[n - 1] if n else ()
            lv["faces"] = [[lower[y] for y in row] for row in self.faces[n]] if n else []
            upper = self.names[n + 1] if n < self.N else ()
            lv["degeneracies"] = ([[upper[y] for y in row] for row in self.degeneracies[n]]
                                  if n < self.N else [])
            if self.mu is not None:
                nm = self.names[n]
                lv["mu"] = [[[nm[v] for v in row] for row in plane] for plane in self.mu[n]]
            levels.append(lv)
        return {"truncation": self.N, "levels": levels}

    @classmethod
    def from_json(cls, data: dict, check: bool = True) -> "TruncatedSimplicialSet":
        """Load from the JSON schema; by default refuse anything ``validate`` rejects."""
        try:
            levels = data["levels"]
            N = int(data["truncation"])
            if len(levels) != N + 1:
                raise StructureError(f"truncation {N} but {len(levels)} levels given")
            names = [list(map(str, lv["carrier"])) for lv in levels]
            idx = [{nm: i for i, nm in enumerate(level)} for level in names]
            faces = [None]
            degens = []
            for n, lv in enumerate(levels):
                if n:
                    faces.append([[idx[n - 1][v] for v in row] for row in lv["faces"]])
                if n < N:
                    degens.append([[idx[n + 1][v] for v in row] for row in lv["degeneracies"]])
            mu = None
            if all("mu" in lv for lv in levels):
                mu = [[[[idx[n][v] for v in row] for row in plane] for plane in lv["mu"]]
                      for n, lv in enumerate(levels)]
            X = cls(names, faces, degens, mu)
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            if isinstance(exc, StructureError):
                raise
            raise StructureError(f"malformed simplicial set document: {exc!r}") from exc
        if check:
            report = validate(X)
            if not report.ok:
                raise StructureError("invalid simplicial set:\n  " + "\n  ".join(report.violations[:20]))
        return X

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# --- validation -------------------------------------------------------------

@dataclass
class ValidationReport:
    checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def compare(self, label: str, lhs: np.ndarray, rhs: np.ndarray, names=None):
        self.checked += int(np.size(lhs))
        bad = np.flatnonzero(np.asarray(lhs).ravel() != np.asarray(rhs).ravel())
        for b in bad:
            what = names[b] if names is not None else int(b)
            self.violations.append(f"{label} fails at {what}")

    def to_json(self) -> dict:
        return {"checked": self.checked, "violations": list(self.violations)}


def _shape_violations(X: TruncatedSimplicialSet) -> list[str]:
    out = []
    for n in range(1, X.N + 1):
        t = X.faces[n]
        if t.shape != (n + 1, X.size(n)):
            out.append(f"face table at level {n} has shape {t.shape}")
        elif t.size and (t.min() < 0 or t.max() >= X.size(n - 1)):
            out.append(f"face table at level {n} leaves X_{n - 1}")
    for n in range(X.N):
        t = X.degeneracies[n]
        if t.shape != (n + 1, X.size(n)):
            out.append(f"degeneracy table at level {n} has shape {t.shape}")
        elif t.size and (t.min() < 0 or t.max() >= X.size(n + 1)):
            out.append(f"degeneracy table at level {n} leaves X_{n + 1}")
    if X.mu is not None:
        if len(X.mu) != X.N + 1:
            out.append("Malcev tables missing for some levels")
        for n, t in enumerate(X.mu):
            c = X.size(n)
            if t.shape != (c, c, c):
                out.append(f"Malcev table at level {n} has shape {t.shape}")
            elif t.size and (t.min() < 0 or t.max() >= c):
                out.append(f"Malcev table at level {n} leaves X_{n}")
    return out


def validate(X: TruncatedSimplicialSet) -> ValidationReport:
    """Exhaustively check every simplicial identity and Malcev law within the truncation."""
    report = ValidationReport()
    report.violations.extend(_shape_violations(X))
    if report.violations:
        return report
    N = X.N
    for n in range(N):
        nm = X.names[n]
        for j in range(n + 1):
            for k in range(n + 2):
                lhs = X.apply_word(n, [("s", j), ("d", k)])
                if k > j + 1:
                    rhs = X.apply_word(n, [("d", k - 1), ("s", j)])
                    case = "d_{k-1} s_j"
                elif k in (j, j + 1):
                    rhs = np.arange(X.size(n))
                    case = "identity"
                else:
                    rhs = X.apply_word(n, [("d", k), ("s", j - 1)])
                    case = "d_k s_{j-1}"
                report.compare(f"x.s{j}.d{k} = x.{case} (level {n}, j={j}, k={k})", lhs, rhs, nm)
    for n in range(N - 1):
        top = X.names[n + 2]
        for j in range(n + 2):
            for k in range(j, n + 1):
                report.compare(f"x.d{j}.d{k} = x.d{k + 1}.d{j} (level {n + 2})",
                               X.apply_word(n + 2, [("d", j), ("d", k)]),
                               X.apply_word(n + 2, [("d", k + 1), ("d", j)]), top)
        nm = X.names[n]
        for j in range(n + 1):
            for k in range(j + 1):
                report.compare(f"x.s{j}.s{k} = x.s{k}.s{j + 1} (level {n})",
                               X.apply_word(n, [("s", j), ("s", k)]),
                               X.apply_word(n, [("s", k), ("s", j + 1)]), nm)
    if X.mu is not None:
        _validate_malcev(X, report)
    return report


def _validate_malcev(X: TruncatedSimplicialSet, report: ValidationReport):
    for n in range(X.N + 1):
        mu = X.mu[n]
        c = X.size(n)
        a, b = np.meshgrid(np.arange(c), np.arange(c), indexing="ij")
        pairs = [f"({X.name(n, i)},{X.name(n, j)})" for i in range(c) for j in range(c)]
        report.compare(f"mu(x,x,y)=y at level {n}", mu[a, a, b], b, pairs)
        report.compare(f"mu(x,y,y)=x at level {n}", mu[a, b, b], a, pairs)
        triples = None
        if n >= 1:
            for i in range(n + 1):
                d = X.faces[n][i]
                lhs = d[mu]
                rhs = X.mu[n - 1][d[:, None, None], d[None, :, None], d[None, None, :]]
                triples = triples or _triple_names(X, n)
                report.compare(f"d{i} mu = mu d{i} at level {n}", lhs, rhs, triples)
        if n < X.N:
            for i in range(n + 1):
                s = X.degeneracies[n][i]
                lhs = s[mu]
                rhs = X.mu[n + 1][s[:, None, None], s[None, :, None], s[None, None, :]]
                triples = triples or _triple_names(X, n)
                report.compare(f"s{i} mu = mu s{i} at level {n}", lhs, rhs, triples)


class _LazyNames:
    def __init__(self, X, n):
        self.X, self.n, self.c = X, n, X.size(n)

    def __getitem__(self, flat):
        c = self.c
        a, rest = divmod(int(flat), c * c)
        b, d = divmod(rest, c)
        nm = self.X.names[self.n]
        return f"({nm[a]},{nm[b]},{nm[d]})"


def _triple_names(X, n):
    return _LazyNames(X, n)


# --- finite Malcev algebras --------------------------------------------------

@dataclass(frozen=True)
class MalcevAlgebra:
    names: tuple[str, ...]
    mu: np.ndarray = field(compare=False)
    label: str = ""

    def axiom_violations(self) -> list[str]:
        out = []
        c = len(self.names)
        if self.mu.shape != (c, c, c):
            return [f"Malcev table has shape {self.mu.shape}, expected {(c, c, c)}"]
        for x in range(c):
            for y in range(c):
                if self.mu[x, x, y] != y:
                    out.append(f"mu({self.names[x]},{self.names[x]},{self.names[y]}) != {self.names[y]}")
                if self.mu[x, y, y] != x:
                    out.append(f"mu({self.names[x]},{self.names[y]},{self.names[y]}) != {self.names[x]}")
        return out


def _algebra_from_fn(names, fn, label) -> MalcevAlgebra:
    c = len(names)
    mu = np.empty((c, c, c), dtype=np.int64)
    for x, y, z in product(range(c), repeat=3):
        mu[x, y, z] = fn(x, y, z)
    return MalcevAlgebra(tuple(names), mu, label)


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """``Z/m_1 x ... x Z/m_r`` with elements as tuples of residues."""

    moduli: tuple[int, ...]

    def __post_init__(self):
        if any(m < 1 for m in self.moduli):
            raise StructureError(f"bad moduli {self.moduli}")

    @property
    def order(self) -> int:
        return reduce(lambda a, b: a * b, self.moduli, 1)

    def elements(self) -> list[tuple[int, ...]]:
        return list(product(*(range(m) for m in self.moduli)))

    @property
    def zero(self) -> tuple[int, ...]:
        return tuple(0 for _ in self.moduli)

    def add(self, a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def neg(self, a):
        return tuple((-x) % m for x, m in zip(a, self.moduli))

    def element_name(self, a) -> str:
        return ":".join(str(x) for x in a)

    @property
    def label(self) -> str:
        return "x".join(f"Z{m}" for m in self.moduli)

    def as_malcev(self) -> MalcevAlgebra:
        els = self.elements()
        pos = {e: i for i, e in enumerate(els)}
        return _algebra_from_fn(
            [self.element_name(e) for e in els],
            lambda x, y, z: pos[self.add(self.add(els[x], self.neg(els[y])), els[z])],
            self.label)


def cyclic_group(n: int) -> FiniteAbelianGroup:
    return FiniteAbelianGroup((n,))


def parse_group(text: str) -> FiniteAbelianGroup:
    """``"Z2"``, ``"Z2xZ3"`` and the like."""
    try:
        mods = tuple(int(part.strip().lstrip("Zz")) for part in text.split("x"))
    except ValueError:
        raise StructureError(f"cannot parse group {text!r}") from None
    return FiniteAbelianGroup(mods)


def trivial_algebra() -> MalcevAlgebra:
    return _algebra_from_fn(["*"], lambda x, y, z: 0, "trivial")


def heyting2() -> MalcevAlgebra:
    """Two-element Boolean algebra, ``mu = ((z->y)->x) & ((x->y)->z)``."""
    imp = lambda p, q: int((not p) or q)
    return _algebra_from_fn(
        ["0", "1"], lambda x, y, z: imp(imp(z, y), x) & imp(imp(x, y), z), "heyting2")


def symmetric3() -> MalcevAlgebra:
    """``S_3`` as a (non-abelian) Malcev algebra via ``x y^-1 z``."""
    perms = sorted(permutations(range(3)))
    pos = {p: i for i, p in enumerate(perms)}
    mul = lambda p, q: tuple(p[q[i]] for i in range(3))
    inv = lambda p: tuple(sorted(range(3), key=lambda i: p[i]))
    return _algebra_from_fn(
        ["".join(map(str, p)) for p in perms],
        lambda x, y, z: pos[mul(mul(perms[x], inv(perms[y])), perms[z])], "S3")


def builtin_algebra(name: str) -> MalcevAlgebra:
    key = name.strip()
    if key.lower() in ("trivial", "point", "*"):
        return trivial_algebra()
    if key.lower() in ("heyting2", "bool2"):
        return heyting2()
    if key.upper() == "S3":
        return symmetric3()
    return parse_group(key).as_malcev()


# --- generators ------------------------------------------------------------------

def constant_algebra(M: MalcevAlgebra, N: int) -> TruncatedSimplicialSet:
    """Every level is ``M``; all faces and degeneracies are identities."""
    bad = M.axiom_violations()
    if bad:
        raise StructureError("not a Malcev algebra: " + "; ".join(bad[:5]))
    c = len(M.names)
    ident = np.arange(c)
    return TruncatedSimplicialSet(
        [M.names] * (N + 1),
        [None] + [np.tile(ident, (n + 1, 1)) for n in range(1, N + 1)],
        [np.tile(ident, (n + 1, 1)) for n in range(N)],
        [M.mu] * (N + 1))


def terminal(N: int) -> TruncatedSimplicialSet:
    return constant_algebra(trivial_algebra(), N)


def _nerve_tuple_name(A: FiniteAbelianGroup, t) -> str:
    return "(" + ",".join(A.element_name(g) for g in t) + ")"


def nerve_abelian(A: FiniteAbelianGroup, N: int) -> TruncatedSimplicialSet:
    """Nerve of ``A`` truncated at ``N``: ``X_n = A^n`` with adjacent-sum faces."""
    if not isinstance(A, FiniteAbelianGroup):
        raise StructureError(f"nerves are built for finite abelian groups only, got {type(A).__name__}")
    els = A.elements()
    levels = [list(product(els, repeat=n)) for n in range(N + 1)]
    pos = [{t: i for i, t in enumerate(level)} for level in levels]
    for n, level in enumerate(levels):
        if len(level) ** 3 > MAX_MU_ENTRIES:
            raise StructureError(f"level {n} of the nerve of {A.label} is too large to tabulate")

    def face(t, i):
        n = len(t)
        if i == 0:
            return t[1:]
        if i == n:
            return t[:-1]
        return t[:i - 1] + (A.add(t[i - 1], t[i]),) + t[i + 1:]

    def degen(t, i):
        return t[:i] + (A.zero,) + t[i:]

    faces = [None]
    for n in range(1, N + 1):
        faces.append([[pos[n - 1][face(t, i)] for t in levels[n]] for i in range(n + 1)])
    degens = [[[pos[n + 1][degen(t, i)] for t in levels[n]] for i in range(n + 1)]
              for n in range(N)]
    gmu = A.as_malcev().mu
    q = A.order
    mus = []
    for n, level in enumerate(levels):
        c = len(level)
        idx = np.arange(c)
        mu = np.zeros((c, c, c), dtype=np.int64)
        # level elements are in product order: digit p has weight q**(n-1-p)
        for p in range(n):
            w = q ** (n - 1 - p)
            digit = (idx // w) % q
            mu += w * gmu[digit[:, None, None], digit[None, :, None], digit[None, None, :]]
        mus.append(mu)
    names = [[_nerve_tuple_name(A, t) for t in level] for level in levels]
    return TruncatedSimplicialSet(names, faces, degens, mus)


# --- maps -------------------------------------------------------------------------

class SimplicialMap:
    def __init__(self, source: TruncatedSimplicialSet, target: TruncatedSimplicialSet,
                 components, algebraic: bool = True):
        if source.N != target.N:
            raise StructureError("source and target truncations differ")
        self.source, self.target = source, target
        self.components = [np.asarray(c, dtype=np.int64) for c in components]
        self.algebraic = algebraic
        if len(self.components) != source.N + 1:
            raise StructureError("one component per level required")
        for n, c in enumerate(self.components):
            if c.shape != (source.size(n),) or (c.size and (c.min() < 0 or c.max() >= target.size(n))):
                raise StructureError(f"component at level {n} is not a function X_{n} -> Y_{n}")

    @property
    def N(self) -> int:
        return self.source.N

    def __call__(self, n: int, x):
        return self.components[n][x]

    def validate(self) -> ValidationReport:
        X, Y, a = self.source, self.target, self.components
        report = ValidationReport()
        for n in range(1, self.N + 1):
            for i in range(n + 1):
                report.compare(f"alpha d{i} = d{i} alpha at level {n}",
                               a[n - 1][X.faces[n][i]], Y.faces[n][i][a[n]], X.names[n])
        for n in range(self.N):
            for i in range(n + 1):
                report.compare(f"alpha s{i} = s{i} alpha at level {n}",
                               a[n + 1][X.degeneracies[n][i]], Y.degeneracies[n][i][a[n]], X.names[n])
        if self.algebraic:
            if not (X.has_malcev and Y.has_malcev):
                report.violations.append("algebraic map between non-algebras")
                return report
            for n in range(self.N + 1):
                c = a[n]
                report.compare(f"alpha mu = mu alpha at level {n}", c[X.mu[n]],
                               Y.mu[n][c[:, None, None], c[None, :, None], c[None, None, :]],
                               _triple_names(X, n))
        return report

    def to_json(self) -> dict:
        X, Y = self.source, self.target
        return {"levels": [{X.name(n, x): Y.name(n, int(y)) for x, y in enumerate(c)}
                           for n, c in enumerate(self.components)]}

    @classmethod
    def from_json(cls, data: dict, source, target, algebraic=True) -> "SimplicialMap":
        comps = [[target.index(n, lv[source.name(n, x)]) for x in range(source.size(n))]
                 for n, lv in enumerate(data["levels"])]
        return cls(source, target, comps, algebraic)


def to_terminal(X: TruncatedSimplicialSet) -> SimplicialMap:
    return SimplicialMap(X, terminal(X.N), [np.zeros(X.size(n), dtype=np.int64) for n in range(X.N + 1)],
                         algebraic=X.has_malcev)


class DegeneracySection:
    """Levelwise section ``beta`` of ``alpha`` that commutes with degeneracies."""

    def __init__(self, alpha: SimplicialMap, beta):
        self.alpha = alpha
        self.beta = [np.asarray(b, dtype=np.int64) for b in beta]

    def __call__(self, n: int, y):
        return self.beta[n][y]

    def validate(self) -> ValidationReport:
        X, Y = self.alpha.source, self.alpha.target
        report = ValidationReport()
        for n in range(self.alpha.N + 1):
            report.compare(f"alpha beta = 1 at level {n}",
                           self.alpha.components[n][self.beta[n]], np.arange(Y.size(n)), Y.names[n])
        for n in range(self.alpha.N):
            for k in range(n + 1):
                report.compare(f"beta s{k} = s{k} beta at level {n}",
                               self.beta[n + 1][Y.degeneracies[n][k]],
                               X.degeneracies[n][k][self.beta[n]], Y.names[n])
        return report


def section_from_point(X: TruncatedSimplicialSet, x0: int | str = 0) -> DegeneracySection:
    """``beta_n(*) = x0 s_0 ... s_0`` for the map ``X -> Delta^0``."""
    if isinstance(x0, str):
        x0 = X.index(0, x0)
    beta = [np.array([x0], dtype=np.int64)]
    for n in range(X.N):
        beta.append(np.array([X.degeneracies[n][0][beta[-1][0]]], dtype=np.int64))
    return DegeneracySection(to_terminal(X), beta)


def nerve_hom(A: FiniteAbelianGroup, B: FiniteAbelianGroup, hom, X, Y) -> SimplicialMap:
    """Componentwise map of nerves induced by a homomorphism ``hom: A -> B``."""
    ea, eb = A.elements(), B.elements()
    pb = {e: i for i, e in enumerate(eb)}
    table = [pb[tuple(hom(a))] for a in ea]
    comps = []
    for n in range(X.N + 1):
        # nerve elements are enumerated in product order, so decode by radix
        idx = np.arange(X.size(n))
        out = np.zeros_like(idx)
        for pos in range(n):
            digit = (idx // (A.order ** (n - 1 - pos))) % A.order
            out = out * B.order + np.asarray(table)[digit]
        comps.append(out)
    return SimplicialMap(X, Y, comps, algebraic=True)


def nerve_projection(A: FiniteAbelianGroup, B: FiniteAbelianGroup, N: int):
    """``nerve(A x B) -> nerve(A)`` with the degeneracy-section induced by ``a |-> (a, 0)``."""
    AB = FiniteAbelianGroup(A.moduli + B.moduli)
    X, Y = nerve_abelian(AB, N), nerve_abelian(A, N)
    r = len(A.moduli)
    alpha = nerve_hom(AB, A, lambda g: g[:r], X, Y)
    incl = nerve_hom(A, AB, lambda g: tuple(g) + B.zero, Y, X)
    return alpha, DegeneracySection(alpha, incl.components)
