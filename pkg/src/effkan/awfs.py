"""Horn pushout sequences of sieves, pullback squares between them, and the
lifting conditions they impose.

A horn pushout sequence over ``Delta^a`` is a chain of sieves
``S_0 < S_1 < ... < S_k`` where each step glues one horn filler in along an
injection ``[n] -> [a]``.  Maps out of sieves are tables on non-degenerate
simplices (:class:`SieveMap`); lifts are extended along a sequence by
pushing out the chosen horn filler one step at a time.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .delta import (MonotoneMap, compose, degeneracy_map, face_map, factorize, identity,
                    minimal_words, mono_from_mask, monotone_maps, word_length)
from .kan import (CheckReport, HornMap, LiftAssignment, LiftingError, LiftingProblem,
                  SignConstraintError, SignedLiftAssignment, sign_allowed)
from .salg import SimplicialMap, TruncatedSimplicialSet, TruncationError
from .sieve import (HornSpec, Sieve, SieveError, all_sieves, attach_horn, attachable_horns, full,
                    horn, nondegenerate_count, popcount, pullback_sieve,
                    vertices_of)


class SequenceError(ValueError):
    pass


# --- sequences ------------------------------------------------------------------------

@dataclass(frozen=True)
class Generator:
    spec: HornSpec
    sign: str | None = None

    def __post_init__(self):
        if self.sign is not None and not sign_allowed(self.spec, self.sign):
            raise SignConstraintError(f"sign {self.sign} not allowed on {self.spec}")


@dataclass(frozen=True)
class Step:
    generator: Generator
    embedding: MonotoneMap

    def to_json(self) -> dict:
        return {"horn": [self.generator.spec.n, self.generator.spec.m],
                "sign": self.generator.sign, "embedding": list(self.embedding.values)}


class HornPushoutSequence:
    """``S_0 -> S_1 -> ... -> S_k`` inside ``Delta^a``; every step is checked."""

    def __init__(self, start: Sieve, steps=()):
        self.start = start
        self.ambient = start.ambient
        self.steps = tuple(steps)
        sieves = [start]
        for st in self.steps:
            if st.embedding.cod != self.ambient:
                raise SequenceError(f"embedding {st.embedding!r} leaves Delta^{self.ambient}")
            try:
                sieves.append(attach_horn(sieves[-1], st.generator.spec, st.embedding))
            except SieveError as exc:
                raise SequenceError(str(exc)) from exc
        self.sieves = tuple(sieves)

    @property
    def end(self) -> Sieve:
        return self.sieves[-1]

    def __len__(self) -> int:
        return len(self.steps)

    def __eq__(self, other):
        return (isinstance(other, HornPushoutSequence) and self.start == other.start
                and self.steps == other.steps)

    def __hash__(self):
        return hash((self.start, self.steps))

    def __repr__(self):
        gens = ", ".join(f"{st.generator.spec}{st.generator.sign or ''}@{st.embedding.values}"
                         for st in self.steps)
        return f"HornPushoutSequence(a={self.ambient}, |S0|={len(self.start)}, [{gens}])"

    def then(self, other: "HornPushoutSequence") -> "HornPushoutSequence":
        if other.start != self.end:
            raise SequenceError("sequences are not composable")
        return HornPushoutSequence(self.start, self.steps + other.steps)

    def count_law_holds(self) -> bool:
        return nondegenerate_count(self.end) == nondegenerate_count(self.start) + 2 * len(self)

    def to_json(self) -> dict:
        return {"ambient": self.ambient, "start": self.start.to_json(),
                "steps": [st.to_json() for st in self.steps]}

    @classmethod
    def from_json(cls, data: dict) -> "HornPushoutSequence":
        start = Sieve.from_json(data["start"])
        steps = []
        for st in data["steps"]:
            n, m = st["horn"]
            emb = MonotoneMap(n, start.ambient, tuple(st["embedding"]))
            steps.append(Step(Generator(HornSpec(n, m), st.get("sign")), emb))
        return cls(start, steps)


def identity_sequence(s: Sieve) -> HornPushoutSequence:
    return HornPushoutSequence(s, ())


def horn_sequence(spec: HornSpec, sign: str | None = None) -> HornPushoutSequence:
    """The length-one sequence ``Lambda^n_m -> Delta^n``."""
    return HornPushoutSequence(horn(spec), [Step(Generator(spec, sign), identity(spec.n))])


def step_between(a: Sieve, b: Sieve, sign: str | None = None) -> Step:
    """The unique horn attachment taking ``a`` to ``b``, if it exists."""
    added = b.members - a.members
    if len(added) != 2 or not a.members <= b.members:
        raise SequenceError("sieves do not differ by one horn attachment")
    top = max(added, key=popcount)
    emb = mono_from_mask(top, a.ambient)
    for spec, e in attachable_horns(a):
        if e == emb:
            gen = Generator(spec, sign)
            if attach_horn(a, spec, e) == b:
                return Step(gen, e)
    raise SequenceError("sieves do not differ by one horn attachment")


def fill_gap(a: Sieve, b: Sieve, sign: str | None = None, limit: int = 1000) -> Iterator[tuple[Step, ...]]:
    """Horn attachment paths from ``a`` to ``b`` staying inside ``b`` (at most ``limit``)."""
    if not a.members <= b.members:
        return
    found = 0

    def dfs(cur: Sieve, path):
        nonlocal found
        if found >= limit:
            return
        if cur == b:
            found += 1
            yield tuple(path)
            return
        for spec, e in attachable_horns(cur):
            if e.image_mask not in b.members:
                continue
            if sign is not None and not sign_allowed(spec, sign):
                continue
            nxt = attach_horn(cur, spec, e)
            path.append(Step(Generator(spec, sign), e))
            yield from dfs(nxt, path)
            path.pop()

    yield from dfs(a, [])


def sequences_through(chain: list[Sieve], sign: str | None = None, limit: int = 1000):
    """Horn pushout sequences visiting every sieve of ``chain`` in order.

    Yields ``(sequence, positions)`` with ``positions[i]`` the index of
    ``chain[i]`` in the sequence.
    """
    produced = 0

    def go(i, steps, positions):
        nonlocal produced
        if produced >= limit:
            return
        if i == len(chain) - 1:
            produced += 1
            yield HornPushoutSequence(chain[0], steps), positions
            return
        for path in fill_gap(chain[i], chain[i + 1], sign, limit):
            yield from go(i + 1, steps + list(path), positions + [len(steps) + len(path)])

    yield from go(0, [], [0])


# --- squares -------------------------------------------------------------------------

@dataclass(frozen=True)
class SequenceSquare:
    """A pullback square: ``f^*(T_i) = S_{mu(i)}`` for every ``i``."""

    f: MonotoneMap
    mu: tuple[int, ...]
    source: HornPushoutSequence
    target: HornPushoutSequence

    def __post_init__(self):
        k, l = len(self.source), len(self.target)
        if self.f.dom != self.source.ambient or self.f.cod != self.target.ambient:
            raise SequenceError("base map does not match the ambients")
        if len(self.mu) != l + 1 or self.mu[0] != 0 or self.mu[-1] != k:
            raise SequenceError(f"reindexing {self.mu} must run from 0 to {k} over {l + 1} points")
        if any(x > y for x, y in zip(self.mu, self.mu[1:])):
            raise SequenceError(f"reindexing {self.mu} is not nondecreasing")
        for i, t in enumerate(self.target.sieves):
            if pullback_sieve(self.f, t) != self.source.sieves[self.mu[i]]:
                raise SequenceError(f"pullback of T_{i} is not S_{self.mu[i]}")

    @property
    def kind(self) -> str:
        fac = factorize(self.f)
        gens = len(fac.face_indices) + len(fac.degeneracy_indices)
        if gens == 1:
            return "face" if fac.face_indices else "degeneracy"
        return "composite"

    def to_json(self) -> dict:
        return {"f": self.f.to_json(), "mu": list(self.mu),
                "source": self.source.to_json(), "target": self.target.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "SequenceSquare":
        return cls(MonotoneMap.from_json(data["f"]), tuple(data["mu"]),
                   HornPushoutSequence.from_json(data["source"]),
                   HornPushoutSequence.from_json(data["target"]))


def square_from_sequences(f: MonotoneMap, source: HornPushoutSequence,
                          target: HornPushoutSequence) -> SequenceSquare:
    """Build the square, reading the reindexing off the sieves."""
    pos = {s: i for i, s in enumerate(source.sieves)}
    try:
        mu = tuple(pos[pullback_sieve(f, t)] for t in target.sieves)
    except KeyError:
        raise SequenceError("some pulled-back sieve is not in the source sequence") from None
    return SequenceSquare(f, mu, source, target)


def compose_squares_vertical(p: SequenceSquare, q: SequenceSquare) -> SequenceSquare:
    """Stack ``q`` on top of ``p``: reindexing ``(mu + nu)``."""
    if p.f != q.f:
        raise SequenceError("vertical composition needs the same base map")
    if p.source.end != q.source.start or p.target.end != q.target.start:
        raise SequenceError("squares do not meet")
    k, l = len(p.source), len(p.target)
    mu = p.mu + tuple(k + v for v in q.mu[1:])
    if q.mu and p.mu[l] != k + q.mu[0]:
        raise SequenceError("seam value is ambiguous")
    return SequenceSquare(p.f, mu, p.source.then(q.source), p.target.then(q.target))


def compose_squares_horizontal(p: SequenceSquare, q: SequenceSquare) -> SequenceSquare:
    """``p: sigma -> tau`` over ``f`` then ``q: tau -> rho`` over ``g`` gives ``g o f``."""
    if p.target != q.source:
        raise SequenceError("squares do not share the middle sequence")
    return SequenceSquare(compose(q.f, p.f), tuple(p.mu[i] for i in q.mu), p.source, q.target)


def squares_over(f: MonotoneMap, target: HornPushoutSequence, sign: str | None = None,
                 limit: int = 1000) -> list[SequenceSquare]:
    """Every square over ``f`` into ``target`` whose source is found by gap filling."""
    chain = [pullback_sieve(f, t) for t in target.sieves]
    dedup = [chain[0]]
    for s in chain[1:]:
        if s != dedup[-1]:
            dedup.append(s)
    out = []
    for seq, _ in sequences_through(dedup, sign, limit):
        out.append(square_from_sequences(f, seq, target))
    return out


@dataclass(frozen=True)
class NotFound:
    reason: str


def decompose_horizontal(sq: SequenceSquare, limit: int = 200, words: str = "canonical"):
    """Split ``sq`` into face and degeneracy squares along a generator word of ``f``.

    Intermediate sequences must pass through the pullbacks of the target's
    sieves; the gaps are filled by bounded backtracking.  ``words`` is
    ``"canonical"`` (only ``factorize(f).word()``) or ``"minimal"`` (every
    shortest word, canonical first).  Returns the list of squares (innermost
    base map first) or :class:`NotFound`.
    """
    if words not in ("canonical", "minimal"):
        raise ValueError(f"unknown word mode {words!r}")
    canonical = factorize(sq.f).word()
    if not canonical:
        return [] if sq.source == sq.target else NotFound("identity base map between different sequences")
    if len(canonical) == 1:
        return [sq]
    candidates = [canonical]
    if words == "minimal":
        candidates += [w for w in minimal_words(sq.f) if w != canonical]
    signs = {st.generator.sign for st in sq.target.steps + sq.source.steps}
    sign = signs.pop() if len(signs) == 1 else None
    source_pos = {s: i for i, s in enumerate(sq.source.sieves)}

    def search(gens, r, upper):
        # upper lives on the codomain of gens[r-1]; choose the sequence on its domain
        g = gens[r - 1]
        if r == 1:
            chain = [pullback_sieve(g, s) for s in upper.sieves]
            if all(c in source_pos for c in chain) and chain[0] == sq.source.start \
                    and chain[-1] == sq.source.end:
                return [square_from_sequences(g, sq.source, upper)]
            return None
        chain = []
        for s in upper.sieves:
            c = pullback_sieve(g, s)
            if not chain or chain[-1] != c:
                chain.append(c)
        for lower, _ in sequences_through(chain, sign, limit):
            rest = search(gens, r - 1, lower)
            if rest is not None:
                return rest + [square_from_sequences(g, lower, upper)]
        return None

    for word in candidates:
        gens = [g.as_map() for g in word]
        found = search(gens, len(gens), sq.target)
        if found is not None:
            return found
    tried = "; ".join(" ".join(str(g) for g in w) for w in candidates)
    return NotFound(f"no intermediate horn pushout sequences along: {tried}")


def compose_decomposition(parts: list[SequenceSquare]) -> SequenceSquare:
    out = parts[0]
    for p in parts[1:]:
        out = compose_squares_horizontal(out, p)
    return out


# --- maps out of sieves ------------------------------------------------------------------

class SieveMap:
    """A map ``S -> X`` given on the non-degenerate simplices of ``S``."""

    def __init__(self, X: TruncatedSimplicialSet, sieve: Sieve, values: dict):
        self.X, self.sieve = X, sieve
        self.values = {int(k): int(v) for k, v in values.items()}
        if set(self.values) != set(sieve.members):
            raise SequenceError("values must be given on exactly the members of the sieve")
        if sieve.members and max(popcount(m) for m in sieve.members) - 1 > X.N:
            raise TruncationError("sieve has simplices above the truncation")

    def __eq__(self, other):
        return isinstance(other, SieveMap) and self.sieve == other.sieve and self.values == other.values

    def __hash__(self):
        return hash((self.sieve, tuple(sorted(self.values.items()))))

    def __repr__(self):
        items = ", ".join(f"{vertices_of(k)}:{self.X.name(popcount(k) - 1, v)}"
                          for k, v in sorted(self.values.items(), key=lambda kv: (popcount(kv[0]), kv[0])))
        return f"SieveMap({{{items}}})"

    def evaluate(self, f: MonotoneMap) -> int:
        """Value on an arbitrary simplex ``f: [r] -> [a]`` of the sieve."""
        w = f.image_mask
        if w not in self.values:
            raise SequenceError(f"simplex {f.values} not in the sieve")
        verts = vertices_of(w)
        rank = {v: i for i, v in enumerate(verts)}
        epi = MonotoneMap(f.dom, len(verts) - 1, tuple(rank[v] for v in f.values))
        return self.X.act(self.values[w], epi)

    def violations(self) -> list[str]:
        out = []
        for mask, x in self.values.items():
            if popcount(mask) < 2:
                continue
            d = popcount(mask) - 1
            for i, v in enumerate(vertices_of(mask)):
                if self.X.face(d, i, x) != self.values[mask & ~(1 << v)]:
                    out.append(f"face {i} of simplex {vertices_of(mask)}")
        return out

    def pullback(self, f: MonotoneMap) -> "SieveMap":
        """``self o f`` on ``f^*(S)``."""
        s = pullback_sieve(f, self.sieve)
        vals = {m: self.evaluate(compose(f, mono_from_mask(m, f.dom))) for m in s.members}
        return SieveMap(self.X, s, vals)

    def restrict(self, sieve: Sieve) -> "SieveMap":
        if not sieve.members <= self.sieve.members:
            raise SequenceError("restriction to a larger sieve")
        return SieveMap(self.X, sieve, {m: self.values[m] for m in sieve.members})

    def compose_map(self, alpha: SimplicialMap) -> "SieveMap":
        return SieveMap(alpha.target, self.sieve,
                        {m: int(alpha.components[popcount(m) - 1][x]) for m, x in self.values.items()})

    def to_json(self) -> dict:
        return {"sieve": self.sieve.to_json(),
                "values": [[list(vertices_of(m)), self.X.name(popcount(m) - 1, x)]
                           for m, x in sorted(self.values.items(), key=lambda kv: vertices_of(kv[0]))]}


def simplex_map(X: TruncatedSimplicialSet, a: int, x: int) -> SieveMap:
    """The map ``Delta^a -> X`` picking out ``x`` in ``X_a``."""
    s = full(a)
    return SieveMap(X, s, {m: X.act(x, mono_from_mask(m, a)) for m in s.members})


def enumerate_sieve_maps(X: TruncatedSimplicialSet, sieve: Sieve, over: SieveMap | None = None,
                         alpha: SimplicialMap | None = None, limit: int | None = None):
    """All face-compatible maps ``sieve -> X`` (lying over ``over`` along ``alpha`` if given)."""
    order = sorted(sieve.members, key=lambda m: (popcount(m), m))
    count = 0

    def go(i, vals):
        nonlocal count
        if limit is not None and count >= limit:
            return
        if i == len(order):
            count += 1
            yield SieveMap(X, sieve, vals)
            return
        mask = order[i]
        d = popcount(mask) - 1
        cand = np.ones(X.size(d), dtype=bool)
        if over is not None:
            cand &= alpha.components[d] == over.values[mask]
        if d >= 1:
            for k, v in enumerate(vertices_of(mask)):
                cand &= X.faces[d][k] == vals[mask & ~(1 << v)]
        for x in np.flatnonzero(cand):
            vals[mask] = int(x)
            yield from go(i + 1, vals)
        vals.pop(mask, None)

    yield from go(0, {})


# --- extending lifts along sequences ------------------------------------------------------

def _chosen_lift(lift, gen: Generator, p: LiftingProblem) -> int:
    if isinstance(lift, SignedLiftAssignment):
        if gen.sign is None:
            raise SignConstraintError("signed lifts need signed generators")
        return lift(gen.sign, p)
    return lift(p)


def step_problem(alpha: SimplicialMap, step: Step, u: SieveMap, v: SieveMap) -> LiftingProblem:
    """Restrict the current map along the step's embedding to a horn problem."""
    spec, e = step.generator.spec, step.embedding
    n = spec.n
    slots = tuple(None if k == spec.m else u.evaluate(compose(e, face_map(n - 1, k)))
                  for k in range(n + 1))
    return LiftingProblem(alpha, HornMap(spec, slots, alpha.source), v.evaluate(e))


def extend_lift(lift, seq: HornPushoutSequence, u: SieveMap, v: SieveMap) -> SieveMap:
    """Push the chosen fillers out along ``seq``, starting from ``u: S_0 -> X`` over ``v: S_k -> Y``."""
    alpha = lift.alpha
    if u.sieve != seq.start:
        raise SequenceError("u is not defined on the start of the sequence")
    if v.sieve != seq.end:
        raise SequenceError("v is not defined on the end of the sequence")
    if u.compose_map(alpha) != v.restrict(seq.start):
        raise SequenceError("alpha o u does not agree with v on the start")
    top = max((st.generator.spec.n for st in seq.steps), default=0)
    if top > alpha.source.N:
        raise TruncationError(f"step of dimension {top} exceeds truncation {alpha.source.N}")
    vals = dict(u.values)
    for st, sieve in zip(seq.steps, seq.sieves[:-1]):
        cur = SieveMap(alpha.source, sieve, vals)
        p = step_problem(alpha, st, cur, v)
        h = _chosen_lift(lift, st.generator, p)
        e, m, n = st.embedding, st.generator.spec.m, st.generator.spec.n
        vals[e.image_mask] = h
        vals[compose(e, face_map(n - 1, m)).image_mask] = alpha.source.act(h, face_map(n - 1, m))
    return SieveMap(alpha.source, seq.end, vals)


def is_pushout_extension(lift, seq: HornPushoutSequence, u: SieveMap, v: SieveMap, w: SieveMap) -> bool:
    """Declarative check: ``w`` extends ``u``, lies over ``v``, and on every step's
    simplex equals the chosen filler of the horn problem that ``w`` itself induces."""
    alpha = lift.alpha
    if w.sieve != seq.end or w.restrict(seq.start) != u or w.compose_map(alpha) != v:
        return False
    if w.violations():
        return False
    for st in seq.steps:
        p = step_problem(alpha, st, w, v)
        if w.values[st.embedding.image_mask] != _chosen_lift(lift, st.generator, p):
            return False
    return True


# --- respecting squares -----------------------------------------------------------------

def check_respects_square(lift, sq: SequenceSquare, alpha: SimplicialMap | None = None,
                          limit: int | None = None) -> CheckReport:
    """Left horizontal compatibility of the extended lifts against ``sq``.

    For every ``v: T_l -> Y`` and ``u: T_0 -> X`` over it, extending over the
    source from the pulled-back data must agree with pulling back the
    extension over the target.
    """
    alpha = alpha or lift.alpha
    X, Y = alpha.source, alpha.target
    top = max(sq.source.ambient, sq.target.ambient)
    if top > X.N:
        raise TruncationError(f"square lives in dimension {top} > truncation {X.N}")
    report = CheckReport(f"respects-{sq.kind}-square")
    for v in enumerate_sieve_maps(Y, sq.target.end, limit=limit):
        for u in enumerate_sieve_maps(X, sq.target.start, v.restrict(sq.target.start), alpha, limit):
            report.instances += 1
            upstairs = extend_lift(lift, sq.target, u, v).pullback(sq.f)
            downstairs = extend_lift(lift, sq.source, u.pullback(sq.f), v.pullback(sq.f))
            if upstairs != downstairs:
                report.failures.append({"square": sq.to_json(), "u": u.to_json(), "v": v.to_json()})
    return report


@dataclass(frozen=True)
class IotaStar:
    length: int
    generator: Generator
    jprime: int
    mstar: int
    canonical: bool


def iota_star(sq: SequenceSquare) -> IotaStar:
    """The generator of the final step of a degeneracy square into a length-one target.

    ``canonical`` says whether the source first fills faces ``j'`` and
    ``j'+1`` of the pulled-back top simplex (as many as are missing) and only
    then the top simplex along the expected horn.  Other orders also give
    pullback squares; for those the final horn is reported as found.
    """
    if len(sq.target) != 1:
        raise SequenceError("target must have length 1")
    if sq.kind != "degeneracy":
        raise SequenceError("not a degeneracy square")
    j = factorize(sq.f).degeneracy_indices[0]
    st = sq.target.steps[0]
    e, spec = st.embedding, st.generator.spec
    if j not in e.values:
        raise SequenceError(f"index {j} does not factor through the embedded simplex")
    jp = e.values.index(j)
    n, m = spec.n, spec.m
    top = 0
    for v, w in enumerate(sq.f.values):
        if w in e.values:
            top |= 1 << v
    verts = vertices_of(top)
    face_of = {top & ~(1 << v): i for i, v in enumerate(verts)}
    last = sq.source.steps[-1]
    added = [face_of.get(x.embedding.image_mask) for x in sq.source.steps[:-1]]
    if jp == m:
        expected_len = 2
        mstar = ({jp, jp + 1} - set(added)).pop() if len(added) == 1 and added[0] in (jp, jp + 1) else None
    else:
        expected_len = 3
        mstar = m if m < jp else m + 1
    canonical = (len(sq.source) == expected_len and last.embedding.image_mask == top
                 and sorted(added) == sorted({jp, jp + 1} - {mstar} if jp != m else added)
                 and all(a in (jp, jp + 1) for a in added)
                 and mstar is not None and last.generator.spec == HornSpec(n + 1, mstar))
    return IotaStar(len(sq.source), last.generator, jp, last.generator.spec.m, canonical)


def _admissible(spec: HornSpec, preferred: str) -> list[str]:
    return [preferred] if sign_allowed(spec, preferred) else [sg for sg in "+-" if sign_allowed(spec, sg)]


def degeneracy_squares(target: HornPushoutSequence, j: int) -> list[SequenceSquare]:
    """All degeneracy squares over ``s_j`` into a length-one sequence.

    For a signed target, earlier source steps take the target's sign where
    their horn admits it; the final step is tried with every admissible sign,
    so squares outside the signed subcategory are produced too.
    """
    if len(target) != 1:
        raise SequenceError("target must have length 1")
    f = degeneracy_map(target.ambient, j)
    sign = target.steps[0].generator.sign
    plain = squares_over(f, target, None)
    if sign is None:
        return plain
    out = []
    for sq in plain:
        *head, last = sq.source.steps
        head = [Step(Generator(st.generator.spec, _admissible(st.generator.spec, sign)[0]), st.embedding)
                for st in head]
        for sg in "+-":
            if sign_allowed(last.generator.spec, sg):
                tail = Step(Generator(last.generator.spec, sg), last.embedding)
                out.append(SequenceSquare(f, sq.mu, HornPushoutSequence(sq.source.start, head + [tail]),
                                          target))
    return out


def face_squares(target: HornPushoutSequence, i: int) -> list[SequenceSquare]:
    signs = {st.generator.sign for st in target.steps}
    sign = signs.pop() if len(signs) == 1 else None
    return squares_over(face_map(target.ambient - 1, i), target, sign)


def in_D_pm(sq: SequenceSquare) -> bool:
    """Whether a degeneracy square lies in the signed subcategory: ``iota*`` keeps the sign."""
    if sq.kind != "degeneracy" or len(sq.target) != 1:
        return sq.kind == "face"
    try:
        star = iota_star(sq)
    except SequenceError:
        return True
    return star.generator.sign == sq.target.steps[0].generator.sign


# --- degenerate-preferring squares ---------------------------------------------------------

def _epis(n: int):
    for b in range(n):
        for f in monotone_maps(n, b):
            if f.is_epi():
                yield f


def check_D_square(lift: LiftAssignment, s: MonotoneMap, spec: HornSpec, alpha: SimplicialMap,
                   z: int, f: int) -> CheckReport:
    """``lift(z s iota, f s) == z s`` for one square of the degenerate-preferring double category."""
    X, Y = alpha.source, alpha.target
    if not s.is_epi() or s.is_identity():
        raise SequenceError("s must be a non-identity epimorphism")
    if s.dom != spec.n:
        raise SequenceError("s must start at the horn's dimension")
    if int(alpha.components[s.cod][z]) != int(f):
        raise LiftingError("alpha(z) != f: the rectangle does not commute")
    n = spec.n
    zs = X.act(z, s)
    slots = tuple(None if k == spec.m else X.act(z, compose(s, face_map(n - 1, k))) for k in range(n + 1))
    p = LiftingProblem(alpha, HornMap(spec, slots, X), Y.act(f, s))
    report = CheckReport("D-square", instances=1)
    got = lift(p)
    if got != zs:
        report.failures.append({**p.encode(), "s": list(s.values), "z": X.name(s.cod, z),
                                "lift": X.name(n, got), "expected": X.name(n, zs)})
    return report


def check_D_squares(alpha: SimplicialMap, lift: LiftAssignment, maxdim: int) -> CheckReport:
    X = alpha.source
    if maxdim > X.N:
        raise TruncationError(f"maxdim {maxdim} exceeds truncation {X.N}")
    total = CheckReport("D-squares")
    for n in range(1, maxdim + 1):
        for s in _epis(n):
            for m in range(n + 1):
                for z in range(X.size(s.cod)):
                    r = check_D_square(lift, s, HornSpec(n, m), alpha, z, int(alpha.components[s.cod][z]))
                    total.instances += r.instances
                    total.failures.extend(r.failures)
    return total


# --- sweeps ------------------------------------------------------------------------------

def length_one_sequences(max_ambient: int, sign_mode: bool = False, min_ambient: int = 1):
    """Every length-one horn pushout sequence over ``Delta^b``, ``b <= max_ambient``."""
    for b in range(min_ambient, max_ambient + 1):
        for s in all_sieves(b):
            for spec, e in attachable_horns(s):
                signs = [sg for sg in "+-" if sign_allowed(spec, sg)] if sign_mode else [None]
                for sg in signs:
                    yield HornPushoutSequence(s, [Step(Generator(spec, sg), e)])


def sweep_face_squares(lift, targets, limit: int | None = None) -> CheckReport:
    report = CheckReport("face-squares")
    for tau in targets:
        if tau.ambient < 1:
            continue
        for i in range(tau.ambient + 1):
            for sq in face_squares(tau, i):
                r = check_respects_square(lift, sq, limit=limit)
                report.instances += r.instances
                report.failures.extend(r.failures)
    return report


def sweep_degeneracy_squares(lift, targets, signed_only: bool = False, limit: int | None = None,
                             canonical_only: bool = True) -> CheckReport:
    """Check every degeneracy square into each length-one target.

    Non-canonical sources (see :func:`iota_star`) are skipped by default:
    lifts satisfying the horn-level conditions need not respect them.
    """
    report = CheckReport("degeneracy-squares")
    for tau in targets:
        if tau.ambient + 1 > lift.alpha.source.N:
            continue
        for j in range(tau.ambient + 1):
            for sq in degeneracy_squares(tau, j):
                if signed_only and not in_D_pm(sq):
                    continue
                if canonical_only and j in tau.steps[0].embedding.values and not iota_star(sq).canonical:
                    continue
                r = check_respects_square(lift, sq, limit=limit)
                report.instances += r.instances
                report.failures.extend(r.failures)
    return report


def probe_decompositions(max_ambient: int, max_target_len: int = 1, limit: int = 200,
                         words: str = "canonical", min_ambient: int = 0):
    """Try to decompose every composite pullback square buildable at small scale.

    Targets are all sequences of length at most ``max_target_len`` over
    ``Delta^b`` with ``min_ambient <= b <= max_ambient``; sources are found by
    gap filling.  Returns ``(found, not_found)`` lists of squares.
    """
    found, missing = [], []
    for tau in _short_sequences(min_ambient, max_ambient, max_target_len):
        for a in range(0, max_ambient + 1):
            for f in monotone_maps(a, tau.ambient):
                if word_length(f) < 2:
                    continue
                for sq in squares_over(f, tau, None, limit):
                    res = decompose_horizontal(sq, limit, words)
                    (missing if isinstance(res, NotFound) else found).append(sq)
    return found, missing


def _short_sequences(lo: int, hi: int, max_len: int):
    for b in range(lo, hi + 1):
        for s in all_sieves(b):
            frontier = [identity_sequence(s)]
            for _ in range(max_len + 1):
                nxt = []
                for seq in frontier:
                    yield seq
                    if len(seq) < max_len:
                        for spec, e in attachable_horns(seq.end):
                            nxt.append(HornPushoutSequence(seq.start, seq.steps + (Step(Generator(spec), e),)))
                frontier = nxt


def count_square_instances_bruteforce(alpha: SimplicialMap, sq: SequenceSquare) -> int:
    """Number of ``(u, v)`` pairs :func:`check_respects_square` visits.

    Plain backtracking over element indices, vertices first, rejecting a
    partial assignment as soon as one of its simplices has a wrong face.
    """
    total = 0
    for v in _backtrack_maps(alpha, alpha.target, sq.target.end):
        total += sum(1 for _ in _backtrack_maps(alpha, alpha.source, sq.target.start, v))
    return total


def _backtrack_maps(alpha: SimplicialMap, Z: TruncatedSimplicialSet, sieve: Sieve, over: dict | None = None):
    order = sorted(sieve.members, key=lambda mk: (popcount(mk), mk))
    vals: dict[int, int] = {}

    def go(i):
        if i == len(order):
            yield dict(vals)
            return
        mk = order[i]
        d = popcount(mk) - 1
        for x in range(Z.size(d)):
            if over is not None and int(alpha.components[d][x]) != over[mk]:
                continue
            if d and any(Z.face(d, k, x) != vals[mk & ~(1 << v)] for k, v in enumerate(vertices_of(mk))):
                continue
            vals[mk] = x
            yield from go(i + 1)
        vals.pop(mk, None)

    yield from go(0)
