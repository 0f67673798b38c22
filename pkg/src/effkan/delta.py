"""The simplex category: monotone maps [a] -> [b] and their generators.

A map is stored by its full value sequence, so equality of maps is value
equality.  ``compose(g, f)`` is "g after f".  Generator words produced by
:meth:`CanonicalFactorization.word` are listed innermost-first, i.e. the
first generator in the list is applied first.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement


class DeltaError(ValueError):
    pass


@dataclass(frozen=True)
class MonotoneMap:
    dom: int
    cod: int
    values: tuple[int, ...]

    def __post_init__(self):
        if self.dom < 0 or self.cod < 0:
            raise DeltaError(f"negative object in {self!r}")
        if len(self.values) != self.dom + 1:
            raise DeltaError(f"expected {self.dom + 1} values, got {self.values}")
        if any(v < 0 or v > self.cod for v in self.values):
            raise DeltaError(f"value out of range [0, {self.cod}] in {self.values}")
        if any(a > b for a, b in zip(self.values, self.values[1:])):
            raise DeltaError(f"not order-preserving: {self.values}")

    def __call__(self, k: int) -> int:
        return self.values[k]

    def __repr__(self):
        return f"MonotoneMap([{self.dom}]->[{self.cod}], {self.values})"

    @property
    def image(self) -> frozenset[int]:
        return frozenset(self.values)

    @property
    def image_mask(self) -> int:
        mask = 0
        for v in self.values:
            mask |= 1 << v
        return mask

    def is_mono(self) -> bool:
        return len(set(self.values)) == len(self.values)

    def is_epi(self) -> bool:
        return len(set(self.values)) == self.cod + 1

    def is_identity(self) -> bool:
        return self.dom == self.cod and self.values == tuple(range(self.dom + 1))

    def to_json(self) -> dict:
        return {"dom": self.dom, "cod": self.cod, "values": list(self.values)}

    @classmethod
    def from_json(cls, data: dict) -> "MonotoneMap":
        return cls(int(data["dom"]), int(data["cod"]), tuple(int(v) for v in data["values"]))


def identity(n: int) -> MonotoneMap:
    return MonotoneMap(n, n, tuple(range(n + 1)))


def face_map(n: int, i: int) -> MonotoneMap:
    """``d_i : [n] -> [n+1]``, the injection skipping ``i`` (0 <= i <= n+1)."""
    if n < 0 or not 0 <= i <= n + 1:
        raise DeltaError(f"face index {i} out of range for [{n}] -> [{n + 1}]")
    return MonotoneMap(n, n + 1, tuple(k if k < i else k + 1 for k in range(n + 1)))


def degeneracy_map(n: int, i: int) -> MonotoneMap:
    """``s_i : [n+1] -> [n]``, the surjection hitting ``i`` twice (0 <= i <= n)."""
    if n < 0 or not 0 <= i <= n:
        raise DeltaError(f"degeneracy index {i} out of range for [{n + 1}] -> [{n}]")
    return MonotoneMap(n + 1, n, tuple(k if k <= i else k - 1 for k in range(n + 2)))


def compose(g: MonotoneMap, f: MonotoneMap) -> MonotoneMap:
    """``g o f``."""
    if f.cod != g.dom:
        raise DeltaError(f"cannot compose {g!r} after {f!r}")
    return MonotoneMap(f.dom, g.cod, tuple(g.values[v] for v in f.values))


def compose_all(*maps: MonotoneMap) -> MonotoneMap:
    """``compose_all(h, g, f) == h o g o f``."""
    if not maps:
        raise DeltaError("nothing to compose")
    out = maps[-1]
    for g in reversed(maps[:-1]):
        out = compose(g, out)
    return out


@dataclass(frozen=True)
class Generator:
    kind: str  # "d" or "s"
    n: int
    index: int

    def as_map(self) -> MonotoneMap:
        if self.kind == "d":
            return face_map(self.n, self.index)
        return degeneracy_map(self.n, self.index)

    def __str__(self):
        return f"{self.kind}{self.index}"


@dataclass(frozen=True)
class CanonicalFactorization:
    """``f = d_{i_r} o ... o d_{i_1} o s_{j_1} o ... o s_{j_t}``.

    ``face_indices = (i_1 < ... < i_r)`` are the values missed by ``f`` and
    ``degeneracy_indices = (j_1 < ... < j_t)`` the positions with
    ``f(j) == f(j+1)``.  The degeneracies act first, largest index
    innermost; then the faces, smallest index innermost.
    """

    dom: int
    cod: int
    face_indices: tuple[int, ...]
    degeneracy_indices: tuple[int, ...]

    @property
    def middle(self) -> int:
        return self.dom - len(self.degeneracy_indices)

    def word(self) -> list[Generator]:
        gens = []
        dim = self.dom
        for j in reversed(self.degeneracy_indices):
            dim -= 1
            gens.append(Generator("s", dim, j))
        for i in self.face_indices:
            gens.append(Generator("d", dim, i))
            dim += 1
        return gens

    def epi_part(self) -> MonotoneMap:
        out = identity(self.dom)
        for j in reversed(self.degeneracy_indices):
            out = compose(degeneracy_map(out.cod - 1, j), out)
        return out

    def mono_part(self) -> MonotoneMap:
        out = identity(self.middle)
        for i in self.face_indices:
            out = compose(face_map(out.cod, i), out)
        return out

    def recompose(self) -> MonotoneMap:
        out = identity(self.dom)
        for gen in self.word():
            out = compose(gen.as_map(), out)
        return out

    @property
    def is_mono(self) -> bool:
        return not self.degeneracy_indices

    @property
    def is_epi(self) -> bool:
        return not self.face_indices


def factorize(f: MonotoneMap) -> CanonicalFactorization:
    faces = tuple(v for v in range(f.cod + 1) if v not in f.image)
    degens = tuple(j for j in range(f.dom) if f.values[j] == f.values[j + 1])
    return CanonicalFactorization(f.dom, f.cod, faces, degens)


def monotone_maps(a: int, b: int):
    """All order-preserving maps ``[a] -> [b]``."""
    for vals in combinations_with_replacement(range(b + 1), a + 1):
        yield MonotoneMap(a, b, vals)


def mono_from_mask(mask: int, ambient: int) -> MonotoneMap:
    """The injection ``[k] -> [ambient]`` whose image is the vertex set ``mask``."""
    verts = tuple(v for v in range(ambient + 1) if mask >> v & 1)
    if not verts:
        raise DeltaError("empty vertex set")
    return MonotoneMap(len(verts) - 1, ambient, verts)


# --- simplicial identities ------------------------------------------------

def _identity_instances(max_n: int):
    """Yield ``(label, lhs, rhs)`` for every displayed identity instance."""
    d, s = face_map, degeneracy_map
    for n in range(max_n + 1):
        # s_j o d_k on [n] -> [n+1] -> [n]
        for j in range(n + 1):
            for k in range(n + 2):
                lhs = compose(s(n, j), d(n, k))
                if k > j + 1:
                    rhs = compose(d(n - 1, k - 1), s(n - 1, j))
                    case = "k>j+1"
                elif k in (j, j + 1):
                    rhs = identity(n)
                    case = "k in {j,j+1}"
                else:
                    rhs = compose(d(n - 1, k), s(n - 1, j - 1))
                    case = "k<j"
                yield f"s{j}.d{k} ({case}) on [{n}]", lhs, rhs
        # d_j o d_k = d_{k+1} o d_j for k >= j, on [n] -> [n+2]
        for j in range(n + 2):
            for k in range(j, n + 1):
                yield (f"d{j}.d{k} = d{k + 1}.d{j} on [{n}]",
                       compose(d(n + 1, j), d(n, k)),
                       compose(d(n + 1, k + 1), d(n, j)))
        # s_j o s_k = s_k o s_{j+1} for j >= k, on [n+2] -> [n]
        for j in range(n + 1):
            for k in range(j + 1):
                yield (f"s{j}.s{k} = s{k}.s{j + 1} on [{n + 2}]",
                       compose(s(n, j), s(n + 1, k)),
                       compose(s(n, k), s(n + 1, j + 1)))


@dataclass
class IdentityReport:
    checked: int
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_simplicial_identities(max_n: int) -> IdentityReport:
    if max_n < 1:
        raise DeltaError("max_n must be at least 1")
    checked = 0
    bad = []
    for label, lhs, rhs in _identity_instances(max_n):
        checked += 1
        if lhs != rhs:
            bad.append(f"{label}: {lhs.values} != {rhs.values}")
    return IdentityReport(checked, bad)


def commutation_witness(j: int, k: int, kprime: int, n: int) -> MonotoneMap:
    """The map ``f`` with ``s_j o d_k o s_k' = f o s_j`` on ``[n+1]``.

    Valid for ``k`` not in ``{j, j+1}`` and ``k' in {k-1, k}``; these are the
    rewrites used to push degeneracies through the Malcev helper steps.
    """
    d, s = face_map, degeneracy_map
    if k > j + 1:
        return compose(d(n - 1, k - 1), s(n - 1, kprime - 1))
    if k < j:
        return compose(d(n - 1, k), s(n - 1, kprime))
    raise DeltaError("k must avoid {j, j+1}")


def word_length(f: MonotoneMap) -> int:
    fac = factorize(f)
    return len(fac.face_indices) + len(fac.degeneracy_indices)


def minimal_words(f: MonotoneMap):
    """Every shortest generator word for ``f``, innermost-first.

    The canonical word is one of them; the others come from rewriting with
    the simplicial identities.
    """
    length = word_length(f)
    if length == 0:
        yield []
        return
    b = f.cod
    for i in range(b + 1):
        if i not in f.image:
            h = MonotoneMap(f.dom, b - 1, tuple(v if v < i else v - 1 for v in f.values))
            for w in minimal_words(h):
                yield w + [Generator("d", b - 1, i)]
    for i in range(b + 1):
        pre = [k for k, v in enumerate(f.values) if v == i]
        for cut in range(len(pre) + 1):
            vals = tuple(v if v < i else v + 1 for v in f.values)
            vals = tuple(i if k in pre[:cut] else (i + 1 if k in pre else vals[k]) for k in range(f.dom + 1))
            h = MonotoneMap(f.dom, b + 1, vals)
            if word_length(h) == length - 1:
                for w in minimal_words(h):
                    yield w + [Generator("s", b, i)]
