"""Decidable sieves of the representable ``Delta^a``.

A sieve is stored as the set of its non-degenerate simplices, each one a
nonempty vertex subset of ``{0..a}`` encoded as a bitmask.  Degenerate
simplices are never materialised: a map ``[r] -> [a]`` factors through the
sieve iff its image mask is a member.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .delta import MonotoneMap, mono_from_mask

MAX_AMBIENT = 62


class SieveError(ValueError):
    pass


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_of(vertices) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def vertices_of(mask: int) -> tuple[int, ...]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


def submasks(mask: int):
    """Nonempty submasks of ``mask`` (including ``mask`` itself)."""
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


def facet_masks(mask: int) -> list[int]:
    """Codimension-one faces; entry ``i`` drops the ``i``-th smallest vertex."""
    return [mask & ~(1 << v) for v in vertices_of(mask)]


@dataclass(frozen=True)
class Sieve:
    ambient: int
    members: frozenset[int]

    def __post_init__(self):
        if not 0 <= self.ambient <= MAX_AMBIENT:
            raise SieveError(f"ambient {self.ambient} outside [0, {MAX_AMBIENT}]")
        top = (1 << (self.ambient + 1)) - 1
        for m in self.members:
            if m <= 0 or m & ~top:
                raise SieveError(f"member {m:b} is not a nonempty subset of [0..{self.ambient}]")
        for m in self.members:
            if popcount(m) > 1:
                for face in facet_masks(m):
                    if face not in self.members:
                        raise SieveError(
                            f"not downward closed: {vertices_of(m)} present, face {vertices_of(face)} missing")

    def __contains__(self, mask: int) -> bool:
        return mask in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __le__(self, other: "Sieve") -> bool:
        _same_ambient(self, other)
        return self.members <= other.members

    def __lt__(self, other: "Sieve") -> bool:
        _same_ambient(self, other)
        return self.members < other.members

    def factors(self, f: MonotoneMap) -> bool:
        """Whether the simplex ``f : [r] -> [a]`` lies in the sieve."""
        if f.cod != self.ambient:
            raise SieveError("map codomain differs from ambient")
        return f.image_mask in self.members

    def sorted_members(self) -> list[tuple[int, ...]]:
        return sorted(vertices_of(m) for m in self.members)

    def __repr__(self):
        return f"Sieve({self.ambient}, {self.sorted_members()})"

    def to_json(self) -> dict:
        return {"ambient": self.ambient, "members": [list(v) for v in self.sorted_members()]}

    @classmethod
    def from_json(cls, data: dict) -> "Sieve":
        return cls(int(data["ambient"]), frozenset(mask_of(v) for v in data["members"]))


def _same_ambient(s: Sieve, t: Sieve):
    if s.ambient != t.ambient:
        raise SieveError(f"ambient mismatch: {s.ambient} vs {t.ambient}")


@lru_cache(maxsize=None)
def _all_submasks(mask: int) -> frozenset[int]:
    return frozenset(submasks(mask))


def generated(ambient: int, masks) -> Sieve:
    """Smallest sieve containing the given vertex subsets."""
    out = set()
    for m in masks:
        out |= _all_submasks(m)
    return Sieve(ambient, frozenset(out))


def empty(a: int) -> Sieve:
    return Sieve(a, frozenset())


def full(a: int) -> Sieve:
    return Sieve(a, _all_submasks((1 << (a + 1)) - 1))


def simplex_sieve(f: MonotoneMap) -> Sieve:
    """The sieve generated by the simplex ``f`` (all of ``Delta^n`` for an injection)."""
    return generated(f.cod, [f.image_mask])


def face_sieve(n: int, k: int) -> Sieve:
    if n < 1 or not 0 <= k <= n:
        raise SieveError(f"face {k} out of range for Delta^{n}")
    return generated(n, [((1 << (n + 1)) - 1) & ~(1 << k)])


@dataclass(frozen=True)
class HornSpec:
    n: int
    m: int

    def __post_init__(self):
        if self.n < 1:
            raise SieveError("horns start in dimension 1")
        if not 0 <= self.m <= self.n:
            raise SieveError(f"missing face {self.m} out of range for dimension {self.n}")

    @property
    def inner(self) -> bool:
        return 0 < self.m < self.n

    def __str__(self):
        return f"L{self.n},{self.m}"


@lru_cache(maxsize=None)
def _horn(n: int, m: int) -> Sieve:
    return generated(n, [((1 << (n + 1)) - 1) & ~(1 << k) for k in range(n + 1) if k != m])


def horn(spec: HornSpec | tuple[int, int]) -> Sieve:
    if not isinstance(spec, HornSpec):
        spec = HornSpec(*spec)
    return _horn(spec.n, spec.m)


def union(s: Sieve, t: Sieve) -> Sieve:
    _same_ambient(s, t)
    return Sieve(s.ambient, s.members | t.members)


def intersect(s: Sieve, t: Sieve) -> Sieve:
    _same_ambient(s, t)
    return Sieve(s.ambient, s.members & t.members)


def image_mask(f: MonotoneMap, mask: int) -> int:
    out = 0
    for v in vertices_of(mask):
        out |= 1 << f.values[v]
    return out


def pullback_sieve(f: MonotoneMap, t: Sieve) -> Sieve:
    """``f^*(T)``: simplices of ``Delta^a`` whose image under ``f`` lies in ``T``."""
    if f.cod != t.ambient:
        raise SieveError(f"map codomain {f.cod} differs from ambient {t.ambient}")
    top = (1 << (f.dom + 1)) - 1
    return Sieve(f.dom, frozenset(m for m in submasks(top) if image_mask(f, m) in t.members))


def nondegenerate_count(s: Sieve) -> int:
    return len(s.members)


def attach_horn(s: Sieve, spec: HornSpec, e: MonotoneMap) -> Sieve:
    """Glue ``Delta^n`` onto ``S`` along the horn, via the embedding ``e``.

    The square must be a pullback as well as a pushout, i.e. ``e^*(S)`` has
    to be exactly the horn.
    """
    if not isinstance(spec, HornSpec):
        spec = HornSpec(*spec)
    if e.cod != s.ambient or e.dom != spec.n:
        raise SieveError(f"embedding {e!r} does not fit {spec} into Delta^{s.ambient}")
    if not e.is_mono():
        raise SieveError(f"embedding {e!r} is not injective")
    if pullback_sieve(e, s) != horn(spec):
        raise SieveError(f"pullback of the sieve along {e.values} is not the horn {spec}")
    return Sieve(s.ambient, s.members | _all_submasks(e.image_mask))


def attachable_horns(s: Sieve):
    """All ``(spec, embedding)`` pairs that validly attach a horn to ``S``.

    A simplex ``V`` not in ``S`` qualifies exactly when all but one of its
    facets are in ``S``; the missing facet's position is the horn index.
    """
    top = (1 << (s.ambient + 1)) - 1
    for mask in submasks(top):
        if mask in s.members or popcount(mask) < 2:
            continue
        faces = facet_masks(mask)
        missing = [i for i, fm in enumerate(faces) if fm not in s.members]
        if len(missing) == 1:
            yield HornSpec(len(faces) - 1, missing[0]), mono_from_mask(mask, s.ambient)


def all_sieves(a: int) -> list[Sieve]:
    """Every sieve of ``Delta^a`` (the empty one included), in a fixed order."""
    top = (1 << (a + 1)) - 1
    masks = sorted(submasks(top), key=lambda m: (popcount(m), m))
    out = []

    def grow(idx: int, members: frozenset[int]):
        if idx == len(masks):
            out.append(Sieve(a, members))
            return
        m = masks[idx]
        grow(idx + 1, members)
        if all(fm in members for fm in facet_masks(m)) or popcount(m) == 1:
            grow(idx + 1, members | {m})

    grow(0, frozenset())
    return out
