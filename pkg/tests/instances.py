"""Hand-written instances used by the tests but not shipped as generators."""
from __future__ import annotations

from itertools import combinations

import numpy as np

from effkan.delta import degeneracy_map, face_map
from effkan.salg import TruncatedSimplicialSet


def z2_two_cocycles(N: int) -> TruncatedSimplicialSet:
    """Level ``n`` holds the Z/2-valued 2-cocycles on the vertex triples of ``[n]``.

    A simplicial abelian group whose 2-dimensional horns have two fillers
    each, so mutated lifts can still be lifts.
    """
    triples = [list(combinations(range(n + 1), 3)) for n in range(N + 1)]
    quads = [list(combinations(range(n + 1), 4)) for n in range(N + 1)]
    carriers = []
    for n in range(N + 1):
        idx = {t: i for i, t in enumerate(triples[n])}
        ok = []
        for c in range(1 << len(triples[n])):
            if all(sum(c >> idx[t] & 1 for t in combinations(q, 3)) % 2 == 0 for q in quads[n]):
                ok.append(c)
        carriers.append(ok)
    where = [{c: i for i, c in enumerate(level)} for level in carriers]

    def pull(n_from, n_to, g):
        # cochain on [n_from] pulled back along g: [n_to] -> [n_from]
        idx = {t: i for i, t in enumerate(triples[n_from])}
        out = np.zeros(len(carriers[n_from]), dtype=np.int64)
        for k, c in enumerate(carriers[n_from]):
            acc = 0
            for i, t in enumerate(triples[n_to]):
                img = tuple(g.values[v] for v in t)
                if len(set(img)) == 3 and c >> idx[img] & 1:
                    acc |= 1 << i
            out[k] = where[n_to][acc]
        return out

    faces = [None] + [np.stack([pull(n, n - 1, face_map(n - 1, i)) for i in range(n + 1)])
                      for n in range(1, N + 1)]
    degens = [np.stack([pull(n, n + 1, degeneracy_map(n, i)) for i in range(n + 1)])
              for n in range(N)]
    mu = []
    for n in range(N + 1):
        vals = np.array(carriers[n], dtype=np.int64)
        xor = vals[:, None, None] ^ vals[None, :, None] ^ vals[None, None, :]
        lookup = {c: i for i, c in enumerate(carriers[n])}
        mu.append(np.vectorize(lookup.__getitem__, otypes=[np.int64])(xor))
    names = [[format(c, f"0{len(triples[n])}b") if triples[n] else "0" for c in carriers[n]]
             for n in range(N + 1)]
    return TruncatedSimplicialSet(names, faces, degens, mu)
