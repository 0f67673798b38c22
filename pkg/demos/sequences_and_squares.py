"""
Horn pushout sequences, squares and extended lifts
==================================================

"""

from effkan import awfs, kan, salg
from effkan.delta import MonotoneMap, identity
from effkan.sieve import HornSpec, generated, mask_of

# {0,1} -> add edge {1,2} -> add the triangle
s0 = generated(2, [mask_of([0, 1])])
s1 = generated(2, [mask_of([0, 1]), mask_of([1, 2])])
s2 = generated(2, [mask_of([0, 1, 2])])
seq = awfs.HornPushoutSequence(s0, [awfs.step_between(s0, s1), awfs.step_between(s1, s2)])
print(seq)
print("count law:", seq.count_law_holds())

# stacking two identity squares gives reindexing (0, 1, 2)
first = awfs.HornPushoutSequence(s0, seq.steps[:1])
second = awfs.HornPushoutSequence(s1, seq.steps[1:])
p = awfs.square_from_sequences(identity(2), first, first)
q = awfs.square_from_sequences(identity(2), second, second)
print(awfs.compose_squares_vertical(p, q).mu)

# extend a map on {0,1} along the sequence in the nerve of Z/2
X = salg.nerve_abelian(salg.cyclic_group(2), 3)
beta = salg.section_from_point(X)
lift = kan.malcev_assignment(beta.alpha, beta)
v = next(awfs.enumerate_sieve_maps(beta.alpha.target, s2))
u = next(m for m in awfs.enumerate_sieve_maps(X, s0) if m.values[mask_of([0, 1])] == X.index(1, "(1)"))
print(awfs.extend_lift(lift, seq, u, v))

# degeneracy squares into the horn inclusion L2,2 along s_0
tau = awfs.horn_sequence(HornSpec(2, 2))
for sq in awfs.degeneracy_squares(tau, 0):
    star = awfs.iota_star(sq)
    print(star.canonical, [str(st.generator.spec) for st in sq.source.steps])

# a composite base map split into a degeneracy and a face square
f = MonotoneMap(1, 1, (0, 0))
target = awfs.HornPushoutSequence(generated(1, [1]), [awfs.Step(awfs.Generator(HornSpec(1, 0)), identity(1))])
[sq] = awfs.squares_over(f, target)
print([part.kind for part in awfs.decompose_horizontal(sq)])
