"""
Filling horns in the nerve of Z/2
=================================

"""

from effkan import kan, salg

# the nerve of Z/2, tabulated up to dimension 3
X = salg.nerve_abelian(salg.cyclic_group(2), 3)
beta = salg.section_from_point(X)
alpha = beta.alpha
print([X.size(n) for n in range(4)])

# a triangle with edges (1) and (1) on faces 0 and 2; the inner face is missing
p = kan.make_problem(alpha, 2, 1, {0: "(1)", 2: "(1)"})
lift = kan.malcev_assignment(alpha, beta)
print("filler", X.name(2, lift(p)))

# the helper simplices in the order they appear, starting at beta(y)
for k, w in kan.trace_malcev(alpha, beta, p):
    print(f"  w_{k} =", X.name(2, w))

# an outer horn whose filler can be degenerate
q = kan.make_problem(alpha, 1, 0, {1: "()"})
print(kan.find_degenerate_solutions(q), X.name(1, lift(q)))

# exhaustive sweeps
for report in (kan.check_lifts(alpha, lift, 3),
               kan.check_degenerate_preferring(alpha, lift, 3),
               kan.check_symmetric_effective(alpha, lift, 2)):
    print(report.summary())
