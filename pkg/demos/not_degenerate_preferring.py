"""
A symmetric effective lift that does not prefer degenerate fillers
==================================================================

"""

from effkan import kan, salg

X = salg.nerve_abelian(salg.cyclic_group(2), 4)
beta = salg.section_from_point(X)
alpha = beta.alpha
lift = kan.malcev_assignment(alpha, beta)

# change the answer on one 1-dimensional horn to the non-degenerate edge
bent, p = kan.symmetric_not_dp_witness(alpha, lift)
print("changed problem:", p.encode())
print("old", X.name(1, lift(p)), "new", X.name(1, bent(p)))

# still a lift, still symmetric effective
print(kan.check_lifts(alpha, bent, 3).summary())
print(kan.check_symmetric_effective(alpha, bent, 3).summary())

# but the degenerate filler is no longer chosen, exactly once
report = kan.check_degenerate_preferring(alpha, bent, 3)
print(report.summary())
print(report.failures)
