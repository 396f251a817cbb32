"""Exact information tests on the Hardy-Weinberg curve with three trials.

Trinomial data can be tested against psi(0.3) in two ways: against every
trinomial alternative (unrestricted) or only against other Hardy-Weinberg
distributions (restricted). With n = 3 there are ten outcomes, so both
tests can be written out in full.
"""

import numpy as np

from infotests import COARSE_MHDE_XTOL, build_exact_test, hw_restricted_mhde, hw_tables

TAU_BAR = 0.3

unrestricted, restricted = hw_tables(3, TAU_BAR, mhde_xtol=COARSE_MHDE_XTOL)

print("outcome    P0(x)     i(x; all)  tau_check  i(x; HW)")
for x, p, iu, ir in zip(unrestricted.outcomes, unrestricted.null_probs, unrestricted.statistics, restricted.statistics):
    tau = hw_restricted_mhde(x, COARSE_MHDE_XTOL)
    print(f"{str(tuple(x.tolist())):<10} {p:.6f}  {iu:.6f}   {tau:.7f}  {ir:.6f}")

# Size 0.1 needs randomization on a discrete sample space.
for name, table in (("unrestricted", unrestricted), ("restricted", restricted)):
    test = build_exact_test(table, 0.1)
    certain = [tuple(int(v) for v in table.outcomes[i]) for i in test.certain_region]
    boundary = [tuple(int(v) for v in table.outcomes[i]) for i in test.boundary_group]
    print(f"\n{name}: reject {certain} always")
    print(f"  and {boundary} with probability {test.gamma:.7f}")

# The restricted estimate above uses a coarse bounded search; the exact
# maximizer differs in the sixth decimal.
x = np.array([0, 2, 1])
print(f"\ncoarse {hw_restricted_mhde(x, COARSE_MHDE_XTOL):.9f} vs exact {hw_restricted_mhde(x):.9f}")
