"""
Which register rotations a hop needs
====================================

Beyond one dimension a hop along a slow axis can carry a particle past
several others in key order.  Each candidate rotation plan is checked against
the brute-force hop matrix on sorted tuples, counting mismatched entries.
"""

# %%
from fermlap.laplacian import plan_search, prune_redundant_rotations

for case in [(3, 3, 1), (3, 2, 2), (3, 3, 2), (4, 2, 2)]:
    print(case)
    for check in plan_search(*case):
        print(f"   {check.plan.label:20s} checked at n={check.n}: {check.mismatched} mismatched entries")
    print("   chosen:", prune_redundant_rotations(*case).describe())
