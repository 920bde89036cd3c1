"""
Switching on a potential
========================

Starting from the free fermions, a single-site well is ramped in as
``T + s V``.  The table lists the gap above the (two-fold) free ground level
along the ramp for a few well depths.
"""

# %%
from fermlap import ProblemSpec, build_parts
from fermlap.oracle import gap_flow

for depth in (0.1, 0.2, 0.5, 1.0, 2.0):
    parts = build_parts(ProblemSpec(A=2, n=2, D=1, Q=1e3, potential=f"well:depth={depth},site=0"))
    flow = gap_flow(parts.kinetic + parts.Q * parts.penalty, parts.potential, 11, 4, parts.valid_indices())
    print(f"depth {depth:4.1f}: free gap {flow.free_gap:.4f}  min gap {flow.min_gap:.4f}  "
          f"ratio {flow.min_gap / flow.free_gap:.3f}")

# %%
print(flow.table())
