"""
Principal symbols of Calderon projectors
========================================

The boundary ODE of an elliptic operator, frozen at a boundary point and
cotangent direction, splits the space of trace jets into solutions decaying
into the interior (E+) and solutions decaying outward (E-).  The projection
p+ onto E+ along E- is the principal symbol of the Calderon projector.

Run with ``python3 demos/01_calderon_symbols.py``.
"""
from __future__ import annotations

import numpy as np

from calderon_lab.calderon import (boundary_ode_split, p_plus_at_covector, p_plus_residue,
                                   to_convention)
from calderon_lab.fixtures import cross_method_fixtures, laplace, order3_scalar
from calderon_lab.symbols import CospherePoint, build_cosphere_grid

np.set_printoptions(precision=4, suppress=True)

# %%
# The Laplacian on a collar: D_t^2 + |xi'|^2.  The decaying solution is
# exp(-|xi'| t), so in D_t jets (u, D_t u) the interior data satisfy
# D_t u = i |xi'| u.
L = laplace()
P = p_plus_at_covector(L, [2.0])
print("p+ for the Laplacian at xi' = 2, D_t jets:\n", P)

# %%
# Boundary data are more commonly written with normal derivatives.  The same
# projector in (u, outward normal derivative) coordinates is real:
print("same projector, outward traces:\n", to_convention(P, 2, 1, "outward"))

# %%
# Two independent routes give p+: an ordered Schur split of the companion
# matrix, and a contour integral of the inverse symbol around the upper
# roots.  They should agree to rounding on every fixture.
grid = build_cosphere_grid("circle", 16)
for op in cross_method_fixtures(7):
    worst = max(np.max(np.abs(p_plus_residue(op, p) - boundary_ode_split(op, p).p_plus))
                for p in grid.points)
    print(f"{op.name:>22}  order {op.m}  rank {op.rank}  max |companion - residue| = {worst:.1e}")

# %%
# A third-order scalar operator with roots i, 2 - i, -1 + 2i at xi' = 1.
# Two roots lie in the upper half plane, so p+ has rank two there, while at
# xi' = -1 the roots flip sign and only one survives.
op = order3_scalar()
for xi in (1.0, -1.0):
    s = boundary_ode_split(op, CospherePoint((0.0,), (xi,)))
    print(f"xi' = {xi:+.0f}: roots {s.roots}, rank p+ = {s.dim_plus}")
