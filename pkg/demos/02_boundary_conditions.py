"""
Boundary conditions, adjoints and the Lopatinskii test
======================================================

A pseudodifferential boundary condition is given by a projector field P on
trace jets; the condition is ``P(trace u) = 0``.  It is elliptic when P maps
the decaying solutions E+ bijectively onto its range, which is the same as
invertibility of ``p+ - (1 - P)``.

Run with ``python3 demos/02_boundary_conditions.py``.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import null_space

from calderon_lab.calderon import aps_projector, boundary_ode_split
from calderon_lab.disc import subspace_gap
from calderon_lab.fixtures import d0_boundary, laplace, order3_scalar
from calderon_lab.lopatinskii import regularity_verdict
from calderon_lab.pairing import adjoint_condition_symbol, bundle_projector, green_matrices
from calderon_lab.symbols import CospherePoint, build_cosphere_grid

np.set_printoptions(precision=4, suppress=True)
grid = build_cosphere_grid("circle", 32)

# %%
# Classical conditions for the Laplacian, the Calderon complement and the
# spectral condition for a first-order system.
L, D0 = laplace(), d0_boundary()
cases = {
    "Laplace, Dirichlet": (L, np.diag([1.0, 0.0])),
    "Laplace, Neumann": (L, np.diag([0.0, 1.0])),
    "Laplace, Calderon complement": (L, np.stack([boundary_ode_split(L, p).p_plus for p in grid.points])),
    "D0, spectral (APS)": (D0, np.stack([aps_projector(D0, p) for p in grid.points])),
    "D0, both components (P = I)": (D0, np.eye(2)),
}
for name, (op, P) in cases.items():
    r = regularity_verdict(op, P.astype(complex), grid)
    print(f"{name:>30}: {r['verdict']:8s} margin {r['sl_symbol']['min_singular_value']:.3f}"
          f"  (symbol and ODE tests agree: {r['methods_agree']})")

# %%
# The last case imposes two conditions on a system with one decaying
# solution per direction, so the half-line problem is overdetermined.

# %%
# Adjoint conditions come from Green's formula.  For an order-m operator,
# asking the first k traces to vanish is adjoint to asking the first m - k
# traces to vanish.
op = order3_scalar()
a = green_matrices(op).a_at(CospherePoint((0.0,), (1.0,)))
for k in (1, 2):
    Pd = adjoint_condition_symbol(a, bundle_projector(3, 1, k))
    gap = subspace_gap(null_space(Pd), null_space(bundle_projector(3, 1, 3 - k)))
    print(f"order 3: adjoint of 'first {k} traces vanish' is 'first {3 - k} vanish' (gap {gap:.1e})")
