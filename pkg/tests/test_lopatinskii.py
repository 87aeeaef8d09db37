from __future__ import annotations

import numpy as np
import pytest

from calderon_lab import disc
from calderon_lab.calderon import aps_projector, boundary_ode_split
from calderon_lab.fixtures import d0_boundary, laplace, order2_coupled, order3_scalar
from calderon_lab.lopatinskii import (boundary_decomposing_check, decay_exponent, regularity_verdict,
                                      sl_check_ode, sl_check_symbol)
from calderon_lab.pairing import bundle_projector
from calderon_lab.symbols import build_cosphere_grid

GRID = build_cosphere_grid("circle", 16)


@pytest.mark.parametrize("P", [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])], ids=["dirichlet", "neumann"])
def test_laplace_classical_conditions_are_regular(P):
    r = regularity_verdict(laplace(), P.astype(complex), GRID)
    assert r["verdict"] == "regular" and r["methods_agree"]
    # the symbol margin of Dirichlet for the Laplacian in D_t jets is 1/sqrt(2) / sqrt(2)
    assert r["sl_symbol"]["min_singular_value"] > 0.1


def test_calderon_complement_and_aps_are_regular():
    L, D0 = laplace(), d0_boundary()
    PC = np.stack([boundary_ode_split(L, p).p_plus for p in GRID.points])
    assert regularity_verdict(L, PC, GRID)["verdict"] == "regular"
    PA = np.stack([aps_projector(D0, p) for p in GRID.points])
    assert regularity_verdict(D0, PA, GRID)["verdict"] == "regular"


def test_rank_deficient_condition_is_neither():
    r = regularity_verdict(d0_boundary(), np.eye(2, dtype=complex), GRID)
    assert r["verdict"] == "neither"
    assert r["sl_symbol"]["verdict"] == "not_elliptic"
    assert r["sl_ode"]["verdict"] == "not_elliptic"
    assert r["methods_agree"]
    assert r["sl_symbol"]["witness"] is not None


def test_full_dirichlet_on_third_order_is_not_elliptic():
    # order3_scalar has two decaying roots at xi' > 0 and one at xi' < 0
    P = bundle_projector(3, 1, 2)
    sym = sl_check_symbol(order3_scalar(), P, GRID)
    ode = sl_check_ode(order3_scalar(), P, GRID)
    assert sym.verdict == ode.verdict == "not_elliptic"
    good = sym.per_point > sym.tolerance
    assert good.any() and not good.all()
    assert np.array_equal(good, ode.per_point > ode.tolerance)


def test_non_idempotent_field_reports_symbol_level_only():
    P = np.array([[1.0, 0.0], [0.0, 0.3]], dtype=complex)
    r = regularity_verdict(laplace(), P, GRID)
    assert r["status"] == "symbol-level only" and r["verdict"] == "neither"


def test_coupled_system_dirichlet():
    r = regularity_verdict(order2_coupled(), bundle_projector(2, 2, 1), GRID)
    assert r["verdict"] == "regular" and r["methods_agree"]


def test_decay_exponent():
    ns = np.arange(1, 65)
    assert abs(decay_exponent(ns, 3.0 * ns ** -2.0) + 2) < 1e-12
    assert decay_exponent(ns, np.zeros(64)) == -np.inf


def test_boundary_decomposing_symbol_and_fourier_tiers():
    L = laplace()
    grid = build_cosphere_grid("circle", 8)
    model = disc.laplace_model()
    modes = np.arange(1, 65)
    PC = disc.calderon_modes(model, modes)
    Pz = disc.p_zeta_modes(model, modes)
    wts = disc.sobolev_weights(modes, [1.5, 0.5])
    r = boundary_decomposing_check(L, np.diag([1.0, 0.0]).astype(complex), grid,
                                   fourier={"modes": modes, "P_C": PC, "P": Pz, "weights": wts})
    assert r["symbol_tier"] == "FAIL"          # Dirichlet does not commute with p+
    assert r["fourier_tier"] == "PASS"
    assert r["fourier_exponent"] < -2
