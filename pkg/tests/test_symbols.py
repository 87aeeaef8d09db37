from __future__ import annotations

import numpy as np
import pytest

from calderon_lab.fixtures import FIXTURES, laplace, order3_scalar
from calderon_lab.pairing import green_matrices
from calderon_lab.symbols import (CollarOperator, CospherePoint, SymbolError, SymbolMatrix,
                                  build_cosphere_grid, interior_ellipticity, poly_degree, poly_eval,
                                  poly_mul)


def test_poly_arithmetic():
    p = {(1, 0): 2.0, (0, 1): 1.0}
    q = {(1, 0): 1.0, (0, 1): -1.0}
    pq = poly_mul(p, q)
    assert pq == {(2, 0): 2.0, (1, 1): -1.0, (0, 2): -1.0}
    assert poly_degree(pq) == 2
    xi = np.array([[0.3, -0.7]])
    assert np.allclose(poly_eval(pq, xi), (2 * 0.3 - 0.7) * (0.3 + 0.7))


def test_inhomogeneous_polynomial_rejected():
    with pytest.raises(SymbolError):
        SymbolMatrix((({(1,): 1.0, (0,): 1.0},),), 1)


def test_symbol_matrix_product_and_adjoint():
    A = SymbolMatrix(((({(1,): 1j}), {}), ({}, {(1,): 2.0})), 1)
    B = SymbolMatrix.constant([[1, 2], [3, 4]], 1)
    xi = np.array([0.5])
    assert np.allclose((A @ B)(xi), A(xi) @ B(xi))
    assert np.allclose(A.adjoint()(xi), A(xi).conj().T)


def test_grid_sizes_and_measure():
    g = build_cosphere_grid("circle", 64)
    assert len(g.points) == 128
    assert np.isclose(g.total_measure(), 4 * np.pi)
    t = build_cosphere_grid("flat_torus_2d", 4)
    assert len(t.points) == 64
    assert np.isclose(t.total_measure(), (2 * np.pi) ** 3)
    e = build_cosphere_grid("interval_endpoints", 8)
    assert len(e.points) == 2


def test_grid_rejects_bad_input():
    with pytest.raises(SymbolError):
        build_cosphere_grid("sphere", 8)
    with pytest.raises(SymbolError):
        build_cosphere_grid("circle", 1)
    with pytest.raises(SymbolError):
        CospherePoint((0.0,), (0.5,))


def test_collar_operator_validates_degrees():
    bad = (SymbolMatrix.constant([[1]], 1), SymbolMatrix.constant([[1]], 1))
    with pytest.raises(SymbolError):
        CollarOperator(1, 1, 1, "circle", bad)


def test_interior_symbol_of_laplace():
    op = laplace()
    a = op.interior_symbol([0.6], np.array([0.8, 2.0]))
    assert np.allclose(a[:, 0, 0], [0.36 + 0.64, 0.36 + 4.0])


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixtures_are_interior_elliptic(name):
    op = FIXTURES[name]()
    grid = build_cosphere_grid(op.geometry, 4 if op.geometry == "flat_torus_2d" else 16)
    assert interior_ellipticity(op, grid)["verdict"] == "PASS"


def test_interior_ellipticity_detects_real_root():
    op = CollarOperator(2, 1, 1, "circle", (SymbolMatrix.constant([[1]], 1), SymbolMatrix.zeros(1, 1, 1),
                                            SymbolMatrix((({(2,): -1.0},),), 1)))
    r = interior_ellipticity(op, build_cosphere_grid("circle", 8))
    assert r["verdict"] == "FAIL"
    assert r["conormal_root_margin"] < 1e-12
    assert abs(abs(r["witness_point"]["real_root"]) - 1.0) < 1e-12


def test_dn_order_check_on_order3():
    op = order3_scalar()
    checks = green_matrices(op).dn_checks()
    assert all(c["verdict"] == "PASS" for c in checks.values())
