from __future__ import annotations

import numpy as np
import pytest
from scipy import special

from calderon_lab import radial
from calderon_lab.disc import alpha_profile

# rho(1) for r rho' + 2k rho + k r alpha (1 + rho^2) = 0, from a 30-term power
# series at r = 1e-3 continued by Radau and DOP853 at rtol 1e-13 (they agree to 1e-15)
RICCATI_ORACLE = {
    ("linear:1", 1): 0.08419983632291646,
    ("linear:1", 2): 0.06746272285439378,
    ("linear:1", 5): 0.03815967828260753,
    ("quadratic:1", 3): 0.04183885735146883,
    ("cubic:1", 4): 0.030366025149123645,
}


def test_quadrature_integrates_r_dr():
    r, w = radial.radial_quadrature(20)
    assert np.isclose(np.sum(w), 0.5)
    assert np.isclose(np.sum(w * r ** 6), 1 / 8)


@pytest.mark.parametrize("n", [0, 1, 4])
def test_jacobi_basis_is_orthogonal(n):
    r, w = radial.radial_quadrature(60)
    V, dV = radial.jacobi_basis(n, 8, r)
    G = (V.T * w) @ V
    assert np.allclose(G - np.diag(np.diag(G)), 0, atol=1e-12)
    h = 1e-6
    Vp, _ = radial.jacobi_basis(n, 8, r + h)
    Vm, _ = radial.jacobi_basis(n, 8, r - h)
    assert np.allclose((Vp - Vm) / (2 * h), dV, atol=1e-5)


@pytest.mark.parametrize("n", [0, 2, 5])
def test_zernike_laplacian(n):
    # -Delta (r^n e^{in theta}) = 0 and -Delta (r^(n+2) e^{in theta}) = -(4n+4) r^n
    r, _ = radial.radial_quadrature(30)
    V, _, L = radial.zernike_basis(n, 2, r)
    assert np.allclose(L[:, 0], 0, atol=1e-12)
    # phi_1 = r^n P_1(2r^2 - 1) is a combination of r^n and r^(n+2)
    c2 = np.polyfit(r, V[:, 1] / r ** n, 2)[0]
    assert np.allclose(L[:, 1], -c2 * (4 * n + 4) * r ** n, atol=1e-9)


@pytest.mark.parametrize("key", sorted(RICCATI_ORACLE))
def test_riccati_against_ode_oracle(key):
    profile, k = key
    val = radial.riccati_boundary_value(alpha_profile(profile), k)
    assert abs(val - RICCATI_ORACLE[key]) < 1e-12


def test_riccati_rejects_nonpositive_k():
    with pytest.raises(ValueError):
        radial.riccati_ratio(alpha_profile("linear:1"), 0)


@pytest.mark.parametrize("n,x", [(0, 1.0), (3, 1.0), (7, 2.0), (12, 0.5), (2, 30.0)])
def test_bessel_ratios_against_scipy(n, x):
    assert np.isclose(radial.bessel_i_ratio(n, x), special.iv(n + 1, x) / special.iv(n, x), rtol=1e-13)
    lam = x * x
    assert np.isclose(radial.interior_dtn(n, lam), x * special.ivp(n, x) / special.iv(n, x), rtol=1e-12)
    assert np.isclose(radial.exterior_dtn(n, lam), x * special.kvp(n, x) / special.kv(n, x), rtol=1e-12)


def test_interior_dtn_special_values():
    assert radial.interior_dtn(4, 0.0) == 4.0
    x = np.sqrt(2.0)
    assert np.isclose(radial.interior_dtn(1, -2.0), x * special.jvp(1, x) / special.jv(1, x), rtol=1e-12)
    j01 = special.jn_zeros(0, 1)[0]
    with pytest.raises(ArithmeticError):
        radial.interior_dtn(0, -j01 ** 2)
    with pytest.raises(ValueError):
        radial.exterior_dtn(1, 0.0)


def test_kernel_dimension_threshold():
    assert radial.kernel_dimension(np.array([1.0, 1e-3, 1e-12])) == 1
    assert radial.kernel_dimension(np.zeros(0)) == 0
