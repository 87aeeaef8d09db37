from __future__ import annotations

import mpmath as mp
import numpy as np
import pytest
from scipy import special

from calderon_lab import disc, weyl


def test_weyl_constants_closed_form():
    assert weyl.weyl_constant(weyl.WeylInput("unit_disc"))["c_D"] == pytest.approx(4.0, rel=1e-12)
    assert weyl.weyl_constant(weyl.WeylInput("interval"))["c_D"] == pytest.approx(1.0, rel=1e-12)
    rect = weyl.weyl_constant(weyl.WeylInput("rectangle", params=(1.0, 2.0)))
    assert rect["c_D"] == pytest.approx(4 * np.pi / 2.0, rel=1e-12) and rect["converged"]
    # fourth-order symbol on the disc: lambda_k ~ c k^2 with c = 16
    assert weyl.weyl_constant(weyl.WeylInput("unit_disc", m=4))["c_D"] == pytest.approx(16.0, rel=1e-12)


def test_weyl_rejects_indefinite_symbol():
    w = weyl.WeylInput("interval", sigma=lambda x, xi: np.array([[-1.0]]))
    with pytest.raises(weyl.WeylError):
        weyl.weyl_constant(w)
    with pytest.raises(ValueError):
        weyl.WeylInput("torus")


def test_bessel_zeros_against_scipy_and_mpmath():
    assert np.allclose(weyl.bessel_zeros(3, "dirichlet", 14.0), special.jn_zeros(3, 3), rtol=1e-14)
    assert np.allclose(weyl.bessel_zeros(2, "neumann", 10.0), special.jnp_zeros(2, 3), rtol=1e-14)
    z = weyl.bessel_zeros(0, "dirichlet", 3.0)[0]
    assert abs(z - float(mp.besseljzero(0, 1))) < 1e-14


def test_robin_disc_zeros_solve_their_equation():
    for c in (0.5, 5.0):
        for z in weyl.bessel_zeros(1, "robin", 20.0, c):
            assert abs(z * special.jvp(1, z) + c * special.jv(1, z)) < 1e-10


def test_model_spectra():
    lam = weyl.model_eigenvalues(weyl.WeylInput("unit_disc"), "dirichlet", 6)
    j0, j1, j2 = special.jn_zeros(0, 1)[0], special.jn_zeros(1, 1)[0], special.jn_zeros(2, 1)[0]
    assert np.allclose(lam[:6], [j0 ** 2, j1 ** 2, j1 ** 2, j2 ** 2, j2 ** 2, special.jn_zeros(0, 2)[1] ** 2])
    neu = weyl.model_eigenvalues(weyl.WeylInput("unit_disc"), "neumann", 3)
    assert neu[0] == 0.0 and np.isclose(neu[1], special.jnp_zeros(1, 1)[0] ** 2)
    assert np.array_equal(weyl.model_eigenvalues(weyl.WeylInput("interval"), "dirichlet", 4), [1, 4, 9, 16])
    rect = weyl.model_eigenvalues(weyl.WeylInput("rectangle"), "dirichlet", 4)
    assert np.allclose(rect, [2, 5, 5, 8])


def test_interval_robin_limits():
    w = weyl.WeylInput("interval")
    near_neumann = weyl.model_eigenvalues(w, "robin", 5, 1e-6)
    assert np.allclose(near_neumann[1:], [1, 4, 9, 16], atol=1e-4)
    near_dirichlet = weyl.model_eigenvalues(w, "robin", 5, 1e6)
    assert np.allclose(near_dirichlet, [1, 4, 9, 16, 25], rtol=1e-4)
    with pytest.raises(weyl.WeylError):
        weyl.model_eigenvalues(w, "robin", 5, -1.0)


def test_asymptotic_fit_interval_is_exact():
    eigs = weyl.model_eigenvalues(weyl.WeylInput("interval"), "dirichlet", 1000)
    fit = weyl.asymptotic_fit(eigs, 2, 1)
    assert fit["c_hat"] == 1.0 and fit["drift"] == 0.0
    with pytest.raises(ValueError):
        weyl.asymptotic_fit(eigs[:100], 2, 1)


def test_two_term_fit_recovers_leading_constant():
    eigs = weyl.model_eigenvalues(weyl.WeylInput("unit_disc"), "dirichlet", 1200)
    assert weyl.two_term_fit(eigs)["c"] == pytest.approx(4.0, rel=2e-3)
    assert weyl.counting_function_check(eigs, 4.0, 2, 2) == pytest.approx(1.0, rel=0.05)


def test_singular_value_fits():
    lap = weyl.singular_value_fit(disc.laplace_model(), "dirichlet", 16)
    assert lap["max_abs_error_vs_bessel"] < 1e-8
    d0 = weyl.singular_value_fit(disc.d0(), "aps", 32)
    assert d0["predicted_c"] == pytest.approx(2.0, rel=1e-10)
    assert d0["rel_error"] < 0.1
