from __future__ import annotations

import numpy as np
import pytest
from scipy import special

from calderon_lab import disc, radial

J01 = special.jn_zeros(0, 1)[0]


def test_alpha_profiles():
    for kind in ("linear", "quadratic", "cubic"):
        a = disc.alpha_profile(f"{kind}:2")
        assert abs(a(1.0)) < 1e-15 and abs(a.deriv()(1.0) - 2) < 1e-14
    assert abs(disc.alpha_profile("flat:3").deriv()(1.0)) < 1e-15
    with pytest.raises(ValueError):
        disc.alpha_profile("sine:1")
    with pytest.raises(ValueError):
        disc.FourierModeOperator("disc_D_alpha", alpha=np.polynomial.Polynomial([1.0]))


def test_adapted_operator_and_chi_plus():
    A = disc.adapted_boundary_operator(disc.d0(), [3, -2, 0])
    assert np.allclose(A[0], np.diag([-3, 3]))
    chi = disc.chi_plus(A, 0.5)
    assert np.allclose(chi[0], np.diag([0, 1]))
    assert np.allclose(chi[1], np.diag([1, 0]))
    assert np.allclose(chi[2], 0)
    with pytest.raises(disc.DiscError):
        disc.chi_plus(A, 0.0)


def test_d0_hardy_and_calderon_modes():
    modes = disc.modes_range(8)
    m = disc.d0()
    PC = disc.calderon_modes(m, modes)
    chi = disc.chi_plus(disc.adapted_boundary_operator(m, modes), 0.5, modes)
    nz = modes != 0
    assert np.max(np.abs(PC[nz] - chi[nz])) == 0.0
    # mode 0: every constant is an interior solution, no exterior solution decays
    assert np.allclose(PC[modes == 0][0], np.eye(2))
    assert np.allclose(chi[modes == 0][0], 0)


def test_d_alpha_calderon_structure():
    m = disc.d_alpha("linear:1")
    PC = disc.calderon_modes(m, [2, -2, 0])
    rho = radial.riccati_boundary_value(m.alpha, 2)
    assert np.allclose(PC[0], [[0, rho], [0, 1]])
    assert np.allclose(PC[1], [[1, 0], [rho, 0]])
    assert np.allclose(PC @ PC, PC)
    assert abs(rho - 0.06746272285439378) < 1e-12


def test_d_alpha_oblique_route_matches_closed_form():
    m = disc.d_alpha("quadratic:1")
    modes = [1, 4, -3]
    closed = disc.calderon_modes(m, modes)
    oblique = np.stack([disc._oblique(h, e) for h, e in zip(disc.hardy_modes(m, modes),
                                                             disc.exterior_modes(m, modes))])
    assert np.allclose(closed, oblique, atol=1e-14)


@pytest.mark.parametrize("lam", [1.0, 4.0])
def test_laplace_calderon_from_bessel_dtn(lam):
    m = disc.laplace_model(lam)
    for n in (0, 1, 5):
        x = np.sqrt(lam)
        li = x * special.ivp(n, x) / special.iv(n, x)
        le = x * special.kvp(n, x) / special.kv(n, x)
        ref = np.array([[-le, 1], [-li * le, li]]) / (li - le)
        assert np.allclose(disc.calderon_modes(m, [n])[0], ref, atol=1e-12)


def test_case_study_limits_and_extrapolation():
    m = disc.d_alpha("linear:1")
    cs = disc.case_study_limit(m, [128, 256, -128, -256])
    s = cs["scaled"]
    assert np.allclose(cs["limit_plus"], [[0, -0.25], [0, 0]])
    assert np.allclose(cs["limit_minus"], [[0, 0], [-0.25, 0]])
    # first-order convergence: raw error about 1.5/n relative, removed by extrapolation
    raw = np.linalg.norm(s[1] - cs["limit_plus"]) / 0.25
    ext = disc.richardson_limit(s[1], s[0], 256, 128)
    assert 1e-3 < raw < 1e-2
    assert np.linalg.norm(ext - cs["limit_plus"]) / 0.25 < 1e-3
    flat = disc.case_study_limit(disc.d_alpha("flat:1"), [256])["scaled"][0]
    assert np.max(np.abs(flat)) < 1e-3


def test_compactness_window_bound():
    w = disc.compactness_window(disc.d_alpha("linear:1"), 32)
    assert w["min"] >= 0.8 * 0.25


def brute_force_index(K: int, N: int) -> int:
    """dim(B cap C) - codim(B + C) mode by mode with coordinate subspaces."""
    total = 0
    for n in range(-N, N + 1):
        B = {0} if n >= 1 - K else set()
        if n <= -1:
            B.add(1)
        C = {0, 1} if n == 0 else ({1} if n > 0 else {0})
        total += len(B & C) - (2 - len(B | C))
    return total


@pytest.mark.parametrize("K", [-2, 0, 1, 3])
def test_realized_index_against_brute_force(K):
    r = disc.realized_index(disc.d0(), K, 24, check_kernels=False)
    assert r["index"] == brute_force_index(K, 24) == K


def test_minimal_kernels_vanish():
    assert disc.minimal_kernel_dimension(disc.d0(), 8) == 0
    assert disc.minimal_kernel_dimension(disc.d0(), 8, adjoint=True) == 0
    assert disc.minimal_kernel_dimension(disc.laplace_model(), 8) == 0


def test_fredholm_pair_index_generic_position():
    rng = np.random.default_rng(1)
    B = disc.TruncatedSubspace(0, np.ones((1, 7)), rng.standard_normal((7, 3)))
    C = disc.TruncatedSubspace(0, np.ones((1, 7)), rng.standard_normal((7, 5)))
    rep = disc.fredholm_pair_index(B, C)
    assert (rep.dim_intersection, rep.codim_sum, rep.index) == (1, 0, 1)


def test_max_kernel_growth():
    d = disc.max_kernel_growth(disc.d0(), 0, [4, 8])
    assert d["dims"] == [10, 18]          # 2N + 2: both components in every mode, two at n = 0
    lap = disc.max_kernel_growth(disc.laplace_model(), 1j, [4, 8])
    assert lap["dims"] == [9, 17]         # 2N + 1: one harmonic-type solution per mode


def test_poincare_constants():
    d0 = disc.poincare_constant(disc.d0(), 16)
    assert abs(d0["value"] - J01) / J01 < 1e-6 and d0["inequality_holds"]
    lap = disc.poincare_constant(disc.laplace_model(), 16)
    assert abs(lap["value"] - (1 + J01 ** 2)) / (1 + J01 ** 2) < 1e-8


def test_finite_intersection_is_stable():
    r = disc.finite_intersection(disc.d_alpha("linear:1"), [8, 12, 16])
    assert r["stable"]


def test_lacunary_and_toeplitz():
    c = disc.lacunary_coefficients(3)
    assert c == {2: 0.25, -2: 0.25, 4: 0.0625, -4: 0.0625, 8: 0.015625, -8: 0.015625}
    T = disc.toeplitz_multiplier({1: 2.0}, 2)
    assert np.allclose(T, 2 * np.eye(5, k=-1))


def test_robin_probe_lacunary_norms():
    r = disc.robin_probe(disc.laplace_model(), disc.lacunary_coefficients(), [16, 32])
    lo, hi = r["per_N"]
    assert lo["margin"] > 0.3 and hi["margin"] > 0.3
    assert abs(hi["norm_32_12"] - lo["norm_32_12"]) < 1e-3
    assert hi["norm_72_52"] > 1.3 * lo["norm_72_52"]


@pytest.mark.parametrize("name", ["dirichlet", "robin", "aps", "resonant_robin"])
def test_graphical_decomposition(name):
    m = disc.laplace_model()
    N = 12
    _, W, P = disc.laplace_boundary_space(m, N)
    B = {"dirichlet": lambda: disc.dirichlet_condition(N, W),
         "robin": lambda: disc.robin_condition({0: 2.0, 3: 0.5, -3: 0.5}, N, W),
         "aps": lambda: np.eye(P.shape[0]) - P,
         "resonant_robin": lambda: disc.robin_condition({0: -radial.interior_dtn(3, 1.0)}, N, W)}[name]()
    r = disc.graphical_decomposition(B, P)
    assert r["reconstruction_gap"] <= 1e-8 and r["adjoint_gap"] <= 1e-8
    if name == "aps":
        assert r["g_is_zero"] and np.max(np.abs(r["g"])) == 0.0
    if name == "resonant_robin":
        # Lambda + a vanishes at n = +-3, so Cauchy data meet B there
        assert r["dims"]["W_plus"] == 2
    else:
        assert r["dims"]["W_plus"] == 0


def test_subspace_gap():
    e = np.eye(3)
    assert disc.subspace_gap(e[:, :2], e[:, [1, 0]]) < 1e-15
    assert disc.subspace_gap(e[:, :1], e[:, 1:2]) == pytest.approx(1.0)
    assert disc.subspace_gap(e[:, :1], e[:, :2]) == 1.0


def test_annihilator_check_truncated():
    J = np.kron(np.eye(3), np.array([[0, 1], [-1, 0]]))
    W = np.eye(6)
    B = disc.dirichlet_condition(1, W)
    assert disc.annihilator_check_truncated(B, J, B)["verdict"] == "PASS"
