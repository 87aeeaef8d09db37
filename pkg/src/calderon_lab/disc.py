"""Fourier-mode models on the unit disc and the half-cylinder.

Conventions used throughout:

* the first-order models act on pairs ``u = (f, g) e^{in theta}``;
  ``D0 = sigma (d_r + A / r)`` with ``sigma = [[0, 1], [-1, 0]]`` and
  ``A = diag(-i d_theta, i d_theta)``;
* the inward normal coordinate is ``x_n = 1 - r``, so the adapted boundary
  operator seen from the collar is ``-A``, i.e. ``diag(-n, n)`` on mode ``n``;
* the second-order model is ``-Delta + lam_shift`` with traces
  ``(u, d_r u)`` at ``r = 1``;
* the complement defining the Calderon projector is spanned by the traces of
  exterior solutions that decay at infinity; on mode 0 of the first-order
  models there are none and ``P_C(0) = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import eigh, null_space, orth, qr, svdvals

from . import radial
from .calderon import riesz_projection

SIGMA = np.array([[0, 1], [-1, 0]], dtype=complex)
MODELS = ("disc_cauchy_riemann_D0", "disc_D_alpha", "disc_laplace_type", "half_cylinder_first_order")
MODE0_CUT = 0.5


class DiscError(ArithmeticError):
    pass


# ----------------------------------------------------------------- models

def alpha_profile(text: str) -> np.polynomial.Polynomial:
    """Polynomial ``alpha`` with ``alpha(1) = 0`` from ``kind:scale``.

    ``linear:s`` is ``s (r-1)``, ``quadratic:s`` is ``s (r-1) r``, ``cubic:s``
    is ``s (r-1) r^2`` (all with ``alpha'(1) = s``) and ``flat:c`` is
    ``c (r-1)^2`` with ``alpha'(1) = 0``.
    """
    kind, _, val = text.partition(":")
    s = complex(val) if val else 1.0
    P = np.polynomial.Polynomial
    base = {"linear": P([-1, 1]), "quadratic": P([0, -1, 1]), "cubic": P([0, 0, -1, 1]),
            "flat": P([1, -2, 1])}
    if kind not in base:
        raise ValueError(f"unknown alpha profile {kind!r}; expected one of {sorted(base)}")
    return s * base[kind]


@dataclass
class FourierModeOperator:
    model: str
    alpha: Callable | None = None
    lam_shift: float = 1.0
    A_fn: Callable[[int], np.ndarray] | None = None
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.model == "disc_D_alpha":
            if self.alpha is None:
                raise ValueError("disc_D_alpha needs an alpha profile")
            a1 = complex(self.alpha(np.array([1.0]))[0])
            if abs(a1) > 1e-12:
                raise ValueError(f"alpha(1) = {a1} must vanish")
            vals = np.asarray(self.alpha(np.linspace(0, 1, 33)), dtype=complex)
            self.flags["alpha_real"] = bool(np.all(np.abs(vals.imag) < 1e-14))
            self.flags["formally_selfadjoint"] = self.flags["alpha_real"]
        if self.model == "half_cylinder_first_order" and self.A_fn is None:
            raise ValueError("half_cylinder_first_order needs A(n)")

    @property
    def m(self) -> int:
        return 2 if self.model == "disc_laplace_type" else 1

    @property
    def rank(self) -> int:
        if self.model == "half_cylinder_first_order":
            return int(np.asarray(self.A_fn(1)).shape[0])
        return 1 if self.model == "disc_laplace_type" else 2

    @property
    def jet_dim(self) -> int:
        return self.m * self.rank

    def alpha_derivative_at_boundary(self) -> complex:
        if self.alpha is None:
            return 0.0
        if hasattr(self.alpha, "deriv"):
            return complex(self.alpha.deriv()(1.0))
        h = 1e-5
        return complex((self.alpha(1.0) - self.alpha(1.0 - h)) / h)


def d0() -> FourierModeOperator:
    return FourierModeOperator("disc_cauchy_riemann_D0")


def d_alpha(profile) -> FourierModeOperator:
    alpha = alpha_profile(profile) if isinstance(profile, str) else profile
    return FourierModeOperator("disc_D_alpha", alpha=alpha)


def laplace_model(lam_shift: float = 1.0) -> FourierModeOperator:
    return FourierModeOperator("disc_laplace_type", lam_shift=lam_shift)


def modes_range(N: int) -> np.ndarray:
    return np.arange(-N, N + 1)


# ----------------------------------------------------------------- spectral projectors

def adapted_boundary_operator(model: FourierModeOperator, modes) -> np.ndarray:
    """Per-mode adapted operator; ``diag(-n, n)`` for the disc Dirac models."""
    if model.m != 1:
        raise ValueError(f"{model.model} is not first order")
    modes = np.asarray(modes)
    if model.model == "half_cylinder_first_order":
        return np.stack([np.asarray(model.A_fn(int(n)), dtype=complex) for n in modes])
    out = np.zeros((modes.size, 2, 2), dtype=complex)
    out[:, 0, 0] = -modes
    out[:, 1, 1] = modes
    return out


def chi_plus(A_modes: np.ndarray, cut: float = MODE0_CUT, modes=None, gap: float = 1e-10) -> np.ndarray:
    """``chi+(A(n) - cut)``: projection onto eigenvalues with real part above ``cut``."""
    A_modes = np.asarray(A_modes, dtype=complex)
    ev, V = np.linalg.eig(A_modes)
    close = np.min(np.abs(ev - cut), axis=-1) < gap
    if np.any(close):
        bad = np.nonzero(close)[0]
        labels = bad if modes is None else np.asarray(modes)[bad]
        raise DiscError(f"cut {cut} is an eigenvalue at modes {labels.tolist()}")
    sel = (ev.real > cut).astype(complex)
    return V @ (sel[..., None] * np.linalg.inv(V))


def chi_plus_slotwise(A_modes: np.ndarray, cuts) -> np.ndarray:
    """``chi+(A(n) - diag(cuts))`` for diagonal ``A(n)``; used for APS-type cuts."""
    d = np.real(np.einsum("nii->ni", A_modes))
    sel = (d > np.asarray(cuts, dtype=float)[None, :]).astype(complex)
    return np.einsum("ni,ij->nij", sel, np.eye(d.shape[1]))


# ----------------------------------------------------------------- per-mode solutions

def _ratio(model, n):
    """Regular-solution ratio ``f/g`` (n > 0) or ``g/f`` (n < 0) for D_alpha."""
    return radial.riccati_boundary_value(model.alpha, abs(int(n)))


def hardy_modes(model: FourierModeOperator, modes) -> list[np.ndarray]:
    """Per-mode matrix whose columns span the traces of regular interior solutions."""
    out = []
    for n in np.asarray(modes):
        n = int(n)
        if model.model == "disc_cauchy_riemann_D0":
            out.append(np.eye(2, dtype=complex) if n == 0 else
                       (np.array([[0], [1]], dtype=complex) if n > 0 else np.array([[1], [0]], dtype=complex)))
        elif model.model == "disc_D_alpha":
            if n == 0:
                out.append(np.eye(2, dtype=complex))
            else:
                rho = _ratio(model, n)
                out.append(np.array([[rho], [1]]) if n > 0 else np.array([[1], [rho]]))
        elif model.model == "disc_laplace_type":
            out.append(np.array([[1.0], [radial.interior_dtn(n, model.lam_shift)]], dtype=complex))
        else:
            A = np.asarray(model.A_fn(n), dtype=complex)
            ev, V = np.linalg.eig(A)
            if np.min(np.abs(ev.real)) < 1e-12:
                raise DiscError(f"A({n}) has spectrum on the imaginary axis")
            out.append(V[:, ev.real > 0])
    return out


def exterior_modes(model: FourierModeOperator, modes) -> list[np.ndarray]:
    """Traces of solutions decaying at infinity (growing ones on the half-cylinder)."""
    out = []
    for n in np.asarray(modes):
        n = int(n)
        if model.model in ("disc_cauchy_riemann_D0", "disc_D_alpha"):
            # alpha vanishes outside the disc, so the exterior is the D0 problem
            out.append(np.zeros((2, 0), dtype=complex) if n == 0 else
                       (np.array([[1], [0]], dtype=complex) if n > 0 else np.array([[0], [1]], dtype=complex)))
        elif model.model == "disc_laplace_type":
            out.append(np.array([[1.0], [radial.exterior_dtn(n, model.lam_shift)]], dtype=complex))
        else:
            A = np.asarray(model.A_fn(n), dtype=complex)
            ev, V = np.linalg.eig(A)
            out.append(V[:, ev.real < 0])
    return out


def _oblique(range_basis: np.ndarray, kernel_basis: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    M = np.hstack([range_basis, kernel_basis])
    if M.shape[0] != M.shape[1]:
        raise DiscError("range and complement dimensions do not add up")
    s = svdvals(M)
    if s[-1] < tol * s[0]:
        raise DiscError(f"interior and exterior traces are not transversal (margin {s[-1] / s[0]:.2e})")
    E = np.zeros((M.shape[0], M.shape[0]), dtype=complex)
    k = range_basis.shape[1]
    E[:k, :k] = np.eye(k)
    return M @ E @ np.linalg.inv(M)


def calderon_modes(model: FourierModeOperator, modes) -> np.ndarray:
    """Projection onto the interior traces along the decaying exterior traces."""
    if model.model == "disc_D_alpha":
        # closed form in the ratio keeps exact zeros where they belong
        out = []
        for n in np.asarray(modes):
            n = int(n)
            if n == 0:
                out.append(np.eye(2, dtype=complex))
            else:
                rho = _ratio(model, n)
                out.append(np.array([[0, rho], [0, 1]]) if n > 0 else np.array([[1, 0], [rho, 0]]))
        return np.array(out, dtype=complex)
    return np.stack([_oblique(h, e) for h, e in zip(hardy_modes(model, modes), exterior_modes(model, modes))])


def dtn_modes(model: FourierModeOperator, modes) -> np.ndarray:
    if model.model != "disc_laplace_type":
        raise ValueError("Dirichlet-to-Neumann map is defined for the second-order model")
    return np.array([radial.interior_dtn(int(n), model.lam_shift) for n in np.asarray(modes)])


def p_zeta_modes(model: FourierModeOperator, modes) -> np.ndarray:
    """``[[1, 0], [Lambda(n), 0]]``: onto the Cauchy data along Neumann data."""
    lam = dtn_modes(model, modes)
    P = np.zeros((len(lam), 2, 2), dtype=complex)
    P[:, 0, 0] = 1
    P[:, 1, 0] = lam
    return P


def sobolev_weights(modes, orders) -> np.ndarray:
    """``(1 + n^2)^(s_j / 2)`` per mode and slot."""
    modes = np.asarray(modes, dtype=float)
    return (1 + modes[:, None] ** 2) ** (np.asarray(orders, dtype=float)[None, :] / 2)


# ----------------------------------------------------------------- case study

def case_study_limit(model: FourierModeOperator, n_values, cut: float = MODE0_CUT) -> dict:
    """``|n| (chi+(A) - P_C)(n)`` for D_alpha, with its predicted limit.

    The predicted limit is ``-alpha'(1)/4`` in entry (1, 2) for ``n > 0``
    and in entry (2, 1) for ``n < 0`` (``alpha'`` taken in ``r``).
    """
    n_values = np.asarray(n_values)
    A = adapted_boundary_operator(model, n_values)
    diff = chi_plus(A, cut, n_values) - calderon_modes(model, n_values)
    scaled = np.abs(n_values)[:, None, None] * diff
    ap = model.alpha_derivative_at_boundary()
    limit = {1: np.array([[0, -ap / 4], [0, 0]]), -1: np.array([[0, 0], [-ap / 4, 0]])}
    return {"modes": n_values, "scaled": scaled, "limit_plus": limit[1], "limit_minus": limit[-1],
            "alpha_prime_1": ap}


def richardson_limit(s_hi: np.ndarray, s_lo: np.ndarray, n_hi: int, n_lo: int) -> np.ndarray:
    """First-order extrapolation of ``s(n) = s + c/n`` from two modes."""
    return (n_hi * s_hi - n_lo * s_lo) / (n_hi - n_lo)


def compactness_window(model: FourierModeOperator, N: int, cut: float = MODE0_CUT) -> dict:
    """Per-mode norm of ``chi+(A) - P_C`` from the ``-1/2`` to the ``+1/2`` scale on ``[N, 2N]``.

    Both slots carry the same Sobolev order, so the per-mode norm is the
    spectral norm times ``<n>``; the minimum over the window (both signs) is a
    lower bound for the operator norm on the window's tail.
    """
    ks = np.arange(N, 2 * N + 1)
    ns = np.concatenate([ks, -ks])
    A = adapted_boundary_operator(model, ns)
    diff = chi_plus(A, cut, ns) - calderon_modes(model, ns)
    norms = np.linalg.norm(diff, ord=2, axis=(-2, -1)) * np.sqrt(1 + ns.astype(float) ** 2)
    return {"N": N, "min": float(norms.min()), "max": float(norms.max()), "norms": norms}


# ----------------------------------------------------------------- truncated subspaces

@dataclass
class TruncatedSubspace:
    """Subspace of ``prod_{|n| <= N} C^d`` in weighted coordinates.

    Coordinates are ordered mode-major: index ``(n + N) * d + slot``.
    """

    trunc: int
    weights: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]

    def report(self) -> dict:
        s = svdvals(self.basis) if self.dim else np.zeros(0)
        return {"trunc": self.trunc, "dim": self.dim, "ambient": self.ambient,
                "min_singular_value": float(s.min()) if s.size else None,
                "gram_condition": float((s.max() / s.min()) ** 2) if s.size else None}


def block_diag_projectors(P: np.ndarray) -> np.ndarray:
    n, d, _ = P.shape
    out = np.zeros((n * d, n * d), dtype=complex)
    for k in range(n):
        out[k * d:(k + 1) * d, k * d:(k + 1) * d] = P[k]
    return out


def subspace_from_mode_bases(N: int, bases, weights) -> TruncatedSubspace:
    """Block-diagonal span of per-mode column sets, expressed in weighted coordinates."""
    d = weights.shape[1]
    cols = []
    for k, Bk in enumerate(bases):
        Bk = np.asarray(Bk, dtype=complex)
        for c in range(Bk.shape[1]):
            v = np.zeros((2 * N + 1) * d, dtype=complex)
            v[k * d:(k + 1) * d] = weights[k] * Bk[:, c]
            cols.append(v / np.linalg.norm(v))
    basis = np.array(cols).T if cols else np.zeros(((2 * N + 1) * d, 0), dtype=complex)
    return TruncatedSubspace(N, weights, basis)


def subspace_from_projectors(N: int, P: np.ndarray, weights, kernel: bool = False) -> TruncatedSubspace:
    """Range (or kernel) of per-mode projectors."""
    I = np.eye(P.shape[-1])
    bases = []
    for Pk in P:
        M = (I - Pk) if kernel else Pk
        bases.append(orth(M, rcond=1e-12) if np.linalg.norm(M) > 1e-14 else np.zeros((P.shape[-1], 0)))
    return subspace_from_mode_bases(N, bases, weights)


def _rank(M: np.ndarray, rel: float = 1e-8) -> int:
    if M.size == 0:
        return 0
    s = svdvals(M)
    return int(np.sum(s > rel * s.max())) if s.size and s.max() > 0 else 0


@dataclass
class IndexReport:
    dim_intersection: int
    codim_sum: int
    index: int
    stabilization: list = field(default_factory=list)
    status: str = "stable"

    def as_dict(self) -> dict:
        return {"dim_intersection": self.dim_intersection, "codim_sum": self.codim_sum,
                "index": self.index, "stabilization": [list(x) for x in self.stabilization],
                "status": self.status}


def fredholm_pair_index(B: TruncatedSubspace, C: TruncatedSubspace) -> IndexReport:
    """``dim(B cap C) - codim(B + C)`` from numerical ranks."""
    if B.ambient != C.ambient:
        raise ValueError("subspaces live in different truncations")
    r = _rank(np.hstack([B.basis, C.basis]))
    inter = B.dim + C.dim - r
    codim = B.ambient - r
    return IndexReport(inter, codim, inter - codim)


# ----------------------------------------------------------------- Galerkin realizations

def _radial_degree(N: int) -> int:
    return N // 4 + 4


def _first_order_matrices(model: FourierModeOperator, n: int, adjoint: bool = False):
    """``D u = sigma u' + (N_n / r) u + alpha Q_n u`` per mode (and its formal adjoint)."""
    Nn = SIGMA @ np.diag([n, -n]).astype(complex)
    Qn = -n * np.eye(2, dtype=complex)
    if adjoint:
        return SIGMA, (SIGMA + Nn.conj().T), Qn.conj().T
    return SIGMA, Nn, Qn


def first_order_values(model: FourierModeOperator, n: int, K: int, r, dirichlet: bool,
                       adjoint: bool = False, lam: complex = 0.0):
    """Values of ``(D - lam)`` on a two-component Jacobi basis, stacked by component."""
    V, dV = radial.jacobi_basis(n, K, r)
    if dirichlet:
        dV = -V + (1 - r)[:, None] * dV
        V = (1 - r)[:, None] * V
    S, Nn, Qn = _first_order_matrices(model, n, adjoint)
    alpha = np.zeros_like(r, dtype=complex)
    if model.model == "disc_D_alpha":
        alpha = np.asarray(model.alpha(r), dtype=complex)
        if adjoint:
            alpha = alpha.conj()
    q = r.size
    T = np.zeros((2 * q, 2 * K), dtype=complex)
    U = np.zeros((2 * q, 2 * K), dtype=complex)
    for j in range(2):            # input component
        for i in range(2):        # output component
            blk = S[i, j] * dV + (Nn[i, j] / r)[:, None] * V + (alpha * Qn[i, j])[:, None] * V
            if i == j:
                blk = blk - lam * V
            T[i * q:(i + 1) * q, j * K:(j + 1) * K] = blk
        U[j * q:(j + 1) * q, j * K:(j + 1) * K] = V
    return T, U


def _sv_first_order(model, n, K, dirichlet, adjoint=False, lam=0.0):
    r, w = radial.radial_quadrature(abs(n) + 2 * K + 8)
    T, U = first_order_values(model, n, K, r, dirichlet, adjoint, lam)
    ww = np.concatenate([w, w])
    sw = np.sqrt(ww)
    Qm, R = np.linalg.qr(sw[:, None] * U)
    return svdvals(np.linalg.solve(R.T, (sw[:, None] * T).T).T)


def _sv_laplace(model, n, K, dirichlet, lam=0.0):
    r, w = radial.radial_quadrature(abs(n) + 2 * K + 8)
    V, dV, L = radial.zernike_basis(n, K, r)
    if dirichlet:
        f = 1 - r ** 2
        # -Delta (f q) = f (-Delta q) - 2 f' q' - (Delta f) q with Delta f = -4
        L = f[:, None] * L + 4 * r[:, None] * dV + 4 * V
        V = f[:, None] * V
    T = L + (model.lam_shift - lam) * V
    return radial.relative_singular_values(T, V, w)


def minimal_kernel_dimension(model: FourierModeOperator, N: int, adjoint: bool = False,
                             K: int | None = None) -> int:
    """Numerical dimension of ``ker D_min`` (all traces zero) on modes ``|n| <= N``."""
    K = K or _radial_degree(N)
    total = 0
    for n in modes_range(N):
        if model.m == 1:
            sv = _sv_first_order(model, int(n), K, True, adjoint)
        else:
            sv = _sv_laplace(model, int(n), K, True)
        total += radial.kernel_dimension(sv)
    return total


def max_kernel_growth(model: FourierModeOperator, lam: complex, N_list, K: int = 24) -> dict:
    """Dimension of the truncated kernel of ``D_max - lam`` for each ``N``."""
    dims = []
    per_mode = {}
    for N in N_list:
        tot = 0
        for n in modes_range(N):
            n = int(n)
            if n not in per_mode:
                if model.m == 1:
                    sv = _sv_first_order(model, n, K, False, lam=lam)
                else:
                    sv = _sv_laplace(model, n, K, False, lam=lam)
                per_mode[n] = radial.kernel_dimension(sv)
            tot += per_mode[n]
        dims.append(tot)
    growth = [b - a for a, b in zip(dims, dims[1:])]
    return {"lambda": complex(lam), "N": list(N_list), "dims": dims, "growth": growth}


def poincare_constant(model: FourierModeOperator, N: int, K: int | None = None,
                      n_random: int = 100, seed: int = 0) -> dict:
    """Smallest singular value of the Dirichlet realization on modes ``|n| <= N``.

    For the first-order models this is ``min ||D u|| / ||u||``; for the
    second-order model, the smallest eigenvalue of the (self-adjoint,
    positive) Dirichlet realization from its quadratic form.  The
    inequality ``sigma ||u|| <= ||D u||`` is then checked on random
    truncated vectors.
    """
    K = K or _radial_degree(N)
    rng = np.random.default_rng(seed)
    best = np.inf
    witness = None
    for n in range(0, N + 1) if model.model != "disc_D_alpha" else modes_range(N):
        n = int(n)
        if model.m == 1:
            sv = _sv_first_order(model, n, K, True)
            val = float(sv.min())
        else:
            val = _laplace_dirichlet_eig(model, n, K)
        if val <= 1e-10 * max(1.0, abs(val)):
            raise DiscError(f"Dirichlet realization has a kernel at mode {n}")
        if val < best:
            best, witness = val, n
    # the inequality on random vectors, in the witness mode and a high mode
    ok = True
    for n in {witness, N}:
        r, w = radial.radial_quadrature(abs(n) + 2 * K + 8)
        if model.m == 1:
            T, U = first_order_values(model, n, K, r, True)
            ww = np.concatenate([w, w])
            for _ in range(n_random // 2):
                c = rng.standard_normal(2 * K) + 1j * rng.standard_normal(2 * K)
                lhs = best * np.sqrt(np.sum(ww * np.abs(U @ c) ** 2))
                ok &= bool(lhs <= np.sqrt(np.sum(ww * np.abs(T @ c) ** 2)) * (1 + 1e-9))
        else:
            S, M = _laplace_forms(model, n, K)
            for _ in range(n_random // 2):
                c = rng.standard_normal(K)
                ok &= bool(best * (c @ M @ c) <= (c @ S @ c) * (1 + 1e-9))
    return {"N": N, "K": K, "value": best, "witness_mode": witness, "inequality_holds": ok}


def _laplace_forms(model, n, K):
    r, w = radial.radial_quadrature(abs(n) + 2 * K + 8)
    V, dV, _ = radial.zernike_basis(n, K, r)
    f = 1 - r ** 2
    U = f[:, None] * V
    dU = (-2 * r)[:, None] * V + f[:, None] * dV
    # |u'|^2 + n^2 |u|^2 / r^2, with u / r regular because r^|n| divides u
    Ur = U / r[:, None] if n != 0 else np.zeros_like(U)
    S = (dU.T * w) @ dU + n * n * (Ur.T * w) @ Ur + model.lam_shift * (U.T * w) @ U
    M = (U.T * w) @ U
    return S, M


def _laplace_dirichlet_eig(model, n, K):
    S, M = _laplace_forms(model, n, K)
    return float(eigh(S, M, eigvals_only=True)[0])


# ----------------------------------------------------------------- index of D0 with APS-type cuts

def aps_cut_projectors(model: FourierModeOperator, modes, K: int) -> np.ndarray:
    """``chi-(A - diag(K - 1/2, -1/2))``: the boundary condition ``B_K`` as a range.

    Slot 1 keeps modes ``n >= 1 - K`` and slot 2 keeps ``n <= -1``, so
    ``B_0`` is exactly the decaying exterior complement.
    """
    A = adapted_boundary_operator(model, modes)
    P = chi_plus_slotwise(A, [K - 0.5, -0.5])
    return np.eye(2) - P


def realized_index(model: FourierModeOperator, K: int, N: int, check_kernels: bool = True) -> dict:
    """Index of the realization with the APS-type cut ``K`` at truncation ``N``."""
    modes = modes_range(N)
    wts = sobolev_weights(modes, [0.5, 0.5])
    B = subspace_from_projectors(N, aps_cut_projectors(model, modes, K), wts)
    C = subspace_from_mode_bases(N, hardy_modes(model, modes), wts)
    pair = fredholm_pair_index(B, C)
    kmin = minimal_kernel_dimension(model, min(N, 32)) if check_kernels else 0
    kdag = minimal_kernel_dimension(model, min(N, 32), adjoint=True) if check_kernels else 0
    return {"index": pair.index + kmin - kdag, "pair": pair.as_dict(),
            "dim_ker_min": kmin, "dim_ker_min_adjoint": kdag, "N": N, "cut": K}


def index_stabilization(model: FourierModeOperator, K: int, N_list) -> IndexReport:
    vals = []
    last = None
    for N in N_list:
        last = realized_index(model, K, N, check_kernels=(N == N_list[-1]))
        vals.append((N, last["index"]))
    pair = last["pair"]
    status = "stable" if len({v for _, v in vals[-3:]}) == 1 else "unstable"
    return IndexReport(pair["dim_intersection"], pair["codim_sum"], last["index"], vals, status)


def finite_intersection(model: FourierModeOperator, N_list, cut: float = MODE0_CUT) -> dict:
    """``dim(chi+(A) H cap C_D)`` at each truncation."""
    dims = []
    for N in N_list:
        modes = modes_range(N)
        wts = sobolev_weights(modes, [-0.5, -0.5])
        A = adapted_boundary_operator(model, modes)
        X = subspace_from_projectors(N, chi_plus(A, cut, modes), wts)
        C = subspace_from_projectors(N, calderon_modes(model, modes), wts)
        dims.append(fredholm_pair_index(X, C).dim_intersection)
    return {"N": list(N_list), "dims": dims, "stable": len(set(dims[-3:])) == 1}


# ----------------------------------------------------------------- Robin and graphical decomposition

def lacunary_coefficients(k_max: int = 8, k_min: int = 1) -> dict[int, float]:
    """Fourier coefficients of ``sum_k 2^(-2k) (z^(2^k) + z^(-2^k))``."""
    out: dict[int, float] = {}
    for k in range(k_min, k_max + 1):
        out[2 ** k] = out.get(2 ** k, 0.0) + 2.0 ** (-2 * k)
        out[-(2 ** k)] = out.get(-(2 ** k), 0.0) + 2.0 ** (-2 * k)
    return out


def toeplitz_multiplier(coeffs: dict[int, complex], N: int) -> np.ndarray:
    """Matrix of multiplication by ``sum_j a_j e^{ij theta}`` on modes ``-N..N``."""
    M = np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
    for j, a in coeffs.items():
        for col in range(2 * N + 1):
            row = col + j
            if 0 <= row < 2 * N + 1:
                M[row, col] += a
    return M


def robin_probe(model: FourierModeOperator, coeffs: dict[int, complex], N_list) -> dict:
    """Invertibility of ``Lambda + a`` and growth of multiplication norms."""
    out = []
    for N in N_list:
        modes = modes_range(N)
        T = toeplitz_multiplier(coeffs, N)
        Lam = np.diag(dtn_modes(model, modes)).astype(complex)
        s = svdvals(Lam + T)
        w = np.sqrt(1 + modes.astype(float) ** 2)
        n32 = np.linalg.norm(np.diag(w ** 0.5) @ T @ np.diag(w ** -1.5), 2)
        n72 = np.linalg.norm(np.diag(w ** 2.5) @ T @ np.diag(w ** -3.5), 2)
        out.append({"N": N, "margin": float(s.min()), "norm_32_12": float(n32), "norm_72_52": float(n72)})
    return {"coefficients": {str(k): v for k, v in sorted(coeffs.items())}, "per_N": out}


def _orth(M, tol=1e-10):
    if M.shape[1] == 0:
        return M
    return orth(M, rcond=tol)


def _intersect(A, Bm, tol=1e-10):
    """Orthonormal basis of ``span A cap span B``."""
    if A.shape[1] == 0 or Bm.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    Qa, Qb = _orth(A, tol), _orth(Bm, tol)
    # x in both iff Qa y = Qb z
    Z = null_space(np.hstack([Qa, -Qb]), rcond=tol)
    if Z.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    return _orth(Qa @ Z[: Qa.shape[1]], tol)


def independent_columns(M: np.ndarray, rel: float = 1e-10) -> np.ndarray:
    """A maximal linearly independent subset of the columns, chosen by pivoted QR."""
    if M.shape[1] == 0:
        return M
    _, R, piv = qr(M, mode="economic", pivoting=True)
    d = np.abs(np.diag(R))
    k = int(np.sum(d > rel * d[0])) if d.size and d[0] > 0 else 0
    return M[:, np.sort(piv[:k])]


def _perp(A, n):
    if A.shape[1] == 0:
        return np.eye(n, dtype=complex)
    return null_space(A.conj().T)


def subspace_gap(A: np.ndarray, Bm: np.ndarray) -> float:
    """Largest principal-angle sine between two subspaces (1 if dimensions differ)."""
    Qa, Qb = _orth(A), _orth(Bm)
    if Qa.shape[1] != Qb.shape[1]:
        return 1.0
    if Qa.shape[1] == 0:
        return 0.0
    # sine of the largest principal angle, without the cancellation in 1 - cos^2
    return float(np.linalg.norm(Qa - Qb @ (Qb.conj().T @ Qa), 2))


def _oblique_projector(onto: np.ndarray, along: np.ndarray) -> np.ndarray:
    M = np.hstack([onto, along])
    k = onto.shape[1]
    E = np.zeros((M.shape[1], M.shape[1]))
    E[:k, :k] = np.eye(k)
    return M @ E @ np.linalg.pinv(M)


def graphical_decomposition(B: np.ndarray, Pplus: np.ndarray, tol: float = 1e-10) -> dict:
    """Decompose ``B`` as a graph over ``P- B`` plus a finite part in ``ran P+``.

    ``B`` is a basis matrix and ``Pplus`` a projector, both in weighted
    coordinates where the Euclidean inner product is the Sobolev one.
    Returns ``g`` as a matrix from ``V-`` coordinates to ambient space, the
    pieces ``W+, V+, W-*, V+*, V-`` and both reconstruction gaps.
    """
    n = Pplus.shape[0]
    I = np.eye(n)
    Pm = I - Pplus
    B = independent_columns(B)
    ranPp, ranPm = _orth(Pplus, tol), _orth(Pm, tol)
    ranPpH, ranPmH = _orth(Pplus.conj().T, tol), _orth(Pm.conj().T, tol)
    Bperp = _perp(_orth(B, tol), n)

    Wp = _intersect(ranPp, B, tol)
    Vp = _intersect(ranPp, _perp(Wp, n), tol) if Wp.shape[1] else ranPp
    Wms = _intersect(ranPmH, Bperp, tol)
    Vps = _intersect(ranPpH, _perp(Wp, n), tol) if Wp.shape[1] else ranPpH
    Vms = _intersect(ranPmH, _perp(Wms, n), tol) if Wms.shape[1] else ranPmH
    Wm = _intersect(ranPm, _perp(Vms, n), tol)

    # B cap W+^perp; keep the caller's columns when W+ is trivial
    Z = B if Wp.shape[1] == 0 else _intersect(B, _perp(Wp, n), tol)
    X = Pm @ Z
    sx = svdvals(X) if X.size else np.zeros(0)
    if sx.size and sx.min() < 1e-10 * max(1.0, sx.max()):
        raise DiscError(f"X- is not invertible (smallest singular value {sx.min():.2e})")
    Vm = X
    Pi_Vp = _oblique_projector(Vp, np.hstack([Wp, ranPm])) if Wp.shape[1] else Pplus
    gZ = Pi_Vp @ (Pplus @ Z)
    # g as an operator on the ambient space restricted to V-: g(X c) = gZ c
    Xp = np.linalg.pinv(X)
    g = gZ @ Xp
    graph = np.hstack([Vm + gZ, Wp])
    gap_rec = subspace_gap(graph, B)

    # extend g by zero on ran P+ + W- and test the adjoint description
    Pi_Vm = _oblique_projector(_orth(Vm), np.hstack([ranPp, Wm])) if Vm.shape[1] else np.zeros((n, n))
    G = g @ Pi_Vm
    adj = np.hstack([Vps - G.conj().T @ Vps, Wms])
    gap_adj = subspace_gap(adj, Bperp)
    return {"g": G, "g_norm": float(np.linalg.norm(G, 2)) if G.size else 0.0,
            "g_is_zero": bool(not np.any(gZ)),
            "dims": {"W_plus": Wp.shape[1], "V_plus": Vp.shape[1], "W_minus_star": Wms.shape[1],
                     "V_minus": Vm.shape[1], "W_minus": Wm.shape[1], "V_plus_star": Vps.shape[1]},
            "reconstruction_gap": gap_rec, "adjoint_gap": gap_adj,
            "X_minus_min_singular_value": float(sx.min()) if sx.size else None}


def laplace_boundary_space(model: FourierModeOperator, N: int, s: float = 1.5):
    """Weighted coordinates on ``H^s + H^(s-1)`` traces and ``P_{zeta,d}`` there."""
    modes = modes_range(N)
    wts = sobolev_weights(modes, [s, s - 1])
    W = np.diag(wts.reshape(-1))
    Winv = np.diag(1 / wts.reshape(-1))
    P = W @ block_diag_projectors(p_zeta_modes(model, modes)) @ Winv
    return modes, W, P


def robin_condition(coeffs: dict[int, complex], N: int, W: np.ndarray) -> np.ndarray:
    """``B_a = {(u, -a u)}`` in weighted coordinates (slot 2 is the outward derivative)."""
    d = 2 * N + 1
    T = toeplitz_multiplier(coeffs, N)
    B = np.zeros((2 * d, d), dtype=complex)
    B[0::2, :] = np.eye(d)
    B[1::2, :] = -T
    return W @ B


def dirichlet_condition(N: int, W: np.ndarray) -> np.ndarray:
    d = 2 * N + 1
    B = np.zeros((2 * d, d), dtype=complex)
    B[1::2, :] = np.eye(d)
    return W @ B


def annihilator_check_truncated(B: np.ndarray, pairing: np.ndarray, Bstar: np.ndarray, tol=1e-8) -> dict:
    pr = Bstar.conj().T @ pairing @ B
    res = float(np.max(np.abs(pr))) if pr.size else 0.0
    return {"residual": res, "dim_sum": B.shape[1] + Bstar.shape[1], "ambient": B.shape[0],
            "verdict": "PASS" if res <= tol and B.shape[1] + Bstar.shape[1] == B.shape[0] else "FAIL"}


def riesz_mode_projection(mats: np.ndarray):
    return riesz_projection(mats)
