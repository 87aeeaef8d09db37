"""Radial building blocks for rotation-invariant problems on the unit disc.

Everything here works one Fourier mode at a time.  Functions on ``[0, 1]``
live in ``L^2(r dr)``; Galerkin bases are Jacobi polynomials times
``r^|n|`` so that they are orthogonal in that measure and carry the correct
behaviour at the centre.
"""
from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import special
from scipy.linalg import qr, svdvals


# ------------------------------------------------------------- quadrature

def radial_quadrature(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes on ``[0, 1]`` and weights for ``r dr``."""
    x, w = np.polynomial.legendre.leggauss(q)
    r = 0.5 * (x + 1)
    return r, 0.5 * w * r


# ------------------------------------------------------------- bases

def _jacobi_with_derivs(k: int, a: float, b: float, x: np.ndarray, nder: int):
    out = [special.eval_jacobi(k, a, b, x)]
    for d in range(1, nder + 1):
        if k - d < 0:
            out.append(np.zeros_like(x))
            continue
        c = special.poch(k + a + b + 1, d) / 2.0 ** d
        out.append(c * special.eval_jacobi(k - d, a + d, b + d, x))
    return out


def jacobi_basis(n: int, K: int, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``phi_k = r^|n| P_k^(0, 2|n|+1)(2r-1)`` and ``phi_k'`` for ``k < K``.

    Contains every ``r^(|n|+j)``, so it also resolves solutions that are
    smooth in ``r`` but not in Cartesian coordinates.
    """
    a = abs(n)
    x = 2 * r - 1
    ra = r ** a
    dra = a * r ** (a - 1) if a > 0 else np.zeros_like(r)
    V = np.empty((r.size, K))
    dV = np.empty((r.size, K))
    for k in range(K):
        p, dp = _jacobi_with_derivs(k, 0.0, 2 * a + 1.0, x, 1)
        V[:, k] = ra * p
        dV[:, k] = dra * p + ra * 2 * dp
    return V, dV


def zernike_basis(n: int, K: int, r: np.ndarray):
    """``phi_k = r^|n| P_k^(0,|n|)(2r^2-1)`` with first and second derivatives.

    These span exactly the radial profiles of smooth functions in mode ``n``.
    Also returns ``lap = -(phi'' + phi'/r - n^2 phi/r^2)`` computed without
    cancellation as ``-r^|n| (q'' + (2|n|+1) q'/r)`` in terms of ``q(r)``.
    """
    a = abs(n)
    t = 2 * r ** 2 - 1
    ra = r ** a
    V = np.empty((r.size, K))
    dV = np.empty((r.size, K))
    L = np.empty((r.size, K))
    for k in range(K):
        p, dp, ddp = _jacobi_with_derivs(k, 0.0, float(a), t, 2)
        q = p
        dq = 4 * r * dp                      # d/dr p(2r^2-1)
        ddq = 4 * dp + 16 * r ** 2 * ddp
        V[:, k] = ra * q
        dV[:, k] = (a * r ** (a - 1) if a > 0 else 0.0) * q + ra * dq
        # dq / r = 4 dp, which is regular at the centre
        L[:, k] = -ra * (ddq + (2 * a + 1) * 4 * dp)
    return V, dV, L


# ------------------------------------------------------------- Galerkin spectra

def relative_singular_values(T: np.ndarray, V: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Singular values of an operator sampled on a basis, in ``L^2(r dr)``.

    ``V[q, k]`` are basis values and ``T[q, k]`` the operator applied to
    them (several components may be stacked along the first axis, with ``w``
    repeated accordingly).  The trial basis is orthonormalised by QR.
    """
    sw = np.sqrt(w)
    _, R = qr(sw[: V.shape[0], None] * V, mode="economic")
    A = sw[:, None] * T
    return svdvals(np.linalg.solve(R.T, A.T).T)


def kernel_dimension(sv: np.ndarray, rel: float = 1e-8) -> int:
    if sv.size == 0:
        return 0
    return int(np.sum(sv < rel * sv.max()))


# ------------------------------------------------------------- Riccati solves

def chebyshev_nodes(deg: int) -> np.ndarray:
    """Chebyshev-Lobatto points on ``[0, 1]`` (increasing)."""
    return 0.5 * (1 - np.cos(np.pi * np.arange(deg + 1) / deg))


def _diff_matrix(x: np.ndarray) -> np.ndarray:
    """Barycentric differentiation matrix on arbitrary distinct nodes."""
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    c = 1.0 / np.prod(dx, axis=1)
    D = (c[None, :] / c[:, None]) / dx
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def riccati_ratio(alpha, k: int, deg: int = 64, tol: float = 1e-14, max_iter: int = 50):
    """Regular solution of ``r rho' + 2k rho + k r alpha (1 + rho^2) = 0``.

    ``alpha`` is a callable on ``[0, 1]`` and ``k > 0``.  The regular
    solution has ``rho(0) = 0``; the operator ``r d/dr + 2k`` is invertible
    on polynomials so no boundary condition is imposed.  Chebyshev
    collocation with Newton iteration; returns ``(r, rho)`` on the nodes.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    r = chebyshev_nodes(deg)
    D = _diff_matrix(r)
    a = np.asarray(alpha(r), dtype=complex)
    L = r[:, None] * D + 2 * k * np.eye(r.size)
    rho = np.linalg.solve(L, -k * r * a)
    for _ in range(max_iter):
        F = L @ rho + k * r * a * (1 + rho ** 2)
        J = L + np.diag(2 * k * r * a * rho)
        step = np.linalg.solve(J, F)
        rho = rho - step
        if np.max(np.abs(step)) < tol * max(1.0, float(np.max(np.abs(rho)))):
            return r, rho
    raise ArithmeticError(f"Riccati Newton iteration did not converge for k={k}")


def riccati_boundary_value(alpha, k: int, deg: int | None = None, check: bool = True) -> complex:
    """``rho(1)`` with a degree-doubling self-check (relative change < 1e-11)."""
    deg = deg or 48
    val = riccati_ratio(alpha, k, deg)[1][-1]
    if check:
        val2 = riccati_ratio(alpha, k, 2 * deg)[1][-1]
        if abs(val2 - val) > 1e-11 * max(abs(val2), 1e-300) and abs(val2 - val) > 1e-16:
            raise ArithmeticError(f"Riccati collocation not resolved at k={k}: {abs(val2 - val):.2e}")
        val = val2
    return complex(val)


# ------------------------------------------------------------- Bessel ratios

def bessel_i_ratio(n: int, x: float, depth: int = 80) -> float:
    """``I_{n+1}(x) / I_n(x)`` by backward recurrence of the continued fraction."""
    n = abs(n)
    depth = max(depth, int(2 * x) + 40)
    rr = 0.0
    for k in range(n + depth, n - 1, -1):
        rr = x / (2 * (k + 1) + x * rr)
    return rr


def interior_dtn(n: int, lam: float) -> float:
    """``u'(1)/u(1)`` for the regular solution of ``-u'' - u'/r + n^2 u/r^2 + lam u = 0``."""
    n = abs(n)
    if lam == 0:
        return float(n)
    if lam > 0:
        x = np.sqrt(lam)
        return n + x * bessel_i_ratio(n, x)
    x = np.sqrt(-lam)
    J = special.jv(n, x)
    if abs(J) < 1e-12:
        raise ArithmeticError(f"Dirichlet problem not uniquely solvable at mode {n}")
    return float(x * special.jvp(n, x) / J)


def exterior_dtn(n: int, lam: float) -> float:
    """``u'(1)/u(1)`` for the solution decaying at infinity (``lam > 0``).

    Uses ``rho_k = K_{k-1}/K_k`` with the stable forward recurrence
    ``rho_{k+1} = 1/(rho_k + 2k/x)``.
    """
    n = abs(n)
    if lam <= 0:
        raise ValueError("decaying exterior solutions need a positive shift")
    x = np.sqrt(lam)
    if n == 0:
        return float(-x * special.kve(1, x) / special.kve(0, x))
    rho = special.kve(0, x) / special.kve(1, x)
    for k in range(1, n):
        rho = 1.0 / (rho + 2 * k / x)
    return float(-x * rho - n)


# ------------------------------------------------------------- polynomials

def polynomial_profile(coeffs) -> "np.polynomial.Polynomial":
    return np.polynomial.Polynomial(np.asarray(coeffs, dtype=complex))


def poly_from_roots_scaled(scale: complex, roots, extra=None):
    c = npoly.polyfromroots(roots) * scale
    if extra is not None:
        c = npoly.polymul(c, extra)
    return np.polynomial.Polynomial(c)
