"""Decaying-jet splitting E+/E- and Calderon projector symbols.

Two independent routes to p+(D):

* the companion matrix of the monic conormal polynomial, with the spectral
  projector onto eigenvalues in the upper half plane computed from an ordered
  Schur form (no eigenvector matrices, so defective roots are fine);
* a trapezoid contour integral of the residue formula, used as an oracle.

Trace jets are ``(v, D_t v, ..., D_t^{m-1} v)`` with ``D_t = -i d/dt`` and
``t`` the inward normal coordinate.  ``trace_conjugation`` converts to other
trace coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .symbols import CollarOperator, CospherePoint, DEFAULT_TOLERANCES, ProjectorField

TRACE_CONVENTIONS = ("Dt", "inward", "outward")


class EllipticityError(ArithmeticError):
    """A conormal root is (numerically) real."""


class ContourError(ArithmeticError):
    """An eigenvalue lies on or too close to an integration contour."""


def trace_conjugation(m: int, rank: int, convention: str) -> np.ndarray:
    """Diagonal S with ``w = S y`` mapping D_t jets to the chosen trace coordinates.

    ``inward``: ``(u, d_{x_n} u, ...)`` so ``S = diag(i^j)``.
    ``outward``: ``(u, -d_{x_n} u, ...)``, the outward normal derivatives, so
    ``S = diag((-i)^j)``.
    """
    if convention not in TRACE_CONVENTIONS:
        raise ValueError(f"unknown trace convention {convention!r}")
    base = {"Dt": 1.0, "inward": 1j, "outward": -1j}[convention]
    return np.diag(np.repeat(base ** np.arange(m), rank)).astype(complex)


def to_convention(mat: np.ndarray, m: int, rank: int, convention: str) -> np.ndarray:
    """Express a jet-space matrix (given in D_t coordinates) in another convention."""
    S = trace_conjugation(m, rank, convention)
    Sinv = np.diag(1.0 / np.diag(S))
    return S @ mat @ Sinv


def from_convention(mat: np.ndarray, m: int, rank: int, convention: str) -> np.ndarray:
    S = trace_conjugation(m, rank, convention)
    Sinv = np.diag(1.0 / np.diag(S))
    return Sinv @ mat @ S


def conormal_symbol(op: CollarOperator, point: CospherePoint) -> np.ndarray:
    """Matrix coefficients of the conormal polynomial, leading first.

    Returns an array ``c`` of shape (m+1, r, r) with
    ``sigma_cn(xi_n) = sum_j c[j] xi_n^(m-j)``.
    """
    return op.coefficient_matrices(np.asarray(point.covector, dtype=float))


def companion_matrix(coeffs: np.ndarray) -> np.ndarray:
    """Block companion matrix acting on D_t jets.

    With ``y = (v, D_t v, ..., D_t^{m-1} v)`` the boundary ODE reads
    ``D_t y = C y``; eigenvalue lam of C gives solutions ``exp(i lam t)``.
    """
    m = coeffs.shape[0] - 1
    r = coeffs.shape[1]
    a0inv = np.linalg.inv(coeffs[0])
    C = np.zeros((m * r, m * r), dtype=complex)
    for j in range(m - 1):
        C[j * r:(j + 1) * r, (j + 1) * r:(j + 2) * r] = np.eye(r)
    for l in range(1, m + 1):
        # D_t^m v = -sum_l A0^{-1} a_l D_t^{m-l} v
        C[(m - 1) * r:, (m - l) * r:(m - l + 1) * r] = -a0inv @ coeffs[l]
    return C


def split_projector(C: np.ndarray, select) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Spectral projector of C onto the eigenvalues where ``select`` holds.

    Uses an ordered complex Schur form and a Sylvester solve, so it is valid
    for defective matrices.  Returns ``(P, Q, T, k)`` with the first ``k``
    Schur vectors spanning the selected invariant subspace.
    """
    T, Q, k = sla.schur(C.astype(complex), output="complex", sort=select)
    n = C.shape[0]
    if k in (0, n):
        P = np.eye(n, dtype=complex) if k == n else np.zeros((n, n), dtype=complex)
        return P, Q, T, k
    T11, T12, T22 = T[:k, :k], T[:k, k:], T[k:, k:]
    # T11 R - R T22 = T12 makes [[I, R], [0, 0]] commute with T
    R = sla.solve_sylvester(T11, -T22, T12)
    Pt = np.zeros((n, n), dtype=complex)
    Pt[:k, :k] = np.eye(k)
    Pt[:k, k:] = R
    return Q @ Pt @ Q.conj().T, Q, T, k


@dataclass(frozen=True)
class CompanionSplit:
    point: CospherePoint
    roots: np.ndarray
    basis_plus: np.ndarray
    basis_minus: np.ndarray
    p_plus: np.ndarray

    @property
    def margin(self) -> float:
        return float(np.min(np.abs(self.roots.imag)))

    @property
    def dim_plus(self) -> int:
        return self.basis_plus.shape[1]

    @property
    def dim_minus(self) -> int:
        return self.basis_minus.shape[1]


def boundary_ode_split(op: CollarOperator, point: CospherePoint, margin: float = 1e-8) -> CompanionSplit:
    """E+/E- and the projection p+ via the companion matrix."""
    C = companion_matrix(conormal_symbol(op, point))
    roots = np.linalg.eigvals(C)
    scale = max(1.0, float(np.max(np.abs(roots))))
    if np.min(np.abs(roots.imag)) < margin * scale:
        raise EllipticityError(f"real conormal root at {point}: min |Im| = {np.min(np.abs(roots.imag)):.3e}")
    P, Q, _, k = split_projector(C, lambda z: z.imag > 0)
    # E- is the complementary invariant subspace: Schur with the opposite order
    _, Qm, _, km = split_projector(C, lambda z: z.imag < 0)
    return CompanionSplit(point, np.sort_complex(roots), Q[:, :k], Qm[:, :km], P)


def hankel_green_block(coeffs: np.ndarray) -> np.ndarray:
    """Block Hankel matrix ``H[j,k] = a_{m-1-j-k}`` (zero below the antidiagonal).

    This is ``i`` times the principal symbol of the boundary pairing matrix.
    """
    m = coeffs.shape[0] - 1
    r = coeffs.shape[1]
    H = np.zeros((m * r, m * r), dtype=complex)
    for j in range(m):
        for k in range(m - j):
            H[j * r:(j + 1) * r, k * r:(k + 1) * r] = coeffs[m - 1 - j - k]
    return H


def _contour(roots: np.ndarray) -> tuple[complex, float]:
    up = roots[roots.imag > 0]
    lo = roots[roots.imag <= 0]
    c = complex(np.mean(up))
    spread = float(np.max(np.abs(up - c)))
    gap = float(np.min(up.imag))
    rho = 1.5 * spread + 0.5 * gap
    inside_ok = spread < rho
    outside_ok = lo.size == 0 or np.min(np.abs(lo - c)) > rho * (1 + 1e-3)
    if inside_ok and outside_ok:
        return c, rho
    # fallback: a circle inscribed in the upper half plane that still holds
    # every upper root; it separates trivially from the lower half plane
    delta = 0.5 * gap
    x0 = float(np.mean(up.real))
    w = float(np.max(np.abs(up.real - x0))) + spread + 1.0
    # choose centre height H with radius H - delta so points at height
    # >= 2 delta within horizontal distance w are inside
    H = max((w ** 2 + delta ** 2) / (2 * delta), 2 * float(np.max(up.imag)))
    return complex(x0, H), H - delta


def p_plus_residue(op: CollarOperator, point: CospherePoint, n_points: int = 256,
                   tol: float = 1e-10, margin: float = 1e-8, max_points: int = 1 << 16) -> np.ndarray:
    """Sum of residues over Im xi_n > 0 of ``xi_n^(j+l) a^{-1} a_{m-k-l-1}``.

    Trapezoid rule on a circle around the upper roots; the number of nodes is
    doubled until two successive results agree to ``tol``.
    """
    coeffs = conormal_symbol(op, point)
    m, r = coeffs.shape[0] - 1, coeffs.shape[1]
    roots = np.linalg.eigvals(companion_matrix(coeffs))
    scale = max(1.0, float(np.max(np.abs(roots))))
    if np.min(np.abs(roots.imag)) < margin * scale:
        raise ContourError(f"cannot separate upper and lower roots at {point}")
    if not np.any(roots.imag > 0):
        return np.zeros((m * r, m * r), dtype=complex)
    c, rho = _contour(roots)
    H = hankel_green_block(coeffs)
    prev = None
    n = n_points
    while True:
        theta = 2 * np.pi * np.arange(n) / n
        z = c + rho * np.exp(1j * theta)
        a = sum(coeffs[l] * (z ** (m - l))[:, None, None] for l in range(m + 1))
        ainv = np.linalg.inv(a)
        # V(z) = [z^0 I; z^1 I; ...] stacked; integrand = V a^{-1} V^T H
        pw = z[:, None] ** np.arange(m)[None, :]               # (n, m)
        V = np.kron(pw[:, :, None], np.eye(r)[None])            # (n, m r, r)
        integrand = V @ ainv @ np.swapaxes(V, 1, 2) @ H
        dz = 1j * rho * np.exp(1j * theta)
        val = np.tensordot(dz, integrand, axes=(0, 0)) / n / (1j)
        # (1/2 pi i) * sum f(z) dz * (2 pi / n)
        if prev is not None and np.max(np.abs(val - prev)) < tol:
            return val
        if n >= max_points:
            raise ContourError(f"contour quadrature did not converge at {point}")
        prev = val
        n *= 2


def riesz_projection(mats: np.ndarray, center: complex = 1.0, radius: float = 0.5,
                     n_points: int = 64, tol: float = 1e-13, gap: float = 1e-8,
                     max_points: int = 1 << 14) -> ProjectorField:
    """``(1/2 pi i) oint (lam - M)^{-1} dlam`` for a stack of square matrices."""
    mats = np.asarray(mats, dtype=complex)
    single = mats.ndim == 2
    if single:
        mats = mats[None]
    ev = np.linalg.eigvals(mats)
    dist = np.abs(np.abs(ev - center) - radius)
    if np.min(dist) < gap:
        idx = int(np.unravel_index(np.argmin(dist), dist.shape)[0])
        raise ContourError(f"eigenvalue within {gap} of the contour at index {idx}")
    n = n_points
    eye = np.eye(mats.shape[-1])
    prev = None
    while True:
        theta = 2 * np.pi * np.arange(n) / n
        lam = center + radius * np.exp(1j * theta)
        acc = np.zeros_like(mats)
        for lk, th in zip(lam, theta):
            acc += np.linalg.inv(lk * eye - mats) * (radius * np.exp(1j * th))
        val = acc / n
        if prev is not None and np.max(np.abs(val - prev)) < tol:
            break
        if n >= max_points:
            raise ContourError("Riesz quadrature did not converge")
        prev = val
        n *= 2
    return ProjectorField(val[0] if single else val)


def p_plus_field(op: CollarOperator, points, method: str = "companion") -> np.ndarray:
    """p+ at every point, stacked."""
    if method == "companion":
        return np.stack([boundary_ode_split(op, p).p_plus for p in points])
    if method == "residue":
        return np.stack([p_plus_residue(op, p) for p in points])
    raise ValueError(f"unknown method {method!r}")


def approximate_calderon_recursion(modes, p1, exact, grading, k_max: int,
                                   fit_modes: tuple[int, int] | None = None) -> dict:
    """Order-by-order correction of a principal projector on the Fourier tier.

    ``modes`` are integer mode numbers, ``p1[i]`` the principal projector at
    mode ``modes[i]`` and ``exact[i]`` the exact per-mode Calderon projector.
    ``grading`` lists the slot orders so that ``G(n) = diag(|n|^-g)`` turns a
    graded matrix into one whose entries share a common order.

    At step k the order -k part of the discrepancy is taken to be
    ``c_sign |n|^-k`` with ``c_sign`` the Richardson limit of
    ``|n|^k G (exact - P_k) G^-1`` over the two largest modes of each sign.
    After ``k_max`` steps the result is made idempotent with a Riesz
    projection around 1.
    """
    modes = np.asarray(modes)
    grading = np.asarray(grading, dtype=float)
    P = np.array(p1, dtype=complex)
    exact = np.asarray(exact, dtype=complex)
    nz = modes != 0
    absn = np.abs(modes).astype(float)
    nmax = int(absn.max())
    hi, lo = fit_modes if fit_modes is not None else (nmax, nmax // 2)

    def G(n):
        return np.diag(float(n) ** (-grading))

    coefficients = []
    for k in range(1, k_max + 1):
        corr = np.zeros_like(P)
        cs = {}
        for sgn in (1, -1):
            vals = {}
            for nn in (hi, lo):
                i = int(np.nonzero(modes == sgn * nn)[0][0])
                vals[nn] = nn ** k * G(nn) @ (exact[i] - P[i]) @ np.linalg.inv(G(nn))
            # first-order Richardson in 1/n between n = lo and n = hi
            c = (hi * vals[hi] - lo * vals[lo]) / (hi - lo)
            cs[sgn] = c
            sel = np.nonzero(nz & (np.sign(modes) == sgn))[0]
            for i in sel:
                n = absn[i]
                corr[i] = np.linalg.inv(G(n)) @ (cs[sgn] * n ** (-k)) @ G(n)
        coefficients.append(cs)
        P = P + corr
    proj = riesz_projection(P)
    return {"projectors": proj.values, "coefficients": coefficients, "pre_riesz": P}


def idempotence_report(P: np.ndarray, tol: float | None = None) -> dict:
    tol = DEFAULT_TOLERANCES["idempotence"] if tol is None else tol
    d = float(np.max(np.linalg.norm(P @ P - P, axis=(-2, -1), ord=2)))
    return {"residual": d, "tolerance": tol, "verdict": "PASS" if d <= tol else "FAIL"}


def p_plus_at_covector(op: CollarOperator, xi) -> np.ndarray:
    """p+ at an arbitrary nonzero covector (homogeneity checks off the cosphere)."""
    C = companion_matrix(op.coefficient_matrices(np.atleast_1d(np.asarray(xi, dtype=float))))
    roots = np.linalg.eigvals(C)
    if np.min(np.abs(roots.imag)) < 1e-8 * max(1.0, float(np.max(np.abs(roots)))):
        raise EllipticityError(f"real conormal root at covector {xi}")
    return split_projector(C, lambda z: z.imag > 0)[0]


def aps_projector(op: CollarOperator, point: CospherePoint) -> np.ndarray:
    """``chi+(c_A)`` for a first-order operator, ``c_A = i A_0^{-1} a_1``."""
    if op.m != 1:
        raise ValueError("APS projector needs a first-order operator")
    a = conormal_symbol(op, point)
    cA = 1j * np.linalg.solve(a[0], a[1])
    ev = np.linalg.eigvals(cA)
    if np.min(np.abs(ev.real)) < 1e-10:
        raise EllipticityError(f"adapted symbol has imaginary spectrum at {point}")
    # Re(mu) > 0 for mu in the spectrum of c_A is Im > 0 for i mu
    return split_projector(1j * cA, lambda z: z.imag > 0)[0]
