"""Green's formula matrices and adjoint boundary conditions at symbol level.

With ``a_l`` the principal symbols of the collar coefficients, the lower
triangular matrix ``atilde`` has blocks ``atilde[j,k] = a_{j-k}`` (order
``j-k``, diagonal ``A_0``) and the boundary pairing matrix is
``a = -i tau atilde``, ``tau`` the antidiagonal block permutation.
Only principal parts are built; lower order freedom is set to zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calderon import boundary_ode_split
from .symbols import CollarOperator, CospherePoint, SymbolMatrix, dn_order_check


def tau_matrix(m: int, rank: int = 1) -> np.ndarray:
    return np.kron(np.fliplr(np.eye(m, dtype=int)), np.eye(rank, dtype=int))


@dataclass(frozen=True)
class GreenMatrices:
    m: int
    rank: int
    tau: np.ndarray
    sigma0_atilde: SymbolMatrix
    sigma0_a: SymbolMatrix

    def atilde_at(self, point: CospherePoint) -> np.ndarray:
        return self.sigma0_atilde(np.asarray(point.covector, dtype=float))

    def a_at(self, point: CospherePoint) -> np.ndarray:
        return self.sigma0_a(np.asarray(point.covector, dtype=float))

    def dn_checks(self) -> dict:
        w = list(np.repeat(np.arange(self.m), self.rank))
        wr = list(np.repeat(np.arange(self.m)[::-1], self.rank))
        return {"atilde": dn_order_check(self.sigma0_atilde, 0, w, w),
                "a": dn_order_check(self.sigma0_a, 0, wr, w)}


def green_matrices(op: CollarOperator) -> GreenMatrices:
    """Symbolic ``atilde`` and ``a`` for a collar operator."""
    m, r, d = op.m, op.rank, op.covector_dim
    if abs(np.linalg.det(op.A0())) < 1e-14:
        raise np.linalg.LinAlgError("A_0 is singular")
    blocks = [[op.coeffs[j - k] if j >= k else None for k in range(m)] for j in range(m)]
    at = SymbolMatrix.from_blocks(blocks, (r, r), d)
    rev = [[op.coeffs[m - 1 - j - k] if j + k <= m - 1 else None for k in range(m)] for j in range(m)]
    a = SymbolMatrix.from_blocks(rev, (r, r), d).scale(-1j)
    return GreenMatrices(m, r, tau_matrix(m, r), at, a)


def invert_atilde(g: GreenMatrices) -> SymbolMatrix:
    """Exact inverse of ``atilde`` by block forward substitution.

    ``B[j,j] = A0^-1`` and ``B[j,k] = -A0^-1 sum_{i=k}^{j-1} atilde[j,i] B[i,k]``;
    the result is again a matrix of polynomials with ``B[j,k]`` of degree
    ``j-k``.
    """
    m, r, d = g.m, g.rank, g.sigma0_atilde.dim
    full = g.sigma0_atilde

    def block(S, j, k):
        return SymbolMatrix(tuple(tuple(S.entries[j * r + a][k * r + b] for b in range(r))
                                  for a in range(r)), d)

    a0inv = SymbolMatrix.constant(np.linalg.inv(block(full, 0, 0)(np.zeros(d))), d)
    B = [[None] * m for _ in range(m)]
    for k in range(m):
        B[k][k] = a0inv
        for j in range(k + 1, m):
            acc = SymbolMatrix.zeros(r, r, d)
            for i in range(k, j):
                acc = acc + block(full, j, i) @ B[i][k]
            B[j][k] = (a0inv @ acc).scale(-1.0)
    return SymbolMatrix.from_blocks(B, (r, r), d)


def adjoint_condition_symbol(a: np.ndarray, P: np.ndarray) -> np.ndarray:
    """``P_dag = (a^*)^{-1} (1 - P^*) a^*`` pointwise (stacked arrays allowed)."""
    a = np.asarray(a, dtype=complex)
    P = np.asarray(P, dtype=complex)
    if a.shape != P.shape:
        raise ValueError("dimension mismatch between pairing matrix and projector")
    aH = np.conj(np.swapaxes(a, -1, -2))
    I = np.eye(P.shape[-1])
    return np.linalg.solve(aH, (I - np.conj(np.swapaxes(P, -1, -2))) @ aH)


def adjoint_duality_check(op: CollarOperator, op_dag: CollarOperator, points,
                          tol: float = 1e-8) -> dict:
    """Residuals of ``a^* + a_dag = 0`` and of the Calderon adjoint identity."""
    g, gd = green_matrices(op), green_matrices(op_dag)
    r1 = r2 = 0.0
    for p in points:
        a, ad = g.a_at(p), gd.a_at(p)
        r1 = max(r1, float(np.linalg.norm(a.conj().T + ad, 2)))
        pp = boundary_ode_split(op, p).p_plus
        pd = boundary_ode_split(op_dag, p).p_plus
        I = np.eye(pp.shape[0])
        pred = (a @ (I - pp) @ np.linalg.inv(a)).conj().T
        r2 = max(r2, float(np.linalg.norm(pd - pred, 2)))
    ok = r1 <= tol and r2 <= tol
    return {"pairing_residual": r1, "calderon_residual": r2, "tolerance": tol,
            "verdict": "PASS" if ok else "FAIL"}


def duality_residual(op: CollarOperator, op_dag: CollarOperator, points) -> float:
    """``max |p+(D) - a^-1 p-(D^dag)^* a|`` with both splits computed independently."""
    g = green_matrices(op)
    worst = 0.0
    for p in points:
        a = g.a_at(p)
        pp = boundary_ode_split(op, p).p_plus
        pm_dag = np.eye(pp.shape[0]) - boundary_ode_split(op_dag, p).p_plus
        pred = np.linalg.solve(a, pm_dag.conj().T @ a)
        worst = max(worst, float(np.linalg.norm(pp - pred, 2)))
    return worst


def bundle_projector(m: int, rank: int, k: int) -> np.ndarray:
    """Projection onto the first ``k`` trace slots; its kernel is ``{xi_0 = ... = xi_{k-1} = 0}``."""
    P = np.zeros((m * rank, m * rank), dtype=complex)
    P[: k * rank, : k * rank] = np.eye(k * rank)
    return P


def annihilator_check(a: np.ndarray, B: np.ndarray, Bstar: np.ndarray, tol: float = 1e-8) -> dict:
    """``<a xi, eta> = 0`` for xi in B and eta in B* plus the dimension count."""
    pair = Bstar.conj().T @ a @ B
    res = float(np.max(np.abs(pair))) if pair.size else 0.0
    dims_ok = B.shape[1] + Bstar.shape[1] == a.shape[0]
    return {"residual": res, "dimension_sum": B.shape[1] + Bstar.shape[1],
            "verdict": "PASS" if res <= tol and dims_ok else "FAIL"}

