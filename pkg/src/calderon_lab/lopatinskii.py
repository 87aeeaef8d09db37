"""Shapiro-Lopatinskii verdicts for projector-defined boundary conditions.

A boundary condition is given as ``B = ker P`` with ``P`` an idempotent
symbol field on jet space (D_t trace coordinates).  It is elliptic at a point
when ``p+ - (1 - P)`` is invertible, equivalently when ``P`` maps ``E+``
isomorphically onto ``ran P``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calderon import boundary_ode_split
from .symbols import CollarOperator, CospherePoint, CosphereGrid, DEFAULT_TOLERANCES


@dataclass
class EllipticityReport:
    verdict: str
    min_singular_value: float
    witness: CospherePoint | None
    method: str
    tolerance: float
    per_point: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))
    commutator_order_estimate: float | None = None

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "min_singular_value": self.min_singular_value,
                "witness": None if self.witness is None else
                {"base_coords": list(self.witness.base_coords), "covector": list(self.witness.covector)},
                "method": self.method, "tolerance": self.tolerance,
                "commutator_order_estimate": self.commutator_order_estimate}


def _projectors(P, n):
    P = np.asarray(P, dtype=complex)
    if P.ndim == 2:
        P = np.broadcast_to(P, (n,) + P.shape)
    return P


def _report(margins, points, method, tol):
    i = int(np.argmin(margins))
    verdict = "elliptic" if margins[i] > tol else "not_elliptic"
    return EllipticityReport(verdict, float(margins[i]), points[i], method, tol, np.asarray(margins))


def sl_check_symbol(op: CollarOperator, P, grid: CosphereGrid, tol: float | None = None) -> EllipticityReport:
    """Smallest singular value of ``p+ - (1 - P)``, relative to its norm."""
    tol = DEFAULT_TOLERANCES["ellipticity"] if tol is None else tol
    Ps = _projectors(P, len(grid.points))
    margins = []
    for p, Pk in zip(grid.points, Ps):
        pp = boundary_ode_split(op, p).p_plus
        A = pp - (np.eye(pp.shape[0]) - Pk)
        s = np.linalg.svd(A, compute_uv=False)
        margins.append(s[-1] / max(s[0], 1e-300))
    return _report(margins, grid.points, "symbol", tol)


def sl_check_ode(op: CollarOperator, P, grid: CosphereGrid, tol: float | None = None) -> EllipticityReport:
    """Unique solvability of the half-line problem: ``P|E+ -> ran P`` bijective."""
    tol = DEFAULT_TOLERANCES["ellipticity"] if tol is None else tol
    Ps = _projectors(P, len(grid.points))
    margins = []
    for p, Pk in zip(grid.points, Ps):
        Ep = boundary_ode_split(op, p).basis_plus
        U, s, _ = np.linalg.svd(Pk)
        rk = int(np.sum(s > 0.5))       # singular values of a projector are 0 or >= 1
        if rk != Ep.shape[1]:
            margins.append(0.0)
            continue
        if rk == 0:
            margins.append(1.0)
            continue
        M = U[:, :rk].conj().T @ Pk @ Ep
        sv = np.linalg.svd(M, compute_uv=False)
        margins.append(sv[-1] / max(sv[0], 1e-300))
    return _report(margins, grid.points, "ode", tol)


def regularity_verdict(op: CollarOperator, P, grid: CosphereGrid, tol: float | None = None,
                       idempotence_tol: float | None = None) -> dict:
    """Regular and Fredholm verdicts for a pseudodifferential projector field.

    For symbol-level idempotents both coincide with Shapiro-Lopatinskii
    ellipticity; fields that are not idempotent get a symbol-only verdict.
    """
    idempotence_tol = DEFAULT_TOLERANCES["idempotence"] if idempotence_tol is None else idempotence_tol
    Ps = _projectors(P, len(grid.points))
    defect = float(np.max(np.linalg.norm(Ps @ Ps - Ps, axis=(-2, -1), ord=2)))
    sym = sl_check_symbol(op, Ps, grid, tol)
    ode = sl_check_ode(op, Ps, grid, tol)
    agree = bool(np.all((sym.per_point > sym.tolerance) == (ode.per_point > ode.tolerance)))
    if defect > idempotence_tol:
        status = "symbol-level only"
        reg = "neither"
    else:
        status = "pseudodifferential projection"
        reg = "regular" if sym.verdict == "elliptic" else "neither"
    return {"regular": reg == "regular", "fredholm": reg == "regular", "verdict": reg,
            "sl_symbol": sym.as_dict(), "sl_ode": ode.as_dict(), "methods_agree": agree,
            "idempotence_defect": defect, "status": status}


def decay_exponent(ns, norms, floor: float = 1e-14) -> float:
    """Least-squares slope of log(norm) against log|n| over the top half."""
    ns = np.asarray(ns, dtype=float)
    norms = np.asarray(norms, dtype=float)
    order = np.argsort(ns)
    ns, norms = ns[order], norms[order]
    top = slice(len(ns) // 2, None)
    x, y = ns[top], norms[top]
    if np.all(y <= floor * max(1.0, float(np.max(norms)))):
        return -np.inf
    y = np.maximum(y, floor)
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def boundary_decomposing_check(op: CollarOperator, P, grid: CosphereGrid, m: int | None = None,
                               fourier: dict | None = None, tol: float = 1e-9) -> dict:
    """Principal commutator ``[p+, P]`` and, optionally, a Fourier-tier decay check.

    ``fourier`` may hold ``modes``, ``P_C`` and ``P`` (per-mode matrices) and
    ``weights`` (per-mode diagonal Sobolev weights); the norm of
    ``(1 - P_C) P P_C`` is measured in those weights and its decay exponent
    must be at most ``-m + 0.1``.
    """
    m = op.m if m is None else m
    Ps = _projectors(P, len(grid.points))
    worst = 0.0
    for p, Pk in zip(grid.points, Ps):
        pp = boundary_ode_split(op, p).p_plus
        worst = max(worst, float(np.linalg.norm(pp @ Pk - Pk @ pp, 2)))
    out = {"principal_commutator": worst, "symbol_tier": "PASS" if worst <= tol else "FAIL"}
    if fourier is not None:
        modes = np.asarray(fourier["modes"])
        PC = np.asarray(fourier["P_C"])
        PP = np.asarray(fourier["P"])
        W = np.asarray(fourier["weights"])
        I = np.eye(PC.shape[-1])
        norms = []
        for k in range(len(modes)):
            T = (I - PC[k]) @ PP[k] @ PC[k]
            Wk = np.diag(W[k])
            norms.append(np.linalg.norm(Wk @ T @ np.diag(1 / W[k]), 2))
        sel = modes > 0
        expo = decay_exponent(modes[sel], np.asarray(norms)[sel])
        out.update({"fourier_exponent": expo, "fourier_tier": "PASS" if expo <= -m + 0.1 else "FAIL",
                    "fourier_norms": norms})
        out["verdict"] = out["fourier_tier"]
    else:
        out["verdict"] = out["symbol_tier"]
    return out
