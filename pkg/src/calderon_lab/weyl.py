"""Weyl-law constants and model eigenvalue spectra."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special
from scipy.linalg import eigh
from scipy.optimize import brentq

MANIFOLDS = ("interval", "rectangle", "unit_disc")


class WeylError(ArithmeticError):
    pass


@dataclass(frozen=True)
class WeylInput:
    """A model manifold with a positive interior principal symbol.

    ``sigma(x, xi)`` returns a Hermitian positive matrix; by default it is
    ``scale * |xi|^m`` times the identity of size ``rank``.
    """

    manifold: str
    m: int = 2
    params: tuple[float, ...] = ()
    sigma: Callable | None = None
    scale: float = 1.0
    rank: int = 1

    def __post_init__(self):
        if self.manifold not in MANIFOLDS:
            raise ValueError(f"unknown manifold {self.manifold!r}")

    @property
    def n(self) -> int:
        return 1 if self.manifold == "interval" else 2

    @property
    def length(self) -> float:
        return self.params[0] if self.params else np.pi

    @property
    def sides(self) -> tuple[float, float]:
        return tuple(self.params) if self.params else (np.pi, np.pi)  # type: ignore[return-value]

    def symbol(self, x, xi) -> np.ndarray:
        return _symbol_batch(self, np.atleast_2d(x), np.atleast_2d(xi))[0]


# ----------------------------------------------------------------- quadrature

def _cosphere_samples(w: WeylInput, res: int):
    """Arrays ``(x, xi, weight)`` sampling the unit cosphere bundle."""
    g, gw = np.polynomial.legendre.leggauss(res)
    if w.manifold == "interval":
        x = 0.5 * w.length * (g + 1)
        wx = 0.5 * w.length * gw
        X = np.concatenate([x, x])[:, None]
        XI = np.concatenate([np.ones_like(x), -np.ones_like(x)])[:, None]
        return X, XI, np.concatenate([wx, wx])
    phis = 2 * np.pi * np.arange(res) / res
    if w.manifold == "rectangle":
        a, b = w.sides
        xs, xw = 0.5 * a * (g + 1), 0.5 * a * gw
        ys, yw = 0.5 * b * (g + 1), 0.5 * b * gw
        P = np.array([(x, y) for x in xs for y in ys])
        PW = np.outer(xw, yw).ravel()
    else:
        rs, rw = 0.5 * (g + 1), 0.25 * gw * (g + 1)
        P = np.array([(r * np.cos(t), r * np.sin(t)) for r in rs for t in phis])
        PW = np.repeat(rw, res) * 2 * np.pi / res
    X = np.repeat(P, res, axis=0)
    XI = np.tile(np.stack([np.cos(phis), np.sin(phis)], axis=1), (P.shape[0], 1))
    return X, XI, np.repeat(PW, res) * 2 * np.pi / res


def _symbol_batch(w: WeylInput, X, XI) -> np.ndarray:
    if w.sigma is None:
        s = w.scale * np.linalg.norm(XI, axis=1) ** w.m
        return s[:, None, None] * np.eye(w.rank)[None]
    try:
        out = np.asarray(w.sigma(X, XI), dtype=complex)
        if out.ndim == 3 and out.shape[0] == X.shape[0]:
            return out
    except Exception:   # symbol written for a single point
        pass
    return np.stack([np.atleast_2d(np.asarray(w.sigma(x, xi), dtype=complex)) for x, xi in zip(X, XI)])


def _cosphere_integral(w: WeylInput, res: int, power: float) -> tuple[float, float]:
    X, XI, wt = _cosphere_samples(w, res)
    ev = np.linalg.eigvalsh(_symbol_batch(w, X, XI))
    lam_min = float(ev.min())
    if lam_min <= 0:
        i = int(np.argmin(ev.min(axis=1)))
        raise WeylError(f"symbol is not positive at x={X[i]}, xi={XI[i]}")
    return float(np.sum(wt * np.sum(ev ** power, axis=1))), lam_min


def weyl_constant(w: WeylInput, resolution: int = 32, power: float | None = None) -> dict:
    """``c_D = ((1/(n (2 pi)^n)) int Tr sigma^(-n/m))^(-m/n)`` with a doubling check.

    ``power`` overrides the exponent ``-n/m`` (used for ``sigma^* sigma``).
    """
    n, m = w.n, w.m
    p = -n / m if power is None else power
    vals = []
    for res in (resolution, 2 * resolution):
        I, lam_min = _cosphere_integral(w, res, p)
        vals.append((I / (n * (2 * np.pi) ** n)) ** (1 / p))
    change = abs(vals[1] - vals[0]) / abs(vals[1])
    return {"c_D": float(vals[1]), "doubling_change": float(change), "converged": bool(change < 1e-6),
            "min_symbol_eigenvalue": lam_min}


# ----------------------------------------------------------------- root finding

def _scan_roots(f, a: float, b: float, step: float, min_x: float = 0.0) -> list[float]:
    x = np.arange(a, b + step, step)
    y = f(x)
    roots = []
    for i in np.nonzero(np.sign(y[:-1]) * np.sign(y[1:]) < 0)[0]:
        r = brentq(f, x[i], x[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
        if r > min_x:
            roots.append(r)
    return roots


def bessel_zeros(n: int, kind: str, xmax: float, c: float = 0.0) -> list[float]:
    """Positive roots below ``xmax`` of ``J_n`` (dirichlet), ``J_n'`` (neumann) or ``x J_n' + c J_n`` (robin)."""
    if kind == "dirichlet":
        f = lambda x: special.jv(n, x)                           # noqa: E731
    elif kind == "neumann":
        f = lambda x: special.jvp(n, x)                          # noqa: E731
    elif kind == "robin":
        f = lambda x: x * special.jvp(n, x) + c * special.jv(n, x)  # noqa: E731
    else:
        raise ValueError(kind)
    start = max(0.9 * n, 1e-3) if kind != "robin" or c >= 0 else 1e-3
    if start >= xmax:
        return []
    roots = _scan_roots(f, start, xmax, 0.25, min_x=1e-8)
    for r in roots:
        scale = abs(special.jv(n, r)) + abs(special.jvp(n, r)) + abs(special.jv(n + 1, r))
        if abs(f(r)) > 1e-10 * max(1.0, r) * max(scale, 1e-300) and abs(f(r)) > 1e-10:
            raise WeylError(f"root residual too large at order {n}")
    return roots


def _interval_eigs(L: float, bc: str, K: int, c: float = 0.0) -> np.ndarray:
    if bc == "dirichlet":
        return (np.pi * np.arange(1, K + 1) / L) ** 2
    if bc == "neumann":
        return (np.pi * np.arange(0, K) / L) ** 2
    if c < 0:
        raise WeylError("negative Robin parameter is not supported on the interval")
    # -u'' with u'(0) = c u(0), u'(L) = -c u(L)
    f = lambda k: (k * k - c * c) * np.sin(k * L) - 2 * c * k * np.cos(k * L)  # noqa: E731
    kmax = np.pi * (K + 2) / L
    roots = _scan_roots(f, 1e-6, kmax, np.pi / (8 * L), min_x=1e-9)
    return np.array(sorted(roots)[:K]) ** 2


def model_eigenvalues(w: WeylInput, bc: str, count: int, c: float = 0.0) -> np.ndarray:
    """The first ``count`` eigenvalues (with multiplicity) of ``scale * (-Laplacian)``."""
    if count < 1:
        raise ValueError("count must be positive")
    if w.m != 2 or w.sigma is not None or w.rank != 1:
        raise ValueError("model spectra are available for scalar multiples of the Laplacian")
    if bc not in ("dirichlet", "neumann", "robin"):
        raise ValueError(f"unknown boundary condition {bc!r}")
    if w.manifold == "interval":
        return w.scale * _interval_eigs(w.length, bc, count, c)
    if w.manifold == "rectangle":
        a, b = w.sides
        k = int(np.ceil(np.sqrt(count))) + 4
        while True:
            ea = _interval_eigs(a, bc, 4 * k, c)
            eb = _interval_eigs(b, bc, 4 * k, c)
            lam = np.sort((ea[:, None] + eb[None, :]).ravel())
            if lam.size >= count and lam[count - 1] < min(ea[-1], eb[-1]):
                return w.scale * lam[:count]
            k *= 2
    lam_max = 4 * count + 8 * np.sqrt(count) + 50
    while True:
        xmax = np.sqrt(lam_max)
        vals: list[float] = [0.0] if bc == "neumann" else []
        n = 0
        while n <= xmax + 2:
            zs = bessel_zeros(n, bc, xmax, c)
            mult = 1 if n == 0 else 2
            for z in zs:
                vals.extend([z * z] * mult)
            n += 1
        vals.sort()
        if len(vals) >= count:
            return w.scale * np.array(vals[:count])
        lam_max *= 1.5


# ----------------------------------------------------------------- fits

def asymptotic_fit(eigs, m: int, n: int, windows: int = 4) -> dict:
    """Median of ``lambda_k / k^(m/n)`` over the top half, plus per-window medians."""
    eigs = np.asarray(eigs, dtype=float)
    if eigs.size < 500:
        raise ValueError("at least 500 eigenvalues are needed")
    k = np.arange(1, eigs.size + 1)
    ratio = eigs / k ** (m / n)
    top = slice(eigs.size // 2, None)
    c_hat = float(np.median(ratio[top]))
    edges = np.linspace(0, eigs.size, windows + 1).astype(int)
    win = [{"k_range": [int(edges[i]) + 1, int(edges[i + 1])],
            "median": float(np.median(ratio[edges[i]:edges[i + 1]]))} for i in range(windows)]
    return {"c_hat": c_hat, "window_report": win, "drift": float(win[-1]["median"] - win[-2]["median"])}


def two_term_fit(eigs) -> dict:
    """Least-squares fit ``lambda_k ~ c k + b sqrt(k)`` over the top half (planar domains)."""
    eigs = np.asarray(eigs, dtype=float)
    k = np.arange(1, eigs.size + 1, dtype=float)
    top = slice(eigs.size // 2, None)
    A = np.stack([k[top], np.sqrt(k[top])], axis=1)
    (c, b), *_ = np.linalg.lstsq(A, eigs[top], rcond=None)
    return {"c": float(c), "b": float(b)}


def counting_function_check(eigs, c_D: float, m: int, n: int) -> float:
    """``N(lambda) (c_D / lambda)^(n/m)`` at ``lambda = lambda_{K/2}``."""
    eigs = np.sort(np.asarray(eigs, dtype=float))
    lam = eigs[eigs.size // 2 - 1]
    count = int(np.sum(eigs <= lam))
    return float(count * (c_D / lam) ** (n / m))


def singular_value_fit(model, bc: str, trunc: int, K: int | None = None) -> dict:
    """Truncated singular values of a disc realization against Weyl's prediction.

    ``model`` is a disc model from :mod:`calderon_lab.disc`; supported cases
    are D0 with the APS condition (predicted ``mu_k ~ sqrt(c k)`` with ``c``
    from ``sigma^* sigma = |xi|^2``) and the second-order model with
    Dirichlet condition (``mu_k = lambda_k``).
    """
    from . import disc, radial

    K = K or max(24, trunc)
    mus = []
    if model.m == 1:
        if bc != "aps":
            raise ValueError("first-order fit uses the APS condition")
        for n in range(-trunc, trunc + 1):
            r, w = radial.radial_quadrature(abs(n) + 2 * K + 8)
            V, dV = radial.jacobi_basis(n, K, r)
            # slot 1 is constrained for n < 0, slot 2 for n > 0
            free = [n >= 0, n <= 0]
            Vs, dVs = [], []
            for j in range(2):
                if free[j]:
                    Vs.append(V), dVs.append(dV)
                else:
                    Vs.append((1 - r)[:, None] * V), dVs.append(-V + (1 - r)[:, None] * dV)
            Nn = disc.SIGMA @ np.diag([n, -n]).astype(complex)
            q = r.size
            T = np.zeros((2 * q, 2 * K), dtype=complex)
            U = np.zeros((2 * q, 2 * K), dtype=complex)
            for j in range(2):
                for i in range(2):
                    T[i * q:(i + 1) * q, j * K:(j + 1) * K] = disc.SIGMA[i, j] * dVs[j] + (Nn[i, j] / r)[:, None] * Vs[j]
                U[j * q:(j + 1) * q, j * K:(j + 1) * K] = Vs[j]
            sv = radial.relative_singular_values(T, U, np.concatenate([w, w]))
            mus.extend(sv.tolist())
        pred = weyl_constant(WeylInput("unit_disc", m=1, rank=2, scale=1.0),
                             16, power=-1.0)["c_D"]
        mu_max = 0.5 * min(trunc, K)
        mus = np.sort(np.array(mus))
        mus = mus[mus < mu_max]
        k = np.arange(1, mus.size + 1)
        top = slice(mus.size // 2, None)
        fit = float(np.median(mus[top] ** 2 / k[top]))
        return {"predicted_c": pred, "fitted_c": fit, "rel_error": abs(fit - pred) / pred,
                "window": [int(mus.size // 2) + 1, int(mus.size)], "count": int(mus.size)}
    if bc != "dirichlet":
        raise ValueError("second-order fit uses the Dirichlet condition")
    for n in range(0, trunc + 1):
        S, M = disc._laplace_forms(model, n, K)
        ev = eigh(S, M, eigvals_only=True)
        mus.extend(ev.tolist() * (1 if n == 0 else 2))
    mus = np.sort(np.array(mus))
    lam_max = 0.25 * min(trunc, 2 * K) ** 2
    mus = mus[mus < lam_max]
    exact = model_eigenvalues(WeylInput("unit_disc"), "dirichlet", mus.size) + model.lam_shift
    return {"count": int(mus.size), "max_abs_error_vs_bessel": float(np.max(np.abs(mus - exact))),
            "predicted_c": 4.0,
            "fitted_c": float(np.median((mus / np.arange(1, mus.size + 1))[mus.size // 2:]))}
