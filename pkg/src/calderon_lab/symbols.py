"""Polynomial symbol tables, cosphere grids and collar operators.

Symbols are stored as explicit tables of monomials in the boundary covector
xi' so that homogeneity and Douglis-Nirenberg order patterns can be checked
without evaluating anything.  A monomial is a tuple of integer powers, one per
covector component, and an entry of a :class:`SymbolMatrix` maps monomials to
complex coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

Poly = Mapping[tuple[int, ...], complex]

DEFAULT_TOLERANCES = {
    "idempotence": 1e-9,
    "ellipticity": 1e-7,
}


class SymbolError(ValueError):
    """Raised on malformed symbol data or unsupported geometry."""


def _clean(poly: Poly) -> dict[tuple[int, ...], complex]:
    return {tuple(int(p) for p in k): complex(v) for k, v in poly.items() if v != 0}


def poly_degree(poly: Poly) -> int | None:
    """Homogeneity degree of a polynomial, ``None`` for the zero polynomial."""
    degs = {sum(k) for k, v in poly.items() if v != 0}
    if not degs:
        return None
    if len(degs) > 1:
        raise SymbolError(f"polynomial is not homogeneous (degrees {sorted(degs)})")
    return degs.pop()


def poly_mul(p: Poly, q: Poly) -> dict[tuple[int, ...], complex]:
    out: dict[tuple[int, ...], complex] = {}
    for kp, vp in p.items():
        for kq, vq in q.items():
            k = tuple(a + b for a, b in zip(kp, kq))
            out[k] = out.get(k, 0) + vp * vq
    return _clean(out)


def poly_add(p: Poly, q: Poly, scale: complex = 1.0) -> dict[tuple[int, ...], complex]:
    out = dict(p)
    for k, v in q.items():
        out[k] = out.get(k, 0) + scale * v
    return _clean(out)


def poly_eval(poly: Poly, xi: np.ndarray) -> np.ndarray:
    """Evaluate at covectors ``xi`` of shape (..., d)."""
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape[:-1], dtype=complex)
    for powers, c in poly.items():
        term = np.full(xi.shape[:-1], c, dtype=complex)
        for j, p in enumerate(powers):
            if p:
                term = term * xi[..., j] ** p
        out = out + term
    return out


@dataclass(frozen=True)
class GradedBundle:
    """Fiber rank, operator order and grading degrees of the jet bundle."""

    rank: int
    m: int
    weights: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 1 or self.m < 1:
            raise SymbolError("rank and m must be positive")
        if not self.weights:
            object.__setattr__(self, "weights", tuple(range(self.m)))
        w = self.weights
        if len(w) != self.m or any(b <= a for a, b in zip(w, w[1:])):
            raise SymbolError("weights must be m strictly increasing integers")

    def expanded_weights(self) -> np.ndarray:
        """Per-row weights of the rank*m dimensional jet space."""
        return np.repeat(np.asarray(self.weights), self.rank)


@dataclass(frozen=True)
class SymbolMatrix:
    """Matrix whose entries are homogeneous polynomials in xi'.

    ``entries[j][k]`` is a dict from power tuples to coefficients.
    """

    entries: tuple[tuple[dict, ...], ...]
    dim: int

    def __post_init__(self):
        rows = tuple(tuple(_clean(e) for e in row) for row in self.entries)
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise SymbolError("symbol matrix must be rectangular and non-empty")
        for row in rows:
            for e in row:
                for k in e:
                    if len(k) != self.dim:
                        raise SymbolError(f"monomial {k} has wrong covector dimension {self.dim}")
        object.__setattr__(self, "entries", rows)
        # triggers the homogeneity check
        object.__setattr__(self, "_degrees", tuple(tuple(poly_degree(e) for e in r) for r in rows))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.entries[0])

    @property
    def degree_pattern(self) -> tuple[tuple[int | None, ...], ...]:
        return self._degrees  # type: ignore[attr-defined]

    @classmethod
    def constant(cls, mat, dim: int) -> "SymbolMatrix":
        mat = np.atleast_2d(np.asarray(mat, dtype=complex))
        zero = (0,) * dim
        return cls(tuple(tuple({zero: v} if v != 0 else {} for v in row) for row in mat), dim)

    @classmethod
    def zeros(cls, rows: int, cols: int, dim: int) -> "SymbolMatrix":
        return cls(tuple(tuple({} for _ in range(cols)) for _ in range(rows)), dim)

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence["SymbolMatrix | None"]], block_shape, dim) -> "SymbolMatrix":
        br, bc = block_shape
        rows = []
        for brow in blocks:
            for i in range(br):
                row = []
                for b in brow:
                    if b is None:
                        row.extend({} for _ in range(bc))
                    else:
                        row.extend(b.entries[i])
                rows.append(tuple(row))
        return cls(tuple(rows), dim)

    def __call__(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        r, c = self.shape
        out = np.zeros(xi.shape[:-1] + (r, c), dtype=complex)
        for j in range(r):
            for k in range(c):
                if self.entries[j][k]:
                    out[..., j, k] = poly_eval(self.entries[j][k], xi)
        return out

    def __matmul__(self, other: "SymbolMatrix") -> "SymbolMatrix":
        r, n = self.shape
        n2, c = other.shape
        if n != n2:
            raise SymbolError("dimension mismatch in symbol product")
        rows = []
        for j in range(r):
            row = []
            for k in range(c):
                acc: dict = {}
                for i in range(n):
                    if self.entries[j][i] and other.entries[i][k]:
                        acc = poly_add(acc, poly_mul(self.entries[j][i], other.entries[i][k]))
                row.append(acc)
            rows.append(tuple(row))
        return SymbolMatrix(tuple(rows), self.dim)

    def __add__(self, other: "SymbolMatrix") -> "SymbolMatrix":
        return self._combine(other, 1.0)

    def __sub__(self, other: "SymbolMatrix") -> "SymbolMatrix":
        return self._combine(other, -1.0)

    def _combine(self, other, s):
        if self.shape != other.shape:
            raise SymbolError("dimension mismatch in symbol sum")
        return SymbolMatrix(tuple(tuple(poly_add(a, b, s) for a, b in zip(ra, rb))
                                  for ra, rb in zip(self.entries, other.entries)), self.dim)

    def scale(self, c: complex) -> "SymbolMatrix":
        return SymbolMatrix(tuple(tuple({k: c * v for k, v in e.items()} for e in row)
                                  for row in self.entries), self.dim)

    def adjoint(self) -> "SymbolMatrix":
        """Hermitian adjoint for real covectors (standard fiber metrics)."""
        r, c = self.shape
        return SymbolMatrix(tuple(tuple({k: np.conj(v) for k, v in self.entries[j][i].items()}
                                        for j in range(r)) for i in range(c)), self.dim)


def eval_symbol(s: SymbolMatrix, point: "CospherePoint", scale: float = 1.0) -> np.ndarray:
    """Evaluate ``s`` at ``scale * xi'`` of a cosphere point."""
    xi = np.asarray(point.covector, dtype=float)
    if xi.shape != (s.dim,):
        raise SymbolError(f"covector dimension {xi.shape} does not match symbol dimension {s.dim}")
    if scale <= 0:
        raise SymbolError("scale must be positive")
    return s(scale * xi)


def dn_order_check(s: SymbolMatrix, declared_order: int, row_weights, col_weights) -> dict:
    """Check ``deg[j][k] == order - col_weights[k] + row_weights[j]`` on nonzero entries."""
    r, c = s.shape
    row_weights = list(row_weights)
    col_weights = list(col_weights)
    if len(row_weights) != r or len(col_weights) != c:
        raise SymbolError("weight lengths must match the symbol shape")
    violations = []
    for j in range(r):
        for k in range(c):
            d = s.degree_pattern[j][k]
            if d is None:
                continue
            expected = declared_order - col_weights[k] + row_weights[j]
            if d != expected:
                violations.append({"row": j, "col": k, "degree": d, "expected": expected})
    return {"verdict": "PASS" if not violations else "FAIL", "violations": violations}


# --------------------------------------------------------------------- grids

GEOMETRIES = ("circle", "flat_torus_2d", "interval_endpoints")
COVECTOR_DIM = {"circle": 1, "flat_torus_2d": 2, "interval_endpoints": 0}
GEOMETRY_MEASURE = {
    "circle": 4 * np.pi,                     # two copies of S^1
    "flat_torus_2d": (2 * np.pi) ** 3,
    "interval_endpoints": 2.0,               # counting measure on the two endpoints
}


@dataclass(frozen=True)
class CospherePoint:
    base_coords: tuple[float, ...]
    covector: tuple[float, ...]

    def __post_init__(self):
        xi = np.asarray(self.covector, dtype=float)
        if xi.size and abs(np.linalg.norm(xi) - 1.0) > 1e-14:
            raise SymbolError("cosphere covector must have unit length")


@dataclass(frozen=True)
class CosphereGrid:
    points: tuple[CospherePoint, ...]
    weights: np.ndarray
    descriptor: str

    @property
    def covectors(self) -> np.ndarray:
        return np.array([p.covector for p in self.points], dtype=float).reshape(len(self.points), -1)

    def total_measure(self) -> float:
        return float(np.sum(self.weights))


def build_cosphere_grid(descriptor: str, resolution: int) -> CosphereGrid:
    """Trapezoid-rule sampling of the unit cosphere bundle of a model boundary."""
    if descriptor not in GEOMETRIES:
        raise SymbolError(f"unsupported geometry {descriptor!r}; expected one of {GEOMETRIES}")
    if resolution < 2:
        raise SymbolError(f"resolution {resolution} below minimum 2")
    h = 2 * np.pi / resolution
    base = h * np.arange(resolution)
    if descriptor == "circle":
        pts = [CospherePoint((float(t),), (s,)) for t in base for s in (1.0, -1.0)]
        w = np.full(len(pts), h)
    elif descriptor == "flat_torus_2d":
        pts = []
        for t1 in base:
            for t2 in base:
                for phi in base:
                    pts.append(CospherePoint((float(t1), float(t2)),
                                             (float(np.cos(phi)), float(np.sin(phi)))))
        w = np.full(len(pts), h ** 3)
    else:
        pts = [CospherePoint((0.0,), ()), CospherePoint((1.0,), ())]
        w = np.ones(2)
    return CosphereGrid(tuple(pts), w, descriptor)


# ----------------------------------------------------------- collar operator

@dataclass(frozen=True)
class CollarOperator:
    """Order-m operator ``sum_l A_l D_{x_n}^{m-l}`` frozen at the boundary.

    ``coeffs[l]`` is the principal symbol of ``A_l`` (degree ``l`` in xi').
    ``dnormal[l]`` and ``zeroth[l]`` are optional normal derivatives and
    zeroth-order parts; they are carried through serialization but the
    principal-symbol computations do not use them.
    """

    m: int
    rank_e: int
    rank_f: int
    geometry: str
    coeffs: tuple[SymbolMatrix, ...]
    dnormal: tuple[SymbolMatrix | None, ...] = ()
    zeroth: tuple[np.ndarray | None, ...] = ()
    name: str = ""

    def __post_init__(self):
        if self.geometry not in GEOMETRIES:
            raise SymbolError(f"unsupported geometry {self.geometry!r}")
        if len(self.coeffs) != self.m + 1:
            raise SymbolError(f"need m+1={self.m + 1} coefficients, got {len(self.coeffs)}")
        if self.rank_e != self.rank_f:
            raise SymbolError("only square systems (rank_e == rank_f) are supported")
        for l, c in enumerate(self.coeffs):
            if c.shape != (self.rank_f, self.rank_e):
                raise SymbolError(f"coefficient {l} has shape {c.shape}")
            for row in c.degree_pattern:
                for d in row:
                    if d is not None and d != l:
                        raise SymbolError(f"coefficient {l} must be homogeneous of degree {l}, found {d}")
        if not self.dnormal:
            object.__setattr__(self, "dnormal", (None,) * (self.m + 1))
        if not self.zeroth:
            object.__setattr__(self, "zeroth", (None,) * (self.m + 1))

    @property
    def rank(self) -> int:
        return self.rank_e

    @property
    def covector_dim(self) -> int:
        return COVECTOR_DIM[self.geometry]

    @property
    def bundle(self) -> GradedBundle:
        return GradedBundle(self.rank_e, self.m)

    def A0(self) -> np.ndarray:
        return self.coeffs[0](np.zeros(self.covector_dim))

    def coefficient_matrices(self, xi) -> np.ndarray:
        """Array of shape (m+1, rank, rank) with ``a_l(xi')``."""
        xi = np.asarray(xi, dtype=float)
        return np.stack([c(xi) for c in self.coeffs])

    def interior_symbol(self, xi, xi_n) -> np.ndarray:
        """``a(xi', xi_n) = sum_l a_l(xi') xi_n^(m-l)`` for arrays of xi_n."""
        a = self.coefficient_matrices(xi)
        xi_n = np.asarray(xi_n, dtype=complex)
        out = np.zeros(xi_n.shape + a.shape[1:], dtype=complex)
        for l in range(self.m + 1):
            out = out + a[l] * (xi_n ** (self.m - l))[..., None, None]
        return out

    def adjoint(self) -> "CollarOperator":
        """Formal adjoint with x'- and x_n-independent coefficients."""
        return CollarOperator(self.m, self.rank_f, self.rank_e, self.geometry,
                              tuple(c.adjoint() for c in self.coeffs),
                              name=(self.name + "_adjoint") if self.name else "")


def interior_ellipticity(op: CollarOperator, grid: CosphereGrid, xi_n_samples: int = 64,
                         tol: float | None = None) -> dict:
    """Smallest singular value of the interior symbol on the unit sphere in (xi', xi_n)."""
    if xi_n_samples < 8:
        raise SymbolError("xi_n_samples must be at least 8")
    tol = DEFAULT_TOLERANCES["ellipticity"] if tol is None else tol
    # angles in (-pi/2, pi/2]: (cos t xi', sin t) covers the half sphere, and
    # the symbol is homogeneous so the other half is redundant
    t = np.linspace(-np.pi / 2, np.pi / 2, xi_n_samples, endpoint=False) + np.pi / (2 * xi_n_samples)
    xi = grid.covectors
    a = op.coefficient_matrices(xi)                     # (m+1, P, r, r)
    c, s = np.cos(t), np.sin(t)
    # homogeneity: a_l(cos t xi') = cos^l t a_l(xi')
    full = sum(a[l][:, None] * (c ** l * s ** (op.m - l))[None, :, None, None]
               for l in range(op.m + 1))
    sv = np.linalg.svd(full, compute_uv=False)[..., -1]  # (P, T)
    i, j = np.unravel_index(int(np.argmin(sv)), sv.shape)
    best = float(sv[i, j])
    witness = {"point": grid.points[i], "xi_n_angle": float(t[j])}
    # sampling can step over a real root; the conormal roots catch it exactly
    from .calderon import companion_matrix
    root_margin = np.inf
    for k, p in enumerate(grid.points):
        if np.linalg.svd(a[0, k], compute_uv=False)[-1] <= tol:
            root_margin, witness = 0.0, {"point": p, "xi_n_angle": float(np.pi / 2)}
            break
        roots = np.linalg.eigvals(companion_matrix(a[:, k]))
        if roots.size:
            marg = float(np.min(np.abs(roots.imag)) / max(1.0, float(np.max(np.abs(roots)))))
            if marg < root_margin:
                root_margin = marg
                if marg <= tol:
                    witness = {"point": p, "real_root": float(roots[np.argmin(np.abs(roots.imag))].real)}
    ok = best > tol and root_margin > tol
    return {"verdict": "PASS" if ok else "FAIL", "min_singular_value": best,
            "conormal_root_margin": root_margin, "witness_point": witness, "tolerance": tol}


@dataclass(frozen=True)
class ProjectorField:
    """Per-point square matrices that should be idempotent."""

    values: np.ndarray
    tolerance: float = DEFAULT_TOLERANCES["idempotence"]
    labels: tuple = field(default=())

    def idempotence_defect(self) -> np.ndarray:
        v = self.values
        return np.linalg.norm(v @ v - v, axis=(-2, -1), ord=2)

    def check(self) -> bool:
        return bool(np.all(self.idempotence_defect() <= self.tolerance))

    def ranks(self) -> np.ndarray:
        # the trace of an idempotent is its rank
        return np.rint(np.trace(self.values, axis1=-2, axis2=-1).real).astype(int)


def expand_weights(weights: Iterable[int], rank: int) -> list[int]:
    return [w for w in weights for _ in range(rank)]
