"""Model collar operators used by the tests, the demos and the CLI suite."""
from __future__ import annotations

import json
from functools import reduce
from importlib import resources

import numpy as np

from .symbols import CollarOperator, SymbolMatrix

SIGMA = np.array([[0, 1], [-1, 0]], dtype=complex)


def circle_coeffs(mats) -> tuple[SymbolMatrix, ...]:
    """``a_l(xi) = M_l xi^l`` on the circle from constant matrices ``M_l``."""
    out = []
    for l, M in enumerate(mats):
        M = np.atleast_2d(np.asarray(M, dtype=complex))
        out.append(SymbolMatrix(tuple(tuple({(l,): v} if v != 0 else {} for v in row) for row in M), 1))
    return tuple(out)


def _matpoly_product(factors):
    """Coefficients of ``prod_i (A_i t + B_i)`` ordered as ``[t^k, t^(k-1), ..., 1]``."""
    def mul(p, q):
        r = [np.zeros_like(p[0]) for _ in range(len(p) + len(q) - 1)]
        for i, a in enumerate(p):
            for j, b in enumerate(q):
                r[i + j] = r[i + j] + a @ b
        return r
    return reduce(mul, [[A, B] for A, B in factors])


def laplace(geometry: str = "circle") -> CollarOperator:
    """``D_{x_n}^2 + |D'|^2``: interior symbol ``xi_n^2 + |xi'|^2``."""
    if geometry == "flat_torus_2d":
        c = (SymbolMatrix(((({(0, 0): 1},),)), 2), SymbolMatrix.zeros(1, 1, 2),
             SymbolMatrix((({(2, 0): 1, (0, 2): 1},),), 2))
        return CollarOperator(2, 1, 1, geometry, c, name="laplace_torus")
    return CollarOperator(2, 1, 1, "circle", circle_coeffs([[[1]], [[0]], [[1]]]), name="laplace")


def d0_boundary() -> CollarOperator:
    """Principal part of the disc Cauchy-Riemann system at the boundary circle."""
    A0 = -1j * SIGMA
    A1 = SIGMA @ np.diag([1.0, -1.0])
    return CollarOperator(1, 2, 2, "circle", circle_coeffs([A0, A1]), name="d0_boundary")


def scalar_first_order() -> CollarOperator:
    return CollarOperator(1, 1, 1, "circle", circle_coeffs([[[1]], [[1 + 2j]]]), name="scalar_first_order")


def order3_scalar() -> CollarOperator:
    roots = [1j, 2 - 1j, -1 + 2j]
    f = _matpoly_product([(np.eye(1), -r * np.eye(1)) for r in roots])
    return CollarOperator(3, 1, 1, "circle", circle_coeffs(f), name="order3_scalar")


def order2_coupled() -> CollarOperator:
    c = [np.diag([1.0, 2.0]), np.array([[0, 0.3], [-0.3, 0]]), np.eye(2)]
    return CollarOperator(2, 2, 2, "circle", circle_coeffs(c), name="order2_coupled")


def order3_system() -> CollarOperator:
    A = np.array([[1.0, 0.2], [0.0, 1.5]])
    B = np.array([[0.5, -1.0], [1.0, 0.3]])
    f = _matpoly_product([(np.eye(2), -1j * np.eye(2)), (np.eye(2), 1j * np.eye(2)), (A, B)])
    return CollarOperator(3, 2, 2, "circle", circle_coeffs(f), name="order3_system")


def order1_system() -> CollarOperator:
    c = [np.array([[1.0, 0.5j], [0.2, 2.0]]), np.array([[0.4 + 1j, 1.0], [-1.0, -0.3 + 1.5j]])]
    return CollarOperator(1, 2, 2, "circle", circle_coeffs(c), name="order1_system")


def random_order3(seed: int) -> CollarOperator:
    """``prod_i (xi_n - xi R_i)`` with seeded 2x2 ``R_i`` whose eigenvalues are far from real."""
    rng = np.random.default_rng(seed)
    factors = []
    for _ in range(3):
        lam = rng.uniform(-1, 1, 2) + 1j * rng.choice([-1, 1], 2) * rng.uniform(0.5, 1.5, 2)
        V = np.eye(2) + 0.3 * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        R = V @ np.diag(lam) @ np.linalg.inv(V)
        factors.append((np.eye(2, dtype=complex), -R))
    f = _matpoly_product(factors)
    return CollarOperator(3, 2, 2, "circle", circle_coeffs(f), name=f"random_order3_seed{seed}")


def cross_method_fixtures(seed: int = 7) -> list[CollarOperator]:
    """Operators of orders 1, 2, 3 and ranks 1, 2."""
    return [scalar_first_order(), order1_system(), d0_boundary(), laplace(), order2_coupled(),
            order3_scalar(), order3_system(), random_order3(seed)]


FIXTURES = {
    "laplace": laplace,
    "laplace_torus": lambda: laplace("flat_torus_2d"),
    "d0_boundary": d0_boundary,
    "scalar_first_order": scalar_first_order,
    "order3_scalar": order3_scalar,
    "order2_coupled": order2_coupled,
    "order3_system": order3_system,
    "order1_system": order1_system,
}



def fixture_path(name: str):
    """Path-like handle to the shipped ``data/<name>.json``."""
    return resources.files("calderon_lab").joinpath("data", f"{name}.json")


def load_fixture(name: str) -> CollarOperator:
    """Operator shipped as ``data/<name>.json``."""
    from .io import operator_from_json
    return operator_from_json(json.loads(fixture_path(name).read_text()))
