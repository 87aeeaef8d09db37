"""End-to-end acceptance suite.

Each ``criterion_*`` function returns a dict with the measured quantities, the
thresholds they are compared against and a ``verdict``.  Wall-clock times
are returned separately so that the main report stays byte-reproducible.
"""
from __future__ import annotations

import time

import numpy as np

from . import CONVENTION_FLAGS, __version__
from . import disc, weyl
from .calderon import (aps_projector, boundary_ode_split, p_plus_at_covector, p_plus_residue,
                       to_convention)
from .fixtures import cross_method_fixtures, d0_boundary, laplace
from .lopatinskii import regularity_verdict
from .pairing import duality_residual
from .symbols import DEFAULT_TOLERANCES, build_cosphere_grid


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def criterion_1(seed: int = 7) -> dict:
    grid = build_cosphere_grid("circle", 64)
    per = {}
    for op in cross_method_fixtures(seed):
        res = 0.0
        for p in grid.points:
            res = max(res, float(np.max(np.abs(p_plus_residue(op, p) - boundary_ode_split(op, p).p_plus))))
        per[op.name] = {"order": op.m, "rank": op.rank, "max_residual": res}
    worst = max(v["max_residual"] for v in per.values())
    orders = sorted({v["order"] for v in per.values()})
    ranks = sorted({v["rank"] for v in per.values()})
    ok = worst <= 1e-8 and len(per) >= 6 and orders == [1, 2, 3] and ranks == [1, 2]
    return {"fixtures": per, "grid_points": len(grid.points), "max_residual": worst,
            "tolerance": 1e-8, "verdict": _verdict(ok), "runtime_limit_s": 10.0}


def criterion_2() -> dict:
    op = laplace()
    errs_p, errs_c = [], []
    PD = np.diag([1.0, 0.0])
    for xi in (0.5, 1.0, 2.0, 3.0, -1.0, -2.5):
        a = abs(xi)
        P = to_convention(p_plus_at_covector(op, [xi]), 2, 1, "outward")
        ref = 0.5 * np.array([[1, 1 / a], [a, 1]])
        errs_p.append(float(np.max(np.abs(P - ref))))
        comm = PD @ P - P @ PD
        refc = 0.5 * np.array([[0, 1 / a], [-a, 0]])
        errs_c.append(float(np.max(np.abs(comm - refc))))
    ok = max(errs_p) <= 1e-9 and max(errs_c) <= 1e-9
    return {"trace_convention": "outward", "max_entry_error_P_C": max(errs_p),
            "max_entry_error_commutator": max(errs_c), "tolerance": 1e-9, "verdict": _verdict(ok)}


def criterion_3(seed: int = 7) -> dict:
    per = {}
    circle = build_cosphere_grid("circle", 32)
    torus = build_cosphere_grid("flat_torus_2d", 4)
    for op in cross_method_fixtures(seed) + [laplace("flat_torus_2d")]:
        g = circle if op.geometry == "circle" else torus
        per[op.name] = duality_residual(op, op.adjoint(), g.points)
    worst = max(per.values())
    return {"residuals": per, "max_residual": worst, "tolerance": 1e-8, "verdict": _verdict(worst <= 1e-8)}


def criterion_4() -> dict:
    grid = build_cosphere_grid("circle", 32)
    L, D0 = laplace(), d0_boundary()
    cases = {
        "laplace_dirichlet": (L, np.diag([1.0, 0.0]).astype(complex), "regular"),
        "laplace_neumann": (L, np.diag([0.0, 1.0]).astype(complex), "regular"),
        "laplace_calderon_complement": (L, np.stack([boundary_ode_split(L, p).p_plus for p in grid.points]),
                                        "regular"),
        "d0_aps": (D0, np.stack([aps_projector(D0, p) for p in grid.points]), "regular"),
        "d0_rank_deficient": (D0, np.eye(2, dtype=complex), "neither"),
    }
    out = {}
    ok = True
    for name, (op, P, expect) in cases.items():
        r = regularity_verdict(op, P, grid)
        good = r["verdict"] == expect and r["methods_agree"]
        ok &= good
        out[name] = {"verdict": r["verdict"], "expected": expect, "methods_agree": r["methods_agree"],
                     "sl_symbol_margin": r["sl_symbol"]["min_singular_value"],
                     "sl_ode_margin": r["sl_ode"]["min_singular_value"],
                     "sl_verdict": r["sl_symbol"]["verdict"]}
    return {"cases": out, "tolerance": DEFAULT_TOLERANCES["ellipticity"], "verdict": _verdict(ok)}


def criterion_5() -> dict:
    N = 256
    ns = disc.modes_range(N)
    m0 = disc.d0()
    A = disc.adapted_boundary_operator(m0, ns)
    nz = ns != 0
    d0_res = float(np.max(np.abs(disc.chi_plus(A, disc.MODE0_CUT, ns)[nz] - disc.calderon_modes(m0, ns)[nz])))
    profiles = {}
    raw_ok = extrap_ok = True
    for prof in ("linear:1", "quadratic:1", "cubic:1"):
        model = disc.d_alpha(prof)
        cs = disc.case_study_limit(model, [128, 256, -128, -256])
        s = cs["scaled"]
        errs_raw, errs_ext = [], []
        for i_lo, i_hi, lim in ((0, 1, cs["limit_plus"]), (2, 3, cs["limit_minus"])):
            nl = np.linalg.norm(lim)
            errs_raw.append(float(np.linalg.norm(s[i_hi] - lim) / nl))
            ext = disc.richardson_limit(s[i_hi], s[i_lo], 256, 128)
            errs_ext.append(float(np.linalg.norm(ext - lim) / nl))
        profiles[prof] = {"scaled_n256": s[1], "scaled_n_minus256": s[3], "limit_plus": cs["limit_plus"],
                          "limit_minus": cs["limit_minus"], "rel_error_raw": max(errs_raw),
                          "rel_error_extrapolated": max(errs_ext)}
        raw_ok &= max(errs_raw) <= 1e-3
        extrap_ok &= max(errs_ext) <= 1e-3
    flat = disc.case_study_limit(disc.d_alpha("flat:1"), [256, -256])["scaled"]
    flat_val = float(np.max(np.abs(flat)))
    ok = d0_res <= 1e-10 and raw_ok and flat_val < 1e-3
    return {"d0_max_residual": d0_res, "d0_tolerance": 1e-10, "profiles": profiles,
            "raw_within_1e-3": raw_ok, "extrapolated_within_1e-3": extrap_ok,
            "flat_profile_scaled_n256": flat_val, "flat_tolerance": 1e-3,
            "verdict": _verdict(ok), "runtime_limit_s": 60.0}


def criterion_6() -> dict:
    model = disc.d_alpha("linear:1")
    bound = 0.8 * abs(model.alpha_derivative_at_boundary()) / 4
    wins = {str(N): disc.compactness_window(model, N)["min"] for N in (32, 64, 128)}
    return {"window_lower_bounds": wins, "threshold": bound, "verdict": _verdict(min(wins.values()) >= bound)}


def criterion_7() -> dict:
    model = disc.d0()
    out = {}
    ok = True
    for K in range(-3, 4):
        rep = disc.index_stabilization(model, K, [64, 96, 128])
        out[str(K)] = rep.as_dict()
        ok &= rep.index == K and rep.status == "stable" and all(v == K for _, v in rep.stabilization)
    return {"cuts": out, "tolerance": "exact integer match", "verdict": _verdict(ok)}


def criterion_8(N: int = 32) -> dict:
    model = disc.laplace_model()
    _, W, P = disc.laplace_boundary_space(model, N)
    I = np.eye(P.shape[0])
    fixtures = {
        "dirichlet": disc.dirichlet_condition(N, W),
        "robin_constant": disc.robin_condition({0: 2.0}, N, W),
        "robin_lacunary": disc.robin_condition(disc.lacunary_coefficients(8, 0), N, W),
    }
    out = {}
    ok = True
    for name, B in fixtures.items():
        r = disc.graphical_decomposition(B, P)
        out[name] = {"reconstruction_gap": r["reconstruction_gap"], "adjoint_gap": r["adjoint_gap"],
                     "dims": r["dims"], "g_norm": r["g_norm"]}
        ok &= r["reconstruction_gap"] <= 1e-8 and r["adjoint_gap"] <= 1e-8
    aps = disc.graphical_decomposition(I - P, P)
    out["aps"] = {"g_is_zero": aps["g_is_zero"], "g_max_abs": float(np.max(np.abs(aps["g"]))),
                  "dims": aps["dims"]}
    ok &= aps["g_is_zero"] and float(np.max(np.abs(aps["g"]))) == 0.0
    return {"trunc": N, "fixtures": out, "tolerance": 1e-8, "verdict": _verdict(ok)}


def criterion_9() -> dict:
    disc_in = weyl.WeylInput("unit_disc")
    c = weyl.weyl_constant(disc_in)
    c_err = abs(c["c_D"] - 4.0) / 4.0
    eig_d = weyl.model_eigenvalues(disc_in, "dirichlet", 2000)
    eig_n = weyl.model_eigenvalues(disc_in, "neumann", 2000)
    fit_d = weyl.asymptotic_fit(eig_d, 2, 2)
    fit_n = weyl.asymptotic_fit(eig_n, 2, 2)
    eig_i = weyl.model_eigenvalues(weyl.WeylInput("interval"), "dirichlet", 2000)
    fit_i = weyl.asymptotic_fit(eig_i, 2, 1)
    ci = weyl.weyl_constant(weyl.WeylInput("interval"))["c_D"]
    rel_d = abs(fit_d["c_hat"] - 4) / 4
    rel_i = abs(fit_i["c_hat"] - ci) / ci
    ok = c_err <= 1e-6 and rel_d <= 0.02 and rel_i <= 0.005
    return {"c_D_quadrature": c["c_D"], "c_D_rel_error": c_err,
            "disc_dirichlet_median": fit_d["c_hat"], "disc_dirichlet_rel_error": rel_d,
            "disc_neumann_median": fit_n["c_hat"], "disc_neumann_rel_error": abs(fit_n["c_hat"] - 4) / 4,
            "disc_dirichlet_two_term_fit": weyl.two_term_fit(eig_d),
            "disc_neumann_two_term_fit": weyl.two_term_fit(eig_n),
            "interval_median": fit_i["c_hat"], "interval_rel_error": rel_i,
            "tolerances": {"quadrature": 1e-6, "disc_median": 0.02, "interval_median": 0.005},
            "verdict": _verdict(ok), "runtime_limit_s": 30.0}


def criterion_10() -> dict:
    Ns = [16, 32, 64]
    out = {}
    ok = True
    for name, model in (("d0", disc.d0()), ("laplace", disc.laplace_model())):
        for lam in (0, 1, 1j, 2 - 3j):
            r = disc.max_kernel_growth(model, lam, Ns)
            good = all(g >= n / 2 for g, n in zip(r["growth"], Ns[:-1]))
            ok &= good
            out[f"{name}@{complex(lam)}"] = {"N": Ns, "dims": r["dims"], "growth": r["growth"]}
    return {"models": out, "threshold": "growth >= N/2 per doubling", "verdict": _verdict(ok)}


def criterion_11() -> dict:
    from .weyl import bessel_zeros
    j01 = bessel_zeros(0, "dirichlet", 3.0)[0]
    out = {}
    ok = True
    for name, model in (("d0", disc.d0()), ("laplace", disc.laplace_model())):
        vals = [disc.poincare_constant(model, N) for N in (32, 64, 128)]
        v = np.array([x["value"] for x in vals])
        spread = float((v.max() - v.min()) / v.min())
        good = bool(v.min() > 0 and spread <= 0.02 and all(x["inequality_holds"] for x in vals))
        out[name] = {"values": v, "spread": spread, "inequality_holds": all(x["inequality_holds"] for x in vals)}
        if name == "laplace":
            ref = 1 + j01 ** 2
            out[name]["reference"] = ref
            out[name]["rel_error"] = float(abs(v[-1] - ref) / ref)
            good &= out[name]["rel_error"] <= 0.01
        ok &= good
    return {"models": out, "truncations": [32, 64, 128], "tolerances": {"spread": 0.02, "reference": 0.01},
            "verdict": _verdict(ok)}


CRITERIA = {
    1: ("Calderon symbol cross-method", criterion_1),
    2: ("Laplace P_C regression and commutator", criterion_2),
    3: ("Duality identity", criterion_3),
    4: ("SL and regularity verdicts", criterion_4),
    5: ("Unit-disc case study", criterion_5),
    6: ("Compactness failure", criterion_6),
    7: ("Index formula", criterion_7),
    8: ("Graphical decomposition", criterion_8),
    9: ("Weyl law", criterion_9),
    10: ("Infinite-kernel growth", criterion_10),
    11: ("Poincare constants", criterion_11),
}


def run_suite(seed: int = 7, only=None) -> tuple[dict, dict]:
    """Run the criteria; returns ``(report, metadata)`` with timings in the latter."""
    results = {}
    timings = {}
    t_all = time.perf_counter()
    for k, (title, fn) in CRITERIA.items():
        if only is not None and k not in only:
            continue
        t0 = time.perf_counter()
        res = fn(seed) if k in (1, 3) else fn()
        timings[str(k)] = time.perf_counter() - t0
        res["title"] = title
        results[str(k)] = res
    total = time.perf_counter() - t_all
    report = {"tool": "calderon-lab", "version": __version__, "seed": seed,
              "conventions": dict(CONVENTION_FLAGS), "criteria": results}
    meta = {"timings_s": timings, "total_s": total,
            "runtime_verdicts": {k: _verdict(timings[k] < results[k]["runtime_limit_s"])
                                 for k in results if "runtime_limit_s" in results[k]}}
    return report, meta
