"""``calderon-lab`` command-line front end.

Exit status: 0 when every verdict passes (a ``not_elliptic`` verdict is a
result, not a failure), 1 when a check fails, 2 on malformed input (the
message names the field) and 3 on numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import CONVENTION_FLAGS, __version__
from .calderon import (TRACE_CONVENTIONS, ContourError, EllipticityError, aps_projector,
                       boundary_ode_split, from_convention, p_plus_residue, to_convention)
from .io import SchemaError, decode_matrix, dumps, load_operator
from .pairing import adjoint_condition_symbol, bundle_projector, green_matrices
from .symbols import DEFAULT_TOLERANCES, SymbolError, build_cosphere_grid

EXIT_OK, EXIT_FAIL, EXIT_SCHEMA, EXIT_NUMERIC = 0, 1, 2, 3


def _header(convention: str = "Dt") -> dict:
    flags = dict(CONVENTION_FLAGS)
    flags["trace_convention"] = convention
    return {"tool": "calderon-lab", "version": __version__, "conventions": flags}


def _parse_grid(text: str):
    kind, _, res = text.partition(":")
    kind = {"torus": "flat_torus_2d", "interval": "interval_endpoints"}.get(kind, kind)
    try:
        res_i = int(res) if res else 64
    except ValueError:
        raise SchemaError("grid", f"bad resolution in {text!r}") from None
    try:
        return build_cosphere_grid(kind, res_i)
    except SymbolError as exc:
        raise SchemaError("grid", str(exc)) from None


def _tolerances(overrides) -> dict:
    tol = dict(DEFAULT_TOLERANCES)
    tol.update({"cross_method": 1e-8, "duality": 1e-8})
    for item in overrides or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise SchemaError("tol-override", f"expected key=value, got {item!r}")
        try:
            tol[key] = float(val)
        except ValueError:
            raise SchemaError(f"tol-override.{key}", f"not a number: {val!r}") from None
    return tol


def _load_projector(path, op, grid) -> tuple[np.ndarray, str, str]:
    """Projector field from a file; returns values in D_t coordinates."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"proj line {exc.lineno}", exc.msg) from None
    if not isinstance(data, dict):
        raise SchemaError("proj", "expected an object")
    conv = data.get("convention", "Dt")
    if conv not in TRACE_CONVENTIONS:
        raise SchemaError("proj.convention", f"expected one of {list(TRACE_CONVENTIONS)}")
    kind = data.get("kind")
    d = op.m * op.rank
    if kind == "named":
        name = data.get("name")
        if name == "calderon_complement":
            P = np.stack([boundary_ode_split(op, p).p_plus for p in grid.points])
            conv = "Dt"
        elif name == "aps":
            P = np.stack([aps_projector(op, p) for p in grid.points])
            conv = "Dt"
        elif name in ("dirichlet", "neumann", "full"):
            k = {"dirichlet": (op.m + 1) // 2, "neumann": op.m // 2, "full": op.m}[name]
            P = bundle_projector(op.m, op.rank, k)
            if name == "neumann":
                P = np.eye(d) - P
            conv = "Dt"   # coordinate projectors are convention independent
        else:
            raise SchemaError("proj.name", "expected dirichlet, neumann, full, aps or calderon_complement")
        return P, conv, str(name)
    if kind == "matrix":
        P = decode_matrix(data.get("matrix"), "proj.matrix")
        if P.shape != (d, d):
            raise SchemaError("proj.matrix", f"expected a {d}x{d} matrix")
        return from_convention(P, op.m, op.rank, conv), conv, "matrix"
    if kind == "per_point":
        vals = data.get("values")
        if not isinstance(vals, list) or len(vals) != len(grid.points):
            raise SchemaError("proj.values", f"expected {len(grid.points)} matrices")
        P = np.stack([from_convention(decode_matrix(v, f"proj.values[{i}]"), op.m, op.rank, conv)
                      for i, v in enumerate(vals)])
        if P.shape[1:] != (d, d):
            raise SchemaError("proj.values", f"expected {d}x{d} matrices")
        return P, conv, "per_point"
    raise SchemaError("proj.kind", "expected named, matrix or per_point")


def _write(report: dict, path) -> None:
    text = dumps(report) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------- subcommands

def cmd_symbol(args) -> int:
    op = load_operator(args.op)
    grid = _parse_grid(args.grid)
    tol = _tolerances(args.tol_override)
    pts = []
    worst = 0.0
    for p in grid.points:
        split = boundary_ode_split(op, p)
        item = {"base_coords": p.base_coords, "covector": p.covector, "roots": split.roots}
        if args.method in ("companion", "both"):
            item["p_plus_companion"] = to_convention(split.p_plus, op.m, op.rank, args.convention)
        if args.method in ("residue", "both"):
            pr = p_plus_residue(op, p)
            item["p_plus_residue"] = to_convention(pr, op.m, op.rank, args.convention)
            if args.method == "both":
                item["cross_method_residual"] = float(np.max(np.abs(pr - split.p_plus)))
                worst = max(worst, item["cross_method_residual"])
        pts.append(item)
    ok = args.method != "both" or worst <= tol["cross_method"]
    rep = _header(args.convention)
    rep.update({"operator": op.name, "grid": args.grid, "method": args.method, "points": pts,
                "max_cross_method_residual": worst, "tolerance": tol["cross_method"],
                "verdict": "PASS" if ok else "FAIL"})
    _write(rep, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sl_check(args) -> int:
    from .lopatinskii import regularity_verdict
    op = load_operator(args.op)
    grid = _parse_grid(args.grid)
    tol = _tolerances(args.tol_override)
    P, conv, name = _load_projector(args.proj, op, grid)
    rep = _header(conv)
    r = regularity_verdict(op, P, grid, tol["ellipticity"], tol["idempotence"])
    rep.update({"operator": op.name, "projector": name, "grid": args.grid, **r})
    # a verdict is a result; only disagreement between methods is a failure
    rep["verdict"] = r["sl_symbol"]["verdict"]
    rep["check"] = "PASS" if r["methods_agree"] else "FAIL"
    _write(rep, args.json)
    return EXIT_OK if r["methods_agree"] else EXIT_FAIL


def cmd_adjoint_bc(args) -> int:
    from .lopatinskii import sl_check_symbol
    op = load_operator(args.op)
    grid = _parse_grid(args.grid)
    P, conv, name = _load_projector(args.proj, op, grid)
    Ps = P if P.ndim == 3 else np.broadcast_to(P, (len(grid.points),) + P.shape)
    g = green_matrices(op)
    a = np.stack([g.a_at(p) for p in grid.points])
    Pd = adjoint_condition_symbol(a, Ps)
    adj = op.adjoint()
    e1 = sl_check_symbol(op, Ps, grid).verdict
    e2 = sl_check_symbol(adj, Pd, grid).verdict
    idem = float(np.max(np.linalg.norm(Pd @ Pd - Pd, axis=(-2, -1), ord=2)))
    rep = _header(conv)
    rep.update({"operator": op.name, "projector": name,
                "p_dagger": [to_convention(x, op.m, op.rank, conv) for x in Pd],
                "idempotence_defect": idem, "sl_verdict": e1, "adjoint_sl_verdict": e2,
                "verdict": "PASS" if e1 == e2 and idem <= 1e-8 else "FAIL"})
    _write(rep, args.out)
    return EXIT_OK if rep["verdict"] == "PASS" else EXIT_FAIL


def _disc_model(name: str, profile: str | None):
    from . import disc
    if name == "d0":
        return disc.d0()
    if name == "d_alpha":
        return disc.d_alpha(profile or "linear:1")
    if name == "laplace":
        return disc.laplace_model()
    raise SchemaError("model", "expected d0, d_alpha or laplace")


def cmd_disc(args) -> int:
    from . import disc
    model = _disc_model(args.model, args.alpha_profile)
    N = args.trunc
    modes = disc.modes_range(N)
    PC = disc.calderon_modes(model, modes)
    rep = _header("outward" if model.m == 2 else "Dt")
    rep.update({"model": model.model, "trunc": N, "flags": model.flags})
    rows = []
    if model.m == 1:
        A = disc.adapted_boundary_operator(model, modes)
        chi = disc.chi_plus(A, disc.MODE0_CUT, modes)
        diff = chi - PC
        nz = modes != 0
        rep["max_abs_chi_minus_PC"] = float(np.max(np.abs(diff[nz]))) if nz.any() else 0.0
        if model.model == "disc_D_alpha":
            cs = disc.case_study_limit(model, [N // 2, N, -(N // 2), -N])
            s = cs["scaled"]
            rep["case_study"] = {"alpha_prime_1": cs["alpha_prime_1"],
                                 "scaled_at_N": s[1], "scaled_at_minus_N": s[3],
                                 "predicted_limit_plus": cs["limit_plus"],
                                 "predicted_limit_minus": cs["limit_minus"],
                                 "extrapolated_plus": disc.richardson_limit(s[1], s[0], N, N // 2),
                                 "extrapolated_minus": disc.richardson_limit(s[3], s[2], N, N // 2)}
            ok = True
        else:
            ok = rep["max_abs_chi_minus_PC"] <= 1e-10
        for n, P, X in zip(modes, PC, chi):
            rows.append([int(n)] + [v for z in P.ravel() for v in (z.real, z.imag)]
                        + [v for z in X.ravel() for v in (z.real, z.imag)])
    else:
        lam = disc.dtn_modes(model, modes)
        rep["dtn_minus_abs_n"] = {"max_over_modes": float(np.max(np.abs(lam - np.abs(modes))))}
        Pz = disc.p_zeta_modes(model, modes)
        idem = float(np.max(np.abs(Pz @ Pz - Pz)))
        rep["p_zeta_idempotence_defect"] = idem
        ok = idem <= 1e-12
        for n, P in zip(modes, PC):
            rows.append([int(n)] + [v for z in P.ravel() for v in (z.real, z.imag)])
    rep["verdict"] = "PASS" if ok else "FAIL"
    _write(rep, args.report)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            d = PC.shape[-1]
            head = ["n"] + [f"PC_{i}{j}_{p}" for i in range(d) for j in range(d) for p in ("re", "im")]
            if model.m == 1:
                head += [f"chi_{i}{j}_{p}" for i in range(d) for j in range(d) for p in ("re", "im")]
            w.writerow(head)
            w.writerows(rows)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_index(args) -> int:
    from . import disc
    model = _disc_model(args.model, args.alpha_profile)
    if model.model != "disc_cauchy_riemann_D0":
        raise SchemaError("model", "the APS-cut index is implemented for d0")
    N = args.trunc
    Ns = sorted({N // 2, (3 * N) // 4, N})
    rep_i = disc.index_stabilization(model, args.aps_cut, Ns)
    rep = _header()
    rep.update({"model": model.model, "aps_cut": args.aps_cut, **rep_i.as_dict(),
                "expected_index": args.aps_cut})
    ok = rep_i.status == "stable" and rep_i.index == args.aps_cut
    rep["verdict"] = "PASS" if ok else "FAIL"
    _write(rep, args.json)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_weyl(args) -> int:
    from . import weyl
    man = {"disc": "unit_disc", "unit_disc": "unit_disc", "interval": "interval", "rectangle": "rectangle"}
    if args.manifold not in man:
        raise SchemaError("manifold", "expected disc, interval or rectangle")
    w = weyl.WeylInput(man[args.manifold], params=tuple(args.params or ()))
    c = weyl.weyl_constant(w)
    eigs = weyl.model_eigenvalues(w, args.bc, args.count, args.robin)
    rep = _header()
    rep.update({"manifold": w.manifold, "bc": args.bc, "count": args.count, "c_D": c})
    if args.count >= 500:
        fit = weyl.asymptotic_fit(eigs, w.m, w.n)
        rel = abs(fit["c_hat"] - c["c_D"]) / c["c_D"]
        rep.update({"fit": fit, "rel_error": rel})
        if w.n == 2:
            rep["two_term_fit"] = weyl.two_term_fit(eigs)
        tol = 0.02 if w.n == 2 else 0.005
        rep["tolerance"] = tol
        rep["verdict"] = "PASS" if rel <= tol and c["converged"] else "FAIL"
    else:
        rep["verdict"] = "PASS" if c["converged"] else "FAIL"
    _write(rep, args.json)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["k", "lambda"])
            wr.writerows([[i + 1, float(v)] for i, v in enumerate(eigs)])
    return EXIT_OK if rep["verdict"] == "PASS" else EXIT_FAIL


def cmd_suite(args) -> int:
    from .suite import run_suite
    report, meta = run_suite(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "suite_report.json").write_text(dumps(report) + "\n")
    (out / "suite_metadata.json").write_text(dumps(meta) + "\n")
    ok = True
    for k, res in report["criteria"].items():
        rt = meta["runtime_verdicts"].get(k, "PASS")
        line = "PASS" if res["verdict"] == "PASS" and rt == "PASS" else "FAIL"
        ok &= line == "PASS"
        print(f"criterion {k:>2} {line}  {res['title']}")
    total_ok = meta["total_s"] < 300
    print(f"criterion 12 {'PASS' if total_ok else 'FAIL'}  Suite runtime {meta['total_s']:.1f} s "
          f"(byte reproducibility: compare suite_report.json across runs)")
    return EXIT_OK if ok and total_ok else EXIT_FAIL


# ----------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="calderon-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--tol-override", action="append", metavar="KEY=VALUE",
                        help="override a named tolerance (repeatable)")
        sp.add_argument("--seed", type=int, default=7, help="seed for random fixtures")

    s = sub.add_parser("symbol", help="p+ symbols on a cosphere grid")
    s.add_argument("--op", required=True, help="operator JSON file")
    s.add_argument("--grid", default="circle:64", help="cosphere grid KIND:RES")
    s.add_argument("--method", choices=["companion", "residue", "both"], default="both",
                   help="companion split, contour residue, or both with a cross-check")
    s.add_argument("--convention", choices=list(TRACE_CONVENTIONS), default="Dt",
                   help="trace coordinates of the reported matrices")
    s.add_argument("--out", help="write the JSON report here")
    common(s)
    s.set_defaults(func=cmd_symbol)

    s = sub.add_parser("sl-check", help="Shapiro-Lopatinskii verdict for a projector")
    s.add_argument("--op", required=True, help="operator JSON file")
    s.add_argument("--proj", required=True, help="projector JSON file")
    s.add_argument("--grid", default="circle:64", help="cosphere grid KIND:RES")
    s.add_argument("--json", help="write the JSON report here")
    common(s)
    s.set_defaults(func=cmd_sl_check)

    s = sub.add_parser("adjoint-bc", help="adjoint boundary condition symbol")
    s.add_argument("--op", required=True, help="operator JSON file")
    s.add_argument("--proj", required=True, help="projector JSON file")
    s.add_argument("--grid", default="circle:16", help="cosphere grid KIND:RES")
    s.add_argument("--out", help="write the JSON report here")
    common(s)
    s.set_defaults(func=cmd_adjoint_bc)

    s = sub.add_parser("disc", help="per-mode Calderon projectors on the unit disc")
    s.add_argument("--model", choices=["d0", "d_alpha", "laplace"], default="d0")
    s.add_argument("--alpha-profile", help="KIND:SCALE with KIND linear, quadratic, cubic or flat")
    s.add_argument("--trunc", type=int, default=64, help="Fourier truncation N")
    s.add_argument("--report", help="write the JSON report here")
    s.add_argument("--csv", help="write a CSV table here")
    common(s)
    s.set_defaults(func=cmd_disc)

    s = sub.add_parser("index", help="truncated Fredholm index with an APS-type cut")
    s.add_argument("--model", choices=["d0"], default="d0")
    s.add_argument("--alpha-profile", help="KIND:SCALE with KIND linear, quadratic, cubic or flat")
    s.add_argument("--aps-cut", type=int, default=0, help="integer cut K (index K expected)")
    s.add_argument("--trunc", type=int, default=64, help="Fourier truncation N")
    s.add_argument("--json", help="write the JSON report here")
    common(s)
    s.set_defaults(func=cmd_index)

    s = sub.add_parser("weyl", help="Weyl constant and model eigenvalues")
    s.add_argument("--manifold", default="disc", help="disc, interval or rectangle")
    s.add_argument("--params", type=float, nargs="*", help="interval length or rectangle sides")
    s.add_argument("--bc", choices=["dirichlet", "neumann", "robin"], default="dirichlet")
    s.add_argument("--robin", type=float, default=1.0, help="Robin parameter c")
    s.add_argument("--count", type=int, default=2000, help="number of eigenvalues")
    s.add_argument("--json", help="write the JSON report here")
    s.add_argument("--csv", help="write a CSV table here")
    common(s)
    s.set_defaults(func=cmd_weyl)

    s = sub.add_parser("suite", help="run every acceptance check")
    s.add_argument("--out", default="suite_out", help="output directory")
    common(s)
    s.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except FileNotFoundError as exc:
        print(f"schema error in input path: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (EllipticityError, ContourError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure in {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
