"""Command-line front end: one verb per verified claim.

Exit status: 0 when every gated check passes, 1 when one fails, 2 for usage,
configuration or parameter-domain errors.
"""

from __future__ import annotations

import argparse
import re
import sys
import time

import numpy as np
from gmpy2 import mpq

from . import cherednik as ch
from . import gammacore as gc
from . import orthopoly as op
from . import quadrature as qd
from .errors import BCError, ConfigError, ParameterDomainError
from .report import (
    FAIL,
    PASS,
    WARN,
    RunConfig,
    VerificationReport,
    exact_residual,
    load_config,
    run_document,
    to_csv_text,
    to_json_text,
)
from .rootdata import as_rational, make_root_system

VERBS = (
    "verify-bs", "verify-lemmas-2", "triangularity", "transition", "l-poly", "selberg",
    "ftilde", "c-function", "jacobi", "transform", "mk", "verify-5-3", "lemma-5-2",
    "limit-3-3", "wilson-fit",
)


def _system(cfg: RunConfig):
    return make_root_system(cfg.r, cfg.a, cfg.b, cfg.iota)


def _nu(cfg: RunConfig, system):
    if cfg.nu is None:
        raise ParameterDomainError("this command needs --nu")
    return system.check_nu(as_rational(cfg.nu))


def _params(cfg: RunConfig, system):
    """delta from --delta, or -2 nu from --nu."""
    if cfg.delta is not None:
        return ch.CherednikParams(system, as_rational(cfg.delta))
    if cfg.nu is not None:
        return ch.CherednikParams.for_transform(system, as_rational(cfg.nu))
    raise ParameterDomainError("this command needs --delta or --nu")


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


def _label(p) -> str:
    return "(" + ",".join(str(x) for x in p) + ")"


# ----------------------------------------------------------------------------
# verbs


def cmd_verify_bs(cfg):
    system = _system(cfg)
    params = _params(cfg, system)
    res = ch.verify_bernstein_sato(params)
    return [VerificationReport("bernstein-sato", _status(res.is_zero()), exact_residual(res),
                               {"params": params.as_dict(),
                                "constant": ch.bernstein_sato_constant(params)})]


def cmd_product_identities(cfg):
    system = _system(cfg)
    params = _params(cfg, system)
    ops = ch.CherednikOperators(params)
    out = []
    for j in range(1, system.rank + 1):
        for name, fn in (("ascending-product", ch.verify_ascending_product), ("descending-product", ch.verify_descending_product)):
            res = fn(params, j, ops)
            out.append(VerificationReport(f"{name} j={j}", _status(res.is_zero()), exact_residual(res),
                                          {"params": params.as_dict(), "j": j}))
    return out


def cmd_triangularity(cfg):
    system = _system(cfg)
    params = _params(cfg, system)
    rep = ch.triangularity_check(params, cfg.max_weight)
    meta = {
        "params": params.as_dict(),
        "max_weight": cfg.max_weight,
        "checked": len(rep.coefficients),
        "printed_formula_mismatches": len(rep.printed_mismatches()),
        "corrected_formula_mismatches": len(rep.corrected_mismatches()),
        "observed_formula_mismatches": len(rep.observed_mismatches()),
        "coefficients": rep.coefficients,
    }
    residual = {"violations": [{"eta": list(e), "j": j, "monomial": list(z)} for e, j, z in rep.violations]}
    header = ["eta", "j", "computed", "printed", "corrected", "observed"]
    rows = [[_label(c["eta"]), c["j"], c["computed"], c["printed"], c["corrected"], c["observed"]]
            for c in rep.coefficients]
    return [VerificationReport("triangularity", _status(rep.ok), residual, meta, (header, rows))]


def cmd_transition(cfg):
    system = _system(cfg)
    params = _params(cfg, system)
    M = ch.build_transition_matrix(params, cfg.max_weight)
    diag = []
    for e in M.order:
        d = M.diagonal(e)
        diag.append({"eta": list(e), "d": d,
                     **{f"{rd}_conjecture": ch.d_eta_conjecture(params, e, rd) for rd in ch.D_ETA_READINGS},
                     **{f"{rd}_match": d == ch.d_eta_conjecture(params, e, rd) for rd in ch.D_ETA_READINGS}})
    ok = all(M.diagonal(e) != 0 for e in M.order)
    meta = {"params": params.as_dict(), "order": [list(e) for e in M.order],
            "matrix": M.as_lists(), "diagonal": diag}
    rows = M.to_csv_rows()
    return [VerificationReport("transition-matrix", _status(ok), {"nonzero_diagonal": ok}, meta,
                               (rows[0], rows[1:]))]


def cmd_l_poly(cfg):
    system = _system(cfg)
    params = _params(cfg, system)
    M = ch.build_transition_matrix(params, cfg.max_weight)
    out = []
    polys = ch.l_polynomials(params, M)
    bad = []
    items = []
    for e in M.order:
        lead = polys[e].coefficient(e)
        match = lead * M.diagonal(e) == 1
        if not match:
            bad.append(list(e))
        items.append({"eta": list(e), "l": polys[e].to_json(), "leading": lead, "d": M.diagonal(e),
                      "leading_is_inverse_d": match})
    out.append(VerificationReport("l-polynomials", _status(not bad), {"leading_mismatches": bad},
                                  {"params": params.as_dict(), "polynomials": items}))
    return out


def cmd_selberg(cfg):
    system = _system(cfg)
    nu = _nu(cfg, system)
    tol = cfg.tol or (1e-10 if system.rank == 1 else 1e-6)
    closed = gc.n_nu(system, nu)
    quad = qd.selberg_quadrature(system, nu, cfg.order or 40)
    nonc = qd.noncompact_integral(system, lambda t: np.ones(len(t)), nu, cfg.order or 40) \
        if system.rank <= qd.MAX_NONCOMPACT_RANK else None
    rel = abs(quad - closed) / closed
    ratio = gc.n_ratio(system, nu)
    quotient = gc.n_nu(system, nu + 1) / closed
    rel_rec = abs(ratio - quotient) / quotient
    meta = {"closed_form": closed, "quadrature": quad, "noncompact_quadrature": nonc,
            "ratio_product": ratio, "ratio_quotient": quotient, "tolerance": tol}
    out = [VerificationReport("selberg-normalization", _status(rel <= tol), {"rel_error": rel}, meta)]
    out.append(VerificationReport("normalization-recursion", _status(rel_rec <= 1e-12),
                                  {"rel_error": rel_rec}, {}))
    return out


def _u_grid(cfg, system):
    vals = [0.0, 1.0, 2.0, 4.0]
    return np.array([[v] * system.rank for v in vals])


def cmd_ftilde(cfg):
    system = _system(cfg)
    nu = _nu(cfg, system)
    rho = np.array([float(x) for x in system.rho])
    b_rho = float(gc.beta_nu(system, nu, rho).real)
    tol = cfg.tol or 1e-12
    out = [VerificationReport("beta-at-rho", _status(abs(b_rho - 1) <= tol), {"abs_error": abs(b_rho - 1)},
                              {"beta_rho": b_rho})]
    us = _u_grid(cfg, system)
    rec = gc.beta_recursion_check(system, nu, 1j * us)
    out.append(VerificationReport("beta-recursion", _status(rec <= tol), {"rel_error": rec}, {}))
    vals = gc.f_tilde(system, nu, 1j * us).real
    rows = [[*u.tolist(), v] for u, v in zip(us, vals)]
    header = [f"u{j + 1}" for j in range(system.rank)] + ["f_tilde"]
    if system.rank == 1:
        phi = gc.SphericalFunctionRank1(system)
        eig = max(phi.eigen_defect(1j * u[0], [0.3, 1.0, 2.5]) for u in us)
        grid = qd.noncompact_grid(system, nu, cfg.order or 60)
        errs = []
        for u, v in zip(us, vals):
            quad = grid.integrate(phi.values(1j * u[0], grid.nodes[:, 0]))
            errs.append(abs(quad - v) / abs(v))
        qtol = 1e-6
        out.append(VerificationReport("spherical-eigen-equation", _status(eig <= 1e-8), {"defect": eig}, {}))
        out.append(VerificationReport("ftilde-vs-quadrature", _status(max(errs) <= qtol),
                                      {"max_rel_error": max(errs)}, {"rel_errors": errs, "tolerance": qtol}))
        for row, e in zip(rows, errs):
            row.append(e)
        header.append("rel_error_vs_quadrature")
    out[0].table = (header, rows)
    return out


def cmd_c_function(cfg):
    system = _system(cfg)
    us = np.linspace(0.0, 10.0, 11)
    pts = np.array([[u] + [0.5 * (k + 1) for k in range(system.rank - 1)] for u in us])
    dens = gc.plancherel_density(system, pts)
    cp = gc.c_function(system, 1j * pts + 0.25, "printed")
    cs = gc.c_function(system, 1j * pts + 0.25, "scaled")
    ok = bool(np.all(np.isfinite(dens)) and np.all(dens >= 0))
    header = [f"u{j + 1}" for j in range(system.rank)] + ["density", "c_printed_re", "c_scaled_re"]
    rows = [[*p.tolist(), d, a.real, b.real] for p, d, a, b in zip(pts, dens, cp, cs)]
    meta = {"c0_printed": gc.c0(system, "printed"), "c0_c_of_rho_printed": gc.c0(system, "c-of-rho", "printed"),
            "c0_c_of_rho_scaled": gc.c0(system, "c-of-rho", "scaled"),
            "note": "c values sampled at lambda = 0.25 + iu to stay off the poles"}
    return [VerificationReport("plancherel-density", _status(ok), {"finite_nonnegative": ok}, meta, (header, rows))]


def _jacobi_tol(cfg, system):
    return cfg.tol or (1e-8 if system.rank == 1 else 1e-6)


def cmd_jacobi(cfg):
    system = _system(cfg)
    nu = _nu(cfg, system)
    fam = op.gram_schmidt_jacobi(system, nu, cfg.max_weight, order=cfg.order, exact=False)
    defects = op.orthogonality_defects(fam)
    worst = max(defects.values(), default=0.0)
    tol = _jacobi_tol(cfg, system)
    meta = {"family": fam.to_json(), "defects": defects, "triangularity_defect": op.triangularity_defect(fam),
            "tolerance": tol}
    header = ["eta"] + [_label(z) for z in fam.basis]
    rows = [[_label(e)] + [float(fam.polys[e].coefficient(z)) for z in fam.basis] for e in fam.basis]
    return [VerificationReport("jacobi-orthogonality", _status(worst <= tol), {"max_defect": worst}, meta,
                               (header, rows))]


def cmd_transform(cfg):
    system = _system(cfg)
    nu = _nu(cfg, system)
    fam = op.gram_schmidt_jacobi(system, nu, cfg.max_weight, order=cfg.order)
    spec = op.transform_H(system, nu, fam)
    items, bad = [], []
    for e in fam.basis:
        lead = spec.qpolys[e].coefficient(e)
        expected = mpq(4 ** sum(e)) / spec.meta["transition_diagonal"][e]
        ok = abs(float(lead) - float(expected)) <= 1e-12 * abs(float(expected))
        if not ok:
            bad.append(list(e))
        items.append({"eta": list(e), "q": spec.qpolys[e].to_json(), "leading": lead, "expected": expected})
    return [VerificationReport("transform-leading-terms", _status(not bad), {"mismatches": bad},
                               {"family_method": fam.method, "q": items})]


def cmd_mk(cfg):
    system = _system(cfg)
    nu = _nu(cfg, system)
    polys, norms, G, grid, cond = op.gram_schmidt_mk(system, nu, cfg.max_weight, cfg.order or 16, cfg.cutoff)
    basis = list(polys)
    C = np.array([polys[e].vector(basis) for e in basis])
    H = C @ G @ C.T
    d = np.sqrt(np.diag(H))
    off = float(np.max(np.abs(H / np.outer(d, d) - np.eye(len(basis))))) if len(basis) > 1 else 0.0
    tol = cfg.tol or 1e-8
    meta = {"polynomials": {e: polys[e].to_json() for e in basis}, "norms": norms,
            "grid": grid.describe(), "condition": cond}
    return [VerificationReport("mk-orthogonality", _status(off <= tol), {"max_offdiag": off}, meta)]


def cmd_transform_correspondence(cfg):
    system = _system(cfg)
    nu = _nu(cfg, system)
    tol = cfg.tol or (1e-6 if system.rank == 1 else 1e-4)
    rep = op.verify_transform_correspondence(system, nu, cfg.max_weight, cfg.order or 16, cfg.cutoff)
    rows = []
    for row in rep.rows:
        rows.append({"eta": list(row.eta), **row.defects(), "absolute_ratio": row.absolute_ratio,
                     "q_leading": row.q_leading, "expected_leading": row.expected_leading,
                     "q": rep.spectral.qpolys[row.eta].to_json(), "mk": rep.spectral.mkpolys[row.eta].to_json()})
    meta = {"rows": rows, "implied_plancherel_constant": rep.implied_constant,
            "printed_plancherel_constant": rep.printed_constant, "tolerance": tol, **rep.meta}
    header = ["eta", "proportionality_angle", "coefficient_deviation", "offdiag_mass", "norm_ratio_defect"]
    table = [[_label(r.eta), *r.defects().values()] for r in rep.rows]
    return [VerificationReport("transform-correspondence", _status(rep.passed(tol)), {"worst_defect": rep.worst()}, meta,
                               (header, table))]


def cmd_norm_transfer(cfg):
    system = _system(cfg)
    nu = _nu(cfg, system)
    tol = cfg.tol or (1e-8 if system.rank == 1 else 1e-6)
    fam = op.gram_schmidt_jacobi(system, nu, cfg.max_weight)
    out = []
    for e in fam.basis:
        res = op.norm_transfer_check(system, nu, e, cfg.order or 60, family=fam)
        out.append(VerificationReport(f"norm-transfer eta={_label(e)}", _status(res["rel_error"] <= tol),
                                      {"rel_error": res["rel_error"]},
                                      {"noncompact": res["noncompact"], "compact": res["compact"]}))
    return out


def cmd_approximate_identity(cfg):
    system = _system(cfg)
    nus = [as_rational(x) for x in (cfg.nus or "20,40,80,160").split(",")]
    for nu in nus:
        system.check_nu(nu)
    seq = op.approximate_identity_sequence(system, nus, order=cfg.order or 80)
    errs = [s["error"] for s in seq]
    tol = cfg.tol or 1e-2
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    ok = decreasing and errs[-1] <= tol
    rows = [[str(s["nu"]), s["value"], s["error"]] for s in seq]
    return [VerificationReport("approximate-identity", _status(ok), {"final_error": errs[-1], "decreasing": decreasing},
                               {"sequence": seq, "probe": "1/(1+t_1^2)", "tolerance": tol},
                               (["nu", "value", "error"], rows))]


def cmd_wilson_fit(cfg):
    system = _system(cfg)
    nu = _nu(cfg, system)
    if system.rank != 1:
        raise ParameterDomainError("wilson-fit is rank one")
    polys, *_ = op.gram_schmidt_mk(system, nu, cfg.max_weight, cfg.order or 16, cfg.cutoff)
    out = []
    for n in range(cfg.max_weight + 1):
        res = op.wilson_crosscheck_rank1(system, nu, n, mk=polys[(n,)])
        status = PASS if res["defect"] <= 1e-8 else WARN
        out.append(VerificationReport(f"wilson n={n}", status, {"defect": res["defect"]}, res))
    return out


COMMANDS = {
    "verify-bs": cmd_verify_bs,
    "verify-lemmas-2": cmd_product_identities,
    "triangularity": cmd_triangularity,
    "transition": cmd_transition,
    "l-poly": cmd_l_poly,
    "selberg": cmd_selberg,
    "ftilde": cmd_ftilde,
    "c-function": cmd_c_function,
    "jacobi": cmd_jacobi,
    "transform": cmd_transform,
    "mk": cmd_mk,
    "verify-5-3": cmd_transform_correspondence,
    "lemma-5-2": cmd_norm_transfer,
    "limit-3-3": cmd_approximate_identity,
    "wilson-fit": cmd_wilson_fit,
}


# ----------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bcspherical", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for verb in VERBS:
        p = sub.add_parser(verb)
        p.add_argument("--config", help="key=value file; command-line flags win")
        p.add_argument("--r", type=int)
        p.add_argument("--a")
        p.add_argument("--b")
        p.add_argument("--iota")
        p.add_argument("--nu")
        p.add_argument("--delta")
        p.add_argument("--max-weight", dest="max_weight", type=int)
        p.add_argument("--order", type=int)
        p.add_argument("--cutoff", type=float)
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--tol", type=float)
        p.add_argument("--nus", help="comma-separated nu values (limit-3-3)")
    return parser


def config_from_args(args) -> RunConfig:
    data = load_config(args.config) if args.config else {}
    for key in ("r", "a", "b", "iota", "nu", "delta", "max_weight", "order", "cutoff", "out", "format", "tol", "nus"):
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    data["command"] = args.command
    return RunConfig.from_dict(data)


def run(cfg: RunConfig) -> tuple:
    """Execute one verb; returns (exit status, reports)."""
    t0 = time.perf_counter()
    reports = COMMANDS[cfg.command](cfg)
    elapsed = time.perf_counter() - t0
    for rep in reports:
        rep.timing = {"command_seconds": round(elapsed, 6)}
    status = 1 if any(r.status == FAIL for r in reports) else 0
    return status, reports


def emit(cfg: RunConfig, reports: list, stream=None) -> str:
    text = to_csv_text(reports) if cfg.format == "csv" else to_json_text(run_document(cfg, reports))
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        (stream or sys.stdout).write(text)
    return text


_NEGATIVE = re.compile(r"^-\d")


def _join_negative_values(argv: list) -> list:
    """Let rationals such as -7/3 follow an option; argparse would read them as flags."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and _NEGATIVE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        status, reports = run(cfg)
    except ConfigError as exc:
        where = "".join(f" {k}={v}" for k, v in (("line", exc.line), ("key", exc.key)) if v is not None)
        print(f"config error:{where} {exc}", file=sys.stderr)
        return 2
    except (ParameterDomainError, ValueError) as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return 2
    except BCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    emit(cfg, reports)
    summary = ", ".join(f"{r.item}: {r.status}" for r in reports)
    print(summary, file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
