"""Command-line front end: renlab {expand,rena,flow,scan} --config FILE --out DIR."""

import argparse
import math
import os
import sys

import numpy as np

from . import config as cfgmod
from . import models
from .expansions import conformal_metric_expansion, extract_neumann, metric_ladder, potential_expansion
from .flow import (
    H_CUTOFF,
    Generator,
    bulk_integral,
    first_variation_check,
    flow_integrate,
    mean_curvature_evolution_check,
    orientation_sign,
    rena_curve,
    riccati_check,
    second_variation_check,
)
from .output import write_manifest, write_plot_script, write_rows
from .renarea import FitError, TailDivergenceError, renarea_closed_form, renormalized_area
from .rigidity import profile_scan
from .series import ExtractionError, SingularSeriesError
from .surfaces import (
    TWO_PI,
    BoundaryCurve,
    ConfigurationError,
    SingularSurfaceError,
    collar_table,
    load_surface,
    save_surface,
    solve_minimal_graph,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_INCONCLUSIVE = 0, 2, 3, 4


class NumericalFailure(RuntimeError):
    pass


class Inconclusive(RuntimeError):
    pass


class Run:
    """Output directory bookkeeping for one command."""

    def __init__(self, out, cfg):
        self.out = out
        self.cfg = cfg
        os.makedirs(out, exist_ok=True)
        self.plots = "gnuplot" in cfg["output"]["formats"]

    def path(self, name):
        return os.path.join(self.out, name)

    def csv(self, name, header, rows, **kw):
        write_rows(self.path(name), header, rows, **kw)

    def table(self, name, pairs):
        self.csv(name, ("quantity", "value"), pairs)

    def plot(self, name, *args):
        if self.plots:
            write_plot_script(self.path(name), *args)

    def finish(self):
        with open(self.path("resolved_config.json"), "w") as fh:
            fh.write(cfgmod.dumps(self.cfg))
        write_manifest(self.out)


# --- shared setup ----------------------------------------------------------------------------


def build_model(cfg):
    return models.from_config(cfg["model"])


def build_curve(model, cfg):
    s = cfg["surface"]
    period = TWO_PI if model.sigma == "sphere" else model.theta_period
    return BoundaryCurve(model.sigma, s["base"], s["delta"], s["mode"], period)


def obtain_surface(model, cfg):
    s = cfg["surface"]
    if s["load"]:
        return load_surface(model, s["load"])
    S = solve_minimal_graph(model, build_curve(model, cfg), tuple(s["grid"]), tol=s["tol"], maxit=s["maxit"])
    if not S.converged:
        raise NumericalFailure("minimal-surface solver stalled at residual %.3g" % S.residual)
    return S


def fit(model, S, cfg):
    lad = cfg["ladder"]
    return renormalized_area(model, S, lad["epsilons"], lad["order"], lad["tol"])


# --- commands --------------------------------------------------------------------------------


def cmd_expand(cfg, run):
    model = build_model(cfg)
    e = cfg["expand"]
    kw = dict(N=e["order"], ntheta=e["ntheta"], ns=e["ns"], h0=e["h0"], halvings=e["halvings"])
    pot = potential_expansion(model, **kw)
    met = conformal_metric_expansion(model, **kw)
    rows = []
    for k in range(pot.measured.order + 1):
        pred = pot.predicted.coeffs[k].flat[0] if k <= pot.predicted.order else math.nan
        disc = pot.discrepancy[k] if k < len(pot.discrepancy) else math.nan
        rows.append((k, pot.measured.coeffs[k].flat[0], pred, disc, np.max(pot.error_estimate[k])))
    run.csv("potential.csv", ("order", "measured", "predicted", "max_discrepancy", "error_estimate"), rows)
    rows = []
    for k in range(met.measured.order + 1):
        for i in range(3):
            for j in range(i, 3):
                m = met.measured.coeffs[k][..., i, j]
                if k <= met.predicted.order:
                    p = met.predicted.coeffs[k][..., i, j]
                    rows.append((k, i, j, m.flat[0], p.flat[0], np.max(np.abs(m - p))))
                else:
                    rows.append((k, i, j, m.flat[0], math.nan, math.nan))
    run.csv("metric.csv", ("order", "i", "j", "measured", "predicted", "max_discrepancy"), rows)

    bd = model.boundary_data(e["ntheta"], e["ns"])
    xs, samples = metric_ladder(model, ntheta=e["ntheta"], ns=e["ns"])
    est = extract_neumann(xs, samples, bd.h, bd.R_h)
    rows = []
    for i, j in ((0, 0), (0, 1), (1, 1)):
        a, b = est.h3[..., i, j], bd.h3[..., i, j]
        rows.append(("h3_%d%d" % (i, j), a.flat[0], b.flat[0], np.max(np.abs(a - b))))
    rows.append(("tr_h3", est.tr_h3.flat[0], bd.tr_h3.flat[0], np.max(np.abs(est.tr_h3 - bd.tr_h3))))
    run.csv("neumann.csv", ("component", "extracted", "boundary_data", "max_difference"), rows)
    run.table("mass.csv", [("mass", bd.mass), ("boundary_area", bd.area), ("mean_mass_aspect", bd.mass / bd.area)])
    run.plot("potential.gp", "potential.csv", 1, [2, 3], "coefficients of 1/V", "order", "coefficient")
    return EXIT_OK


def cmd_rena(cfg, run):
    model = build_model(cfg)
    S = obtain_surface(model, cfg)
    save_surface(S, run.path("surface.csv"))
    geo = S.geometry()
    col = S.collar()
    run.csv("collar.csv", ("x", "theta", "u", "H", "b2"), collar_table(S))
    run.csv(
        "boundary.csv",
        ("theta", "kappa", "u2", "u3", "defect", "length_element"),
        list(zip(col.theta, col.kappa, col.u2, col.u3, col.defect, col.ell)),
    )
    f = fit(model, S, cfg)
    rows = [(e, a, f.L / e + np.polyval(f.coeffs[::-1], e), e * a) for e, a in zip(f.epsilons, f.areas)]
    run.csv("rena.csv", ("eps", "area", "fit", "eps_area"), rows)
    pairs = [
        ("renormalized_area", f.c),
        ("slope", f.slope),
        ("fit_residual", f.residual),
        ("boundary_length", f.L),
        ("free_divergent_coefficient", f.L_free),
        ("solver_residual", S.residual),
        ("max_abs_H_interior", float(np.max(np.abs(geo.H[1:])))),
        ("boundary_integral_u3", col.boundary_integral(col.u3)),
    ]
    run.table("rena_fit.csv", pairs)
    try:
        cf = renarea_closed_form(model, S)
        cf_half = renarea_closed_form(model, S, traceless_weight=0.5)
        pairs = [
            ("value", cf.value),
            ("value_half_traceless_weight", cf_half.value),
            ("euler_characteristic", cf.euler_characteristic),
            ("mean_curvature_term", cf.mean_curvature_term),
            ("traceless_term", cf.traceless_term),
            ("weyl_term", cf.weyl_term),
            ("tail", cf.tail),
            ("difference_to_fit", cf.value - f.c),
            ("difference_to_fit_half_weight", cf_half.value - f.c),
            ("diagnostic_only", int(model.kind != "hyperbolic3")),
        ]
    except TailDivergenceError as exc:
        pairs = [("tail_divergence", str(exc))]
    run.table("closed_form.csv", pairs)
    run.plot("rena.gp", "rena.csv", 1, [4], "eps * area against eps", "eps", "eps * area")
    return EXIT_OK


def _generator(cfg, S):
    fl = cfg["flow"]
    if fl["generator"] == "static":
        return "static"
    c = fl["phi_m1_fourier"]
    th = S.theta
    per = S.curve.period
    vals = np.full_like(th, c[0])
    for k, ck in enumerate(c[1:], start=1):
        vals += ck * np.cos(TWO_PI * k * th / per)
    return Generator(vals)


def _rena_plot(run, R0, d1, d2, label2):
    if not run.plots:
        return
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set title 'RenA along the flow'",
        "set xlabel 't'",
        "set ylabel 'RenA'",
        "set terminal pngcairo size 800,600",
        "set output 'rena_t.png'",
        "tangent(t) = %r + %r * t" % (R0, d1),
        "parabola(t) = tangent(t) + 0.5 * %r * t * t" % d2,
        "plot 'rena_t.csv' using 1:2 with linespoints, \\",
        "     tangent(x) title 'first-variation tangent', \\",
        "     parabola(x) title '%s'" % label2,
    ]
    with open(run.path("rena_t.gp"), "w") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_flow(cfg, run):
    model = build_model(cfg)
    S = obtain_surface(model, cfg)
    fl = cfg["flow"]
    gen = _generator(cfg, S)
    fam = flow_integrate(model, S, gen, fl["T"], fl["K"], fl["mode"])
    pts = rena_curve(model, fam, cfg["ladder"]["epsilons"], cfg["ladder"]["order"])
    sgn = orientation_sign(S)
    rows = []
    for p, F in zip(pts, fam.surfaces):
        if p.fit is None:
            rows.append((p.t, math.nan, math.nan, math.nan, math.nan, math.nan, math.nan))
            continue
        geo = F.geometry()
        VH = bulk_integral(F, sgn * geo.H, 3, decay=3, cutoff=H_CUTOFF).value
        Vb2 = bulk_integral(F, geo.b2, 3, decay=4).value
        rows.append((p.t, p.fit.c, p.fit.residual, p.fit.L, p.fit.L_free, VH, Vb2))
    run.csv("rena_t.csv", ("t", "rena", "fit_residual", "length", "free_divergent_coefficient", "int_VH", "int_Vb2"), rows)

    rep = first_variation_check(model, S, gen, fl["delta"], fl["mode"], cfg["ladder"]["epsilons"], cfg["ladder"]["order"])
    pairs = [
        ("fd_first", rep.fd_first),
        ("fd_first_error", rep.fd_first_error),
        ("fd_first_order", rep.fd_first_order),
        ("formula_first", rep.formula_first),
        ("first_bulk_phi_H", rep.first_terms["bulk_phi_H"]),
        ("first_boundary_u3", rep.first_terms["boundary_u3"]),
        ("first_rel_error", rep.first_rel_error),
        ("fd_inconclusive", int(rep.inconclusive)),
    ]
    for h, d in sorted(rep.fd_first_steps.items()):
        pairs.append(("fd_first_step_%g" % h, d))
    d2, label2 = rep.fd_second, "finite-difference parabola"
    static = fam.generator.kind == "static"
    if fl["second_variation"] and static:
        second_variation_check(model, S, fl["delta"], fl["mode"], cfg["ladder"]["epsilons"], cfg["ladder"]["order"], report=rep)
        pairs += [("fd_second", rep.fd_second), ("fd_second_error", rep.fd_second_error)]
        for h, d in sorted(rep.fd_second_steps.items()):
            pairs.append(("fd_second_step_%g" % h, d))
        pairs += [("term_" + k, v) for k, v in sorted(rep.second_terms.items())]
        for k in sorted(rep.formula_second_variants):
            pairs.append(("variant_" + k, rep.formula_second_variants[k]))
            pairs.append(("variant_error_" + k, rep.variant_errors[k]))
        pairs.append(("matching_variants", " ".join(rep.matches) or "none"))
        pairs.append(("selected_variant", rep.match or "none"))
        pairs.append(("fitted_boundary_coefficient", rep.boundary_coefficient_fit))
        d2 = rep.fd_second
        if rep.match:
            d2, label2 = rep.formula_second_variants[rep.match], "variant " + rep.match
    run.table("variation.csv", pairs)
    R0 = next((p.fit.c for p in pts if p.t == 0 and p.fit is not None), math.nan)
    _rena_plot(run, R0, rep.formula_first, 0.0 if math.isnan(d2) else d2, label2)

    if static and fam.complete() and len(fam.times) >= 3:
        ev = mean_curvature_evolution_check(model, fam)
        run.csv("evolution.csv", ("t", "max_residual"), list(zip(ev.times, ev.residual)))
        rc = riccati_check(model, fam)
        run.csv("riccati.csv", ("t", "min_margin"), list(zip(rc.times, rc.residual)))
    if not fam.complete():
        run.table("representability.csv", [("message", m) for m in fam.messages])
        raise NumericalFailure("; ".join(fam.messages))
    if rep.inconclusive:
        raise Inconclusive("finite differences of RenA did not converge")
    return EXIT_OK


def cmd_scan(cfg, run, workers=1):
    model = build_model(cfg)
    sc = cfg["scan"]
    s = cfg["surface"]
    lad = cfg["ladder"]
    rep = profile_scan(model, sc["n_samples"], tuple(s["grid"]), lad["epsilons"], lad["order"], sc["s_values"], workers)
    run.csv("profile.csv", ("s", "rena", "neumann_integral", "neumann_integral_sampled", "second_difference"), rep.rows())
    run.table(
        "scan_summary.csv",
        [
            ("total_neumann", rep.total),
            ("rena_spread", rep.spread),
            ("max_abs_second_difference", float(np.nanmax(np.abs(rep.concavity_diagnostic))) if np.any(np.isfinite(rep.concavity_diagnostic)) else math.nan),
            ("global_sign_ok", int(rep.global_sign_ok)),
            ("circles_nonpositive", int(rep.circles_nonpositive)),
            ("hypothesis_violated", int(rep.hypothesis_violated)),
            ("failures", len(rep.failures)),
        ],
    )
    run.csv("failures.csv", ("sample", "message"), sorted(rep.failures.items()))
    run.plot("profile.gp", "profile.csv", 1, [2], "RenA over the circles s = const", "s", "RenA")
    if rep.failures:
        raise NumericalFailure("%d scan samples failed" % len(rep.failures))
    return EXIT_OK


COMMANDS = {"expand": cmd_expand, "rena": cmd_rena, "flow": cmd_flow, "scan": cmd_scan}


def build_parser():
    p = argparse.ArgumentParser(prog="renlab", description="Renormalized-area experiments on static backgrounds.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        q = sub.add_parser(name)
        q.add_argument("--config", required=True, help="TOML experiment file")
        q.add_argument("--out", help="output directory (overrides [output] directory)")
        q.add_argument("--workers", type=int, default=1, help="process pool size for independent samples")
        q.add_argument("--tolerance-profile", choices=sorted(cfgmod.PROFILES), default="strict")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = cfgmod.load(args.config, args.tolerance_profile)
        if args.workers < 1:
            raise cfgmod.ConfigError("--workers must be at least 1")
        out = args.out or cfg["output"]["directory"]
        run = Run(out, cfg)
    except (cfgmod.ConfigError, models.ModelError, ConfigurationError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    code = EXIT_OK
    try:
        if args.command == "scan":
            code = cmd_scan(cfg, run, args.workers)
        else:
            code = COMMANDS[args.command](cfg, run)
    except (cfgmod.ConfigError, models.ModelError, ConfigurationError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        code = EXIT_CONFIG
    except Inconclusive as exc:
        print("inconclusive: %s" % exc, file=sys.stderr)
        code = EXIT_INCONCLUSIVE
    except (
        NumericalFailure,
        ExtractionError,
        SingularSeriesError,
        SingularSurfaceError,
        FitError,
        TailDivergenceError,
        np.linalg.LinAlgError,
    ) as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        code = EXIT_NUMERIC
    run.finish()
    return code


if __name__ == "__main__":
    sys.exit(main())
