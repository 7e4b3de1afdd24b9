"""Acceptance suite: one PASS/FAIL line per criterion.

Run with pytest or directly as a script.  Under pytest the lines bypass
output capture so they appear in the -v log.
"""

import filecmp
import functools
import os
import sys
import tempfile
import time

import numpy as np
import pytest

from renlab import models
from renlab.cli import main as cli_main
from renlab.expansions import conformal_metric_expansion, levelset_H_series, potential_expansion
from renlab.flow import (
    RENORMALIZED,
    first_variation_check,
    flow_integrate,
    mean_curvature_evolution_check,
    rena_curve,
    riccati_check,
    second_variation_check,
)
from renlab.renarea import DEFAULT_LADDER, areas_on_ladder, renarea_closed_form, renormalized_area
from renlab.rigidity import profile_scan
from renlab.surfaces import BoundaryCurve, collar_determinant, solve_minimal_graph

CONFIGS = os.path.join(os.path.dirname(os.path.abspath(__file__)), os.pardir, "configs")
ALPHA0 = np.pi / 3


@functools.lru_cache(maxsize=None)
def model(name):
    return {"h3": models.Hyperbolic3, "hm": models.HorowitzMyers}[name]()


@functools.lru_cache(maxsize=None)
def surface(name):
    h3, hm = model("h3"), model("hm")
    curves = {
        "equator": (h3, BoundaryCurve("sphere", np.pi / 2)),
        "lat_pi4": (h3, BoundaryCurve("sphere", np.pi / 4)),
        "cap": (h3, BoundaryCurve("sphere", ALPHA0)),
        "perturbed": (h3, BoundaryCurve("sphere", ALPHA0, 0.05, 2)),
        "hm_slice": (hm, BoundaryCurve("torus", 0.1, period=hm.theta_period)),
    }
    m, c = curves[name]
    return solve_minimal_graph(m, c)


@functools.lru_cache(maxsize=None)
def family(name, mode="geodesic"):
    S = surface(name)
    T = 0.2 if name == "hm_slice" else 0.04
    return flow_integrate(S.model, S, T=T, K=4, mode=mode)


def report(n, ok, detail):
    print("criterion %d: %s  %s" % (n, "PASS" if ok else "FAIL", detail), flush=True)


def timed(limit):
    def wrap(fn):
        @functools.wraps(fn)
        def inner():
            t0 = time.perf_counter()
            ok, detail = fn()
            dt = time.perf_counter() - t0
            return ok and dt < limit, "%s; runtime %.1fs (limit %gs)" % (detail, dt, limit)

        return inner

    return wrap


@timed(10)
def criterion_1():
    worst = 0.0
    for name in ("h3", "hm"):
        m = model(name)
        worst = max(worst, np.max(potential_expansion(m).discrepancy[:4]))
        worst = max(worst, np.max(conformal_metric_expansion(m, N=3).discrepancy))
    c_h3 = potential_expansion(model("h3")).measured.coeffs
    c_hm = potential_expansion(model("hm")).measured.coeffs
    bd = model("hm").boundary_data()
    checks = {
        "h3 1/V x^3": abs(c_h3[3].mean() + 0.25),
        "hm Neumann": np.max(np.abs(bd.h3 - np.diag([-2 / 3, 1 / 3]))),
        "hm tr h3": np.max(np.abs(bd.tr_h3 + 1 / 3)),
        "hm 1/V x^4": np.max(np.abs(c_hm[4] + 1 / 6)),
    }
    ok = worst < 1e-8 and all(v < 1e-8 for v in checks.values())
    return ok, "max discrepancy %.2e; golden errors %s" % (worst, ", ".join("%s %.1e" % kv for kv in checks.items()))


@timed(10)
def criterion_2():
    targets = {"hm": [-2, 0, 0, -0.5], "h3": [-2, 0, -1, 0]}
    errs = {}
    for name, want in targets.items():
        res = levelset_H_series(model(name))
        errs[name] = max(float(np.max(np.abs(res.measured[k] - want[k]))) for k in range(4))
    return all(e < 1e-4 for e in errs.values()), "coefficient errors hm %.1e, h3 %.1e" % (errs["hm"], errs["h3"])


def criterion_3():
    h3 = model("h3")
    ok, parts = True, []
    for name in ("equator", "lat_pi4", "cap"):
        t0 = time.perf_counter()
        S = surface(name)
        c = renormalized_area(h3, S).c
        cf = renarea_closed_form(h3, S).value
        dt = time.perf_counter() - t0
        good = abs(c + 2 * np.pi) < 1e-3 and abs(cf - c) < 1e-3 and dt < 60
        ok &= good
        parts.append("%s c+2pi %.1e closed-fit %.1e %.1fs" % (name, c + 2 * np.pi, cf - c, dt))
    return ok, "; ".join(parts)


@timed(300)
def criterion_4():
    hm = model("hm")
    S = surface("hm_slice")
    H = np.max(np.abs(S.geometry().H[1:]))
    u3 = np.max(np.abs(S.collar().u3))
    vals = np.array([p.fit.c for p in rena_curve(hm, family("hm_slice"))])
    drift = float(np.max(np.abs(vals - vals[0])))
    rep = second_variation_check(hm, S, report=first_variation_check(hm, S))
    prof = profile_scan(hm, n_samples=16)
    neu = max(np.max(np.abs(prof.neumann_integrals)), np.max(np.abs(prof.neumann_integrals_sampled)), abs(prof.total))
    ok = (
        H < 1e-8
        and u3 < 1e-8
        and drift < 1e-5
        and abs(rep.fd_first) < 1e-3
        and abs(rep.fd_second) < 1e-3
        and not prof.failures
        and prof.spread < 1e-5
        and neu < 1e-6
    )
    return ok, "max|H| %.1e, max|u3| %.1e, RenA drift %.1e, d1 %.1e, d2 %.1e, scan spread %.1e, Neumann %.1e" % (
        H, u3, drift, rep.fd_first, rep.fd_second, prof.spread, neu)


@timed(600)
def criterion_5():
    rep = first_variation_check(model("h3"), surface("perturbed"))
    ok = rep.first_rel_error < 0.02 and rep.fd_first_order >= 2 - 0.05
    return ok, "FD %.7f formula %.7f rel.err %.1e, FD order %.3f" % (
        rep.fd_first, rep.formula_first, rep.first_rel_error, rep.fd_first_order)


@timed(900)
def criterion_6():
    h3 = model("h3")
    reps = {name: second_variation_check(h3, surface(name)) for name in ("cap", "perturbed")}
    common = set(reps["cap"].matches) & set(reps["perturbed"].matches)
    pert = reps["perturbed"]
    detail = "matches cap %s, perturbed %s; perturbed FD %.5f vs %s; fitted boundary coefficient %.3f" % (
        sorted(reps["cap"].matches) or "none",
        sorted(pert.matches) or "none",
        pert.fd_second,
        ", ".join("%s %.4f" % kv for kv in sorted(pert.formula_second_variants.items())),
        pert.boundary_coefficient_fit,
    )
    if len(common) == 1:
        detail = "selected %s; " % common.pop() + detail
        return True, detail
    return False, "no unique variant; " + detail


@timed(300)
def criterion_7():
    fams = [("hm_slice", "geodesic"), ("equator", "geodesic"), ("cap", "geodesic"), ("perturbed", "geodesic"), ("perturbed", RENORMALIZED)]
    worst_res, worst_margin = 0.0, np.inf
    for name, mode in fams:
        fam = family(name, mode)
        m = surface(name).model
        worst_res = max(worst_res, mean_curvature_evolution_check(m, fam).max_residual)
        worst_margin = min(worst_margin, riccati_check(m, fam).min_margin)
    ok = worst_res < 1e-4 and worst_margin >= -1e-6
    return ok, "%d families: max evolution residual %.1e, min Riccati margin %.1e" % (len(fams), worst_res, worst_margin)


@timed(120)
def criterion_8():
    names = ("equator", "lat_pi4", "cap", "perturbed", "hm_slice")
    eps = np.array(DEFAULT_LADDER)
    worst_slope, worst_div, worst_margin = 0.0, 0.0, np.inf
    for name in names:
        S = surface(name)
        A, L = areas_on_ladder(S, eps)
        # eps A - L = c eps + O(eps^2): the ratio must settle onto the fitted constant
        c = renormalized_area(S.model, S).c
        worst_slope = max(worst_slope, float(np.max(np.abs((eps * A - L) / eps - c) / eps)))
        worst_margin = min(worst_margin, float(np.min(collar_determinant(S)["margin"])))
    for name in ("hm_slice", "equator", "cap", "perturbed"):
        for p in rena_curve(surface(name).model, family(name)):
            worst_div = max(worst_div, abs(p.fit.L_free - p.fit.L))
    parts = {
        "eps A -> L at O(eps)": worst_slope < 10.0,
        "1/eps coefficient = L": worst_div < 1e-4,
        "determinant lower bound": worst_margin >= 0,
    }
    detail = "max |(eps A - L)/eps - c|/eps %.2e, max |L_free - L| %.1e, min determinant margin %.2e; failing: %s" % (
        worst_slope, worst_div, worst_margin, ", ".join(k for k, v in parts.items() if not v) or "none")
    return all(parts.values()), detail


def criterion_9():
    runs = [("expand", "hm_expand.toml"), ("rena", "h3_perturbed.toml"), ("flow", "hm_slice.toml"), ("scan", "hm_scan.toml")]
    diffs = []
    with tempfile.TemporaryDirectory() as tmp:
        for cmd, cfg in runs:
            dirs = [os.path.join(tmp, "%s_%d" % (cmd, k)) for k in (0, 1)]
            codes = [cli_main([cmd, "--config", os.path.join(CONFIGS, cfg), "--out", d]) for d in dirs]
            csvs = sorted(f for f in os.listdir(dirs[0]) if f.endswith(".csv"))
            _, mismatch, errors = filecmp.cmpfiles(dirs[0], dirs[1], csvs, shallow=False)
            if codes != [0, 0] or mismatch or errors or sorted(os.listdir(dirs[0])) != sorted(os.listdir(dirs[1])):
                diffs.append("%s (exit %s, differing %s)" % (cmd, codes, mismatch + errors))
    return not diffs, "commands %s: %s" % (", ".join(c for c, _ in runs), "; ".join(diffs) or "all CSVs byte-identical")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("n", range(1, 10))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n - 1]()
    with capsys.disabled():
        sys.stdout.write("\n")
        report(n, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for n, fn in enumerate(CRITERIA, start=1):
        ok, detail = fn()
        report(n, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)
