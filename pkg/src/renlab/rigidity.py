"""Profile of renormalized areas over the circles s = const of a torus boundary."""

from dataclasses import dataclass, field

import numpy as np

from .expansions import extract_neumann
from .renarea import DEFAULT_LADDER, FitError, renormalized_area
from .series import ExtractionError, halving_ladder
from .surfaces import BoundaryCurve, ConfigurationError, SingularSurfaceError, solve_minimal_graph


@dataclass
class ProfileReport:
    s_samples: np.ndarray
    rena_values: np.ndarray  # nan where the sample failed
    neumann_integrals: np.ndarray  # from the model's boundary tensors
    neumann_integrals_sampled: np.ndarray  # from the metric via extract_neumann
    total: float
    concavity_diagnostic: np.ndarray  # periodic second differences of rena_values
    failures: dict = field(default_factory=dict)

    @property
    def spread(self):
        v = self.rena_values[np.isfinite(self.rena_values)]
        return float(v.max() - v.min()) if len(v) else float("nan")

    @property
    def global_sign_ok(self):
        """Integral of tr h3 + h3(ds, ds) over the torus is non-negative."""
        return self.total >= -1e-10

    @property
    def circles_nonpositive(self):
        return bool(np.all(self.neumann_integrals <= 1e-10))

    @property
    def hypothesis_violated(self):
        return not self.global_sign_ok

    def rows(self):
        return [
            (s, r, n, m, c)
            for s, r, n, m, c in zip(
                self.s_samples, self.rena_values, self.neumann_integrals, self.neumann_integrals_sampled, self.concavity_diagnostic
            )
        ]


def _check_torus(model):
    if model.sigma != "torus" or not model.s_period:
        raise ConfigurationError("profile scans need a torus boundary with a periodic s direction")


def _density(h, h3):
    """tr_h h3 + h3(ds, ds)."""
    return np.einsum("...ij,...ij->...", np.linalg.inv(h), h3) + h3[..., 1, 1]


def circle_neumann(model, s, ntheta=32):
    """Integral over the circle {s} of tr_h h3 + h3(ds, ds) against the h-length element."""
    th = model.theta_period * np.arange(ntheta) / ntheta
    h, h3 = model.boundary_tensors(th, np.full_like(th, s))
    return float(np.sum(_density(h, h3) * np.sqrt(h[..., 0, 0])) * model.theta_period / ntheta)


def circle_neumann_sampled(model, s, ntheta=32, x0=0.1, K=6):
    """Same integral with h3 read off the compactified metric on a halving ladder in x."""
    th = model.theta_period * np.arange(ntheta) / ntheta
    xs = halving_ladder(x0, K)
    Y = np.stack(np.broadcast_arrays(xs[:, None], th[None], np.full((1, ntheta), float(s))), -1)
    samples = np.real(model.compact(Y.astype(complex)))
    h = model.boundary_tensors(th, np.full_like(th, s))[0]
    R = model.boundary_curvature(th, np.full_like(th, s))
    est = extract_neumann(xs, samples, h, R)
    return float(np.sum(_density(h, est.h3) * np.sqrt(h[..., 0, 0])) * model.theta_period / ntheta)


def torus_neumann_total(model, ntheta=32, ns=32):
    th = model.theta_period * np.arange(ntheta) / ntheta
    s = model.s_period * np.arange(ns) / ns
    TH, S = np.meshgrid(th, s, indexing="ij")
    h, h3 = model.boundary_tensors(TH, S)
    cell = model.theta_period * model.s_period / (ntheta * ns)
    return float(np.sum(_density(h, h3) * np.sqrt(np.linalg.det(h))) * cell)


def _solve_sample(args):
    model, sj, grid, ladder, order = args
    try:
        S = solve_minimal_graph(model, BoundaryCurve("torus", float(sj), period=model.theta_period), grid)
        if not S.converged:
            return np.nan, "solver stalled at residual %.3g" % S.residual
        return renormalized_area(model, S, ladder, order).c, None
    except (SingularSurfaceError, FitError, ConfigurationError, np.linalg.LinAlgError) as exc:
        return np.nan, str(exc)


def scan_grid(model, n_samples=16, s_values=None):
    """Uniform samples over one s period, the last one closing the period."""
    if s_values is None:
        if n_samples < 3:
            raise ConfigurationError("need at least three samples")
        return model.s_period * np.arange(n_samples + 1) / n_samples
    s = np.asarray(s_values, dtype=float)
    if len(s) < 4:
        raise ConfigurationError("need at least three samples")
    step = np.diff(s)
    if not (np.allclose(step, step[0], rtol=1e-12, atol=1e-14) and abs(s[-1] - s[0] - model.s_period) < 1e-12):
        raise ConfigurationError("s samples must be uniform and span exactly one period")
    return s


def profile_scan(model, n_samples=16, grid=(16, 32), ladder=DEFAULT_LADDER, order=3, s_values=None, workers=1):
    """RenA of the minimal graph over each circle s_j = s_0 + j P / n, j = 0..n (the last closes the period).

    Samples that cannot be solved are recorded in `failures` and left as nan.
    """
    _check_torus(model)
    s = scan_grid(model, n_samples, s_values)
    vals = np.full(len(s), np.nan)
    failures = {}
    if getattr(model, "has_bulk", False):
        jobs = [(model, sj, grid, ladder, order) for sj in s]
        if workers > 1:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(workers) as ex:
                results = list(ex.map(_solve_sample, jobs))
        else:
            results = [_solve_sample(j) for j in jobs]
        for j, (v, err) in enumerate(results):
            vals[j] = v
            if err:
                failures[j] = err
    else:
        failures = {j: "model has no bulk chart for surfaces" for j in range(len(s))}
    neu = np.array([circle_neumann(model, sj) for sj in s])
    neu_s = np.full(len(s), np.nan)
    for j, sj in enumerate(s):
        try:
            neu_s[j] = circle_neumann_sampled(model, sj)
        except ExtractionError as exc:
            failures.setdefault(j, "Neumann extraction: %s" % exc)
    core = vals[:-1]
    conc = np.roll(core, -1) - 2 * core + np.roll(core, 1)
    conc = np.append(conc, conc[0])
    return ProfileReport(s, vals, neu, neu_s, torus_neumann_total(model), conc, failures)
