"""Boundary expansions of a model, measured from samples and predicted from its boundary data."""

from dataclasses import dataclass, field

import numpy as np

from .geometry import cs_gradient
from .series import (
    SCALAR,
    TENSOR,
    ExtractionError,
    PowerSeries,
    check_convergence,
    halving_ladder,
    richardson,
    stencil_coefficients,
)


@dataclass
class ExpansionResult:
    measured: PowerSeries
    predicted: PowerSeries
    discrepancy: np.ndarray  # max-norm per order, up to the predicted order
    error_estimate: np.ndarray
    theta: np.ndarray
    s: np.ndarray


@dataclass
class NeumannEstimate:
    h3: np.ndarray
    tr_h3: np.ndarray
    error_estimate: float
    table: list = field(repr=False, default=None)


def boundary_grid(model, ntheta=16, ns=16):
    """(BoundaryData, theta grid, chart-s grid) on the model's boundary grid."""
    bd = model.boundary_data(ntheta, ns)
    s_chart = bd.s - model.alpha if model.sigma == "sphere" else bd.s
    TH, S = np.meshgrid(bd.theta, s_chart, indexing="ij")
    return bd, TH, S


def _sampler(fn, TH, S):
    def f(xs):
        Y = np.stack(np.broadcast_arrays(xs[:, None, None], TH[None], S[None]), axis=-1)
        return np.real(fn(Y.astype(complex)))

    return f


def predicted_potential(bd):
    z = np.zeros_like(bd.R_h)
    return PowerSeries(np.array([z, z + 1, z, -bd.R_h / 8, bd.tr_h3 / 2]), SCALAR)


def predicted_metric(bd):
    n1, n2 = bd.R_h.shape
    c = np.zeros((4, n1, n2, 3, 3))
    R = bd.R_h[..., None, None]
    tr = bd.tr_h3
    c[0, ..., 0, 0] = 1
    c[0, ..., 1:, 1:] = bd.h
    c[2, ..., 0, 0] = -bd.R_h / 4
    c[2, ..., 1:, 1:] = -R / 2 * bd.h
    c[3, ..., 0, 0] = tr
    c[3, ..., 1:, 1:] = bd.h3 + tr[..., None, None] * bd.h
    return PowerSeries(c, TENSOR)


def _compare(measured, predicted):
    n = min(measured.order, predicted.order)
    return np.array([np.max(np.abs(measured.coeffs[k] - predicted.coeffs[k])) for k in range(n + 1)])


def potential_expansion(model, N=4, ntheta=16, ns=16, h0=0.1, halvings=3):
    """Taylor coefficients of 1/V in x at each boundary grid point."""
    bd, TH, S = boundary_grid(model, ntheta, ns)
    c, err, _ = stencil_coefficients(_sampler(model.inv_potential, TH, S), N, h0, halvings)
    meas = PowerSeries(c, SCALAR)
    pred = predicted_potential(bd)
    return ExpansionResult(meas, pred, _compare(meas, pred), err, TH, S)


def conformal_metric_expansion(model, N=4, ntheta=16, ns=16, h0=0.1, halvings=3):
    """Taylor coefficients of the compactified metric in x (3x3 blocks)."""
    bd, TH, S = boundary_grid(model, ntheta, ns)
    c, err, _ = stencil_coefficients(_sampler(model.compact, TH, S), N, h0, halvings)
    meas = PowerSeries(c, TENSOR)
    pred = predicted_metric(bd)
    return ExpansionResult(meas, pred, _compare(meas, pred), err, TH, S)


def metric_ladder(model, x0=0.1, K=6, ntheta=None, ns=None):
    """Samples of the compactified metric on x_k = x0 2^-k over the boundary grid."""
    if hasattr(model, "h_grid"):
        TH, S = np.meshgrid(model.theta, model.s, indexing="ij")
    else:
        _, TH, S = boundary_grid(model, ntheta or 16, ns or 16)
    xs = halving_ladder(x0, K)
    return xs, _sampler(model.compact, TH, S)(xs)


def extract_neumann(x_ladder, samples, h, R_h, floor=None):
    """Neumann tensor from compactified-metric samples on a halving ladder.

    q(x) = (gbar_tan - h + (R_h/2) x^2 h) / x^3 tends to h3 + (tr h3) h,
    whose h-trace is 3 tr h3.  Richardson in powers of x removes the
    O(x) remainder.
    """
    x_ladder = np.asarray(x_ladder, dtype=float)
    if len(x_ladder) < 4:
        raise ValueError("ladder needs at least four rungs")
    tan = samples[..., 1:, 1:] if samples.shape[-1] == 3 else samples
    R = np.asarray(R_h)[..., None, None]
    qs = [(tan[k] - h + 0.5 * R * x * x * h) / x ** 3 for k, x in enumerate(x_ladder)]
    powers = list(range(1, len(x_ladder)))
    table, P, err, errs = richardson(qs, x_ladder, powers)
    if floor is None:
        floor = 1e-13 / x_ladder[-1] ** 3
    check_convergence(errs, floor, table, "Neumann extraction")
    hinv = np.linalg.inv(h)
    tr = np.einsum("...ij,...ij->...", hinv, P) / 3
    h3 = P - tr[..., None, None] * h
    return NeumannEstimate(h3, tr, float(err), table)


def levelset_mean_curvature(model, Y):
    """Mean curvature of {x = const} in g, normal toward increasing x."""

    def flux(Z):
        G = model.physical(Z)
        Gi = np.linalg.inv(G)
        sq = np.sqrt(np.linalg.det(G))
        return sq[..., None] * Gi[..., :, 0] / np.sqrt(Gi[..., 0, 0])[..., None]

    d = cs_gradient(flux, Y)
    div = np.einsum("...ii->...", d)
    sq = np.sqrt(np.linalg.det(np.real(model.physical(Y.astype(complex)))))
    return div / sq


@dataclass
class LevelSetSeries:
    measured: np.ndarray  # (4,) + grid, coefficients of 1, x, x^2, x^3
    predicted: np.ndarray
    residual: float
    epsilons: np.ndarray
    values: np.ndarray


def levelset_H_series(model, ladder=None, degree=6, ntheta=8, ns=8, tol=1e-6):
    """Fit H(Sigma_eps) on a halving ladder of eps; the fit degree covers the O(x^4) remainder."""
    eps = halving_ladder(0.1, 6) if ladder is None else np.asarray(ladder, dtype=float)
    bd, TH, S = boundary_grid(model, ntheta, ns)
    Y = np.stack(np.broadcast_arrays(eps[:, None, None], TH[None], S[None]), axis=-1)
    H = levelset_mean_curvature(model, Y)
    sc = eps.max()
    M = np.vander(eps / sc, degree + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(M, H.reshape(len(eps), -1), rcond=None)
    resid = float(np.max(np.abs(M @ coef - H.reshape(len(eps), -1))))
    coef = coef / (sc ** np.arange(degree + 1))[:, None]
    coef = coef.reshape((degree + 1,) + TH.shape)
    pred = np.array([-2 + 0 * bd.R_h, 0 * bd.R_h, -bd.R_h / 2, 1.5 * bd.tr_h3])
    if resid > tol:
        raise ExtractionError("level-set fit residual %.3g above %.3g" % (resid, tol))
    return LevelSetSeries(coef[:4], pred, resid, eps, H)
