"""Metric evaluation, connection, curvature and geodesics in the (x, theta, s) chart.

First derivatives of metrics are taken by the complex-step method, which is
exact to rounding for the analytic model metrics.  Second derivatives
(curvature, Hessian of V) use fourth-order central differences of those
complex-step first derivatives, with the x-step scaled to x so that the
stencil never reaches the boundary.
"""

import warnings
from dataclasses import dataclass

import numpy as np

CS_STEP = 1e-30
FD_REL = 1e-3
FD_ABS = 1e-3

COMPACT = "compact"
PHYSICAL = "physical"


class SingularEvaluationError(ValueError):
    """Physical quantities requested on or across the conformal boundary."""


class ModelInconsistencyError(ValueError):
    """A model produced a metric that is not positive definite."""


class AccuracyWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ChartPoint:
    x: float
    theta: float
    s: float

    def __post_init__(self):
        if self.x < 0:
            raise ValueError("x must be non-negative")

    @property
    def array(self):
        return np.array([self.x, self.theta, self.s], dtype=float)


@dataclass(frozen=True)
class MetricTensor:
    components: np.ndarray
    which_metric: str


@dataclass
class GeodesicPath:
    t: np.ndarray
    points: np.ndarray
    velocities: np.ndarray
    metric_flag: str
    speed_drift: float
    exited: bool = False


def _as_points(p):
    if isinstance(p, ChartPoint):
        return p.array
    return np.asarray(p, dtype=float)


def _check_which(which):
    if which not in (COMPACT, PHYSICAL):
        raise ValueError("which must be 'compact' or 'physical'")


def metric_function(model, which):
    _check_which(which)
    return model.compact if which == COMPACT else model.physical


# --- generic tensor calculus for any complex-capable metric function ---------------


def cs_gradient(f, Y):
    """Complex-step gradient of f along the last axis of Y; output axis appended at the end."""
    Y = np.asarray(Y, dtype=float)
    out = []
    for l in range(Y.shape[-1]):
        Yc = Y.astype(complex)
        Yc[..., l] += 1j * CS_STEP
        out.append(np.imag(f(Yc)) / CS_STEP)
    return np.stack(out, axis=-1)


def metric_derivatives(metric, Y):
    """(G, dG) with dG[..., l, i, j] = d_l G_ij."""
    Y = np.asarray(Y, dtype=float)
    G = np.real(metric(Y.astype(complex)))
    dG = np.moveaxis(cs_gradient(metric, Y), -1, -3)
    return G, dG


def christoffel_of(metric, Y):
    """(G, G^-1, Gamma) with Gamma[..., k, i, j] = Gamma^k_ij."""
    G, dG = metric_derivatives(metric, Y)
    Gi = np.linalg.inv(G)
    low = 0.5 * (np.einsum("...ilj->...lij", dG) + np.einsum("...jli->...lij", dG) - dG)
    return G, Gi, np.einsum("...kl,...lij->...kij", Gi, low)


def _steps(Y, x_scaled):
    h = np.full(Y.shape, FD_ABS)
    if x_scaled:
        h[..., 0] = FD_REL * np.abs(Y[..., 0])
    return h


def fd_derivative(f, Y, x_scaled=True):
    """Fourth-order central differences of f along each coordinate; new axis -1."""
    Y = np.asarray(Y, dtype=float)
    H = _steps(Y, x_scaled)
    out = []
    for l in range(Y.shape[-1]):
        e = np.zeros(Y.shape)
        e[..., l] = H[..., l]
        hl = H[..., l].reshape(H.shape[:-1] + (1,) * (np.ndim(f(Y)) - (Y.ndim - 1)))
        d = (-f(Y + 2 * e) + 8 * f(Y + e) - 8 * f(Y - e) + f(Y - 2 * e)) / (12 * hl)
        out.append(d)
    return np.stack(out, axis=-1)


def riemann_of(metric, Y, x_scaled=True):
    """R^a_{bcd} = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb."""
    _, _, Gam = christoffel_of(metric, Y)
    dGam = fd_derivative(lambda Z: christoffel_of(metric, Z)[2], Y, x_scaled)  # [..., a, d, b, c]
    term = np.einsum("...adbc->...abcd", dGam)
    R = term - np.einsum("...abcd->...abdc", term)
    R += np.einsum("...ace,...edb->...abcd", Gam, Gam) - np.einsum("...ade,...ecb->...abcd", Gam, Gam)
    return R


def curvature_of(metric, Y, x_scaled=True):
    G = np.real(metric(np.asarray(Y, dtype=complex)))
    R = riemann_of(metric, Y, x_scaled)
    Ric = np.einsum("...abad->...bd", R)
    scal = np.einsum("...bd,...bd->...", np.linalg.inv(G), Ric)
    return {"riemann": R, "ricci": Ric, "scalar": scal, "metric": G}


# --- model-facing operations ------------------------------------------------


def _require_interior(Y, which):
    if which == PHYSICAL and np.any(Y[..., 0] <= 0):
        raise SingularEvaluationError("physical metric is singular at x = 0")


def metric_eval(model, p, which=COMPACT):
    Y = _as_points(p)
    _check_which(which)
    _require_interior(Y, which)
    G = np.real(metric_function(model, which)(Y.astype(complex)))
    if np.any(np.linalg.eigvalsh(G) <= 0):
        raise ModelInconsistencyError("metric is not positive definite at the requested point")
    return MetricTensor(G, which)


def christoffel(model, p, which=COMPACT):
    Y = _as_points(p)
    _require_interior(Y, which)
    return christoffel_of(metric_function(model, which), Y)[2]


def curvature(model, p, which=PHYSICAL):
    Y = _as_points(p)
    if which == PHYSICAL and np.any(Y[..., 0] * (1 - 2 * FD_REL) <= 0):
        raise SingularEvaluationError("curvature stencil reaches x = 0")
    return curvature_of(metric_function(model, which), Y)


def static_residual(model, p, potential=None):
    """nabla^2 V - (Delta V) g - V Ric for the physical metric; `potential` overrides V."""
    Y = _as_points(p)
    _require_interior(Y, PHYSICAL)
    Vf = potential if potential is not None else model.potential
    cur = curvature_of(model.physical, Y)
    G = cur["metric"]
    _, _, Gam = christoffel_of(model.physical, Y)
    dV = cs_gradient(Vf, Y)
    ddV = fd_derivative(lambda Z: cs_gradient(Vf, Z), Y)
    ddV = 0.5 * (ddV + np.swapaxes(ddV, -1, -2))
    hess = ddV - np.einsum("...kij,...k->...ij", Gam, dV)
    lap = np.einsum("...ij,...ij->...", np.linalg.inv(G), hess)
    V = np.real(Vf(Y.astype(complex)))
    return hess - lap[..., None, None] * G - V[..., None, None] * cur["ricci"]


def geodesic_rhs(metric, Y, V):
    _, _, Gam = christoffel_of(metric, Y)
    return V, -np.einsum("...kij,...i,...j->...k", Gam, V, V)


def rk4_step(rhs, Y, V, h):
    k1 = rhs(Y, V)
    k2 = rhs(Y + 0.5 * h * k1[0], V + 0.5 * h * k1[1])
    k3 = rhs(Y + 0.5 * h * k2[0], V + 0.5 * h * k2[1])
    k4 = rhs(Y + h * k3[0], V + h * k3[1])
    Yn = Y + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    Vn = V + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return Yn, Vn


def speed(metric, Y, V):
    G = np.real(metric(np.asarray(Y, dtype=complex)))
    return np.sqrt(np.einsum("...i,...ij,...j->...", V, G, V))


def geodesic_integrate(model, p, v, T, n_steps, which=COMPACT, drift_tol=1e-8):
    """Classical RK4 with n_steps fixed steps; stops early if x leaves the chart."""
    metric = metric_function(model, which)
    Y = _as_points(p).copy()
    V = np.asarray(v, dtype=float).copy()
    _require_interior(Y, which)
    if speed(metric, Y, V) <= 0:
        raise ValueError("initial velocity must be non-zero")
    h = T / n_steps
    ts, Ys, Vs = [0.0], [Y], [V]
    rhs = lambda a, b: geodesic_rhs(metric, a, b)
    exited = False
    for k in range(n_steps):
        Y, V = rk4_step(rhs, Y, V, h)
        if Y[0] < 0 or (which == PHYSICAL and Y[0] <= 0):
            exited = True
            break
        ts.append((k + 1) * h)
        Ys.append(Y)
        Vs.append(V)
    Ys, Vs = np.array(Ys), np.array(Vs)
    sp = speed(metric, Ys, Vs)
    drift = float(np.max(np.abs(sp - sp[0])))
    if drift > drift_tol:
        warnings.warn("geodesic speed drift %.3g exceeds %.3g" % (drift, drift_tol), AccuracyWarning)
    return GeodesicPath(np.array(ts), Ys, Vs, which, drift, exited)


def gamma_x_ss_candidates(R_h, P_ss, eps):
    """Both sign readings of the small-x expansion of Gamma^x_ss.

    P_ss = (h3 + tr h3 h)(ds, ds).  The first entry is the value implied by
    d_x gbar_ss; the second has both signs flipped.
    """
    from_metric = 0.5 * R_h * eps - 1.5 * P_ss * eps ** 2
    return {"from_metric": from_metric, "flipped": -from_metric}
