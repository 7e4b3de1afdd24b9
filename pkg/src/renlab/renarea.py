"""Truncated areas, the regularization fit, and the curvature-integral formula."""

from dataclasses import dataclass

import numpy as np

from .geometry import riemann_of
from .surfaces import surface_fields, derivatives

DEFAULT_LADDER = (0.04, 0.028, 0.02, 0.014, 0.01, 0.007)
N_GAUSS = 24
EULER = {"disk": 1, "strip": 0, "annulus": 0}


class ResolutionError(ValueError):
    pass


class FitError(RuntimeError):
    pass


class TailDivergenceError(RuntimeError):
    pass


@dataclass
class RenAFit:
    epsilons: np.ndarray
    areas: np.ndarray
    L: float
    c: float
    slope: float
    coeffs: np.ndarray  # c, slope, higher orders
    residual: float
    L_free: float  # 1/eps coefficient when it is fitted too

    @property
    def renormalized_area(self):
        return self.c


def _xi_threshold(model, eps):
    """xi value at which the boundary defining function equals eps."""
    return float(model.xi_from_bdf(np.asarray(eps, dtype=float)))


def _rim_roots(grid, xi, target):
    """Radius along each grid angle where the xi field equals target."""
    dxi = grid.d_r(xi)
    r = np.full((1, grid.nphi), 1.0 - target)
    for _ in range(100):
        v = grid.interp_r(xi, r)[0] - target
        dv = grid.interp_r(dxi, r)[0]
        step = v / dv
        r = np.clip(r - step.reshape(1, -1), 0.0, 1.0)
        if np.max(np.abs(step)) < 1e-15:
            break
    return r[0]


def weighted_integral(grid, fields, xi, sqrt_det, cutoff_xi, power, n_gauss=N_GAUSS):
    """Integral of f xi^-power dAbar over {xi > cutoff_xi} for each smooth field f.

    Per grid angle the radial integral runs over [0, r_eps] with Gauss
    panels graded geometrically toward r_eps, where the integrand varies on
    the scale of xi.  The angular sum is the trapezoid rule.
    """
    r_eps = _rim_roots(grid, xi, cutoff_xi) if cutoff_xi > 0 else np.ones(grid.nphi)
    delta = np.maximum(1 - r_eps, 1e-16)
    K = int(np.ceil(np.log2(1.0 / delta.min()))) + 1
    bps = [r_eps] + [np.maximum(r_eps - delta * 2.0 ** k, 0.0) for k in range(K + 1)]
    tg, wg = np.polynomial.legendre.leggauss(n_gauss)
    tot = np.zeros((len(fields), grid.nphi))
    for hi, lo in zip(bps[:-1], bps[1:]):
        if np.all(hi - lo == 0):
            continue
        rq = 0.5 * (hi - lo)[None, :] * (tg[:, None] + 1) + lo[None, :]
        wq = 0.5 * (hi - lo)[None, :] * wg[:, None]
        a = grid.interp_r(sqrt_det, rq)
        x = grid.interp_r(xi, rq)
        base = wq * a * rq * x ** (-float(power))
        for i, f in enumerate(fields):
            tot[i] += np.sum(base * (1.0 if f is None else grid.interp_r(f, rq)), axis=0)
    return tot.sum(axis=1) * 2 * np.pi / grid.nphi


def _surface_parts(surface):
    F = surface_fields(surface.model, *derivatives(surface.grid, surface.Y))
    sqrt_det = np.sqrt(np.linalg.det(F["gam"])) / surface.grid.R  # dAbar = sqrt_det r dr dphi
    ell = np.sqrt(F["gam"][0, :, 1, 1])
    L = float(ell.sum() * 2 * np.pi / surface.grid.nphi)
    return F, sqrt_det, L


def boundary_length(surface):
    """L(Gamma, h) from the induced compactified metric on the rim."""
    return _surface_parts(surface)[2]


def area_truncated(model, surface, eps):
    if eps <= 0:
        raise ResolutionError("cutoff must be positive")
    if eps < 1e-6:
        raise ResolutionError("cutoff %.3g below the radial resolution" % eps)
    F, sqrt_det, _ = _surface_parts(surface)
    return float(weighted_integral(surface.grid, [None], F["xi"], sqrt_det, _xi_threshold(model, eps), 2)[0])


def areas_on_ladder(surface, ladder):
    F, sqrt_det, L = _surface_parts(surface)
    A = np.array(
        [weighted_integral(surface.grid, [None], F["xi"], sqrt_det, _xi_threshold(surface.model, e), 2)[0] for e in ladder]
    )
    return A, L


def fit_ladder(eps, A, L, order=3, tol=1e-6):
    eps = np.asarray(eps, dtype=float)
    if len(eps) < 4 or eps.max() / eps.min() < 4:
        raise FitError("ladder needs at least four values spread over a factor of four")
    order = min(order, len(eps) - 2)
    M = np.stack([eps ** k for k in range(order + 1)], -1)
    y = A - L / eps
    c, *_ = np.linalg.lstsq(M, y, rcond=None)
    resid = float(np.max(np.abs(M @ c - y)))
    Mf = np.concatenate([(1 / eps)[:, None], M[:, : max(order, 1)]], axis=1)
    cf, *_ = np.linalg.lstsq(Mf, A, rcond=None)
    fit = RenAFit(eps, np.asarray(A), float(L), float(c[0]), float(c[1]) if order >= 1 else 0.0, c, resid, float(cf[0]))
    if resid > tol:
        raise FitError("regularization fit residual %.3g above %.3g; collar under-resolved?" % (resid, tol))
    return fit


def renormalized_area(model, surface, ladder=DEFAULT_LADDER, order=3, tol=1e-6):
    """Fit A(eps) = L/eps + c + c1 eps + ... with L pinned to the measured boundary length."""
    if surface.model is not model:
        raise ValueError("surface belongs to a different model")
    eps = np.asarray(ladder, dtype=float)
    A, L = areas_on_ladder(surface, eps)
    return fit_ladder(eps, A, L, order, tol)


# --- curvature-integral formula ------------------------------------------------------


def weyl_tangent(metric, Y, T1, T2):
    """W(e1, e2, e1, e2) for the orthonormalized tangent frame spanned by T1, T2."""
    R = riemann_of(metric, Y, x_scaled=False)
    G = np.real(metric(Y.astype(complex)))
    Gi = np.linalg.inv(G)
    Rl = np.einsum("...ae,...ebcd->...abcd", G, R)
    Ric = np.einsum("...abad->...bd", R)
    scal = np.einsum("...bd,...bd->...", Gi, Ric)
    P = Ric - scal[..., None, None] / 4 * G
    KN = (
        np.einsum("...ac,...bd->...abcd", P, G)
        + np.einsum("...bd,...ac->...abcd", P, G)
        - np.einsum("...ad,...bc->...abcd", P, G)
        - np.einsum("...bc,...ad->...abcd", P, G)
    )
    W = Rl - KN
    n1 = np.sqrt(np.einsum("...i,...ij,...j->...", T1, G, T1))
    e1 = T1 / n1[..., None]
    T2p = T2 - np.einsum("...i,...ij,...j->...", T2, G, e1)[..., None] * e1
    e2 = T2p / np.sqrt(np.einsum("...i,...ij,...j->...", T2p, G, T2p))[..., None]
    return np.einsum("...abcd,...a,...b,...c,...d->...", W, e1, e2, e1, e2)


@dataclass
class ClosedFormReport:
    value: float
    euler_characteristic: int
    mean_curvature_term: float
    traceless_term: float
    weyl_term: float
    tail: float


def renarea_closed_form(model, surface, cutoff=1e-3, tail_tol=1e-2, traceless_weight=1.0):
    """-2 pi chi + int (H^2/4 - w |b_0|^2) dA + int W_1212 dA, with w = traceless_weight.

    |b_0|^2 dA and W_1212 dA are conformally invariant, so they are
    integrated with the compactified metric, smooth up to the boundary.
    """
    if surface.closure not in EULER:
        raise ValueError("unknown closure %r" % surface.closure)
    chi = EULER[surface.closure]
    g = surface.grid
    d = derivatives(g, surface.Y)
    F = surface_fields(model, *d)
    gi = F["gam_inv"]
    b = F["b"]
    bb = np.einsum("...ij,...jk,...kl,...li->...", gi, b, gi, b)
    b0 = bb - 0.5 * F["Hbar"] ** 2
    sqrt_det = np.sqrt(np.linalg.det(F["gam"])) / g.R
    interior = np.ones(g.shape, dtype=bool)
    interior[0] = False
    W = np.zeros(g.shape)
    W[interior] = weyl_tangent(model.disk_metric, d[0][interior], d[1][interior], d[2][interior])
    W[0] = W[1]  # rim row: boundary values are not needed beyond interpolation support
    H2 = F["H"] ** 2 / 4
    full = weighted_integral(g, [b0, W], F["xi"], sqrt_det, 0.0, 0)
    mc = weighted_integral(g, [H2], F["xi"], sqrt_det, _xi_threshold(model, cutoff), 2)[0]
    mc_half = weighted_integral(g, [H2], F["xi"], sqrt_det, _xi_threshold(model, 2 * cutoff), 2)[0]
    tail = abs(mc - mc_half)
    if tail > tail_tol:
        raise TailDivergenceError("mean-curvature integral does not converge at the boundary (tail %.3g)" % tail)
    value = -2 * np.pi * chi + mc - traceless_weight * full[0] + full[1]
    return ClosedFormReport(float(value), chi, float(mc), float(full[0]), float(full[1]), float(tail))
