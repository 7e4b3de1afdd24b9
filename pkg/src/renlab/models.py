"""Static backgrounds in the Fefferman-Graham chart (x, theta, s).

Every model exposes the compactified metric gbar = g / V^2 and the inverse
potential 1/V as functions of stacked chart coordinates Y[..., 3].  The
functions accept complex input so that derivatives can be taken by the
complex-step method.

Models with an exact bulk (Hyperbolic3, HorowitzMyers) also carry a
"disk chart" (a, b, eta) in which a surface meeting the boundary along a
closed curve is a graph eta = u(a, b) over the closed unit disk; the
minimal-surface solver works there.
"""

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2 * np.pi


class ModelError(ValueError):
    """Inconsistent or unsupported model description."""


@dataclass(frozen=True)
class BoundaryData:
    """Boundary fields on a uniform periodic (theta, s) grid.

    h and h3 have shape (ntheta, ns, 2, 2); R_h and mu have shape
    (ntheta, ns).  For the sphere the grid is (azimuth, polar angle) with
    polar nodes at cell midpoints.
    """

    theta: np.ndarray
    s: np.ndarray
    h: np.ndarray
    R_h: np.ndarray
    h3: np.ndarray
    mu: np.ndarray
    mass: float
    area: float

    @property
    def tr_h3(self):
        return np.einsum("...ij,...ij->...", np.linalg.inv(self.h), self.h3)


def _sym(a):
    return 0.5 * (a + np.swapaxes(a, -1, -2))


class MetricModel:
    """Base class.  Subclasses fill in the chart functions."""

    kind = "abstract"
    sigma = "torus"
    has_bulk = False
    series_order = None
    theta_period = TWO_PI
    s_period = None

    def compact(self, Y):
        raise NotImplementedError

    def inv_potential(self, Y):
        raise NotImplementedError

    def physical(self, Y):
        xi = self.inv_potential(Y)
        return self.compact(Y) / (xi * xi)[..., None, None]

    def potential(self, Y):
        return 1.0 / self.inv_potential(Y)

    def boundary_data(self, ntheta=16, ns=16):
        raise NotImplementedError

    def reduce(self, Y):
        """Reduce theta and s modulo the declared periods."""
        Y = np.array(Y, dtype=float)
        Y[..., 1] = np.mod(Y[..., 1], self.theta_period)
        if self.s_period:
            Y[..., 2] = np.mod(Y[..., 2], self.s_period)
        return Y

    def describe(self):
        return {"kind": self.kind}


# --- hyperbolic space -------------------------------------------------------


class Hyperbolic3(MetricModel):
    """Hyperbolic 3-space with static potential V = (1 + rho^2) / (1 - rho^2).

    The FG chart is adapted to the latitude circle at polar angle alpha on
    the unit sphere: theta is the azimuth and s = (polar angle) - alpha, so
    h = ds^2 + sin^2(alpha + s) dtheta^2.
    """

    kind = "hyperbolic3"
    sigma = "sphere"
    has_bulk = True
    disk_k = 1.0

    @staticmethod
    def rim_eta(s0):
        """Disk-chart height of a rim point at polar angle s0."""
        return s0 - np.pi / 2

    def __init__(self, alpha=np.pi / 2):
        if not 0 < alpha < np.pi:
            raise ModelError("alpha must lie in (0, pi)")
        self.alpha = float(alpha)

    def describe(self):
        return {"kind": self.kind, "alpha": self.alpha}

    # FG chart
    def compact(self, Y):
        x, s = Y[..., 0], Y[..., 2]
        q = (1 - x * x / 4) / (1 + x * x / 4)
        G = np.zeros(Y.shape[:-1] + (3, 3), dtype=np.result_type(Y, float))
        G[..., 0, 0] = 1 / (1 + x * x / 4) ** 2
        G[..., 1, 1] = q * q * np.sin(self.alpha + s) ** 2
        G[..., 2, 2] = q * q
        return G

    def inv_potential(self, Y):
        x = Y[..., 0]
        return x / (1 + x * x / 4)

    # native ball chart (rho, theta, s)
    @staticmethod
    def native_from_fg(Y):
        Z = np.array(Y, dtype=np.result_type(Y, float))
        Z[..., 0] = (2 - Y[..., 0]) / (2 + Y[..., 0])
        return Z

    def native_physical(self, Z):
        rho, s = Z[..., 0], Z[..., 2]
        c = 4 / (1 - rho * rho) ** 2
        G = np.zeros(Z.shape[:-1] + (3, 3), dtype=np.result_type(Z, float))
        G[..., 0, 0] = c
        G[..., 1, 1] = c * rho * rho * np.sin(self.alpha + s) ** 2
        G[..., 2, 2] = c * rho * rho
        return G

    def native_potential(self, Z):
        rho = Z[..., 0]
        return (1 + rho * rho) / (1 - rho * rho)

    def boundary_data(self, ntheta=16, ns=16):
        th = TWO_PI * np.arange(ntheta) / ntheta
        pol = np.pi * (np.arange(ns) + 0.5) / ns
        h = np.zeros((ntheta, ns, 2, 2))
        h[..., 0, 0] = np.sin(pol)[None, :] ** 2
        h[..., 1, 1] = 1.0
        zero = np.zeros((ntheta, ns))
        return BoundaryData(th, pol, h, zero + 2.0, np.zeros_like(h), zero, 0.0, 4 * np.pi)

    def boundary_tensors(self, theta, s):
        """(h, h3) at boundary points, s the polar angle."""
        theta, s = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(s, dtype=float))
        h = np.zeros(theta.shape + (2, 2))
        h[..., 0, 0] = np.sin(s) ** 2
        h[..., 1, 1] = 1.0
        return h, np.zeros_like(h)

    @staticmethod
    def boundary_curvature(theta, s):
        return np.full(np.broadcast(theta, s).shape, 2.0)

    # disk chart: p = cos(eta) q - sin(eta) e3 in the unit 3-sphere, q the
    # stereographic image of (a, b) on the great hemisphere {p3 = 0, p4 >= 0}.
    @staticmethod
    def disk_metric(Y):
        a, b, e = Y[..., 0], Y[..., 1], Y[..., 2]
        c = np.cos(e) ** 2 * 4 / (1 + a * a + b * b) ** 2
        G = np.zeros(Y.shape[:-1] + (3, 3), dtype=np.result_type(Y, float))
        G[..., 0, 0] = c
        G[..., 1, 1] = c
        G[..., 2, 2] = 1
        return G

    @staticmethod
    def disk_xi(Y):
        a, b, e = Y[..., 0], Y[..., 1], Y[..., 2]
        rho2 = a * a + b * b
        return np.cos(e) * (1 - rho2) / (1 + rho2)

    @staticmethod
    def bdf_from_xi(xi):
        return 2 * xi / (1 + np.sqrt(1 - xi * xi))

    @staticmethod
    def xi_from_bdf(x):
        return x / (1 + x * x / 4)

    @staticmethod
    def embed(Y):
        a, b, e = Y[..., 0], Y[..., 1], Y[..., 2]
        rho2 = a * a + b * b
        ce, se = np.cos(e), np.sin(e)
        return np.stack(
            [ce * 2 * a / (1 + rho2), ce * 2 * b / (1 + rho2), -se + 0 * a, ce * (1 - rho2) / (1 + rho2)], axis=-1
        )

    @staticmethod
    def unembed(p):
        p3 = p[..., 2] if np.iscomplexobj(p) else np.clip(p[..., 2], -1, 1)
        e = -np.arcsin(p3)
        ce = np.cos(e)
        q1, q2, q4 = p[..., 0] / ce, p[..., 1] / ce, p[..., 3] / ce
        return np.stack([q1 / (1 + q4), q2 / (1 + q4), e], axis=-1)

    def chart_to_collar(self, Y):
        """Disk chart -> (x, point of the unit sphere in R^3)."""
        p = self.embed(Y)
        om = p[..., :3]
        om = om / np.sqrt(np.sum(om * om, axis=-1))[..., None]
        return self.bdf_from_xi(p[..., 3]), om

    def collar_to_chart(self, x, om):
        x4 = self.xi_from_bdf(x)
        p = np.concatenate([np.sqrt(1 - x4 * x4)[..., None] * om, x4[..., None]], axis=-1)
        return self.unembed(p)

    @staticmethod
    def sigma_exp(gam, nrm, s):
        s = np.asarray(s)[..., None]
        return np.cos(s) * gam + np.sin(s) * nrm

    @staticmethod
    def sigma_project(gam, v):
        return v - np.sum(v * gam, axis=-1)[..., None] * gam

    @staticmethod
    def sigma_point(theta, s_polar):
        """Point of the unit sphere at azimuth theta and polar angle s_polar."""
        return np.stack(
            [np.sin(s_polar) * np.cos(theta), np.sin(s_polar) * np.sin(theta), np.cos(s_polar) + 0 * theta], axis=-1
        )

    def fg_to_chart(self, Y):
        om = self.sigma_point(Y[..., 1], self.alpha + Y[..., 2])
        return self.collar_to_chart(Y[..., 0], om)


# --- Horowitz-Myers soliton -------------------------------------------------


def hm_radius(x):
    """Native radius r(x) = (1/x)(1 + x^3/4)^(2/3)."""
    return (1 + x ** 3 / 4) ** (2.0 / 3.0) / x


def hm_bdf(r):
    """Inverse of hm_radius, in a cancellation-free form."""
    return 4 ** (1.0 / 3.0) / (r ** 1.5 + np.sqrt(r ** 3 - 1)) ** (2.0 / 3.0)


class HorowitzMyers(MetricModel):
    """The n = 3 soliton g = dr^2/(r^2 f) + r^2 f dtheta^2 + r^2 ds^2, f = 1 - r^-3, V = r."""

    kind = "horowitz_myers"
    sigma = "torus"
    has_bulk = True

    def __init__(self, theta_period=4 * np.pi / 3, s_period=1.0):
        if theta_period <= 0 or s_period <= 0:
            raise ModelError("periods must be positive")
        self.theta_period = float(theta_period)
        self.s_period = float(s_period)
        self.k = TWO_PI / self.theta_period
        self.disk_k = self.k

    @staticmethod
    def rim_eta(s0):
        return s0

    def describe(self):
        return {"kind": self.kind, "theta_period": self.theta_period, "s_period": self.s_period}

    def compact(self, Y):
        x = Y[..., 0]
        c = x ** 3 / 4
        G = np.zeros(Y.shape[:-1] + (3, 3), dtype=np.result_type(Y, float))
        G[..., 0, 0] = (1 + c) ** (-4.0 / 3.0)
        G[..., 1, 1] = ((1 - c) / (1 + c)) ** 2
        G[..., 2, 2] = 1
        return G

    def inv_potential(self, Y):
        x = Y[..., 0]
        return x * (1 + x ** 3 / 4) ** (-2.0 / 3.0)

    @staticmethod
    def native_from_fg(Y):
        Z = np.array(Y, dtype=np.result_type(Y, float))
        Z[..., 0] = hm_radius(Y[..., 0])
        return Z

    @staticmethod
    def native_physical(Z):
        r = Z[..., 0]
        f = 1 - r ** -3.0
        G = np.zeros(Z.shape[:-1] + (3, 3), dtype=np.result_type(Z, float))
        G[..., 0, 0] = 1 / (r * r * f)
        G[..., 1, 1] = r * r * f
        G[..., 2, 2] = r * r
        return G

    @staticmethod
    def native_potential(Z):
        return Z[..., 0]

    def boundary_data(self, ntheta=16, ns=16):
        th = self.theta_period * np.arange(ntheta) / ntheta
        s = self.s_period * np.arange(ns) / ns
        h = np.zeros((ntheta, ns, 2, 2))
        h[..., 0, 0] = 1.0
        h[..., 1, 1] = 1.0
        h3 = np.zeros_like(h)
        h3[..., 0, 0] = -2.0 / 3.0
        h3[..., 1, 1] = 1.0 / 3.0
        mu = np.full((ntheta, ns), -1.0)
        area = self.theta_period * self.s_period
        return BoundaryData(th, s, h, np.zeros((ntheta, ns)), h3, mu, -area, area)

    def boundary_tensors(self, theta, s):
        theta, s = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(s, dtype=float))
        h = np.zeros(theta.shape + (2, 2))
        h[..., 0, 0] = h[..., 1, 1] = 1.0
        h3 = np.zeros_like(h)
        h3[..., 0, 0] = -2.0 / 3.0
        h3[..., 1, 1] = 1.0 / 3.0
        return h, h3

    @staticmethod
    def boundary_curvature(theta, s):
        return np.zeros(np.broadcast(theta, s).shape)

    # disk chart: 1/r = 1 - a^2 - b^2, theta = atan2(b, a)/k, eta = s
    def disk_metric(self, Y):
        a, b = Y[..., 0], Y[..., 1]
        rho2 = a * a + b * b
        w = 1 - rho2
        q = 1 + w + w * w
        A = 4 / q
        C = q / self.k ** 2
        G = np.zeros(Y.shape[:-1] + (3, 3), dtype=np.result_type(Y, float))
        G[..., 0, 0] = (A * a * a + C * b * b) / rho2
        G[..., 1, 1] = (A * b * b + C * a * a) / rho2
        G[..., 0, 1] = G[..., 1, 0] = (A - C) * a * b / rho2
        G[..., 2, 2] = 1
        return G

    @staticmethod
    def disk_xi(Y):
        return 1 - Y[..., 0] ** 2 - Y[..., 1] ** 2

    @staticmethod
    def bdf_from_xi(xi):
        return hm_bdf(1 / xi)

    @staticmethod
    def xi_from_bdf(x):
        return 1 / hm_radius(x)

    def chart_to_collar(self, Y):
        x = self.bdf_from_xi(self.disk_xi(Y))
        ang = np.arctan2(Y[..., 1], Y[..., 0])
        return x, np.stack([ang / self.k, Y[..., 2]], axis=-1)

    def collar_to_chart(self, x, ts):
        rho = np.sqrt(1 - self.xi_from_bdf(x))
        ang = self.k * ts[..., 0]
        return np.stack([rho * np.cos(ang), rho * np.sin(ang), ts[..., 1] + 0 * rho], axis=-1)

    @staticmethod
    def sigma_exp(gam, nrm, s):
        return gam + np.asarray(s)[..., None] * nrm

    @staticmethod
    def sigma_project(gam, v):
        return v

    def fg_to_chart(self, Y):
        return self.collar_to_chart(Y[..., 0], Y[..., 1:])


# --- series-backed torus backgrounds ------------------------------------------


def _split_modes(n):
    """Integer wavenumbers with the Nyquist mode split evenly into +-n/2."""
    k = np.fft.fftfreq(n, 1.0 / n)
    w = np.ones(n)
    if n % 2 == 0:
        k = np.append(k, n // 2)
        w = np.append(w, 0.5)
        w[n // 2] = 0.5
        idx = np.append(np.arange(n), n // 2)
    else:
        idx = np.arange(n)
    return k, w, idx


class PeriodicField:
    """Trigonometric interpolant of samples on a uniform (theta, s) grid.

    The Nyquist mode of an even grid is kept as a cosine, so the interpolant
    is real and reproduces the samples exactly.
    """

    def __init__(self, values, theta_period, s_period):
        values = np.asarray(values, dtype=float)
        self.values = values
        self.n1, self.n2 = values.shape[:2]
        self.P1, self.P2 = float(theta_period), float(s_period)
        full = np.fft.fft2(values, axes=(0, 1)) / (self.n1 * self.n2)
        self.k1, w1, i1 = _split_modes(self.n1)
        self.k2, w2, i2 = _split_modes(self.n2)
        tail = (1,) * (values.ndim - 2)
        self.coef = full[i1][:, i2] * (w1[:, None] * w2[None, :]).reshape(w1.shape + w2.shape + tail)

    def _eval(self, theta, s, d1=0, d2=0):
        theta, s = np.broadcast_arrays(np.asarray(theta), np.asarray(s))
        batch, tail = theta.shape, self.values.shape[2:]
        a1 = 1j * TWO_PI / self.P1 * self.k1
        a2 = 1j * TWO_PI / self.P2 * self.k2
        e1 = a1 ** d1 * np.exp(theta.reshape(-1, 1) * a1)
        e2 = a2 ** d2 * np.exp(s.reshape(-1, 1) * a2)
        c = self.coef.reshape(len(self.k1), len(self.k2), -1)
        out = np.einsum("za,zb,abt->zt", e1, e2, c).reshape(batch + tail)
        if np.iscomplexobj(theta) or np.iscomplexobj(s):
            return out
        return out.real

    def __call__(self, theta, s):
        return self._eval(theta, s)

    def derivative(self, d1=0, d2=0):
        """Derivative values on the sample grid."""
        th = self.P1 * np.arange(self.n1) / self.n1
        ss = self.P2 * np.arange(self.n2) / self.n2
        TH, S = np.meshgrid(th, ss, indexing="ij")
        return self._eval(TH, S, d1, d2)


def curvature_2d(h, theta_period, s_period):
    """Scalar curvature of a metric field h(theta, s) on a periodic grid (Brioschi)."""
    F = [PeriodicField(h[..., i, j], theta_period, s_period) for i, j in ((0, 0), (0, 1), (1, 1))]
    E, Fm, G = (f.values for f in F)
    Eu, Ev = F[0].derivative(1, 0), F[0].derivative(0, 1)
    Fu, Fv = F[1].derivative(1, 0), F[1].derivative(0, 1)
    Gu, Gv = F[2].derivative(1, 0), F[2].derivative(0, 1)
    Evv = F[0].derivative(0, 2)
    Fuv = F[1].derivative(1, 1)
    Guu = F[2].derivative(2, 0)
    m1 = np.stack(
        [
            np.stack([-Evv / 2 + Fuv - Guu / 2, Eu / 2, Fu - Ev / 2], -1),
            np.stack([Fv - Gu / 2, E, Fm], -1),
            np.stack([Gv / 2, Fm, G], -1),
        ],
        -2,
    )
    z = np.zeros_like(E)
    m2 = np.stack(
        [
            np.stack([z, Ev / 2, Gu / 2], -1),
            np.stack([Ev / 2, E, Fm], -1),
            np.stack([Gu / 2, Fm, G], -1),
        ],
        -2,
    )
    K = (np.linalg.det(m1) - np.linalg.det(m2)) / (E * G - Fm * Fm) ** 2
    return 2 * K


class PrescribedFG(MetricModel):
    """Formal background built from boundary data through order x^3.

    gbar = (1 - R_h x^2/4 + tr h3 x^3) dx^2 + h - (R_h/2) x^2 h + (h3 + tr h3 h) x^3
    1/V  = x - (R_h/8) x^3 + (tr h3 / 2) x^4
    """

    kind = "prescribed_fg"
    sigma = "torus"
    series_order = 3

    def __init__(self, h, h3, theta_period=TWO_PI, s_period=TWO_PI, grid=(16, 16)):
        n1, n2 = grid
        self.theta_period = float(theta_period)
        self.s_period = float(s_period)
        self.h_grid = _as_field(h, n1, n2)
        self.h3_grid = _sym(_as_field(h3, n1, n2))
        ev = np.linalg.eigvalsh(self.h_grid)
        if np.any(ev <= 0):
            raise ModelError("Dirichlet data must be positive definite")
        self.grid = (n1, n2)
        self.theta = self.theta_period * np.arange(n1) / n1
        self.s = self.s_period * np.arange(n2) / n2
        self.R_grid = curvature_2d(self.h_grid, self.theta_period, self.s_period)
        hinv = np.linalg.inv(self.h_grid)
        self.trh3_grid = np.einsum("...ij,...ij->...", hinv, self.h3_grid)
        self._h = PeriodicField(self.h_grid, self.theta_period, self.s_period)
        self._h3 = PeriodicField(self.h3_grid, self.theta_period, self.s_period)
        self._R = PeriodicField(self.R_grid, self.theta_period, self.s_period)
        self._tr = PeriodicField(self.trh3_grid, self.theta_period, self.s_period)

    def describe(self):
        return {"kind": self.kind, "theta_period": self.theta_period, "s_period": self.s_period, "grid": list(self.grid)}

    def compact(self, Y):
        x, th, s = Y[..., 0], Y[..., 1], Y[..., 2]
        h = self._h(th, s)
        h3 = self._h3(th, s)
        R = self._R(th, s)
        tr = self._tr(th, s)
        G = np.zeros(Y.shape[:-1] + (3, 3), dtype=np.result_type(Y, h, float))
        G[..., 0, 0] = 1 - R * x * x / 4 + tr * x ** 3
        tan = h * (1 - R * x * x / 2)[..., None, None] + (h3 + tr[..., None, None] * h) * (x ** 3)[..., None, None]
        G[..., 1:, 1:] = tan
        return G

    def boundary_tensors(self, theta, s):
        return self._h(theta, s), self._h3(theta, s)

    def boundary_curvature(self, theta, s):
        return self._R(theta, s)

    def inv_potential(self, Y):
        x, th, s = Y[..., 0], Y[..., 1], Y[..., 2]
        return x - self._R(th, s) * x ** 3 / 8 + self._tr(th, s) * x ** 4 / 2

    def boundary_data(self, ntheta=None, ns=None):
        from .expansions import extract_neumann, metric_ladder

        x_ladder, samples = metric_ladder(self)
        est = extract_neumann(x_ladder, samples, self.h_grid, self.R_grid)
        h3 = est.h3
        tr = np.einsum("...ij,...ij->...", np.linalg.inv(self.h_grid), h3)
        mu = 3 * tr
        dA = np.sqrt(np.linalg.det(self.h_grid))
        cell = self.theta_period * self.s_period / (self.grid[0] * self.grid[1])
        return BoundaryData(
            self.theta, self.s, self.h_grid, self.R_grid, h3, mu, float(np.sum(mu * dA) * cell), float(np.sum(dA) * cell)
        )


class WarpedTorus(PrescribedFG):
    """Torus boundary h = f(theta)^2 dtheta^2 + ds^2 with a prescribed Neumann tensor."""

    kind = "warped_torus"

    def __init__(self, f, h3, theta_period=TWO_PI, s_period=TWO_PI, grid=(16, 16)):
        n1, n2 = grid
        th = theta_period * np.arange(n1) / n1
        fv = np.asarray(f(th) if callable(f) else f, dtype=float) * np.ones(n1)
        if np.any(fv <= 0):
            raise ModelError("warping function must be positive")
        h = np.zeros((n1, n2, 2, 2))
        h[..., 0, 0] = (fv ** 2)[:, None]
        h[..., 1, 1] = 1.0
        self.f_values = fv
        super().__init__(h, h3, theta_period, s_period, grid)


def _as_field(a, n1, n2):
    a = np.asarray(a, dtype=float)
    if a.shape == (2, 2):
        return np.broadcast_to(a, (n1, n2, 2, 2)).copy()
    if a.shape == (n1, n2, 2, 2):
        return a.copy()
    raise ModelError("boundary tensor must be 2x2 or (%d, %d, 2, 2)" % (n1, n2))


# --- constructors -------------------------------------------------------------


def hyperbolic3(alpha=np.pi / 2):
    return Hyperbolic3(alpha)


def horowitz_myers(theta_period=4 * np.pi / 3, s_period=1.0):
    return HorowitzMyers(theta_period, s_period)


def boundary_data(model, ntheta=16, ns=16):
    return model.boundary_data(ntheta, ns)


def from_config(section):
    """Build a model from a parsed config table."""
    sec = dict(section)
    kind = sec.pop("kind", None)
    try:
        if kind == "hyperbolic3":
            return Hyperbolic3(float(sec.pop("alpha", np.pi / 2)))
        if kind == "horowitz_myers":
            m = HorowitzMyers(float(sec.pop("theta_period", 4 * np.pi / 3)), float(sec.pop("s_period", 1.0)))
            return m
        if kind in ("prescribed_fg", "warped_torus"):
            grid = tuple(int(v) for v in sec.pop("grid", (16, 16)))
            P1 = float(sec.pop("theta_period", TWO_PI))
            P2 = float(sec.pop("s_period", TWO_PI))
            h3 = np.array(sec.pop("h3"), dtype=float)
            if kind == "warped_torus":
                coeffs = sec.pop("f_fourier", [1.0])
                m = WarpedTorus(lambda th: _fourier_profile(coeffs, th, P1), h3, P1, P2, grid)
            else:
                m = PrescribedFG(np.array(sec.pop("h", np.eye(2)), dtype=float), h3, P1, P2, grid)
            return m
    finally:
        if sec:
            raise ModelError("unknown model keys: %s" % ", ".join(sorted(sec)))
    raise ModelError("unknown model kind %r" % kind)


def _fourier_profile(coeffs, th, period):
    """f(theta) = c0 + sum_k c_k cos(2 pi k theta / period)."""
    out = np.full_like(th, float(coeffs[0]))
    for k, c in enumerate(coeffs[1:], start=1):
        out += c * np.cos(TWO_PI * k * th / period)
    return out
