"""Minimal surfaces meeting the conformal boundary orthogonally along a curve.

The solver works in each model's disk chart (a, b, eta): the surface is the
graph eta = u(a, b) over the closed unit disk, so the boundary curve is the
rim and the disk centre caps the surface smoothly.  Everything the collar
chart (x, theta, s) needs -- the graph u(x, theta) and its coefficients
u2, u3 -- is read off the disk solution afterwards by locating points of the
surface on the normal geodesics of the curve.
"""

from dataclasses import dataclass, field

import numpy as np

from .disk import DiskGrid
from .geometry import christoffel_of, cs_gradient

TWO_PI = 2 * np.pi
PARTIAL_STEP = 1e-7


class ConfigurationError(ValueError):
    pass


class SingularSurfaceError(ValueError):
    pass


# --- boundary curves ------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryCurve:
    """theta -> (theta, s0(theta)) with s0 = base + delta cos(2 pi mode theta / period).

    On the sphere s0 is the polar angle and theta the azimuth; on the torus
    (theta, s) are flat coordinates.
    """

    sigma: str
    base: float
    delta: float = 0.0
    mode: int = 0
    period: float = TWO_PI

    def __post_init__(self):
        if self.sigma not in ("sphere", "torus"):
            raise ConfigurationError("curve must live on a sphere or a torus")
        if self.mode < 0 or int(self.mode) != self.mode:
            raise ConfigurationError("mode must be a non-negative integer")
        if self.sigma == "sphere":
            if abs(self.period - TWO_PI) > 1e-12:
                raise ConfigurationError("sphere curves are parametrized by the azimuth")
            if not (0 < self.base - abs(self.delta) and self.base + abs(self.delta) < np.pi):
                raise ConfigurationError("curve must stay away from the poles")

    @property
    def family(self):
        if self.delta != 0 and self.mode != 0:
            return "perturbed"
        if self.sigma == "torus":
            return "constant_s"
        return "great_circle" if abs(self.base - np.pi / 2) < 1e-14 else "latitude"

    def _w(self):
        return TWO_PI * self.mode / self.period

    def s0(self, theta):
        return self.base + self.delta * np.cos(self._w() * theta)

    def ds0(self, theta):
        return -self.delta * self._w() * np.sin(self._w() * theta)

    def frame(self, theta):
        """Point and unit normal (toward increasing s) in the model's ambient representation."""
        p, d = self.s0(theta), self.ds0(theta)
        if self.sigma == "torus":
            n = np.sqrt(1 + d * d)
            gam = np.stack([theta + 0 * p, p], axis=-1)
            N = np.stack([-d / n, 1 / n], axis=-1)
            return gam, N
        ct, st, cp, sp = np.cos(theta), np.sin(theta), np.cos(p), np.sin(p)
        gam = np.stack([sp * ct, sp * st, cp], axis=-1)
        e_pol = np.stack([cp * ct, cp * st, -sp], axis=-1)
        e_az = np.stack([-st, ct, 0 * ct], axis=-1)
        n = np.sqrt(sp * sp + d * d)
        N = (sp[..., None] * e_pol - d[..., None] * e_az) / n[..., None]
        return gam, N

    def exp_normal(self, theta, s):
        """Point at h-distance s from the curve along its normal geodesic."""
        gam, N = self.frame(theta)
        s = np.asarray(s)[..., None]
        if self.sigma == "torus":
            return gam + s * N
        return np.cos(s) * gam + np.sin(s) * N

    def speed(self, theta):
        d = self.ds0(theta)
        if self.sigma == "torus":
            return np.sqrt(1 + d * d)
        return np.sqrt(d * d + np.sin(self.s0(theta)) ** 2)

    def length(self, n=512):
        th = self.period * np.arange(n) / n
        return float(np.sum(self.speed(th)) * self.period / n)


def geodesic_curvature(curve, theta, dtheta=1e-3):
    """kappa = d/ds log |d_theta exp(s N)| at s = 0.

    theta-derivatives by fourth-order differences, the s-derivative by
    complex step.
    """
    theta = np.asarray(theta, dtype=float)
    s = 1e-30j

    def pt(t):
        return curve.exp_normal(t, s + 0 * t)

    d = (-pt(theta + 2 * dtheta) + 8 * pt(theta + dtheta) - 8 * pt(theta - dtheta) + pt(theta - 2 * dtheta)) / (
        12 * dtheta
    )
    ell = np.sqrt(np.sum(d * d, axis=-1))
    return np.imag(ell) / 1e-30 / np.real(ell)


# --- surface fields in the disk chart ----------------------------------------------


def surface_fields(model, Y, Yr, Yp, Yrr, Yrp, Ypp):
    """Geometry of a parametrized surface Y(r, phi) in the disk chart.

    Returns compactified quantities (metric gam, second fundamental form b,
    mean curvature Hbar, unit normal nu) and the physical mean curvature
    H = xi Hbar - 2 nu(xi), which is the residual of the minimal-surface
    equation.  b_ab = -<nu, nabla_a T_b>, normal oriented along T_r x T_phi.
    """
    G, Gi, Gam = christoffel_of(model.disk_metric, Y)
    n = np.cross(Yr, Yp)
    nn = np.sqrt(np.einsum("...i,...ij,...j->...", n, Gi, n))
    if np.any(nn == 0):
        raise SingularSurfaceError("degenerate tangent plane")
    nu_low = n / nn[..., None]
    nu = np.einsum("...ij,...j->...i", Gi, nu_low)
    T = (Yr, Yp)
    Y2 = ((Yrr, Yrp), (Yrp, Ypp))
    gam = np.empty(Y.shape[:-1] + (2, 2))
    b = np.empty(Y.shape[:-1] + (2, 2))
    for i in range(2):
        for j in range(2):
            gam[..., i, j] = np.einsum("...k,...kl,...l->...", T[i], G, T[j])
            acc = Y2[i][j] + np.einsum("...kab,...a,...b->...k", Gam, T[i], T[j])
            b[..., i, j] = -np.einsum("...k,...k->...", nu_low, acc)
    gi = np.linalg.inv(gam)
    Hbar = np.einsum("...ij,...ij->...", gi, b)
    dxi = cs_gradient(model.disk_xi, Y)
    xi = model.disk_xi(Y)
    nuxi = np.einsum("...i,...i->...", nu, dxi)
    H = xi * Hbar - 2 * nuxi
    return {"G": G, "gam": gam, "gam_inv": gi, "b": b, "Hbar": Hbar, "H": H, "xi": xi, "nuxi": nuxi, "nu": nu}


def derivatives(grid, Y):
    Yr = grid.d_r(Y)
    Yp = grid.d_phi(Y)
    return Y, Yr, Yp, grid.d_rr(Y), grid.d_phi(Yr), grid.d_phi(Yp)


def graph_embedding(grid, u, ur, up, urr, urp, upp):
    R, P = grid.R, grid.PHI
    c, s = np.cos(P), np.sin(P)
    z = np.zeros_like(u)
    return (
        np.stack([R * c, R * s, u], -1),
        np.stack([c, s, ur], -1),
        np.stack([-R * s, R * c, up], -1),
        np.stack([z, z, urr], -1),
        np.stack([-s, c, urp], -1),
        np.stack([-R * c, -R * s, upp], -1),
    )


def graph_to_positions(grid, u):
    return np.stack([grid.R * np.cos(grid.PHI), grid.R * np.sin(grid.PHI), u], -1)


@dataclass
class SurfaceGeometry:
    """Per-grid-point geometry in the physical metric (and the compactified normal)."""

    area_element: np.ndarray  # dA_g per dr dphi divided by r
    area_element_bar: np.ndarray
    nu_bar: np.ndarray
    nu_g: np.ndarray
    b: np.ndarray
    H: np.ndarray
    b2: np.ndarray
    b2_traceless: np.ndarray
    xi: np.ndarray
    V: np.ndarray
    grad_V_nu: np.ndarray


def geometry_from_positions(model, grid, Y):
    with np.errstate(divide="ignore", invalid="ignore"):
        return _geometry(model, grid, Y)


def _geometry(model, grid, Y):
    F = surface_fields(model, *derivatives(grid, Y))
    xi, nuxi, gam = F["xi"], F["nuxi"], F["gam"]
    dA_bar = np.sqrt(np.linalg.det(gam)) / grid.R
    bg = (F["b"] - (nuxi / xi)[..., None, None] * gam) / xi[..., None, None]
    # |b|^2_g = |xi bbar - nu(xi) gam|^2 in gbar, finite up to the rim
    m = xi[..., None, None] * F["b"] - nuxi[..., None, None] * gam
    gi = F["gam_inv"]
    b2 = np.einsum("...ij,...jk,...kl,...li->...", gi, m, gi, m)
    b2t = b2 - 0.5 * F["H"] ** 2
    return SurfaceGeometry(
        area_element=dA_bar / xi ** 2,
        area_element_bar=dA_bar,
        nu_bar=F["nu"],
        nu_g=xi[..., None] * F["nu"],
        b=bg,
        H=F["H"],
        b2=b2,
        b2_traceless=b2t,
        xi=xi,
        V=1 / xi,
        grad_V_nu=-nuxi / xi,
    )


# --- the graph surface record ----------------------------------------------------------


@dataclass
class GraphSurface:
    model: object
    curve: BoundaryCurve
    grid: DiskGrid
    Y: np.ndarray
    closure: str = "disk"
    converged: bool = True
    residual: float = 0.0
    history: list = field(default_factory=list)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def theta(self):
        """Curve parameter of each rim column."""
        return self.grid.phi / self.model.disk_k

    def geometry(self):
        if "geometry" not in self._cache:
            self._cache["geometry"] = geometry_from_positions(self.model, self.grid, self.Y)
        return self._cache["geometry"]

    def collar(self):
        if "collar" not in self._cache:
            self._cache["collar"] = extract_u3(self)
        return self._cache["collar"]

    @property
    def u2(self):
        return self.collar().u2

    @property
    def u3(self):
        return self.collar().u3

    @property
    def kappa(self):
        return geodesic_curvature(self.curve, self.theta)

    def with_positions(self, Y):
        return GraphSurface(self.model, self.curve, self.grid, Y, self.closure, True, 0.0, [])


def _check_setup(model, curve, closure):
    if not getattr(model, "has_bulk", False):
        raise ConfigurationError("model %s has no bulk chart for surfaces" % model.kind)
    if curve.sigma != model.sigma:
        raise ConfigurationError("curve lives on a %s, model boundary is a %s" % (curve.sigma, model.sigma))
    if model.sigma == "torus" and abs(curve.period - model.theta_period) > 1e-12:
        raise ConfigurationError("curve period must equal the model theta period")
    if closure != "disk":
        raise ConfigurationError("closure %r unsupported: the graph chart caps surfaces by a disk" % closure)


def rim_heights(model, curve, grid):
    return model.rim_eta(curve.s0(grid.phi / model.disk_k))


def harmonic_extension(grid, rim):
    """Harmonic function on the unit disk with the given rim values."""
    c = np.fft.rfft(rim) / grid.nphi
    k = np.arange(len(c))
    ph = np.exp(1j * np.outer(grid.phi, k))
    w = np.where((k == 0) | ((grid.nphi % 2 == 0) & (k == grid.nphi // 2)), 1.0, 2.0)
    vals = grid.r[:, None, None] ** k[None, None, :] * (c * w)[None, None, :] * ph[None]
    return np.real(vals.sum(-1))


def solve_minimal_graph(model, curve, grid=(16, 32), closure="disk", tol=1e-10, maxit=30, u0=None):
    """Damped Newton for H[u] = 0 with Dirichlet rim data.

    Orthogonality at the rim is not imposed: it is forced by the equation,
    whose leading part degenerates there.  The Jacobian is assembled from
    pointwise difference quotients of H in (u, u_r, u_phi, u_rr, u_rphi,
    u_phiphi) multiplied into the spectral operator matrices.
    """
    _check_setup(model, curve, closure)
    g = grid if isinstance(grid, DiskGrid) else DiskGrid(*grid)
    ops = g.operators()
    nr, m = g.shape
    rim = rim_heights(model, curve, g)
    u = harmonic_extension(g, rim) if u0 is None else np.array(u0, dtype=float)
    u[0] = rim
    inner = slice(m, nr * m)
    keys = ("r", "p", "rr", "rp", "pp")

    def derivs(uf):
        v = uf.ravel()
        return [uf] + [(ops[k] @ v).reshape(g.shape) for k in keys]

    def H_of(d):
        return surface_fields(model, *graph_embedding(g, *d))["H"]

    history = []
    d = derivs(u)
    E = H_of(d)
    res = float(np.abs(E[1:]).max())
    history.append(res)
    for _ in range(maxit):
        if res < tol:
            break
        cols = []
        for k in range(6):
            sc = max(1.0, float(np.abs(d[k]).max())) * PARTIAL_STEP
            dp, dm = list(d), list(d)
            dp[k] = d[k] + sc
            dm[k] = d[k] - sc
            cols.append((H_of(dp) - H_of(dm)) / (2 * sc))
        J = np.diag(cols[0].ravel())
        for c, k in zip(cols[1:], keys):
            J += c.ravel()[:, None] * ops[k]
        du = np.linalg.solve(J[inner, inner], -E.ravel()[inner])
        lam = 1.0
        while True:
            un = u.copy()
            un.ravel()[inner] += lam * du
            dn = derivs(un)
            En = H_of(dn)
            rn = float(np.abs(En[1:]).max())
            if rn < res or lam <= 2.0 ** -20:
                break
            lam *= 0.5
        u, d, E, res = un, dn, En, rn
        history.append(res)
    Y = graph_to_positions(g, u)
    return GraphSurface(model, curve, g, Y, closure, bool(res < tol), res, history)


# --- collar expansion -------------------------------------------------------------------


@dataclass
class CollarExpansion:
    """u(x, theta) = sum_{k>=2} c_k(theta) x^k in the curve-adapted chart.

    In that chart s is the h-distance from the curve along its normal
    geodesics, so the curve itself is {x = 0, s = 0}.
    """

    x: np.ndarray
    theta: np.ndarray
    u: np.ndarray  # (nx, ntheta) sampled s-values
    coeffs: np.ndarray  # (deg - 1, ntheta), powers 2..deg
    kappa: np.ndarray
    ell: np.ndarray  # |gamma'| : dtheta_h = ell dtheta
    fit_residual: float
    r: np.ndarray
    phi: np.ndarray
    period: float

    @property
    def u2(self):
        return self.coeffs[0]

    @property
    def u3(self):
        return self.coeffs[1]

    @property
    def defect(self):
        return self.u2 + self.kappa / 2

    def weights(self):
        return self.ell * self.period / len(self.theta)

    def boundary_integral(self, f):
        return float(np.sum(f * self.weights()))

    def _theta_derivative(self, f):
        k = np.fft.rfftfreq(len(self.theta), 1.0 / len(self.theta)) * TWO_PI / self.period
        fh = np.fft.rfft(f, axis=-1)
        if len(self.theta) % 2 == 0:
            fh[..., -1] = 0
        return np.fft.irfft(1j * k * fh, n=len(self.theta), axis=-1)

    def evaluate(self, x):
        """(u, u_x, u_theta) at the x values given, on the theta grid."""
        x = np.asarray(x, dtype=float)[:, None]
        pw = np.arange(2, 2 + len(self.coeffs))
        u = np.einsum("kt,xk->xt", self.coeffs, x ** pw[None])
        ux = np.einsum("kt,xk->xt", self.coeffs, pw[None] * x ** (pw[None] - 1))
        dc = self._theta_derivative(self.coeffs)
        ut = np.einsum("kt,xk->xt", dc, x ** pw[None])
        return u, ux, ut


def default_collar_nodes(n=24, xmax=0.3):
    return xmax * (1 - np.cos(np.linspace(0, np.pi / 2, n)[1:]))


def adapted_point(surface_or_model, curve, x, theta, s):
    """Disk-chart point of the curve-adapted collar chart (x, theta, s)."""
    model = getattr(surface_or_model, "model", surface_or_model)
    return model.collar_to_chart(x, curve.exp_normal(theta, s))


def extract_u3(surface, xs=None, deg=10, tol=1e-6):
    """Collar graph of a surface: locate Y(r, phi) = P(x, theta, s) and fit in x."""
    model, curve, g = surface.model, surface.curve, surface.grid
    xs = default_collar_nodes() if xs is None else np.asarray(xs, dtype=float)
    th = surface.theta
    X = xs[:, None] * np.ones(len(th))[None]
    TH = np.broadcast_to(th[None], X.shape)
    r = 1 - X / 2
    ph = model.disk_k * TH.copy()
    s = np.zeros_like(X)
    Y = surface.Y
    Yr, Yp = g.d_r(Y), g.d_phi(Y)

    def target(sv):
        return adapted_point(model, curve, X, TH, sv)

    for _ in range(60):
        P = target(s)
        dPs = np.imag(target(s + 1e-30j)) / 1e-30
        res = g.interp(Y, r, ph) - P
        J = np.stack([g.interp(Yr, r, ph), g.interp(Yp, r, ph), -dPs], -1)
        step = np.linalg.solve(J, -res[..., None])[..., 0]
        r, ph, s = r + step[..., 0], ph + step[..., 1], s + step[..., 2]
        if np.abs(res).max() < 1e-14:
            break
    M = np.stack([xs ** k for k in range(2, deg + 1)], -1)
    c, *_ = np.linalg.lstsq(M, s, rcond=None)
    fit_res = float(np.abs(M @ c - s).max())
    kappa = geodesic_curvature(curve, th)
    exp = CollarExpansion(xs, th, s, c, kappa, curve.speed(th), fit_res, r, ph, curve.period)
    if fit_res > tol:
        raise SingularSurfaceError("collar fit residual %.3g above %.3g" % (fit_res, tol))
    return exp


def surface_geometry(model, surface):
    if surface.model is not model:
        surface = GraphSurface(model, surface.curve, surface.grid, surface.Y, surface.closure)
    return surface.geometry()


# --- determinant of the collar parametrization -----------------------------------------


def adapted_metric(model, curve, Z):
    """Physical metric in the curve-adapted chart at real points Z[..., 3]."""

    def amap(W):
        return model.collar_to_chart(W[..., 0], curve.exp_normal(W[..., 1], W[..., 2]))

    J = cs_gradient(amap, Z)
    A = np.real(amap(Z.astype(complex)))
    Gd = model.disk_metric(A)
    xi = model.disk_xi(A)
    return np.einsum("...ai,...ab,...bj->...ij", J, Gd, J) / (xi * xi)[..., None, None]


def collar_determinant(surface, x=None):
    """Det of the physical metric on (d_x, d_theta) of the collar graph, and the literal lower bound.

    The bound compares x^4 Det^2 with f^2 + (1/2) min(inf f^2, 1)(u_x^2 + u_theta^2)
    where f^2 = h(d_theta, d_theta) on the curve.
    """
    col = surface.collar()
    x = col.x[col.x <= 0.1] if x is None else np.asarray(x, dtype=float)
    u, ux, ut = col.evaluate(x)
    TH = np.broadcast_to(col.theta[None], u.shape)
    X = np.broadcast_to(x[:, None], u.shape)
    G = adapted_metric(surface.model, surface.curve, np.stack([X, TH, u], -1))
    t1 = np.stack([np.ones_like(u), np.zeros_like(u), ux], -1)
    t2 = np.stack([np.zeros_like(u), np.ones_like(u), ut], -1)
    g11 = np.einsum("...i,...ij,...j->...", t1, G, t1)
    g22 = np.einsum("...i,...ij,...j->...", t2, G, t2)
    g12 = np.einsum("...i,...ij,...j->...", t1, G, t2)
    det = np.sqrt(g11 * g22 - g12 * g12)
    f2 = col.ell[None] ** 2
    bound = f2 + 0.5 * min(float(f2.min()), 1.0) * (ux ** 2 + ut ** 2)
    margin = X ** 4 * det ** 2 - bound
    return {"x": x, "det": det, "bound": bound, "margin": margin, "sqrt_det_h": col.ell}


# --- serialization ----------------------------------------------------------------------------


def save_surface(surface, path):
    """Write the disk-chart positions with round-trip precision."""
    from .output import write_rows

    c = surface.curve
    meta = {
        "model": surface.model.describe(),
        "curve": {"sigma": c.sigma, "base": c.base, "delta": c.delta, "mode": c.mode, "period": c.period},
        "grid": list(surface.grid.shape),
        "closure": surface.closure,
    }
    rows = []
    g = surface.grid
    for i in range(g.nr):
        for j in range(g.nphi):
            rows.append((i, j, *surface.Y[i, j]))
    write_rows(path, ("i", "j", "a", "b", "eta"), rows, digits=17, meta=meta)


def load_surface(model, path):
    from .output import read_rows

    meta, rows = read_rows(path)
    c = meta["curve"]
    curve = BoundaryCurve(c["sigma"], float(c["base"]), float(c["delta"]), int(c["mode"]), float(c["period"]))
    g = DiskGrid(*meta["grid"])
    Y = np.zeros(g.shape + (3,))
    for row in rows:
        Y[int(row[0]), int(row[1])] = [float(v) for v in row[2:5]]
    return GraphSurface(model, curve, g, Y, meta["closure"])


def collar_table(surface):
    """Rows (x, theta, u, H, |b|^2) on the collar nodes."""
    col = surface.collar()
    geo = surface.geometry()
    g = surface.grid
    H = g.interp(geo.H, col.r, col.phi)
    b2 = g.interp(geo.b2, col.r, col.phi)
    rows = []
    for i, x in enumerate(col.x):
        for j, t in enumerate(col.theta):
            rows.append((x, t, col.u[i, j], H[i, j], b2[i, j]))
    return rows
