"""Normal flows of surfaces in a static background and the variation checks built on them.

Time t is measured so that the static flow d/dt Phi = V nu_g moves points
with unit speed in the compactified metric: V nu_g = nu_bar.
"""

from dataclasses import dataclass, field

import numpy as np

from .geometry import geodesic_rhs, rk4_step
from .renarea import DEFAULT_LADDER, FitError, _xi_threshold, renormalized_area, weighted_integral
from .surfaces import (
    ConfigurationError,
    SingularSurfaceError,
    derivatives,
    geometry_from_positions,
    harmonic_extension,
    surface_fields,
)

GEODESIC = "geodesic"
RENORMALIZED = "renormalized"
H_MAX = 0.0025  # largest RK4 step in t
EVOLUTION_CUT = 0.04  # pointwise checks use xi above this value
H_CUTOFF = 1e-2  # mean curvature of a solved surface is solver noise near the rim


@dataclass
class Generator:
    """phi = psi V with psi the harmonic extension of phi_m1 over the disk.

    phi_m1 is sampled on the rim columns; None means the static generator psi = 1.
    """

    phi_m1: np.ndarray = None

    @property
    def kind(self):
        return "static" if self.phi_m1 is None else "general"

    def psi(self, grid):
        if self.phi_m1 is None:
            return np.ones(grid.shape)
        rim = np.asarray(self.phi_m1, dtype=float)
        if rim.shape != (grid.nphi,):
            raise ConfigurationError("phi_m1 needs one value per rim column")
        return harmonic_extension(grid, rim)

    def rim(self, grid):
        return np.ones(grid.nphi) if self.phi_m1 is None else np.asarray(self.phi_m1, dtype=float)


STATIC = Generator()


def _as_generator(generator):
    if generator is None or generator == "static":
        return STATIC
    if isinstance(generator, Generator):
        return generator
    raise ConfigurationError("generator must be 'static' or a Generator")


@dataclass
class FlowFamily:
    times: np.ndarray
    surfaces: list
    generator: Generator
    transport_mode: str
    orientation: float  # +1 if the solver normal points toward increasing s at the rim
    representable: np.ndarray = None
    messages: list = field(default_factory=list)

    def complete(self):
        return bool(np.all(self.representable))


def orientation_sign(surface):
    """Sign making the compactified normal point toward increasing s along the curve."""
    model, curve, g = surface.model, surface.curve, surface.grid
    F = surface_fields(model, *derivatives(g, surface.Y))
    th = surface.theta

    def rim_point(s):
        return model.collar_to_chart(np.zeros_like(th), curve.exp_normal(th, s))

    with np.errstate(divide="ignore", invalid="ignore"):
        ds = np.imag(rim_point(1e-30j * np.ones_like(th))) / 1e-30
    dot = np.einsum("ti,tij,tj->t", F["nu"][0], F["G"][0], ds)
    return 1.0 if np.mean(dot) > 0 else -1.0


def _normal(model, grid, Y, sign):
    return sign * surface_fields(model, *derivatives(grid, Y))["nu"]


def _steps(dt):
    return max(1, int(np.ceil(abs(dt) / H_MAX - 1e-12)))


def _representable(model, grid, Y):
    try:
        with np.errstate(all="ignore"):
            F = surface_fields(model, *derivatives(grid, Y))
    except (SingularSurfaceError, np.linalg.LinAlgError):
        return False
    ok = np.all(np.isfinite(F["H"][1:])) and np.all(np.linalg.det(F["gam"][1:]) > 0)
    return bool(ok and np.min(F["xi"]) > -1e-8)


def transport(model, F0, times, generator=STATIC, mode=GEODESIC, sign=None):
    """Positions of F0 flowed to each time (any sign, any order).

    Returns (positions, representable flags).
    """
    g = F0.grid
    gen = _as_generator(generator)
    sign = orientation_sign(F0) if sign is None else sign
    psi = gen.psi(g)[..., None]
    nu0 = _normal(model, g, F0.Y, sign)
    times = np.asarray(times, dtype=float)
    out = [None] * len(times)
    flags = np.ones(len(times), dtype=bool)
    metric = model.disk_metric
    rhs2 = lambda Y, V: geodesic_rhs(metric, Y, V)

    def rhs1(Y):
        return psi * _normal(model, g, Y, sign)

    for direction in (1.0, -1.0):
        idx = [i for i in np.argsort(direction * times, kind="stable") if direction * times[i] >= 0]
        if direction < 0:
            idx = [i for i in idx if times[i] != 0]
        Y, V, t, alive = F0.Y.copy(), psi * nu0, 0.0, True
        for i in idx:
            dt = times[i] - t
            n = _steps(dt) if dt != 0 else 0
            h = dt / n if n else 0.0
            for _ in range(n):
                if not alive:
                    break
                try:
                    with np.errstate(all="ignore"):
                        if mode == GEODESIC:
                            Y, V = rk4_step(rhs2, Y, V, h)
                        else:
                            k1 = rhs1(Y)
                            k2 = rhs1(Y + 0.5 * h * k1)
                            k3 = rhs1(Y + 0.5 * h * k2)
                            k4 = rhs1(Y + h * k3)
                            Y = Y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
                except (SingularSurfaceError, np.linalg.LinAlgError):
                    alive = False
                if alive and not np.all(np.isfinite(Y)):
                    alive = False
            t = times[i]
            alive = alive and _representable(model, g, Y)
            flags[i] = alive
            out[i] = Y.copy() if alive else None
    return out, flags


def flow_integrate(model, F0, generator="static", T=0.04, K=4, mode=GEODESIC, times=None):
    """Family F_t at t_k = k T / K (or at the given times)."""
    if mode not in (GEODESIC, RENORMALIZED):
        raise ConfigurationError("transport mode must be %r or %r" % (GEODESIC, RENORMALIZED))
    if F0.model is not model:
        raise ConfigurationError("surface belongs to a different model")
    gen = _as_generator(generator)
    ts = np.linspace(0.0, T, K + 1) if times is None else np.asarray(times, dtype=float)
    sign = orientation_sign(F0)
    Ys, flags = transport(model, F0, ts, gen, mode, sign)
    surfaces = [F0 if t == 0 else (F0.with_positions(Y) if Y is not None else None) for t, Y in zip(ts, Ys)]
    msgs = ["surface left graph representability at t = %.6g" % t for t, ok in zip(ts, flags) if not ok]
    return FlowFamily(ts, surfaces, gen, mode, sign, flags, msgs)


@dataclass
class CurvePoint:
    t: float
    fit: object  # RenAFit or None
    error: str = ""


def rena_curve(model, family, ladder=DEFAULT_LADDER, order=3):
    """RenA(F_t) with a shared ladder; failures are recorded per time."""
    pts = []
    for t, S in zip(family.times, family.surfaces):
        if S is None:
            pts.append(CurvePoint(float(t), None, "not representable"))
            continue
        try:
            pts.append(CurvePoint(float(t), renormalized_area(model, S, ladder, order)))
        except FitError as exc:
            pts.append(CurvePoint(float(t), None, str(exc)))
    return pts


def monotonicity(points):
    """Largest increase of RenA between consecutive times (<= 0 means non-increasing)."""
    vals = [p.fit.c for p in points if p.fit is not None]
    if len(vals) < 2:
        return float("nan")
    return float(np.max(np.diff(vals)))


# --- integrals on the initial surface ---------------------------------------------------


@dataclass
class BulkIntegral:
    value: float
    tail: float  # extrapolated contribution of the collar beyond the cutoff
    truncated: float


def bulk_integral(surface, field_values, power, decay, cutoff=2e-3):
    """Integral of f xi^-power dAbar for a field with f = O(xi^decay) at the rim.

    The surface is truncated at the collar cutoff and at half of it; the
    remainder beyond the cutoff scales like eps^(decay + 1 - power) and is
    removed by one Richardson step.  Rim values of fields that vanish
    there only up to the solver tolerance would swamp an integral taken
    all the way out, hence the truncation.
    """
    q = decay + 1 - power
    if q <= 0:
        raise ValueError("integral diverges at the boundary")
    g = surface.grid
    F = surface_fields(surface.model, *derivatives(g, surface.Y))
    sqrt_det = np.sqrt(np.linalg.det(F["gam"])) / g.R
    I = [
        float(weighted_integral(g, [field_values], F["xi"], sqrt_det, _xi_threshold(surface.model, e), power)[0])
        for e in (cutoff, cutoff / 2)
    ]
    tail = (I[1] - I[0]) / (2 ** q - 1)
    return BulkIntegral(I[1] + tail, abs(tail), I[1])


def neumann_density(model, curve, theta):
    """tr_h h3 + h3(N, N) along the curve, N its h-unit normal."""
    s0, d = curve.s0(theta), curve.ds0(theta)
    h, h3 = model.boundary_tensors(theta, s0)
    hinv = np.linalg.inv(h)
    n = np.stack([-d, np.ones_like(d)], -1)  # conormal of the curve (theta, s0(theta))
    N = np.einsum("...ij,...j->...i", hinv, n)
    N = N / np.sqrt(np.einsum("...i,...i->...", N, n))[..., None]
    tr = np.einsum("...ij,...ij->...", hinv, h3)
    return tr + np.einsum("...i,...ij,...j->...", N, h3, N)


# --- finite differences of RenA -----------------------------------------------------------


def _rena_at(model, F0, times, generator, mode, ladder, order):
    fam = flow_integrate(model, F0, generator, times=times, mode=mode)
    if not fam.complete():
        raise SingularSurfaceError("; ".join(fam.messages))
    pts = rena_curve(model, fam, ladder, order)
    bad = [p for p in pts if p.fit is None]
    if bad:
        raise FitError("RenA fit failed at t = %.6g: %s" % (bad[0].t, bad[0].error))
    return {float(p.t): p.fit.c for p in pts}


@dataclass
class VariationReport:
    fd_first: float = float("nan")
    fd_first_steps: dict = field(default_factory=dict)  # step -> symmetric difference quotient
    fd_first_order: float = float("nan")
    fd_first_error: float = float("nan")
    formula_first: float = float("nan")
    first_terms: dict = field(default_factory=dict)
    first_rel_error: float = float("nan")
    inconclusive: bool = False
    fd_second: float = float("nan")
    fd_second_steps: dict = field(default_factory=dict)
    fd_second_error: float = float("nan")
    second_terms: dict = field(default_factory=dict)
    formula_second_variants: dict = field(default_factory=dict)
    variant_errors: dict = field(default_factory=dict)
    matches: list = field(default_factory=list)
    match: str = None
    boundary_coefficient_fit: float = float("nan")


NOISE = 1e-9  # RenA values agree to roughly this level between nearby fits
ABS_FLOOR = 1e-4  # relative errors are measured against at least this scale


def first_variation_check(model, F0, generator="static", delta=1e-2, mode=GEODESIC, ladder=DEFAULT_LADDER, order=3, report=None):
    """Symmetric difference quotients at steps delta, delta/2, delta/4 against the boundary formula."""
    gen = _as_generator(generator)
    rep = report or VariationReport()
    hs = [delta, delta / 2, delta / 4]
    R = _rena_at(model, F0, sorted({s * h for h in hs for s in (1, -1)}), gen, mode, ladder, order)
    D = [(R[h] - R[-h]) / (2 * h) for h in hs]
    rep.fd_first_steps = {h: d for h, d in zip(hs, D)}
    e1, e2 = abs(D[0] - D[1]), abs(D[1] - D[2])
    floor = NOISE / hs[-1]
    if e2 <= floor:
        rep.fd_first_order = float("inf")
    else:
        rep.fd_first_order = float(np.log2(e1 / e2)) if e1 > 0 else float("nan")
    rep.fd_first = D[2] + (D[2] - D[1]) / 3
    rep.fd_first_error = e2 / 3 + floor
    # either the quotients do not settle, or the noise floor swamps the derivative
    rep.inconclusive = (e2 > floor and not rep.fd_first_order >= 1.5) or rep.fd_first_error > max(abs(rep.fd_first), ABS_FLOOR)

    geo = F0.geometry()
    psi = gen.psi(F0.grid)
    bulk = bulk_integral(F0, psi * orientation_sign(F0) * geo.H, 3, decay=3, cutoff=H_CUTOFF)
    col = F0.collar()
    bnd = -3 * col.boundary_integral(col.u3 * gen.rim(F0.grid))
    rep.first_terms = {"bulk_phi_H": bulk.value, "bulk_tail": bulk.tail, "boundary_u3": bnd}
    rep.formula_first = bulk.value + bnd
    scale = max(abs(rep.formula_first), abs(rep.fd_first), ABS_FLOOR)
    rep.first_rel_error = abs(rep.fd_first - rep.formula_first) / scale
    return rep


VARIANTS = ("k3_V", "k3_V2", "k1_V", "k1_V2")


def second_variation_terms(model, F0):
    """Bulk and boundary integrals entering the candidate second-variation formulas."""
    geo = F0.geometry()
    I1 = bulk_integral(F0, geo.b2, 3, decay=4)
    I2 = bulk_integral(F0, geo.b2, 4, decay=4)
    col = F0.collar()
    K = col.boundary_integral(col.kappa * col.u3)
    N = col.boundary_integral(neumann_density(model, F0.curve, col.theta))
    return {"V_b2": I1.value, "V_b2_tail": I1.tail, "V2_b2": I2.value, "V2_b2_tail": I2.tail, "kappa_u3": K, "neumann": N}


def variant_values(terms):
    """Candidates -int V^p |b|^2 - k int kappa u3 + w int (tr h3 + h3(N, N)); keys name k and V^p."""
    I1, I2, K, N = terms["V_b2"], terms["V2_b2"], terms["kappa_u3"], terms["neumann"]
    return {
        "k3_V": -I1 - 3 * K + 0.75 * N,
        "k3_V2": -I2 - 3 * K + 0.75 * N,
        "k1_V": -I1 - K + N,
        "k1_V2": -I2 - K + N,
    }


def second_variation_check(model, F0, delta=1e-2, mode=GEODESIC, ladder=DEFAULT_LADDER, order=3, rel_tol=0.05, abs_floor=ABS_FLOOR, report=None):
    """Five-point second differences at steps delta and delta/2, Richardson-combined."""
    rep = report or VariationReport()
    hs = [delta, delta / 2]
    R = _rena_at(model, F0, sorted({0.0} | {s * k * h for h in hs for s in (1, -1) for k in (1, 2)}), STATIC, mode, ladder, order)

    def d2(h):
        return (-R[2 * h] + 16 * R[h] - 30 * R[0.0] + 16 * R[-h] - R[-2 * h]) / (12 * h * h)

    D = [d2(h) for h in hs]
    rep.fd_second_steps = {h: d for h, d in zip(hs, D)}
    rep.fd_second = D[1] + (D[1] - D[0]) / 15
    rep.fd_second_error = abs(D[1] - D[0]) / 15 + 16 * NOISE / hs[-1] ** 2
    rep.second_terms = second_variation_terms(model, F0)
    rep.formula_second_variants = variant_values(rep.second_terms)
    tol = rel_tol * abs(rep.fd_second) + abs_floor
    rep.variant_errors = {}
    rep.matches = []
    for name, v in rep.formula_second_variants.items():
        err = abs(v - rep.fd_second)
        rep.variant_errors[name] = err / abs(rep.fd_second) if abs(rep.fd_second) > abs_floor else err
        # stable: the coarser step must agree as well
        if err <= tol and abs(v - D[0]) <= rel_tol * abs(D[0]) + abs_floor:
            rep.matches.append(name)
    rep.match = rep.matches[0] if len(rep.matches) == 1 else None
    K = rep.second_terms["kappa_u3"]
    if abs(K) > 1e-8:
        rep.boundary_coefficient_fit = (rep.fd_second + rep.second_terms["V2_b2"] - rep.second_terms["neumann"]) / K
    return rep


# --- pointwise laws along a family ------------------------------------------------------


def _time_derivative(values, times, k):
    """d/dt at times[k] from a uniform family: 5-point if possible, else 3-point."""
    dt = np.diff(times)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0):
        raise ConfigurationError("family times must be uniformly spaced")
    h = dt[0]
    if 2 <= k <= len(times) - 3:
        return (values[k - 2] - 8 * values[k - 1] + 8 * values[k + 1] - values[k + 2]) / (12 * h)
    if 1 <= k <= len(times) - 2:
        return (values[k + 1] - values[k - 1]) / (2 * h)
    raise ConfigurationError("need neighbours on both sides of the evaluation time")


def _family_fields(model, family):
    if family.generator.kind != "static":
        raise ConfigurationError("pointwise laws are stated for the static generator")
    if len(family.times) < 3 or not family.complete():
        raise ConfigurationError("need at least three representable times")
    g = family.surfaces[0].grid
    out = []
    for S in family.surfaces:
        geo = geometry_from_positions(model, g, S.Y)
        out.append(geo)
    return out


@dataclass
class PointwiseReport:
    times: np.ndarray  # times at which the law was checked
    residual: np.ndarray  # per checked time, max over the mask
    field: np.ndarray  # residual field at the central time
    mask: np.ndarray

    @property
    def max_residual(self):
        return float(np.max(self.residual)) if len(self.residual) else 0.0

    @property
    def min_margin(self):
        return float(np.min(self.residual)) if len(self.residual) else 0.0


def _interior_indices(times):
    n = len(times)
    return list(range(2, n - 2)) if n >= 5 else list(range(1, n - 1))


def mean_curvature_evolution_check(model, family, cut=EVOLUTION_CUT):
    """max |dH/dt - (-V |b|^2 + H g(grad V, nu))| at material points with xi > cut."""
    geos = _family_fields(model, family)
    sgn = family.orientation
    H = np.array([sgn * geo.H for geo in geos])
    res, fields, masks = [], [], []
    for k in _interior_indices(family.times):
        geo = geos[k]
        with np.errstate(invalid="ignore"):  # rim row: V is infinite there and masked out
            rhs = -geo.V * geo.b2 + H[k] * sgn * geo.grad_V_nu
            diff = np.abs(_time_derivative(H, family.times, k) - rhs)
        mask = geo.xi > cut
        res.append(float(np.max(diff[mask])))
        fields.append(diff)
        masks.append(mask)
    mid = len(fields) // 2
    return PointwiseReport(family.times[_interior_indices(family.times)], np.array(res), fields[mid], masks[mid])


def riccati_check(model, family, cut=EVOLUTION_CUT):
    """margin = -(1/2)(H/V)^2 - (1/V) d/dt(H/V) at material points with xi > cut; min over the mask."""
    geos = _family_fields(model, family)
    for geo in geos:
        if np.any(geo.xi[1:] <= 0):
            raise ConfigurationError("static potential must be positive on every surface")
    sgn = family.orientation
    Q = np.array([sgn * geo.H / geo.V for geo in geos])
    res, fields, masks = [], [], []
    for k in _interior_indices(family.times):
        geo = geos[k]
        margin = -0.5 * Q[k] ** 2 - _time_derivative(Q, family.times, k) / geo.V
        mask = geo.xi > cut
        res.append(float(np.min(margin[mask])))
        fields.append(margin)
        masks.append(mask)
    mid = len(fields) // 2
    return PointwiseReport(family.times[_interior_indices(family.times)], np.array(res), fields[mid], masks[mid])
