"""Truncated power series in x with field-valued coefficients, plus the
extrapolation tools used to read coefficients off sampled functions."""

from fractions import Fraction

import numpy as np

SCALAR = "scalar"
TENSOR = "tensor"


class SingularSeriesError(ZeroDivisionError):
    pass


class ExtractionError(RuntimeError):
    """Extrapolation did not converge; `table` holds the offending table."""

    def __init__(self, message, table=None):
        super().__init__(message)
        self.table = table


class PowerSeries:
    """c_0 + c_1 x + ... + c_N x^N + O(x^(N+1)).

    coeffs has shape (N+1,) + field_shape; tensor series carry two trailing
    axes for the symmetric 2-tensor (or 3x3 block) components.
    """

    def __init__(self, coeffs, kind=SCALAR, order=None):
        c = np.asarray(coeffs, dtype=float)
        if order is None:
            order = c.shape[0] - 1
        if c.shape[0] < order + 1:
            pad = np.zeros((order + 1 - c.shape[0],) + c.shape[1:])
            c = np.concatenate([c, pad])
        self.coeffs = c[: order + 1]
        self.order = int(order)
        if kind not in (SCALAR, TENSOR):
            raise ValueError("kind must be scalar or tensor")
        self.kind = kind

    @classmethod
    def from_list(cls, values, order=None):
        return cls(np.array(values, dtype=float), SCALAR, order)

    def __repr__(self):
        return "PowerSeries(%s, order=%d)" % (self.kind, self.order)

    def __getitem__(self, k):
        return self.coeffs[k]

    def valuation(self):
        for k in range(self.order + 1):
            if np.any(self.coeffs[k] != 0):
                return k
        return self.order + 1

    def __call__(self, x):
        x = np.asarray(x)
        out = np.zeros(np.broadcast(x, self.coeffs[0]).shape) if self.kind == SCALAR else 0.0
        for k in range(self.order, -1, -1):
            out = out * x + self.coeffs[k]
        return out

    def truncate(self, order):
        return PowerSeries(self.coeffs[: min(order, self.order) + 1], self.kind, min(order, self.order))

    def __add__(self, other):
        return series_arith(self, other, "add")

    def __sub__(self, other):
        return series_arith(self, scale(other, -1.0), "add")

    def __mul__(self, other):
        if np.isscalar(other):
            return scale(self, other)
        return series_arith(self, other, "mul")

    __rmul__ = __mul__


def scale(a, c):
    return PowerSeries(a.coeffs * c, a.kind, a.order)


def monomial(k, order, field_shape=()):
    c = np.zeros((order + 1,) + tuple(field_shape))
    if k <= order:
        c[k] = 1.0
    return PowerSeries(c, SCALAR, order)


def _bcast(a, b):
    """Align a scalar-kind coefficient array with a tensor-kind one."""
    if a.kind == SCALAR and b.kind == TENSOR:
        return a.coeffs[..., None, None], b.coeffs
    if a.kind == TENSOR and b.kind == SCALAR:
        return a.coeffs, b.coeffs[..., None, None]
    return a.coeffs, b.coeffs


def _mul(a, b):
    if a.kind == TENSOR and b.kind == TENSOR:
        raise TypeError("tensor series combine with scalar series only")
    va, vb = a.valuation(), b.valuation()
    order = min(a.order + vb, b.order + va)
    ca, cb = _bcast(a, b)
    shape = np.broadcast_shapes(ca.shape[1:], cb.shape[1:])
    out = np.zeros((order + 1,) + shape)
    for i in range(min(a.order, order) + 1):
        for j in range(min(b.order, order - i) + 1):
            out[i + j] = out[i + j] + ca[i] * cb[j]
    kind = TENSOR if TENSOR in (a.kind, b.kind) else SCALAR
    return PowerSeries(out, kind, order)


def _add(a, b):
    if a.kind != b.kind:
        raise TypeError("cannot add scalar and tensor series")
    order = min(a.order, b.order)
    return PowerSeries(a.coeffs[: order + 1] + b.coeffs[: order + 1], a.kind, order)


def _leading(a):
    if a.kind != SCALAR:
        raise TypeError("operation defined for scalar series only")
    c0 = a.coeffs[0]
    if np.any(np.abs(c0) < 1e-300):
        raise SingularSeriesError("leading coefficient vanishes")
    return c0


def _power(a, q):
    """a^q via the binomial series of (1 + g)^q with g = a/c0 - 1."""
    q = Fraction(q).limit_denominator(10 ** 6) if not isinstance(q, Fraction) else q
    c0 = _leading(a)
    g = PowerSeries(a.coeffs / c0, SCALAR, a.order)
    g.coeffs = g.coeffs.copy()
    g.coeffs[0] = 0.0
    N = a.order
    out = np.zeros_like(a.coeffs)
    out[0] = 1.0
    term = monomial(0, N, a.coeffs.shape[1:])
    binom = Fraction(1)
    for k in range(1, N + 1):
        term = _mul(term, g).truncate(N)
        term = PowerSeries(term.coeffs, SCALAR, N)
        binom = binom * (q - k + 1) / k
        out = out + float(binom) * term.coeffs
    with np.errstate(invalid="ignore"):
        lead = np.power(c0, float(q))
    return PowerSeries(out * lead, SCALAR, N)


def _compose(a, b):
    """a(b(x)); b must have vanishing constant term."""
    if b.kind != SCALAR:
        raise TypeError("inner series must be scalar")
    if np.any(b.coeffs[0] != 0):
        raise ValueError("inner series must vanish at x = 0")
    v = b.valuation()
    N = min(v * (a.order + 1) - 1, b.order)
    field = np.broadcast_shapes(a.coeffs.shape[1:-2] if a.kind == TENSOR else a.coeffs.shape[1:], b.coeffs.shape[1:])
    pw = monomial(0, N, field)
    acc = 0.0
    for k in range(a.order + 1):
        ck = a.coeffs[k]
        pc = pw.coeffs[: N + 1]
        acc = acc + (pc[..., None, None] * ck if a.kind == TENSOR else pc * ck)
        pw = _mul(pw, b).truncate(N)
    return PowerSeries(acc, a.kind, N)


def series_arith(a, b=None, op="add", q=None):
    """Apply op in {add, mul, invert, power, compose}.  `q` is the exponent for power."""
    if op == "add":
        return _add(a, b)
    if op == "mul":
        return _mul(a, b)
    if op == "invert":
        return _power(a, Fraction(-1))
    if op == "power":
        return _power(a, Fraction(q) if not isinstance(q, float) else q)
    if op == "compose":
        return _compose(a, b)
    raise ValueError("unknown series operation %r" % op)


# --- coefficient extraction ----------------------------------------------------


def richardson(values, steps, powers):
    """Richardson table for values[k] ~ A + sum_j a_j steps[k]**powers[j].

    Returns (table, best, error_estimate, corrections).  table[i][j]
    eliminates the first j powers using entries i..i+j; the best entry is
    the last diagonal entry before the corrections stop shrinking.
    """
    values = [np.asarray(v, dtype=float) for v in values]
    n = len(values)
    table = [[values[i]] for i in range(n)]
    for j in range(1, n):
        p = powers[j - 1]
        for i in range(n - j):
            r = (steps[i] / steps[i + 1]) ** p
            fine, coarse = table[i + 1][j - 1], table[i][j - 1]
            table[i].append(fine + (fine - coarse) / (r - 1))
    diag = [table[0][j] for j in range(n)]
    errs = [np.max(np.abs(diag[j] - diag[j - 1])) for j in range(1, n)]
    k = 1
    while k < len(errs) and errs[k] < errs[k - 1]:
        k += 1
    return table, diag[k], errs[k - 1], errs


def check_convergence(errs, floor, table=None, label="extrapolation"):
    """Successive corrections must shrink by >= 2 until they reach the noise floor."""
    for a, b in zip(errs[:-1], errs[1:]):
        if a <= floor:
            break
        if b > a / 2 and b > floor:
            raise ExtractionError("%s does not converge (%.3g -> %.3g)" % (label, a, b), table)


def stencil_coefficients(f, N=4, h0=0.1, halvings=3, m=4, noise=1e-12):
    """Taylor coefficients c_0..c_N at x = 0 of an analytic function f(x).

    f is sampled on symmetric stencils {j h : |j| <= m}; each stencil gives
    coefficient estimates by exact polynomial interpolation, whose errors
    are even power series in h.  Richardson elimination in h^2 across the
    step halvings h_k = h0 2^-k removes them.  f must accept an array of x
    values (shape (2m+1,)) and return (2m+1,) + field_shape.
    """
    if N > 2 * m:
        raise ValueError("stencil too small for requested order")
    j = np.arange(-m, m + 1, dtype=float)
    A = np.vander(j, 2 * m + 1, increasing=True)
    Ainv = np.linalg.inv(A)
    hs = [h0 * 2.0 ** -k for k in range(halvings + 1)]
    est = []
    for h in hs:
        vals = np.asarray(f(j * h))
        c = np.tensordot(Ainv, vals, axes=(1, 0))
        scalef = (h ** -np.arange(2 * m + 1)).reshape((-1,) + (1,) * (vals.ndim - 1))
        est.append((c * scalef)[: N + 1])
    out = []
    errs_all = []
    tables = []
    for k in range(N + 1):
        first = 2 * m + 1 + ((2 * m + 1 - k) % 2)  # lowest absent monomial of the same parity
        p0 = first - k
        powers = [p0 + 2 * i for i in range(halvings)]
        tab, best, err, errs = richardson([e[k] for e in est], hs, powers)
        scale_k = max(1.0, float(np.max(np.abs(best))))
        check_convergence(errs, noise * scale_k / hs[-1] ** k, tab, "order-%d coefficient" % k)
        out.append(best)
        errs_all.append(err)
        tables.append(tab)
    return np.array(out), np.array(errs_all), tables


def halving_ladder(x0=0.1, K=6):
    return x0 * 2.0 ** -np.arange(K + 1)
