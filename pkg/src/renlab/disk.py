"""Spectral collocation on the unit disk.

Chebyshev in the radius (the diameter [-1, 1] folded onto [0, 1]) times
Fourier in the angle.  An odd number of Chebyshev points keeps the centre
off the grid, so polar formulas never divide by zero.  Row 0 of every field
is the rim r = 1.
"""

import numpy as np


def cheb(n):
    """Chebyshev points cos(j pi / n) and the differentiation matrix."""
    if n == 0:
        return np.zeros((1, 1)), np.ones(1)
    x = np.cos(np.pi * np.arange(n + 1) / n)
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n + 1)
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return D, x


def fourier_diff(m):
    """First derivative matrix on m equispaced periodic points (m even)."""
    if m % 2:
        raise ValueError("angular resolution must be even")
    h = 2 * np.pi / m
    k = np.arange(m)
    col = np.zeros(m)
    col[1:] = 0.5 * (-1.0) ** k[1:] / np.tan(k[1:] * h / 2)
    idx = (k[:, None] - k[None, :]) % m
    return col[idx]


def _bary_weights(n):
    w = (-1.0) ** np.arange(n + 1)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


class DiskGrid:
    """Tensor grid of nr radii in (0, 1] and nphi angles in [0, 2 pi)."""

    def __init__(self, nr, nphi):
        if nphi % 2:
            raise ValueError("nphi must be even")
        self.nr = nr
        self.nphi = nphi
        self.N = 2 * nr - 1
        D, x = cheb(self.N)
        self.x_full = x
        self.r = x[:nr].copy()
        self.phi = 2 * np.pi * np.arange(nphi) / nphi
        D2 = D @ D
        self._D = (D[:nr, :nr], D[:nr, nr:][:, ::-1])
        self._DD = (D2[:nr, :nr], D2[:nr, nr:][:, ::-1])
        self.Dphi = fourier_diff(nphi)
        self.half = nphi // 2
        self._w = _bary_weights(self.N)
        self.R, self.PHI = np.meshgrid(self.r, self.phi, indexing="ij")

    @property
    def shape(self):
        return (self.nr, self.nphi)

    def _flip(self, f):
        return np.roll(f, -self.half, axis=1)

    def d_r(self, f):
        A, B = self._D
        return np.einsum("ij,j...->i...", A, f) + np.einsum("ij,j...->i...", B, self._flip(f))

    def d_rr(self, f):
        A, B = self._DD
        return np.einsum("ij,j...->i...", A, f) + np.einsum("ij,j...->i...", B, self._flip(f))

    def d_phi(self, f):
        return np.einsum("ij,aj...->ai...", self.Dphi, f)

    def extended(self, f):
        """Values on the full diameter for every angle column, shape (N+1, nphi, ...)."""
        return np.concatenate([f, self._flip(f)[::-1]], axis=0)

    def operators(self):
        """Dense matrices acting on fields flattened in C order."""
        m = self.nphi
        I = np.eye(m)
        P = np.roll(I, -self.half, axis=1)
        Dr = np.kron(self._D[0], I) + np.kron(self._D[1], P)
        Drr = np.kron(self._DD[0], I) + np.kron(self._DD[1], P)
        Dp = np.kron(np.eye(self.nr), self.Dphi)
        return {"r": Dr, "rr": Drr, "p": Dp, "pp": Dp @ Dp, "rp": Dr @ Dp}

    def interp_r(self, f, rq):
        """Interpolate in r along each grid angle.

        f has shape (nr, nphi, ...); rq has shape (q, nphi) with entries in
        [-1, 1].  Returns values of shape (q, nphi, ...).
        """
        fe = self.extended(f)
        xs = self.x_full
        diff = rq[:, None, :] - xs[None, :, None]
        exact = diff == 0.0
        diff = np.where(exact, 1.0, diff)
        c = self._w[None, :, None] / diff
        c = np.where(exact.any(axis=1, keepdims=True), exact.astype(float), c)
        c = c / c.sum(axis=1, keepdims=True)
        return np.einsum("qjk,jk...->qk...", c, fe)

    def interp(self, f, rq, phiq):
        """Interpolate at scattered points (rq in [0, 1], phiq any angle)."""
        rq = np.asarray(rq, dtype=float)
        phiq = np.asarray(phiq, dtype=float)
        shp = rq.shape
        rq = rq.ravel()
        phiq = phiq.ravel()
        fe = self.extended(f)
        xs = self.x_full
        diff = rq[:, None] - xs[None, :]
        exact = diff == 0.0
        diff = np.where(exact, 1.0, diff)
        c = self._w[None, :] / diff
        c = np.where(exact.any(axis=1, keepdims=True), exact.astype(float), c)
        c = c / c.sum(axis=1, keepdims=True)
        cols = np.einsum("qj,jk...->qk...", c, fe)
        m = self.nphi
        k = np.fft.fftfreq(m, 1.0 / m)
        coef = np.fft.fft(cols, axis=1) / m
        if m % 2 == 0:
            coef[:, m // 2] *= 0.5
            k = np.concatenate([k, [m // 2]])
            coef = np.concatenate([coef, coef[:, m // 2 : m // 2 + 1]], axis=1)
        ph = np.exp(1j * phiq[:, None] * k[None, :])
        ph = ph.reshape(ph.shape + (1,) * (coef.ndim - 2))
        out = np.real(np.sum(coef * ph, axis=1))
        return out.reshape(shp + f.shape[2:])

    def gauss_r(self, n):
        """Gauss-Legendre nodes and weights on [0, 1]."""
        t, w = np.polynomial.legendre.leggauss(n)
        return 0.5 * (t + 1), 0.5 * w

    def integrate(self, f, n_gauss=None):
        """Integral of f r dr dphi over the disk, f a smooth field."""
        n = n_gauss or 2 * self.nr
        rg, wg = self.gauss_r(n)
        rq = np.broadcast_to(rg[:, None], (n, self.nphi))
        vals = self.interp_r(f, rq)
        return float(np.einsum("q,qk->", wg * rg, vals) * 2 * np.pi / self.nphi)
