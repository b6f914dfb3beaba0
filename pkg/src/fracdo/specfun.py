"""Special functions: reciprocal gamma, Bessel J0/J1, Wright and Mittag-Leffler.

The Wright function is only needed on the ray ``phi(-alpha, rho; -x)`` with
``x >= 0``.  Small arguments use the power series in double precision.  For
larger arguments the series cancels catastrophically, so the members of the
family that the solvers use (rho in {1, 1-alpha, 0, 1-2alpha, -alpha, 2}) go
through a positive integral representation (see :mod:`fracdo._core_py`).  Any
other rho uses a Hankel loop through the real saddle point once that saddle lies
beyond 1, and the series otherwise, promoted to mpmath precision when the term
envelope says double precision cannot meet the tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate, special as sc

from . import _backend

__all__ = [
    "ConvergenceError",
    "WrightParams",
    "MittagLefflerParams",
    "gamma_recip",
    "bessel_j",
    "wright_phi",
    "wright_neg",
    "wright_neg_scaled",
    "mittag_leffler",
    "ml_array",
    "family_kind",
    "SERIES_SWITCH",
    "WrightTable",
]

_EPS = np.finfo(float).eps

#: below this argument the double-precision series is used for every rho
SERIES_SWITCH = 0.5


class ConvergenceError(ArithmeticError):
    """A series or iteration did not reach its tolerance."""


@dataclass(frozen=True)
class WrightParams:
    """Arguments of phi(beta, rho; z) on the supported range."""

    beta: float
    rho: float
    z: float

    def __post_init__(self):
        if not (-1.0 < self.beta <= 0.0):
            raise ValueError(f"beta must lie in (-1, 0], got {self.beta}")
        if not self.z <= 0.0:
            raise ValueError(f"only z <= 0 is supported, got {self.z}")


@dataclass(frozen=True)
class MittagLefflerParams:
    """Arguments of E_rho(z; mu) = sum_k z**k / Gamma(mu + rho k)."""

    rho: float
    mu: float
    z: complex

    def __post_init__(self):
        if not (0.0 < self.rho <= 1.0):
            raise ValueError(f"rho must lie in (0, 1], got {self.rho}")


def gamma_recip(x):
    """1/Gamma(x); exactly zero at the non-positive integers."""
    out = sc.rgamma(np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def bessel_j(order, z):
    """J0 or J1 of a non-negative real argument."""
    if order not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {order}")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("bessel_j expects z >= 0")
    out = sc.j0(z) if order == 0 else sc.j1(z)
    return float(out) if np.ndim(out) == 0 else out


def _log_rgamma(y):
    """log|1/Gamma(y)| and its sign; sign 0 at the poles of Gamma."""
    y = np.asarray(y, dtype=float)
    la = np.empty_like(y)
    sg = np.ones_like(y)
    pos = y > 0
    la[pos] = -sc.gammaln(y[pos])
    neg = ~pos
    if neg.any():
        yn = y[neg]
        r = yn - 2.0 * np.round(0.5 * yn)
        s = np.sin(np.pi * r)
        pole = yn == np.round(yn)
        with np.errstate(divide="ignore"):
            la[neg] = sc.gammaln(1.0 - yn) + np.log(np.abs(s)) - np.log(np.pi)
        sg[neg] = np.where(pole, 0.0, np.sign(s))
        la[neg] = np.where(pole, -np.inf, la[neg])
    return la, sg


def family_kind(alpha, rho):
    """Name of the integral-representation kind for (alpha, rho), or None."""
    for kind in _backend.KINDS:
        if abs(_backend.kind_rho(alpha, kind) - rho) <= 4 * _EPS * max(1.0, abs(rho)):
            return kind
    return None


def _neumaier(terms):
    """Compensated sum along axis 0."""
    s = np.zeros(terms.shape[1:], dtype=terms.dtype)
    c = np.zeros_like(s)
    for t in terms:
        u = s + t
        big = np.abs(s) >= np.abs(t)
        c += np.where(big, (s - u) + t, (t - u) + s)
        s = u
    return s + c


def _series_logterms(alpha, rho, lx, k):
    la, sg = _log_rgamma(rho - alpha * k)
    with np.errstate(invalid="ignore"):
        lt = np.where(k[:, None] == 0, 0.0, k[:, None] * lx[None, :]) - sc.gammaln(k + 1)[:, None] + la[:, None]
    return lt, sg


def _series_terms_needed(alpha, rho, lx, tol, max_terms):
    """Smallest K such that every row has passed its peak and decayed below tol * eps."""
    K = 64
    while True:
        k = np.arange(K + 1, dtype=float)
        lt, _ = _series_logterms(alpha, rho, lx, k)
        lt = np.where(np.isfinite(lt), lt, -np.inf)
        peak = lt.max(axis=0)
        # envelope of the tail: the last terms must be negligible and decreasing
        tail = lt[-8:].max(axis=0)
        floor = np.minimum(np.log(tol) + np.log(_EPS), peak + np.log(_EPS)) - 5.0
        env_k = k[-8] * lx - sc.gammaln(k[-8] + 1) + sc.gammaln(max(alpha * k[-8] - rho, 0.0) + 1)
        if np.all((tail < floor) | ~np.isfinite(tail)) and np.all((env_k < floor + 5.0) | np.isneginf(env_k)):
            return K, peak
        if K >= max_terms:
            raise ConvergenceError(f"Wright series needs more than {max_terms} terms")
        K = min(2 * K, max_terms)


def _wright_series_double(alpha, rho, x, tol, max_terms):
    lx = np.log(np.where(x > 0, x, 1.0))
    lx = np.where(x > 0, lx, -np.inf)
    K, peak = _series_terms_needed(alpha, rho, lx, tol, max_terms)
    k = np.arange(K + 1, dtype=float)
    lt, sg = _series_logterms(alpha, rho, lx, k)
    sign_x = np.where(k % 2 == 0, 1.0, -1.0)
    with np.errstate(invalid="ignore"):
        terms = np.where(np.isfinite(lt), sign_x[:, None] * sg[:, None] * np.exp(lt), 0.0)
    err = np.exp(peak) * _EPS * math.sqrt(K + 1)
    return _neumaier(terms), err


def _wright_series_mp(alpha, rho, x, tol, max_terms, peak_log):
    digits = int(max(0.0, peak_log / math.log(10.0))) + int(-math.log10(tol)) + 10
    with mpmath.workdps(max(30, digits)):
        a = mpmath.mpf(alpha)
        r = mpmath.mpf(rho)
        z = -mpmath.mpf(x)
        thresh = mpmath.mpf(tol) * mpmath.mpf(10) ** -6
        s = mpmath.mpf(0)
        zk = mpmath.mpf(1)
        fact = mpmath.mpf(1)
        past_peak = False
        prev = None
        for k in range(max_terms):
            if k > 0:
                zk *= z
                fact *= k
            t = zk * mpmath.rgamma(r - a * k) / fact
            s += t
            mag = abs(zk / fact) * abs(mpmath.gamma(a * k - r + 1)) if a * k - r + 1 > 0 else abs(t)
            if prev is not None and mag < prev:
                past_peak = True
            prev = mag
            if past_peak and mag < thresh:
                return float(s)
    raise ConvergenceError(f"Wright series at x={x} did not converge in {max_terms} terms")


def wright_neg(alpha, rho, x, tol=1e-12, max_terms=100_000, z0=20.0):
    """phi(-alpha, rho; -x) for ``x >= 0`` (vectorised over ``x``).

    ``tol`` is the absolute tolerance of the series paths.  The integral path
    used for the rho family is accurate to about 1e-13 relative.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xf = np.atleast_1d(x).ravel()
    if np.any(xf < 0) or np.any(~np.isfinite(xf)):
        raise ValueError("wright_neg expects finite x >= 0")
    out = np.empty_like(xf)
    if alpha == 0.0:
        out = np.exp(-xf) * sc.rgamma(rho)
    else:
        kind = family_kind(alpha, rho) if alpha < 1.0 else None
        small = xf <= SERIES_SWITCH
        if small.any():
            out[small], _ = _wright_series_double(alpha, rho, xf[small], tol, max_terms)
        big = ~small
        if big.any():
            if kind is not None:
                m, s = _backend.wright_family(alpha, kind, xf[big])
                with np.errstate(over="ignore", under="ignore", invalid="ignore"):
                    out[big] = np.where(np.isneginf(s), 0.0, m * np.exp(s))
            else:
                out[big] = _wright_general(alpha, rho, xf[big], tol, max_terms, z0)
    out = out.reshape(np.shape(x)) if not scalar else out[0]
    return float(out) if scalar else out


_SERIES_CAP = 4096


def _wright_hankel(alpha, rho, x):
    """phi(-alpha, rho; -x) from the Hankel loop integral through the saddle point.

    (1/2 pi i) int_Ha exp(s - x s^alpha) s^-rho ds, with the loop made of the circle
    |s| = s0 (s0 the real saddle) and two rays at angles +-theta with alpha*theta < pi/2.
    """
    s0 = (alpha * x) ** (1.0 / (1.0 - alpha))
    h0 = s0 - x * s0 ** alpha
    if h0 < -800.0:
        return 0.0
    th = 0.5 * (0.5 * np.pi + min(np.pi, 0.5 * np.pi / alpha))

    def h(s):
        return np.exp(s - x * s ** alpha - h0) * s ** -rho

    def arc(p):
        s = s0 * np.exp(1j * p)
        return (h(s) * s).real

    def ray(r):
        s = r * np.exp(1j * th)
        return (h(s) * np.exp(1j * th)).imag

    width = 1.0 / math.sqrt(max(x * alpha * (1.0 - alpha) * s0 ** alpha, 1e-300))
    pts = [p for p in (0.5 * width, 2 * width, 8 * width) if p < th]
    a = 2 * integrate.quad(arc, 0.0, th, points=pts or None, epsabs=0, epsrel=1e-13, limit=400)[0]
    b = 2 * integrate.quad(ray, s0, np.inf, epsabs=0, epsrel=1e-13, limit=400)[0]
    return (a + b) / (2 * np.pi) * math.exp(h0)


def _wright_general(alpha, rho, x, tol, max_terms, z0):
    res = np.empty_like(x)
    # past the saddle the loop integral keeps full relative accuracy where the
    # alternating series only reaches tol in absolute terms
    loop = (alpha * x) ** (1.0 / (1.0 - alpha)) >= 1.0 if alpha < 1.0 else np.zeros(x.shape, bool)
    for i in np.flatnonzero(loop):
        res[i] = _wright_hankel(alpha, rho, x[i])
    if not loop.all():
        res[~loop] = _wright_series_path(alpha, rho, x[~loop], tol, max_terms, z0)
    return res


def _wright_series_path(alpha, rho, x, tol, max_terms, z0):
    res = np.empty_like(x)
    lx = np.log(x)
    K, peak = _series_terms_needed(alpha, rho, lx, tol, max_terms)
    dbl = (x <= z0) & (np.exp(peak) * _EPS * math.sqrt(K + 1) <= tol)
    if dbl.any():
        res[dbl], _ = _wright_series_double(alpha, rho, x[dbl], tol, max_terms)
    for i in np.flatnonzero(~dbl):
        res[i] = _wright_series_mp(alpha, rho, x[i], tol, max_terms, peak[i])
    return res


def wright_neg_scaled(alpha, rho, x, tol=1e-12):
    """``(m, s)`` with phi(-alpha, rho; -x) = m * exp(s), valid far into underflow.

    Only the integral family is scaled; other cases return ``s = 0``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    kind = family_kind(alpha, rho) if 0.0 < alpha < 1.0 else None
    m = np.empty_like(x)
    s = np.zeros_like(x)
    big = x > SERIES_SWITCH
    if kind is not None and big.any():
        m[big], s[big] = _backend.wright_family(alpha, kind, x[big])
        m[~big] = wright_neg(alpha, rho, x[~big], tol=tol)
    else:
        m[:] = wright_neg(alpha, rho, x, tol=tol)
    return m, s


def wright_phi(p: WrightParams, tol=1e-12, max_terms=100_000, z0=20.0):
    """phi(beta, rho; z) = sum_k z**k / (k! Gamma(beta k + rho)) for beta in (-1, 0], z <= 0."""
    return wright_neg(-p.beta, p.rho, -p.z, tol=tol, max_terms=max_terms, z0=z0)


def _ml_logterms(rho, mu, lz, k):
    la, sg = _log_rgamma(mu + rho * k)
    with np.errstate(invalid="ignore"):
        lt = np.where(k[:, None] == 0, 0.0, k[:, None] * lz[None, :]) + la[:, None]
    return lt, sg


def ml_array(rho, mu, z, tol=1e-10, max_abs_z=50.0, max_terms=20_000):
    """Vectorised E_rho(z; mu) for complex ``z`` with ``|z| <= max_abs_z``."""
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    zf = z.ravel()
    r = np.abs(zf)
    if np.any(r > max_abs_z):
        raise ConvergenceError(f"|z| = {r.max():.4g} exceeds the supported range {max_abs_z}")
    if rho == 1.0 and mu == 1.0:
        return np.exp(zf).reshape(shape)
    lz = np.where(r > 0, np.log(np.where(r > 0, r, 1.0)), -np.inf)
    K = 64
    while True:
        k = np.arange(K + 1, dtype=float)
        lt, sg = _ml_logterms(rho, mu, lz, k)
        fin = np.where(np.isfinite(lt), lt, -np.inf)
        peak = fin.max(axis=0)
        tail = fin[-4:].max(axis=0)
        if np.all(tail < np.minimum(np.log(tol), peak) + np.log(_EPS) - 5.0) or K >= max_terms:
            break
        K = min(2 * K, max_terms)
    if K >= max_terms and not np.all(tail < np.log(tol) + np.log(_EPS)):
        raise ConvergenceError("Mittag-Leffler series did not converge")
    ph = np.angle(zf)
    out = np.empty(zf.shape, dtype=complex)
    dbl = np.exp(peak) * _EPS * math.sqrt(K + 1) <= tol
    if dbl.any():
        with np.errstate(invalid="ignore"):
            terms = np.where(np.isfinite(lt[:, dbl]),
                             sg[:, None] * np.exp(lt[:, dbl] + 1j * k[:, None] * ph[None, dbl]), 0.0)
        out[dbl] = _neumaier(terms)
    for i in np.flatnonzero(~dbl):
        digits = int(peak[i] / math.log(10.0)) + int(-math.log10(tol)) + 10
        with mpmath.workdps(max(30, digits)):
            zz = mpmath.mpc(zf[i].real, zf[i].imag)
            val = mpmath.nsum(lambda j: zz ** int(j) * mpmath.rgamma(mu + rho * j), [0, mpmath.inf],
                              method="direct", steps=[K + 10])
            out[i] = complex(val)
    return out.reshape(shape)


def mittag_leffler(p: MittagLefflerParams, tol=1e-10, max_abs_z=50.0):
    """E_rho(z; mu) = sum_k z**k / Gamma(mu + rho k)."""
    return complex(ml_array(p.rho, p.mu, np.array([p.z]), tol=tol, max_abs_z=max_abs_z)[0])


class WrightTable:
    """Piecewise-Chebyshev interpolant of z -> phi(-alpha, rho; -z) on [0, zmax].

    Built once per (alpha, rho) for bulk tabulation; panels are bisected until the
    trailing Chebyshev coefficients fall below ``tol`` relative to the function
    scale.  Returns 0 beyond ``zmax`` (where the function is below the cutoff).
    """

    def __init__(self, alpha, rho, zmax, breaks=(), order=16, tol=1e-12, max_panels=4000):
        self.alpha = float(alpha)
        self.rho = float(rho)
        self.zmax = float(zmax)
        self.order = order
        nodes = np.cos(np.pi * (np.arange(order) + 0.5) / order)
        edges = np.unique(np.concatenate([[0.0, self.zmax], np.asarray(breaks, float)]))
        edges = edges[(edges >= 0) & (edges <= self.zmax)]
        pending = list(zip(edges[:-1], edges[1:]))
        done = []
        scale = None
        while pending:
            lo = np.array([p[0] for p in pending])
            hi = np.array([p[1] for p in pending])
            z = 0.5 * (lo + hi)[:, None] + 0.5 * (hi - lo)[:, None] * nodes[None, :]
            vals = wright_neg(self.alpha, self.rho, z.ravel()).reshape(z.shape)
            coef = np.polynomial.chebyshev.chebfit(nodes, vals.T, order - 1).T
            if scale is None:
                scale = max(np.abs(vals).max(), 1e-300)
            tail = np.abs(coef[:, -3:]).max(axis=1)
            bad = (tail > tol * scale) & ((hi - lo) > 1e-12 * max(self.zmax, 1.0))
            if len(done) + len(pending) + bad.sum() > max_panels:
                bad[:] = False
            for i in np.flatnonzero(~bad):
                done.append((lo[i], hi[i], coef[i]))
            pending = []
            for i in np.flatnonzero(bad):
                m = 0.5 * (lo[i] + hi[i])
                pending += [(lo[i], m), (m, hi[i])]
        done.sort(key=lambda p: p[0])
        self.edges = np.array([p[0] for p in done] + [done[-1][1]])
        self.coef = np.array([p[2] for p in done])

    @property
    def n_panels(self):
        return self.coef.shape[0]

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        flat = z.ravel()
        out = np.zeros_like(flat)
        inside = (flat >= 0) & (flat <= self.zmax)
        zi = flat[inside]
        idx = np.clip(np.searchsorted(self.edges, zi, side="right") - 1, 0, self.n_panels - 1)
        lo = self.edges[idx]
        hi = self.edges[idx + 1]
        u = (2 * zi - lo - hi) / (hi - lo)
        c = self.coef[idx]
        b1 = np.zeros_like(u)
        b2 = np.zeros_like(u)
        for j in range(self.order - 1, 0, -1):
            b1, b2 = 2 * u * b1 - b2 + c[:, j], b1
        out[inside] = u * b1 - b2 + c[:, 0]
        return out.reshape(z.shape)
