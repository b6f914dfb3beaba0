"""The fractional Green function G_{alpha,gamma}(x, t) and its time derivatives.

    G(x, t) = 1/2 int_{|x|}^inf e^{i gamma tau} J0(sigma sqrt(tau^2 - x^2)) k_0(tau, t) dtau,
    k_nu(tau, t) = t^{-nu-1} phi(-alpha, -nu; -tau t^{-alpha}).

Riemann-Liouville derivatives in t act on the kernel only, through the shift of
the Wright parameter, so ``D^nu G`` is the same quadrature with ``k_nu``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from . import specfun
from .quadrature import QuadratureError, gk_batch

__all__ = [
    "GreenParams",
    "DecayBudget",
    "heaviside",
    "wright_kernel",
    "kernel_cutoff",
    "kernel_breakpoints",
    "green",
    "green_frac_deriv",
    "green_with_error",
    "green_log_abs",
    "green_classical",
    "gamma0_matrix",
    "gamma0_frac_deriv",
]

# J0 zeros used to split the oscillatory tau range
_J0_ZEROS = sc.jn_zeros(0, 400)


@dataclass(frozen=True)
class GreenParams:
    alpha: float
    gamma: float
    sigma: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class DecayBudget:
    """Constants of the stretched-exponential bound exp(-sigma0 |x|^eps t^(-alpha eps))."""

    sigma0: float
    epsilon: float
    cutoff: float = 1e-14

    @classmethod
    def for_alpha(cls, alpha, fraction=0.9, cutoff=1e-14):
        if not 0.0 < alpha < 1.0:
            raise ValueError("the stretched-exponential bound needs 0 < alpha < 1")
        eps = 1.0 / (1.0 - alpha)
        return cls(fraction * (1.0 - alpha) * alpha ** (alpha * eps), eps, cutoff)

    def __post_init__(self):
        if not 0.0 < self.cutoff < 1.0:
            raise ValueError("cutoff must lie in (0, 1)")


def heaviside(x):
    """Step function with Theta(0) = 1/2."""
    return np.where(np.asarray(x) > 0, 1.0, np.where(np.asarray(x) < 0, 0.0, 0.5))


def wright_kernel(alpha, nu, tau, t):
    """k_nu(tau, t) = t^(-nu-1) phi(-alpha, -nu; -tau t^-alpha), vectorised."""
    tau, t = np.broadcast_arrays(np.asarray(tau, float), np.asarray(t, float))
    z = tau / t ** alpha
    return t ** (-nu - 1.0) * specfun.wright_neg(alpha, -nu, z.ravel()).reshape(z.shape)


def _a0(alpha):
    e = 1.0 - alpha
    return e * alpha ** (alpha / e)


def kernel_cutoff(alpha, t, start=0.0, cutoff=1e-14):
    """tau beyond which the kernel has decayed by ``cutoff`` relative to its value at ``start``.

    Uses the leading exponent Z A0 = A0 (tau t^-alpha)^(1/(1-alpha)) of the Wright kernel.
    """
    t = np.asarray(t, dtype=float)
    L = -np.log(cutoff) + 12.0
    if alpha >= 1.0:
        return np.maximum(t, start) * (1 + 1e-12)
    e = 1.0 - alpha
    la0 = np.log(_a0(alpha))
    with np.errstate(divide="ignore"):
        lza = la0 + np.log(np.asarray(start, float) / t ** alpha) / e
    # Z A0 is astronomically large deep in the tail, so stay in log space
    return t ** alpha * np.exp(e * (np.logaddexp(lza, np.log(L)) - la0))


def kernel_moments(alpha):
    """Mean and standard deviation of tau t^-alpha under the normalised kernel k_0."""
    mean = sc.gamma(alpha) / sc.gamma(2 * alpha)
    second = 2 * sc.gamma(alpha) / sc.gamma(3 * alpha)
    return mean, np.sqrt(max(second - mean ** 2, 0.0))


_SPREAD = np.array([-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 12.0, 16.0])


def kernel_breakpoints(alpha, t, lo, hi):
    """Kernel features inside [lo, hi]: bulk quantiles and the decay scale after ``lo``."""
    mean, sd = kernel_moments(alpha)
    ta = t ** alpha
    pts = [ta * (mean + c * sd) for c in _SPREAD]
    if alpha < 1.0:
        # when lo sits in the tail the kernel falls off on the scale (1-alpha) tau / (Z A0)
        lza = np.log(_a0(alpha)) + np.log(max(lo / ta, 1e-300)) / (1.0 - alpha)
        if lza > 0.0:
            d = (1.0 - alpha) * lo * np.exp(-lza)
            pts += [lo + c * d for c in (0.25, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)]
    pts = np.asarray(pts)
    return np.unique(np.concatenate([[lo, hi], pts[(pts > lo) & (pts < hi)]]))


def _bessel_breaks(sigma, x, lo, hi):
    """tau where J0(sigma sqrt(tau^2 - x^2)) vanishes, when the oscillation is fast enough to matter."""
    if sigma * hi <= 10.0:
        return np.empty(0)
    taus = np.sqrt(x * x + (_J0_ZEROS / sigma) ** 2)
    return taus[(taus > lo) & (taus < hi)]


def _edges(p, x, t, cutoff, extra=None):
    rows = []
    for xi, ti in zip(x, t):
        lo = abs(xi)
        hi = float(kernel_cutoff(p.alpha, ti, lo, cutoff))
        pts = np.concatenate([kernel_breakpoints(p.alpha, ti, lo, hi), _bessel_breaks(p.sigma, xi, lo, hi)])
        if extra is not None:
            pts = np.concatenate([pts, extra(xi, ti, lo, hi)])
        rows.append(np.unique(pts))
    width = max(r.size for r in rows)
    return np.array([np.pad(r, (0, width - r.size), mode="edge") for r in rows])


def _bessel_profile(sigma, tau, x):
    r2 = np.maximum(tau * tau - x * x, 0.0)
    return sc.j0(sigma * np.sqrt(r2))


def _green_batch(p, nu, x, t, tol_rel, tol_abs, cutoff):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x, t = np.broadcast_arrays(x, t)
    shape = x.shape
    x = x.ravel()
    t = t.ravel()
    if np.any(t <= 0):
        raise ValueError("green needs t > 0")
    edges = _edges(p, x, t, cutoff)

    def f(tau, rows):
        xr = x[rows][:, None]
        tr = t[rows][:, None]
        k = wright_kernel(p.alpha, nu, tau, np.broadcast_to(tr, tau.shape))
        return 0.5 * np.exp(1j * p.gamma * tau) * _bessel_profile(p.sigma, tau, xr) * k

    res = gk_batch(f, edges, tol_abs=tol_abs, tol_rel=tol_rel)
    return res.value.reshape(shape), res.error.reshape(shape), res.converged.reshape(shape)


def green_with_error(p: GreenParams, x, t, nu=0.0, tol_rel=1e-10, tol_abs=1e-14, budget=None, strict=True):
    """``(value, error)`` of D^nu G at the points ``(x, t)`` (broadcast)."""
    if p.alpha >= 1.0:
        if nu != 0.0:
            raise ValueError("at alpha = 1 use green_classical; the kernel is a delta")
        v = green_classical(p.gamma, p.sigma, x, t)
        return v, np.zeros(np.shape(v))
    cutoff = budget.cutoff if budget is not None else 1e-14
    val, err, ok = _green_batch(p, nu, x, t, tol_rel, tol_abs, cutoff)
    if strict and not np.all(ok):
        i = int(np.argmax(~ok.ravel()))
        raise QuadratureError(
            f"green quadrature did not converge (error estimate {err.ravel()[i]:.3e})", val, err)
    return val, err


def green(p: GreenParams, x, t, tol_rel=1e-10, tol_abs=1e-14, budget=None):
    """G_{alpha,gamma}(x, t); scalar in, scalar out."""
    scalar = np.ndim(x) == 0 and np.ndim(t) == 0
    v, _ = green_with_error(p, x, t, 0.0, tol_rel, tol_abs, budget)
    return complex(np.ravel(v)[0]) if scalar else v


def green_frac_deriv(p: GreenParams, nu, x, t, tol_rel=1e-10, tol_abs=1e-14, budget=None):
    """D_{0t}^nu G(x, t) via the Wright parameter shift."""
    scalar = np.ndim(x) == 0 and np.ndim(t) == 0
    v, _ = green_with_error(p, x, t, nu, tol_rel, tol_abs, budget)
    return complex(np.ravel(v)[0]) if scalar else v


def green_log_abs(p: GreenParams, x, t, nu=0.0, tol_rel=1e-8, cutoff=1e-14):
    """log|D^nu G(x, t)|, usable deep in the stretched-exponential tail where G underflows.

    The kernel is evaluated as ``m exp(s)`` and ``exp(s(|x|))`` is factored out.
    """
    if not 0.0 < p.alpha < 1.0:
        raise ValueError("green_log_abs needs 0 < alpha < 1")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x, t = np.broadcast_arrays(x, t)
    shape = x.shape
    x = x.ravel()
    t = t.ravel()
    ta = t ** p.alpha
    _, s0 = specfun.wright_neg_scaled(p.alpha, -nu, np.maximum(np.abs(x) / ta, 1e-300))
    s0 = np.where(np.isfinite(s0), s0, 0.0)
    edges = _edges(p, x, t, cutoff)

    def f(tau, rows):
        tr = np.broadcast_to(t[rows][:, None], tau.shape)
        m, s = specfun.wright_neg_scaled(p.alpha, -nu, (tau / tr ** p.alpha).ravel())
        with np.errstate(under="ignore"):
            k = (m * np.exp(s - s0[rows].repeat(tau.shape[1]))).reshape(tau.shape)
        return 0.5 * np.exp(1j * p.gamma * tau) * _bessel_profile(p.sigma, tau, x[rows][:, None]) * k * tr ** (-nu - 1)

    res = gk_batch(f, edges, tol_abs=0.0, tol_rel=tol_rel)
    return (np.log(np.abs(res.value)) + s0).reshape(shape)


def green_classical(gamma, sigma, x, t):
    """G_{1,gamma}(x, t) = 1/2 e^{i gamma t} J0(sigma sqrt(t^2 - x^2)) Theta(t - |x|)."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    r2 = np.maximum(t * t - x * x, 0.0)
    v = 0.5 * np.exp(1j * gamma * t) * sc.j0(sigma * np.sqrt(r2)) * heaviside(t - np.abs(x))
    return complex(v) if np.ndim(v) == 0 else v


def gamma0_frac_deriv(p: GreenParams, a, nu, x, t):
    """D^nu of the diagonal block diag(Theta(-x), Theta(x)) g(t, |x|), shape ``(..., 2, 2)``.

    g_nu(t, tau) = e^{i (gamma + a/2) tau} t^(-nu-1) phi(-alpha, -nu; -tau t^-alpha).
    """
    x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
    if np.any(t <= 0):
        raise ValueError("gamma0 needs t > 0")
    tau = np.abs(x)
    g = np.exp(1j * (p.gamma + 0.5 * a) * tau) * wright_kernel(p.alpha, nu, tau, t)
    out = np.zeros(x.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = heaviside(-x) * g
    out[..., 1, 1] = heaviside(x) * g
    return out


def gamma0_matrix(p: GreenParams, a, x, t):
    """Gamma_0(x, t) = g(t, |x|) diag(Theta(-x), Theta(x))."""
    return gamma0_frac_deriv(p, a, 0.0, x, t)
