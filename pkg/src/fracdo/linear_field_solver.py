"""Closed-form solutions for the linear displacement field f = a x + b.

The coupling phase e^{ib} is a constant, so it is removed by E_h -> e^{ib} E_h
and restored at the end.  Everything else follows the propagator

    E(x, t) = int D^{alpha-1} G(x, xi, t) phi(xi) dxi,

and, for constant initial data (1, 0), its Mittag-Leffler reduction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special as sc

from . import fraccalc, greenfn, specfun
from .quadrature import QuadratureError, gk_batch
from .wavefield import AmplitudePair, GridSpec

__all__ = [
    "LinearFieldParams",
    "InitialData",
    "phase_twist",
    "s_matrix",
    "s_matrix_integrated",
    "n_matrices",
    "propagate",
    "solve_constant_ic",
    "constant_ic_quadrature",
    "residual_check",
]


@dataclass(frozen=True)
class LinearFieldParams:
    alpha: float
    gamma: float
    sigma: float
    a: float = 0.0
    b: float = 0.0
    k: float = field(init=False)
    a1: float = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        object.__setattr__(self, "k", float(np.hypot(0.5 * self.a, self.sigma)))
        object.__setattr__(self, "a1", self.gamma + 0.5 * self.a)

    @property
    def green(self):
        return greenfn.GreenParams(self.alpha, self.gamma, self.sigma)


@dataclass(frozen=True)
class InitialData:
    """Cauchy data E(x, 0) = (phi0(x), phih(x)); the derivatives are optional."""

    phi0: object
    phih: object
    phi0_deriv: object = None
    phih_deriv: object = None

    @classmethod
    def constant(cls, c0=1.0, ch=0.0):
        def const(c):
            return lambda x: np.full(np.shape(x), c, dtype=complex)
        zero = const(0.0)
        return cls(const(c0), const(ch), zero, zero)

    def __call__(self, x):
        return np.asarray(self.phi0(x), complex), np.asarray(self.phih(x), complex)

    def derivative(self, x):
        if self.phi0_deriv is None or self.phih_deriv is None:
            raise ValueError("initial data carries no derivative callables")
        return np.asarray(self.phi0_deriv(x), complex), np.asarray(self.phih_deriv(x), complex)


def phase_twist(phi: InitialData, a):
    """psi0 = e^{-iax/2} phi0, psih = e^{iax/2} phih (derivatives twisted by the product rule)."""
    w = 0.5 * a

    def tw(f, s):
        return lambda x: np.exp(s * 1j * w * np.asarray(x)) * f(x)

    def twd(f, df, s):
        if f is None or df is None:
            return None
        return lambda x: np.exp(s * 1j * w * np.asarray(x)) * (df(x) + s * 1j * w * f(x))

    return InitialData(tw(phi.phi0, -1), tw(phi.phih, 1),
                       twd(phi.phi0, phi.phi0_deriv, -1), twd(phi.phih, phi.phih_deriv, 1))


def _offset(phi: InitialData, b):
    """Data of the system without the constant phase e^{ib}: phih -> e^{ib} phih."""
    if b == 0.0:
        return phi
    c = np.exp(1j * b)
    scale = lambda f: None if f is None else (lambda x: c * f(x))
    return InitialData(phi.phi0, scale(phi.phih), phi.phi0_deriv, scale(phi.phih_deriv))


def _j1_over(z):
    """J1(z)/z with the series near 0."""
    z = np.asarray(z, dtype=float)
    small = z < 1e-4
    zs = np.where(small, 1.0, z)
    z2 = z * z
    return np.where(small, 0.5 - z2 / 16.0 + z2 * z2 / 384.0, sc.j1(zs) / zs)


def _s_entries(p, x, xi, tau):
    X1 = np.asarray(x) - np.asarray(xi)
    X2 = np.asarray(x) + np.asarray(xi)
    r = np.sqrt(np.maximum(tau * tau - X1 * X1, 0.0))
    z = p.sigma * r
    h0 = sc.j0(z)
    # (tau -+ X1)/r J1(sigma r) = sigma (tau -+ X1) J1(z)/z
    q = p.sigma * _j1_over(z)
    ea1 = np.exp(0.5j * p.a * X1)
    ea2 = np.exp(0.5j * p.a * X2)
    s11 = -p.sigma * ea1 * (tau - X1) * q
    s12 = 1j * p.sigma * ea2 * h0
    s21 = 1j * p.sigma / ea2 * h0
    s22 = -p.sigma / ea1 * (tau + X1) * q
    return s11, s12, s21, s22


def s_matrix(p: LinearFieldParams, x, xi, tau):
    """S(x, xi, tau) with X1 = x - xi, X2 = x + xi; needs tau >= |x - xi|."""
    if np.any(np.asarray(tau) < np.abs(np.asarray(x) - np.asarray(xi)) * (1 - 1e-14)):
        raise ValueError("s_matrix needs tau >= |x - xi|")
    s11, s12, s21, s22 = _s_entries(p, x, xi, np.asarray(tau, float))
    return np.stack([np.stack([s11, s12], -1), np.stack([s21, s22], -1)], -2)


def s_matrix_integrated(p: LinearFieldParams, x, tau):
    """Closed form of int_{-tau}^{tau} S(x, x - eta, tau) d eta (Bessel integral identities)."""
    tau = np.asarray(tau, dtype=float)
    k = p.k
    sk = np.sin(k * tau)
    diag = 2 * np.cos(k * tau) - 1j * p.a / k * sk - 2 * np.exp(-0.5j * p.a * tau)
    off = 1j * p.sigma * 2 / k * sk
    out = np.zeros(tau.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = diag
    out[..., 1, 1] = diag
    out[..., 0, 1] = off * np.exp(1j * p.a * np.asarray(x))
    out[..., 1, 0] = off * np.exp(-1j * p.a * np.asarray(x))
    return out


def n_matrices(p: LinearFieldParams, x):
    """N1(x), N2(x) of the constant-data reduction."""
    r = p.a / (2 * p.k)
    c = p.sigma / p.k
    e = np.exp(1j * p.a * x)
    n1 = 0.5 * np.array([[1 - r, c * e], [c / e, 1 - r]])
    n2 = 0.5 * np.array([[1 + r, -c * e], [-c / e, 1 + r]])
    return n1, n2


def solve_constant_ic(p: LinearFieldParams, x, t, tol=1e-12):
    """E for E(x, 0) = (1, 0): 1/2 [[1 - a/2k, 1 + a/2k], [sigma/k e^{-iax}, -sigma/k e^{-iax}]] (E+, E-).

    E+- = E_alpha(i (a1 +- k) t^alpha; 1).  Works on broadcast arrays.
    """
    x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    ta = t ** p.alpha
    if p.alpha == 1.0:
        ep = np.exp(1j * (p.a1 + p.k) * t)
        em = np.exp(1j * (p.a1 - p.k) * t)
    else:
        ep = specfun.ml_array(p.alpha, 1.0, 1j * (p.a1 + p.k) * ta, tol=tol)
        em = specfun.ml_array(p.alpha, 1.0, 1j * (p.a1 - p.k) * ta, tol=tol)
    r = p.a / (2 * p.k)
    e0 = 0.5 * ((1 - r) * ep + (1 + r) * em)
    eh = 0.5 * p.sigma / p.k * np.exp(-1j * (p.a * x + p.b)) * (ep - em)
    if e0.ndim == 0:
        return AmplitudePair(complex(e0), complex(eh))
    return AmplitudePair(e0, eh)


def _kernel(alpha, tau, t):
    """t^-alpha phi(-alpha, 1-alpha; -tau t^-alpha), the D^{alpha-1} time kernel."""
    return greenfn.wright_kernel(alpha, alpha - 1.0, tau, np.broadcast_to(t, np.shape(tau)))


def constant_ic_quadrature(p: LinearFieldParams, x, t, tol_rel=1e-10):
    """I1 + I2 for data (1, 0) by direct quadrature of the Wright-weighted N-matrix integrals.

    Independent of the Mittag-Leffler evaluation; used to cross-check it.
    """
    if p.alpha >= 1.0:
        raise ValueError("the quadrature form needs alpha < 1")
    x = float(x)
    t = float(t)
    n1, n2 = n_matrices(p, x)
    tstar = float(greenfn.kernel_cutoff(p.alpha, t))
    brk = greenfn.kernel_breakpoints(p.alpha, t, 0.0, tstar)
    w = np.array([p.a1 + p.k, p.a1 - p.k])
    period = 2 * np.pi / np.max(np.abs(np.concatenate([w, [p.gamma, 1e-300]])))
    brk = np.unique(np.concatenate([brk, np.arange(0.0, tstar, period)]))

    def f(tau, rows):
        k = _kernel(p.alpha, tau, t)
        ep = np.exp(1j * w[0] * tau)
        em = np.exp(1j * w[1] * tau)
        eg = np.exp(1j * p.gamma * tau)
        i1 = np.stack([n1[0, 0] * ep + n2[0, 0] * em - eg, n1[1, 0] * ep + n2[1, 0] * em], axis=-1)
        i2 = np.stack([eg, np.zeros_like(eg)], axis=-1)
        return k[..., None] * (i1 + i2)

    res = gk_batch(f, brk[None, :], tol_rel=tol_rel, tol_abs=1e-15)
    e0, eh = res.value[0]
    return AmplitudePair(complex(e0), complex(eh * np.exp(-1j * p.b)))


def _inner_xi(p, phi, x, tau, tol_rel):
    """int_{x-tau}^{x+tau} S(x, xi, tau) phi(xi) dxi for every tau (rows)."""
    tau = np.asarray(tau, float)
    edges = np.stack([x - tau, np.full_like(tau, x), x + tau], axis=1)

    def f(xi, rows):
        tr = tau[rows][:, None]
        s11, s12, s21, s22 = _s_entries(p, x, xi, tr)
        f0, fh = phi(xi)
        return np.stack([s11 * f0 + s12 * fh, s21 * f0 + s22 * fh], axis=-1)

    res = gk_batch(f, edges, tol_rel=tol_rel, tol_abs=1e-15)
    return res.value, res.converged


def propagate(p: LinearFieldParams, phi: InitialData, x, t, grid: GridSpec | None = None,
              tol=1e-8, strict=True):
    """E(x, t) for general bounded data by double quadrature of the propagator.

    The tau integral (over the Wright kernel) is outside and the xi integral over
    the cone [x - tau, x + tau] inside; both are adaptive and each gets half the
    tolerance.  The xi window is truncated at the kernel cutoff tau*.  With a
    ``grid``, the data are taken as zero outside [grid.x_min, grid.x_max].
    """
    if not t > 0:
        raise ValueError("propagate needs t > 0")
    data = _offset(phi, p.b)
    if grid is not None:
        lo, hi = grid.x_min, grid.x_max

        def data_fn(xi, d=data):
            inside = (xi >= lo) & (xi <= hi)
            f0, fh = d(np.clip(xi, lo, hi))
            return np.where(inside, f0, 0), np.where(inside, fh, 0)
    else:
        data_fn = data
    half = 0.5 * tol

    if p.alpha == 1.0:
        # the time kernel is a delta at tau = t
        inner, ok = _inner_xi(p, data_fn, x, np.array([t]), half)
        f0, _ = data_fn(np.array([x + t]))
        _, fh = data_fn(np.array([x - t]))
        e = 0.5 * np.exp(1j * p.a1 * t) * inner[0] + np.exp(1j * p.gamma * t) * np.array([f0[0], fh[0]])
        return AmplitudePair(complex(e[0]), complex(e[1] * np.exp(-1j * p.b)))

    tstar = float(greenfn.kernel_cutoff(p.alpha, t))
    brk = greenfn.kernel_breakpoints(p.alpha, t, 0.0, tstar)
    failed = []

    def outer(tau, rows):
        flat = tau.ravel()
        k = _kernel(p.alpha, flat, t)
        inner, ok = _inner_xi(p, data_fn, x, flat, half)
        if not ok.all():
            failed.append(True)
        f0, _ = data_fn(x + flat)
        _, fh = data_fn(x - flat)
        eg = np.exp(1j * p.gamma * flat)
        val = 0.5 * np.exp(1j * p.a1 * flat)[:, None] * inner + np.stack([eg * f0, eg * fh], -1)
        return (k[:, None] * val).reshape(tau.shape + (2,))

    res = gk_batch(outer, brk[None, :], tol_rel=half, tol_abs=1e-14)
    if strict and (not res.converged[0] or failed):
        raise QuadratureError(f"propagate did not converge (error estimate {res.error[0]:.3e})",
                              res.value[0], res.error[0])
    e0, eh = res.value[0]
    return AmplitudePair(complex(e0), complex(eh * np.exp(-1j * p.b)))


def residual_check(p: LinearFieldParams, solution, x, t, h=1e-3, graded=False):
    """max(|R0|, |Rh|) of the DO system at (x, t) for ``solution(x, t) -> AmplitudePair``.

    The Caputo derivative uses the L1 product-integration scheme on [0, t] with
    step ``h`` (graded toward 0 when ``graded``), the x-derivative a central
    difference with step ``h``.  ``solution`` must accept an array of times.
    """
    if not t > 0:
        raise ValueError("residual_check needs t > 0")
    n = max(2, int(round(t / h)))
    nodes = fraccalc.graded_mesh(t, n, p.alpha) if graded else np.linspace(0.0, t, n + 1)

    def sample(xx, tt):
        s = solution(xx, tt)
        return np.broadcast_to(np.asarray(s.e0, complex), np.shape(tt)), \
            np.broadcast_to(np.asarray(s.eh, complex), np.shape(tt))

    e0_t, eh_t = sample(np.full_like(nodes, x), nodes)
    d0 = fraccalc.gc_derivative(fraccalc.SampledFunction(nodes, e0_t), p.alpha, t)
    dh = fraccalc.gc_derivative(fraccalc.SampledFunction(nodes, eh_t), p.alpha, t)
    tt = np.array([t, t])
    e0_p, eh_p = sample(np.array([x + h, x - h]), tt)
    e0x = (e0_p[0] - e0_p[1]) / (2 * h)
    ehx = (eh_p[0] - eh_p[1]) / (2 * h)
    e0, eh = e0_t[-1], eh_t[-1]
    ph = np.exp(1j * (p.a * x + p.b))
    r0 = d0 - e0x - 1j * p.gamma * e0 - 1j * p.sigma * ph * eh
    rh = dh + ehx - 1j * p.sigma / ph * e0 - 1j * p.gamma * eh
    return float(max(abs(r0), abs(rh)))
