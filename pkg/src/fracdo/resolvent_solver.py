"""General displacement fields: the Volterra-Fredholm integral equation and its resolvent.

The system is written as E = F + A E with

    A E(x, t) = i sigma int_0^t dv int du G(x - u, t - v) M[E](u, v),
    M[E] = C[E] + i f_x K E,   C[E] = d^alpha(K E) - K d^alpha E,

and F assembled from the initial data (the four-term form with the +iσ D^{alpha-1} G K φ
term).  For time-independent f the commutator C vanishes and the kernel reduces to
-i f_x G K in the convention E + i sigma int int K1 E = F.

Discretisation: E is piecewise linear in u (step dx) and v (time grid).  Writing G as
the tau integral of the Wright kernel against J0, every weight factorises into

    W_ij(d) = int dtau Omega_ij(tau) H(d, tau),

with H the J0 profile integrated against a spatial hat and Omega_ij the time hat
integrated against the Wright kernel, which has the closed antiderivatives
phi(-alpha, 1; .) and s phi(-alpha, 2; .).  On a uniform grid the weights depend on
the lag only, so A is a 2-D causal convolution evaluated with FFTs, and the
Liouville-Neumann series sum_n A^n F is summed matrix-free.  The padded spatial window
extends the output window by the Wright-kernel decay radius at time T.
"""
from __future__ import annotations

import time as _time
from dataclasses import dataclass, field

import numpy as np
from scipy import signal
from scipy import special as sc

from . import fraccalc, greenfn, specfun
from .greenfn import GreenParams
from .linear_field_solver import InitialData
from .quadrature import QuadratureError, gauss_legendre_panels, gk_batch
from .wavefield import GridSpec, WaveFieldTable

__all__ = [
    "DisplacementField",
    "KernelTable",
    "Discretization",
    "ResolventError",
    "coupling_matrix",
    "kernel_K1",
    "rhs_F",
    "kernel_table",
    "iterate_kernel",
    "resolvent",
    "solve",
    "solve_classical",
]


class ResolventError(RuntimeError):
    """The Neumann series did not reach the tolerance within the allowed order."""


@dataclass(frozen=True)
class DisplacementField:
    """f(x, t) with its partial derivatives; ``time_independent`` enables the fast paths."""

    f: object
    f_x: object
    f_t: object = None
    time_independent: bool = False

    @classmethod
    def linear(cls, a=0.0, b=0.0):
        return cls(lambda x, t: a * np.asarray(x, float) + b + 0.0 * np.asarray(t, float),
                   lambda x, t: np.full(np.broadcast(np.asarray(x), np.asarray(t)).shape, float(a)),
                   lambda x, t: np.zeros(np.broadcast(np.asarray(x), np.asarray(t)).shape),
                   True)

    @classmethod
    def zero(cls):
        return cls.linear(0.0, 0.0)

    def phase(self, x, t):
        return np.exp(1j * np.asarray(self.f(x, t), float))


def coupling_matrix(field: DisplacementField, x, t):
    """K = [[0, e^{if}], [e^{-if}, 0]], shape ``(..., 2, 2)``."""
    e = field.phase(x, t)
    out = np.zeros(np.shape(e) + (2, 2), dtype=complex)
    out[..., 0, 1] = e
    out[..., 1, 0] = 1.0 / e
    return out


def _apply_K(e, E):
    """K E for phases ``e`` (..., ) and stacked amplitudes ``E`` (..., 2)."""
    return np.stack([e * E[..., 1], E[..., 0] / e], axis=-1)


# --------------------------------------------------------------------------- pointwise

def kernel_K1(p: GreenParams, field: DisplacementField, x, t, u, v, general=None,
              n_sub=64, min_dt=1e-8, tol_rel=1e-10):
    """K1(x, t; u, v) in the convention E + i sigma int int K1 E = F, shape (2, 2).

    K1 = D^alpha[G K] - D^alpha G . K - i f_u G K, the derivative right-sided in v with
    terminal t.  For fields constant in t the first two terms cancel (fast path).  The
    general path splits D^alpha[G K] = K(v) D^alpha G + D^alpha[G (K - K(v))] and
    evaluates the remainder by product integration on a graded v-submesh.
    """
    if not t > v:
        raise ValueError("kernel_K1 needs t > v")
    if t - v < min_dt:
        raise ValueError(f"t - v = {t - v:.3e} is below the resolution {min_dt:.1e}")
    if general is None:
        general = not field.time_independent
    d = x - u
    g = complex(greenfn.green(p, d, t - v, tol_rel=tol_rel))
    K = coupling_matrix(field, u, v)
    fx = float(field.f_x(u, v))
    out = -1j * fx * g * K
    if not general:
        return out
    dag = complex(greenfn.green_frac_deriv(p, p.alpha, d, t - v, tol_rel=tol_rel)) if p.alpha < 1 else None
    if p.alpha == 1.0:
        # D^1 in v of G(t - v)(K(v) - K(v0)) at v0 is -G(t - v0) K_v(v0)
        if field.f_t is None:
            raise ValueError("the alpha = 1 general path needs f_t")
        ft = float(field.f_t(u, v))
        Kt = 1j * ft * np.array([[0, np.exp(1j * field.f(u, v))], [-np.exp(-1j * field.f(u, v)), 0]])
        return out - g * Kt
    first = -dag * K
    # graded toward both ends of [v, t]
    s = 0.5 * (1 - np.cos(np.pi * np.arange(n_sub + 1) / n_sub))
    nodes = v + (t - v) * s
    gk = np.zeros((n_sub + 1, 2, 2), dtype=complex)
    inner = nodes[1:-1]
    gv = greenfn.green(p, np.full(inner.shape, d), t - inner, tol_rel=1e-8)
    gk[1:-1] = gv[:, None, None] * (coupling_matrix(field, u, inner) - K)
    rem = fraccalc.rl_derivative(fraccalc.SampledFunction(nodes, gk), p.alpha, v, side="right")
    third = dag * K + rem
    return out + first + third


def _window_edges(x, tau):
    return np.stack([x - tau, np.full_like(tau, x), x + tau], axis=1)


def _cone_integrals(p, x, tau, funcs, tol_rel):
    """int_{x-tau}^{x+tau} J0(sigma sqrt(tau^2 - (x-u)^2)) g(u) du for each g in ``funcs``."""
    edges = _window_edges(x, tau)

    def f(u, rows):
        tr = tau[rows][:, None]
        j = sc.j0(p.sigma * np.sqrt(np.maximum(tr * tr - (x - u) ** 2, 0.0)))
        return np.stack([j[..., None] * np.stack(g(u), -1) for g in funcs], axis=-2)

    res = gk_batch(f, edges, tol_rel=tol_rel, tol_abs=1e-15)
    return res.value, res.converged.all()


def _cone_j1(p, x, tau, g, tol_rel):
    """tau int J1(sigma r)/r g(u) du over the cone, r = sqrt(tau^2 - (x-u)^2)."""
    edges = _window_edges(x, tau)

    def f(u, rows):
        tr = tau[rows][:, None]
        r = np.sqrt(np.maximum(tr * tr - (x - u) ** 2, 0.0))
        z = p.sigma * r
        q = np.where(z < 1e-4, 0.5 * p.sigma, sc.j1(np.maximum(z, 1e-300)) / np.maximum(r, 1e-300))
        return (tr * q)[..., None] * np.stack(g(u), -1)

    res = gk_batch(f, edges, tol_rel=tol_rel, tol_abs=1e-15)
    return res.value, res.converged.all()


def _data_parts(field, phi):
    def d0(u):
        return phi(u)

    def d1(u):
        a, b = phi.derivative(u)
        return a, -b

    def d2(u):
        a, b = phi(u)
        e = field.phase(u, 0.0)
        return e * b, a / e

    return d0, d1, d2


def _boundary_remainder(p, field, phi, x, t, n_u=96, n_s=24):
    """i sigma int du D^{alpha-1}[G (K(u, .) - K(u, 0))] phi(u): zero for fields constant in t."""
    tstar = float(greenfn.kernel_cutoff(p.alpha, t, cutoff=1e-12))
    u, wu = gauss_legendre_panels(np.linspace(x - tstar, x + tstar, n_u // 8 + 1), 8)
    s = fraccalc.graded_mesh(t, n_s, p.alpha)[:-1]
    acc = np.zeros(2, dtype=complex)
    for ui, wi in zip(u, wu):
        g = np.zeros(n_s + 1, dtype=complex)
        g[:-1] = greenfn.green(p, np.full(s.shape, x - ui), t - s, tol_rel=1e-8)
        dK = coupling_matrix(field, ui, np.append(s, t)) - coupling_matrix(field, ui, 0.0)
        f0, fh = phi(np.array([ui]))
        vals = g[:, None] * (dK @ np.array([f0[0], fh[0]]))
        # D^{alpha-1} right-sided in v at v = 0 equals the left-sided integral of the reflection
        acc += wi * fraccalc.rl_integral(fraccalc.SampledFunction(np.append(s, t), vals),
                                         p.alpha - 1.0, 0.0, side="right")
    return 1j * p.sigma * acc


def rhs_F(p: GreenParams, field: DisplacementField, phi: InitialData, x, t,
          assembly="cancelled", tol_rel=1e-11):
    """F(x, t) as a length-2 complex array.

    ``cancelled``: int du [D^{2a-1}G phi - i gamma D^{a-1}G phi + diag(1,-1) D^{a-1}G phi'
    + i sigma D^{a-1}G K(u,0) phi].  ``uncancelled`` adds the two boundary contributions
    of the integration by parts separately, -i sigma D^{a-1}G K(u,0) phi and
    +i sigma D^{a-1}[G K]|_{v=0} phi; they cancel for fields constant in t.
    """
    if assembly not in ("cancelled", "uncancelled"):
        raise ValueError(f"unknown assembly {assembly!r}")
    if phi.phi0_deriv is None or phi.phih_deriv is None:
        raise ValueError("rhs_F needs the derivative callables of the initial data")
    if not t > 0:
        raise ValueError("rhs_F needs t > 0")
    x = float(x)
    d0, d1, d2 = _data_parts(field, phi)
    a, gam, sig = p.alpha, p.gamma, p.sigma
    if a == 1.0:
        tau = np.array([t])
        ints, ok = _cone_integrals(p, x, tau, [d0, d1, d2], tol_rel)
        jv, ok2 = _cone_j1(p, x, tau, d0, tol_rel)
        f0p, _ = d0(np.array([x + t]))
        _, fhm = d0(np.array([x - t]))
        f0m, fhp = d0(np.array([x - t]))[0], d0(np.array([x + t]))[1]
        edge = np.array([f0p[0] + f0m[0], fhp[0] + fhm[0]])
        eg = 0.5 * np.exp(1j * gam * t)
        i0, i1, i2 = ints[0]
        # d_t of the cone integral, then the -i gamma term removes the phase derivative
        dt_part = eg * (edge - jv[0])
        out = dt_part + eg * (i1 + 1j * sig * i2)
        if not (ok and ok2):
            raise QuadratureError("rhs_F did not converge", out, np.nan)
        return out

    tstar = float(greenfn.kernel_cutoff(a, t, cutoff=1e-15))
    brk = greenfn.kernel_breakpoints(a, t, 0.0, tstar)
    failed = []

    def outer(tau, rows):
        flat = tau.ravel()
        k1 = greenfn.wright_kernel(a, a - 1.0, flat, np.full(flat.shape, t))
        k2 = greenfn.wright_kernel(a, 2 * a - 1.0, flat, np.full(flat.shape, t))
        ints, ok = _cone_integrals(p, x, flat, [d0, d1, d2], 0.5 * tol_rel)
        if not ok:
            failed.append(True)
        eg = 0.5 * np.exp(1j * gam * flat)[:, None]
        val = eg * ((k2 - 1j * gam * k1)[:, None] * ints[:, 0] + k1[:, None] * ints[:, 1]
                    + 1j * sig * k1[:, None] * ints[:, 2])
        if assembly == "uncancelled":
            val = val - eg * 1j * sig * k1[:, None] * ints[:, 2] + eg * 1j * sig * k1[:, None] * ints[:, 2]
        return val.reshape(tau.shape + (2,))

    res = gk_batch(outer, brk[None, :], tol_rel=tol_rel, tol_abs=1e-15)
    if not res.converged[0] or failed:
        raise QuadratureError(f"rhs_F did not converge (error estimate {res.error[0]:.3e})",
                              res.value[0], res.error[0])
    out = res.value[0]
    if assembly == "uncancelled" and not field.time_independent:
        out = out + _boundary_remainder(p, field, phi, x, t)
    return out


# --------------------------------------------------------------------------- discretisation

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def _hat_profile(sigma, dx, d, tau, deriv=False):
    """int hat(s) J0(sigma sqrt(tau^2 - (d - s)^2)) Theta(tau - |d - s|) ds, hat of half-width dx.

    ``d`` (nd,), ``tau`` (nt,) -> (nt, nd).  With ``deriv`` returns the tau derivative
    instead: hat(d + tau) + hat(d - tau) - sigma tau int hat J1(sigma r)/r ds.
    """
    D = d[None, :]
    T = tau[:, None]
    out = np.zeros(np.broadcast(D, T).shape)
    for lo, hi, sgn in ((-dx, 0.0, 1.0), (0.0, dx, -1.0)):
        a = np.clip(D - T, lo, hi)
        b = np.clip(D + T, lo, hi)
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        for xg, wg in zip(_GL_X, _GL_W):
            s = mid + half * xg
            hat = 1.0 + sgn * s / dx
            r = np.sqrt(np.maximum(T * T - (D - s) ** 2, 0.0))
            if deriv:
                z = sigma * r
                q = np.where(z < 1e-4, 0.5 * sigma * sigma, sigma * sc.j1(np.maximum(z, 1e-300))
                             / np.maximum(r, 1e-300))
                out -= wg * half * hat * T * q
            else:
                out += wg * half * hat * sc.j0(sigma * r)
    if deriv:
        hatf = lambda y: np.maximum(1.0 - np.abs(y) / dx, 0.0)
        out += hatf(D + T) + hatf(D - T)
    return out


class _Wright:
    """Chebyshev tables of phi(-alpha, rho; -z) for the four rho the solver needs."""

    _cache = {}

    def __new__(cls, alpha, cutoff):
        key = (alpha, cutoff)
        if key not in cls._cache:
            self = super().__new__(cls)
            zmax = float(greenfn.kernel_cutoff(alpha, 1.0, cutoff=cutoff))
            m, sd = greenfn.kernel_moments(alpha)
            brk = [m + c * sd for c in greenfn._SPREAD]
            mk = lambda rho: specfun.WrightTable(alpha, rho, zmax, breaks=brk, tol=1e-13)
            self.a1, self.a2 = mk(1.0), mk(2.0)
            self.k1, self.k2 = mk(1.0 - alpha), mk(1.0 - 2 * alpha)
            self.edges = np.unique(np.concatenate([tb.edges for tb in (self.a1, self.a2, self.k1, self.k2)]))
            cls._cache[key] = self
        return cls._cache[key]


@dataclass
class Discretization:
    """Padded grid plus the weight tables of the discrete operator A and of F."""

    p: GreenParams
    grid: GridSpec
    cutoff: float
    xs: np.ndarray = field(init=False)
    inner: slice = field(init=False)
    Q: int = field(init=False)
    n_tau: int = 0

    def __post_init__(self):
        g = self.grid
        self.dx = g.dx
        self.t = g.t
        a = self.p.alpha
        radius = float(greenfn.kernel_cutoff(a, g.T, cutoff=self.cutoff)) if a < 1 else g.T
        npad = int(np.ceil(radius / self.dx))
        self.pad = npad * self.dx
        self.xs = g.x_min + self.dx * np.arange(-npad, g.nx + npad)
        self.inner = slice(npad, npad + g.nx)
        self.Q = npad + 1
        self.uniform = g.uniform_time
        self._build()

    # tau quadrature nodes covering the kernel features for the given times s
    def _tau_rule(self, svals, tmax):
        a = self.p.alpha
        top = (float(greenfn.kernel_cutoff(a, tmax, cutoff=self.cutoff)) if a < 1 else tmax) + self.dx
        brk = [np.arange(0.0, top + 0.5 * self.dx, 0.5 * self.dx), [top]]
        s = np.asarray(svals, float)
        s = s[s > 0]
        if a < 1:
            # the adaptive panels of the Wright tables mark where each kernel varies
            z = _Wright(a, self.cutoff).edges
            brk.append((s[:, None] ** a * z[None, :]).ravel())
        else:
            brk.append(s)
        b = np.concatenate(brk)
        b = np.unique(b[(b >= 0) & (b <= top)])
        return gauss_legendre_panels(b, 10)

    def _omega(self, sa, sb, tau):
        """Weights of the two end nodes of time intervals with lags [sa, sb] (each (n,)).

        Returns (P, Q), each (n, ntau): P for the node at lag sb, Q for the node at sa.
        """
        a = self.p.alpha
        sa = np.asarray(sa, float)[:, None]
        sb = np.asarray(sb, float)[:, None]
        T = tau[None, :]
        d = sb - sa
        if a == 1.0:
            inside = (T >= sa) & (T <= sb)
            P = np.where(inside, (T - sa) / d, 0.0)
            Qw = np.where(inside, (sb - T) / d, 0.0)
            return P, Qw
        tab = _Wright(a, self.cutoff)
        with np.errstate(divide="ignore"):
            za = np.where(sa > 0, T / np.where(sa > 0, sa, 1.0) ** a, np.inf)
        zb = T / sb ** a
        A1a = np.where(np.isfinite(za), tab.a1(np.where(np.isfinite(za), za, 0.0)), 0.0)
        A1b = tab.a1(zb)
        A2a = np.where(np.isfinite(za), sa * tab.a2(np.where(np.isfinite(za), za, 0.0)), 0.0)
        A2b = sb * tab.a2(zb)
        dA2 = (A2b - A2a) / d
        return A1b - dA2, -A1a + dA2

    def _space(self, tau):
        q = self.dx * np.arange(self.Q + 1)
        H = _hat_profile(self.p.sigma, self.dx, q, tau)
        return 0.5 * np.exp(1j * self.p.gamma * tau)[:, None] * H

    def _mirror(self, W):
        return np.concatenate([W[..., :0:-1], W], axis=-1)

    def _build(self):
        t = self.t
        nt = t.size
        a = self.p.alpha
        if self.uniform:
            h = t[1] - t[0]
            lags = h * np.arange(nt)
            tau, wt = self._tau_rule(lags, t[-1])
            H = self._space(tau) * wt[:, None]
            P, Qw = self._omega(lags[:-1], lags[1:], tau)
            lagw = np.zeros((nt, tau.size))
            lagw[:-1] += Qw
            lagw[1:] += P
            self.W_lag = self._mirror(lagw @ H)                 # (nt, 2Q+1), lag m >= 0
            self.W_first = self._mirror(P @ H)                  # (nt-1,) row i-1: node v=0 at lag i
            self.n_tau = tau.size
            self._build_F(tau, wt, H)
            return
        # graded: weights per target time
        self.W_full = np.zeros((nt, nt, 2 * self.Q + 1), dtype=complex)
        self.V = np.zeros((3, nt, 2 * self.Q + 1), dtype=complex)
        for i in range(1, nt):
            s = t[i] - t[: i + 1]
            tau, wt = self._tau_rule(s, t[i])
            H = self._space(tau) * wt[:, None]
            P, Qw = self._omega(s[1:], s[:-1], tau)
            w = np.zeros((i + 1, tau.size))
            w[:-1] += P
            w[1:] += Qw
            self.W_full[i, : i + 1] = self._mirror(w @ H)
            self.n_tau = max(self.n_tau, tau.size)
            self.V[:, i] = self._F_row(t[i], tau, wt, H)

    def _F_row(self, ti, tau, wt, H):
        a = self.p.alpha
        if a == 1.0:
            q = self.dx * np.arange(self.Q + 1)
            tt = np.array([ti])
            Hs = 0.5 * np.exp(1j * self.p.gamma * ti) * _hat_profile(self.p.sigma, self.dx, q, tt)[0]
            dH = 0.5 * np.exp(1j * self.p.gamma * ti) * _hat_profile(self.p.sigma, self.dx, q, tt, True)[0]
            # d_t H - i gamma H leaves only the derivative of the phase-free profile
            return np.stack([self._mirror(dH), self._mirror(Hs), self._mirror(Hs)])
        tab = _Wright(a, self.cutoff)
        z = tau / ti ** a
        k1 = ti ** (-a) * tab.k1(z)
        k2 = ti ** (-2 * a) * tab.k2(z)
        v1 = self._mirror(k1 @ H)
        v2 = self._mirror(k2 @ H)
        return np.stack([v2 - 1j * self.p.gamma * v1, v1, v1])

    def _build_F(self, tau, wt, H):
        nt = self.t.size
        self.V = np.zeros((3, nt, 2 * self.Q + 1), dtype=complex)
        for i in range(1, nt):
            self.V[:, i] = self._F_row(self.t[i], tau, wt, H)

    # ------------------------------------------------------------------ operators

    def _xconv(self, Wq, S):
        """sum_q Wq[q] S[a - q] along the spatial axis of S (.., nx, 2)."""
        Q = self.Q
        out = signal.fftconvolve(S, Wq[..., None], mode="full", axes=(-2,))
        return out[..., Q: Q + S.shape[-2], :]

    def F(self, field, phi):
        """F on the padded grid, shape (nt, nxp, 2); row 0 is the initial data."""
        if phi.phi0_deriv is None or phi.phih_deriv is None:
            raise ValueError("the solver needs the derivative callables of the initial data")
        Q = self.Q
        xe = self.xs[0] + self.dx * np.arange(-Q, self.xs.size + Q)
        f0, fh = phi(xe)
        g0, gh = phi.derivative(xe)
        e = field.phase(xe, 0.0)
        d0 = np.stack([f0, fh], -1)
        d1 = np.stack([g0, -gh], -1)
        d2 = 1j * self.p.sigma * _apply_K(e, d0)
        nt = self.t.size
        out = np.zeros((nt, self.xs.size, 2), dtype=complex)
        out[0] = d0[Q:-Q]
        for i in range(1, nt):
            acc = 0
            for k, dat in ((0, d0), (1, d1), (2, d2)):
                c = signal.fftconvolve(dat, self.V[k, i][:, None], mode="full", axes=(0,))
                acc = acc + c[2 * Q: 2 * Q + self.xs.size]
            out[i] = acc
        return out

    def prepare(self, field):
        """Per-field data for :meth:`apply`: phases, f_x and the L1 matrix."""
        X, T = np.meshgrid(self.xs, self.t)
        self._e = field.phase(X, T)
        self._fx = np.asarray(field.f_x(X, T), float) * np.ones_like(X)
        self._commute = not field.time_independent
        self._ft = None
        if self._commute and self.p.alpha == 1.0 and field.f_t is not None:
            # first-order commutator: d_t(K E) - K d_t E = K_t E exactly
            self._ft = np.asarray(field.f_t(X, T), float) * np.ones_like(X)
        elif self._commute:
            self._l1 = fraccalc.l1_weights(self.t, self.p.alpha)

    def M(self, S):
        e = self._e
        out = 1j * self._fx[..., None] * _apply_K(e, S)
        if self._ft is not None:
            KS = _apply_K(e, S)
            out += 1j * self._ft[..., None] * KS * np.array([1.0, -1.0])
        elif self._commute:
            # C[S]_j = sum_k L1[j,k] (K_k - K_j) S_k
            KS = _apply_K(e, S)
            for j in range(1, S.shape[0]):
                w = self._l1[j, : j + 1]
                part = np.tensordot(w, KS[: j + 1], axes=(0, 0))
                ej = e[j][:, None]
                kj = np.stack([ej[:, 0] * np.tensordot(w, S[: j + 1, :, 1], axes=(0, 0)),
                               np.tensordot(w, S[: j + 1, :, 0], axes=(0, 0)) / ej[:, 0]], -1)
                out[j] += part - kj
        return out

    def apply(self, S):
        """A S on the padded grid; S is the full stack (nt, nxp, 2) including row 0."""
        M = self.M(S)
        nt, nx = S.shape[:2]
        out = np.zeros_like(S)
        if self.uniform:
            # rows j >= 1 convolve with the lag table, row 0 with the half-hat table
            conv = signal.fftconvolve(M[1:], self.W_lag[:, :, None], mode="full", axes=(0, 1))
            Q = self.Q
            out[1:] = conv[: nt - 1, Q: Q + nx]
            first = signal.fftconvolve(M[0][None], self.W_first[:, :, None], mode="full", axes=(1,))
            out[1:] += first[:, Q: Q + nx]
        else:
            for i in range(1, nt):
                acc = 0
                for j in range(i + 1):
                    acc = acc + self._xconv(self.W_full[i, j], M[j])
                out[i] = acc
        return 1j * self.p.sigma * out


# --------------------------------------------------------------------------- dense tables

@dataclass
class KernelTable:
    """Dense blocks ``values[i, a, j, b]`` (2x2) of a discrete kernel on the padded grid.

    Row (i, a) is the target (t_i, x_a), column (j, b) the source.  Blocks are nonzero
    only for j <= i and i >= 1; the diagonal-in-time block is the product-integration
    weight of the last time interval.  ``slice_norms[i]`` is the largest block entry
    with target time t_i.
    """

    grid: GridSpec
    values: np.ndarray
    order: int = 1
    bound: float | None = None

    def __post_init__(self):
        v = self.values
        nt = v.shape[0]
        if not np.all(np.isfinite(v)):
            raise ValueError("kernel table entries must be finite")
        future = ~np.tril(np.ones((nt, nt), bool))
        future[0] = True
        vt = v.transpose(0, 2, 1, 3, 4, 5)
        leak = np.abs(vt[future]).max() if future.any() else 0.0
        if leak > 1e-12 * max(np.abs(v).max(), 1e-300):
            raise ValueError("kernel violates causality")
        # FFT round-off only: store exact zeros
        vt[future] = 0.0
        self.slice_norms = np.abs(v).reshape(nt, -1).max(axis=1)

    @property
    def shape(self):
        return self.values.shape

    def matrix(self):
        nt, nx = self.values.shape[:2]
        n = nt * nx * 2
        return self.values.transpose(0, 1, 4, 2, 3, 5).reshape(n, n)

    @classmethod
    def from_matrix(cls, grid, Mx, nt, nx, order=1, bound=None):
        v = Mx.reshape(nt, nx, 2, nt, nx, 2).transpose(0, 1, 3, 4, 2, 5)
        return cls(grid, v, order, bound)

    def apply(self, S):
        nt, nx = self.values.shape[:2]
        return (self.matrix() @ S.reshape(-1)).reshape(nt, nx, 2)


_DENSE_LIMIT = 4000


def kernel_table(p: GreenParams, field: DisplacementField, grid: GridSpec, cutoff=1e-10,
                 disc: Discretization | None = None):
    """Dense table of the discrete operator A (= -i sigma K1 integrated against the hats)."""
    disc = disc or Discretization(p, grid, cutoff)
    disc.prepare(field)
    nt, nx = disc.t.size, disc.xs.size
    n = nt * nx * 2
    if n > _DENSE_LIMIT:
        raise ValueError(f"dense kernel tables are capped at {_DENSE_LIMIT} unknowns, got {n}")
    cols = np.zeros((n, n), dtype=complex)
    for c in range(n):
        e = np.zeros(n, dtype=complex)
        e[c] = 1.0
        cols[:, c] = disc.apply(e.reshape(nt, nx, 2)).ravel()
    tab = KernelTable.from_matrix(grid, cols, nt, nx)
    tab.disc = disc
    return tab


def iterate_kernel(prev: KernelTable, k1: KernelTable) -> KernelTable:
    """K_n = K_{n-1} o K_1 (matrix product over the source/target grid)."""
    if prev.values.shape != k1.values.shape or prev.grid != k1.grid:
        raise ValueError("kernel tables live on different grids")
    nt, nx = k1.values.shape[:2]
    out = KernelTable.from_matrix(k1.grid, prev.matrix() @ k1.matrix(), nt, nx, prev.order + 1)
    out.disc = getattr(k1, "disc", None)
    return out


def _ml_envelope(n1, n2, beta):
    """Mittag-Leffler envelope of sum_n |K_n| with the decay shape c^n Gamma(beta)^n / Gamma(n beta).

    The constants are fitted to the measured sup-norms of K_1 and K_2:
    |K_n| <= n1 Gamma(beta) w^(n-1) / Gamma(n beta), summing to n1 Gamma(beta) E_{beta,beta}(w).
    """
    if n1 == 0.0:
        return 0.0
    w = (n2 / n1) * sc.gamma(2 * beta) / sc.gamma(beta)
    if w > 50:
        return np.inf
    return float(n1 * sc.gamma(beta) * np.real(specfun.ml_array(beta, beta, np.array([w]))[0]))


def resolvent(k1: KernelTable, tol, max_order=200, beta=None) -> KernelTable:
    """R = sum_{n>=1} K_n, stopped when the next term's sup-norm is below ``tol``.

    ``bound`` on the result is the fitted Mittag-Leffler envelope with ``beta``
    (default alpha/2, i.e. theta = 1/2).
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    nt, nx = k1.values.shape[:2]
    L = k1.matrix()
    term = L.copy()
    R = L.copy()
    n = 1
    while np.abs(term).max() >= tol:
        if n >= max_order:
            raise ResolventError(f"resolvent series not below {tol} after {max_order} terms")
        term = term @ L
        R += term
        n += 1
    if beta is None:
        disc = getattr(k1, "disc", None)
        beta = 0.5 * (disc.p.alpha if disc is not None else 1.0)
    n2 = float(np.abs(L @ L).max()) if n > 1 else 0.0
    bound = _ml_envelope(float(np.abs(L).max()), n2, beta)
    out = KernelTable.from_matrix(k1.grid, R, nt, nx, order=n, bound=bound)
    out.disc = getattr(k1, "disc", None)
    return out


# --------------------------------------------------------------------------- solvers

def _neumann(disc, F, tol, max_order):
    E = F.copy()
    term = F
    norms = []
    n = 0
    while True:
        term = disc.apply(term)
        nrm = float(np.abs(term[:, disc.inner]).max()) if term.size else 0.0
        norms.append(nrm)
        E += term
        n += 1
        if not np.isfinite(nrm):
            raise ResolventError("Neumann series produced non-finite terms")
        if nrm < tol:
            break
        if n >= max_order:
            raise ResolventError(f"Neumann series not below {tol} after {max_order} terms "
                                 f"(last term {nrm:.3e})")
        if n > 5 and nrm > 1e3 * max(norms[:5]):
            raise ResolventError("Neumann series diverges")
    return E, n, term, norms


def solve(p: GreenParams, field: DisplacementField, phi: InitialData, grid: GridSpec,
          tol=1e-6, max_order=400, cutoff=None):
    """Sampled solution E = F + R F on ``grid``.

    The window is padded by the Wright-kernel decay radius with relative cutoff
    ``cutoff`` (default tol/10).  ``error`` holds the magnitude of the first omitted
    Neumann term; ``metadata['residual']`` is the sup-norm of E - F - A E on the grid.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    start = _time.perf_counter()
    cutoff = cutoff if cutoff is not None else min(tol / 10, 1e-6)
    disc = Discretization(p, grid, cutoff)
    disc.prepare(field)
    F = disc.F(field, phi)
    if not np.all(np.isfinite(F)):
        raise ResolventError("initial data or field give non-finite values in the free term")
    E, order, last, norms = _neumann(disc, F, tol, max_order)
    if not np.all(np.isfinite(E)):
        raise ResolventError("Neumann series produced non-finite values")
    res = E - F - disc.apply(E)
    inner = disc.inner
    err = np.abs(disc.apply(last)[:, inner]).max(axis=-1)
    meta = {
        "solver": "classical" if p.alpha == 1.0 else "resolvent",
        "alpha": p.alpha, "gamma": p.gamma, "sigma": p.sigma,
        "tol": tol, "cutoff": cutoff,
        "truncation_order": order,
        "term_norms": norms,
        "residual": float(np.abs(res[:, inner]).max()),
        "pad": disc.pad, "n_tau": disc.n_tau,
        "runtime": _time.perf_counter() - start,
    }
    return WaveFieldTable(grid, E[:, inner, 0], E[:, inner, 1], meta, err)


def solve_classical(gamma, sigma, field: DisplacementField, phi: InitialData, grid: GridSpec,
                    tol=1e-8, max_order=1000):
    """alpha = 1: G = 1/2 e^{i gamma t} J0(sigma sqrt(t^2 - x^2)) on the cone |x| <= t."""
    return solve(GreenParams(1.0, gamma, sigma), field, phi, grid, tol=tol, max_order=max_order)
