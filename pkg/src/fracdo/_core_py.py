"""Pure NumPy implementation of the hot kernels (fallback for the compiled core).

The Wright functions phi(-alpha, rho; -x) for rho in {1, 1-alpha, 0, 1-2alpha,
-alpha, 2} are evaluated from Zolotarev-type integral representations over
phi in (0, pi).  With

    Z = x**(1/(1-alpha)),
    A(phi) = sin(alpha phi)**(alpha/(1-alpha)) sin((1-alpha) phi) / sin(phi)**(1/(1-alpha)),
    J_m = (1/pi) int_0^pi (Z A)**m exp(-(Z A - Z A(0))) dphi,

every member of the family is ``exp(-Z A(0))`` times a short combination of the
moments J_m.  All integrands are positive, so there is no cancellation for large
x, which is exactly where the power series fails.
"""
from __future__ import annotations

import numpy as np
from scipy import special as sc

from .quadrature import gk_batch

KINDS = ("1", "1-a", "0", "1-2a", "-a", "2")

_N = np.arange(1, 18)
# ln(sin x / x) = sum_n LSINC[n-1] x**(2n)
LSINC = (-1.0) ** _N * 2.0 ** (2 * _N - 1) * sc.bernoulli(2 * _N[-1])[2 * _N] / (_N * sc.factorial(2 * _N))

_UMAX = np.log(np.pi / 2)
_VMAX = 700.0


def kind_rho(alpha, kind):
    return {"1": 1.0, "1-a": 1.0 - alpha, "0": 0.0, "1-2a": 1.0 - 2.0 * alpha,
            "-a": -alpha, "2": 2.0}[kind]


def ln_a0(alpha):
    e = 1.0 - alpha
    return np.log(e) + alpha * np.log(alpha) / e


def delta_lo(alpha, phi):
    """ln A(phi) - ln A(0) for phi in [0, pi/2], accurate near phi = 0."""
    e = 1.0 - alpha
    la = np.log1p(-e)
    coef = LSINC * (alpha * np.expm1(2 * _N * la) / e + np.expm1(2 * _N * np.log(e)))
    phi = np.asarray(phi, dtype=float)
    out = np.empty_like(phi)
    sm = phi <= 1.0
    x2 = phi[sm] ** 2
    acc = np.zeros_like(x2)
    for c in coef[::-1]:
        acc = acc * x2 + c
    out[sm] = acc * x2
    pb = phi[~sm]
    d = np.pi - pb
    s = np.sin(d)
    L = np.log1p(-2.0 * np.cos(0.5 * (1 + alpha) * pb) * np.sin(0.5 * e * pb) / s)
    out[~sm] = alpha * (L - la) / e + np.log(np.sin(e * pb) / (e * pb)) - np.log(s / pb)
    return out


def delta_hi(alpha, v):
    """ln A - ln A(0) at phi = pi - exp(-v), for v >= -ln(pi/2)."""
    d = np.exp(-np.asarray(v, dtype=float))
    e = 1.0 - alpha
    phi = np.pi - d
    la = np.log1p(-e)
    s = np.sin(d)
    L = np.log1p(2.0 * np.cos(d + 0.5 * e * phi) * np.sin(0.5 * e * phi) / s)
    return alpha * (L - la) / e + np.log(np.sin(e * phi) / (e * phi)) - np.log(s / phi)


def ep_scaled(p, lx):
    """exp(x) * E_p(x) at x = exp(lx) for p > 1 (generalised exponential integral)."""
    lx = np.asarray(lx, dtype=float)
    out = np.empty_like(lx)
    big = lx >= 0.0
    if big.any():
        # beyond e^600 the integrand weight exp(-excess) is zero anyway
        xb = np.exp(np.minimum(lx[big], 600.0))
        # modified Lentz continued fraction, iterating only on unconverged entries
        b = xb + p
        c = np.full_like(xb, 1e300)
        d = 1.0 / b
        h = d.copy()
        act = np.arange(xb.size)
        for i in range(1, 400):
            an = -i * (p - 1 + i)
            b[act] += 2
            d[act] = 1.0 / (an * d[act] + b[act])
            c[act] = b[act] + an / c[act]
            de = c[act] * d[act]
            h[act] *= de
            act = act[np.abs(de - 1.0) >= 1e-16]
            if act.size == 0:
                break
        out[big] = h
    sm = ~big
    if sm.any():
        lxs = lx[sm]
        xs = np.exp(lxs)
        n = int(np.rint(p))
        dl = p - n
        s = np.zeros_like(xs)
        for k in range(30):
            if k == n - 1:
                continue
            s -= (-xs) ** k / (sc.factorial(k) * (k + 1 - p))
        # the k = n-1 term and the Gamma(1-p) x**(p-1) term combined without cancellation
        if dl == 0:
            br = (sc.psi(n) - lxs) / sc.factorial(n - 1)
        else:
            if abs(dl) < 1e-2:
                dg = sum(sc.polygamma(j - 1, n) * dl ** j / sc.factorial(j) for j in range(1, 8))
            else:
                dg = sc.gammaln(n + dl) - sc.gammaln(n)
            ex = dl * lxs - np.log(np.sinc(dl)) - dg
            br = -np.expm1(ex) / (sc.factorial(n - 1) * dl)
        out[sm] = (s + (-1) ** (n - 1) * np.exp((n - 1) * lxs) * br) * np.exp(xs)
    return out


def excess(l0, dl):
    """Z A - Z A(0) = exp(l0) expm1(dl), finite for any l0 and dl >= 0."""
    with np.errstate(divide="ignore"):
        return np.exp(l0 + dl + np.log1p(-np.exp(-dl)))


def _bisect(f, lo, hi, target, n):
    lo = np.full_like(target, lo)
    hi = np.full_like(target, hi)
    for _ in range(n):
        mid = 0.5 * (lo + hi)
        big = f(mid) > target
        hi = np.where(big, mid, hi)
        lo = np.where(big, lo, mid)
    return 0.5 * (lo + hi)


def _targets(alpha, l0):
    """Delta values at which the integrands get breakpoints."""
    # decades below ZA = 1e-3 matter when A(0) Z is tiny (alpha near 1)
    floor = np.log(1e-17) / alpha
    lys = list(np.arange(np.log(1e-3), floor, -np.log(10.0)))
    lys += [np.log(v) for v in (0.1, 1.0, 5.0, 20.0)]
    tg = [ly - l0 for ly in lys]
    # cut where Z (A - A0) = 60: beyond it the integrand is below e^-60
    tg.append(np.logaddexp(0.0, np.log(60.0) - l0))
    return tg


def _moments(alpha, x, ms, tol_rel):
    """Scaled moments J_m exp(-m max(l0, 0)) with l0 = ln(Z A(0))."""
    e = 1.0 - alpha
    l0 = np.log(x) / e + ln_a0(alpha)
    d_half = float(delta_lo(alpha, np.array([np.pi / 2]))[0])
    tg = _targets(alpha, l0)
    lo_pts = [np.zeros_like(x)]
    for t in tg:
        inner = _bisect(lambda p: delta_lo(alpha, p), 0.0, np.pi / 2, np.clip(t, 0.0, d_half), 64)
        lo_pts.append(np.where(t <= 0, 0.0, np.where(t >= d_half, np.pi / 2, inner)))
    lo_cut = lo_pts[-1]
    lo_pts.append(np.full_like(x, np.pi / 2))
    lo_edges = np.minimum(np.sort(np.stack(lo_pts, 1), 1), lo_cut[:, None])
    hi_pts = [_bisect(lambda v: delta_hi(alpha, v), -_UMAX, _VMAX, np.maximum(t, d_half), 80) for t in tg]
    v_cut = hi_pts[-1]
    hi_edges = np.sort(np.stack([np.full_like(x, -_UMAX)] + hi_pts, 1), 1)
    hi_edges = np.minimum(hi_edges, v_cut[:, None])
    lp = np.maximum(l0, 0.0)
    # the exponent carries absolute rounding error ~ eps * |l0 + Delta|
    rtol = np.maximum(tol_rel, 50.0 * np.finfo(float).eps * (np.abs(l0) + np.log(60.0) + 1.0))
    p = 1.0 / alpha
    out = []
    for m in ms:
        def expo(dl, rows, m=m):
            r0 = l0[rows][:, None]
            ex = -excess(r0, dl)
            if m == "ep":
                return ex
            return ex + m * (dl + r0 - lp[rows][:, None])

        def f_lo(ph, rows, m=m):
            dl = delta_lo(alpha, ph.ravel()).reshape(ph.shape)
            w = np.exp(expo(dl, rows))
            if m == "ep":
                w = w * ep_scaled(p, (dl + l0[rows][:, None]).ravel()).reshape(dl.shape)
            return w

        def f_hi(v, rows, m=m):
            dl = delta_hi(alpha, v)
            w = np.exp(expo(dl, rows) - v)
            if m == "ep":
                w = w * ep_scaled(p, (dl + l0[rows][:, None]).ravel()).reshape(dl.shape)
            return w

        with np.errstate(over="ignore", invalid="ignore"):
            i1 = gk_batch(f_lo, lo_edges, tol_rel=rtol).value
            i2 = gk_batch(f_hi, hi_edges, tol_rel=rtol).value
        out.append((i1 + i2) / np.pi)
    return l0, out


def wright_family(alpha, kind, x, tol_rel=1e-13):
    """Mantissa ``m`` and log-scale ``s`` with phi(-alpha, rho; -x) = m * exp(s).

    ``alpha`` in (0, 1), ``x > 0`` array, ``kind`` one of :data:`KINDS`.  Points
    whose exponent exceeds the double range return ``(0, -inf)``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    e = 1.0 - alpha
    l0 = np.log(x) / e + ln_a0(alpha)
    ok = l0 < 700.0
    m = np.zeros_like(x)
    s = np.full_like(x, -np.inf)
    if not ok.any():
        return m, s
    xo = x[ok]
    need = {"1": [0], "1-a": [1], "0": [1], "1-2a": [1, 2], "-a": [1, 2], "2": ["ep"]}[kind]
    l0, J = _moments(alpha, xo, need, tol_rel)
    za0 = np.exp(l0)
    lp = np.maximum(l0, 0.0)
    el = np.exp(-lp)
    if kind == "1":
        mo, so = J[0], -za0
    elif kind == "2":
        mo, so = (e / alpha) * J[0], -za0
    elif kind == "0":
        mo, so = alpha / e * J[0], lp - za0
    elif kind == "1-a":
        mo, so = J[0] / (e * xo), lp - za0
    elif kind == "1-2a":
        mo, so = (J[1] - alpha * el * J[0]) / (e * xo) ** 2, 2 * lp - za0
    else:
        mo, so = -(alpha / e) / (e * xo) * (el * J[0] - J[1]), 2 * lp - za0
    m[ok] = mo
    s[ok] = so
    return m, s
