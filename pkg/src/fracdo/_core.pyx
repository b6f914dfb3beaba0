# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Wright-family kernel: the same integral representation as
:mod:`fracdo._core_py`, evaluated point by point with a scalar adaptive
Gauss-Kronrod rule instead of batched NumPy passes."""
import numpy as np
from scipy import special as sc

from libc.math cimport exp, log, log1p, expm1, sin, cos, fabs, pow, INFINITY, M_PI
from libc.stdlib cimport malloc, free

from ._core_py import KINDS, kind_rho, ln_a0, LSINC, delta_lo as _py_delta_lo

cdef enum:
    NCOEF = 17
    MAXI = 4000
    NT = 512

cdef double[15] XK
cdef double[15] WK15
cdef double[15] WK7

_XK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

cdef int _i
for _i in range(7):
    XK[_i] = -_XK[_i]
    XK[14 - _i] = _XK[_i]
    WK15[_i] = _WK[_i]
    WK15[14 - _i] = _WK[_i]
    WK7[_i] = 0.0
    WK7[14 - _i] = 0.0
XK[7] = 0.0
WK15[7] = _WK[7]
WK7[7] = _WG[3]
for _i in range(3):
    WK7[1 + 2 * _i] = _WG[_i]
    WK7[13 - 2 * _i] = _WG[_i]

cdef double EPS = np.finfo(float).eps
cdef double UMAX = log(M_PI / 2)
cdef double VMAX = 700.0


cdef struct Ctx:
    double alpha
    double e
    double la
    double l0
    double lp
    double coef[NCOEF]
    int nm
    int ms[2]
    # exp(x) E_p(x) parameters
    double p
    double dl
    double c0
    double fact
    double psi_n
    int n


cdef inline double c_delta_lo(Ctx* c, double phi) noexcept nogil:
    cdef double x2, acc, pb, d, s, L
    cdef int j
    if phi <= 1.0:
        x2 = phi * phi
        acc = 0.0
        for j in range(NCOEF - 1, -1, -1):
            acc = acc * x2 + c.coef[j]
        return acc * x2
    pb = phi
    d = M_PI - pb
    s = sin(d)
    L = log1p(-2.0 * cos(0.5 * (1 + c.alpha) * pb) * sin(0.5 * c.e * pb) / s)
    return c.alpha * (L - c.la) / c.e + log(sin(c.e * pb) / (c.e * pb)) - log(s / pb)


cdef inline double c_delta_hi(Ctx* c, double v) noexcept nogil:
    cdef double d = exp(-v)
    cdef double phi = M_PI - d
    cdef double s = sin(d)
    cdef double L = log1p(2.0 * cos(d + 0.5 * c.e * phi) * sin(0.5 * c.e * phi) / s)
    return c.alpha * (L - c.la) / c.e + log(sin(c.e * phi) / (c.e * phi)) - log(s / phi)


cdef double c_ep_scaled(Ctx* c, double lx) noexcept nogil:
    cdef double x, b, cc, d, h, an, de, s, br, ex, term, kf
    cdef int i, k
    if lx >= 0.0:
        if lx > 600.0:
            lx = 600.0
        x = exp(lx)
        b = x + c.p
        cc = 1e300
        d = 1.0 / b
        h = d
        for i in range(1, 400):
            an = -i * (c.p - 1 + i)
            b += 2
            d = 1.0 / (an * d + b)
            cc = b + an / cc
            de = cc * d
            h *= de
            if fabs(de - 1.0) < 1e-16:
                break
        return h
    x = exp(lx)
    s = 0.0
    term = 1.0
    kf = 1.0
    for k in range(30):
        if k > 0:
            term *= -x
            kf *= k
        if k == c.n - 1:
            continue
        s -= term / (kf * (k + 1 - c.p))
    if c.dl == 0.0:
        br = (c.psi_n - lx) / c.fact
    else:
        ex = c.dl * lx + c.c0
        br = -expm1(ex) / (c.fact * c.dl)
    if (c.n - 1) % 2 == 0:
        return (s + exp((c.n - 1) * lx) * br) * exp(x)
    return (s - exp((c.n - 1) * lx) * br) * exp(x)


cdef inline double c_excess(double l0, double dl) noexcept nogil:
    if dl <= 0.0:
        return 0.0
    return exp(l0 + dl + log1p(-exp(-dl)))


cdef inline void c_integrand(Ctx* c, int panel, double u, double* out) noexcept nogil:
    cdef double dl, base, w
    cdef int j, m
    if panel == 0:
        dl = c_delta_lo(c, u)
        base = -c_excess(c.l0, dl)
    else:
        dl = c_delta_hi(c, u)
        base = -c_excess(c.l0, dl) - u
    for j in range(c.nm):
        m = c.ms[j]
        if m < 0:
            w = exp(base)
            if w != 0.0:
                w *= c_ep_scaled(c, dl + c.l0)
        else:
            w = exp(base + m * (dl + c.l0 - c.lp))
        out[j] = w


cdef void c_rule(Ctx* c, int panel, double a, double b, double* res, double* err) noexcept nogil:
    cdef double ctr = 0.5 * (a + b)
    cdef double hw = 0.5 * (b - a)
    cdef double fv[15][2]
    cdef double k, g, rabs, rasc, mean, e
    cdef int i, j
    for i in range(15):
        c_integrand(c, panel, ctr + hw * XK[i], fv[i])
    for j in range(c.nm):
        k = 0.0
        g = 0.0
        rabs = 0.0
        for i in range(15):
            k += WK15[i] * fv[i][j]
            g += WK7[i] * fv[i][j]
            rabs += WK15[i] * fabs(fv[i][j])
        mean = 0.5 * k
        rasc = 0.0
        for i in range(15):
            rasc += WK15[i] * fabs(fv[i][j] - mean)
        k *= hw
        g *= hw
        rabs *= fabs(hw)
        rasc *= fabs(hw)
        e = fabs(k - g)
        if rasc != 0.0 and e != 0.0:
            e = rasc * min(1.0, pow(200.0 * e / rasc, 1.5))
        e = max(e, 50.0 * EPS * rabs)
        res[j] = k
        err[j] = e


cdef void c_adapt(Ctx* c, int panel, double* edges, int ne, double rtol,
                  double* ia, double* ib, double* ir, double* ie, double* out) noexcept nogil:
    """Global adaptive GK: bisect the worst interval until sum(err) <= rtol * |I|."""
    cdef int n = 0, i, j, worst, it
    cdef double tot[2]
    cdef double etot, mag, emax, ew, mid
    for i in range(ne - 1):
        if edges[i + 1] > edges[i]:
            ia[n] = edges[i]
            ib[n] = edges[i + 1]
            c_rule(c, panel, ia[n], ib[n], &ir[2 * n], &ie[2 * n])
            n += 1
    for it in range(MAXI):
        tot[0] = 0.0
        tot[1] = 0.0
        etot = 0.0
        worst = -1
        emax = -1.0
        for i in range(n):
            ew = 0.0
            for j in range(c.nm):
                tot[j] += ir[2 * i + j]
                ew = max(ew, ie[2 * i + j])
            etot += ew
            if ew > emax and ib[i] - ia[i] > 1e-14 * (fabs(ia[i]) + fabs(ib[i])):
                emax = ew
                worst = i
        mag = 0.0
        for j in range(c.nm):
            mag = max(mag, fabs(tot[j]))
        if etot <= rtol * mag or worst < 0 or n >= MAXI:
            break
        mid = 0.5 * (ia[worst] + ib[worst])
        ia[n] = mid
        ib[n] = ib[worst]
        ib[worst] = mid
        c_rule(c, panel, ia[worst], ib[worst], &ir[2 * worst], &ie[2 * worst])
        c_rule(c, panel, ia[n], ib[n], &ir[2 * n], &ie[2 * n])
        n += 1
    for j in range(c.nm):
        out[j] = tot[j]


cdef double c_bisect(Ctx* c, int panel, double lo, double hi, double target, int n) noexcept nogil:
    cdef double mid, f
    cdef int i
    for i in range(n):
        mid = 0.5 * (lo + hi)
        f = c_delta_lo(c, mid) if panel == 0 else c_delta_hi(c, mid)
        if f > target:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


cdef int _cmp_sort(double* a, int n) noexcept nogil:
    cdef int i, j
    cdef double t
    for i in range(1, n):
        t = a[i]
        j = i - 1
        while j >= 0 and a[j] > t:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = t
    return 0


cdef void c_moments(Ctx* c, double x, double tol_rel, double d_half, double* ly, int nly,
                    double* ia, double* ib, double* ir, double* ie, double* J) noexcept nogil:
    cdef double lo_e[NT]
    cdef double hi_e[NT]
    cdef double t, cut, vcut, rtol
    cdef double r1[2]
    cdef double r2[2]
    cdef int nl = 0, nh = 0, i, j
    c.l0 = log(x) / c.e + ln_a0_c(c.alpha, c.e)
    c.lp = max(c.l0, 0.0)
    cut = log(60.0) - c.l0
    cut = max(0.0, cut) + log1p(exp(-fabs(cut)))
    # lower panel phi in [0, pi/2]
    lo_e[nl] = 0.0
    nl += 1
    for i in range(nly + 1):
        t = cut if i == nly else ly[i] - c.l0
        if t <= 0.0 or t > cut:
            continue
        if t >= d_half:
            continue
        lo_e[nl] = c_bisect(c, 0, 0.0, M_PI / 2, t, 64)
        nl += 1
    if cut >= d_half:
        lo_e[nl] = M_PI / 2
        nl += 1
    _cmp_sort(lo_e, nl)
    # upper panel v in [-ln(pi/2), vcut]
    vcut = c_bisect(c, 1, -UMAX, VMAX, max(cut, d_half), 80)
    hi_e[nh] = -UMAX
    nh += 1
    if cut > d_half:
        for i in range(nly):
            t = ly[i] - c.l0
            if t <= d_half or t >= cut:
                continue
            hi_e[nh] = c_bisect(c, 1, -UMAX, VMAX, t, 80)
            nh += 1
        hi_e[nh] = vcut
        nh += 1
    _cmp_sort(hi_e, nh)
    rtol = max(tol_rel, 50.0 * EPS * (fabs(c.l0) + log(60.0) + 1.0))
    r1[0] = 0.0
    r1[1] = 0.0
    r2[0] = 0.0
    r2[1] = 0.0
    if nl > 1:
        c_adapt(c, 0, lo_e, nl, rtol, ia, ib, ir, ie, r1)
    if nh > 1:
        c_adapt(c, 1, hi_e, nh, rtol, ia, ib, ir, ie, r2)
    for j in range(c.nm):
        J[j] = (r1[j] + r2[j]) / M_PI


cdef inline double ln_a0_c(double alpha, double e) noexcept nogil:
    return log(e) + alpha * log(alpha) / e


def wright_family(double alpha, str kind, x, double tol_rel=1e-13):
    """Same contract as :func:`fracdo._core_py.wright_family`."""
    cdef double[::1] xv = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=float)))
    cdef Py_ssize_t n = xv.shape[0], i
    m_out = np.zeros(n)
    s_out = np.full(n, -INFINITY)
    cdef double[::1] mo = m_out
    cdef double[::1] so = s_out
    cdef Ctx c
    cdef int j
    cdef double e = 1.0 - alpha
    c.alpha = alpha
    c.e = e
    c.la = log1p(-e)
    coef = LSINC * (alpha * np.expm1(2 * np.arange(1, NCOEF + 1) * c.la) / e
                    + np.expm1(2 * np.arange(1, NCOEF + 1) * np.log(e)))
    for j in range(NCOEF):
        c.coef[j] = coef[j]
    need = {"1": [0], "1-a": [1], "0": [1], "1-2a": [1, 2], "-a": [1, 2], "2": [-1]}[kind]
    c.nm = len(need)
    for j in range(c.nm):
        c.ms[j] = need[j]
    cdef int code = KINDS.index(kind)
    # exp(x) E_p(x) constants, p = 1/alpha
    c.p = 1.0 / alpha
    c.n = int(np.rint(c.p))
    c.dl = c.p - c.n
    c.fact = sc.factorial(c.n - 1)
    c.psi_n = sc.psi(c.n)
    if c.dl != 0.0:
        if abs(c.dl) < 1e-2:
            dg = sum(sc.polygamma(k - 1, c.n) * c.dl ** k / sc.factorial(k) for k in range(1, 8))
        else:
            dg = sc.gammaln(c.n + c.dl) - sc.gammaln(c.n)
        c.c0 = -np.log(np.sinc(c.dl)) - dg
    else:
        c.c0 = 0.0
    d_half = float(_py_delta_lo(alpha, np.array([np.pi / 2]))[0])
    floor = np.log(1e-17) / alpha
    lys = list(np.arange(np.log(1e-3), floor, -np.log(10.0))) + [np.log(v) for v in (0.1, 1.0, 5.0, 20.0)]
    lys = lys[:NT - 8]
    cdef double[::1] ly = np.array(lys)
    cdef int nly = ly.shape[0]
    cdef double* ia = <double*> malloc(MAXI * sizeof(double))
    cdef double* ib = <double*> malloc(MAXI * sizeof(double))
    cdef double* ir = <double*> malloc(2 * MAXI * sizeof(double))
    cdef double* ie = <double*> malloc(2 * MAXI * sizeof(double))
    cdef double J[2]
    cdef double za0, el, xx, dh = d_half, lna0 = ln_a0_c(alpha, e)
    try:
        with nogil:
            for i in range(n):
                xx = xv[i]
                if log(xx) / e + lna0 >= 700.0:
                    continue
                c_moments(&c, xx, tol_rel, dh, &ly[0], nly, ia, ib, ir, ie, J)
                za0 = exp(c.l0)
                el = exp(-c.lp)
                if code == 0:
                    mo[i] = J[0]
                    so[i] = -za0
                elif code == 1:
                    mo[i] = J[0] / (e * xx)
                    so[i] = c.lp - za0
                elif code == 2:
                    mo[i] = alpha / e * J[0]
                    so[i] = c.lp - za0
                elif code == 3:
                    mo[i] = (J[1] - alpha * el * J[0]) / ((e * xx) * (e * xx))
                    so[i] = 2 * c.lp - za0
                elif code == 4:
                    mo[i] = -(alpha / e) / (e * xx) * (el * J[0] - J[1])
                    so[i] = 2 * c.lp - za0
                else:
                    mo[i] = (e / alpha) * J[0]
                    so[i] = -za0
    finally:
        free(ia)
        free(ib)
        free(ir)
        free(ie)
    return m_out, s_out
