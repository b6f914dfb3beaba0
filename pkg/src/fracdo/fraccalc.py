"""Fractional integrals and derivatives of sampled functions.

All operators integrate the power kernel exactly against the piecewise-linear
interpolant of the samples (product integration, the "L1" family of schemes).
The right-sided operators are the left-sided ones applied to the reflected
function ``s -> g(b - s)`` where ``b`` is the terminal point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as sc

__all__ = [
    "SampledFunction",
    "FracOrder",
    "rl_integral",
    "rl_derivative",
    "gc_derivative",
    "graded_mesh",
    "l1_weights",
]


@dataclass(frozen=True)
class SampledFunction:
    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("need at least two nodes")
        if values.shape[:1] != nodes.shape:
            raise ValueError(f"values has length {values.shape[0]}, nodes has {nodes.size}")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, g, nodes):
        nodes = np.asarray(nodes, dtype=float)
        return cls(nodes, np.asarray(g(nodes)))

    def reflected(self):
        """Samples of ``s -> g(b - s)`` on ``[0, b - a]``."""
        b = self.nodes[-1]
        return SampledFunction(b - self.nodes[::-1], self.values[::-1])


@dataclass(frozen=True)
class FracOrder:
    nu: float

    def check_caputo(self):
        if not (0.0 < self.nu <= 1.0):
            raise ValueError(f"Caputo order must lie in (0, 1], got {self.nu}")


def graded_mesh(T, n, grading=1.0):
    """Nodes ``T (j/n)**(1/grading)``, clustered at 0 for ``grading < 1``."""
    if T <= 0 or n < 1 or grading <= 0:
        raise ValueError("graded_mesh needs T > 0, n >= 1, grading > 0")
    return T * (np.arange(n + 1) / n) ** (1.0 / grading)


def _nu(nu):
    return nu.nu if isinstance(nu, FracOrder) else float(nu)


def _clip_mesh(g, t):
    """Nodes and values of the interpolant restricted to [a, t], plus the origin a."""
    s = g.nodes
    a = s[0]
    if not (a <= t <= s[-1] * (1 + 1e-14) + 1e-300):
        raise ValueError(f"t={t} lies outside the sampled range [{a}, {s[-1]}]")
    t = min(t, s[-1])
    j = np.searchsorted(s, t, side="right")
    nodes = s[:j]
    vals = g.values[:j]
    if nodes[-1] < t:
        gt = g.values[j - 1] + (g.values[j] - g.values[j - 1]) * (t - s[j - 1]) / (s[j] - s[j - 1])
        nodes = np.append(nodes, t)
        vals = np.concatenate([vals, np.asarray(gt)[None]])
    return nodes - a, vals, t - a


def _left_integral(g, q, t):
    nodes, vals, tt = _clip_mesh(g, t)
    if nodes.size < 2 or tt == 0.0:
        return 0.0 * vals[0]
    A = tt - nodes[:-1]
    B = tt - nodes[1:]
    h = np.diff(nodes)
    slope = np.diff(vals, axis=0) / h.reshape((-1,) + (1,) * (vals.ndim - 1))
    i0 = (A ** q - B ** q) / q
    i1 = A * i0 - (A ** (q + 1) - B ** (q + 1)) / (q + 1)
    ex = lambda w: w.reshape((-1,) + (1,) * (vals.ndim - 1))
    return np.sum(ex(i0) * vals[:-1] + ex(i1) * slope, axis=0) * sc.rgamma(q)


def _left_derivative(g, nu, t):
    nodes, vals, tt = _clip_mesh(g, t)
    if tt == 0.0:
        if nu == 0.0:
            return vals[0]
        raise ValueError("the Riemann-Liouville derivative is singular at the origin")
    q = 1.0 - nu
    A = tt - nodes[:-1]
    B = tt - nodes[1:]
    slope = np.diff(vals, axis=0) / np.diff(nodes).reshape((-1,) + (1,) * (vals.ndim - 1))
    w = (A ** q - B ** q) * sc.rgamma(q + 1)
    body = np.sum(w.reshape((-1,) + (1,) * (vals.ndim - 1)) * slope, axis=0)
    return vals[0] * tt ** (-nu) * sc.rgamma(q) + body


def _side(g, t, side):
    if side in ("left", "left-from-0"):
        return g, t
    if side in ("right", "right-to-terminal"):
        return g.reflected(), g.nodes[-1] - t
    raise ValueError(f"unknown side {side!r}")


def rl_integral(g: SampledFunction, nu, t, side="left"):
    """Riemann-Liouville integral of order ``nu < 0``.

    Left: ``(1/Gamma(-nu)) int_a^t g(s) (t-s)**(-nu-1) ds``; right: the mirror
    image with terminal point ``b = nodes[-1]``.
    """
    nu = _nu(nu)
    if not nu < 0:
        raise ValueError(f"rl_integral needs nu < 0, got {nu}")
    g, tt = _side(g, t, side)
    return _left_integral(g, -nu, tt)


def rl_derivative(g: SampledFunction, nu, t, side="left"):
    """Riemann-Liouville derivative of order ``nu`` in [0, 1).

    Exact derivative of the order ``nu - 1`` integral of the interpolant:
    ``g(a) (t-a)**(-nu) / Gamma(1-nu) + sum_j slope_j [(t-s_j)**(1-nu) - (t-s_{j+1})**(1-nu)] / Gamma(2-nu)``.
    """
    nu = _nu(nu)
    if not (0.0 <= nu < 1.0):
        raise ValueError(f"rl_derivative needs nu in [0, 1), got {nu}")
    g, tt = _side(g, t, side)
    return _left_derivative(g, nu, tt)


def gc_derivative(g: SampledFunction, alpha, t):
    """Gerasimov-Caputo derivative of order ``alpha`` in (0, 1] from the left end.

    For ``alpha = 1`` this is the slope of the interpolant on the segment ending at ``t``.
    """
    a = alpha if isinstance(alpha, FracOrder) else FracOrder(float(alpha))
    a.check_caputo()
    nodes, vals, tt = _clip_mesh(g, t)
    if tt == 0.0:
        return 0.0 * vals[0]
    slope = np.diff(vals, axis=0) / np.diff(nodes).reshape((-1,) + (1,) * (vals.ndim - 1))
    if a.nu == 1.0:
        return slope[-1]
    q = 1.0 - a.nu
    w = ((tt - nodes[:-1]) ** q - (tt - nodes[1:]) ** q) * sc.rgamma(q + 1)
    return np.sum(w.reshape((-1,) + (1,) * (vals.ndim - 1)) * slope, axis=0)


def l1_weights(nodes, alpha):
    """Lower-triangular matrix ``W`` with ``(W @ g)[i]`` the Caputo derivative at ``nodes[i]``.

    ``nodes[0]`` is the origin; row 0 is zero.
    """
    s = np.asarray(nodes, dtype=float)
    n = s.size
    W = np.zeros((n, n))
    h = np.diff(s)
    for i in range(1, n):
        if alpha == 1.0:
            W[i, i] = 1.0 / h[i - 1]
            W[i, i - 1] = -1.0 / h[i - 1]
            continue
        q = 1.0 - alpha
        t = s[i]
        b = ((t - s[:i]) ** q - (t - s[1:i + 1]) ** q) * sc.rgamma(q + 1) / h[:i]
        W[i, 1:i + 1] += b
        W[i, :i] -= b
    return W
