"""Grids, sampled wavefields and their CSV form."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

__all__ = ["GridSpec", "AmplitudePair", "WaveFieldTable", "CSV_HEADER"]

CSV_HEADER = ("x", "t", "re_E0", "im_E0", "re_Eh", "im_Eh", "abs2_E0", "abs2_Eh")


@dataclass(frozen=True)
class GridSpec:
    """Uniform space grid times a (possibly graded) time grid.

    Time nodes are ``T (j/(nt-1))**(1/grading)``; ``grading = 1`` is uniform.
    """

    x_min: float
    x_max: float
    nx: int
    T: float
    nt: int
    grading: float = 1.0

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"x_min must be below x_max ({self.x_min} >= {self.x_max})")
        if self.nx < 2 or self.nt < 2:
            raise ValueError("nx and nt must be at least 2")
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")
        if not self.grading > 0:
            raise ValueError(f"grading must be positive, got {self.grading}")

    @property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def t(self):
        return self.T * (np.arange(self.nt) / (self.nt - 1)) ** (1.0 / self.grading)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def uniform_time(self):
        return self.grading == 1.0

    def refined(self, factor=2):
        """Grid with both steps divided by ``factor``."""
        return GridSpec(self.x_min, self.x_max, factor * (self.nx - 1) + 1, self.T,
                        factor * (self.nt - 1) + 1, self.grading)


@dataclass(frozen=True)
class AmplitudePair:
    """The two-beam amplitude (E0, Eh); scalars or equally shaped arrays."""

    e0: complex
    eh: complex

    def __post_init__(self):
        if not (np.all(np.isfinite(self.e0)) and np.all(np.isfinite(self.eh))):
            raise ValueError("amplitudes must be finite")

    def as_array(self):
        return np.stack([np.asarray(self.e0, complex), np.asarray(self.eh, complex)], axis=-1)


@dataclass
class WaveFieldTable:
    """Solution sampled on ``grid``: ``e0[i, j]`` and ``eh[i, j]`` at ``(t[i], x[j])``."""

    grid: GridSpec
    e0: np.ndarray
    eh: np.ndarray
    metadata: dict = field(default_factory=dict)
    error: np.ndarray | None = None

    def __post_init__(self):
        shape = (self.grid.nt, self.grid.nx)
        self.e0 = np.asarray(self.e0, dtype=complex)
        self.eh = np.asarray(self.eh, dtype=complex)
        if self.e0.shape != shape or self.eh.shape != shape:
            raise ValueError(f"expected arrays of shape {shape}")

    def rows(self):
        X, T = np.meshgrid(self.grid.x, self.grid.t)
        e0 = self.e0.ravel()
        eh = self.eh.ravel()
        return np.column_stack([X.ravel(), T.ravel(), e0.real, e0.imag, eh.real, eh.imag,
                                np.abs(e0) ** 2, np.abs(eh) ** 2])

    def to_csv(self, path=None):
        """Write (or return) the CSV text: fixed header, 17 significant digits, ``\\n`` endings."""
        out = io.StringIO()
        out.write(",".join(CSV_HEADER) + "\n")
        for r in self.rows():
            out.write(",".join(f"{v:.17g}" for v in r) + "\n")
        text = out.getvalue()
        if path is not None:
            with open(path, "w", newline="\n") as fh:
                fh.write(text)
        return text

    @staticmethod
    def read_csv(path):
        """Parse a CSV written by :meth:`to_csv` into an ``(n, 8)`` array."""
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if tuple(header) != CSV_HEADER:
                raise ValueError(f"{path}: unexpected header {header}")
            return np.array([[float(v) for v in row] for row in reader])
