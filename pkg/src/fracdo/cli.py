"""Scenario runner.

    fracdo run <config> [--out PATH] [--verbose]
    fracdo compare <a.csv> <b.csv> [--threshold X] [--verbose]

Exit codes: 0 success, 1 validation error, 2 solver failure, 3 comparison above threshold.

Configuration files are ``key = value`` lines; ``#`` starts a comment.  Keys:

    solver    closed-form | resolvent | classical
    alpha, gamma, sigma
    field     linear | expr
    a, b      coefficients of f = a x + b       (field = linear)
    f         expression in x, t                (field = expr)
    f_x, f_t  optional expressions; complex-step derivatives of f otherwise
    initial   constant | expr                   (constant means E(x, 0) = (1, 0))
    phi0, phih            expressions in x      (initial = expr; may use i)
    phi0_x, phih_x        optional derivatives; central differences otherwise
    x_min, x_max, nx, T, nt, grading
    tol       solver tolerance
    output    CSV path (overridden by --out)
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .exprs import Expression, ExpressionError
from .greenfn import GreenParams
from .linear_field_solver import InitialData, LinearFieldParams, propagate, solve_constant_ic
from .quadrature import QuadratureError
from .resolvent_solver import DisplacementField, ResolventError, solve
from .specfun import ConvergenceError
from .wavefield import CSV_HEADER, GridSpec, WaveFieldTable

__all__ = ["ConfigError", "ScenarioConfig", "parse_config", "serialize_config", "run", "compare", "main"]

SOLVERS = ("closed-form", "resolvent", "classical")
EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_THRESHOLD = 0, 1, 2, 3


class ConfigError(ValueError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class ScenarioConfig:
    solver: str = "resolvent"
    alpha: float = 1.0
    gamma: float = 0.0
    sigma: float = 1.0
    field: str = "linear"
    a: float = 0.0
    b: float = 0.0
    f: str = ""
    f_x: str = ""
    f_t: str = ""
    initial: str = "constant"
    phi0: str = ""
    phih: str = ""
    phi0_x: str = ""
    phih_x: str = ""
    x_min: float = -1.0
    x_max: float = 1.0
    nx: int = 64
    T: float = 1.0
    nt: int = 64
    grading: float = 1.0
    tol: float = 1e-6
    output: str = ""

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ConfigError("solver", f"must be one of {', '.join(SOLVERS)}, got {self.solver!r}")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError("alpha", f"must lie in (0, 1], got {self.alpha}")
        if self.solver == "classical" and self.alpha != 1.0:
            raise ConfigError("alpha", "the classical solver needs alpha = 1")
        if not self.sigma > 0:
            raise ConfigError("sigma", f"must be positive, got {self.sigma}")
        if not self.tol > 0:
            raise ConfigError("tol", f"must be positive, got {self.tol}")
        if self.field not in ("linear", "expr"):
            raise ConfigError("field", f"must be linear or expr, got {self.field!r}")
        if self.field == "expr" and not self.f:
            raise ConfigError("f", "field = expr needs an expression f")
        if self.solver == "closed-form" and self.field != "linear":
            raise ConfigError("field", "the closed-form solver needs field = linear")
        if self.initial not in ("constant", "expr"):
            raise ConfigError("initial", f"must be constant or expr, got {self.initial!r}")
        if self.initial == "expr" and not (self.phi0 and self.phih):
            raise ConfigError("phi0", "initial = expr needs both phi0 and phih")
        for key in ("f", "f_x", "f_t", "phi0", "phih", "phi0_x", "phih_x"):
            text = getattr(self, key)
            if text:
                try:
                    ex = Expression(text)
                except ExpressionError as exc:
                    raise ConfigError(key, str(exc)) from None
                if key.startswith("f") and ex.is_complex:
                    raise ConfigError(key, "the displacement field must be real")
        try:
            self.grid
        except ValueError as exc:
            raise ConfigError("grid", str(exc)) from None

    @property
    def grid(self):
        return GridSpec(self.x_min, self.x_max, self.nx, self.T, self.nt, self.grading)

    def displacement(self):
        if self.field == "linear":
            return DisplacementField.linear(self.a, self.b)
        f = Expression(self.f)
        h = 1e-20

        def deriv(text, which):
            if text:
                ex = Expression(text)
                return lambda x, t: np.real(ex(x, t)).astype(float)
            # complex step: exact to rounding for the analytic expressions allowed here
            if which == "x":
                return lambda x, t: np.imag(f(np.asarray(x, float) + 1j * h, t)) / h
            return lambda x, t: np.imag(f(x, np.asarray(t, float) + 1j * h)) / h

        ft = deriv(self.f_t, "t")
        fixed = not self.f_t and "t" not in {n.id for n in _names(self.f)}
        return DisplacementField(lambda x, t: np.real(f(x, t)).astype(float), deriv(self.f_x, "x"), ft, fixed)

    def initial_data(self):
        if self.initial == "constant":
            return InitialData.constant(1.0, 0.0)
        e0, eh = Expression(self.phi0), Expression(self.phih)

        def fn(ex):
            return lambda x: np.asarray(ex(x, 0.0), complex)

        def dfn(ex, text):
            if text:
                return fn(Expression(text))
            g = fn(ex)
            d = 1e-4
            return lambda x: (8 * (g(x + d) - g(x - d)) - (g(x + 2 * d) - g(x - 2 * d))) / (12 * d)

        return InitialData(fn(e0), fn(eh), dfn(e0, self.phi0_x), dfn(eh, self.phih_x))


def _names(text):
    import ast
    return [n for n in ast.walk(ast.parse(text, mode="eval")) if isinstance(n, ast.Name)]


_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def parse_config(text: str) -> ScenarioConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(key, "unknown key")
        if key in values:
            raise ConfigError(key, "given twice")
        kind = _TYPES[key]
        try:
            if kind == "float":
                values[key] = float(value)
            elif kind == "int":
                values[key] = int(value)
            else:
                values[key] = value
        except ValueError:
            raise ConfigError(key, f"expected {kind}, got {value!r}") from None
    return ScenarioConfig(**values)


def serialize_config(cfg: ScenarioConfig) -> str:
    """Key-value text; only keys that differ from the defaults, in field order."""
    default = {f.name: f.default for f in fields(ScenarioConfig)}
    lines = []
    for f in fields(ScenarioConfig):
        v = getattr(cfg, f.name)
        if v == default[f.name] and f.name not in ("solver", "alpha", "gamma", "sigma"):
            continue
        lines.append(f"{f.name} = {v!r}" if isinstance(v, float) else f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


def _closed_form(cfg: ScenarioConfig):
    p = LinearFieldParams(cfg.alpha, cfg.gamma, cfg.sigma, cfg.a, cfg.b)
    grid = cfg.grid
    X, T = np.meshgrid(grid.x, grid.t)
    if cfg.initial == "constant":
        sol = solve_constant_ic(p, X, T, tol=min(cfg.tol, 1e-10))
        return WaveFieldTable(grid, sol.e0, sol.eh, {"solver": "closed-form"})
    phi = cfg.initial_data()
    e0 = np.empty(X.shape, complex)
    eh = np.empty(X.shape, complex)
    e0[0], eh[0] = phi(grid.x)
    for i, t in enumerate(grid.t[1:], 1):
        for j, x in enumerate(grid.x):
            s = propagate(p, phi, x, t, tol=cfg.tol)
            e0[i, j], eh[i, j] = s.e0, s.eh
    return WaveFieldTable(grid, e0, eh, {"solver": "closed-form"})


def run(cfg: ScenarioConfig):
    """Solve the scenario; returns ``(table, report)``."""
    start = time.perf_counter()
    if cfg.solver == "closed-form":
        table = _closed_form(cfg)
    else:
        alpha = 1.0 if cfg.solver == "classical" else cfg.alpha
        table = solve(GreenParams(alpha, cfg.gamma, cfg.sigma), cfg.displacement(), cfg.initial_data(),
                      cfg.grid, tol=cfg.tol)
    report = {"version": __version__, "config": {f.name: getattr(cfg, f.name) for f in fields(cfg)}}
    report.update({k: v for k, v in table.metadata.items()})
    report["runtime"] = time.perf_counter() - start
    report["max_abs2_sum"] = float(np.max(np.abs(table.e0) ** 2 + np.abs(table.eh) ** 2))
    return table, report


def _read_table(path):
    data = WaveFieldTable.read_csv(path)
    e0 = data[:, 2] + 1j * data[:, 3]
    eh = data[:, 4] + 1j * data[:, 5]
    return data[:, :2], e0, eh


def compare(path_a, path_b):
    """Sup-norm and L2 (root-mean-square over grid points) differences per component."""
    xa, e0a, eha = _read_table(path_a)
    xb, e0b, ehb = _read_table(path_b)
    if xa.shape != xb.shape or not np.array_equal(xa, xb):
        raise ValueError(f"{path_a} and {path_b} are sampled on different grids")
    out = {}
    for name, u, v in (("E0", e0a, e0b), ("Eh", eha, ehb)):
        d = np.abs(u - v)
        out[name] = {"sup": float(d.max()) if d.size else 0.0,
                     "l2": float(np.sqrt(np.mean(d ** 2))) if d.size else 0.0}
    out["sup"] = max(out["E0"]["sup"], out["Eh"]["sup"])
    return out


def _parser():
    ap = argparse.ArgumentParser(prog="fracdo", description="Fractional dynamical-diffraction wavefields.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="solve a scenario and write the CSV wavefield")
    r.add_argument("config")
    r.add_argument("--out", help="CSV path (default: the config's output key, else stdout)")
    r.add_argument("--verbose", action="store_true")
    c = sub.add_parser("compare", help="compare two CSV wavefields")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--threshold", type=float, default=None)
    c.add_argument("--verbose", action="store_true")
    return ap


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.command == "compare":
        try:
            rep = compare(args.a, args.b)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(json.dumps(rep, indent=2 if args.verbose else None))
        if args.threshold is not None and rep["sup"] > args.threshold:
            print(f"sup difference {rep['sup']:.3e} exceeds threshold {args.threshold:.3e}", file=sys.stderr)
            return EXIT_THRESHOLD
        return EXIT_OK

    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or cfg.output or None
    try:
        table, report = run(cfg)
    except (ConvergenceError, QuadratureError, ResolventError, ValueError, FloatingPointError) as exc:
        print(f"solver error ({cfg.solver}, alpha={cfg.alpha}): {exc}", file=sys.stderr)
        return EXIT_SOLVER
    text = table.to_csv(out)
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out + ".report.json", "w") as fh:
            json.dump(report, fh, indent=2, default=float)
    if args.verbose:
        brief = {k: v for k, v in report.items() if k not in ("config", "term_norms")}
        print(json.dumps(brief, indent=2, default=float), file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
