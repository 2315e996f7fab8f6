"""Experiment configuration, single runs and convergence sweeps.

A configuration is a TOML document with the sections ``domain``,
``function``, ``order``, ``operator`` and ``output``::

    [domain]
    a = 0.0
    b = 5.0
    n_real = 401
    h_factor = 1.1

    [function]
    preset = "sin_pi_x"        # or: expr = "sin(pi*x)"

    [order]
    constant = 0.75            # or: variable = "0.5 + 0.3*sin(4*pi*x)"

    [operator]
    name = "rl_integral"       # rl_derivative | caputo
    integration = "auxiliary"

Missing keys take the defaults of :class:`ExperimentConfig`.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from fracsph.analytic import covers, reference_values
from fracsph.domain import build_domain
from fracsph.errors import ConfigError, FracSPHError
from fracsph.expr import ParseError
from fracsph.fracops import (
    AuxValues,
    Formulation,
    Integration,
    Operator,
    OperatorRequest,
    OrderSpec,
    apply_operator,
)
from fracsph.functions import PRESETS, from_expression, preset
from fracsph.metrics import ErrorReport, error_report
from fracsph.sph import VirtualField, Window, sample_field

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "REFERENCE_PRESETS",
    "SweepResult",
    "load_config",
    "reference_preset",
    "run_experiment",
    "sweep_convergence",
]

log = logging.getLogger(__name__)

THREADS_ENV = "FRACSPH_THREADS"


@dataclass(frozen=True)
class ExperimentConfig:
    # domain
    a: float = 0.0
    b: float = 5.0
    n_real: int = 401
    h_factor: float = 1.1
    rho0: float = 1.0
    virtual_field: str = "analytic"
    # function: exactly one of preset / expr
    function_preset: Optional[str] = "sin_pi_x"
    function_expr: Optional[str] = None
    # order: exactly one of constant / variable
    alpha: Optional[float] = 0.75
    alpha_expr: Optional[str] = None
    # operator
    operator: str = "rl_integral"
    formulation: str = "nonsingular"
    integration: str = "standard"
    window: str = "open"
    aux_values: str = "average"
    corrected: bool = True
    eta: Optional[float] = None
    reference: str = "analytic"
    # output
    output_dir: str = "out"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name in ("a", "b", "h_factor", "rho0"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(_key(name), f"must be a finite number, got {value!r}")
        if not self.b > self.a:
            raise ConfigError("domain.b", f"must exceed domain.a={self.a!r}")
        if not isinstance(self.n_real, int) or isinstance(self.n_real, bool) or self.n_real < 2:
            raise ConfigError("domain.n_real", f"need an integer >= 2, got {self.n_real!r}")
        if self.h_factor < 1.0:
            raise ConfigError("domain.h_factor", f"must be >= 1, got {self.h_factor!r}")
        if self.rho0 <= 0:
            raise ConfigError("domain.rho0", f"must be positive, got {self.rho0!r}")
        if (self.function_preset is None) == (self.function_expr is None):
            raise ConfigError("function", "give exactly one of 'preset' or 'expr'")
        if self.function_preset is not None and self.function_preset not in PRESETS:
            raise ConfigError(
                "function.preset", f"unknown preset {self.function_preset!r}; choose from {sorted(PRESETS)}"
            )
        if (self.alpha is None) == (self.alpha_expr is None):
            raise ConfigError("order", "give exactly one of 'constant' or 'variable'")
        if self.eta is not None and not (isinstance(self.eta, (int, float)) and self.eta >= 0):
            raise ConfigError("operator.eta", f"must be a non-negative number, got {self.eta!r}")
        if self.reference not in ("analytic", "quadrature"):
            raise ConfigError("operator.reference", f"must be 'analytic' or 'quadrature', got {self.reference!r}")
        for name, enum_type in (
            ("virtual_field", VirtualField),
            ("operator", Operator),
            ("formulation", Formulation),
            ("integration", Integration),
            ("window", Window),
            ("aux_values", AuxValues),
        ):
            value = getattr(self, name)
            try:
                enum_type(value)
            except ValueError:
                choices = ", ".join(m.value for m in enum_type)
                raise ConfigError(_key(name), f"got {value!r}; choose from {choices}") from None
        try:
            self.order_spec().validate(self.a, self.b)
        except (ParseError, FracSPHError) as exc:
            raise ConfigError("order.constant" if self.alpha is not None else "order.variable", str(exc)) from exc
        try:
            self.test_function()
        except (ParseError, FracSPHError) as exc:
            raise ConfigError("function.expr", str(exc)) from exc

    @property
    def spacing(self) -> float:
        return (self.b - self.a) / (self.n_real - 1)

    @property
    def h(self) -> float:
        return self.h_factor * self.spacing

    def order_spec(self) -> OrderSpec:
        if self.alpha is not None:
            return OrderSpec.constant(self.alpha)
        return OrderSpec.variable(self.alpha_expr)

    def test_function(self):
        if self.function_preset is not None:
            return preset(self.function_preset)
        return from_expression(self.function_expr)

    def request(self) -> OperatorRequest:
        return OperatorRequest(
            operator=self.operator,
            order=self.order_spec(),
            lower_bound=float(self.a),
            formulation=self.formulation,
            integration=self.integration,
            window=self.window,
            aux_values=self.aux_values,
            corrected=self.corrected,
            eta=self.eta,
        )

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        """Nested view mirroring the TOML layout (used for the summary echo)."""
        function = {"preset": self.function_preset} if self.function_preset else {"expr": self.function_expr}
        order = {"constant": self.alpha} if self.alpha is not None else {"variable": self.alpha_expr}
        operator = {
            "name": self.operator,
            "formulation": self.formulation,
            "integration": self.integration,
            "window": self.window,
            "aux_values": self.aux_values,
            "corrected": self.corrected,
            "eta": self.eta,
            "reference": self.reference,
        }
        return {
            "domain": {
                "a": self.a,
                "b": self.b,
                "n_real": self.n_real,
                "h_factor": self.h_factor,
                "rho0": self.rho0,
                "virtual_field": self.virtual_field,
            },
            "function": function,
            "order": order,
            "operator": operator,
            "output": {"dir": self.output_dir},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        sections = {"domain", "function", "order", "operator", "output"}
        unknown = set(data) - sections
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown section")
        kwargs = {}
        domain = dict(data.get("domain", {}))
        for key in ("a", "b", "n_real", "h_factor", "rho0", "virtual_field"):
            if key in domain:
                kwargs[key] = domain.pop(key)
        _no_leftovers("domain", domain)

        function = dict(data.get("function", {}))
        if function:
            kwargs["function_preset"] = function.pop("preset", None)
            kwargs["function_expr"] = function.pop("expr", None)
            _no_leftovers("function", function)

        order = dict(data.get("order", {}))
        if order:
            kwargs["alpha"] = order.pop("constant", None)
            kwargs["alpha_expr"] = order.pop("variable", None)
            _no_leftovers("order", order)
            if kwargs["alpha"] is not None and not isinstance(kwargs["alpha"], (int, float)):
                raise ConfigError("order.constant", f"must be a number, got {kwargs['alpha']!r}")

        operator = dict(data.get("operator", {}))
        if "name" in operator:
            kwargs["operator"] = operator.pop("name")
        for key in ("formulation", "integration", "window", "aux_values", "corrected", "eta", "reference"):
            if key in operator:
                kwargs[key] = operator.pop(key)
        _no_leftovers("operator", operator)

        output = dict(data.get("output", {}))
        if "dir" in output:
            kwargs["output_dir"] = output.pop("dir")
        _no_leftovers("output", output)
        for key in ("a", "b", "h_factor", "rho0"):
            if isinstance(kwargs.get(key), int) and not isinstance(kwargs[key], bool):
                kwargs[key] = float(kwargs[key])
        return cls(**kwargs)


_SECTION = {
    "a": "domain", "b": "domain", "n_real": "domain", "h_factor": "domain",
    "rho0": "domain", "virtual_field": "domain", "operator": "operator",
}


def _key(name: str) -> str:
    if name == "operator":
        return "operator.name"
    return f"{_SECTION.get(name, 'operator')}.{name}"


def _no_leftovers(section: str, remaining: dict) -> None:
    if remaining:
        raise ConfigError(f"{section}.{sorted(remaining)[0]}", "unknown key")


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("file", f"{path}: {exc}") from exc
    return ExperimentConfig.from_dict(data)


_VO_ORDER = "0.5 + 0.3*sin(4*pi*x)"

#: configurations behind the reference results in the README
REFERENCE_PRESETS = {
    "caputo_cos_co": dict(function_preset="cos_pi_x", operator="caputo"),
    "rl_derivative_sin_co": dict(function_preset="sin_pi_x", operator="rl_derivative"),
    "rl_integral_sin_co": dict(function_preset="sin_pi_x", operator="rl_integral"),
    "rl_integral_sin_co_aux": dict(function_preset="sin_pi_x", operator="rl_integral", integration="auxiliary"),
    "caputo_cos_vo": dict(function_preset="cos_pi_x", operator="caputo", alpha=None, alpha_expr=_VO_ORDER),
    "rl_integral_sin_vo": dict(function_preset="sin_pi_x", operator="rl_integral", alpha=None, alpha_expr=_VO_ORDER),
    "rl_integral_sin_vo_aux": dict(
        function_preset="sin_pi_x", operator="rl_integral", integration="auxiliary",
        alpha=None, alpha_expr=_VO_ORDER,
    ),
}


def reference_preset(name: str, **overrides) -> ExperimentConfig:
    try:
        base = REFERENCE_PRESETS[name]
    except KeyError:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {sorted(REFERENCE_PRESETS)}") from None
    return ExperimentConfig(**{**base, "output_dir": f"out/{name}", **overrides})


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    config: ExperimentConfig
    x: np.ndarray
    approx: np.ndarray
    reference: np.ndarray
    report: ErrorReport
    reference_used: str
    wall_time_ms: float

    def summary(self) -> dict:
        r = self.report
        return {
            "config": self.config.to_dict(),
            "reference_used": self.reference_used,
            "l2": r.l2,
            "l2_absolute": r.l2_absolute,
            "r2": r.r2,
            "r2_defined": r.r2_defined,
            "n_points": r.n_points,
            "excluded_points": r.excluded_points,
            "wall_time_ms": self.wall_time_ms,
        }


def _reference(cfg: ExperimentConfig, fn, x):
    op, order = Operator(cfg.operator), cfg.order_spec()
    mode = cfg.reference
    if mode == "analytic" and not covers(fn, op, order, cfg.a):
        log.info("no closed form for %s of %s; falling back to quadrature", op.value, fn.name)
        mode = "quadrature"
    return reference_values(fn, op, order, x, cfg.a, mode, span=cfg.b - cfg.a), mode


def _fmt(v: float) -> str:
    return "nan" if math.isnan(v) else repr(float(v))


def write_points(path, x, approx, reference, abs_errors) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "approx", "reference", "abs_error"])
        for row in zip(x, approx, reference, abs_errors):
            writer.writerow([_fmt(v) for v in row])


def run_experiment(cfg: ExperimentConfig, out_dir=None, write: bool = True) -> ExperimentResult:
    """Evaluate one operator and compare it with its reference.

    With ``write`` set, ``points.csv`` and ``summary.json`` go to ``out_dir``
    (default ``cfg.output_dir``).
    """
    start = time.perf_counter()
    fn = cfg.test_function()
    domain = build_domain(cfg.a, cfg.b, cfg.n_real, cfg.h, cfg.rho0)
    samples = sample_field(domain, fn, cfg.virtual_field)
    result = apply_operator(domain, samples, cfg.request(), exact=fn)
    x = domain.real_positions
    reference, mode = _reference(cfg, fn, x)
    exclude = result.singular | ~np.isfinite(reference)
    report = error_report(result.values, reference, exclude=exclude)
    elapsed = (time.perf_counter() - start) * 1e3
    out = ExperimentResult(cfg, x, result.values, reference, report, mode, elapsed)
    if write:
        target = Path(out_dir if out_dir is not None else cfg.output_dir)
        target.mkdir(parents=True, exist_ok=True)
        write_points(target / "points.csv", x, result.values, reference, report.abs_errors)
        with open(target / "summary.json", "w") as fh:
            json.dump(out.summary(), fh, indent=2)
            fh.write("\n")
    return out


@dataclass(frozen=True)
class SweepResult:
    """Convergence table with least-squares slopes.

    ``slope`` fits ``log l2`` against ``log s`` (the observed order, positive
    when errors shrink with refinement); ``slope_vs_n`` fits against
    ``log n_real`` and is negative for a converging scheme.
    """

    rows: list  # (n_real, s, l2, r2)
    slope: Optional[float]
    slope_vs_n: Optional[float] = None

    @property
    def slope_defined(self) -> bool:
        return self.slope is not None


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        return max(int(raw), 1)
    except ValueError:
        raise ConfigError(THREADS_ENV, f"must be a positive integer, got {raw!r}") from None


def sweep_convergence(cfg: ExperimentConfig, levels, out_dir=None, write: bool = True) -> SweepResult:
    """Re-run ``cfg`` at each particle count in ``levels``.

    Writes one run directory per level plus ``convergence.csv`` and fits
    log-log slopes by least squares (undefined for a single level).
    """
    levels = [int(n) for n in levels]
    if not levels:
        raise ConfigError("levels", "need at least one level")
    if any(n < 2 for n in levels) or any(b <= a for a, b in zip(levels, levels[1:])):
        raise ConfigError("levels", f"must be strictly increasing integers >= 2, got {levels}")
    root = Path(out_dir if out_dir is not None else cfg.output_dir)

    def one(n):
        return run_experiment(cfg.replace(n_real=n), out_dir=root / f"level_{n}", write=write)

    with ThreadPoolExecutor(max_workers=min(thread_count(), len(levels))) as pool:
        results = list(pool.map(one, levels))

    rows = [(r.config.n_real, r.config.spacing, r.report.l2, r.report.r2) for r in results]
    slope = slope_vs_n = None
    if len(rows) > 1:
        e = np.log([row[2] for row in rows])
        slope = float(np.polyfit(np.log([row[1] for row in rows]), e, 1)[0])
        slope_vs_n = float(np.polyfit(np.log([row[0] for row in rows]), e, 1)[0])
    if write:
        root.mkdir(parents=True, exist_ok=True)
        with open(root / "convergence.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["n_real", "s", "l2", "r2"])
            for n, s_, l2, r2 in rows:
                writer.writerow([n, repr(s_), repr(l2), "" if r2 is None else repr(r2)])
    return SweepResult(rows, slope, slope_vs_n)
