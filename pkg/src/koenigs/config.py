"""Run configuration: JSON ingestion, validation and defaults."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .expressions import Const, HolomorphicMap
from .grid import GridSpec
from .hyperbolic import LEFT_HALF_PLANE, RIGHT_HALF_PLANE, FULL_PLANE, ModelDomain
from .parser import ParseError, parse

BUILTIN_KINDS = ("elliptic-rotation", "elliptic-contraction", "hyperbolic-group",
                 "parabolic-group")
KINDS = BUILTIN_KINDS + ("model", "generator")

_SEMIGROUP_KEYS = {"kind", "lambda", "tau", "theta", "x", "orientation", "h_expr", "G_expr",
                   "model", "rho"}


class ConfigError(ValueError):
    pass


def parse_complex(value, what: str) -> complex:
    """Accept a number, a ``[re, im]`` pair or a constant expression string."""
    if isinstance(value, bool):
        raise ConfigError(f"{what}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        try:
            node = parse(value)
        except ParseError as exc:
            raise ConfigError(f"{what}: {exc}") from exc
        if isinstance(node, Const):
            return node.value
    raise ConfigError(f"{what}: expected a number, [re, im] or a constant expression, "
                      f"got {value!r}")


def _positive(value, what):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be a number, got {value!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise ConfigError(f"{what} must be positive and finite, got {value!r}")
    return v


_MODEL_NAMES = {"strip": "strip", "right": "right", "right-half-plane": "right",
                "left": "left", "left-half-plane": "left", "plane": "plane"}


@dataclass(frozen=True)
class SemigroupConfig:
    kind: str
    lam: float | None = None
    tau: complex | None = None
    theta: float | None = None
    x: complex = 0j
    orientation: int = 1
    h_expr: str | None = None
    G_expr: str | None = None
    model: str | None = None
    rho: float | None = None

    def h(self) -> HolomorphicMap:
        return parse(self.h_expr)

    def G(self) -> HolomorphicMap:
        return parse(self.G_expr)

    def model_domain(self) -> ModelDomain | None:
        if self.model is None:
            return None
        if self.model == "strip":
            return ModelDomain.strip(self.rho)
        return {"right": RIGHT_HALF_PLANE, "left": LEFT_HALF_PLANE, "plane": FULL_PLANE}[self.model]

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        for key, value in (("lambda", self.lam), ("theta", self.theta), ("h_expr", self.h_expr),
                           ("G_expr", self.G_expr), ("model", self.model), ("rho", self.rho)):
            if value is not None:
                out[key] = value
        if self.tau is not None:
            out["tau"] = [self.tau.real, self.tau.imag]
        if self.kind == "elliptic-contraction":
            out["x"] = [self.x.real, self.x.imag]
        if self.kind == "parabolic-group":
            out["orientation"] = self.orientation
        return out


@dataclass(frozen=True)
class Tolerances:
    rate: float = 1e-4
    step: float = 1e-4
    newton: float = 1e-11


@dataclass(frozen=True)
class AnalysisConfig:
    horizon: float = 50.0
    max_horizon: float = 5e6
    dw_horizon: float = 1000.0
    grid: GridSpec = GridSpec()
    tolerances: Tolerances = Tolerances()
    seed: int = 0
    samples: int = 20


@dataclass(frozen=True)
class OutputConfig:
    report: str | None = None
    plots: str | None = None
    include_timings: bool = False


@dataclass(frozen=True)
class RunConfig:
    semigroup: SemigroupConfig
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def resolved(self) -> dict:
        """The configuration with every default filled in."""
        analysis = asdict(self.analysis)
        return {"semigroup": self.semigroup.to_dict(), "analysis": analysis,
                "output": asdict(self.output)}

    def digest(self) -> str:
        """SHA-256 of the analysis-relevant part of the resolved configuration."""
        data = self.resolved()
        del data["output"]
        text = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _semigroup(raw) -> SemigroupConfig:
    if not isinstance(raw, dict):
        raise ConfigError("'semigroup' must be an object")
    unknown = set(raw) - _SEMIGROUP_KEYS
    if unknown:
        raise ConfigError(f"unknown semigroup keys: {sorted(unknown)}")
    kind = raw.get("kind")
    if kind is None:
        if "h_expr" in raw and "G_expr" in raw:
            raise ConfigError("give exactly one of 'h_expr' and 'G_expr'")
        kind = "model" if "h_expr" in raw else "generator" if "G_expr" in raw else None
    if kind not in KINDS:
        raise ConfigError(f"semigroup.kind must be one of {', '.join(KINDS)}; got {kind!r}")
    kw: dict = {"kind": kind}
    if "tau" in raw:
        kw["tau"] = parse_complex(raw["tau"], "semigroup.tau")
    if kind in ("elliptic-contraction", "hyperbolic-group"):
        if "lambda" not in raw:
            raise ConfigError(f"{kind} needs 'lambda'")
        kw["lam"] = _positive(raw["lambda"], "semigroup.lambda")
    if kind == "elliptic-rotation":
        if "theta" not in raw:
            raise ConfigError("elliptic-rotation needs 'theta'")
        kw["theta"] = float(raw["theta"])
    if kind == "elliptic-contraction" and "x" in raw:
        kw["x"] = parse_complex(raw["x"], "semigroup.x")
        if not abs(kw["x"]) < 1:
            raise ConfigError("semigroup.x must lie in the unit disc")
    if kind == "parabolic-group":
        orientation = raw.get("orientation", 1)
        if orientation in ("+", "+1", 1):
            kw["orientation"] = 1
        elif orientation in ("-", "-1", -1):
            kw["orientation"] = -1
        else:
            raise ConfigError(f"orientation must be +1 or -1, got {orientation!r}")
    if kind in ("hyperbolic-group", "parabolic-group"):
        kw.setdefault("tau", 1 + 0j)
        if abs(abs(kw["tau"]) - 1) > 1e-12:
            raise ConfigError(f"semigroup.tau must lie on the unit circle, got {kw['tau']!r}")
    expr_key = {"model": "h_expr", "generator": "G_expr"}.get(kind)
    for key in ("h_expr", "G_expr"):
        if key in raw and key != expr_key:
            raise ConfigError(f"'{key}' does not apply to kind {kind!r}")
    if expr_key:
        text = raw.get(expr_key)
        if not isinstance(text, str):
            raise ConfigError(f"kind {kind!r} needs '{expr_key}'")
        try:
            parse(text)
        except ParseError as exc:
            raise ConfigError(f"semigroup.{expr_key}: {exc}") from exc
        kw[expr_key] = text
    if "model" in raw:
        if kind != "model":
            raise ConfigError("'model' only applies to kind 'model'")
        name = _MODEL_NAMES.get(raw["model"])
        if name is None:
            raise ConfigError(f"semigroup.model must be one of {sorted(_MODEL_NAMES)}")
        kw["model"] = name
        if name == "strip":
            kw["rho"] = _positive(raw.get("rho"), "semigroup.rho")
    return SemigroupConfig(**kw)


def _analysis(raw) -> AnalysisConfig:
    if not isinstance(raw, dict):
        raise ConfigError("'analysis' must be an object")
    unknown = set(raw) - {"horizon", "max_horizon", "dw_horizon", "grid", "tolerances",
                          "seed", "samples"}
    if unknown:
        raise ConfigError(f"unknown analysis keys: {sorted(unknown)}")
    d = AnalysisConfig()
    grid_raw = raw.get("grid", {})
    try:
        grid = GridSpec(int(grid_raw.get("radii", d.grid.radii)),
                        int(grid_raw.get("angles", d.grid.angles)),
                        float(grid_raw.get("r_max", d.grid.r_max)),
                        int(grid_raw.get("refine", d.grid.refine)))
    except (TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(f"analysis.grid: {exc}") from exc
    tol_raw = raw.get("tolerances", {})
    if not isinstance(tol_raw, dict):
        raise ConfigError("analysis.tolerances must be an object")
    tol = Tolerances(*(_positive(tol_raw.get(k, getattr(d.tolerances, k)),
                                 f"analysis.tolerances.{k}")
                       for k in ("rate", "step", "newton")))
    horizon = _positive(raw.get("horizon", d.horizon), "analysis.horizon")
    max_horizon = _positive(raw.get("max_horizon", max(d.max_horizon, horizon)),
                            "analysis.max_horizon")
    if max_horizon < horizon or horizon <= 1:
        raise ConfigError("analysis horizons must satisfy 1 < horizon <= max_horizon")
    samples = int(raw.get("samples", d.samples))
    if samples < 1:
        raise ConfigError("analysis.samples must be at least 1")
    return AnalysisConfig(horizon, max_horizon,
                          _positive(raw.get("dw_horizon", d.dw_horizon), "analysis.dw_horizon"),
                          grid, tol, int(raw.get("seed", d.seed)), samples)


def _output(raw) -> OutputConfig:
    if not isinstance(raw, dict):
        raise ConfigError("'output' must be an object")
    unknown = set(raw) - {"report", "plots", "include_timings"}
    if unknown:
        raise ConfigError(f"unknown output keys: {sorted(unknown)}")
    return OutputConfig(raw.get("report"), raw.get("plots"), bool(raw.get("include_timings", False)))


def config_from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(raw) - {"semigroup", "analysis", "output"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    if "semigroup" not in raw:
        raise ConfigError("configuration needs a 'semigroup' section")
    return RunConfig(_semigroup(raw["semigroup"]), _analysis(raw.get("analysis", {})),
                     _output(raw.get("output", {})))


def load_config(path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, "
                          f"column {exc.colno}: {exc.msg}") from exc
    return config_from_dict(raw)
