"""Analysis pipelines behind the command line, and their JSON reports."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import __version__
from .config import RunConfig
from .dynamics import (
    ClassificationReport,
    ClassifySettings,
    DenjoyWolffEstimate,
    RateEstimate,
    StepEstimate,
    classify,
)
from .generators import (
    GeneratorData,
    berkson_porta_residual,
    generator_from_koenigs,
    ode_residual,
)
from .grid import GridSpec
from .hyperbolic import ModelDomain, carried_digits
from .inverse import InversionError, UnivalenceReport, numeric_inverse, univalence_spot_check
from .models import KoenigsFunction, NotKoenigsError, RangeBounds, StarlikeReport
from .semigroups import (
    GeneratorSemigroup,
    ModelSemigroup,
    Semigroup,
    TranslationGroup,
    builtin,
    semi_conjugation_residual,
    semigroup_law_residual,
)

#: exit codes
OK, ERROR, INCONCLUSIVE = 0, 1, 2


# --------------------------------------------------------------------------
# JSON encoding


def encode(x):
    """Map analysis values onto plain JSON (non-finite floats become strings)."""
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": encode(x.real), "im": encode(x.imag)}
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [encode(v) for v in x]
    if isinstance(x, ModelDomain):
        return encode_domain(x)
    raise TypeError(f"cannot encode {type(x).__name__}")


def encode_domain(d: ModelDomain | None):
    if d is None:
        return None
    out = {"kind": {"right": "right-half-plane", "left": "left-half-plane"}.get(d.kind, d.kind)}
    if d.kind == "strip":
        out["rho"] = d.rho
    return out


@dataclass(frozen=True)
class Report:
    """A JSON-serializable analysis report.

    ``sections`` maps section names to plain JSON data; ``provenance``
    holds the configuration hash, tool version and command.
    """

    command: str
    sections: dict
    provenance: dict
    exit_code: int = OK
    diagnostics: tuple = field(default_factory=tuple)

    def to_json(self) -> str:
        data = {"command": self.command, "exit_code": self.exit_code,
                "diagnostics": list(self.diagnostics),
                "provenance": self.provenance, **self.sections}
        return json.dumps(encode(data), sort_keys=True, indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        data = json.loads(text)
        command = data.pop("command")
        exit_code = data.pop("exit_code")
        diagnostics = tuple(data.pop("diagnostics"))
        provenance = data.pop("provenance")
        return cls(command, data, provenance, exit_code, diagnostics)


def _provenance(cfg: RunConfig, command: str, timings: dict) -> dict:
    out = {"config_hash": cfg.digest(), "version": __version__, "command": command,
           "config": cfg.resolved()}
    if cfg.output.include_timings:
        out["timings"] = {k: round(v, 6) for k, v in timings.items()}
    return out


class _Timer:
    def __init__(self):
        self.timings = {}

    def __call__(self, name):
        timer = self

        class _Section:
            def __enter__(self):
                self.start = time.perf_counter()

            def __exit__(self, *exc):
                timer.timings[name] = time.perf_counter() - self.start
        return _Section()


# --------------------------------------------------------------------------
# section builders


def rate_section(r: RateEstimate | None):
    if r is None:
        return None
    return {"value": r.value, "method": r.method, "horizon": r.horizon,
            "limit_value": r.limit_value, "limit_method": "limit-form",
            "increment": r.increment, "spread": r.spread, "truncated": r.truncated}


def step_section(s: StepEstimate | None):
    if s is None:
        return None
    return {"u": s.u, "value": s.value, "method": "monotone-tail upper bound",
            "horizon": s.horizon, "r": list(s.r), "tail": list(s.tail),
            "monotone": s.monotone, "truncated": s.truncated}


def dw_section(d: DenjoyWolffEstimate):
    return {"point": d.point, "elliptic": d.elliptic, "confidence": d.confidence,
            "method": "orbit of 0", "horizon": d.horizon,
            "fixed_point_residual": d.fixed_point_residual, "converged": d.converged}


def classification_section(c: ClassificationReport, st: ClassifySettings):
    return {"type": c.type, "spectral_value": c.spectral_value,
            "spectral_value_method": None if c.rate is None or c.type != "hyperbolic"
            else "2 x divergence rate",
            "divergence_rate": rate_section(c.rate), "step": step_section(c.step),
            "denjoy_wolff": dw_section(c.denjoy_wolff), "model": encode_domain(c.model),
            "inconclusive": c.inconclusive, "notes": list(c.diagnostics),
            "thresholds": {"rate": st.rate_threshold, "step": st.step_threshold,
                           "band": st.band, "horizon": st.horizon,
                           "max_horizon": st.max_horizon, "dw_horizon": st.dw_horizon}}


def starlike_section(s: StarlikeReport):
    return {"sigma": s.sigma, "min_q": s.min_q, "max_q": s.max_q, "argmin": s.argmin,
            "passes": s.passes, "grazing": s.grazing, "equality": s.equality,
            "fit_a": s.fit_a, "fit_c": s.fit_c, "fit_residual": s.fit_residual}


def bounds_section(b: RangeBounds):
    return {"a": b.a, "b": b.b, "a_infinite": b.a_infinite, "b_infinite": b.b_infinite,
            "threshold": b.threshold, "grid": {"radii": b.grid.radii, "angles": b.grid.angles,
                                               "r_max": b.grid.r_max, "refine": b.grid.refine},
            "argmin": b.argmin, "argmax": b.argmax}


def univalence_section(u: UnivalenceReport):
    return {"min_ratio": u.min_ratio, "collisions": u.collisions,
            "critical_points": u.critical_points, "min_abs_derivative": u.min_abs_derivative,
            "flagged": u.flagged}


def generator_section(D: GeneratorData, grid: GridSpec):
    bp = berkson_porta_residual(D, grid)
    return {"G": str(D.G), "tau": D.tau, "p": str(D.p),
            "berkson_porta": {"residual": bp.residual, "min_re_p": bp.min_re_p,
                              "max_abs_re_p": bp.max_abs_re_p, "argmin": bp.argmin,
                              "passes": bp.passes, "grazing": bp.grazing,
                              "re_p_vanishes": bp.pure_imaginary,
                              "grid": {"radii": grid.radii, "angles": grid.angles,
                                       "r_max": grid.r_max}}}


# --------------------------------------------------------------------------
# building semigroups from a configuration


@dataclass
class Subject:
    """The semigroup under study together with whatever else is known."""

    S: Semigroup
    h: object = None  # HolomorphicMap of the model, if any
    koenigs: KoenigsFunction | None = None
    model: ModelDomain | None = None
    generator: GeneratorData | None = None


def build_subject(cfg: RunConfig) -> Subject:
    sg = cfg.semigroup
    if sg.kind == "model":
        h = sg.h()
        declared = sg.model_domain()
        if declared is not None:
            S = ModelSemigroup(h, declared, tau=sg.tau, tol=cfg.analysis.tolerances.newton)
            return Subject(S, h, None, declared)
        K = KoenigsFunction.build(h, cfg.analysis.grid, strict=False)
        S = ModelSemigroup(h, K.model, tau=sg.tau, tol=cfg.analysis.tolerances.newton,
                           check=False)
        return Subject(S, h, K, K.model)
    if sg.kind == "generator":
        return Subject(GeneratorSemigroup(sg.G(), tau=sg.tau))
    params = {"theta": sg.theta, "lam": sg.lam, "x": sg.x, "tau": sg.tau,
              "orientation": sg.orientation}
    S = builtin(sg.kind, **{k: v for k, v in params.items() if v is not None})
    sub = Subject(S)
    if hasattr(S, "koenigs"):
        sub.h, sub.model = S.koenigs()
        sub.generator = GeneratorData.from_generator(S.generator(), S.tau)
    return sub


def classify_settings(cfg: RunConfig) -> ClassifySettings:
    a = cfg.analysis
    return ClassifySettings(horizon=a.horizon, max_horizon=a.max_horizon,
                            rate_threshold=a.tolerances.rate,
                            step_threshold=a.tolerances.step, dw_horizon=a.dw_horizon)


def _random_disc(rng, n, r=0.8):
    return r * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))


def residual_section(sub: Subject, cfg: RunConfig) -> dict:
    rng = np.random.default_rng(cfg.analysis.seed)
    n = cfg.analysis.samples
    zs = _random_disc(rng, n)
    ts, ss = 2 * rng.random(n), 2 * rng.random(n)
    out = {"samples": n, "seed": cfg.analysis.seed,
           "semigroup_law": {"value": semigroup_law_residual(sub.S, zip(ts, ss, zs)),
                             "method": "max |phi_(t+s) z - phi_t phi_s z|",
                             "t_range": [0.0, 2.0]}}
    if sub.h is not None and sub.model is not None and not isinstance(sub.S, GeneratorSemigroup):
        value = semi_conjugation_residual(sub.h, sub.S, TranslationGroup(sub.model),
                                          list(zip(ts, zs)))
        out["model_identity"] = {"value": value, "method": "max |h(phi_t z) - h(z) - it|",
                                 "t_range": [0.0, 2.0]}
    return out


# --------------------------------------------------------------------------
# commands


def run_classify(cfg: RunConfig) -> Report:
    timer = _Timer()
    sections: dict = {}
    with timer("build"):
        sub = build_subject(cfg)
    st = classify_settings(cfg)
    with timer("classify"):
        c = classify(sub.S, st)
    sections["classification"] = classification_section(c, st)
    notes = list(c.diagnostics)
    if sub.koenigs is not None:
        K = sub.koenigs
        sections["koenigs"] = koenigs_section(K)
        if not K.model.matches(c.model) and not c.inconclusive:
            notes.append(f"canonical normalization gives {K.model.label()} but the "
                         f"dynamics give {c.model.label()}")
        try:
            sub.generator = generator_from_koenigs(K, grid=cfg.analysis.grid)
        except ValueError as exc:
            notes.append(f"generator: {exc}")
    elif sub.generator is None and not c.denjoy_wolff.elliptic and cfg.semigroup.kind == "generator":
        tau = cfg.semigroup.tau if cfg.semigroup.tau is not None else c.denjoy_wolff.point
        sub.generator = GeneratorData.from_generator(sub.S.generator(), tau)
    if sub.generator is not None:
        sections["generator"] = generator_section(sub.generator, cfg.analysis.grid)
    with timer("residuals"):
        sections["residuals"] = residual_section(sub, cfg)
    code = INCONCLUSIVE if c.inconclusive else OK
    return Report("classify", sections, _provenance(cfg, "classify", timer.timings), code,
                  tuple(notes))


def koenigs_section(K: KoenigsFunction) -> dict:
    return {"h": str(K.source), "normalized_h": str(K.h),
            "denjoy_wolff": {"point": K.dw_point, "method": K.dw.method,
                             "radial_score": K.dw.radial_score,
                             "orbit_point": K.dw.orbit_point,
                             "orbit_confidence": K.dw.orbit_confidence,
                             "agreement": K.dw.agreement},
            "model": encode_domain(K.model), "spectral_value": K.spectral_value,
            "range_bounds": bounds_section(K.bounds), "starlike": starlike_section(K.starlike),
            "univalence": univalence_section(K.univalence)}


def image_translation_check(h, grid: GridSpec, times=(0.5, 1.0, 2.0)) -> dict:
    """Invert ``h(z) + it`` for grid ``z``: a sampled test of ``Omega + it in Omega``."""
    z = grid.points()
    failures, worst = 0, 0.0
    for t in times:
        for z0 in z:
            w = h(z0) + 1j * t
            try:
                zi = numeric_inverse(h, w, z0)
                worst = max(worst, abs(h(zi) - w) / (1 + abs(w)))
            except (InversionError, ArithmeticError):
                failures += 1
    return {"times": list(times), "points": len(z), "failures": failures,
            "max_relative_residual": worst}


def run_koenigs_check(cfg: RunConfig) -> Report:
    if cfg.semigroup.kind != "model":
        raise ValueError("koenigs-check needs a semigroup of kind 'model' (h_expr)")
    timer = _Timer()
    h = cfg.semigroup.h()
    try:
        with timer("build"):
            K = KoenigsFunction.build(h, cfg.analysis.grid, strict=False)
    except NotKoenigsError as exc:
        sections = {"koenigs": {"h": str(h), "denjoy_wolff": None,
                                "univalence": univalence_section(
                                    univalence_spot_check(h, cfg.analysis.grid))}}
        return Report("koenigs-check", sections,
                      _provenance(cfg, "koenigs-check", timer.timings), ERROR, (str(exc),))
    sections = {"koenigs": koenigs_section(K)}
    notes = []
    if K.univalence.flagged:
        notes.append("univalence spot check flagged collisions or critical points")
    if not K.starlike.passes:
        notes.append(f"starlike criterion fails: min q = {K.starlike.min_q:.3e}")
    with timer("translation"):
        sections["image_translation"] = image_translation_check(
            h, GridSpec(8, 16, cfg.analysis.grid.r_max))
    if sections["image_translation"]["failures"]:
        notes.append("h(z) + it could not be inverted for some grid points")
    code = ERROR if notes else OK
    if not notes:
        sections["generator"] = generator_section(
            generator_from_koenigs(K, grid=cfg.analysis.grid), cfg.analysis.grid)
    return Report("koenigs-check", sections, _provenance(cfg, "koenigs-check", timer.timings),
                  code, tuple(notes))


def run_generator(cfg: RunConfig) -> Report:
    timer = _Timer()
    with timer("build"):
        sub = build_subject(cfg)
    sections = {}
    notes = []
    if sub.koenigs is not None:
        sub.generator = generator_from_koenigs(sub.koenigs, grid=cfg.analysis.grid)
    elif sub.generator is None:
        G = sub.S.generator()
        tau = cfg.semigroup.tau
        if tau is None:
            from .dynamics import denjoy_wolff
            dw = denjoy_wolff(sub.S, cfg.analysis.dw_horizon)
            if dw.elliptic:
                raise ValueError("elliptic semigroup: no boundary Denjoy-Wolff point "
                                 "for the Berkson-Porta decomposition")
            tau = dw.point
        sub.generator = GeneratorData.from_generator(G, tau)
    D = sub.generator
    sections["generator"] = generator_section(D, cfg.analysis.grid)
    if not berkson_porta_residual(D, cfg.analysis.grid).passes:
        notes.append("Re p is negative on the grid")
    rng = np.random.default_rng(cfg.analysis.seed)
    n = cfg.analysis.samples
    samples = list(zip(3 * rng.random(n), _random_disc(rng, n)))
    with timer("ode"):
        sections["ode_residual"] = {"value": ode_residual(sub.S, D, samples),
                                    "method": "Richardson central difference, step 1e-5",
                                    "samples": n, "t_range": [0.0, 3.0]}
    if not isinstance(sub.S, GeneratorSemigroup):
        flow = GeneratorSemigroup(D.G)
        with timer("round_trip"):
            gap = max(abs(sub.S.evaluate(t, z) - flow.evaluate(t, z)) for t, z in samples)
        sections["round_trip"] = {"value": gap, "method": "sup |phi_t z - flow of G|",
                                  "samples": n, "t_range": [0.0, 3.0]}
    return Report("generator", sections, _provenance(cfg, "generator", timer.timings),
                  ERROR if notes else OK, tuple(notes))


def run_orbit(cfg: RunConfig, z0: complex, t_max: float, n: int) -> str:
    """Orbit table as CSV text (17 significant digits)."""
    if not (t_max > 0 and math.isfinite(t_max)):
        raise ValueError(f"--t-max must be positive, got {t_max!r}")
    if n < 2:
        raise ValueError(f"--n must be at least 2, got {n!r}")
    sub = build_subject(cfg)
    t = np.linspace(0.0, t_max, n)
    orbit = sub.S.orbit(z0, t)
    cols = ["t", "re", "im", "abs", "omega"] + (["im_h"] if sub.h is not None else [])
    lines = [",".join(cols)]
    for i in range(n):
        z = complex(orbit.z[i])
        row = [t[i], z.real, z.imag, abs(z), orbit.distance(0, i)]
        if sub.h is not None:
            point = orbit.exact_point(i)
            if isinstance(point, mpmath.mpc):
                with mpmath.workdps(carried_digits(point)):
                    row.append(float(mpmath.im(sub.h.evaluate_mp(point))))
            else:
                row.append(sub.h(point).imag)
        lines.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"
