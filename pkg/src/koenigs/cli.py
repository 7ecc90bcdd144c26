"""Command line interface.

Subcommands: ``classify``, ``orbit``, ``render``, ``koenigs-check`` and
``generator``. Exit codes: 0 success, 1 error, 2 inconclusive.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import render
from .config import ConfigError, RunConfig, load_config, parse_complex
from .dynamics import denjoy_wolff
from .generators import GeneratorData, generator_from_koenigs
from .reports import (
    ERROR,
    build_subject,
    run_classify,
    run_generator,
    run_koenigs_check,
    run_orbit,
)

RENDER_FILES = ("phase_portrait.svg", "image_domain.svg", "re_p_signs.svg")


def run_render(cfg: RunConfig, out_dir, *, starts=None, t_max: float = 5.0,
               samples: int = 41) -> list[Path]:
    """Write the three figures for ``cfg`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sub = build_subject(cfg)
    if starts is None:
        starts = [0j] + [0.6 * np.exp(2j * np.pi * k / 8) for k in range(8)]
    t = np.linspace(0.0, t_max, samples)
    orbits = [sub.S.orbit(z, t).z for z in starts]
    dw = denjoy_wolff(sub.S, cfg.analysis.dw_horizon)
    h = sub.koenigs.h if sub.koenigs is not None else sub.h
    D = sub.generator
    if D is None and sub.koenigs is not None:
        try:
            D = generator_from_koenigs(sub.koenigs, grid=cfg.analysis.grid)
        except ValueError:
            D = None
    if D is None and cfg.semigroup.kind == "generator" and not dw.elliptic:
        D = GeneratorData.from_generator(sub.S.generator(), cfg.semigroup.tau or dw.point)
    figures = (render.phase_portrait(orbits, dw.point),
               render.image_domain(h, sub.model),
               render.re_p_signs(None if D is None else D.p))
    return [render.write(out / name, svg) for name, svg in zip(RENDER_FILES, figures)]


def _emit(report, cfg: RunConfig, out: str | None = None) -> int:
    text = report.to_json()
    target = out or cfg.output.report
    if target:
        Path(target).write_text(text)
    else:
        sys.stdout.write(text)
    for note in report.diagnostics:
        print(f"note: {note}", file=sys.stderr)
    return report.exit_code


def _parse_z(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    return parse_complex(text, "--z")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="koenigs", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        return p

    p = command("classify", "classify a semigroup and write a JSON report")
    p.add_argument("--out", help="report path (default: output.report or stdout)")
    p = command("orbit", "tabulate an orbit as CSV")
    p.add_argument("--z", required=True, help="start point as 're,im'")
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p = command("render", "write SVG figures")
    p.add_argument("--out-dir", help="directory (default: output.plots)")
    p = command("koenigs-check", "check that h_expr is a Koenigs function")
    p.add_argument("--out")
    p = command("generator", "generator, Berkson-Porta factor and flow checks")
    p.add_argument("--out")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "classify":
            return _emit(run_classify(cfg), cfg, args.out)
        if args.command == "koenigs-check":
            return _emit(run_koenigs_check(cfg), cfg, args.out)
        if args.command == "generator":
            return _emit(run_generator(cfg), cfg, args.out)
        if args.command == "orbit":
            text = run_orbit(cfg, _parse_z(args.z), args.t_max, args.n)
            if args.out:
                Path(args.out).write_text(text)
            else:
                sys.stdout.write(text)
            return 0
        out_dir = args.out_dir or cfg.output.plots
        if not out_dir:
            raise ConfigError("render needs --out-dir or output.plots")
        for path in run_render(cfg, out_dir):
            print(path)
        return 0
    except (ConfigError, ValueError, ArithmeticError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
