"""Command-line front end: run a preset or a JSON config and write one CSV."""

from __future__ import annotations

import argparse
import io
import sys

from .errors import ConfigError, UnsupportedConfiguration
from .presets import PRESETS, ExperimentPreset, build_preset, load_config
from .tradeoff import sweep

HEADER = ("preset,coding,sync,case,N,N_f,N_c,analytic_bep,mc_bep,mc_std_err,"
          "jitter_term,mai_term,ifi_term,noise_term,seed,symbols")
_EVALUATOR_ALIASES = {"analytic": "analytic", "mc": "monte_carlo", "monte_carlo": "monte_carlo"}


def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{value:.8e}"


def parse_evaluators(text: str) -> tuple[str, ...]:
    out = []
    for item in text.split(","):
        item = item.strip().lower()
        if item not in _EVALUATOR_ALIASES:
            raise ConfigError(f"unknown evaluator {item!r}; use analytic and/or mc")
        name = _EVALUATOR_ALIASES[item]
        if name not in out:
            out.append(name)
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="iruwb-tradeoff",
        description="BEP versus the N_f / N_c split of a fixed processing gain in TH IR-UWB links.",
    )
    p.add_argument("--preset", choices=PRESETS, required=True)
    p.add_argument("--config", help="JSON config (required for --preset custom)")
    p.add_argument("--evaluators", default="analytic", help="comma list of analytic, mc")
    p.add_argument("--symbols", type=int, default=100_000, help="Monte Carlo symbols per point")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output CSV path (default: stdout)")
    return p


def resolve(args) -> ExperimentPreset:
    evaluators = parse_evaluators(args.evaluators)
    if "monte_carlo" in evaluators and args.symbols < 1:
        raise ConfigError(f"--symbols must be >= 1 when mc is requested, got {args.symbols}")
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")
    if not 0 <= args.seed < 2 ** 64:
        raise ConfigError("--seed must be in [0, 2^64)")
    symbols = args.symbols if "monte_carlo" in evaluators else 0
    if args.preset == "custom":
        if not args.config:
            raise ConfigError("--preset custom needs --config")
        return load_config(args.config, evaluators, symbols, args.seed, args.workers)
    if args.config:
        raise ConfigError("--config is only used with --preset custom")
    return build_preset(args.preset, evaluators, symbols, args.seed, args.workers)


def render_csv(experiment: ExperimentPreset, warn=None) -> str:
    buf = io.StringIO()
    buf.write(HEADER + "\n")
    for run in experiment.runs:
        req = run.request
        cfg = req.base_cfg
        case = req.template_case.case_id if (req.channel is not None and req.template_case) else ""
        if req.channel is not None and not case:
            case = "case1"
        curve = sweep(req, on_unsupported="skip")
        for pt in curve.points:
            for msg in pt.warnings:
                if warn:
                    warn(f"{run.label} {cfg.coding}/{cfg.sync}{'/' + case if case else ''}: {msg}")
            t = pt.terms
            mc_ran = pt.mc_bep is not None
            row = [
                run.label, cfg.coding, cfg.sync, case, str(cfg.total_gain),
                str(pt.frames_per_symbol), str(pt.chips_per_frame),
                _fmt(pt.analytic_bep), _fmt(pt.mc_bep), _fmt(pt.mc_std_err),
                _fmt(t.jitter_term if t else None), _fmt(t.mai_term if t else None),
                _fmt(t.ifi_term if t else None), _fmt(t.noise_term if t else None),
                str(pt.seed) if mc_ran else "", str(req.mc_symbols) if mc_ran else "",
            ]
            buf.write(",".join(row) + "\n")
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    def warn(msg):
        print(f"warning: {msg}", file=sys.stderr)

    try:
        text = render_csv(resolve(args), warn)
    except (ConfigError, UnsupportedConfiguration) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
