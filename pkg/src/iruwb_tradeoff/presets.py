"""Named experiment setups and the JSON config loader used by the CLI."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

from .config import SystemConfig
from .errors import ConfigError
from .jitter import JitterSpec, TemplateJitterCase
from .pulse import MultipathChannel, PulseModel, RakeWeights
from .tradeoff import SweepRequest

PRESETS = ("fig4", "fig5", "fig6", "fig7", "custom")
MODES = (("coded", "symbol"), ("coded", "chip"), ("uncoded", "symbol"), ("uncoded", "chip"))

TOTAL_GAIN = 512
CHIP = 0.25e-9
FIG5_NOISE = (0.1, 0.05, 0.02, 0.01)
JITTER_VARIANCE = 208.3e-24      # s^2, about (25 ps)^2 / 3
FIG7_GAINS = (0.4653, 0.5817, 0.2327, -0.4536, 0.3490, 0.2217, -0.1163, 0.0233, -0.0116, -0.0023)


@dataclass(frozen=True)
class PresetRun:
    """One curve of an experiment; ``label`` fills the CSV ``preset`` column."""

    label: str
    request: SweepRequest


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    runs: tuple[PresetRun, ...]


def _awgn_runs(label: str, evaluators, mc_symbols, seed, workers, noise_psd=0.1,
               jitter: JitterSpec | None = None) -> list[PresetRun]:
    jitter = jitter or JitterSpec.uniform(25e-12)
    runs = []
    for coding, sync in MODES:
        cfg = SystemConfig.equal_interferers(TOTAL_GAIN, 1, 10, noise_psd=noise_psd, coding=coding,
                                             sync=sync, tx_jitter=jitter)
        runs.append(PresetRun(label, SweepRequest(cfg, evaluators=evaluators, mc_symbols=mc_symbols,
                                                  seed=seed, workers=workers)))
    return runs


def fig7_setup():
    """Channel, MRC Rake and link config of the multipath downlink experiment."""
    channel = MultipathChannel.on_chip_grid(FIG7_GAINS, CHIP)
    rake = RakeWeights.mrc(channel)
    cfg = SystemConfig.equal_interferers(TOTAL_GAIN, 1, 10, desired_energy=1.0, interferer_energy=5.0,
                                         noise_psd=0.01, tx_jitter=JitterSpec.uniform(20e-12))
    return cfg, channel, rake


def build_preset(name: str, evaluators=("analytic",), mc_symbols: int = 0, seed: int = 0,
                 workers: int = 1) -> ExperimentPreset:
    evaluators = tuple(evaluators)
    if name == "fig4":
        runs = _awgn_runs("fig4", evaluators, mc_symbols, seed, workers)
    elif name == "fig5":
        runs = []
        for s2 in FIG5_NOISE:
            runs += _awgn_runs(f"fig5:sigma_n2={s2:g}", evaluators, mc_symbols, seed, workers, noise_psd=s2)
    elif name == "fig6":
        std = math.sqrt(JITTER_VARIANCE)
        runs = _awgn_runs("fig6:uniform", evaluators, mc_symbols, seed, workers,
                          jitter=JitterSpec.uniform(25e-12))
        runs += _awgn_runs("fig6:gaussian", evaluators, mc_symbols, seed, workers,
                           jitter=JitterSpec.truncated_gaussian(std, CHIP))
    elif name == "fig7":
        cfg, channel, rake = fig7_setup()
        runs = [
            PresetRun("fig7", SweepRequest(cfg, evaluators=evaluators, mc_symbols=mc_symbols, seed=seed,
                                           channel=channel, rake=rake, workers=workers,
                                           template_case=TemplateJitterCase(case, JitterSpec.uniform(20e-12))))
            for case in ("case1", "case2")
        ]
    else:
        raise ConfigError(f"unknown preset {name!r}; expected one of {PRESETS}")
    return ExperimentPreset(name, tuple(runs))


# ---------------------------------------------------------------- JSON config

_CFG_KEYS = {f.name for f in fields(SystemConfig)}
_EXTRA_KEYS = {"pulse", "channel", "rake", "template_case", "factorizations", "label", "interferer_energy"}


def _jitter_from(obj, chip_duration: float) -> JitterSpec:
    if obj is None:
        return JitterSpec.none()
    if not isinstance(obj, dict):
        raise ConfigError("jitter entries must be objects with a 'family' key")
    obj = dict(obj)
    family = obj.pop("family", "none")
    try:
        if family == "truncated_gaussian":
            return JitterSpec.truncated_gaussian(obj.pop("std"), chip_duration, obj.pop("truncation", None),
                                                 obj.pop("center", 0.0))
        return JitterSpec(family, **obj)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"invalid jitter entry for family {family!r}: {exc}") from None


def load_config(source, evaluators=("analytic",), mc_symbols: int = 0, seed: int = 0,
                workers: int = 1) -> ExperimentPreset:
    """Build a one-run experiment from a JSON file path or an already-parsed dict.

    Keys mirror :class:`SystemConfig` field names, plus ``pulse``, ``channel``,
    ``rake``, ``template_case``, ``factorizations`` and ``label``. Times are in
    seconds.
    """
    if isinstance(source, (str, Path)):
        try:
            data = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {source}: {exc}") from None
    else:
        data = dict(source)
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - _CFG_KEYS - _EXTRA_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "total_gain" not in data:
        raise ConfigError("config needs total_gain (N)")

    try:
        pulse = PulseModel(**data.get("pulse", {}))
        tc = pulse.chip_duration
        n = int(data["total_gain"])
        pairs = data.get("factorizations")
        if pairs is None and "frames_per_symbol" in data:
            nf = int(data["frames_per_symbol"])
            pairs = [(nf, int(data.get("chips_per_frame", n // max(nf, 1))))]
        kw = {k: data[k] for k in ("num_users", "desired_energy", "noise_psd", "coding", "sync") if k in data}
        num_users = int(kw.get("num_users", 1))
        if "interferer_energies" in data:
            kw["interferer_energies"] = tuple(data["interferer_energies"])
        else:
            kw["interferer_energies"] = (float(data.get("interferer_energy", 1.0)),) * (num_users - 1)
        first_nf = int(pairs[0][0]) if pairs else 1
        if first_nf < 1 or n % first_nf:
            raise ConfigError(f"N = N_f * N_c violated: N_f = {first_nf} does not divide N = {n}")
        cfg = SystemConfig(total_gain=n, frames_per_symbol=first_nf, chips_per_frame=n // first_nf,
                           tx_jitter=_jitter_from(data.get("tx_jitter"), tc), **kw)
        channel = rake = case = None
        if "channel" in data:
            ch = data["channel"]
            if "delays" in ch:
                channel = MultipathChannel(ch["gains"], ch["delays"], ch["chip_span"])
            else:
                channel = MultipathChannel.on_chip_grid(ch["gains"], tc)
            rk = data.get("rake", {"mrc": True})
            weights = channel.gains if rk.get("mrc", "weights" not in rk) else rk["weights"]
            rake = RakeWeights(weights, rk.get("template_energy"))
            tcase = data.get("template_case", {"case_id": "case1"})
            case = TemplateJitterCase(tcase["case_id"], _jitter_from(tcase.get("jitter"), tc))
        request = SweepRequest(cfg, factorizations=pairs, evaluators=tuple(evaluators),
                               mc_symbols=mc_symbols, seed=seed, pulse=pulse, channel=channel,
                               rake=rake, template_case=case, workers=workers)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from None
    return ExperimentPreset("custom", (PresetRun(str(data.get("label", "custom")), request),))
