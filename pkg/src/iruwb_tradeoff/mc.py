"""Correlation-level Monte Carlo of the matched-filter / Rake decision statistic.

The simulator places every pulse of every user on an absolute chip grid and
sums pulse correlations at their exact real-valued offsets, so cross-frame and
cross-symbol overlaps appear naturally. Work is split into a fixed number of
partitions; each owns one RNG stream per randomness category, so the outcome
depends only on (seed, num_partitions) and never on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .config import SystemConfig
from .errors import ConfigError, UnsupportedConfiguration
from .jitter import TemplateJitterCase, template_energy
from .pulse import MultipathChannel, PulseModel, RakeWeights

CATEGORIES = ("bits", "codes", "th", "tx_jitter", "offsets", "template_jitter", "noise")
DEFAULT_PARTITIONS = 16
_BLOCK_FRAMES = 65536
_MAX_BLOCK_SYMBOLS = 256


@dataclass(frozen=True)
class TrialPlan:
    """One Monte Carlo experiment.

    ``channel``/``rake``/``template_case`` switch on multipath mode.
    ``block_symbols`` sets how many symbols share one chip-sync offset draw
    (and one case3 template draw); None picks a size from N_f.
    """

    cfg: SystemConfig
    num_symbols: int
    seed: int
    pulse: PulseModel = field(default_factory=PulseModel)
    channel: MultipathChannel | None = None
    rake: RakeWeights | None = None
    template_case: TemplateJitterCase | None = None
    num_partitions: int = DEFAULT_PARTITIONS
    block_symbols: int | None = None

    def __post_init__(self):
        if int(self.num_symbols) != self.num_symbols or self.num_symbols < 1:
            raise ConfigError(f"num_symbols must be a positive integer, got {self.num_symbols!r}")
        if int(self.num_partitions) != self.num_partitions or self.num_partitions < 1:
            raise ConfigError("num_partitions must be a positive integer")
        if self.block_symbols is not None and self.block_symbols < 1:
            raise ConfigError("block_symbols must be >= 1")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if (self.channel is None) != (self.rake is None):
            raise ConfigError("multipath mode needs both channel and rake")
        self.cfg.tx_jitter.check_support(self.pulse.chip_duration)
        if self.multipath:
            _check_multipath(self.cfg, self.channel, self.rake, self.pulse)
            if self.template_case is not None:
                self.template_case.spec.check_support(self.pulse.chip_duration)

    @property
    def multipath(self) -> bool:
        return self.channel is not None

    @property
    def block_size(self) -> int:
        if self.block_symbols is not None:
            return int(self.block_symbols)
        return max(1, min(_MAX_BLOCK_SYMBOLS, _BLOCK_FRAMES // self.cfg.frames_per_symbol))

    @cached_property
    def noise_std(self) -> float:
        """Standard deviation of the correlator-output noise."""
        var = self.cfg.frames_per_symbol * self.cfg.noise_psd
        if self.multipath and var > 0:
            var *= _template_energy(self)
        return math.sqrt(var)


@dataclass(frozen=True)
class McEstimate:
    errors: int
    symbols: int

    @property
    def bep_hat(self) -> float:
        return self.errors / self.symbols

    @property
    def std_err(self) -> float:
        p = self.bep_hat
        return math.sqrt(p * (1.0 - p) / self.symbols)


@dataclass
class SymbolDraw:
    """All randomness of one simulated block.

    Arrays are indexed [user, frame] (frames include guard symbols on both
    sides). The evaluated symbols start at frame ``first_frame``.
    """

    bits: np.ndarray            # (U, S) +-1
    polarity: np.ndarray        # (U, F) +-1, all +1 when uncoded
    th_codes: np.ndarray        # (U, F) int in [0, N_c)
    tx_jitter: np.ndarray       # (U, F) seconds
    offsets: np.ndarray         # (U,) chips; 0 for user 1 and in symbol sync
    noise: np.ndarray           # (n_sym,)
    first_frame: int
    num_symbols: int
    template_jitter: np.ndarray | None = None   # (F, L) seconds, multipath only

    def amplitudes(self, cfg: SystemConfig) -> np.ndarray:
        scale = np.sqrt(np.asarray(cfg.energies) / cfg.frames_per_symbol)
        sym_bits = np.repeat(self.bits, cfg.frames_per_symbol, axis=1)
        return scale[:, None] * self.polarity * sym_bits

    def evaluated_bits(self, frames_per_symbol: int) -> np.ndarray:
        """(U, n_sym) bits of every user for the evaluated symbol indices."""
        s0 = self.first_frame // frames_per_symbol
        return self.bits[:, s0:s0 + self.num_symbols]


def _check_multipath(cfg: SystemConfig, channel: MultipathChannel, rake: RakeWeights,
                     pulse: PulseModel) -> None:
    rake.check(channel)
    channel.check_grid(pulse.chip_duration)
    if channel.chip_span > cfg.chips_per_frame:
        raise UnsupportedConfiguration(
            f"channel span M = {channel.chip_span} exceeds N_c = {cfg.chips_per_frame}; "
            "the multipath receiver model needs M <= N_c"
        )
    if cfg.coding != "coded" or cfg.sync != "symbol":
        raise UnsupportedConfiguration("multipath mode models coded, symbol-synchronous downlink users")


def _tpl_max(plan: TrialPlan) -> float:
    return plan.template_case.spec.max_abs if (plan.multipath and plan.template_case) else 0.0


def _reach(plan: TrialPlan) -> float:
    """Largest |received-pulse offset| that can still correlate with the template."""
    reach = plan.pulse.cutoff
    if plan.multipath:
        reach += plan.channel.delays[-1] + _tpl_max(plan)
    return reach


def _chip_window(plan: TrialPlan) -> int:
    return int(math.ceil((_reach(plan) + plan.cfg.tx_jitter.max_abs) / plan.pulse.chip_duration))


def _guard_symbols(plan: TrialPlan) -> int:
    cfg = plan.cfg
    max_offset = cfg.total_gain - 1 if cfg.sync == "chip" else 0
    return 1 + -(-(max_offset + _chip_window(plan) + cfg.chips_per_frame) // cfg.total_gain)


def _template_energy(plan: TrialPlan) -> float:
    if plan.rake.template_energy is not None:
        return plan.rake.template_energy
    case = plan.template_case or TemplateJitterCase("case1")
    return template_energy(plan.pulse, plan.channel, plan.rake, case)


def partition_rngs(seed: int, partition: int) -> dict[str, np.random.Generator]:
    """Independent generators for one partition, one per randomness category."""
    return {
        name: np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(partition, k)))
        for k, name in enumerate(CATEGORIES)
    }


def draw_symbols(plan: TrialPlan, num_symbols: int, rngs: dict[str, np.random.Generator]) -> SymbolDraw:
    """Draw one block of ``num_symbols`` evaluated symbols plus guards."""
    cfg = plan.cfg
    n_users, n_f, n_c = cfg.num_users, cfg.frames_per_symbol, cfg.chips_per_frame
    g = _guard_symbols(plan)
    n_sym_total = num_symbols + 2 * g
    n_frames = n_sym_total * n_f

    bits = 2.0 * rngs["bits"].integers(0, 2, size=(n_users, n_sym_total)) - 1.0
    if cfg.coding == "coded":
        polarity = 2.0 * rngs["codes"].integers(0, 2, size=(n_users, n_frames)) - 1.0
    else:
        polarity = np.ones((n_users, n_frames))
    th = rngs["th"].integers(0, n_c, size=(n_users, n_frames), dtype=np.int64)
    jit = cfg.tx_jitter.sample(rngs["tx_jitter"], (n_users, n_frames))
    offsets = np.zeros(n_users, dtype=np.int64)
    if cfg.sync == "chip" and n_users > 1:
        offsets[1:] = rngs["offsets"].integers(0, cfg.total_gain, size=n_users - 1)
    tpl = None
    if plan.multipath:
        n_paths = plan.channel.num_paths
        case = plan.template_case
        rng = rngs["template_jitter"]
        if case is None or case.spec.family == "none":
            tpl = np.zeros((n_frames, n_paths))
        elif case.case_id == "case1":
            tpl = case.spec.sample(rng, (n_frames, n_paths))
        elif case.case_id == "case2":
            tpl = np.repeat(case.spec.sample(rng, (n_frames, 1)), n_paths, axis=1)
        else:
            tpl = np.repeat(case.spec.sample(rng, (1, n_paths)), n_frames, axis=0)
    noise = rngs["noise"].standard_normal(num_symbols) * plan.noise_std
    return SymbolDraw(bits, polarity, th, np.ascontiguousarray(jit), offsets, noise,
                      g * n_f, num_symbols, tpl)


def mf_output_awgn(draw: SymbolDraw, cfg: SystemConfig, pulse: PulseModel,
                   components: bool = False, backend: str | None = None) -> np.ndarray:
    """Matched-filter outputs of the evaluated symbols (AWGN channel).

    With ``components=True`` returns the noise-free parts as columns
    [desired, self-interference, MAI from user 2, ...].
    """
    max_jit = float(np.max(np.abs(draw.tx_jitter))) if draw.tx_jitter.size else 0.0
    window = int(math.ceil((pulse.cutoff + max_jit) / pulse.chip_duration))
    out = np.zeros((draw.num_symbols, cfg.num_users + 1))
    kernels.correlate_awgn(
        draw.th_codes, draw.tx_jitter, draw.amplitudes(cfg), draw.offsets,
        np.ascontiguousarray(draw.polarity[0]), cfg.chips_per_frame, cfg.frames_per_symbol,
        draw.first_frame, draw.num_symbols, pulse.chip_duration, pulse.tau, pulse.cutoff,
        window, out, backend=backend,
    )
    return out if components else out.sum(axis=1) + draw.noise


def rake_output_multipath(draw: SymbolDraw, cfg: SystemConfig, channel: MultipathChannel,
                          rake: RakeWeights, pulse: PulseModel, components: bool = False,
                          backend: str | None = None) -> np.ndarray:
    """Rake outputs of the evaluated symbols; columns as in :func:`mf_output_awgn`."""
    _check_multipath(cfg, channel, rake, pulse)
    tpl = draw.template_jitter
    if tpl is None:
        tpl = np.zeros((draw.polarity.shape[1], channel.num_paths))
    max_tpl = float(np.max(np.abs(tpl))) if tpl.size else 0.0
    max_jit = float(np.max(np.abs(draw.tx_jitter))) if draw.tx_jitter.size else 0.0
    reach = pulse.cutoff + channel.delays[-1] + max_tpl
    window = int(math.ceil((reach + max_jit) / pulse.chip_duration))
    out = np.zeros((draw.num_symbols, cfg.num_users + 1))
    kernels.correlate_multipath(
        draw.th_codes, draw.tx_jitter, draw.amplitudes(cfg), draw.offsets,
        np.ascontiguousarray(draw.polarity[0]), np.ascontiguousarray(tpl),
        np.asarray(channel.gains), np.asarray(rake.weights), np.asarray(channel.delays),
        cfg.chips_per_frame, cfg.frames_per_symbol, draw.first_frame, draw.num_symbols,
        pulse.chip_duration, pulse.tau, pulse.cutoff, reach, window, out, backend=backend,
    )
    return out if components else out.sum(axis=1) + draw.noise


@dataclass
class ComponentSample:
    """Per-symbol decomposition of the decision statistic."""

    components: np.ndarray      # (n, U + 1) noise-free columns
    noise: np.ndarray           # (n,)
    bits: np.ndarray            # (n, U) bit of each user's symbol with the same index

    @property
    def statistic(self) -> np.ndarray:
        return self.components.sum(axis=1) + self.noise


def _partition_sizes(plan: TrialPlan) -> list[int]:
    base, extra = divmod(plan.num_symbols, plan.num_partitions)
    return [base + (p < extra) for p in range(plan.num_partitions)]


def _blocks(plan: TrialPlan, partition: int, count: int, backend: str | None):
    rngs = partition_rngs(plan.seed, partition)
    left = count
    while left > 0:
        n = min(left, plan.block_size)
        draw = draw_symbols(plan, n, rngs)
        if plan.multipath:
            comp = rake_output_multipath(draw, plan.cfg, plan.channel, plan.rake, plan.pulse,
                                         components=True, backend=backend)
        else:
            comp = mf_output_awgn(draw, plan.cfg, plan.pulse, components=True, backend=backend)
        yield draw, comp
        left -= n


def _count_errors(plan: TrialPlan, partition: int, count: int, backend: str | None) -> int:
    errors = 0
    for draw, comp in _blocks(plan, partition, count, backend):
        y = comp.sum(axis=1) + draw.noise
        decided = np.where(y >= 0.0, 1.0, -1.0)
        errors += int(np.count_nonzero(decided != draw.evaluated_bits(plan.cfg.frames_per_symbol)[0]))
    return errors


def run(plan: TrialPlan, workers: int = 1, backend: str | None = None) -> McEstimate:
    """Count sign-decision errors over ``plan.num_symbols`` symbols."""
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    sizes = _partition_sizes(plan)
    jobs = [(p, n) for p, n in enumerate(sizes) if n]
    if workers == 1:
        counts = [_count_errors(plan, p, n, backend) for p, n in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda job: _count_errors(plan, job[0], job[1], backend), jobs))
    return McEstimate(errors=sum(counts), symbols=plan.num_symbols)


def simulate_components(plan: TrialPlan, backend: str | None = None) -> ComponentSample:
    """Keep every symbol's decomposition instead of counting errors (for moment checks)."""
    comps, noises, bits = [], [], []
    for p, n in enumerate(_partition_sizes(plan)):
        if not n:
            continue
        for draw, comp in _blocks(plan, p, n, backend):
            comps.append(comp)
            noises.append(draw.noise)
            bits.append(draw.evaluated_bits(plan.cfg.frames_per_symbol).T)
    return ComponentSample(np.concatenate(comps), np.concatenate(noises), np.concatenate(bits))
