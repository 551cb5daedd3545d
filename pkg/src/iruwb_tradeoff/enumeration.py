"""Exhaustive enumeration of the two-user AWGN decision statistic for tiny instances.

Every equiprobable outcome of the TH codes, polarity codes, interferer bits,
chip offset and (discretized) jitter that can touch one symbol of user 1 is
visited once, so the returned moments are exact rather than asymptotic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import q_function
from .config import SystemConfig
from .errors import ConfigError
from .pulse import PulseModel

MAX_OUTCOMES = 2 ** 24
_CHUNK = 1 << 15


@dataclass(frozen=True)
class EnumerationResult:
    """Exact MAI statistics (in correlator-output units) for user 1's symbol.

    ``*_given_bit`` is keyed by the interferer's bit on the symbol with the
    same index. ``exact_bep`` covers desired term + MAI + Gaussian noise;
    user 1's own neighbouring pulses are not part of the enumeration.
    """

    mai_mean_given_bit: dict
    mai_var_given_bit: dict
    mai_mean: float
    mai_var: float
    exact_bep: float
    outcomes: int


class _Radix:
    """Mixed-radix variable table: each variable has value and probability arrays."""

    def __init__(self):
        self.values, self.probs = [], []

    def add(self, values, probs=None) -> int:
        values = np.asarray(values, dtype=float)
        probs = np.full(values.size, 1.0 / values.size) if probs is None else np.asarray(probs, float)
        self.values.append(values)
        self.probs.append(probs)
        return len(self.values) - 1

    @property
    def size(self) -> int:
        return math.prod(v.size for v in self.values)

    def decode(self, idx: np.ndarray):
        vals, weight = [], np.ones(idx.size)
        rest = idx.copy()
        for v, p in zip(self.values, self.probs):
            digit = rest % v.size
            rest //= v.size
            vals.append(v[digit])
            weight *= p[digit]
        return vals, weight


def _jitter_levels(cfg: SystemConfig, levels):
    if levels is not None:
        values, probs = (np.asarray(x, dtype=float) for x in levels)
        if values.shape != probs.shape or not math.isclose(probs.sum(), 1.0, rel_tol=1e-12):
            raise ConfigError("jitter_levels must be (values, probabilities) summing to 1")
        return values, probs
    if cfg.tx_jitter.family != "none":
        raise ConfigError("enumeration needs zero jitter or explicit discretized jitter_levels")
    return np.array([cfg.tx_jitter.center]), np.array([1.0])


def enumerate_exact(cfg: SystemConfig, pulse: PulseModel | None = None,
                    jitter_levels=None, max_outcomes: int = MAX_OUTCOMES) -> EnumerationResult:
    """Enumerate every outcome affecting user 1's symbol 0, conditioned on b^(1) = +1.

    Only one interferer (``num_users == 2``) is supported. In chip-synchronous
    mode the interferer offset is enumerated over all N chip values.
    """
    pulse = pulse or PulseModel()
    if cfg.num_users != 2:
        raise ConfigError("enumeration supports exactly one interferer (num_users == 2)")
    levels, level_probs = _jitter_levels(cfg, jitter_levels)
    n_f, n_c, n = cfg.frames_per_symbol, cfg.chips_per_frame, cfg.total_gain
    tc = pulse.chip_duration
    max_jit = float(np.max(np.abs(levels)))
    reach = int(math.ceil((pulse.cutoff + max_jit) / tc)) - 1
    offsets = range(n) if cfg.sync == "chip" else (0,)
    coded = cfg.coding == "coded"

    plans = []
    total = 0
    for off in offsets:
        lo = -((reach + off + n_c - 1) // n_c)
        hi = (n - 1 + reach - off) // n_c
        frames = np.arange(lo, hi + 1)
        symbols = np.unique(np.floor_divide(frames, n_f))
        table = _Radix()
        tpl_th = [table.add(np.arange(n_c)) for _ in range(n_f)]
        tpl_d = [table.add([-1.0, 1.0]) for _ in range(n_f)] if coded else []
        own_jit = [table.add(levels, level_probs) for _ in range(n_f)] if levels.size > 1 else []
        int_th = [table.add(np.arange(n_c)) for _ in frames]
        int_d = [table.add([-1.0, 1.0]) for _ in frames] if coded else []
        int_jit = [table.add(levels, level_probs) for _ in frames] if levels.size > 1 else []
        int_b = {int(s): table.add([-1.0, 1.0]) for s in symbols}
        plans.append((off, frames, table, tpl_th, tpl_d, own_jit, int_th, int_d, int_jit, int_b))
        total += table.size
    if total > max_outcomes:
        raise ConfigError(f"instance too large: {total} outcomes exceed the limit of {max_outcomes}")

    amp1 = math.sqrt(cfg.desired_energy / n_f)
    amp2 = math.sqrt(cfg.interferer_energies[0] / n_f)
    sigma = math.sqrt(n_f * cfg.noise_psd)
    acc = {b: np.zeros(3) for b in (-1, 1)}   # weight, sum, sum of squares
    bep = 0.0
    for off, frames, table, tpl_th, tpl_d, own_jit, int_th, int_d, int_jit, int_b in plans:
        w_off = 1.0 / len(offsets)
        for start in range(0, table.size, _CHUNK):
            idx = np.arange(start, min(start + _CHUNK, table.size), dtype=np.int64)
            vals, weight = table.decode(idx)
            weight *= w_off
            if own_jit:
                desired = amp1 * sum(pulse.autocorr(vals[k]) for k in own_jit)
            else:
                desired = np.full(idx.size, amp1 * n_f * pulse.autocorr(levels[0]))
            mai = np.zeros(idx.size)
            for m in range(n_f):
                q = m * n_c + vals[tpl_th[m]]
                sign = vals[tpl_d[m]] if coded else 1.0
                for i, f in enumerate(frames):
                    pos = f * n_c + vals[int_th[i]] + off
                    jit = vals[int_jit[i]] if int_jit else levels[0]
                    a = amp2 * vals[int_b[int(f // n_f)]]
                    if coded:
                        a = a * vals[int_d[i]]
                    mai += sign * a * pulse.autocorr((pos - q) * tc + jit)
            own_bit = vals[int_b[0]] if 0 in int_b else np.ones(idx.size)
            for b in (-1, 1):
                sel = own_bit == b
                w = weight[sel]
                acc[b] += (w.sum(), w @ mai[sel], w @ mai[sel] ** 2)
            y = desired + mai
            if sigma > 0:
                bep += float(weight @ q_function(y / sigma))
            else:
                bep += float(weight @ (y < 0))

    given_mean, given_var = {}, {}
    for b, (w, s1, s2) in acc.items():
        if w > 0:
            given_mean[b] = s1 / w
            given_var[b] = max(s2 / w - (s1 / w) ** 2, 0.0)
    w_all = sum(a[0] for a in acc.values())
    mean = sum(a[1] for a in acc.values()) / w_all
    var = max(sum(a[2] for a in acc.values()) / w_all - mean ** 2, 0.0)
    return EnumerationResult(given_mean, given_var, mean, var, bep, total)
