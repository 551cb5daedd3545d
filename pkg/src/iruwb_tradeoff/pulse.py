"""Received pulse, its autocorrelation and the channel/template cross-correlation.

Everything downstream works on correlation values. The pulse waveform itself
is only used to cross-check the closed-form autocorrelation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# multiples of tau beyond which correlations are treated as exactly zero
CUTOFF_TAUS = 8.0

_FOUR_PI = 4.0 * math.pi
_QUARTIC = 4.0 * math.pi ** 2 / 3.0


@dataclass(frozen=True)
class PulseModel:
    """Unit-energy received pulse with shape parameter ``tau`` (seconds)."""

    tau: float = 0.125e-9
    chip_duration: float = 0.25e-9

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be > 0, got {self.tau!r}")
        if not self.chip_duration > 0:
            raise ValueError(f"chip_duration must be > 0, got {self.chip_duration!r}")

    @property
    def cutoff(self) -> float:
        """Lag (seconds) at and beyond which the autocorrelation is taken as zero."""
        return CUTOFF_TAUS * self.tau

    def autocorr(self, lag):
        return autocorr(self, lag)

    def waveform(self, t):
        """Unit-energy pulse w(t) / sqrt(E_p), sampled at ``t`` (seconds)."""
        x2 = (np.asarray(t, dtype=float) / self.tau) ** 2
        raw = (1.0 - _FOUR_PI * x2) * np.exp(-2.0 * math.pi * x2)
        return raw / math.sqrt(self.raw_energy)

    @property
    def raw_energy(self) -> float:
        # closed form of the integral of w(t)^2 for the unnormalized pulse
        return 3.0 * self.tau / 8.0


def autocorr(model: PulseModel, lag):
    """Normalized pulse autocorrelation R(lag); accepts scalars or arrays.

    Zero for |lag| >= 8 tau.
    """
    lag = np.asarray(lag, dtype=float)
    x2 = (lag / model.tau) ** 2
    r = (1.0 - _FOUR_PI * x2 + _QUARTIC * x2 * x2) * np.exp(-math.pi * x2)
    r = np.where(np.abs(lag) < model.cutoff, r, 0.0)
    return float(r) if r.ndim == 0 else r


@dataclass(frozen=True)
class MultipathChannel:
    """Tapped-delay-line channel h(t) = sum_l alpha_l delta(t - tau_l)."""

    gains: tuple[float, ...]
    delays: tuple[float, ...]
    chip_span: int

    def __post_init__(self):
        object.__setattr__(self, "gains", tuple(float(g) for g in self.gains))
        object.__setattr__(self, "delays", tuple(float(d) for d in self.delays))
        if len(self.gains) < 1:
            raise ValueError("channel needs at least one path")
        if len(self.gains) != len(self.delays):
            raise ValueError("gains and delays must have the same length")
        if self.delays[0] != 0.0:
            raise ValueError("first path delay must be 0")
        if any(b < a for a, b in zip(self.delays, self.delays[1:])):
            raise ValueError("path delays must be nondecreasing")
        if int(self.chip_span) != self.chip_span or self.chip_span < 1:
            raise ValueError("chip_span M must be a positive integer")

    @classmethod
    def on_chip_grid(cls, gains, chip_duration: float) -> "MultipathChannel":
        """Paths at tau_l = l * T_c, so M equals the number of paths."""
        gains = tuple(gains)
        return cls(gains, tuple(l * chip_duration for l in range(len(gains))), len(gains))

    @property
    def num_paths(self) -> int:
        return len(self.gains)

    def check_grid(self, chip_duration: float) -> None:
        """Require the last delay to be exactly (M - 1) chips."""
        expected = (self.chip_span - 1) * chip_duration
        if not math.isclose(self.delays[-1], expected, rel_tol=1e-12, abs_tol=1e-24):
            raise ValueError(
                f"last path delay {self.delays[-1]!r} s must equal (M - 1) * T_c = {expected!r} s"
            )


@dataclass(frozen=True)
class RakeWeights:
    """Rake combining coefficients beta_l.

    ``template_energy`` is the mean template energy per frame; leave it None to
    have it computed from the template-jitter statistics.
    """

    weights: tuple[float, ...]
    template_energy: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(b) for b in self.weights))

    @classmethod
    def mrc(cls, channel: MultipathChannel, template_energy: float | None = None) -> "RakeWeights":
        return cls(channel.gains, template_energy)

    def check(self, channel: MultipathChannel) -> None:
        if len(self.weights) != channel.num_paths:
            raise ValueError(
                f"rake has {len(self.weights)} fingers but channel has {channel.num_paths} paths"
            )


def cross_corr_uv(model: PulseModel, channel: MultipathChannel, rake: RakeWeights,
                  template_jitter, shift):
    """Cross-correlation of the received path pulse u(t - shift) with the template v(t).

    Expands the integral as sum_l sum_p alpha_l beta_p R(tau_p + eps_p - tau_l - shift),
    where ``template_jitter`` holds one eps_p per finger. ``shift`` may be an array.
    """
    rake.check(channel)
    jitter = np.asarray(template_jitter, dtype=float)
    if jitter.shape != (channel.num_paths,):
        raise ValueError(
            f"template_jitter needs one entry per finger ({channel.num_paths}), got shape {jitter.shape}"
        )
    if np.any(np.abs(jitter) >= model.chip_duration):
        raise ValueError("template jitter must satisfy |eps| < T_c")
    shift = np.asarray(shift, dtype=float)
    alpha = np.asarray(channel.gains)
    beta = np.asarray(rake.weights)
    tau = np.asarray(channel.delays)
    # offsets[p, l] = tau_p + eps_p - tau_l
    offsets = (tau + jitter)[:, None] - tau[None, :]
    coef = beta[:, None] * alpha[None, :]
    args = offsets[..., None] - shift.reshape(-1)[None, None, :]
    total = np.einsum("pl,pls->s", coef, autocorr(model, args))
    return float(total[0]) if shift.ndim == 0 else total.reshape(shift.shape)
