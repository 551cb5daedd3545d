"""Gaussian-approximation BEP for coded/uncoded, symbol/chip-synchronous and multipath links.

Every formula returns a :class:`BepResult` whose ``terms`` decompose the
squared denominator of the Q-function argument, so each contribution to the
processing-gain trade-off can be inspected on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import erfc

from .config import SystemConfig
from .errors import ConfigError, UnsupportedConfiguration
from .jitter import JitterMoments, MultipathExpectations, TemplateJitterCase

_SQRT2 = math.sqrt(2.0)


def q_function(x):
    """Gaussian tail probability Q(x) = P(Z > x), via erfc."""
    out = 0.5 * erfc(np.asarray(x, dtype=float) / _SQRT2)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class BepTerms:
    jitter_term: float
    mai_term: float
    noise_term: float
    ifi_term: float | None = None

    @property
    def total(self) -> float:
        return self.jitter_term + self.mai_term + self.noise_term + (self.ifi_term or 0.0)


@dataclass(frozen=True)
class BepResult:
    bep: float
    terms: BepTerms


def _interferer_moments(cfg: SystemConfig, moments: JitterMoments,
                        interferer_moments: Sequence[JitterMoments] | None) -> list[JitterMoments]:
    if interferer_moments is None:
        return [moments] * (cfg.num_users - 1)
    interferer_moments = list(interferer_moments)
    if len(interferer_moments) != cfg.num_users - 1:
        raise ConfigError("need one JitterMoments per interfering user")
    return interferer_moments


def _require(cfg: SystemConfig, coding: str | None = None, sync: str | None = None) -> None:
    if coding is not None and cfg.coding != coding:
        raise UnsupportedConfiguration(f"formula requires coding={coding!r}, got {cfg.coding!r}")
    if sync is not None and cfg.sync != sync:
        raise UnsupportedConfiguration(f"formula requires sync={sync!r}, got {cfg.sync!r}")


def bep_coded_awgn(cfg: SystemConfig, moments: JitterMoments,
                   interferer_moments: Sequence[JitterMoments] | None = None) -> BepResult:
    """Coded (polarity-randomized) AWGN link; identical for symbol and chip sync."""
    _require(cfg, coding="coded")
    others = _interferer_moments(cfg, moments, interferer_moments)
    e1 = cfg.desired_energy
    terms = BepTerms(
        jitter_term=e1 * moments.var / cfg.frames_per_symbol,
        mai_term=sum(e * m.gamma2 for e, m in zip(cfg.interferer_energies, others)) / cfg.total_gain,
        noise_term=cfg.noise_psd,
    )
    return BepResult(_q_ratio(math.sqrt(e1) * moments.mu, terms.total), terms)


def sigma2_mai_symbol(cfg: SystemConfig, moments: JitterMoments) -> float:
    """Total MAI variance for uncoded symbol-synchronous users of equal energy."""
    e = cfg.common_interferer_energy()
    nf, nc = cfg.frames_per_symbol, cfg.chips_per_frame
    return e * (cfg.num_users - 1) / nc * (moments.gamma2 + (nf - 1) / nc * moments.gamma1 ** 2)


def sigma2_mai_chip(cfg: SystemConfig, moments: JitterMoments) -> float:
    """Total MAI variance for uncoded chip-synchronous users of equal energy."""
    e = cfg.common_interferer_energy()
    nf, nc, n = cfg.frames_per_symbol, cfg.chips_per_frame, cfg.total_gain
    coherent = (nf - 1) * (2 * nc * nc * (nf - 1) + 1) / (3.0 * n * nc * nc)
    return e * (cfg.num_users - 1) / nc * (moments.gamma2 + coherent * moments.gamma1 ** 2)


def _uncoded_jitter_term(cfg: SystemConfig, moments: JitterMoments) -> float:
    return cfg.desired_energy * moments.var * cfg.chips_per_frame / cfg.total_gain


def bep_uncoded_symbol_sync(cfg: SystemConfig, moments: JitterMoments) -> BepResult:
    """Uncoded, symbol-synchronous, equal-energy interferers.

    The beta1/beta2 corrections of the conditional MAI variance are not part of
    this approximation.
    """
    _require(cfg, coding="uncoded", sync="symbol")
    terms = BepTerms(
        jitter_term=_uncoded_jitter_term(cfg, moments),
        mai_term=sigma2_mai_symbol(cfg, moments) / cfg.frames_per_symbol,
        noise_term=cfg.noise_psd,
    )
    return BepResult(_q_ratio(math.sqrt(cfg.desired_energy) * moments.mu, terms.total), terms)


def bep_uncoded_chip_sync(cfg: SystemConfig, moments: JitterMoments) -> BepResult:
    """Uncoded, chip-synchronous, equal-energy interferers."""
    _require(cfg, coding="uncoded", sync="chip")
    terms = BepTerms(
        jitter_term=_uncoded_jitter_term(cfg, moments),
        mai_term=sigma2_mai_chip(cfg, moments) / cfg.frames_per_symbol,
        noise_term=cfg.noise_psd,
    )
    return BepResult(_q_ratio(math.sqrt(cfg.desired_energy) * moments.mu, terms.total), terms)


def bep_uncoded_two_user(cfg: SystemConfig, moments: JitterMoments,
                         interferer_moments: JitterMoments | None = None) -> BepResult:
    """Uncoded, symbol-synchronous link with exactly one interferer.

    The interferer's coherent MAI mean shifts the decision statistic by
    +-(sqrt(E_2)/N_c) gamma1; the result averages both signs.
    """
    if cfg.num_users != 2:
        raise UnsupportedConfiguration(f"two-user formula needs num_users == 2, got {cfg.num_users}")
    _require(cfg, coding="uncoded", sync="symbol")
    other = moments if interferer_moments is None else interferer_moments
    e2 = cfg.interferer_energies[0]
    nc = cfg.chips_per_frame
    terms = BepTerms(
        jitter_term=_uncoded_jitter_term(cfg, moments),
        mai_term=e2 / cfg.total_gain * (other.gamma2 - other.gamma1 ** 2 / nc),
        noise_term=cfg.noise_psd,
    )
    signal = math.sqrt(cfg.desired_energy) * moments.mu
    shift = math.sqrt(e2) / nc * other.gamma1
    bep = 0.5 * _q_ratio(signal + shift, terms.total) + 0.5 * _q_ratio(signal - shift, terms.total)
    return BepResult(bep, terms)


def bep_multipath_coded(cfg: SystemConfig, channel, rake, case: TemplateJitterCase,
                        expectations: MultipathExpectations) -> BepResult:
    """Coded downlink over a multipath channel with a Rake receiver (template cases 1 and 2)."""
    _require(cfg, coding="coded", sync="symbol")
    if case.case_id == "case3":
        raise UnsupportedConfiguration("no closed form for template-jitter case3; use Monte Carlo")
    nc, n = cfg.chips_per_frame, cfg.total_gain
    if channel.chip_span > nc:
        raise UnsupportedConfiguration(
            f"channel span M = {channel.chip_span} exceeds N_c = {nc}; the IFI model needs M <= N_c"
        )
    e1 = cfg.desired_energy
    energy = rake.template_energy if rake.template_energy is not None else expectations.template_energy
    terms = BepTerms(
        jitter_term=e1 * nc / n * expectations.var_phi,
        mai_term=sum(cfg.interferer_energies) * expectations.sigma2_mai / n,
        noise_term=energy * cfg.noise_psd,
        ifi_term=e1 / (nc * n) * expectations.sigma2_ifi,
    )
    return BepResult(_q_ratio(math.sqrt(e1) * expectations.mean_phi, terms.total), terms)


def _q_ratio(numerator: float, denominator_sq: float) -> float:
    if denominator_sq <= 0.0:
        # noiseless, jitter-free, interference-free: decision is deterministic
        if numerator > 0:
            return 0.0
        return 1.0 if numerator < 0 else 0.5
    return q_function(numerator / math.sqrt(denominator_sq))
