"""Sweep the (N_f, N_c) split of a fixed processing gain and locate the BEP optimum."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import mc
from .analytic import (BepResult, BepTerms, bep_coded_awgn, bep_multipath_coded,
                       bep_uncoded_chip_sync, bep_uncoded_symbol_sync, bep_uncoded_two_user)
from .config import SystemConfig
from .errors import ConfigError, UnsupportedConfiguration
from .jitter import DEFAULT_NODES, TemplateJitterCase, compute_moments, multipath_expectations
from .pulse import MultipathChannel, PulseModel, RakeWeights

EVALUATORS = ("analytic", "monte_carlo")


@lru_cache(maxsize=64)
def _moments(spec, pulse, nodes):
    return compute_moments(spec, pulse, nodes)


@lru_cache(maxsize=64)
def _mp_expectations(spec, pulse, channel, rake, case, nodes):
    return multipath_expectations(spec, pulse, channel, rake, case, nodes)


def analytic_bep(cfg: SystemConfig, pulse: PulseModel | None = None,
                 channel: MultipathChannel | None = None, rake: RakeWeights | None = None,
                 template_case: TemplateJitterCase | None = None,
                 nodes: int = DEFAULT_NODES) -> BepResult:
    """Pick the closed form that matches ``cfg`` (and the multipath setup, if any)."""
    pulse = pulse or PulseModel()
    if channel is not None:
        if cfg.coding != "coded":
            raise UnsupportedConfiguration("no closed form for uncoded multipath links")
        case = template_case or TemplateJitterCase("case1")
        if case.case_id == "case3":
            raise UnsupportedConfiguration("no closed form for template-jitter case3; use Monte Carlo")
        if channel.chip_span > cfg.chips_per_frame:
            raise UnsupportedConfiguration(
                f"channel span M = {channel.chip_span} exceeds N_c = {cfg.chips_per_frame}"
            )
        exp = _mp_expectations(cfg.tx_jitter, pulse, channel, rake, case, nodes)
        return bep_multipath_coded(cfg, channel, rake, case, exp)
    moments = _moments(cfg.tx_jitter, pulse, nodes)
    if cfg.coding == "coded":
        return bep_coded_awgn(cfg, moments)
    if cfg.sync == "chip":
        return bep_uncoded_chip_sync(cfg, moments)
    if cfg.num_users == 2:
        return bep_uncoded_two_user(cfg, moments)
    return bep_uncoded_symbol_sync(cfg, moments)


def power_of_two_splits(total_gain: int) -> list[tuple[int, int]]:
    """(N_f, N_c) pairs with N_f = 1, 2, 4, ... dividing N."""
    out, n_f = [], 1
    while n_f <= total_gain:
        if total_gain % n_f == 0:
            out.append((n_f, total_gain // n_f))
        n_f *= 2
    return out


@dataclass(frozen=True)
class SweepRequest:
    base_cfg: SystemConfig
    factorizations: tuple[tuple[int, int], ...] | None = None
    evaluators: tuple[str, ...] = ("analytic",)
    mc_symbols: int = 0
    seed: int = 0
    pulse: PulseModel = field(default_factory=PulseModel)
    channel: MultipathChannel | None = None
    rake: RakeWeights | None = None
    template_case: TemplateJitterCase | None = None
    workers: int = 1
    num_partitions: int = mc.DEFAULT_PARTITIONS
    nodes: int = DEFAULT_NODES

    def __post_init__(self):
        n = self.base_cfg.total_gain
        pairs = self.factorizations
        pairs = power_of_two_splits(n) if pairs is None else [tuple(int(v) for v in p) for p in pairs]
        if not pairs:
            raise ConfigError("factorization list must be nonempty")
        for n_f, n_c in pairs:
            if n_f < 1 or n_c < 1 or n_f * n_c != n:
                raise ConfigError(f"N = N_f * N_c violated: {n_f} * {n_c} != {n}")
        if len({p[0] for p in pairs}) != len(pairs):
            raise ConfigError("factorizations must have distinct N_f values")
        # canonical order: increasing N_f
        object.__setattr__(self, "factorizations", tuple(sorted(pairs)))
        evaluators = tuple(self.evaluators)
        if not evaluators or any(e not in EVALUATORS for e in evaluators):
            raise ConfigError(f"evaluators must be a nonempty subset of {EVALUATORS}, got {evaluators}")
        object.__setattr__(self, "evaluators", evaluators)
        if "monte_carlo" in evaluators and self.mc_symbols < 1:
            raise ConfigError("Monte Carlo needs mc_symbols >= 1")

    def point_seed(self, frames_per_symbol: int) -> int:
        """Seed for the Monte Carlo run of one split; independent of list order."""
        state = np.random.SeedSequence([int(self.seed), int(frames_per_symbol)]).generate_state(2, np.uint32)
        return int(state[0]) | (int(state[1]) << 32)


@dataclass(frozen=True)
class CurvePoint:
    frames_per_symbol: int
    chips_per_frame: int
    analytic_bep: float | None = None
    terms: BepTerms | None = None
    mc_bep: float | None = None
    mc_std_err: float | None = None
    seed: int | None = None
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class BepCurve:
    points: tuple[CurvePoint, ...]
    argmin_analytic: tuple[int, int] | None
    argmin_mc: tuple[int, int] | None


def _argmin(points: Sequence[CurvePoint], attr: str):
    best = None
    for pt in points:
        v = getattr(pt, attr)
        # points are in ascending N_f, so <= breaks ties toward larger N_f
        if v is not None and (best is None or v <= getattr(best, attr)):
            best = pt
    return None if best is None else (best.frames_per_symbol, best.chips_per_frame)


def evaluate_point(req: SweepRequest, frames_per_symbol: int, on_unsupported: str = "raise") -> CurvePoint:
    cfg = req.base_cfg.with_split(frames_per_symbol)
    warnings = []
    a_bep = terms = None
    if "analytic" in req.evaluators:
        try:
            res = analytic_bep(cfg, req.pulse, req.channel, req.rake, req.template_case, req.nodes)
            a_bep, terms = res.bep, res.terms
        except UnsupportedConfiguration as exc:
            if on_unsupported == "raise":
                raise
            warnings.append(f"N_f={frames_per_symbol}: analytic skipped: {exc}")
    mc_bep = mc_se = seed = None
    if "monte_carlo" in req.evaluators:
        seed = req.point_seed(frames_per_symbol)
        try:
            plan = mc.TrialPlan(cfg, req.mc_symbols, seed, pulse=req.pulse, channel=req.channel,
                                rake=req.rake, template_case=req.template_case,
                                num_partitions=req.num_partitions)
            est = mc.run(plan, workers=req.workers)
            mc_bep, mc_se = est.bep_hat, est.std_err
        except UnsupportedConfiguration as exc:
            if on_unsupported == "raise":
                raise
            warnings.append(f"N_f={frames_per_symbol}: monte carlo skipped: {exc}")
    return CurvePoint(frames_per_symbol, cfg.chips_per_frame, a_bep, terms, mc_bep, mc_se, seed,
                      tuple(warnings))


def sweep(req: SweepRequest, on_unsupported: str = "raise") -> BepCurve:
    """Evaluate every split; ``on_unsupported='skip'`` leaves blank values plus a warning."""
    if on_unsupported not in ("raise", "skip"):
        raise ConfigError("on_unsupported must be 'raise' or 'skip'")
    points = tuple(evaluate_point(req, n_f, on_unsupported) for n_f, _ in req.factorizations)
    return BepCurve(points, _argmin(points, "analytic_bep"), _argmin(points, "mc_bep"))
