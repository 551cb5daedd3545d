import math

import numpy as np
import pytest

from iruwb_tradeoff import tradeoff
from iruwb_tradeoff.analytic import bep_uncoded_two_user
from iruwb_tradeoff.config import SystemConfig
from iruwb_tradeoff.errors import ConfigError, UnsupportedConfiguration
from iruwb_tradeoff.jitter import JitterSpec, TemplateJitterCase, compute_moments
from iruwb_tradeoff.presets import fig7_setup
from iruwb_tradeoff.pulse import PulseModel
from iruwb_tradeoff.tradeoff import SweepRequest, power_of_two_splits, sweep

U25 = JitterSpec.uniform(25e-12)


def fig4_base(coding="coded", sync="symbol", **kw):
    kw.setdefault("tx_jitter", U25)
    return SystemConfig.equal_interferers(512, 1, 10, noise_psd=0.1, coding=coding, sync=sync, **kw)


def test_power_of_two_splits():
    assert power_of_two_splits(512) == [(2 ** k, 512 // 2 ** k) for k in range(10)]
    assert power_of_two_splits(24) == [(1, 24), (2, 12), (4, 6), (8, 3)]


def test_zero_jitter_coded_ties_break_to_largest_n_f():
    curve = sweep(SweepRequest(fig4_base(tx_jitter=JitterSpec.none())))
    values = [p.analytic_bep for p in curve.points]
    assert all(v == values[0] for v in values)
    assert curve.argmin_analytic == (512, 1)
    assert curve.argmin_mc is None


def test_coded_fig4_strictly_decreasing():
    curve = sweep(SweepRequest(fig4_base()))
    values = np.array([p.analytic_bep for p in curve.points])
    assert np.all(np.diff(values) < 0)
    assert curve.argmin_analytic == (512, 1)


@pytest.mark.parametrize("sync", ["symbol", "chip"])
def test_uncoded_fig4_interior_argmin(sync):
    curve = sweep(SweepRequest(fig4_base("uncoded", sync)))
    n_f, n_c = curve.argmin_analytic
    assert 1 < n_f < 512 and n_f * n_c == 512
    assert (n_f, n_c) in [(p.frames_per_symbol, p.chips_per_frame) for p in curve.points]


def test_coded_mai_term_identical_across_curve():
    for sync in ("symbol", "chip"):
        curve = sweep(SweepRequest(fig4_base("coded", sync)))
        terms = {p.terms.mai_term for p in curve.points}
        assert len(terms) == 1


def test_reordering_invariance_with_monte_carlo():
    base = SystemConfig.equal_interferers(64, 1, 10, noise_psd=0.1, coding="uncoded", sync="chip", tx_jitter=U25)
    pairs = [(1, 64), (4, 16), (16, 4), (64, 1)]
    a = sweep(SweepRequest(base, pairs, ("analytic", "monte_carlo"), mc_symbols=400, seed=3))
    b = sweep(SweepRequest(base, list(reversed(pairs)), ("analytic", "monte_carlo"), mc_symbols=400, seed=3))
    c = sweep(SweepRequest(base, [pairs[2], pairs[0], pairs[3], pairs[1]], ("analytic", "monte_carlo"),
                           mc_symbols=400, seed=3))
    assert a == b == c
    assert [p.frames_per_symbol for p in a.points] == [1, 4, 16, 64]
    seeds = {p.seed for p in a.points}
    assert len(seeds) == 4


def test_point_seed_depends_on_seed_and_split_only():
    base = fig4_base()
    r1 = SweepRequest(base, seed=11)
    r2 = SweepRequest(base, [(8, 64), (2, 256)], seed=11)
    assert r1.point_seed(8) == r2.point_seed(8)
    assert r1.point_seed(8) != r1.point_seed(2)
    assert r1.point_seed(8) != SweepRequest(base, seed=12).point_seed(8)
    assert 0 <= r1.point_seed(8) < 2 ** 64


def test_request_validation():
    base = fig4_base()
    with pytest.raises(ConfigError, match=r"N = N_f \* N_c"):
        SweepRequest(base, [(2, 128)])
    with pytest.raises(ConfigError, match="nonempty"):
        SweepRequest(base, [])
    with pytest.raises(ConfigError, match="distinct"):
        SweepRequest(base, [(2, 256), (2, 256)])
    with pytest.raises(ConfigError, match="evaluators"):
        SweepRequest(base, evaluators=("exact",))
    with pytest.raises(ConfigError, match="mc_symbols"):
        SweepRequest(base, evaluators=("analytic", "monte_carlo"))
    with pytest.raises(ConfigError, match="on_unsupported"):
        sweep(SweepRequest(base), on_unsupported="ignore")


def test_unsupported_analytic_raises_or_skips():
    cfg, channel, rake = fig7_setup()
    case = TemplateJitterCase("case1", JitterSpec.uniform(20e-12))
    req = SweepRequest(cfg, [(8, 64), (64, 8)], channel=channel, rake=rake, template_case=case)
    with pytest.raises(UnsupportedConfiguration, match="exceeds N_c"):
        sweep(req)
    curve = sweep(req, on_unsupported="skip")
    ok, skipped = curve.points
    assert ok.analytic_bep is not None and not ok.warnings
    assert skipped.analytic_bep is None and "exceeds N_c = 8" in skipped.warnings[0]
    assert curve.argmin_analytic == (8, 64)

    uncoded = SweepRequest(cfg.replace(coding="uncoded"), [(8, 64)], channel=channel, rake=rake,
                           template_case=case)
    with pytest.raises(UnsupportedConfiguration, match="uncoded multipath"):
        sweep(uncoded)
    case3 = SweepRequest(cfg, [(8, 64)], channel=channel, rake=rake,
                         template_case=TemplateJitterCase("case3", JitterSpec.uniform(20e-12)))
    with pytest.raises(UnsupportedConfiguration, match="case3"):
        sweep(case3)


def test_case3_monte_carlo_runs_where_analytic_cannot():
    cfg, channel, rake = fig7_setup()
    req = SweepRequest(cfg, [(16, 32)], ("analytic", "monte_carlo"), mc_symbols=200, seed=1, channel=channel,
                       rake=rake, template_case=TemplateJitterCase("case3", JitterSpec.uniform(20e-12)))
    (pt,) = sweep(req, on_unsupported="skip").points
    assert pt.analytic_bep is None and pt.mc_bep is not None
    assert pt.mc_std_err == pytest.approx(math.sqrt(pt.mc_bep * (1 - pt.mc_bep) / 200))


def test_multiuser_dispatch():
    two = SystemConfig.equal_interferers(64, 8, 2, tx_jitter=U25, coding="uncoded")
    res = tradeoff.analytic_bep(two)
    assert res.bep == bep_uncoded_two_user(two, compute_moments(U25, PulseModel())).bep
