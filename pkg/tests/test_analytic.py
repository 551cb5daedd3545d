import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from iruwb_tradeoff.analytic import (bep_coded_awgn, bep_multipath_coded, bep_uncoded_chip_sync,
                                     bep_uncoded_symbol_sync, bep_uncoded_two_user, q_function,
                                     sigma2_mai_chip, sigma2_mai_symbol)
from iruwb_tradeoff.config import SystemConfig
from iruwb_tradeoff.errors import ConfigError, UnsupportedConfiguration
from iruwb_tradeoff.jitter import (JitterSpec, TemplateJitterCase, compute_moments,
                                   multipath_expectations)
from iruwb_tradeoff.pulse import MultipathChannel, PulseModel, RakeWeights

P = PulseModel()
U25 = JitterSpec.uniform(25e-12)
M25 = compute_moments(U25, P)
SPLITS = [2 ** k for k in range(10)]


def fig4(n_f, coding="coded", sync="symbol", **kw):
    return SystemConfig.equal_interferers(512, n_f, 10, tx_jitter=U25, noise_psd=0.1, coding=coding,
                                          sync=sync, **kw)


def test_q_function_reference_values():
    assert q_function(0.0) == 0.5
    assert q_function(1.959963984540054) == pytest.approx(0.025, rel=1e-12)
    x = np.linspace(-8, 30, 200)
    np.testing.assert_allclose(q_function(x), stats.norm.sf(x), rtol=1e-12, atol=0)
    # deep tail keeps relative accuracy
    assert q_function(30.0) == pytest.approx(4.906713927148187e-198, rel=1e-12)


def test_coded_fig4_frozen_values():
    # frozen from an independent evaluation of the printed formula
    assert bep_coded_awgn(fig4(1), M25).bep == pytest.approx(0.015192446, rel=1e-6)
    assert bep_coded_awgn(fig4(512), M25).bep == pytest.approx(0.007882088, rel=1e-6)


def test_coded_matches_direct_expression():
    for n_f in SPLITS:
        cfg = fig4(n_f)
        d2 = M25.var / n_f + 9 * M25.gamma2 / 512 + 0.1
        assert bep_coded_awgn(cfg, M25).bep == pytest.approx(stats.norm.sf(M25.mu / math.sqrt(d2)), rel=1e-12)


def test_zero_jitter_coded_reduces_to_energy_ratio():
    m0 = compute_moments(JitterSpec.none(), P)
    cfg = SystemConfig.equal_interferers(512, 8, 10, noise_psd=0.1)
    res = bep_coded_awgn(cfg, m0)
    # the interferer term uses gamma2 = 1 + R(T_c)^2, a 3e-7 relative correction
    assert res.bep == pytest.approx(1.77088e-3, rel=2e-5)
    assert res.terms.jitter_term == 0.0


def test_uncoded_symbol_sync_equals_printed_rearrangement():
    # (N_u - 1) E (gamma2 / N + gamma1^2 / N_c^2 - gamma1^2 / (N N_c))
    for n_f in SPLITS:
        cfg = fig4(n_f, "uncoded", "symbol")
        n_c = cfg.chips_per_frame
        mai = 9 * (M25.gamma2 / 512 + M25.gamma1 ** 2 / n_c ** 2 - M25.gamma1 ** 2 / (512 * n_c))
        d2 = M25.var * n_c / 512 + mai + 0.1
        res = bep_uncoded_symbol_sync(cfg, M25)
        assert res.terms.mai_term == pytest.approx(mai, rel=1e-12)
        assert res.bep == pytest.approx(stats.norm.sf(M25.mu / math.sqrt(d2)), rel=1e-12)


def test_fig4_uncoded_interior_optima_frozen():
    sym = [bep_uncoded_symbol_sync(fig4(n, "uncoded", "symbol"), M25).bep for n in SPLITS]
    chip = [bep_uncoded_chip_sync(fig4(n, "uncoded", "chip"), M25).bep for n in SPLITS]
    assert SPLITS[int(np.argmin(sym))] == 8 and SPLITS[int(np.argmin(chip))] == 8
    assert min(sym) == pytest.approx(0.00899, rel=1e-3)
    assert min(chip) == pytest.approx(0.00886, rel=1e-3)


def test_chip_mai_not_above_symbol_mai():
    for n_f in SPLITS:
        cfg = fig4(n_f, "uncoded")
        s, c = sigma2_mai_symbol(cfg, M25), sigma2_mai_chip(cfg, M25)
        if n_f == 1:
            assert c == s
        else:
            assert c < s


def test_two_user_formula_against_direct_average():
    cfg = SystemConfig.equal_interferers(64, 8, 2, tx_jitter=U25, noise_psd=0.05, coding="uncoded",
                                         interferer_energy=2.0)
    res = bep_uncoded_two_user(cfg, M25)
    n_c = 8
    d2 = M25.var * n_c / 64 + 2.0 / 64 * (M25.gamma2 - M25.gamma1 ** 2 / n_c) + 0.05
    shift = math.sqrt(2.0) / n_c * M25.gamma1
    ref = 0.5 * stats.norm.sf((M25.mu + shift) / math.sqrt(d2)) + 0.5 * stats.norm.sf((M25.mu - shift) / math.sqrt(d2))
    assert res.bep == pytest.approx(ref, rel=1e-12)
    with pytest.raises(UnsupportedConfiguration):
        bep_uncoded_two_user(fig4(8, "uncoded"), M25)


def test_mode_guards():
    with pytest.raises(UnsupportedConfiguration, match="coding"):
        bep_coded_awgn(fig4(8, "uncoded"), M25)
    with pytest.raises(UnsupportedConfiguration, match="sync"):
        bep_uncoded_symbol_sync(fig4(8, "uncoded", "chip"), M25)
    unequal = SystemConfig(64, 8, 8, num_users=3, interferer_energies=(1.0, 2.0), coding="uncoded")
    with pytest.raises(UnsupportedConfiguration, match="equal interferer energies"):
        bep_uncoded_symbol_sync(unequal, M25)


def test_noiseless_deterministic_limit():
    m0 = compute_moments(JitterSpec.none(), P)
    cfg = SystemConfig(16, 4, 4, noise_psd=0.0)
    assert bep_coded_awgn(cfg, m0).bep == 0.0
    cfg0 = SystemConfig(16, 4, 4, noise_psd=0.0, desired_energy=0.0)
    assert bep_coded_awgn(cfg0, m0).bep == 0.5


def test_config_invariants_named():
    with pytest.raises(ConfigError, match=r"N = N_f \* N_c"):
        SystemConfig(512, 8, 32)
    with pytest.raises(ConfigError, match="num_users - 1"):
        SystemConfig(512, 8, 64, num_users=3, interferer_energies=(1.0,))
    with pytest.raises(ConfigError, match="does not divide"):
        fig4(3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 9), st.floats(1e-3, 1.0), st.integers(2, 30))
def test_chip_sync_never_worse_than_symbol_sync(k, noise, users):
    cfg = SystemConfig.equal_interferers(512, 2 ** k, users, tx_jitter=U25, noise_psd=noise, coding="uncoded")
    sym = bep_uncoded_symbol_sync(cfg, M25).bep
    chip = bep_uncoded_chip_sync(cfg.replace(sync="chip"), M25).bep
    assert chip <= sym


# ------------------------------------------------------------------ multipath

FIG7 = MultipathChannel.on_chip_grid(
    (0.4653, 0.5817, 0.2327, -0.4536, 0.3490, 0.2217, -0.1163, 0.0233, -0.0116, -0.0023), P.chip_duration)
MRC = RakeWeights.mrc(FIG7)


def fig7_cfg(n_f):
    return SystemConfig.equal_interferers(512, n_f, 10, interferer_energy=5.0, noise_psd=0.01,
                                          tx_jitter=JitterSpec.uniform(20e-12))


def test_multipath_single_path_matches_flat_formula():
    ch = MultipathChannel((1.0,), (0.0,), 1)
    rake = RakeWeights((1.0,))
    case = TemplateJitterCase("case1")
    exp = multipath_expectations(U25, P, ch, rake, case)
    for n_f in (4, 64):
        cfg = fig4(n_f)
        mp = bep_multipath_coded(cfg, ch, rake, case, exp)
        flat = bep_coded_awgn(cfg, M25)
        assert mp.terms.jitter_term == pytest.approx(flat.terms.jitter_term, rel=1e-9)
        # sigma2_MAI sums both neighbouring chips; gamma2 only one, so allow the R(T_c)^2 gap
        assert mp.bep == pytest.approx(flat.bep, rel=1e-4)


def test_multipath_guards():
    case = TemplateJitterCase("case1", JitterSpec.uniform(20e-12))
    exp = multipath_expectations(JitterSpec.uniform(20e-12), P, FIG7, MRC, case)
    with pytest.raises(UnsupportedConfiguration, match="M = 10 exceeds N_c = 8"):
        bep_multipath_coded(fig7_cfg(64), FIG7, MRC, case, exp)
    with pytest.raises(UnsupportedConfiguration, match="case3"):
        bep_multipath_coded(fig7_cfg(8), FIG7, MRC, TemplateJitterCase("case3"), exp)
    with pytest.raises(UnsupportedConfiguration):
        bep_multipath_coded(fig7_cfg(8).replace(coding="uncoded"), FIG7, MRC, case, exp)


def test_multipath_terms_assemble():
    case = TemplateJitterCase("case2", JitterSpec.uniform(20e-12))
    exp = multipath_expectations(JitterSpec.uniform(20e-12), P, FIG7, MRC, case)
    cfg = fig7_cfg(16)
    res = bep_multipath_coded(cfg, FIG7, MRC, case, exp)
    n_c, n = 32, 512
    d2 = (n_c / n * exp.var_phi + exp.sigma2_ifi / (n_c * n) + 45 * exp.sigma2_mai / n
          + exp.template_energy * 0.01)
    assert res.terms.total == pytest.approx(d2, rel=1e-13)
    assert res.bep == pytest.approx(stats.norm.sf(exp.mean_phi / math.sqrt(d2)), rel=1e-12)
    # an explicit template energy overrides the jitter-derived one
    res2 = bep_multipath_coded(cfg, FIG7, RakeWeights(MRC.weights, 2.0), case, exp)
    assert res2.terms.noise_term == pytest.approx(0.02)
