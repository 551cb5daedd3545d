"""Processing-gain trade-off (N_f pulses per symbol vs N_c chips per frame) in TH IR-UWB links.

Closed-form Gaussian-approximation BEP, a correlation-level Monte Carlo engine
and sweep tooling over the factorizations of a fixed total processing gain.
"""

from .analytic import (BepResult, BepTerms, bep_coded_awgn, bep_multipath_coded, bep_uncoded_chip_sync,
                       bep_uncoded_symbol_sync, bep_uncoded_two_user, q_function, sigma2_mai_chip,
                       sigma2_mai_symbol)
from .config import SystemConfig
from .enumeration import EnumerationResult, enumerate_exact
from .errors import ConfigError, UnsupportedConfiguration
from .jitter import (JitterMoments, JitterSpec, MultipathExpectations, TemplateJitterCase, compute_moments,
                     multipath_expectations, template_energy)
from .mc import McEstimate, SymbolDraw, TrialPlan, draw_symbols, mf_output_awgn, rake_output_multipath, run
from .pulse import MultipathChannel, PulseModel, RakeWeights, autocorr, cross_corr_uv
from .tradeoff import BepCurve, CurvePoint, SweepRequest, analytic_bep, sweep

__version__ = "0.1.0"
