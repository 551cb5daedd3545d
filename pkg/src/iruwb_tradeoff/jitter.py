"""Timing-jitter families and the jitter functionals used by the BEP formulas.

Expectations are fixed-order Gauss-Legendre sums over the jitter density, with
the support split at 0 (needed by the one-sided integrals in ``beta1``) and at
the truncation points. Results are bit-reproducible for a given node count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import ConfigError, UnsupportedConfiguration

FAMILIES = ("none", "uniform", "truncated_gaussian")
CASES = ("case1", "case2", "case3")
DEFAULT_NODES = 128


@lru_cache(maxsize=8)
def _legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class JitterSpec:
    """One jitter distribution. Offsets are in seconds.

    ``uniform`` lives on [center - half_width, center + half_width];
    ``truncated_gaussian`` is N(center, std^2) cut to [center - truncation,
    center + truncation] and renormalized.
    """

    family: str = "none"
    half_width: float = 0.0
    std: float = 0.0
    truncation: float = 0.0
    center: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unsupported jitter family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "uniform" and not self.half_width > 0:
            raise ConfigError("uniform jitter needs half_width > 0")
        if self.family == "truncated_gaussian" and not (self.std > 0 and self.truncation > 0):
            raise ConfigError("truncated_gaussian jitter needs std > 0 and truncation > 0")

    @classmethod
    def none(cls) -> "JitterSpec":
        return cls("none")

    @classmethod
    def uniform(cls, half_width: float, center: float = 0.0) -> "JitterSpec":
        return cls("uniform", half_width=half_width, center=center)

    @classmethod
    def truncated_gaussian(cls, std: float, chip_duration: float, truncation: float | None = None,
                           center: float = 0.0) -> "JitterSpec":
        # default cut keeps max|eps| < T_c
        if truncation is None:
            truncation = min(3.999 * std, 0.999 * chip_duration)
        return cls("truncated_gaussian", std=std, truncation=truncation, center=center)

    @property
    def support(self) -> tuple[float, float]:
        if self.family == "none":
            return (self.center, self.center)
        width = self.half_width if self.family == "uniform" else self.truncation
        return (self.center - width, self.center + width)

    @property
    def max_abs(self) -> float:
        lo, hi = self.support
        return max(abs(lo), abs(hi))

    def check_support(self, chip_duration: float) -> None:
        if self.max_abs >= chip_duration:
            raise ConfigError(
                f"jitter support {self.support} must lie strictly inside (-T_c, T_c) with T_c = {chip_duration}"
            )

    def variance(self) -> float:
        if self.family == "none":
            return 0.0
        if self.family == "uniform":
            return self.half_width ** 2 / 3.0
        c = self.truncation / self.std
        mass = ndtr(c) - ndtr(-c)
        pdf_c = math.exp(-0.5 * c * c) / math.sqrt(2.0 * math.pi)
        return self.std ** 2 * (1.0 - 2.0 * c * pdf_c / mass)

    def density(self, eps):
        eps = np.asarray(eps, dtype=float)
        lo, hi = self.support
        inside = (eps >= lo) & (eps <= hi)
        if self.family == "uniform":
            return np.where(inside, 1.0 / (hi - lo), 0.0)
        if self.family == "truncated_gaussian":
            c = self.truncation / self.std
            z = (eps - self.center) / self.std
            pdf = np.exp(-0.5 * z * z) / (self.std * math.sqrt(2.0 * math.pi) * (ndtr(c) - ndtr(-c)))
            return np.where(inside, pdf, 0.0)
        raise ValueError("point-mass jitter has no density")

    def quadrature(self, nodes: int = DEFAULT_NODES) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and probability weights (summing to 1) for expectations over this jitter."""
        if self.family == "none":
            return np.array([self.center]), np.array([1.0])
        lo, hi = self.support
        cuts = [lo] + ([0.0] if lo < 0.0 < hi else []) + [hi]
        x, w = _legendre(nodes)
        pts, wts = [], []
        for a, b in zip(cuts, cuts[1:]):
            half = 0.5 * (b - a)
            t = a + half * (x + 1.0)
            pts.append(t)
            wts.append(half * w * self.density(t))
        return np.concatenate(pts), np.concatenate(wts)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.family == "none":
            return np.full(size, self.center, dtype=float)
        if self.family == "uniform":
            lo, hi = self.support
            return rng.uniform(lo, hi, size)
        c = self.truncation / self.std
        p_lo = ndtr(-c)
        u = rng.random(size)
        return self.center + self.std * ndtri(p_lo + u * (ndtr(c) - p_lo))


@dataclass(frozen=True)
class JitterMoments:
    """Jitter functionals of the pulse autocorrelation R.

    mu = E R(e), var = Var R(e), gamma1 = E R(e) + E R(T_c - |e|),
    gamma2 = E R^2(e) + E R^2(T_c - |e|), and the beta corrections.
    """

    mu: float
    var: float
    gamma1: float
    gamma2: float
    beta1: float
    beta2: float


@dataclass(frozen=True)
class TemplateJitterCase:
    """Statistics of the Rake template jitter.

    case1: i.i.d. over frames and fingers; case2: one value per frame shared by
    all fingers; case3: one value per finger shared by all frames.
    """

    case_id: str
    spec: JitterSpec = JitterSpec()

    def __post_init__(self):
        if self.case_id not in CASES:
            raise ConfigError(f"template jitter case must be one of {CASES}, got {self.case_id!r}")


def compute_moments(spec: JitterSpec, pulse, nodes: int = DEFAULT_NODES) -> JitterMoments:
    spec.check_support(pulse.chip_duration)
    eps, w = spec.quadrature(nodes)
    tc = pulse.chip_duration
    r0 = pulse.autocorr(eps)
    r_edge = pulse.autocorr(tc - np.abs(eps))
    mu = float(w @ r0)
    second = float(w @ r0 ** 2)
    edge_mean = float(w @ r_edge)
    # one-sided integrals; a node sitting exactly on 0 is split evenly
    side = np.where(eps < 0, 1.0, np.where(eps > 0, 0.0, 0.5))
    neg = float((w * side) @ pulse.autocorr(tc + eps))
    pos = float((w * (1.0 - side)) @ pulse.autocorr(tc - eps))
    return JitterMoments(
        mu=mu,
        var=max(second - mu * mu, 0.0),
        gamma1=mu + edge_mean,
        gamma2=second + float(w @ r_edge ** 2),
        beta1=2.0 * float(w @ (r_edge * r0)) - 2.0 * edge_mean ** 2 + 4.0 * neg * pos,
        beta2=2.0 * edge_mean ** 2,
    )


@dataclass(frozen=True)
class MultipathExpectations:
    """Jitter-averaged functionals of the channel/template cross-correlation."""

    mean_phi: float
    var_phi: float
    sigma2_ifi: float
    sigma2_mai: float
    template_energy: float


class _CrossCorrGrid:
    """Per-finger cross-correlation terms on the (tx jitter x template jitter) grid.

    finger_terms(s)[p, i, j] = beta_p * sum_l alpha_l R(tau_p - tau_l - s + b_j - a_i)
    where a_i are transmitter-jitter nodes and b_j template-jitter nodes.
    """

    def __init__(self, pulse, channel, rake, tx: JitterSpec, template: JitterSpec, nodes: int):
        self.pulse = pulse
        self.alpha = np.asarray(channel.gains)
        self.beta = np.asarray(rake.weights)
        self.tau = np.asarray(channel.delays)
        self.xa, self.wa = tx.quadrature(nodes)
        self.xb, self.wb = template.quadrature(nodes)
        self.diff = self.xb[None, :] - self.xa[:, None]
        self.reach = pulse.cutoff + float(np.max(np.abs(self.diff)))

    def finger_terms(self, s: float) -> np.ndarray:
        n = len(self.beta)
        out = np.zeros((n,) + self.diff.shape)
        for p in range(n):
            if self.beta[p] == 0.0:
                continue
            for l in range(n):
                base = self.tau[p] - self.tau[l] - s
                if abs(base) >= self.reach or self.alpha[l] == 0.0:
                    continue
                out[p] += self.alpha[l] * self.pulse.autocorr(base + self.diff)
            out[p] *= self.beta[p]
        return out

    def moments(self, s: float, shared: bool):
        """(E phi, E phi^2, conditional-mean data) for phi(s + eps)."""
        h = self.finger_terms(s)
        if shared:
            phi = h.sum(axis=0)
            mean = float(self.wa @ phi @ self.wb)
            second = float(self.wa @ phi ** 2 @ self.wb)
            return mean, second, self.wa @ phi
        g = h @ self.wb
        sq = (h ** 2) @ self.wb
        total = g.sum(axis=0)
        mean = float(self.wa @ total)
        second = float(self.wa @ (total ** 2 + (sq - g ** 2).sum(axis=0)))
        return mean, second, np.einsum("i,pij->pj", self.wa, h)

    def cross(self, cond_x, cond_y, shared: bool) -> float:
        """E[phi(s1 + e) phi(s2 + e')] for independent tx jitters and a common template draw."""
        if shared:
            return float(self.wb @ (cond_x * cond_y))
        ex = cond_x @ self.wb
        ey = cond_y @ self.wb
        return float(ex.sum() * ey.sum() + ((cond_x * cond_y) @ self.wb - ex * ey).sum())


def template_energy(pulse, channel, rake, case: TemplateJitterCase, nodes: int = DEFAULT_NODES) -> float:
    """Expected per-frame energy of the jittered Rake template."""
    beta = np.asarray(rake.weights)
    tau = np.asarray(channel.delays)
    n = len(beta)
    total = float(beta @ beta)
    if case.case_id == "case2" or case.spec.family == "none":
        shifts = tau[:, None] - tau[None, :]
        r = pulse.autocorr(shifts)
        np.fill_diagonal(r, 0.0)
        return total + float(beta @ r @ beta)
    xb, wb = case.spec.quadrature(nodes)
    d = xb[:, None] - xb[None, :]
    for l in range(n):
        for p in range(n):
            if l != p:
                total += beta[l] * beta[p] * float(wb @ pulse.autocorr(tau[l] - tau[p] + d) @ wb)
    return total


def multipath_expectations(spec: JitterSpec, pulse, channel, rake, case: TemplateJitterCase,
                           nodes: int = DEFAULT_NODES) -> MultipathExpectations:
    """Mean/variance of the desired cross-correlation plus the IFI and MAI sums.

    ``spec`` is the transmitter jitter (all users); expectations run jointly over
    it and the template jitter of ``case``.
    """
    if case.case_id == "case3":
        raise UnsupportedConfiguration(
            "no closed form for template-jitter case3; use the Monte Carlo engine"
        )
    rake.check(channel)
    channel.check_grid(pulse.chip_duration)
    spec.check_support(pulse.chip_duration)
    case.spec.check_support(pulse.chip_duration)
    shared = case.case_id == "case2"
    grid = _CrossCorrGrid(pulse, channel, rake, spec, case.spec, nodes)
    tc = pulse.chip_duration
    m = channel.chip_span

    mean, second, _ = grid.moments(0.0, shared)
    sigma2_mai = 0.0
    sigma2_ifi = 0.0
    stats = {}
    for j in range(-m, m + 1):
        stats[j] = grid.moments(j * tc, shared)
        sigma2_mai += stats[j][1]
    for j in range(1, m + 1):
        _, plus2, cond_plus = stats[j]
        _, minus2, cond_minus = stats[-j]
        sigma2_ifi += j * (plus2 + minus2 + 2.0 * grid.cross(cond_plus, cond_minus, shared))
    return MultipathExpectations(
        mean_phi=mean,
        var_phi=max(second - mean * mean, 0.0),
        sigma2_ifi=sigma2_ifi,
        sigma2_mai=sigma2_mai,
        template_energy=template_energy(pulse, channel, rake, case, nodes),
    )
