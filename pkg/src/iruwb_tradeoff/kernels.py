"""Correlator kernels: assemble matched-filter / Rake outputs from pulse correlations.

Each kernel writes per-symbol components into ``out`` (shape ``(n_sym, U + 1)``):
column 0 the desired term, column 1 user 1's self-interference (IFI), and
column ``u + 1`` the interference from user ``u`` (0-based, u >= 1).

Inputs describe a block of frames for every user: TH chip ``th``, jitter
``jit`` (seconds), amplitude ``amp`` (sqrt(E/N_f) * polarity * bit) and a chip
offset per user. User 0 is the desired user; its template pulse in frame m
sits at chip ``m * n_c + th[0, m]`` with sign ``tpl_sign[m]``.

Two implementations exist with identical semantics: explicit loops (compiled
by numba when enabled) and a vectorized numpy version.
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import USE_NUMBA, maybe_njit

_PI = math.pi
_FOUR_PI = 4.0 * math.pi
_QUARTIC = 4.0 * math.pi ** 2 / 3.0


def _pulse_corr(x):
    # R as a function of lag / tau
    x2 = x * x
    return (1.0 - _FOUR_PI * x2 + _QUARTIC * x2 * x2) * math.exp(-_PI * x2)


_pulse_corr_jit = maybe_njit(_pulse_corr)


def _awgn_loops(th, jit, amp, offsets, tpl_sign, n_c, n_f, first_frame, n_sym,
                chip_duration, tau, cutoff, chip_window, out):
    n_users, n_frames = th.shape
    inv_tau = 1.0 / tau
    for s in range(n_sym):
        for k in range(n_f):
            m = first_frame + s * n_f + k
            q = m * n_c + th[0, m]
            sign = tpl_sign[m]
            for u in range(n_users):
                off = offsets[u]
                lo = (q - chip_window - off - n_c + 1) // n_c
                hi = (q + chip_window - off) // n_c
                if lo < 0:
                    lo = 0
                if hi > n_frames - 1:
                    hi = n_frames - 1
                acc = 0.0
                for f in range(lo, hi + 1):
                    dchip = f * n_c + th[u, f] + off - q
                    if dchip > chip_window or dchip < -chip_window:
                        continue
                    lag = dchip * chip_duration + jit[u, f]
                    if abs(lag) >= cutoff:
                        continue
                    val = amp[u, f] * _pulse_corr_jit(lag * inv_tau)
                    if u == 0 and f == m:
                        out[s, 0] += sign * val
                    else:
                        acc += val
                out[s, u + 1] += sign * acc


def _multipath_loops(th, jit, amp, offsets, tpl_sign, tpl_jit, alpha, beta, delays,
                     n_c, n_f, first_frame, n_sym, chip_duration, tau, cutoff, reach,
                     chip_window, out):
    n_users, n_frames = th.shape
    n_paths = alpha.shape[0]
    inv_tau = 1.0 / tau
    for s in range(n_sym):
        for k in range(n_f):
            m = first_frame + s * n_f + k
            q = m * n_c + th[0, m]
            sign = tpl_sign[m]
            for u in range(n_users):
                off = offsets[u]
                lo = (q - chip_window - off - n_c + 1) // n_c
                hi = (q + chip_window - off) // n_c
                if lo < 0:
                    lo = 0
                if hi > n_frames - 1:
                    hi = n_frames - 1
                acc = 0.0
                for f in range(lo, hi + 1):
                    dchip = f * n_c + th[u, f] + off - q
                    if dchip > chip_window or dchip < -chip_window:
                        continue
                    lag0 = dchip * chip_duration + jit[u, f]
                    if abs(lag0) >= reach:
                        continue
                    phi = 0.0
                    for p in range(n_paths):
                        bp = beta[p]
                        if bp == 0.0:
                            continue
                        base = lag0 - delays[p] - tpl_jit[m, p]
                        for l in range(n_paths):
                            arg = base + delays[l]
                            if abs(arg) >= cutoff:
                                continue
                            phi += alpha[l] * bp * _pulse_corr_jit(arg * inv_tau)
                    val = amp[u, f] * phi
                    if u == 0 and f == m:
                        out[s, 0] += sign * val
                    else:
                        acc += val
                out[s, u + 1] += sign * acc


awgn_loops = maybe_njit(_awgn_loops)
multipath_loops = maybe_njit(_multipath_loops)


def _vec_corr(lag, tau, cutoff):
    x2 = (lag / tau) ** 2
    r = (1.0 - _FOUR_PI * x2 + _QUARTIC * x2 * x2) * np.exp(-_PI * x2)
    return np.where(np.abs(lag) < cutoff, r, 0.0)


def _candidates(th, offsets, q, u, n_c, chip_window):
    """Yield (frame index, chip distance, valid mask) for user ``u`` around template chips ``q``."""
    n_frames = th.shape[1]
    off = offsets[u]
    lo = np.floor_divide(q - chip_window - off - n_c + 1, n_c)
    hi = np.floor_divide(q + chip_window - off, n_c)
    for o in range(int(np.max(hi - lo)) + 1 if q.size else 0):
        f = lo + o
        ok = (f <= hi) & (f >= 0) & (f < n_frames)
        fc = np.clip(f, 0, n_frames - 1)
        dchip = fc * n_c + th[u, fc] + off - q
        ok &= np.abs(dchip) <= chip_window
        yield fc, dchip, ok


def awgn_numpy(th, jit, amp, offsets, tpl_sign, n_c, n_f, first_frame, n_sym,
               chip_duration, tau, cutoff, chip_window, out):
    m = np.arange(first_frame, first_frame + n_sym * n_f)
    q = m * n_c + th[0, m]
    sign = tpl_sign[m]
    for u in range(th.shape[0]):
        desired = np.zeros(m.size)
        other = np.zeros(m.size)
        for f, dchip, ok in _candidates(th, offsets, q, u, n_c, chip_window):
            lag = dchip * chip_duration + jit[u, f]
            val = np.where(ok, amp[u, f] * _vec_corr(lag, tau, cutoff), 0.0)
            if u == 0:
                own = f == m
                desired += np.where(own, val, 0.0)
                val = np.where(own, 0.0, val)
            other += val
        if u == 0:
            out[:, 0] += (sign * desired).reshape(n_sym, n_f).sum(axis=1)
        out[:, u + 1] += (sign * other).reshape(n_sym, n_f).sum(axis=1)


def multipath_numpy(th, jit, amp, offsets, tpl_sign, tpl_jit, alpha, beta, delays,
                    n_c, n_f, first_frame, n_sym, chip_duration, tau, cutoff, reach,
                    chip_window, out):
    m = np.arange(first_frame, first_frame + n_sym * n_f)
    q = m * n_c + th[0, m]
    sign = tpl_sign[m]
    tj = tpl_jit[m]
    for u in range(th.shape[0]):
        desired = np.zeros(m.size)
        other = np.zeros(m.size)
        for f, dchip, ok in _candidates(th, offsets, q, u, n_c, chip_window):
            lag0 = dchip * chip_duration + jit[u, f]
            ok = ok & (np.abs(lag0) < reach)
            phi = np.zeros(m.size)
            for p in range(alpha.size):
                if beta[p] == 0.0:
                    continue
                base = lag0 - delays[p] - tj[:, p]
                for l in range(alpha.size):
                    phi += alpha[l] * beta[p] * _vec_corr(base + delays[l], tau, cutoff)
            val = np.where(ok, amp[u, f] * phi, 0.0)
            if u == 0:
                own = f == m
                desired += np.where(own, val, 0.0)
                val = np.where(own, 0.0, val)
            other += val
        if u == 0:
            out[:, 0] += (sign * desired).reshape(n_sym, n_f).sum(axis=1)
        out[:, u + 1] += (sign * other).reshape(n_sym, n_f).sum(axis=1)


def correlate_awgn(*args, backend: str | None = None):
    """Dispatch to the selected AWGN kernel (``"numba"`` or ``"numpy"``)."""
    backend = backend or ("numba" if USE_NUMBA else "numpy")
    (awgn_loops if backend == "numba" else awgn_numpy)(*args)


def correlate_multipath(*args, backend: str | None = None):
    """Dispatch to the selected multipath kernel (``"numba"`` or ``"numpy"``)."""
    backend = backend or ("numba" if USE_NUMBA else "numpy")
    (multipath_loops if backend == "numba" else multipath_numpy)(*args)
