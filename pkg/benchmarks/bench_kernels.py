"""Time the compiled correlator kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--symbols 2000] [--repeat 3]

Both backends run on the same random draw; the script also checks that they
agree before reporting timings.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from iruwb_tradeoff import _accel, mc
from iruwb_tradeoff.config import SystemConfig
from iruwb_tradeoff.jitter import JitterSpec, TemplateJitterCase
from iruwb_tradeoff.presets import fig7_setup
from iruwb_tradeoff.pulse import PulseModel

P = PulseModel()


def cases(symbols: int):
    u25 = JitterSpec.uniform(25e-12)
    for n_f in (16, 64):
        cfg = SystemConfig.equal_interferers(512, n_f, 10, tx_jitter=u25, noise_psd=0.1)
        yield f"awgn coded N_f={n_f}", mc.TrialPlan(cfg, symbols, 1)
    cfg, channel, rake = fig7_setup()
    case = TemplateJitterCase("case1", JitterSpec.uniform(20e-12))
    yield "multipath case1 N_f=16", mc.TrialPlan(cfg.with_split(16), symbols, 1, channel=channel,
                                                 rake=rake, template_case=case)


def run_once(plan, draw, backend):
    if plan.multipath:
        return mc.rake_output_multipath(draw, plan.cfg, plan.channel, plan.rake, plan.pulse,
                                        components=True, backend=backend)
    return mc.mf_output_awgn(draw, plan.cfg, plan.pulse, components=True, backend=backend)


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--symbols", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if _accel.HAVE_NUMBA else [])
    print(f"{'case':<26}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, plan in cases(args.symbols):
        draw = mc.draw_symbols(plan, args.symbols, mc.partition_rngs(plan.seed, 0))
        ref = None
        times = []
        for b in backends:
            out = run_once(plan, draw, b)  # also triggers compilation
            if ref is None:
                ref = out
            else:
                np.testing.assert_allclose(out, ref, rtol=1e-10, atol=1e-12)
            times.append(best_time(lambda: run_once(plan, draw, b), args.repeat))
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else ""
        print(f"{name:<26}" + "".join(f"{t:>11.3f}s" for t in times) + speed)


if __name__ == "__main__":
    main()
