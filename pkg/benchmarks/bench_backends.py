"""Time the compiled and pure-Python simulation kernels on one scenario.

Usage:
    python3 benchmarks/bench_backends.py [--t-end 150] [--repeat 5]

Runs the benchmark vehicle with the improved event trigger through each
available kernel, reports steps per second, and cross-checks that both
kernels produce bit-identical logs."""
import argparse
import time

import numpy as np

from etlqr import (Disturbance, EtmDesign, LqrWeights, VehicleParams,
                   build_plant, synthesize)
from etlqr import _loop_py

try:
    from etlqr import _loop_c
except ImportError:
    _loop_c = None

KINDS = {"time-triggered": 0, "event-triggered": 1}


def make_args(n, dt, kind):
    vehicle = VehicleParams(m=1421.0, mu=0.6, vx=18.0, iz=2570.0, cf=170550.0,
                            cr=137844.0, lf=1.191, lr=1.513, rho=0.001)
    plant = build_plant(vehicle)
    design = EtmDesign(z_bar=1.0, epsilon=1.0, theta_l=8.0, theta_r=0.1)
    syn = synthesize(plant, LqrWeights(Q=np.diag([30.0, 10.0, 1.0, 1.0]), r=1000.0),
                     design)
    phases = np.random.RandomState(0).uniform(0.0, 2.0 * np.pi, 4)
    return (plant.A, plant.B[:, 0].copy(), syn.K.reshape(4).copy(), plant.G,
            np.zeros(4), n, dt, kind, dt,
            design.z_bar, design.epsilon,
            design.theta_l * syn.lam_min_n / syn.lam_min_m,
            design.theta_r * syn.mbk_norm / syn.lam_min_m,
            np.array([3e-4, 1e-3, 0.0, 0.0]), 0.3,
            np.array([1.0, 2.0, 0.0, 0.0]), phases, True)


def outputs(n):
    return (np.empty((n + 1, 4)), np.empty(n + 1), np.empty(n + 1),
            np.zeros(n + 1, dtype=np.uint8), np.empty((n + 1, 4)),
            np.zeros(n + 1, dtype=np.int64))


def bench(mod, args, n, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        out = outputs(n)
        t0 = time.perf_counter()
        status = mod.simulate(*args, *out)
        best = min(best, time.perf_counter() - t0)
        result = (status, out)
    return best, result


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-end", type=float, default=150.0,
                    help="simulated horizon in seconds (default 150)")
    ap.add_argument("--dt", type=float, default=0.01)
    ap.add_argument("--repeat", type=int, default=5,
                    help="timing repetitions, best-of (default 5)")
    opts = ap.parse_args()
    n = int(round(opts.t_end / opts.dt))

    mods = [("pure-python", _loop_py)]
    if _loop_c is not None:
        mods.insert(0, ("compiled", _loop_c))
    else:
        print("note: compiled kernel not built, timing the fallback only\n")

    print(f"{n} steps per run, best of {opts.repeat}\n")
    print(f"{'kernel':<14} {'mode':<16} {'time':>10} {'steps/s':>12} {'triggers':>9}")
    times = {}
    logs = {}
    for kind_name, kind in KINDS.items():
        args = make_args(n, opts.dt, kind)
        for mod_name, mod in mods:
            best, (status, out) = bench(mod, args, n, opts.repeat)
            if status[0] != 0:
                raise RuntimeError(f"{mod_name} kernel aborted: {status}")
            times[mod_name, kind_name] = best
            logs[mod_name, kind_name] = (status, out)
            print(f"{mod_name:<14} {kind_name:<16} {best*1e3:>8.2f}ms "
                  f"{n/best:>12.3g} {status[1]:>9d}")

    if _loop_c is not None:
        for kind_name in KINDS:
            speedup = times['pure-python', kind_name] / times['compiled', kind_name]
            s_c, o_c = logs["compiled", kind_name]
            s_p, o_p = logs["pure-python", kind_name]
            identical = (s_c == s_p
                         and all(np.array_equal(a, b) for a, b in zip(o_c, o_p)))
            print(f"\n{kind_name}: compiled is {speedup:.1f}x faster; "
                  f"outputs bit-identical: {identical}")
            if not identical:
                return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
