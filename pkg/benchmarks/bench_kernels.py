#!/usr/bin/env python3
"""Benchmark the compiled stepper against the pure-Python twin.

Two workloads: a batch of raw integrations at reference parameters, and one
full nested eigenvalue solve.  Run after installing the package:

    python3 benchmarks/bench_kernels.py
"""

import time

from glshoot import FieldState, ModelParams, ShootSpec, solve_eigenpair
from glshoot import _stepper_py
from glshoot.integrator import IntegratorConfig, integrate

try:
    from glshoot import _stepper
except ImportError:
    _stepper = None

PARAMS = ModelParams(1, 1, 0.1, 1.0, 1.25104535, 1.1056305)
INIT = FieldState(0.0, 1.0, 0.3, 0.0, 0.0)
CFG = IntegratorConfig()


def bench_integrations(kernel, n=200):
    t0 = time.perf_counter()
    steps = 0
    for _ in range(n):
        traj = integrate(PARAMS, INIT, CFG, _kernel=kernel)
        steps += len(traj)
    dt = time.perf_counter() - t0
    return dt, steps


def bench_solve(kernel):
    import glshoot.integrator as integ

    saved = integ._kernel_mod
    integ._kernel_mod = kernel
    try:
        t0 = time.perf_counter()
        result = solve_eigenpair(ShootSpec(chi0=0.3))
        dt = time.perf_counter() - t0
    finally:
        integ._kernel_mod = saved
    return dt, result


def main():
    kernels = [("pure", _stepper_py)]
    if _stepper is not None:
        kernels.insert(0, ("compiled", _stepper))
    else:
        print("compiled stepper not built; benchmarking the pure kernel only")

    print(f"{'kernel':<10} {'200 integrations':>18} {'steps/s':>12} {'one eigen solve':>17}")
    times = {}
    for name, kernel in kernels:
        dt_int, steps = bench_integrations(kernel)
        dt_solve, result = bench_solve(kernel)
        times[name] = (dt_int, dt_solve)
        print(f"{name:<10} {dt_int:>16.3f}s {steps / dt_int:>12.0f} {dt_solve:>15.3f}s"
              f"   (mu1={result.mu1:.8f})")

    if "compiled" in times:
        s_int = times["pure"][0] / times["compiled"][0]
        s_solve = times["pure"][1] / times["compiled"][1]
        print(f"\nspeedup: {s_int:.1f}x on raw integrations, {s_solve:.1f}x on the solve")


if __name__ == "__main__":
    main()
