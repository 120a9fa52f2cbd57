"""Benchmark the compiled GPE kernels against the NumPy/SciPy fallback.

Times the three hot operations of one Strang step (tridiagonal solve,
tridiagonal apply, nonlinear phase rotation) and a full real-time evolution
step on a production-size grid, then prints the speedup.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from ramsey_lab.gpe import GpeConfig, ground_state
from ramsey_lab.gpe import kernels
from ramsey_lab.gpe.solver import apply_pi_half, evolve

N_RHO, N_Z = 128, 256
REPEATS = 50


def _bench(label, func, *args, repeats=REPEATS):
    func(*args)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        func(*args)
    dt = (time.perf_counter() - t0) / repeats
    print(f"  {label:<24s} {dt * 1e3:8.3f} ms")
    return dt


def bench_kernels():
    rng = np.random.default_rng(0)
    lower, diag, upper = (
        (rng.normal(size=N_RHO) + 1j * rng.normal(size=N_RHO)) * 0.05
        for _ in range(3))
    diag = diag + 1.0
    rhs = rng.normal(size=(N_RHO, N_Z)) + 1j * rng.normal(size=(N_RHO, N_Z))
    psi1 = rng.normal(size=(N_RHO, N_Z)) + 1j * rng.normal(size=(N_RHO, N_Z))
    psi2 = rng.normal(size=(N_RHO, N_Z)) + 1j * rng.normal(size=(N_RHO, N_Z))
    pot = rng.normal(size=(N_RHO, N_Z)) ** 2

    results = {}
    for name, fast, slow, args in (
        ("solve_tridiagonal", kernels.solve_tridiagonal,
         kernels.solve_tridiagonal_numpy, (lower, diag, upper, rhs)),
        ("apply_tridiagonal", kernels.apply_tridiagonal,
         kernels.apply_tridiagonal_numpy, (lower, diag, upper, rhs)),
        ("phase_step", kernels.phase_step, kernels.phase_step_numpy,
         (psi1, psi2, pot, 1.2, 0.8, 1.1, 1e-3)),
    ):
        print(f"{name} ({N_RHO} x {N_Z}):")
        t_active = _bench("active backend", fast, *args)
        t_numpy = _bench("numpy fallback", slow, *args)
        results[name] = t_numpy / t_active
        print(f"  speedup {results[name]:.2f}x")
    return results


def bench_full_step():
    cfg = GpeConfig(n_atoms=1e5, n_rho=N_RHO, n_z=N_Z)
    state = ground_state(cfg, schedule=((0.02, 100),))
    apply_pi_half(state)
    duration = 20 * cfg.dt / cfg.omega_bar  # 20 Strang steps

    t0 = time.perf_counter()
    evolve(state, cfg, duration)
    per_step = (time.perf_counter() - t0) / 20
    print(f"full Strang step ({N_RHO} x {N_Z}): {per_step * 1e3:.2f} ms "
          f"({'compiled' if kernels.USING_COMPILED else 'numpy'} backend)")


def main():
    backend = "compiled" if kernels.USING_COMPILED else "numpy fallback"
    print(f"active backend: {backend}")
    print("(set RAMSEY_LAB_PURE_PYTHON=1 to force the fallback)\n")
    bench_kernels()
    print()
    bench_full_step()


if __name__ == "__main__":
    main()
