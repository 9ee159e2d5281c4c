"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

The first numba call (compilation or cache load) is excluded from timings.
"""
import argparse
import time

import numpy as np

from critmetro import _accel, _kernels
from critmetro import fisher_closed as fc
from critmetro import fock_oracle as fo


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    sw = fc.closed_sweep(1.0 - np.geomspace(0.5, 1e-5, 512), alpha_arg=-0.3)
    cols = [np.broadcast_to(np.asarray(a, float), (512,)).copy()
            for a in fc._state_arrays(sw["state"], sw["derivs"])]
    thetas = fc.angle_grid()
    psi = fo.build_state(0.0, 0.5, 60).amplitudes
    dim = 40
    a = fo.annihilation(dim)
    h = a.conj().T @ a + 0.3 * (a + a.conj().T)
    heff = h - 0.5j * a.conj().T @ a
    rho = np.zeros((dim, dim), complex)
    rho[0, 0] = 1.0
    lind = (rho, heff, heff.conj().T, a, a.conj().T, 1.0, 0.01, 500)
    return {
        "cfi_grid 512x720": (lambda: _kernels._cfi_grid_numpy(*cols, thetas),
                             lambda: _kernels._cfi_grid_numba(*cols, thetas)),
        "ramp_rk4 dim 61, 20000 steps": (
            lambda: _kernels._ramp_rk4_numpy(psi, 0.0, 0.01, 20000, 1.0, 1e-3),
            lambda: _kernels._ramp_rk4_numba(psi, 0.0, 0.01, 20000, 1.0, 1e-3)),
        "lindblad_rk4 dim 40, 500 steps": (lambda: _kernels._lindblad_rk4_numpy(*lind),
                                           lambda: _kernels._lindblad_rk4_numba(*lind)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':<34s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s}")
    for name, (np_fn, nb_fn) in cases().items():
        nb_fn()  # compile or load from cache
        t_np, t_nb = best_of(np_fn, args.repeat), best_of(nb_fn, args.repeat)
        print(f"{name:<34s} {1e3 * t_np:11.2f} {1e3 * t_nb:11.2f} {t_np / t_nb:8.1f}")


if __name__ == "__main__":
    main()
