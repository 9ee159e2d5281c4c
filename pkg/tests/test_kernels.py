"""The numba kernels and their numpy fallbacks must agree."""
import numpy as np
import pytest

from critmetro import _accel, _kernels
from critmetro import fock_oracle as fo

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


@needs_numba
def test_cfi_grid_agree():
    rng = np.random.default_rng(1)
    n = 50
    cols = [rng.normal(size=n) for _ in range(4)] + [rng.uniform(0.1, 2, size=n) for _ in range(2)]
    cols += [rng.normal(size=n) for _ in range(2)]
    th = np.linspace(0, np.pi, 33)
    a = _kernels._cfi_grid_numpy(*cols, th)
    b = _kernels._cfi_grid_numba(*cols, th)
    assert np.allclose(a, b, rtol=1e-13, atol=0)


@needs_numba
def test_ramp_rk4_agree():
    psi = fo.build_state(0.0, 0.5, 30).amplitudes
    a = _kernels._ramp_rk4_numpy(psi, 0.0, 0.01, 200, 1.0, 0.05)
    b = _kernels._ramp_rk4_numba(psi, 0.0, 0.01, 200, 1.0, 0.05)
    assert np.allclose(a, b, rtol=0, atol=1e-13)


@needs_numba
def test_lindblad_rk4_agree():
    dim = 12
    a = fo.annihilation(dim)
    h = 0.7 * a.conj().T @ a + 0.2 * (a + a.conj().T)
    rho = np.zeros((dim, dim), complex)
    rho[0, 0] = 1
    heff = h - 0.5j * 0.8 * a.conj().T @ a
    args = (rho, heff, heff.conj().T, a, a.conj().T, 0.8, 0.01, 100)
    assert np.allclose(_kernels._lindblad_rk4_numpy(*args), _kernels._lindblad_rk4_numba(*args),
                       rtol=0, atol=1e-13)


def test_dispatch_respects_flag(monkeypatch):
    monkeypatch.setattr(_kernels, "USE_NUMBA", False)
    psi = fo.build_state(0.0, 0.5, 10).amplitudes
    out = _kernels.ramp_rk4(psi, 0.0, 0.01, 10, 1.0, 0.05)
    assert out.shape == psi.shape
    assert abs(np.vdot(out, out) - 1) < 1e-10


def test_env_flag_disables_numba():
    import os
    import subprocess
    import sys

    env = dict(os.environ, CRITMETRO_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from critmetro import _accel; print(_accel.USE_NUMBA)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
