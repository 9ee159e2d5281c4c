"""Hot inner loops.

Every kernel exists twice: a numba version written as explicit loops and a
numpy version written with array slicing. ``cfi_grid``, ``ramp_rk4`` and
``lindblad_rk4`` dispatch on :data:`critmetro._accel.USE_NUMBA`; both variants
stay importable so the benchmark and the agreement tests can call either.
"""
import numpy as np

from ._accel import USE_NUMBA, njit


# ---------------------------------------------------------------------------
# quadrature CFI over a (state, angle) grid


def _cfi_grid_numpy(mx, mp, dmx, dmp, vx, vp, dvx, dvp, thetas):
    c = np.cos(thetas)[None, :]
    s = np.sin(thetas)[None, :]
    c2 = c * c
    s2 = s * s
    dm = dmx[:, None] * c + dmp[:, None] * s
    var = vx[:, None] * c2 + vp[:, None] * s2
    dvar = dvx[:, None] * c2 + dvp[:, None] * s2
    return dm * dm / var + 0.5 * (dvar / var) ** 2


@njit
def _cfi_grid_numba(mx, mp, dmx, dmp, vx, vp, dvx, dvp, thetas):
    m = mx.shape[0]
    k = thetas.shape[0]
    out = np.empty((m, k))
    cs = np.cos(thetas)
    sn = np.sin(thetas)
    for j in range(k):
        c = cs[j]
        s = sn[j]
        c2 = c * c
        s2 = s * s
        for i in range(m):
            dm = dmx[i] * c + dmp[i] * s
            var = vx[i] * c2 + vp[i] * s2
            dvar = dvx[i] * c2 + dvp[i] * s2
            r = dvar / var
            out[i, j] = dm * dm / var + 0.5 * r * r
    return out


def cfi_grid(mx, mp, dmx, dmp, vx, vp, dvx, dvp, thetas):
    """Quadrature CFI for M axis-aligned Gaussian states at K angles.

    All state arguments are 1-d arrays of length M holding X/P means, their
    derivatives, the X/P variances and their derivatives. Returns (M, K).
    """
    args = [np.ascontiguousarray(a, dtype=np.float64)
            for a in (mx, mp, dmx, dmp, vx, vp, dvx, dvp, thetas)]
    if USE_NUMBA:
        return _cfi_grid_numba(*args)
    return _cfi_grid_numpy(*args)


# ---------------------------------------------------------------------------
# Schroedinger equation under the ramped squeezing Hamiltonian
#
# H(t) = omega n - lam(t) (a + a^dag)^2,  lam = g(t)^2 / (4 Omega)
#      = omega s (s + 1) / (2 s + 1)^2 with s = gamma omega t.


@njit
def _ramp_rhs_numba(psi, t, omega, gamma, sq, out):
    s = gamma * omega * t
    lam = omega * s * (s + 1.0) / ((2.0 * s + 1.0) ** 2)
    n = psi.shape[0]
    for k in range(n):
        acc = (omega * k - lam * (2.0 * k + 1.0)) * psi[k]
        if k + 2 < n:
            acc -= lam * sq[k + 2] * psi[k + 2]
        if k >= 2:
            acc -= lam * sq[k] * psi[k - 2]
        out[k] = -1j * acc


@njit
def _ramp_rk4_numba(psi, t0, dt, nsteps, omega, gamma):
    n = psi.shape[0]
    sq = np.empty(n)
    for k in range(n):
        sq[k] = np.sqrt(k * (k - 1.0)) if k >= 1 else 0.0
    y = psi.copy()
    k1 = np.empty(n, dtype=np.complex128)
    k2 = np.empty(n, dtype=np.complex128)
    k3 = np.empty(n, dtype=np.complex128)
    k4 = np.empty(n, dtype=np.complex128)
    tmp = np.empty(n, dtype=np.complex128)
    h = dt
    for step in range(nsteps):
        t = t0 + step * h
        _ramp_rhs_numba(y, t, omega, gamma, sq, k1)
        for i in range(n):
            tmp[i] = y[i] + 0.5 * h * k1[i]
        _ramp_rhs_numba(tmp, t + 0.5 * h, omega, gamma, sq, k2)
        for i in range(n):
            tmp[i] = y[i] + 0.5 * h * k2[i]
        _ramp_rhs_numba(tmp, t + 0.5 * h, omega, gamma, sq, k3)
        for i in range(n):
            tmp[i] = y[i] + h * k3[i]
        _ramp_rhs_numba(tmp, t + h, omega, gamma, sq, k4)
        for i in range(n):
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return y


def _ramp_rk4_numpy(psi, t0, dt, nsteps, omega, gamma):
    n = psi.shape[0]
    k = np.arange(n, dtype=np.float64)
    sq = np.sqrt(k * (k - 1.0))
    sq[:2] = 0.0
    up = sq[2:]  # <k|a^2|k+2> for k = 0..n-3

    def rhs(y, t):
        s = gamma * omega * t
        lam = omega * s * (s + 1.0) / (2.0 * s + 1.0) ** 2
        acc = (omega * k - lam * (2.0 * k + 1.0)) * y
        acc[:-2] -= lam * up * y[2:]
        acc[2:] -= lam * up * y[:-2]
        return -1j * acc

    y = psi.copy()
    h = dt
    for step in range(nsteps):
        t = t0 + step * h
        a1 = rhs(y, t)
        a2 = rhs(y + 0.5 * h * a1, t + 0.5 * h)
        a3 = rhs(y + 0.5 * h * a2, t + 0.5 * h)
        a4 = rhs(y + h * a3, t + h)
        y = y + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    return y


def ramp_rk4(psi, t0, dt, nsteps, omega, gamma):
    """Fixed-step RK4 for the ramped squeezing Hamiltonian in the Fock basis."""
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    if USE_NUMBA:
        return _ramp_rk4_numba(psi, float(t0), float(dt), int(nsteps),
                               float(omega), float(gamma))
    return _ramp_rk4_numpy(psi, float(t0), float(dt), int(nsteps),
                           float(omega), float(gamma))


# ---------------------------------------------------------------------------
# Lindblad generator with a single jump operator, time-independent


def _lindblad_rk4_numpy(rho, heff, heff_dag, c, c_dag, kappa, dt, nsteps):
    def rhs(r):
        return -1j * (heff @ r - r @ heff_dag) + kappa * (c @ r @ c_dag)

    y = rho.copy()
    h = dt
    for _ in range(nsteps):
        a1 = rhs(y)
        a2 = rhs(y + 0.5 * h * a1)
        a3 = rhs(y + 0.5 * h * a2)
        a4 = rhs(y + h * a3)
        y = y + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    return y


@njit
def _lindblad_rhs_numba(r, heff, heff_dag, c, c_dag, kappa):
    return -1j * (np.dot(heff, r) - np.dot(r, heff_dag)) \
        + kappa * np.dot(np.dot(c, r), c_dag)


@njit
def _lindblad_rk4_numba(rho, heff, heff_dag, c, c_dag, kappa, dt, nsteps):
    y = rho.copy()
    h = dt
    for _ in range(nsteps):
        a1 = _lindblad_rhs_numba(y, heff, heff_dag, c, c_dag, kappa)
        a2 = _lindblad_rhs_numba(y + 0.5 * h * a1, heff, heff_dag, c, c_dag, kappa)
        a3 = _lindblad_rhs_numba(y + 0.5 * h * a2, heff, heff_dag, c, c_dag, kappa)
        a4 = _lindblad_rhs_numba(y + h * a3, heff, heff_dag, c, c_dag, kappa)
        y = y + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    return y


def lindblad_rk4(rho, h, c, kappa, dt, nsteps):
    """Advance ``rho`` by ``nsteps`` RK4 steps of the Lindblad equation.

    Uses the effective non-Hermitian Hamiltonian h - i kappa/2 c^dag c, so the
    generator is -i(Heff rho - rho Heff^dag) + kappa c rho c^dag.
    """
    cc = lambda a: np.ascontiguousarray(a, dtype=np.complex128)
    c = cc(c)
    c_dag = cc(c.conj().T)
    heff = cc(h - 0.5j * kappa * (c_dag @ c))
    heff_dag = cc(heff.conj().T)
    rho = cc(rho)
    if USE_NUMBA:
        return _lindblad_rk4_numba(rho, heff, heff_dag, c, c_dag,
                                   float(kappa), float(dt), int(nsteps))
    return _lindblad_rk4_numpy(rho, heff, heff_dag, c, c_dag,
                               float(kappa), float(dt), int(nsteps))
