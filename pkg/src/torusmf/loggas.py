"""Closed Fourier hierarchy of the circular log-gas flow.

For the kernel with coefficients 1/(2k) the flow closes mode by mode:

    d/dt qhat(k) = -2 pi^2 k (k - K) qhat(k)
                   + 2 pi^2 k K sum_{j=1}^{k-1} qhat(j) qhat(k-j),

so the first M coefficients form an autonomous triangular ODE system.
At integer coupling K = n the Poisson-kernel family with period 1/n is
stationary; the cancellation is algebraic, and the right-hand side is
evaluated in extended precision so it survives at the 1e-14 scale.
"""

from __future__ import annotations

import numpy as np


def stationary_coeffs(c: float, n: int, m: int) -> np.ndarray:
    """qhat(1..m) of the stationary family at coupling K = n:

    qhat(j n) = c^(j), zero off the lattice of n.
    """
    if not 0.0 <= c < 1.0:
        raise ValueError("c must lie in [0, 1)")
    if n < 1:
        raise ValueError("the stationary family needs integer coupling n >= 1")
    # extended precision: verifying the algebraic cancellation at the
    # 1e-14 scale needs inputs whose powers are consistent beyond double
    out = np.zeros(m, dtype=np.clongdouble)
    js = np.arange(n, m + 1, n)
    out[js - 1] = np.longdouble(c) ** (js // n)
    return out


def loggas_rhs(coeffs: np.ndarray, coupling: float) -> np.ndarray:
    """Right-hand side of the hierarchy for coeffs = qhat(1..M).

    The mode-k equation only uses modes below k, honored exactly by the
    triangular convolution.  Internally evaluated in extended precision
    (the stationary-family cancellation sits below double rounding noise).
    """
    coeffs = np.asarray(coeffs)
    m = coeffs.shape[0]
    q = coeffs.astype(np.clongdouble)
    k = np.arange(1, m + 1, dtype=np.longdouble)
    kk = np.longdouble(coupling)
    conv = np.zeros(m, dtype=np.clongdouble)
    if m >= 2:
        # full self-convolution: entry k-2 is sum_{j=1}^{k-1} qhat(j) qhat(k-j)
        conv[1:] = np.convolve(q, q)[: m - 1]
    two_pi2 = 2.0 * np.longdouble(np.pi) ** 2
    rhs = -two_pi2 * k * (k - kk) * q + two_pi2 * k * kk * conv
    return rhs.astype(complex)


def integrate_hierarchy(
    q0: np.ndarray,
    coupling: float,
    horizon: float,
    dt: float = 1e-5,
    record_every: int = 100,
) -> tuple[np.ndarray, np.ndarray]:
    """Classic fixed-step RK4 on the hierarchy.

    Returns (times, trajectory) with trajectory[i] = qhat(1..M) at
    times[i].  The linear part is stiff like k^2, so dt must satisfy
    2 pi^2 M (M - K) dt < 2.8 for stability.
    """
    q = np.asarray(q0, dtype=complex).copy()
    m = q.shape[0]
    lam = 2.0 * np.pi**2 * m * abs(m - coupling)
    if lam * dt > 2.8:
        raise ValueError(
            f"dt={dt:.2e} unstable for M={m}; need dt < {2.8 / lam:.2e}"
        )
    n_steps = int(round(horizon / dt))
    times = [0.0]
    traj = [q.copy()]
    for step in range(1, n_steps + 1):
        k1 = loggas_rhs(q, coupling)
        k2 = loggas_rhs(q + 0.5 * dt * k1, coupling)
        k3 = loggas_rhs(q + 0.5 * dt * k2, coupling)
        k4 = loggas_rhs(q + dt * k3, coupling)
        q = q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step % record_every == 0 or step == n_steps:
            times.append(step * dt)
            traj.append(q.copy())
    return np.asarray(times), np.asarray(traj)
