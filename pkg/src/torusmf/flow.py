"""Pseudospectral integrator for the nonlinear Fokker-Planck flow

    dq/dt = (1/2) q'' - K (q (W * q)')'

on the circle, which is the 2-Wasserstein gradient flow of the free
energy.  Diffusion is integrated exactly through the factor
exp(-2 pi^2 k^2 dt); the transport term is advanced with the two-stage
exponential scheme ETD2RK (Cox & Matthews, J. Comput. Phys. 176, 2002)
and the pointwise product is de-aliased with the 2/3 rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import density as dens
from .density import Density, free_energy, fourier_to_grid, grid_to_fourier
from .errors import BlowUp, DegenerateWindow, TimeStepTooLarge
from .metrics import distance

#: CFL safety factor for the explicit transport substep
CFL_SAFETY = 0.2


@lru_cache(maxsize=16)
def _etd_tables(m: int, dt: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    k = np.arange(m // 2 + 1, dtype=float)
    z = -2.0 * np.pi**2 * k**2 * dt
    e1 = np.exp(z)
    small = np.abs(z) < 1e-3
    with np.errstate(divide="ignore", invalid="ignore"):
        phi1 = np.expm1(z) / z
        phi2 = (np.expm1(z) - z) / (z * z)
    # series for tiny |z| where the quotients lose digits
    zs = z[small]
    phi1[small] = 1.0 + zs / 2.0 + zs**2 / 6.0 + zs**3 / 24.0
    phi2[small] = 0.5 + zs / 6.0 + zs**2 / 24.0 + zs**3 / 120.0
    return e1, dt * phi1, dt * phi2


@lru_cache(maxsize=16)
def _dealias_mask(m: int) -> np.ndarray:
    k = np.arange(m // 2 + 1)
    mask = (k <= m // 3).astype(float)
    mask.flags.writeable = False
    return mask


def _transport_hat(qhat: np.ndarray, wk_full: np.ndarray, coupling: float,
                   m: int, dt: float) -> np.ndarray:
    """-2 pi i k K * FFT(q * (W*q)') with 2/3 de-aliasing; also CFL-checks."""
    mask = _dealias_mask(m)
    k = np.arange(m // 2 + 1)
    qh = qhat * mask
    vhat = 2j * np.pi * k * wk_full * qh
    qg = fourier_to_grid(qh, m)
    vg = fourier_to_grid(vhat, m)
    vmax = np.abs(coupling * vg).max()
    if math.isfinite(dt) and vmax > 0.0 and dt > CFL_SAFETY / (m * vmax):
        raise TimeStepTooLarge(
            f"dt={dt:.3e} exceeds transport CFL bound "
            f"{CFL_SAFETY / (m * vmax):.3e}"
        )
    fhat = grid_to_fourier(qg * vg) * mask
    return -2j * np.pi * k * coupling * fhat


def _etd2_step(qhat: np.ndarray, wk_full: np.ndarray, coupling: float,
               m: int, dt: float) -> np.ndarray:
    e1, p1, p2 = _etd_tables(m, dt)
    n0 = _transport_hat(qhat, wk_full, coupling, m, dt)
    stage = e1 * qhat + p1 * n0
    n1 = _transport_hat(stage, wk_full, coupling, m, dt)
    out = stage + p2 * (n1 - n0)
    out[0] = qhat[0]  # mass is exact: the k = 0 mode never moves
    return out


def _check_state(values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)) or np.abs(values).max() > 1e6:
        raise BlowUp("flow state is non-finite or exceeds 1e6")


def mv_step(q: Density, w, coupling: float, dt: float) -> Density:
    """One ETD2RK step of the flow; mass exactly conserved."""
    m = q.grid_size
    wk_full = np.concatenate(([0.0], w.coeff_array(m // 2)))
    out = _etd2_step(q.fourier, wk_full, coupling, m, dt)
    g = fourier_to_grid(out, m)
    _check_state(g)
    return dens.from_fourier(out, m)


def stationarity_residual(q: Density, w, coupling: float) -> float:
    """L^2 norm of the flow right-hand side, evaluated pseudospectrally."""
    m = q.grid_size
    k = np.arange(m // 2 + 1)
    wk_full = np.concatenate(([0.0], w.coeff_array(m // 2)))
    diff = -2.0 * np.pi**2 * k**2 * q.fourier
    transport = _transport_hat(q.fourier, wk_full, coupling, m, math.inf)
    rhs = diff + transport
    weights = np.full(m // 2 + 1, 2.0)
    weights[0] = 1.0
    weights[-1] = 1.0
    return float(np.sqrt(np.sum(weights * np.abs(rhs) ** 2)))


# ---------------------------------------------------------------------------
# time loop


@dataclass(frozen=True)
class RecordPolicy:
    """When to record observables along the flow.

    kind "uniform" records n_records evenly spaced times; "geometric"
    records t0 * factor^j (plus t = 0 and t = T), which suits log-scale
    rate fits.  Every ``snapshot_every``-th record keeps the full density.
    """

    kind: str = "uniform"
    n_records: int = 200
    t0: float = 1e-2
    factor: float = 1.15
    snapshot_every: int = 25

    def times(self, horizon: float) -> np.ndarray:
        if self.kind == "uniform":
            return np.linspace(0.0, horizon, self.n_records + 1)
        if self.kind == "geometric":
            ts = [0.0]
            t = self.t0
            while t < horizon:
                ts.append(t)
                t *= self.factor
            ts.append(horizon)
            return np.asarray(ts)
        raise ValueError(f"unknown record policy {self.kind!r}")


@dataclass
class FlowTrace:
    """Observables along one flow run."""

    times: np.ndarray
    l2: np.ndarray
    w2: np.ndarray
    mode_abs: dict[int, np.ndarray]
    free_energy: np.ndarray
    mass_defect: np.ndarray
    snapshots: list[Density] = field(default_factory=list)
    snapshot_times: list[float] = field(default_factory=list)
    terminated_early: bool = False
    final_residual: float = math.nan
    meta: dict = field(default_factory=dict)


def integrate(
    q0: Density,
    w,
    coupling: float,
    horizon: float,
    dt: float = 1e-4,
    record: RecordPolicy | None = None,
    track_modes: Optional[list[int]] = None,
    stop_residual: float = 1e-12,
) -> FlowTrace:
    """Run the flow to the horizon, recording distances to the uniform
    state, tracked Fourier amplitudes, free energy, and the mass defect.

    Terminates early (flagged) once the stationarity residual drops below
    ``stop_residual``.
    """
    if horizon <= 0.0:
        raise ValueError("horizon must be positive")
    m = q0.grid_size
    if record is None:
        record = RecordPolicy()
    if track_modes is None:
        lead = w.periodicity + 1
        track_modes = [lead * j for j in (1, 2, 3, 4)]
    wk_full = np.concatenate(([0.0], w.coeff_array(m // 2)))
    qu = dens.uniform(m)

    times = record.times(horizon)
    n_steps_total = int(round(horizon / dt))
    record_steps = set(
        np.unique(np.clip(np.round(times / dt), 0, n_steps_total).astype(int))
        .tolist()
    )

    qhat = q0.fourier.copy()
    out = {k: [] for k in ("t", "l2", "w2", "f", "mass")}
    mode_out: dict[int, list[float]] = {k: [] for k in track_modes}
    snapshots: list[Density] = []
    snapshot_times: list[float] = []
    terminated = False
    residual = math.nan

    step = 0
    n_recorded = 0
    last_q, last_t = None, 0.0
    for step in range(n_steps_total + 1):
        if step in record_steps:
            q = dens.from_fourier(qhat, m)
            t = step * dt
            out["t"].append(t)
            out["l2"].append(distance(q, qu, "L2"))
            out["w2"].append(distance(q, qu, "W2_circle"))
            out["f"].append(free_energy(q, w, coupling))
            out["mass"].append(abs(float(qhat[0].real) - 1.0))
            for k in track_modes:
                mode_out[k].append(q.order_parameter(k))
            if n_recorded % record.snapshot_every == 0:
                snapshots.append(q)
                snapshot_times.append(t)
            last_q, last_t = q, t
            n_recorded += 1
            residual = stationarity_residual(q, w, coupling)
            if residual < stop_residual:
                terminated = True
                break
        if step < n_steps_total:
            qhat = _etd2_step(qhat, wk_full, coupling, m, dt)
            if step % 200 == 0:
                _check_state(fourier_to_grid(qhat, m))
    if last_q is not None and (not snapshot_times
                               or snapshot_times[-1] != last_t):
        snapshots.append(last_q)
        snapshot_times.append(last_t)

    return FlowTrace(
        times=np.asarray(out["t"]),
        l2=np.asarray(out["l2"]),
        w2=np.asarray(out["w2"]),
        mode_abs={k: np.asarray(v) for k, v in mode_out.items()},
        free_energy=np.asarray(out["f"]),
        mass_defect=np.asarray(out["mass"]),
        snapshots=snapshots,
        snapshot_times=snapshot_times,
        terminated_early=terminated,
        final_residual=residual,
        meta={
            "model": w.name,
            "params": w.params,
            "coupling": coupling,
            "grid_size": m,
            "dt": dt,
            "horizon": horizon,
        },
    )


# ---------------------------------------------------------------------------
# rate fitting


@dataclass(frozen=True)
class RateFit:
    """Least-squares decay fit on a log scale."""

    window: tuple[float, float]
    model: str  # exponential | algebraic
    rate: float  # decay rate (exponential) or exponent (algebraic)
    goodness: float  # R^2 of the regression
    n_points: int


def _r_squared(x: np.ndarray, y: np.ndarray) -> float:
    if len(x) < 3:
        return 0.0
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0.0:
        return 1.0
    return 1.0 - float(np.sum(resid**2)) / sst


def fit_rate(
    trace: FlowTrace,
    observable: str = "w2",
    model: str = "exponential",
    window: Optional[tuple[float, float]] = None,
    floor: float = 1e-13,
    local_r2: float = 0.999,
) -> RateFit:
    """Fit a decay law to a trace observable.

    exponential: log(obs) against t, rate = -slope; algebraic: log(obs)
    against log(t), rate = slope (the exponent).  Without an explicit
    window the longest tail span whose rolling local fits stay above
    ``local_r2`` is used; early transients drop out automatically.
    """
    t = trace.times
    if observable in ("w2", "l2"):
        y = getattr(trace, observable)
    elif observable.startswith("mode"):
        y = trace.mode_abs[int(observable[4:])]
    else:
        raise ValueError(f"unknown observable {observable!r}")
    keep = (y > floor) & (t > 0.0)
    t, y = t[keep], y[keep]
    if window is not None:
        inside = (t >= window[0]) & (t <= window[1])
        t, y = t[inside], y[inside]
    if len(t) < 20:
        raise DegenerateWindow(f"only {len(t)} usable points")
    x = t if model == "exponential" else np.log(t)
    if model not in ("exponential", "algebraic"):
        raise ValueError("model must be 'exponential' or 'algebraic'")
    z = np.log(y)
    if window is None:
        wlen = max(7, len(x) // 10)
        good = np.array([
            _r_squared(x[i:i + wlen], z[i:i + wlen]) > local_r2
            for i in range(len(x) - wlen + 1)
        ])
        if not good.any():
            raise DegenerateWindow("no log-linear span in the trace")
        # latest contiguous run of locally linear windows (skips both the
        # early transient and any late noise floor)
        end = len(good) - 1 - int(np.argmax(good[::-1]))
        begin = end
        while begin > 0 and good[begin - 1]:
            begin -= 1
        sl = slice(begin, end + wlen)
        t, x, z = t[sl], x[sl], z[sl]
        if len(x) < 20:
            raise DegenerateWindow(
                f"log-linear span has only {len(x)} points"
            )
    slope, _ = np.polyfit(x, z, 1)
    r2 = _r_squared(x, z)
    rate = -float(slope) if model == "exponential" else float(slope)
    return RateFit(
        window=(float(t[0]), float(t[-1])),
        model=model,
        rate=rate,
        goodness=r2,
        n_points=len(x),
    )
