"""Critical points of the free energy and the transition scanner.

Critical points solve the self-consistency (Kirkwood--Monroe) equation

    q = exp(2 K (W * q)) / Z,

found here by damped fixed-point iteration from a fixed multistart seed
set.  The scanner locates the critical coupling by bisection on the sign
of the best free-energy gap and classifies the transition as continuous
or discontinuous by probing whether the uniform state is still a global
minimizer at the linear stability threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import density as dens
from .density import Density, free_energy, grid_to_fourier, fourier_to_grid
from .errors import (
    AllSeedsFailed,
    BracketNotStraddling,
    ExpOverflow,
)
from .potentials import Potential, k_sharp

#: Gibbs exponent beyond which the iteration refuses to exponentiate
EXP_LIMIT = 700.0


# ---------------------------------------------------------------------------
# the fixed-point map


def km_map(q: Density, w: Potential, coupling: float) -> Density:
    """One application of the self-consistency map T(q) = e^{2K W*q} / Z."""
    vals = _km_map_values(q.grid_values, w, coupling, q.grid_size)
    return dens.from_grid(vals)


def _km_map_values(values: np.ndarray, w: Potential, coupling: float,
                   m: int) -> np.ndarray:
    qhat = grid_to_fourier(values)
    ck = qhat * np.concatenate(([0.0], w.coeff_array(m // 2)))
    conv = fourier_to_grid(ck, m)
    expo = 2.0 * coupling * conv
    peak = expo.max()
    if peak - expo.min() > EXP_LIMIT:
        raise ExpOverflow(
            f"Gibbs exponent range {peak - expo.min():.1f} exceeds {EXP_LIMIT}"
        )
    gibbs = np.exp(expo - peak)
    return gibbs / gibbs.mean()


@dataclass(frozen=True)
class SolveReport:
    """A converged (or capped) fixed-point solve."""

    density: Density
    residual: float
    free_energy: float
    iterations: int
    damping_used: float
    seed_id: str
    converged: bool
    order_parameter: float
    min_free_energy_seen: float


def solve_fixed_point(
    w: Potential,
    coupling: float,
    q0: Density,
    damping: float = 1.0,
    tol: float = 1e-12,
    max_iter: int = 20000,
    seed_id: str = "",
) -> SolveReport:
    """Damped iteration q <- (1-a) q + a T(q) until sup|q - T(q)| <= tol.

    When the residual stops improving over a 50-iteration window the
    damping is halved, at most six times.  Non-convergence is reported in
    the ``converged`` flag, not raised.
    """
    if not 0.0 < damping <= 1.0:
        raise ValueError("damping must lie in (0, 1]")
    if tol < 1e-13:
        raise ValueError("tol below 1e-13 is not resolvable in double precision")
    m = q0.grid_size
    _, mode = k_sharp(w)
    v = q0.grid_values.copy()
    alpha = damping
    halvings = 0
    best_window = math.inf
    prev_window = math.inf
    f_seen = math.inf
    residual = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        t = _km_map_values(v, w, coupling, m)
        residual = float(np.abs(t - v).max())
        if residual <= tol:
            v = t
            break
        v = v + alpha * (t - v)
        best_window = min(best_window, residual)
        if it % 50 == 0:
            if best_window >= prev_window and halvings < 6:
                alpha *= 0.5
                halvings += 1
            prev_window = best_window
            best_window = math.inf
        if it % 500 == 0:
            f_seen = min(f_seen, free_energy(dens.from_grid(v), w, coupling))
    q = dens.from_grid(v)
    f = free_energy(q, w, coupling)
    return SolveReport(
        density=q,
        residual=residual,
        free_energy=f,
        iterations=it,
        damping_used=alpha,
        seed_id=seed_id,
        converged=residual <= tol,
        order_parameter=q.order_parameter(mode),
        min_free_energy_seen=min(f_seen, f),
    )


# ---------------------------------------------------------------------------
# multistart minimization


def standard_seeds(w: Potential, m: int = 512,
                   extended: bool = False) -> list[tuple[str, Density]]:
    """The fixed seed set spanning small and large amplitude basins.

    Eight standard seeds: the uniform state, three cosine perturbations on
    the kernel's lead mode, three members of the Poisson-kernel family,
    and a sharply concentrated bump.  The extended set adds each
    nonuniform seed rotated by a quarter period to guard against symmetry
    traps.
    """
    n = w.periodicity
    lead = n + 1
    seeds = [("uniform", dens.uniform(m))]
    for a in (0.2, 0.6, 0.95):
        seeds.append((f"cos_a{a}", dens.cosine_profile({lead: a}, m)))
    for c in (0.3, 0.7, 0.95):
        seeds.append((f"extremal_c{c}", dens.extremal(c, n, 0.0, m)))
    seeds.append(("bump_c0.99", dens.extremal(0.99, n, 0.0, m)))
    if extended:
        shift = 1.0 / (4.0 * lead)
        for name, q in list(seeds[1:]):
            seeds.append((name + "_shifted", q.shift(shift)))
    return seeds


def multistart(
    w: Potential,
    coupling: float,
    m: int = 512,
    seeds: str | Sequence[tuple[str, Density]] = "standard",
    tol: float = 1e-12,
    max_iter: int = 20000,
    damping: float = 1.0,
) -> list[SolveReport]:
    """Run the fixed-point solve from every seed; reports in seed order."""
    if seeds == "standard":
        seed_list = standard_seeds(w, m)
    elif seeds == "extended":
        seed_list = standard_seeds(w, m, extended=True)
    else:
        seed_list = list(seeds)
    return [
        solve_fixed_point(w, coupling, q0, damping, tol, max_iter, seed_id=sid)
        for sid, q0 in seed_list
    ]


def find_minimizer(
    w: Potential,
    coupling: float,
    m: int = 512,
    seeds: str | Sequence[tuple[str, Density]] = "extended",
    tol: float = 1e-12,
    max_iter: int = 20000,
    damping: float = 1.0,
) -> tuple[SolveReport, list[SolveReport]]:
    """Best critical point over the multistart seed set.

    Returns the converged report of minimal free energy (ties within
    1e-11 broken toward the smaller order parameter) plus all reports.
    """
    reports = multistart(w, coupling, m, seeds, tol, max_iter, damping)
    converged = [r for r in reports if r.converged]
    if not converged:
        raise AllSeedsFailed(
            f"no seed converged at K={coupling} within {max_iter} iterations"
        )
    fmin = min(r.free_energy for r in converged)
    near = [r for r in converged if r.free_energy <= fmin + 1e-11]
    best = min(near, key=lambda r: r.order_parameter)
    return best, reports


def _best_gap(reports: list[SolveReport]) -> tuple[float, SolveReport]:
    # gap = F(uniform) - min F = -min F; unconverged iterates still give
    # valid upper bounds for min F, so they count toward the gap
    fmin = math.inf
    state = reports[0]
    for r in reports:
        f = min(r.free_energy, r.min_free_energy_seen)
        if f < fmin:
            fmin = f
            state = r
    return -fmin, state


# ---------------------------------------------------------------------------
# the transition scanner


@dataclass(frozen=True)
class ScanRow:
    """Multistart outcome at a single coupling."""

    coupling: float
    best_gap: float
    order_parameter: float
    n_seeds_converged: int
    l1_to_uniform: float


@dataclass(frozen=True)
class PhaseDiagram:
    """Assembled critical-coupling estimate and continuity verdict."""

    model: str
    rows: tuple[ScanRow, ...]
    k_c_estimate: float
    bracket_width: float
    k_sharp: float
    k_star: float
    sharp_mode: int
    continuity: str  # continuous | discontinuous | undetermined
    jump_estimate: float
    op_at_delta: float
    probe_gap: float

    def as_verdict(self) -> dict:
        return {
            "model": self.model,
            "K_c": self.k_c_estimate,
            "bracket_width": self.bracket_width,
            "K_sharp": self.k_sharp,
            "K_star": self.k_star,
            "continuity": self.continuity,
            "jump": self.jump_estimate,
            "op_at_delta": self.op_at_delta,
            "probe_gap": self.probe_gap,
        }


def scan_kc(
    w: Potential,
    bracket: Optional[tuple[float, float]] = None,
    m: int = 512,
    tol_K: float = 5e-3,
    tol_F: float = 1e-10,
    seeds: str = "standard",
    tol: float = 1e-11,
    max_iter: int = 20000,
    jump_thresholds: tuple[float, float] = (0.02, 0.05),
) -> PhaseDiagram:
    """Locate the critical coupling and classify the transition.

    Bisection on the predicate "some seed reaches free energy below
    -tol_F" over the bracket (defaults to [0.95 K_*, 1.1 K_#]); the
    predicate needs no converged solves because iterate energies are
    always upper bounds for the minimum.

    Continuity is decided by the global-minimality probe at K_#: the
    transition is discontinuous precisely when a state strictly below the
    uniform free energy exists there.  The reported jump estimate is the
    zero-offset intercept of |qhat(k_*)|^2 against coupling just above
    K_c (the raw order parameter at K_c + delta is also reported; the
    thresholds classify the jump number itself when the probe is not
    decisive).
    """
    ks, mode = k_sharp(w)
    kstar = k_star(w, w.periodicity)
    if bracket is None:
        bracket = (0.95 * kstar, 1.1 * ks)
    lo, hi = bracket
    if not lo < hi:
        raise BracketNotStraddling(f"empty bracket {bracket}")

    rows: dict[float, ScanRow] = {}

    def evaluate(coupling: float) -> ScanRow:
        if coupling not in rows:
            reports = multistart(w, coupling, m, seeds, tol, max_iter)
            gap, state = _best_gap(reports)
            rows[coupling] = ScanRow(
                coupling=coupling,
                best_gap=gap,
                order_parameter=state.order_parameter,
                n_seeds_converged=sum(r.converged for r in reports),
                l1_to_uniform=float(
                    np.abs(state.density.grid_values - 1.0).mean()
                ),
            )
        return rows[coupling]

    if evaluate(lo).best_gap > tol_F:
        raise BracketNotStraddling(
            f"lower endpoint K={lo:.6g} is already supercritical; lower it"
        )
    if evaluate(hi).best_gap <= tol_F:
        raise BracketNotStraddling(
            f"no supercritical behavior at K={hi:.6g}; raise the upper endpoint"
        )

    # global-minimality probe at the stability threshold (the iterate
    # energies can only dip below -tol when the uniform state has lost
    # global minimality, so capped runs cannot give a false positive)
    probe_gap = evaluate(ks).best_gap
    if probe_gap > max(tol_F, 1e-9):
        continuity = "discontinuous"
    else:
        continuity = "continuous"

    while hi - lo > tol_K:
        mid = 0.5 * (lo + hi)
        if evaluate(mid).best_gap > tol_F:
            hi = mid
        else:
            lo = mid
    k_c = 0.5 * (lo + hi)

    delta = max(tol_K, 1e-3 * k_c)
    probes = [k_c + delta, k_c + 2 * delta, k_c + 4 * delta]
    ops = np.array([evaluate(p).order_parameter for p in probes])
    slope, intercept = np.polyfit(np.asarray(probes) - k_c, ops**2, 1)
    jump = float(np.sqrt(max(intercept, 0.0)))
    op_at_delta = float(ops[0])

    if continuity == "undetermined":
        lo_thr, hi_thr = jump_thresholds
        if jump < lo_thr:
            continuity = "continuous"
        elif jump > hi_thr:
            continuity = "discontinuous"

    return PhaseDiagram(
        model=w.name,
        rows=tuple(sorted(rows.values(), key=lambda r: r.coupling)),
        k_c_estimate=k_c,
        bracket_width=hi - lo,
        k_sharp=ks,
        k_star=kstar,
        sharp_mode=mode,
        continuity=continuity,
        jump_estimate=jump,
        op_at_delta=op_at_delta,
        probe_gap=probe_gap,
    )


# ---------------------------------------------------------------------------
# closed-form stability quantities


def landau_p(w2: float, c: float) -> float:
    """Quartic coefficient p(c) = (1-w2) c^2/4 - c/8 + 1/32.

    Here w2 is the second normalized coefficient 2 what(2) of a kernel
    with 2 what(1) = 1; p(c) < 0 for some c makes the uniform state lose
    global minimality at the stability threshold.
    """
    return 0.25 * (1.0 - w2) * c * c - c / 8.0 + 1.0 / 32.0


class LandauMin(NamedTuple):
    c_star: float
    p_star: float


def landau_min(w2: float) -> LandauMin:
    """Minimizer of the quartic coefficient and its value.

    c* = 1/(4(1-w2)), p* = (1-2 w2)/(64 (1-w2)); the sign of p* changes
    at w2 = 1/2.  For w2 >= 1 the quartic is unbounded below (any large c
    gives p < 0) and (inf, -inf) is returned.
    """
    if w2 >= 1.0:
        return LandauMin(math.inf, -math.inf)
    return LandauMin(
        1.0 / (4.0 * (1.0 - w2)),
        (1.0 - 2.0 * w2) / (64.0 * (1.0 - w2)),
    )


class SpectralGap(NamedTuple):
    rate: float
    mode: int
    supercritical: bool


def lambda_star(w: Potential, coupling: float,
                modes: str = "active") -> SpectralGap:
    """Relaxation rate of the linearization at the uniform state.

    min_k 2 pi^2 k^2 (1 - 2 K what(k)) in the time units of the flow on
    the unit-circumference circle (the usual (k^2/2)(1 - 2 K what(k))
    pattern of the radian parametrization carries the extra (2 pi)^2
    here).  The mode set "active" restricts to the kernel's period
    lattice, which is what a flow started on the lattice relaxes with;
    "all" ranges over every k >= 1.  Beyond the truncation the rate only
    grows, so the finite minimum is certified.  A nonpositive value is
    flagged supercritical.
    """
    if modes == "active":
        ks = np.arange(w.lead_mode, w.truncation + 1, w.lead_mode)
    elif modes == "all":
        ks = np.arange(1, w.truncation + 1)
    else:
        raise ValueError("modes must be 'active' or 'all'")
    rates = (2.0 * np.pi**2 * ks.astype(float) ** 2
             * (1.0 - 2.0 * coupling * w.coeff(ks)))
    i = int(np.argmin(rates))
    return SpectralGap(float(rates[i]), int(ks[i]), bool(rates[i] <= 0.0))


def k_star(w: Potential, n: int) -> float:
    """Largest coupling with all coercivity coefficients nonnegative:

        K_* = min over attractive k of (n+1) / (k * 2 what(k)).

    Always a rigorous lower bound for the critical coupling; equals K_#
    exactly when the decay condition holds.
    """
    k = np.arange(1, w.truncation + 1)
    pos = w.coeffs > 0.0
    if not pos.any():
        return math.inf
    with np.errstate(over="ignore"):  # denormal coefficients give inf, harmless
        vals = (n + 1) / (k[pos] * 2.0 * w.coeffs[pos])
    return float(vals.min())
