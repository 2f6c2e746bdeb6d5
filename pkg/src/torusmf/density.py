"""Densities on the unit circle and their spectral functionals.

The circle is [-1/2, 1/2) with periodic boundary; grid nodes are
theta_j = -1/2 + j/M for a power-of-two M.  A density carries both its
grid values and the Fourier coefficients

    qhat(k) = int q(theta) exp(-2 pi i k theta) dtheta,   |k| <= M/2,

kept exactly consistent (qhat is the rescaled real FFT of the grid values,
so the pair represents one trigonometric polynomial).  All functionals
below are spectrally accurate for smooth densities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    NegativeDensity,
    NonPositiveMass,
    NotFinite,
    PositivityLoss,
    TruncationTooCoarse,
)

#: unit-mass tolerance used by constructors
MASS_TOL = 1e-8
#: clipped negative mass above which construction refuses to proceed
CLIP_TOL = 1e-6


@lru_cache(maxsize=32)
def _phase(m: int) -> np.ndarray:
    # grid starts at -1/2, which multiplies rfft bin k by (-1)^k
    p = np.ones(m // 2 + 1)
    p[1::2] = -1.0
    return p


@lru_cache(maxsize=32)
def theta_grid(m: int) -> np.ndarray:
    """Grid nodes theta_j = -1/2 + j/M."""
    g = -0.5 + np.arange(m) / m
    g.flags.writeable = False
    return g


# Positive-mode sums run over k = 1..M/2 with unit weight: this matches the
# circulant form of the grid quadrature exactly (the sampled Nyquist cosine
# carries both +-M/2 contributions), so Parseval identities hold to rounding
# for any grid data.


def grid_to_fourier(values: np.ndarray) -> np.ndarray:
    m = values.shape[-1]
    return np.fft.rfft(values) * (_phase(m) / m)


def fourier_to_grid(fourier: np.ndarray, m: int) -> np.ndarray:
    return np.fft.irfft(fourier * (_phase(m) * m), n=m)


@dataclass(frozen=True, eq=False)
class Density:
    """Probability density on the circle in dual grid/Fourier form.

    Attributes
    ----------
    grid_values : ndarray, shape (M,)
        Nonnegative values at theta_j = -1/2 + j/M with mean exactly 1.
    fourier : ndarray, shape (M/2 + 1,), complex
        Coefficients qhat(k) for k = 0..M/2; qhat(0) == 1.  Negative modes
        follow from Hermitian symmetry (the density is real).
    grid_size : int
        M, a power of two.
    renormalized : bool
        Input mass deviated from 1 by more than the constructor tolerance
        and was rescaled.
    clipped_mass : float
        Total negative mass removed when building from a spectral state.
    """

    grid_values: np.ndarray
    fourier: np.ndarray
    grid_size: int
    renormalized: bool = False
    clipped_mass: float = 0.0

    def __post_init__(self):
        self.grid_values.flags.writeable = False
        self.fourier.flags.writeable = False

    @property
    def theta(self) -> np.ndarray:
        return theta_grid(self.grid_size)

    def coeff(self, k) -> complex | np.ndarray:
        """qhat(k) for any |k| <= M/2 (negative k via conjugation)."""
        k = np.asarray(k)
        out = self.fourier[np.abs(k)]
        return np.where(k < 0, np.conj(out), out)[()]

    def order_parameter(self, k: int) -> float:
        """|qhat(k)|, the amplitude of mode k."""
        return float(np.abs(self.fourier[abs(k)]))

    def shift(self, theta0: float) -> "Density":
        """Rotate the density by theta0 (spectral, exact for the polynomial)."""
        m = self.grid_size
        k = np.arange(m // 2 + 1)
        rotated = self.fourier * np.exp(-2j * np.pi * k * theta0)
        return from_fourier(rotated, m)

    def roll(self, cells: int) -> "Density":
        """Rotate by a whole number of grid cells (exact permutation)."""
        return from_grid(np.roll(self.grid_values, cells))


def _validate_values(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise ValueError("expected a 1-D array of grid values")
    m = values.shape[0]
    if m < 4 or (m & (m - 1)) != 0:
        raise ValueError(f"grid size must be a power of two >= 4, got {m}")
    if not np.all(np.isfinite(values)):
        raise NotFinite("density values contain NaN or inf")
    return values


def from_grid(values: np.ndarray) -> "Density":
    """Build a density from grid samples.

    Values must be nonnegative up to -1e-12 (tiny spectral undershoots are
    clipped).  The mean is renormalized to exactly 1; deviations beyond
    1e-8 set the ``renormalized`` flag.
    """
    values = _validate_values(values).copy()
    if np.any(values < -1e-12):
        raise NegativeDensity(
            f"negative density value {values.min():.3e} below -1e-12"
        )
    np.clip(values, 0.0, None, out=values)
    total = values.mean()
    if total <= 0.0:
        raise NonPositiveMass("density has non-positive total mass")
    renorm = abs(total - 1.0) > MASS_TOL
    values /= total
    fourier = grid_to_fourier(values)
    # pin the exactly-known mass; rounding in the FFT stays in k >= 1
    fourier[0] = 1.0
    return Density(values, fourier, values.shape[0], renormalized=renorm)


def from_fourier(fourier: np.ndarray, m: int) -> "Density":
    """Build a density from its half-spectrum qhat(0..M/2).

    Grid values are clipped at zero; if the clipped negative mass exceeds
    CLIP_TOL the spectral state is declared under-resolved.  When no
    clipping occurs the given spectrum is kept verbatim.
    """
    fourier = np.asarray(fourier, dtype=complex)
    if fourier.shape != (m // 2 + 1,):
        raise ValueError("half-spectrum length must be M/2 + 1")
    if not np.all(np.isfinite(fourier)):
        raise NotFinite("Fourier coefficients contain NaN or inf")
    values = fourier_to_grid(fourier, m)
    neg = values < 0.0
    if not neg.any():
        total = float(fourier[0].real)
        if total <= 0.0:
            raise NonPositiveMass("density has non-positive total mass")
        if abs(total - 1.0) <= 1e-15:
            f = fourier.copy()
            f[0] = 1.0
            return Density(values / total, f, m)
        return from_grid(values)
    clipped = -float(values[neg].sum()) / m
    if clipped > CLIP_TOL:
        raise PositivityLoss(
            f"clipped negative mass {clipped:.3e} exceeds {CLIP_TOL:.0e}; "
            "increase the grid resolution"
        )
    values = np.clip(values, 0.0, None)
    d = from_grid(values)
    return Density(d.grid_values, d.fourier, m,
                   renormalized=d.renormalized, clipped_mass=clipped)


def uniform(m: int = 512) -> "Density":
    """The uniform state q == 1."""
    return from_grid(np.ones(m))


def extremal(c: float, n: int, theta0: float = 0.0, m: int = 512) -> "Density":
    """Poisson-kernel family with period 1/(n+1):

        q(theta) = (1 - c^2) / (1 + c^2 - 2 c cos(2 pi (n+1)(theta - theta0)))

    Its coefficients are qhat((n+1) l) = c^l exp(-2 pi i (n+1) l theta0),
    zero off the lattice.  c in [0, 1).
    """
    if not 0.0 <= c < 1.0:
        raise ValueError(f"c must lie in [0, 1), got {c}")
    if n < 0:
        raise ValueError("n must be >= 0")
    th = theta_grid(m)
    vals = (1.0 - c * c) / (
        1.0 + c * c - 2.0 * c * np.cos(2.0 * np.pi * (n + 1) * (th - theta0))
    )
    return from_grid(vals)


def cosine_profile(amps: dict[int, float], m: int = 512) -> "Density":
    """1 + sum_k a_k cos(2 pi k theta) as a density (must stay nonnegative)."""
    th = theta_grid(m)
    vals = np.ones(m)
    for k, a in amps.items():
        vals += a * np.cos(2.0 * np.pi * k * th)
    return from_grid(vals)


# ---------------------------------------------------------------------------
# functionals


def relative_entropy(q: Density) -> float:
    """Entropy of q relative to the uniform state, int q log q.

    Rectangle quadrature on the grid (spectrally accurate for smooth q).
    Evaluated as mean((1+u) log1p(u)) with u = q - 1, which keeps full
    precision for near-uniform states; zero cells contribute 0.
    """
    v = q.grid_values
    if np.any(v < -1e-12):
        raise NegativeDensity("density has values below -1e-12")
    u = v - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = v * np.log1p(u)
    terms[v == 0.0] = 0.0
    h = float(terms.mean())
    return h


def dual_dirichlet_sum(q: Density, n: int) -> float:
    """(n+1) * sum_{k>=1} |qhat(k)|^2 / k.

    Equals pi (n+1) ||q - 1||^2 in the H^{-1/2} seminorm with the
    convention ||f||^2 = sum_{k != 0} |2 pi k|^{-1} |fhat(k)|^2.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    m = q.grid_size
    k = np.arange(1, m // 2 + 1)
    amp2 = np.abs(q.fourier[1:]) ** 2
    return float((n + 1) * np.sum(amp2 / k))


def interaction_energy(q: Density, w, tol: float | None = 1e-2) -> float:
    """Interaction energy of q with itself through kernel w.

    Parseval form 2 sum_{k>=1} what(k) |qhat(k)|^2 over the modes the grid
    resolves.  ``tol`` bounds the kernel tail dropped beyond those modes
    (conservatively assuming |qhat| <= 1); pass None to skip the check.
    """
    m = q.grid_size
    kmax = m // 2
    if tol is not None:
        dropped = w.tail_bound(min(kmax, w.truncation))
        if dropped > tol:
            raise TruncationTooCoarse(
                f"kernel tail {dropped:.3e} beyond mode "
                f"{min(kmax, w.truncation)} exceeds tol={tol:.1e}"
            )
    wk = w.coeff_array(kmax)
    amp2 = np.abs(q.fourier[1:]) ** 2
    return float(2.0 * np.sum(wk * amp2))


def free_energy(q: Density, w, coupling: float) -> float:
    """relative_entropy(q) - coupling * interaction_energy(q, w).

    Zero at the uniform state for every zero-mean kernel.
    """
    return relative_entropy(q) - coupling * interaction_energy(q, w, tol=None)


def convolve(w, q: Density) -> np.ndarray:
    """Grid profile of (w * q)(theta_j); coefficients what(k) qhat(k)."""
    m = q.grid_size
    ck = q.fourier * np.concatenate(([0.0], w.coeff_array(m // 2)))
    return fourier_to_grid(ck, m)


# ---------------------------------------------------------------------------
# serialization helpers (JSON-friendly dicts; file I/O lives in io.py)


def to_dict(q: Density) -> dict:
    return {"grid_size": q.grid_size, "grid_values": q.grid_values.tolist()}


def from_dict(rec: dict) -> Density:
    vals = np.asarray(rec["grid_values"], dtype=float)
    if len(vals) != rec["grid_size"]:
        raise ValueError("grid_size does not match grid_values length")
    return from_grid(vals)
