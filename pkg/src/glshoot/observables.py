"""Energy profiles, total energy, phase portraits and the rescaling map.

All quantities are built from the half-line trajectory of a converged
eigen-solution; the x < 0 half follows from the Z2 symmetry of the initial
data (fields even, derivatives odd).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .integrator import Trajectory, dense_resample
from .model import ModelParams, potential

__all__ = [
    "EnergyProfile",
    "PhaseSeries",
    "RescaledResult",
    "energy_profile",
    "total_energy",
    "phase_series",
    "rescale_result",
    "inverse_rescale",
]

# |density| below this threshold counts as the vanished tail when truncating
# the quadrature domain.
TAIL_DENSITY_CUTOFF = 1e-12
QUADRATURE_POINTS = 4097  # 4096 Simpson intervals


@dataclass(frozen=True)
class EnergyProfile:
    """Even energy-density profile on a symmetric grid."""

    grid: np.ndarray
    density: np.ndarray


@dataclass(frozen=True)
class PhaseSeries:
    """(value, derivative) pairs for each field over the mirrored solution.

    Rows run from x = -x_end to x = +x_end; the x < 0 branch carries the
    sign-flipped derivative.  Row ``mid_index`` is the x = 0 point verbatim.
    """

    phi_series: np.ndarray  # shape (m, 2)
    chi_series: np.ndarray
    mid_index: int


def _require_regular(t: Trajectory, what: str) -> None:
    if t.termination.kind == "field_escaped":
        raise ValueError(
            f"{what} needs a trajectory that did not escape; this one ended "
            f"with {t.termination.field} escaping"
        )


def _density(p: ModelParams, t: Trajectory) -> np.ndarray:
    kin = 0.5 * p.eps1 * t.z ** 2 + 0.5 * p.eps2 * t.v ** 2
    return kin + potential(p, t.phi, t.chi)


def energy_profile(p: ModelParams, t: Trajectory, n: int = 2001) -> EnergyProfile:
    """Energy density on a uniform grid, mirrored to [-x_end, x_end]."""
    _require_regular(t, "energy_profile")
    dense = dense_resample(t, n)
    eps = _density(p, dense)
    grid = np.concatenate([-dense.x[:0:-1], dense.x])
    density = np.concatenate([eps[:0:-1], eps])
    return EnergyProfile(grid, density)


def _simpson(y: np.ndarray, dx: float) -> float:
    # composite Simpson rule; len(y) must be odd
    if len(y) % 2 == 0:
        raise ValueError("Simpson rule needs an odd number of points")
    return float(dx / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-2:2].sum()))


def total_energy(p: ModelParams, t: Trajectory, n: int = QUADRATURE_POINTS) -> float:
    """Total energy M = 2 * integral of the density over [0, x_cut].

    x_cut is the largest grid point where |density| still exceeds the tail
    cutoff; the doubling uses the Z2 symmetry.  Composite Simpson on a
    uniform dense resample keeps the value independent of the adaptive
    stepper's path.
    """
    _require_regular(t, "total_energy")
    if n < 3:
        raise ValueError("need at least 3 quadrature points")
    if n % 2 == 0:
        n += 1
    dense = dense_resample(t, n)
    eps = _density(p, dense)
    above = np.nonzero(np.abs(eps) > TAIL_DENSITY_CUTOFF)[0]
    if len(above) == 0:
        return 0.0
    x_cut = float(dense.x[above[-1]])
    if x_cut <= float(t.x[0]):
        return 0.0
    # resample once more on [x0, x_cut] so the Simpson grid ends exactly there
    cut_traj = _cut(t, x_cut)
    dense_cut = dense_resample(cut_traj, n)
    eps_cut = _density(p, dense_cut)
    dx = (dense_cut.x[-1] - dense_cut.x[0]) / (n - 1)
    return 2.0 * _simpson(eps_cut, float(dx))


def _cut(t: Trajectory, x_cut: float) -> Trajectory:
    """Trajectory restricted to [x0, x_cut], with an interpolated end sample."""
    if x_cut >= float(t.x[-1]):
        return t
    n_keep = int(np.searchsorted(t.x, x_cut, side="right"))
    n_keep = max(n_keep, 1)
    # append the interpolated state at x_cut via a fine resample of the last
    # bracketing interval
    from .integrator import _hermite_eval
    from .model import potential_gradient

    i = min(n_keep - 1, len(t) - 2)
    p = t.params
    gp, gc = potential_gradient(p, t.phi, t.chi)
    fz = p.eps1 * gp
    fv = p.eps2 * gc
    vals = []
    for y, f in ((t.phi, t.z), (t.chi, t.v), (t.z, fz), (t.v, fv)):
        vals.append(
            _hermite_eval(x_cut, t.x[i], t.x[i + 1], y[i], y[i + 1], f[i], f[i + 1])
        )
    return Trajectory(
        np.append(t.x[:n_keep], x_cut),
        np.append(t.phi[:n_keep], vals[0]),
        np.append(t.chi[:n_keep], vals[1]),
        np.append(t.z[:n_keep], vals[2]),
        np.append(t.v[:n_keep], vals[3]),
        t.termination,
        p,
    )


def phase_series(t: Trajectory, n: int = 1001) -> PhaseSeries:
    """(field, derivative) series over the mirrored solution.

    For a converged eigen-solution the phi series runs from the asymptote
    through (phi0, 0) at x = 0 and back; likewise for chi through (chi0, 0).
    """
    if len(t) >= 2:
        dense = dense_resample(t, n)
    else:
        dense = t
    def mirrored(y: np.ndarray, dy: np.ndarray) -> np.ndarray:
        vals = np.concatenate([y[:0:-1], y])
        ders = np.concatenate([-dy[:0:-1], dy])
        return np.column_stack([vals, ders])

    m = len(dense) - 1
    return PhaseSeries(
        phi_series=mirrored(dense.phi, dense.z),
        chi_series=mirrored(dense.chi, dense.v),
        mid_index=m,
    )


@dataclass(frozen=True)
class RescaledResult:
    """Eigen-data mapped to the formulation normalized by the phi vacuum."""

    phi0_bar: float
    chi0_bar: float
    mu: float
    M_bar: float
    x_scale: float  # x_bar = x_scale * x


def rescale_result(r, phi0: float, chi0: float) -> RescaledResult:
    """Apply the exact rescaling relations to a converged result."""
    return RescaledResult(
        phi0_bar=phi0 / r.mu1,
        chi0_bar=chi0 / r.mu1,
        mu=r.mu2 / r.mu1,
        M_bar=r.total_energy / r.mu1 ** 3,
        x_scale=r.mu1,
    )


def inverse_rescale(phi0_bar: float, chi0_bar: float, mu: float, M_bar: float):
    """Invert the rescaling under the phi0 = 1 convention.

    Returns (phi0, chi0, mu1, mu2, M).
    """
    mu1 = 1.0 / phi0_bar
    return (
        phi0_bar * mu1,
        chi0_bar * mu1,
        mu1,
        mu * mu1,
        M_bar * mu1 ** 3,
    )
