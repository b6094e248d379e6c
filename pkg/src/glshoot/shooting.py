"""Nested-bisection search for the eigenvalue pair of the Z2 problem.

A regular localized solution starts at (phi0, chi0) with zero derivatives and
asymptotes to the fixed point (mu1, 0).  Away from the eigenvalues the fields
blow up through the escape radius with a sign that flips across each
eigenvalue, which makes the pair (mu1, mu2) findable by two nested
bisections: mu1 controls the phi escape class (outer loop) and mu2 the chi
escape class (inner loop, reconverged at every outer probe).  The opposite
nesting is available behind ``ShootSpec.nesting`` for robustness
experiments.

When the field controlled by one loop stays bounded until the *other* field
escapes, the probe is classified by the bounded field's fate under the
diverging coupling: with |phi| beyond the escape radius, phi^2 dominates the
chi acceleration, so chi diverges in the sign it holds at the escape moment
(and symmetrically for phi, which at that moment is either already past its
target value or falling away from it).  Probes that reach the horizon
undecided are retried with a doubled horizon, up to 160.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .integrator import IntegratorConfig, Termination, Trajectory, integrate
from .model import FieldState, ModelParams, potential

__all__ = [
    "ShootSpec",
    "EigenResult",
    "TrajectoryClass",
    "BarredResult",
    "SweepRow",
    "ShootingError",
    "classify_trajectory",
    "bisect_mu2",
    "solve_eigenpair",
    "sweep",
    "solve_barred",
]

X_MAX_CAP = 160.0
DEFAULT_MU2_BRACKET = (0.5, 5.0)
# The final bisections continue this factor beyond mu_tol (floored at
# machine scale) so the stored trajectory's exponential contamination sits
# well below the requested eigenvalue precision.
POLISH_FACTOR = 1e-4
POLISH_FLOOR = 1e-13


class ShootingError(RuntimeError):
    """Raised when a bisection cannot run or convergence is spurious.

    ``reason`` is one of "unbracketed", "undecided_dominated",
    "constraint_violation"; ``level`` names the offending search variable.
    """

    def __init__(self, reason: str, level: str, message: str):
        super().__init__(f"{reason} [{level}]: {message}")
        self.reason = reason
        self.level = level


@dataclass(frozen=True)
class ShootSpec:
    """Inputs of one eigenvalue search."""

    chi0: float
    phi0: float = 1.0
    eps1: int = 1
    eps2: int = 1
    lambda1: float = 0.1
    lambda2: float = 1.0
    mu1_bracket: Optional[tuple[float, float]] = None
    mu2_bracket: tuple[float, float] = DEFAULT_MU2_BRACKET
    mu_tol: float = 1e-8
    constraint_tol: float = 1e-4
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    nesting: str = "mu1_outer"

    def __post_init__(self) -> None:
        if self.mu_tol <= 0.0:
            raise ValueError("mu_tol must be positive")
        for name, br in (("mu1_bracket", self.mu1_bracket), ("mu2_bracket", self.mu2_bracket)):
            if br is None:
                continue
            lo, hi = br
            if not (0.0 < lo < hi):
                raise ValueError(f"{name} must satisfy 0 < lo < hi, got {br}")
        if self.nesting not in ("mu1_outer", "mu2_outer"):
            raise ValueError(f"unknown nesting {self.nesting!r}")

    def resolved_mu1_bracket(self) -> tuple[float, float]:
        if self.mu1_bracket is not None:
            return self.mu1_bracket
        return (max(self.phi0, self.chi0), 5.0)


@dataclass(frozen=True)
class TrajectoryClass:
    """Divergence class of a trajectory, from its first escape event."""

    verdict: str  # phi_escape_up, phi_escape_down, chi_escape_up, chi_escape_down, undecided


@dataclass(frozen=True)
class EigenResult:
    """Converged eigenvalues with the half-line solution and diagnostics."""

    mu1: float
    mu2: float
    trajectory: Trajectory
    total_energy: float
    residuals: tuple[float, float]  # (|phi(x_end) - mu1|, |chi(x_end)|)
    bracket_widths: tuple[float, float]
    constraint_residual: float  # V(phi0, chi0) at the converged parameters


@dataclass(frozen=True)
class SweepRow:
    chi0: float
    result: Optional[EigenResult]
    error: Optional[str] = None


@dataclass(frozen=True)
class BarredResult:
    """Eigen-solution of the rescaled formulation (phi normalized to its
    vacuum value, single mass ratio mu)."""

    phi0_bar: float
    chi0_bar: float
    mu: float
    M_bar: float
    method: str
    source: Optional[EigenResult] = None


def classify_trajectory(t: Trajectory) -> TrajectoryClass:
    """Map the first escape event to a divergence class."""
    term = t.termination
    if term.kind == "field_escaped":
        side = "up" if term.sign > 0 else "down"
        return TrajectoryClass(f"{term.field}_escape_{side}")
    return TrajectoryClass("undecided")


def _chi_class(t: Trajectory) -> Optional[str]:
    """Overshoot/undershoot class of the chi field.

    chi starts positive and must decay monotonically to zero on a regular
    solution, so the first of these events decides: chi touching zero means
    mu2 is too large ("down"), the derivative v turning nonnegative while
    chi is still positive means mu2 is too small ("up").  Sample 0 is
    skipped because v(0) = 0 by the Z2 initial data.  None while neither
    event has fired within the horizon.
    """
    down = np.nonzero(t.chi[1:] <= 0.0)[0]
    up = np.nonzero((t.v[1:] >= 0.0) & (t.chi[1:] > 0.0))[0]
    i_down = down[0] if len(down) else -1
    i_up = up[0] if len(up) else -1
    if i_down < 0 and i_up < 0:
        return None
    if i_down < 0:
        return "up"
    if i_up < 0:
        return "down"
    return "down" if i_down < i_up else "up"


def _phi_class(t: Trajectory, target: float) -> Optional[str]:
    """Overshoot/undershoot class of the phi field against its asymptote.

    phi must climb from phi0 to the target without crossing it: reaching the
    target means it will run away upward ("up", target too small), the
    derivative z turning nonpositive below the target means it falls back
    ("down", target too large).  Sample 0 is skipped because z(0) = 0.
    """
    up = np.nonzero(t.phi[1:] >= target)[0]
    down = np.nonzero((t.z[1:] <= 0.0) & (t.phi[1:] < target))[0]
    i_up = up[0] if len(up) else -1
    i_down = down[0] if len(down) else -1
    if i_down < 0 and i_up < 0:
        return None
    if i_down < 0:
        return "up"
    if i_up < 0:
        return "down"
    return "down" if i_down < i_up else "up"


def _probe(traj_at, outer: float, inner: float, verdict_fn, x_max0: float):
    """Verdict at one parameter point, doubling the horizon while undecided."""
    x_max = x_max0
    while True:
        t = traj_at(outer, inner, x_max)
        verdict = verdict_fn(t)
        if verdict is not None:
            return verdict
        if t.termination.kind != "reached_x_max" or x_max >= X_MAX_CAP:
            return None
        x_max = min(2.0 * x_max, X_MAX_CAP)


def _bisect_level(probe: Callable[[float], Optional[str]], lo: float, hi: float,
                  tol: float, level: str, stop_on_undecided: bool = False):
    """Plain bisection on a two-valued verdict; returns (mid, width, history).

    With ``stop_on_undecided`` an undecided interior probe ends the search at
    the current midpoint: the sign change is localized inside the bracket and
    the probe's silence means the controlled field stayed quiescent for as
    long as the trajectory lived, which is the best the data can resolve.
    Without it an undecided probe is an error.
    """
    v_lo = probe(lo)
    v_hi = probe(hi)
    history = [(lo, v_lo or "undecided"), (hi, v_hi or "undecided")]
    if v_lo is None or v_hi is None:
        raise ShootingError(
            "undecided_dominated", level,
            f"endpoint probe undecided even at horizon {X_MAX_CAP} "
            f"(bracket [{lo}, {hi}])",
        )
    if v_lo == v_hi:
        raise ShootingError(
            "unbracketed", level,
            f"both endpoints of [{lo}, {hi}] classify as {v_lo}",
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        v_mid = probe(mid)
        history.append((mid, v_mid or "undecided"))
        if v_mid is None:
            if stop_on_undecided:
                break
            raise ShootingError(
                "undecided_dominated", level,
                f"probe at {mid} undecided even at horizon {X_MAX_CAP}; "
                f"bracket width {hi - lo:.3e}",
            )
        if v_mid == v_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), hi - lo, history


def _standard_traj_at(spec: ShootSpec):
    init = FieldState(0.0, spec.phi0, spec.chi0, 0.0, 0.0)

    def traj_at(mu1: float, mu2: float, x_max: float) -> Trajectory:
        p = ModelParams(spec.eps1, spec.eps2, spec.lambda1, spec.lambda2, mu1, mu2)
        cfg = replace(spec.integrator, x_max=x_max)
        return integrate(p, init, cfg)

    return traj_at


def bisect_mu2(spec: ShootSpec, mu1: float):
    """Converge mu2 at fixed mu1 by bisection on the chi escape class.

    Returns (mu2, history) where history lists (probe value, verdict) pairs.
    """
    traj_at = _standard_traj_at(spec)

    def probe(mu2: float):
        return _probe(traj_at, mu1, mu2, _chi_class, spec.integrator.x_max)

    lo, hi = spec.mu2_bracket
    mu2, _, history = _bisect_level(probe, lo, hi, spec.mu_tol, "mu2")
    return mu2, history


def _truncate_tail(t: Trajectory, phi_target: float) -> Trajectory:
    """Cut the trajectory at its closest approach to the asymptote.

    The converged solution eventually leaves the fixed point again because
    the eigenvalues are only known to mu_tol.  Each field deviation decays
    until the growing contamination overtakes it; cutting at the earlier of
    the two fields' own minima keeps both residuals at their smallest scale
    and both deviations monotonically decreasing up to the cut.
    """
    i_phi = int(np.argmin(np.abs(t.phi - phi_target)))
    i_chi = int(np.argmin(np.abs(t.chi)))
    i_end = min(i_phi, i_chi)
    n = max(i_end + 1, 2)
    if n >= len(t) and t.termination.kind == "reached_x_max":
        return t
    n = min(n, len(t))
    return t.truncated(n, Termination("reached_x_max"))


def _finalize(spec: ShootSpec, mu1: float, mu2: float,
              widths: tuple[float, float]) -> EigenResult:
    from .observables import total_energy  # local import, no cycle at module load

    p = ModelParams(spec.eps1, spec.eps2, spec.lambda1, spec.lambda2, mu1, mu2)
    constraint = float(potential(p, spec.phi0, spec.chi0))
    if abs(constraint) > spec.constraint_tol:
        raise ShootingError(
            "constraint_violation", "mu1/mu2",
            f"V(phi0, chi0) = {constraint:.3e} exceeds {spec.constraint_tol:.1e}; "
            "convergence is spurious",
        )
    raw = integrate(p, FieldState(0.0, spec.phi0, spec.chi0, 0.0, 0.0), spec.integrator)
    traj = _truncate_tail(raw, mu1)
    residuals = (
        abs(float(traj.phi[-1]) - mu1),
        abs(float(traj.chi[-1])),
    )
    energy = total_energy(p, traj)
    return EigenResult(
        mu1=mu1,
        mu2=mu2,
        trajectory=traj,
        total_energy=energy,
        residuals=residuals,
        bracket_widths=widths,
        constraint_residual=constraint,
    )


def _polish_tol(mu_tol: float) -> float:
    return min(mu_tol, max(mu_tol * POLISH_FACTOR, POLISH_FLOOR))


def solve_eigenpair(spec: ShootSpec) -> EigenResult:
    """Find (mu1, mu2) such that the Z2 trajectory asymptotes to (mu1, 0).

    The bisections run past mu_tol down to the polish tolerance, which costs
    a few extra probes but keeps the exponentially growing contamination of
    the final trajectory far below the requested precision.
    """
    traj_at = _standard_traj_at(spec)
    x0 = spec.integrator.x_max
    tol = _polish_tol(spec.mu_tol)

    if spec.nesting == "mu1_outer":
        def inner_solve(mu1: float) -> tuple[float, float]:
            def probe(mu2: float):
                return _probe(traj_at, mu1, mu2, _chi_class, x0)

            lo, hi = spec.mu2_bracket
            mu2, width, _ = _bisect_level(
                probe, lo, hi, tol, "mu2", stop_on_undecided=True
            )
            return mu2, width

        def outer_probe(mu1: float):
            mu2, _ = inner_solve(mu1)
            return _probe(
                traj_at, mu1, mu2, lambda t: _phi_class(t, mu1), x0
            )

        lo, hi = spec.resolved_mu1_bracket()
        mu1, w1, _ = _bisect_level(outer_probe, lo, hi, tol, "mu1")
        mu2, w2 = inner_solve(mu1)
        return _finalize(spec, mu1, mu2, (w1, w2))

    # mu2_outer: chi class drives the outer loop, phi class the inner one
    def inner_solve(mu2: float) -> tuple[float, float]:
        def probe(mu1: float):
            return _probe(
                traj_at, mu1, mu2, lambda t: _phi_class(t, mu1), x0
            )

        lo, hi = spec.resolved_mu1_bracket()
        mu1, width, _ = _bisect_level(
            probe, lo, hi, tol, "mu1", stop_on_undecided=True
        )
        return mu1, width

    def outer_probe(mu2: float):
        mu1, _ = inner_solve(mu2)
        return _probe(traj_at, mu1, mu2, _chi_class, x0)

    lo, hi = spec.mu2_bracket
    mu2, w2, _ = _bisect_level(outer_probe, lo, hi, tol, "mu2")
    mu1, w1 = inner_solve(mu2)
    return _finalize(spec, mu1, mu2, (w1, w2))


def _warm_brackets(spec: ShootSpec, prev: EigenResult) -> ShootSpec:
    # eigenvalues grow with chi0, so the previous pair is a usable lower edge
    _, hi1 = spec.resolved_mu1_bracket()
    _, hi2 = spec.mu2_bracket
    hi1w = max(min(1.8 * prev.mu1, hi1), 1.01 * prev.mu1)
    hi2w = max(min(1.8 * prev.mu2, hi2), 1.01 * prev.mu2)
    return replace(
        spec,
        mu1_bracket=(prev.mu1, hi1w),
        mu2_bracket=(prev.mu2, hi2w),
    )


def _solve_row(spec: ShootSpec, prev: Optional[EigenResult]) -> EigenResult:
    if prev is not None:
        try:
            return solve_eigenpair(_warm_brackets(spec, prev))
        except ShootingError:
            pass  # fall back to the cold brackets
    return solve_eigenpair(spec)


def sweep(chi0_values, base: ShootSpec, *, warm_start: bool = True,
          workers: int = 1) -> list[SweepRow]:
    """Solve the eigen-problem for each chi0, ordered by increasing chi0.

    With ``warm_start`` each row seeds its brackets from the previous row's
    eigenvalues (falling back to the cold brackets on failure).  Rows that
    fail are recorded and the sweep continues.  ``workers > 1`` evaluates
    rows concurrently and requires ``warm_start=False``.
    """
    values = sorted(float(c) for c in chi0_values)
    if any(c <= 0.0 for c in values):
        raise ValueError("every chi0 must be positive")
    if workers > 1 and warm_start:
        raise ValueError("concurrent sweeps require warm_start=False")

    rows: list[SweepRow] = []
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(solve_eigenpair, replace(base, chi0=c)) for c in values
            ]
            for c, fut in zip(values, futures):
                try:
                    rows.append(SweepRow(c, fut.result()))
                except (ShootingError, ValueError) as exc:
                    rows.append(SweepRow(c, None, str(exc)))
        return rows

    prev: Optional[EigenResult] = None
    for c in values:
        spec_row = replace(base, chi0=c)
        try:
            result = _solve_row(spec_row, prev) if warm_start else solve_eigenpair(spec_row)
            rows.append(SweepRow(c, result))
            prev = result
        except (ShootingError, ValueError) as exc:
            rows.append(SweepRow(c, None, str(exc)))
    return rows


def solve_barred(ratio: float, lambda1: float = 0.1, lambda2: float = 1.0, *,
                 eps1: int = 1, eps2: int = 1, method: str = "rescale",
                 mu_tol: float = 1e-8,
                 integrator: Optional[IntegratorConfig] = None,
                 phi0_bar_bracket: tuple[float, float] = (0.25, 0.999),
                 mu_bracket: tuple[float, float] = (0.05, 2.0)) -> BarredResult:
    """Eigen-solution of the rescaled system for a fixed chi0/phi0 ratio.

    The rescaled system is the standard one with mu1 = 1, so ``method``
    selects between solving the standard problem and rescaling the answer
    ("rescale") and a direct nested shoot in the rescaled variables
    ("direct", the cross-check path with unknowns (phi0_bar, mu)).
    """
    if ratio <= 0.0:
        raise ValueError("chi0/phi0 ratio must be positive")
    cfg = integrator if integrator is not None else IntegratorConfig()

    if method == "rescale":
        from .observables import rescale_result

        spec = ShootSpec(
            chi0=ratio, phi0=1.0, eps1=eps1, eps2=eps2,
            lambda1=lambda1, lambda2=lambda2, mu_tol=mu_tol, integrator=cfg,
        )
        r = solve_eigenpair(spec)
        scaled = rescale_result(r, spec.phi0, spec.chi0)
        return BarredResult(
            phi0_bar=scaled.phi0_bar, chi0_bar=scaled.chi0_bar,
            mu=scaled.mu, M_bar=scaled.M_bar, method=method, source=r,
        )

    if method != "direct":
        raise ValueError(f"unknown method {method!r}")

    def traj_at(phi0_bar: float, mu: float, x_max: float) -> Trajectory:
        p = ModelParams(eps1, eps2, lambda1, lambda2, 1.0, mu)
        init = FieldState(0.0, phi0_bar, ratio * phi0_bar, 0.0, 0.0)
        return integrate(p, init, replace(cfg, x_max=x_max))

    tol = _polish_tol(mu_tol)

    def inner_solve(phi0_bar: float) -> tuple[float, float]:
        def probe(mu: float):
            return _probe(traj_at, phi0_bar, mu, _chi_class, cfg.x_max)

        lo, hi = mu_bracket
        mu, width, _ = _bisect_level(
            probe, lo, hi, tol, "mu", stop_on_undecided=True
        )
        return mu, width

    def outer_probe(phi0_bar: float):
        mu, _ = inner_solve(phi0_bar)
        return _probe(
            traj_at, phi0_bar, mu, lambda t: _phi_class(t, 1.0), cfg.x_max
        )

    lo, hi = phi0_bar_bracket
    phi0_bar, w_outer, _ = _bisect_level(outer_probe, lo, hi, tol, "phi0_bar")
    mu, w_inner = inner_solve(phi0_bar)

    from .observables import total_energy

    p = ModelParams(eps1, eps2, lambda1, lambda2, 1.0, mu)
    constraint = float(potential(p, phi0_bar, ratio * phi0_bar))
    raw = traj_at(phi0_bar, mu, cfg.x_max)
    traj = _truncate_tail(raw, 1.0)
    result = EigenResult(
        mu1=1.0,
        mu2=mu,
        trajectory=traj,
        total_energy=total_energy(p, traj),
        residuals=(abs(float(traj.phi[-1]) - 1.0), abs(float(traj.chi[-1]))),
        bracket_widths=(w_outer, w_inner),
        constraint_residual=constraint,
    )
    return BarredResult(
        phi0_bar=phi0_bar, chi0_bar=ratio * phi0_bar, mu=mu,
        M_bar=result.total_energy, method=method, source=result,
    )
