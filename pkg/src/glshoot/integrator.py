"""Adaptive integration of the 4D autonomous system with event termination.

The stepping itself lives in a kernel selected at import time: the compiled
Cython module ``glshoot._stepper`` when it was built, otherwise the
pure-Python twin ``glshoot._stepper_py``.  Both implement the same
Dormand-Prince 5(4) pair with cubic Hermite dense output; see
``benchmarks/bench_kernels.py`` for a speed comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import FieldState, ModelParams, potential_gradient

try:
    from . import _stepper as _kernel_mod

    KERNEL = "compiled"
except ImportError:  # extension not built; fall back
    from . import _stepper_py as _kernel_mod

    KERNEL = "pure"

from ._stepper_py import (
    FIELD_CHI,
    FIELD_NONE,
    FIELD_PHI,
    TERM_ESCAPED,
    TERM_SAMPLE_CAP,
    TERM_UNDERFLOW,
    TERM_X_MAX,
)

__all__ = [
    "IntegratorConfig",
    "Termination",
    "Trajectory",
    "integrate",
    "dense_resample",
    "active_kernel",
]

_TERM_NAMES = {
    TERM_X_MAX: "reached_x_max",
    TERM_ESCAPED: "field_escaped",
    TERM_UNDERFLOW: "step_underflow",
    TERM_SAMPLE_CAP: "sample_cap",
}
_FIELD_NAMES = {FIELD_NONE: None, FIELD_PHI: "phi", FIELD_CHI: "chi"}


def active_kernel() -> str:
    """Which stepping kernel was selected at import: 'compiled' or 'pure'."""
    return KERNEL


@dataclass(frozen=True)
class IntegratorConfig:
    """Step control and termination settings.

    ``escape_radius=None`` means the default 3 * max(mu1, mu2, 1), computed
    per integration from the model parameters.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    initial_step: float = 1e-4
    max_step: float = 0.1
    x_max: float = 40.0
    escape_radius: Optional[float] = None
    max_samples: int = 100_000

    def __post_init__(self) -> None:
        if not (0.0 < self.rel_tol <= 1e-3 and 0.0 < self.abs_tol <= 1e-3):
            raise ValueError("tolerances must lie in (0, 1e-3]")
        if not (0.0 < self.initial_step <= self.max_step):
            raise ValueError("need 0 < initial_step <= max_step")
        if not self.x_max > 0.0:
            raise ValueError("x_max must be positive")
        if self.max_samples < 2:
            raise ValueError("max_samples must be at least 2")

    def radius_for(self, p: ModelParams) -> float:
        if self.escape_radius is not None:
            if not self.escape_radius > max(p.mu1, p.mu2):
                raise ValueError("escape_radius must exceed max(mu1, mu2)")
            return self.escape_radius
        return 3.0 * max(p.mu1, p.mu2, 1.0)


@dataclass(frozen=True)
class Termination:
    """Why an integration stopped; ``field``/``sign`` set for escapes only."""

    kind: str
    field: Optional[str] = None
    sign: Optional[int] = None


@dataclass(frozen=True)
class Trajectory:
    """Ordered samples of one integration; immutable after construction."""

    x: np.ndarray
    phi: np.ndarray
    chi: np.ndarray
    z: np.ndarray
    v: np.ndarray
    termination: Termination
    params: ModelParams

    def __post_init__(self) -> None:
        for arr in (self.x, self.phi, self.chi, self.z, self.v):
            arr.flags.writeable = False

    def __len__(self) -> int:
        return self.x.size

    def state(self, i: int) -> FieldState:
        return FieldState(
            float(self.x[i]),
            float(self.phi[i]),
            float(self.chi[i]),
            float(self.z[i]),
            float(self.v[i]),
        )

    @property
    def samples(self) -> list[FieldState]:
        return [self.state(i) for i in range(len(self))]

    @property
    def initial_state(self) -> FieldState:
        return self.state(0)

    @property
    def final_state(self) -> FieldState:
        return self.state(len(self) - 1)

    def truncated(self, n: int, termination: Termination) -> "Trajectory":
        """First n samples as a new trajectory with the given termination."""
        if n < 2 or n > len(self):
            raise ValueError(f"cannot truncate length {len(self)} to {n}")
        return Trajectory(
            self.x[:n].copy(),
            self.phi[:n].copy(),
            self.chi[:n].copy(),
            self.z[:n].copy(),
            self.v[:n].copy(),
            termination,
            self.params,
        )


def integrate(
    p: ModelParams,
    init: FieldState,
    cfg: IntegratorConfig = IntegratorConfig(),
    _kernel=None,
) -> Trajectory:
    """Integrate forward from ``init`` until the horizon, an escape, step
    underflow or the sample cap, whichever comes first."""
    for name, val in (
        ("x", init.x),
        ("phi", init.phi),
        ("chi", init.chi),
        ("z", init.z),
        ("v", init.v),
    ):
        if not np.isfinite(val):
            raise ValueError(f"non-finite initial {name}: {val!r}")
    kernel = _kernel if _kernel is not None else _kernel_mod
    xs, ps, cs, zs, vs, term, fld, sgn = kernel.integrate_kernel(
        float(p.eps1),
        float(p.eps2),
        p.lambda1,
        p.lambda2,
        p.mu1,
        p.mu2,
        init.x,
        init.phi,
        init.chi,
        init.z,
        init.v,
        cfg.rel_tol,
        cfg.abs_tol,
        cfg.initial_step,
        cfg.max_step,
        init.x + cfg.x_max,
        cfg.radius_for(p),
        cfg.max_samples,
    )
    termination = Termination(
        kind=_TERM_NAMES[term],
        field=_FIELD_NAMES[fld],
        sign=(sgn if sgn != 0 else None),
    )
    return Trajectory(
        np.asarray(xs, dtype=float),
        np.asarray(ps, dtype=float),
        np.asarray(cs, dtype=float),
        np.asarray(zs, dtype=float),
        np.asarray(vs, dtype=float),
        termination,
        p,
    )


def _hermite_eval(xq, x0, x1, y0, y1, f0, f1):
    h = x1 - x0
    t = (xq - x0) / h
    return y0 + t * t * (3.0 - 2.0 * t) * (y1 - y0) + h * t * (1.0 - t) * (
        (1.0 - t) * f0 - t * f1
    )


def dense_resample(t: Trajectory, n: int) -> Trajectory:
    """Resample onto a uniform x-grid of n points using the cubic Hermite
    interpolant (exact values and derivatives at the stored nodes).

    Endpoints are preserved bit for bit.
    """
    if n < 2:
        raise ValueError(f"need at least 2 resample points, got {n}")
    if len(t) < 2:
        raise ValueError("trajectory must have at least 2 samples")
    p = t.params
    gp, gc = potential_gradient(p, t.phi, t.chi)
    fz = p.eps1 * gp
    fv = p.eps2 * gc

    grid = np.linspace(t.x[0], t.x[-1], n)
    idx = np.searchsorted(t.x, grid, side="right") - 1
    np.clip(idx, 0, len(t) - 2, out=idx)

    x0, x1 = t.x[idx], t.x[idx + 1]
    cols = []
    for y, f in ((t.phi, t.z), (t.chi, t.v), (t.z, fz), (t.v, fv)):
        vals = _hermite_eval(grid, x0, x1, y[idx], y[idx + 1], f[idx], f[idx + 1])
        vals[0] = y[0]
        vals[-1] = y[-1]
        cols.append(vals)
    grid[0] = t.x[0]
    grid[-1] = t.x[-1]
    return Trajectory(grid, cols[0], cols[1], cols[2], cols[3], t.termination, p)
