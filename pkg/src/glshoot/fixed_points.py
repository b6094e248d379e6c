"""Fixed points of the first-order system and their classification.

The autonomous system has up to nine constant solutions: the phi-well pair
A, B at (+-mu1, 0), the chi-well pair C, D at (0, +-mu2), the origin E, and
up to four mixed points F (one per sign pair) that exist only when both
square roots in their location are real and lambda1*lambda2 != 1.

Classification follows the coarse taxonomy of the reference table this
package reproduces: a point whose linearization has four real nonzero
eigenvalues (which for this system always come in +-sqrt(k) pairs) is an
"unstable node", everything else hyperbolic-or-oscillatory is a "saddle".
A purely oscillatory spectrum is in stricter dynamical-systems language a
center; the fine structure is kept in ``FixedPoint.spectrum`` while
``classification`` sticks to the coarse taxonomy so the two notions stay
distinguishable.  Mixed F points with complex eigenvalue quadruples are
reported as "spiral".
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams, potential, rhs, FieldState

__all__ = [
    "FixedPoint",
    "MinimaConditions",
    "fixed_points",
    "fixed_point_absences",
    "minima_conditions",
    "potential_gaps",
    "check_cond_max",
    "jacobian",
    "characteristic_roots",
    "classify",
]

F_LABELS = ("F++", "F+-", "F-+", "F--")

# Eigenvalues below this modulus count as zero for classification purposes;
# well above eigensolver noise at these matrix scales.
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class MinimaConditions:
    """Existence flags for the two kinds of potential minima.

    local_ok:  lambda1 > 0 and mu1^2 > lambda2 mu2^2 (wells at A, B)
    global_ok: lambda2 > 0 and mu2^2 > lambda1 mu1^2 (wells at C, D)
    """

    local_ok: bool
    global_ok: bool


@dataclass(frozen=True)
class FixedPoint:
    label: str
    location: tuple[float, float]
    potential_value: float
    char_roots_paper: tuple[complex, complex, float, float]
    jacobian_eigenvalues: tuple[complex, complex, complex, complex]
    classification: str
    spectrum: str
    note: str = ""


def minima_conditions(p: ModelParams) -> MinimaConditions:
    return MinimaConditions(
        local_ok=p.lambda1 > 0.0 and p.mu1 ** 2 > p.lambda2 * p.mu2 ** 2,
        global_ok=p.lambda2 > 0.0 and p.mu2 ** 2 > p.lambda1 * p.mu1 ** 2,
    )


def _f_radicands(p: ModelParams) -> tuple[float, float, float]:
    den = 1.0 - p.lambda1 * p.lambda2
    if den == 0.0:
        return den, math.nan, math.nan
    r_phi = (p.lambda2 * p.mu2 ** 2 - p.lambda1 * p.lambda2 * p.mu1 ** 2) / den
    r_chi = (p.lambda1 * p.mu1 ** 2 - p.lambda1 * p.lambda2 * p.mu2 ** 2) / den
    return den, r_phi, r_chi


def fixed_point_absences(p: ModelParams) -> dict[str, str]:
    """Reasons why F points are missing from :func:`fixed_points`, if they are."""
    den, r_phi, r_chi = _f_radicands(p)
    if den == 0.0:
        reason = "degenerate denominator"
    elif r_phi < 0.0 or r_chi < 0.0:
        reason = "negative radicand"
    else:
        return {}
    return {label: f"absent: {reason}" for label in F_LABELS}


def jacobian(p: ModelParams, s: FieldState) -> np.ndarray:
    """Exact linearization of the right-hand side, row order (phi, chi, z, v)."""
    a = p.eps1 * (s.chi ** 2 + p.lambda1 * (3.0 * s.phi ** 2 - p.mu1 ** 2))
    b = p.eps1 * 2.0 * s.phi * s.chi
    c = p.eps2 * 2.0 * s.phi * s.chi
    d = p.eps2 * (s.phi ** 2 + p.lambda2 * (3.0 * s.chi ** 2 - p.mu2 ** 2))
    return np.array(
        [
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [a, b, 0.0, 0.0],
            [c, d, 0.0, 0.0],
        ]
    )


def _biquadratic_k(p: ModelParams, phi: float, chi: float) -> tuple[complex, complex]:
    """Squared eigenvalues of the linearization at (phi, chi, 0, 0).

    The characteristic polynomial is biquadratic, xi^4 - (a+d) xi^2 + (ad-bc),
    because the Jacobian couples fields only to velocities.
    """
    a = p.eps1 * (chi ** 2 + p.lambda1 * (3.0 * phi ** 2 - p.mu1 ** 2))
    b = p.eps1 * 2.0 * phi * chi
    c = p.eps2 * 2.0 * phi * chi
    d = p.eps2 * (phi ** 2 + p.lambda2 * (3.0 * chi ** 2 - p.mu2 ** 2))
    half_tr = 0.5 * (a + d)
    disc = complex(half_tr * half_tr - (a * d - b * c))
    root = cmath.sqrt(disc)
    return half_tr + root, half_tr - root


def _spectrum_from_k(k1: complex, k2: complex) -> tuple[tuple[complex, ...], str]:
    """Eigenvalue quadruple +-sqrt(k1), +-sqrt(k2) and its signature string."""
    eigs = []
    for k in (k1, k2):
        r = cmath.sqrt(k)
        eigs.extend([r, -r])
    eigs = tuple(sorted(eigs, key=lambda w: (round(w.real, 14), round(w.imag, 14))))
    if any(abs(w) < DEGENERACY_TOL for w in eigs):
        sig = "degenerate"
    elif all(abs(w.imag) < DEGENERACY_TOL * max(1.0, abs(w)) for w in eigs):
        sig = "real-pairs"
    elif all(abs(w.real) < DEGENERACY_TOL * max(1.0, abs(w)) for w in eigs):
        sig = "imaginary-pairs"
    elif any(abs(w.real) >= DEGENERACY_TOL and abs(w.imag) >= DEGENERACY_TOL for w in eigs):
        sig = "complex-quadruple"
    else:
        sig = "mixed"
    return eigs, sig


def _classification(sig: str) -> str:
    # Coarse taxonomy: real-pairs -> unstable node, complex quadruple ->
    # spiral, any other nondegenerate spectrum (mixed or purely oscillatory)
    # -> saddle.
    if sig == "degenerate":
        return "degenerate"
    if sig == "real-pairs":
        return "unstable node"
    if sig == "complex-quadruple":
        return "spiral"
    return "saddle"


def characteristic_roots(p: ModelParams, label: str):
    """Closed-form squared roots (k1, k2, k3, k4) for a fixed-point family.

    k3 = k4 = 1 are carried verbatim for traceability only; they are not
    eigenvalues of the linearization and are never used for classification.
    """
    e1, e2 = float(p.eps1), float(p.eps2)
    l1, l2 = p.lambda1, p.lambda2
    m1sq, m2sq = p.mu1 ** 2, p.mu2 ** 2
    key = label[0].upper()
    if key in ("A", "B"):
        k1 = (2.0 / e1) * l1 * m1sq
        k2 = (1.0 / e2) * (m1sq - l2 * m2sq)
    elif key in ("C", "D"):
        k1 = (1.0 / e1) * (m2sq - l1 * m1sq)
        k2 = (2.0 / e2) * l2 * m2sq
    elif key == "E":
        k1 = -(1.0 / e1) * l1 * m1sq
        k2 = -(1.0 / e2) * l2 * m2sq
    elif key == "F":
        den, r_phi, r_chi = _f_radicands(p)
        if den == 0.0 or r_phi < 0.0 or r_chi < 0.0:
            raise ValueError(f"F points absent for these parameters ({label})")
        pref = -1.0 / (e1 * e2 * (l1 * l2 - 1.0))
        lin = (
            -e2 * m1sq * l1 * l1 * l2
            - e1 * m2sq * l1 * l2 * l2
            + e1 * m1sq * l1 * l2
            + e2 * m2sq * l1 * l2
        )
        rad = l1 * l2 * (
            4.0 * e1 * e2 * (m2sq * l2 - m1sq) * (m2sq - l1 * m1sq) * (l1 * l2 - 1.0)
            + l1 * l2 * (m1sq * (e2 * l1 - e1) + m2sq * (e1 * l2 - e2)) ** 2
        )
        root = cmath.sqrt(complex(rad))
        k1 = pref * (lin + root)
        k2 = pref * (lin - root)
        if abs(k1.imag) == 0.0:
            k1, k2 = k1.real, k2.real
    else:
        raise ValueError(f"unknown fixed-point label {label!r}")
    return (k1, k2, 1.0, 1.0)


def classify(p: ModelParams, f: FixedPoint) -> str:
    """Coarse classification recomputed from the point's eigenvalues."""
    _, sig = _spectrum_from_k(*_biquadratic_k(p, *f.location))
    return _classification(sig)


def _make_point(p: ModelParams, label: str, phi: float, chi: float, note: str = "") -> FixedPoint:
    if label[0] == "F":
        # General small-matrix eigensolver for the fully coupled block.
        eigs_arr = np.linalg.eigvals(
            jacobian(p, FieldState(0.0, phi, chi, 0.0, 0.0))
        )
        eigs = tuple(
            sorted(
                (complex(w) for w in eigs_arr),
                key=lambda w: (round(w.real, 14), round(w.imag, 14)),
            )
        )
        _, sig = _spectrum_from_k(*_biquadratic_k(p, phi, chi))
    else:
        # Block structure makes the quartic biquadratic; solve it analytically.
        eigs, sig = _spectrum_from_k(*_biquadratic_k(p, phi, chi))
    return FixedPoint(
        label=label,
        location=(phi, chi),
        potential_value=float(potential(p, phi, chi)),
        char_roots_paper=characteristic_roots(p, label),
        jacobian_eigenvalues=eigs,
        classification=_classification(sig),
        spectrum=sig,
        note=note,
    )


def fixed_points(p: ModelParams) -> list[FixedPoint]:
    """All fixed points for the given parameters.

    A-E always exist; the four F sign variants are included only when their
    radicands are nonnegative and lambda1*lambda2 != 1 (see
    :func:`fixed_point_absences` for the structured reason otherwise).
    """
    pts = [
        _make_point(p, "A", p.mu1, 0.0),
        _make_point(p, "B", -p.mu1, 0.0),
        _make_point(p, "C", 0.0, p.mu2),
        _make_point(p, "D", 0.0, -p.mu2),
        _make_point(p, "E", 0.0, 0.0),
    ]
    if not fixed_point_absences(p):
        _, r_phi, r_chi = _f_radicands(p)
        fp, fc = math.sqrt(r_phi), math.sqrt(r_chi)
        note = "classification is numeric; no closed-form criterion exists"
        for label, sp, sc in (
            ("F++", 1.0, 1.0),
            ("F+-", 1.0, -1.0),
            ("F-+", -1.0, 1.0),
            ("F--", -1.0, -1.0),
        ):
            pts.append(_make_point(p, label, sp * fp, sc * fc, note=note))
    return pts


def potential_gaps(p: ModelParams) -> tuple[float, float, float]:
    """Closed forms for (V_F - V_A, V_F - V_C, V_F - V_E).

    Only defined when the F points exist.
    """
    absences = fixed_point_absences(p)
    if absences:
        raise ValueError(next(iter(absences.values())))
    l1, l2 = p.lambda1, p.lambda2
    m1sq, m2sq = p.mu1 ** 2, p.mu2 ** 2
    den = 4.0 * (1.0 - l1 * l2)
    gap_a = l1 * (-m1sq + l2 * m2sq) ** 2 / den
    gap_c = l2 * (-m2sq + l1 * m1sq) ** 2 / den
    gap_e = l1 * l2 * (m1sq * (l1 * m1sq - m2sq) + m2sq * (l2 * m2sq - m1sq)) / den
    return gap_a, gap_c, gap_e


def check_cond_max(p: ModelParams) -> bool:
    """max(V_A, V_C) <= V_E, up to a 1e-12 slack."""
    v_a = float(potential(p, p.mu1, 0.0))
    v_c = float(potential(p, 0.0, p.mu2))
    v_e = float(potential(p, 0.0, 0.0))
    return max(v_a, v_c) <= v_e + 1e-12
