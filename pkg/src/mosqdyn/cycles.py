"""Periodic-orbit exclusion: coefficient algebra plus a search oracle.

A period-2 point of the restricted map must satisfy W(W(z)) = z.  Summing
the two components of that system eliminates y linearly,

    y(x) = x*(d0*(2-d0)*(1+x) - alpha*(beta-mu+d0)) / ((1+x)*D),
    D    = beta*(2-mu-d0) - mu*(2-mu) > 0   for beta at or above the threshold,

and substituting back turns the remaining equation into the quartic

    x*(B1*x^3 + B2*x^2 + B3*x + B4) = 0

whose coefficients come from the A0..A4 block below.  x = 0 and x = x* are
always roots; deflating them leaves a quadratic whose coefficients also have
independent closed forms.  When those are all positive the quadratic has no
positive root, hence no period-2 point in the quadrant; positivity is
immediate when B0 = alpha*(beta-mu+d0)/(d0*(2-d0)) - 1 <= 0, and otherwise
follows after recentering the quadratic at B0 (y(x) >= 0 forces x >= B0).
Cooperativity then rules out every longer period as well.

Each certificate quantity is computed along two independent algebraic routes
that must agree to 1e-9 relative; a brute-force Newton search over iterated
maps provides the fully independent oracle.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import Params, require_w0, step_w0_raw
from .equilibria import beta_vs_threshold, jacobian_entries, regime_quantities
from .errors import BranchError, CertificateFailure, RegimeError
from .geometry import omega_bounds

#: Two independent algebraic routes to the same coefficient must agree this well.
ROUTE_TOL = 1e-9

#: Newton roots closer than this (max norm) are the same point.
DEDUP_RADIUS = 1e-6

#: Default Newton residual tolerance, in units of max(1, |z|_inf).
RESIDUAL_TOL = 1e-10

_NEWTON_MAX_ITER = 100
_NEWTON_DAMPING = 0.5


class CertificateBranch(enum.Enum):
    B0_NON_POSITIVE = "b0_non_positive"
    B0_POSITIVE = "b0_positive"


@dataclass(frozen=True)
class CycleCoefficients:
    """The quartic's building blocks, all sharing the denominator d."""

    a0: float
    a1: float
    a2: float
    a3: float
    a4: float
    b1: float
    b2: float
    b3: float
    b4: float
    b0: float
    d: float


@dataclass(frozen=True)
class CycleCertificate:
    """Positivity certificate: the deflated quadratic has no positive root."""

    branch: CertificateBranch
    coefficients: tuple[float, float, float]
    all_positive: bool
    brute_force_residual: float | None
    b0: float
    inequality_checks: dict[str, bool]


@dataclass(frozen=True)
class Cycle:
    """A genuine periodic orbit found by search (none are expected)."""

    period: int
    states: tuple[tuple[float, float], ...]
    residual: float


def _require_certificate_regime(p: Params) -> None:
    require_w0(p)
    if beta_vs_threshold(p) < 0:
        raise RegimeError(
            "cycle algebra needs beta at or above the threshold (D > 0)"
        )


def _x_star_value(p: Params) -> float:
    # Valid for beta >= threshold; evaluates to ~0 exactly on the threshold.
    return p.alpha * (p.beta - p.mu) / (p.mu * p.d0) - 1.0


@lru_cache(maxsize=None)
def cycle_coefficients(p: Params) -> CycleCoefficients:
    """The A/B coefficient block of the period-2 quartic."""
    _require_certificate_regime(p)
    al, be, mu, d0 = p.alpha, p.beta, p.mu, p.d0
    d = be * (2.0 - mu - d0) - mu * (2.0 - mu)
    if d <= 0.0:
        # only reachable on the degenerate corner mu = 1, alpha + d0 = 1,
        # beta = threshold, where the whole elimination is undefined
        raise RegimeError(f"quartic denominator must be positive, got D = {d}")
    a0 = 1.0 - d0 + be * d0 * (2.0 - d0) / d
    a1 = 1.0 - al - al * be * (be - mu + d0) / d
    a2 = -al * al * (1.0 + be * (be - mu + d0) / d)
    a3 = mu * (2.0 - mu) * d0 * (2.0 - d0) / d
    a4 = -(al * (1.0 - mu) + al * mu * (2.0 - mu) * (be - mu + d0) / d)
    b1 = a0 * a3
    b2 = 2.0 * a0 * a3 + a1 * a3 + a0 * a4 - al * a0
    b3 = a0 * a3 + a1 * a3 + a3 + a0 * a4 + a1 * a4 - 2.0 * al * a0 - a2
    b4 = a3 + a4 - al * a0 - a2
    b0 = al * (be - mu + d0) / (d0 * (2.0 - d0)) - 1.0
    return CycleCoefficients(a0, a1, a2, a3, a4, b1, b2, b3, b4, b0, d)


def two_cycle_y_of_x(p: Params, x: float) -> float:
    """Adult density forced by a period-2 larvae density x."""
    _require_certificate_regime(p)
    c = cycle_coefficients(p)
    num = x * (p.d0 * (2.0 - p.d0) * (1.0 + x) - p.alpha * (p.beta - p.mu + p.d0))
    return num / ((1.0 + x) * c.d)


def quartic_residual(p: Params, x: float) -> float:
    """Value of the period-2 quartic at x; zero at x = 0 and x = x*."""
    c = cycle_coefficients(p)
    return x * (((c.b1 * x + c.b2) * x + c.b3) * x + c.b4)


def _check_routes(kind: str, composed, closed) -> None:
    for a, b in zip(composed, closed):
        if abs(a - b) > ROUTE_TOL * max(1.0, abs(a), abs(b)):
            raise CertificateFailure(
                f"{kind} coefficient routes disagree: {a!r} vs {b!r}"
            )


def _reduced_quadratic_routes(p: Params):
    """Deflated quadratic two ways: composed from the quartic, and closed form."""
    c = cycle_coefficients(p)
    al, be, mu, d0 = p.alpha, p.beta, p.mu, p.d0
    xs = _x_star_value(p)
    composed = (
        c.b1,
        c.b2 + c.b1 * xs,
        c.b3 + c.b2 * xs + c.b1 * xs * xs,
    )
    g = (2.0 - mu) * (2.0 - d0) - al * (2.0 + be - mu)
    closed = (
        c.a0 * c.a3,
        mu * d0 * (be - mu) * (2.0 - mu) * (2.0 - d0) * g / (c.d * c.d),
        mu * d0 * g / c.d,
    )
    return composed, closed


def reduced_quadratic(p: Params) -> tuple[float, float, float]:
    """Coefficients left after deflating x and (x - x*) from the quartic.

    Computed by direct composition and cross-checked against the closed
    forms before being returned.
    """
    composed, closed = _reduced_quadratic_routes(p)
    _check_routes("reduced quadratic", composed, closed)
    return composed


def _shifted_quadratic_routes(p: Params):
    """Quadratic recentered at B0, by Taylor shift and by closed form."""
    c = cycle_coefficients(p)
    al, be, mu, d0 = p.alpha, p.beta, p.mu, p.d0
    q2, q1, q0 = reduced_quadratic(p)
    b0 = c.b0
    shifted = (
        q2,
        q1 + 2.0 * b0 * q2,
        (q2 * b0 + q1) * b0 + q0,
    )
    closed = (
        c.a0 * c.a3,
        b0 * c.b1
        + mu * (2.0 - mu)
        * (d0 * (2.0 - d0) + al * ((be - mu) * (1.0 - d0) - d0)) / c.d,
        (
            al * mu * (2.0 + be - mu) * (2.0 - d0) * (1.0 - mu) * d0 * d0
            + al * al * mu * (2.0 - mu)
            * ((be - mu) ** 2 * (1.0 - d0) - (be - mu + 1.0) * d0 * d0)
        ) / (d0 * (2.0 - d0) * c.d),
    )
    return shifted, closed


def shifted_quadratic(p: Params) -> tuple[float, float, float]:
    """Deflated quadratic evaluated in the variable x - B0; needs B0 > 0.

    The shift leaves the leading coefficient untouched; the other two are
    cross-checked against their closed forms.  All three are positive
    throughout the admissible regime, which is what the certificate asserts.
    """
    c = cycle_coefficients(p)
    if c.b0 <= 0.0:
        raise BranchError(f"shifted quadratic needs B0 > 0, got B0 = {c.b0}")
    shifted, closed = _shifted_quadratic_routes(p)
    _check_routes("shifted quadratic", shifted, closed)
    return shifted


def no_cycle_certificate(p: Params) -> CycleCertificate:
    """Certify that no period-2 point exists in the positive quadrant.

    Picks the branch on the sign of B0, records the implied inequalities of
    that branch, and demands strict positivity of all three quadratic
    coefficients.  Any nonpositive coefficient or failed implication raises
    CertificateFailure rather than returning a weakened verdict.
    """
    c = cycle_coefficients(p)
    al, be, mu, d0 = p.alpha, p.beta, p.mu, p.d0
    if c.b0 > 0.0:
        branch = CertificateBranch.B0_POSITIVE
        coeffs = shifted_quadratic(p)
        checks = {
            "gap_times_survival_exceeds_d0": (be - mu) * (1.0 - d0) > d0,
            "squared_gap_inequality":
                (be - mu) ** 2 * (1.0 - d0) > (be - mu + 1.0) * d0 * d0,
        }
    else:
        branch = CertificateBranch.B0_NON_POSITIVE
        coeffs = reduced_quadratic(p)
        checks = {
            "mixed_product_nonnegative":
                (2.0 - mu) * (2.0 - d0) - al * (2.0 + be - mu) >= 0.0,
        }
    if not all(checks.values()):
        raise CertificateFailure(
            f"implied inequality failed on branch {branch.value} for {p}: {checks}"
        )
    all_positive = all(v > 0.0 for v in coeffs)
    if not all_positive:
        raise CertificateFailure(
            f"nonpositive quadratic coefficient on branch {branch.value} "
            f"for {p}: {coeffs}"
        )
    return CycleCertificate(
        branch=branch,
        coefficients=coeffs,
        all_positive=True,
        brute_force_residual=None,
        b0=c.b0,
        inequality_checks=checks,
    )


def _orbit_arrays(p: Params, x, y, period: int, want_jacobian: bool):
    """period steps of the raw map; optionally the chain-rule Jacobian."""
    cx, cy = np.asarray(x, dtype=float).copy(), np.asarray(y, dtype=float).copy()
    if want_jacobian:
        t11 = np.ones_like(cx)
        t12 = np.zeros_like(cx)
        t21 = np.zeros_like(cx)
        t22 = np.ones_like(cx)
    for _ in range(period):
        if want_jacobian:
            j11, j12, j21, j22 = jacobian_entries(p, cx)
            t11, t12, t21, t22 = (
                j11 * t11 + j12 * t21,
                j11 * t12 + j12 * t22,
                j21 * t11 + j22 * t21,
                j21 * t12 + j22 * t22,
            )
        cx, cy = step_w0_raw(p, cx, cy)
    if want_jacobian:
        return cx, cy, (t11, t12, t21, t22)
    return cx, cy


def _newton_cycle_batch(p: Params, x0, y0, period: int, tol: float):
    """Damped Newton on W^period(z) - z from an array of seeds.

    Seeds that wander toward the x = -1 singularity, blow up, or hit a
    singular linearization are dropped; survivors are returned with their
    final residuals.
    """
    x = np.asarray(x0, dtype=float).copy()
    y = np.asarray(y0, dtype=float).copy()
    alive = np.isfinite(x) & np.isfinite(y)
    converged = np.zeros_like(alive)
    for _ in range(_NEWTON_MAX_ITER):
        if not np.any(alive & ~converged):
            break
        px, py, (t11, t12, t21, t22) = _orbit_arrays(p, x, y, period, True)
        fx, fy = px - x, py - y
        res = np.maximum(np.abs(fx), np.abs(fy))
        scale = np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))
        converged = alive & (res < tol * scale)
        active = alive & ~converged
        if not np.any(active):
            break
        a11, a12, a21, a22 = t11 - 1.0, t12, t21, t22 - 1.0
        det = a11 * a22 - a12 * a21
        singular = active & (np.abs(det) < 1e-300)
        alive &= ~singular
        active &= ~singular
        safe_det = np.where(det == 0.0, 1.0, det)
        dx = (a22 * fx - a12 * fy) / safe_det
        dy = (a11 * fy - a21 * fx) / safe_det
        for damp in (1.0, _NEWTON_DAMPING):
            nx = np.where(active, x - damp * dx, x)
            ny = np.where(active, y - damp * dy, y)
            if damp == 1.0:
                tx, ty = _orbit_arrays(p, nx, ny, period, False)
                with np.errstate(invalid="ignore"):
                    grew = active & ~(
                        np.maximum(np.abs(tx - nx), np.abs(ty - ny)) <= res
                    )
                if not np.any(grew):
                    x, y = nx, ny
                    break
                x = np.where(grew, x, nx)
                y = np.where(grew, y, ny)
                active = grew
            else:
                x, y = nx, ny
        bad = alive & (~np.isfinite(x) | ~np.isfinite(y)
                       | (1.0 + x < 1e-9) | (np.abs(x) > 1e9) | (np.abs(y) > 1e9))
        alive &= ~bad
    px, py = _orbit_arrays(p, x, y, period, False)
    res = np.maximum(np.abs(px - x), np.abs(py - y))
    scale = np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))
    with np.errstate(invalid="ignore"):
        ok = alive & np.isfinite(res) & (res < tol * scale)
    return x[ok], y[ok], res[ok]


def _orbit_points(p: Params, x: float, y: float, period: int):
    pts = [(x, y)]
    for _ in range(period - 1):
        x, y = step_w0_raw(p, x, y)
        pts.append((float(x), float(y)))
    return pts


def _canonical_rotation(pts):
    k = min(range(len(pts)), key=lambda i: pts[i])
    return tuple(pts[k:] + pts[:k])


def brute_force_cycle_search(p: Params, period: int, grid_n: int,
                             tol: float = RESIDUAL_TOL) -> list[Cycle]:
    """Hunt genuine period-p orbits by Newton from a grid over the rectangle.

    Converged roots are deduplicated (DEDUP_RADIUS, up to orbit rotation),
    stripped of known fixed points and of orbits whose minimal period is
    shorter, and restricted to the closed positive quadrant.  An empty list
    is the expected outcome for every admissible parameter set.
    """
    require_w0(p)
    if period not in (2, 3, 4):
        raise ValueError(f"period must be 2, 3, or 4, got {period}")
    b = omega_bounds(p)
    gx = np.linspace(0.0, b.x_max, grid_n)
    gy = np.linspace(0.0, b.y_max, grid_n)
    seeds_x, seeds_y = (a.ravel() for a in np.meshgrid(gx, gy))
    roots_x, roots_y, residuals = _newton_cycle_batch(p, seeds_x, seeds_y, period, tol)

    rq = regime_quantities(p)
    fixed = [(0.0, 0.0)]
    if rq.x_star is not None:
        fixed.append((rq.x_star, rq.y_star))

    cycles: list[Cycle] = []
    for x, y, res in zip(roots_x, roots_y, residuals):
        orbit = _orbit_points(p, float(x), float(y), period)
        if any(not (px >= -1e-9 and py >= -1e-9) for px, py in orbit):
            continue  # outside the positive quadrant
        if any(
            max(abs(px - fx), abs(py - fy)) < DEDUP_RADIUS
            for px, py in orbit for fx, fy in fixed
        ):
            continue  # collapses onto a fixed point
        if any(
            max(abs(orbit[i][0] - orbit[j][0]), abs(orbit[i][1] - orbit[j][1]))
            < DEDUP_RADIUS
            for i in range(period) for j in range(i + 1, period)
        ):
            continue  # minimal period shorter than requested
        canon = _canonical_rotation(orbit)
        if any(
            all(
                max(abs(a[0] - b_[0]), abs(a[1] - b_[1])) < DEDUP_RADIUS
                for a, b_ in zip(canon, c.states)
            )
            for c in cycles
        ):
            continue  # duplicate of an already recorded orbit
        cycles.append(Cycle(period=period, states=canon, residual=float(res)))
    cycles.sort(key=lambda c: c.states)
    return cycles
