"""Shared fixtures: the reference parameter set and seeded samplers."""

from __future__ import annotations

import numpy as np
import pytest

from mosqdyn import Params, State, omega_bounds, validate_params

#: Reference parameter set used throughout: beta well above the threshold,
#: positive fixed point at (1.5, 0.375).
P0 = validate_params(0.5, 2.0, 0.8, 0.3, 0.0)

#: Same alpha/mu/d0 with beta exactly on the persistence threshold 1.28.
P_BOUNDARY = validate_params(0.5, 0.8 * (1.0 + 0.3 / 0.5), 0.8, 0.3, 0.0)

#: Witness with B0 < 0 while beta still exceeds the threshold.
P_B0_NEG = validate_params(0.5, 1.2, 0.5, 0.5, 0.0)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def sample_w0_params(rng: np.random.Generator, beta_mode: str = "above") -> Params:
    """Random admissible constants with beta placed relative to the threshold.

    The box keeps d0 and mu away from zero so the trapping rectangle (and
    with it every absolute 1e-12 tolerance) stays at moderate magnitudes,
    and keeps x* below ~30 in the "above" mode.
    """
    alpha = rng.uniform(0.05, 0.9)
    d0 = rng.uniform(0.05, min(0.9, 1.0 - alpha))
    mu = rng.uniform(0.1, 1.0)
    t = mu * (1.0 + d0 / alpha)
    if beta_mode == "above":
        spread = min(0.5 * t, 30.0 * mu * d0 / alpha)
        beta = t + rng.uniform(0.02, 1.0) * spread
    elif beta_mode == "at":
        beta = t
    elif beta_mode == "below":
        beta = t * rng.uniform(0.2, 0.98)
    elif beta_mode == "at_or_above":
        if rng.uniform() < 0.2:
            beta = t
        else:
            spread = min(0.5 * t, 30.0 * mu * d0 / alpha)
            beta = t + rng.uniform(0.02, 1.0) * spread
    else:
        raise ValueError(beta_mode)
    return validate_params(alpha, beta, mu, d0, 0.0)


def sample_w0_params_any_regime(rng: np.random.Generator,
                                margin: float = 1e-6) -> Params:
    """Random constants with beta anywhere, kept `margin` away from the two
    classification boundaries (threshold and threshold + alpha_star)."""
    while True:
        alpha = rng.uniform(0.05, 0.9)
        d0 = rng.uniform(0.05, min(0.9, 0.95 - alpha))
        mu = rng.uniform(0.1, 0.99)
        t = mu * (1.0 + d0 / alpha)
        upper = t + (4.0 - 2.0 * (alpha + mu + d0)) / alpha
        beta = rng.uniform(0.2 * t, upper + 0.5 * t)
        if abs(beta - t) >= margin and abs(beta - upper) >= margin:
            return validate_params(alpha, beta, mu, d0, 0.0)


def sample_omega_points(p: Params, rng: np.random.Generator, n: int):
    """n uniform points of the trapping rectangle as coordinate arrays."""
    b = omega_bounds(p)
    return rng.uniform(0.0, b.x_max, n), rng.uniform(0.0, b.y_max, n)


def sample_omega_state(p: Params, rng: np.random.Generator) -> State:
    xs, ys = sample_omega_points(p, rng, 1)
    return State(float(xs[0]), float(ys[0]))


@pytest.fixture
def p0() -> Params:
    return P0


@pytest.fixture
def p_boundary() -> Params:
    return P_BOUNDARY
