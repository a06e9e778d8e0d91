"""Floating-point cross-checks of the exact averages.

Everything here works on the z-y-z Euler-angle realization of a rotation and
stays in double precision.  The quadrature rule is exact (to roundoff) for
the direction-cosine monomials it is sized for, the Monte Carlo estimate is
seedable and reproducible, and neither is ever used to define exact outputs,
only to bound them.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi
from typing import Optional

import numpy as np

from .power_matrix import PowerMatrix


@dataclass(frozen=True)
class AngleTriple:
    """z-y-z Euler angles: alpha, gamma in [0, 2*pi), beta in [0, pi]."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.alpha < 2 * pi:
            raise ValueError("alpha must lie in [0, 2*pi)")
        if not 0.0 <= self.beta <= pi:
            raise ValueError("beta must lie in [0, pi]")
        if not 0.0 <= self.gamma < 2 * pi:
            raise ValueError("gamma must lie in [0, 2*pi)")


@dataclass(frozen=True)
class QuadratureSpec:
    """Point counts of the product rule: uniform in alpha and gamma, Gauss in cos(beta)."""

    alpha_points: int
    beta_points: int
    gamma_points: int

    def __post_init__(self):
        if min(self.alpha_points, self.beta_points, self.gamma_points) < 1:
            raise ValueError("every direction needs at least one quadrature point")

    @classmethod
    def for_rank(cls, n: int) -> "QuadratureSpec":
        # n+2 periodic points integrate trig polynomials of degree <= n+1 in
        # alpha and gamma exactly; n+2 Gauss nodes in cos(beta) are exact for
        # the polynomial the beta integrand reduces to whenever the parity
        # selection rule holds.
        k = n + 2
        return cls(k, k, k)

    def refined(self, factor: int = 2) -> "QuadratureSpec":
        return QuadratureSpec(
            self.alpha_points * factor, self.beta_points * factor, self.gamma_points * factor
        )


def _cosine_entries(ca, sa, cb, sb, cg, sg):
    """The nine direction cosines, row-major, for broadcastable angle arrays."""
    return (
        -sa * sg + ca * cb * cg,
        -cg * sa - ca * cb * sg,
        ca * sb,
        ca * sg + cb * cg * sa,
        ca * cg - cb * sa * sg,
        sa * sb,
        -cg * sb,
        sb * sg,
        cb * np.ones_like(ca * cg),
    )


def euler_matrix(angles: AngleTriple) -> np.ndarray:
    """Rotation matrix of the z-y-z Euler angles (right-handed frame and screw)."""
    ca, sa = np.cos(angles.alpha), np.sin(angles.alpha)
    cb, sb = np.cos(angles.beta), np.sin(angles.beta)
    cg, sg = np.cos(angles.gamma), np.sin(angles.gamma)
    entries = _cosine_entries(ca, sa, cb, sb, cg, sg)
    return np.array(entries, dtype=float).reshape(3, 3)


def _grid(spec: QuadratureSpec):
    """Broadcast angle grids plus the Gauss weights in x = cos(beta)."""
    alphas = np.arange(spec.alpha_points) * (2 * pi / spec.alpha_points)
    gammas = np.arange(spec.gamma_points) * (2 * pi / spec.gamma_points)
    xs, wb = np.polynomial.legendre.leggauss(spec.beta_points)
    ca = np.cos(alphas)[:, None, None]
    sa = np.sin(alphas)[:, None, None]
    cb = xs[None, :, None]
    sb = np.sqrt(1.0 - xs * xs)[None, :, None]
    cg = np.cos(gammas)[None, None, :]
    sg = np.sin(gammas)[None, None, :]
    return ca, sa, cb, sb, cg, sg, wb


def _monomial(entries, flat, shape) -> np.ndarray:
    prod = None
    for value, power in zip(entries, flat):
        if power == 0:
            continue
        factor = value ** power
        prod = factor if prod is None else prod * factor
    if prod is None:
        return np.ones(shape)
    return np.broadcast_to(prod, shape)


def quadrature_average(chi: PowerMatrix, spec: Optional[QuadratureSpec] = None) -> float:
    """Triple-integral average of the chi monomial by the product quadrature rule.

    The sin(beta) Haar factor is absorbed into the Gauss rule in cos(beta).
    With the default spec the result matches the exact rational to ~1e-12
    whenever the parity selection rule holds; selection-rule-violating inputs
    integrate to 0 only approximately.
    """
    if spec is None:
        spec = QuadratureSpec.for_rank(chi.rank)
    ca, sa, cb, sb, cg, sg, wb = _grid(spec)
    shape = (spec.alpha_points, spec.beta_points, spec.gamma_points)
    integrand = _monomial(_cosine_entries(ca, sa, cb, sb, cg, sg), chi.flat, shape)
    total = np.einsum("abg,b->", integrand, wb)
    # uniform weights 2*pi/A and 2*pi/G against the 1/(8*pi^2) normalization
    return float(total / (2.0 * spec.alpha_points * spec.gamma_points))


def invariance_probe(
    chi: PowerMatrix,
    h: np.ndarray,
    side: str = "left",
    spec: Optional[QuadratureSpec] = None,
) -> float:
    """Quadrature average with the rotation variable composed with a fixed h.

    Composing g -> h g (or g -> g h) must leave the average unchanged, which
    probes the left/right invariance the average is built on.
    """
    h = np.asarray(h, dtype=float)
    if h.shape != (3, 3) or np.abs(h.T @ h - np.eye(3)).max() > 1e-10:
        raise ValueError("h is not orthogonal to within 1e-10")
    if abs(np.linalg.det(h) - 1.0) > 1e-10:
        raise ValueError("h is not a proper rotation (det != 1)")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if spec is None:
        spec = QuadratureSpec.for_rank(chi.rank)
    ca, sa, cb, sb, cg, sg, wb = _grid(spec)
    shape = (spec.alpha_points, spec.beta_points, spec.gamma_points)
    entries = _cosine_entries(ca, sa, cb, sb, cg, sg)
    g = np.stack([np.broadcast_to(e, shape) for e in entries], axis=-1).reshape(shape + (3, 3))
    composed = np.matmul(h, g) if side == "left" else np.matmul(g, h)
    flat_entries = [composed[..., i, j] for i in range(3) for j in range(3)]
    integrand = _monomial(flat_entries, chi.flat, shape)
    total = np.einsum("abg,b->", integrand, wb)
    return float(total / (2.0 * spec.alpha_points * spec.gamma_points))


def monte_carlo_average(
    chi: PowerMatrix, samples: int, seed: int, chunk: int = 1 << 16
) -> tuple[float, float]:
    """Mean and standard error of the chi monomial over uniform random rotations.

    Rotations are sampled through the product measure (alpha uniform,
    cos(beta) uniform on [-1, 1], gamma uniform), which is the uniform
    rotation measure up to normalization.  The PCG64 stream and the fixed
    chunking scheme make the result a deterministic function of the seed.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    flat = chi.flat
    total = 0.0
    total_sq = 0.0
    remaining = samples
    while remaining:
        m = min(chunk, remaining)
        remaining -= m
        alpha = rng.uniform(0.0, 2 * pi, m)
        cb = rng.uniform(-1.0, 1.0, m)
        gamma = rng.uniform(0.0, 2 * pi, m)
        sb = np.sqrt(1.0 - cb * cb)
        entries = _cosine_entries(
            np.cos(alpha), np.sin(alpha), cb, sb, np.cos(gamma), np.sin(gamma)
        )
        values = _monomial(entries, flat, (m,))
        total += float(values.sum())
        total_sq += float((values * values).sum())
    mean = total / samples
    if samples == 1:
        return mean, 0.0
    variance = max(total_sq - samples * mean * mean, 0.0) / (samples - 1)
    return mean, float(np.sqrt(variance / samples))


def default_mc_battery() -> list[PowerMatrix]:
    """Fixed battery for Monte Carlo consistency checks.

    The first four selection-rule-passing matrices of each rank 2..6 in
    enumeration order: 20 matrices, deterministic across runs and platforms.
    """
    from .propositions import enumerate_power_matrices
    from .power_matrix import selection_rule

    battery = []
    for n in range(2, 7):
        picked = 0
        for chi in enumerate_power_matrices(n):
            if selection_rule(chi):
                battery.append(chi)
                picked += 1
                if picked == 4:
                    break
    return battery
