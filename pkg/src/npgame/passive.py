"""Stackelberg game of a naive detector against a distortion-penalized attacker.

The detector runs the nominal NP rule unaware of the attacker.  At
equilibrium the benign-type strategy is undistorted, while the
malicious-type strategy suppresses the rejection region by a factor
exp(-1/lambda) and renormalizes.  The boundary (randomized) messages are
treated as acceptance: the distortion factor there is 1.

lambda conventions: 0 means distortion is free (factor 0 on the rejection
region), math.inf means no distortion at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import DecisionRule, RegionPartition, np_rule, rates
from .errors import InvalidAlphaError
from .pmf import Pmf, normalize


@dataclass(frozen=True, eq=False)
class PassiveEquilibrium:
    sigma0_star: Pmf
    sigma1_star: Pmf
    rule: DecisionRule
    regions: RegionPartition
    lam: float
    alpha: float
    p_f: float
    p_d: float


def _distortion_factor(lam: float) -> float:
    if lam == math.inf:
        return 1.0
    if lam == 0.0:
        return 0.0
    return math.exp(-1.0 / lam)


def passive_equilibrium(f0: Pmf, f1: Pmf, alpha: float, lam: float) -> PassiveEquilibrium:
    """Equilibrium of the passive-detector Stackelberg game.

    sigma0* = f0 always; sigma1* multiplies f1 by exp(-1/lambda) on the
    strict-rejection region and renormalizes.  lambda=0 and lambda=inf use
    their closed-form limits rather than floating-point extremes.
    """
    if lam != math.inf and (not math.isfinite(lam) or lam < 0):
        raise ValueError(f"lambda must be >= 0 or inf, got {lam!r}")
    rule, regions = np_rule(f0, f1, alpha)

    factor = np.ones(f1.space.size)
    for i in regions.m1:
        factor[i] = _distortion_factor(lam)
    sigma1 = normalize(f1.masses * factor, f1.space)
    sigma0 = Pmf(f0.space, f0.masses)

    p_f, p_d = rates(rule, sigma0, sigma1)
    return PassiveEquilibrium(
        sigma0_star=sigma0,
        sigma1_star=sigma1,
        rule=rule,
        regions=regions,
        lam=lam,
        alpha=float(alpha),
        p_f=p_f,
        p_d=p_d,
    )


def passive_eroc(f0: Pmf, f1: Pmf, lam: float, alpha_grid) -> list[tuple[float, float, float]]:
    """(alpha, P_F, P_D) along an alpha grid; P_F == alpha at every point."""
    grid = list(alpha_grid)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidAlphaError("alpha grid must be strictly increasing")
    out = []
    for alpha in grid:
        eq = passive_equilibrium(f0, f1, alpha, lam)
        out.append((float(alpha), eq.p_f, eq.p_d))
    return out
