"""Randomized Neyman-Pearson tests of exact size and ROC curves.

The non-adversarial baseline: a likelihood-ratio threshold test whose
randomization on the threshold atom makes the false-alarm rate hit the
target exactly on a discrete space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidAlphaError, SupportMismatchError
from .pmf import Pmf, likelihood_ratio

#: relative tolerance used to group likelihood-ratio ties
LR_TIE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class DecisionRule:
    """Per-message probability of declaring the alternative hypothesis."""

    accept_prob: np.ndarray  # r(m) in [0,1]; 1 = strict rejection of H0
    tau: float | None = None  # likelihood-ratio threshold, when applicable

    def __post_init__(self):
        a = np.asarray(self.accept_prob, dtype=float)
        if np.any(a < -1e-15) or np.any(a > 1 + 1e-15):
            raise ValueError("accept_prob entries must lie in [0, 1]")
        a = np.clip(a, 0.0, 1.0)
        a.setflags(write=False)
        object.__setattr__(self, "accept_prob", a)


@dataclass(frozen=True)
class RegionPartition:
    """Disjoint index sets: strict acceptance / boundary / strict rejection."""

    m0: tuple[int, ...]
    m_star: tuple[int, ...]
    m1: tuple[int, ...]

    def __post_init__(self):
        sets = [set(self.m0), set(self.m_star), set(self.m1)]
        if sets[0] & sets[1] or sets[0] & sets[2] or sets[1] & sets[2]:
            raise ValueError("region index sets must be pairwise disjoint")

    @property
    def live(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.m0) | set(self.m_star) | set(self.m1)))


def _check_equal_support(f0: Pmf, f1: Pmf) -> None:
    if f0.support != f1.support:
        raise SupportMismatchError(
            f"hypothesis densities must share one support "
            f"(got {f0.support} vs {f1.support})"
        )


def np_rule(f0: Pmf, f1: Pmf, alpha: float) -> tuple[DecisionRule, RegionPartition]:
    """Size-alpha randomized likelihood-ratio test on nominal densities.

    The threshold tau is the smallest likelihood-ratio value whose strict
    rejection region {LR > tau} has f0-mass <= alpha; a shared randomization
    r on the tied messages absorbs the remaining size exactly.
    """
    _check_equal_support(f0, f1)
    if not (0.0 < alpha <= 1.0):
        raise InvalidAlphaError(f"alpha must lie in (0, 1], got {alpha!r}")

    lr = likelihood_ratio(f1, f0)
    live = list(f0.support)
    n = f0.space.size

    # unique LR values among live messages, ascending, ties grouped
    live_lr = sorted({float(lr[i]) for i in live})
    grouped: list[float] = []
    for v in live_lr:
        if grouped and abs(v - grouped[-1]) <= LR_TIE_RTOL * max(abs(v), 1.0):
            continue
        grouped.append(v)

    def strict_mass(tau: float) -> float:
        idx = [i for i in live if lr[i] > tau * (1.0 + LR_TIE_RTOL)]
        return f0.mass_on(idx)

    tau = None
    for cand in grouped:
        if strict_mass(cand) <= alpha + 1e-15:
            tau = cand
            break
    assert tau is not None  # tau = max LR always qualifies (strict mass 0)

    near = lambda v: abs(v - tau) <= LR_TIE_RTOL * max(abs(tau), 1.0)
    m1 = tuple(i for i in live if lr[i] > tau and not near(lr[i]))
    m_star = tuple(i for i in live if near(lr[i]))
    m0 = tuple(i for i in live if lr[i] < tau and not near(lr[i]))

    strict = f0.mass_on(m1)
    tie = f0.mass_on(m_star)
    r = 0.0 if tie == 0 else min(max((alpha - strict) / tie, 0.0), 1.0)

    accept = np.zeros(n)
    for i in m1:
        accept[i] = 1.0
    for i in m_star:
        accept[i] = r
    return DecisionRule(accept, tau=tau), RegionPartition(m0, m_star, m1)


def rates(rule: DecisionRule, g0: Pmf, g1: Pmf) -> tuple[float, float]:
    """(P_F, P_D) of a rule under arbitrary message distributions."""
    p_f = float(np.dot(rule.accept_prob, g0.weighted()))
    p_d = float(np.dot(rule.accept_prob, g1.weighted()))
    return p_f, p_d


def roc_curve(f0: Pmf, f1: Pmf, alpha_grid) -> list[tuple[float, float, float]]:
    """Attacker-free reference curve: one exact-size NP point per alpha."""
    grid = list(alpha_grid)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidAlphaError("alpha grid must be strictly increasing")
    out = []
    for alpha in grid:
        rule, _ = np_rule(f0, f1, alpha)
        p_f, p_d = rates(rule, f0, f1)
        out.append((float(alpha), p_f, p_d))
    return out
