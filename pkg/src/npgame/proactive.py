"""Signaling game of an evasion-aware detector: hybrid equilibria on finite spaces.

The detector thresholds the distorted-strategy likelihood ratio
sigma1/sigma0 against beta; the attacker's best response is parameterized
by a scalar zeta whose balance equation G(zeta) = 0 is solved by breakpoint
scan plus per-segment bisection.  Regions in nominal likelihood-ratio space:

    M0 = {LR < 1/zeta},  M* = {1/zeta <= LR <= exp(1/lambda)/zeta},
    M1 = {LR > exp(1/lambda)/zeta}.

lambda = 0 and lambda = inf regimes use dedicated closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import DecisionRule, RegionPartition, _check_equal_support
from .errors import InvalidAlphaError, InvalidPriorError, NoRootError
from .pmf import Pmf, likelihood_ratio, normalize

#: absolute residual bound for accepted zeta roots
ZETA_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class ThresholdSpec:
    """Detector threshold: beta directly, or (alpha, priors) from which it derives."""

    beta: float | None = None
    alpha: float | None = None
    prior0: float | None = None
    prior1: float | None = None

    def __post_init__(self):
        direct = self.beta is not None
        derived = self.alpha is not None
        if direct == derived:
            raise ValueError("give either beta or (alpha, prior0, prior1), not both")
        if derived and (self.prior0 is None or self.prior1 is None):
            raise InvalidPriorError("alpha form requires prior0 and prior1")


def beta_from_spec(spec: ThresholdSpec) -> float:
    """Likelihood-ratio threshold beta = (p(H0)/p(H1)) * (1/alpha - 1)."""
    if spec.beta is not None:
        if not (spec.beta > 0 and math.isfinite(spec.beta)):
            raise ValueError(f"beta must be positive and finite, got {spec.beta!r}")
        return float(spec.beta)
    alpha, p0, p1 = spec.alpha, spec.prior0, spec.prior1
    if not (0.0 < alpha < 1.0):
        raise InvalidAlphaError(f"alpha must lie in (0, 1), got {alpha!r}")
    if p0 <= 0 or p1 <= 0 or abs(p0 + p1 - 1.0) > 1e-12:
        raise InvalidPriorError("priors must be positive and sum to 1")
    return (p0 / p1) * (1.0 / alpha - 1.0)


def posterior(prior0: float, prior1: float, sigma0: Pmf, sigma1: Pmf, m: int) -> tuple[float, float]:
    """Bayes posterior at message index m; priors unchanged off the support."""
    if prior0 <= 0 or prior1 <= 0 or abs(prior0 + prior1 - 1.0) > 1e-12:
        raise InvalidPriorError("priors must be positive and sum to 1")
    den = prior0 * sigma0.masses[m] + prior1 * sigma1.masses[m]
    if den == 0.0:
        return prior0, prior1  # off-equilibrium path: keep the prior
    return float(prior0 * sigma0.masses[m] / den), float(prior1 * sigma1.masses[m] / den)


@dataclass(frozen=True)
class ZetaResult:
    zeta: float
    regions: RegionPartition
    residual: float
    n_roots: int
    bracket_lo: float  # sup f0/f1, the reference existence bracket
    bracket_hi: float  # exp(1/lambda) * sup f0/f1

    @property
    def in_bracket(self) -> bool:
        return self.bracket_lo <= self.zeta <= self.bracket_hi


def _regions_at(lr: np.ndarray, live, zeta: float, expo: float) -> RegionPartition:
    """Partition live messages given zeta; expo = exp(1/lambda)."""
    lo, hi = 1.0 / zeta, expo / zeta
    m0 = tuple(i for i in live if lr[i] < lo)
    m_star = tuple(i for i in live if lo <= lr[i] <= hi)
    m1 = tuple(i for i in live if lr[i] > hi)
    return RegionPartition(m0, m_star, m1)


def _balance(f0: Pmf, f1: Pmf, lr: np.ndarray, beta: float, lam: float,
             zeta: float, regions: RegionPartition) -> float:
    """G(zeta) = J(zeta) - F0(M0) - F0(M1) with the given region assignment."""
    w = f0.space.weights
    e = math.exp(-1.0 / lam)
    p = beta / (1.0 + beta)
    j = 0.0
    j += beta * zeta * sum(f1.masses[i] * w[i] for i in regions.m0)
    j += beta * zeta * e * sum(f1.masses[i] * w[i] for i in regions.m1)
    j += (beta - 1.0) * zeta ** p * sum(
        f1.masses[i] * lr[i] ** (-1.0 / (1.0 + beta)) * w[i] for i in regions.m_star
    )
    return j - f0.mass_on(regions.m0) - f0.mass_on(regions.m1)


def solve_zeta(f0: Pmf, f1: Pmf, beta: float, lam: float) -> ZetaResult:
    """Root of the hybrid-equilibrium balance equation.

    The search spans every region assignment: segments between the
    breakpoints zeta = 1/LR(m) and exp(1/lambda)/LR(m), plus the two tail
    segments where all messages fall in one region (there G is linear with
    roots 1/beta and exp(1/lambda)/beta).  Within a segment G is smooth,
    so bisection runs per segment; breakpoints themselves are tested for a
    (near-)zero.  The smallest root is returned along with the root count
    and the reference bracket [sup f0/f1, exp(1/lambda)*sup f0/f1].
    """
    _check_equal_support(f0, f1)
    if not (0.0 < lam < math.inf):
        raise ValueError("solve_zeta requires 0 < lambda < inf")
    if not (beta > 0 and math.isfinite(beta)):
        raise ValueError(f"beta must be positive and finite, got {beta!r}")

    lr = likelihood_ratio(f1, f0)
    live = list(f0.support)
    expo = math.exp(1.0 / lam)
    lo = max(1.0 / lr[i] for i in live)  # sup f0/f1
    hi = expo * lo

    # region switches: 1/zeta = LR(m)  or  expo/zeta = LR(m)
    pts = set()
    for i in live:
        pts.add(float(1.0 / lr[i]))
        pts.add(float(expo / lr[i]))
    # tail bounds enclosing the all-M0 root 1/beta and all-M1 root expo/beta
    pts.add(0.5 * min(min(pts), 1.0 / beta))
    pts.add(2.0 * max(max(pts), expo / beta))
    knots = sorted(pts)

    def g_true(z: float) -> float:
        return _balance(f0, f1, lr, beta, lam, z, _regions_at(lr, live, z, expo))

    roots: list[tuple[float, float]] = []  # (zeta, |G|)
    for z in knots:
        r = g_true(z)
        if abs(r) < ZETA_RESIDUAL_TOL:
            roots.append((z, abs(r)))

    for a, b in zip(knots, knots[1:]):
        mid = 0.5 * (a + b)
        regions = _regions_at(lr, live, mid, expo)

        def g_seg(z: float) -> float:
            return _balance(f0, f1, lr, beta, lam, z, regions)

        ga, gb = g_seg(a), g_seg(b)
        if ga == 0.0 or gb == 0.0 or ga * gb > 0:
            continue
        x0, x1, g0 = a, b, ga
        while x1 - x0 > 4e-16 * max(abs(x0), abs(x1)):
            xm = 0.5 * (x0 + x1)
            if xm == x0 or xm == x1:
                break
            gm = g_seg(xm)
            if gm == 0.0:
                x0 = x1 = xm
                break
            if g0 * gm < 0:
                x1 = xm
            else:
                x0, g0 = xm, gm
        z = x0 if abs(g_true(x0)) <= abs(g_true(x1)) else x1
        r = abs(g_true(z))
        if r < ZETA_RESIDUAL_TOL:
            roots.append((z, r))

    if not roots:
        raise NoRootError(
            f"balance equation has no root in [{knots[0]!r}, {knots[-1]!r}] "
            f"(beta={beta}, lambda={lam})"
        )
    roots.sort()
    zeta, residual = roots[0]
    # collapse near-duplicate roots (segment endpoints meeting at a knot)
    distinct = 1
    for (za, _), (zb, _) in zip(roots, roots[1:]):
        if zb - za > 1e-9 * max(abs(zb), 1.0):
            distinct += 1
    return ZetaResult(zeta=zeta, regions=_regions_at(lr, live, zeta, expo),
                      residual=residual, n_roots=distinct,
                      bracket_lo=lo, bracket_hi=hi)


@dataclass(frozen=True, eq=False)
class EquilibriumProfile:
    sigma0_star: Pmf
    sigma1_star: Pmf
    rule: DecisionRule
    regions: RegionPartition
    zeta: float
    c0: float
    c1: float
    rho0: np.ndarray  # KKT multiplier on M*, NaN elsewhere
    lam: float
    beta: float
    r_star: float
    p_f_defacto: float
    p_d_defacto: float
    p_d_counterfactual: float


def _rule_from_regions(n: int, regions: RegionPartition, r_star: float) -> DecisionRule:
    accept = np.zeros(n)
    for i in regions.m1:
        accept[i] = 1.0
    for i in regions.m_star:
        accept[i] = r_star
    return DecisionRule(accept)


def _profile_rates(rule: DecisionRule, sigma0: Pmf, sigma1: Pmf, f1: Pmf):
    a = rule.accept_prob
    p_f = float(np.dot(a, sigma0.weighted()))
    p_d = float(np.dot(a, sigma1.weighted()))
    p_cf = float(np.dot(a, f1.weighted()))
    return p_f, p_d, p_cf


def _lam0_equilibrium(f0: Pmf, f1: Pmf, beta: float, r_star: float) -> EquilibriumProfile:
    """Canonical cheap-talk representative (distortion is free)."""
    n = f0.space.size
    w = f0.space.weights
    live = list(f0.support)
    nan = float("nan")
    if beta < 1.0:
        lr = likelihood_ratio(f1, f0)
        m_plus = min(live, key=lambda i: (-lr[i], i))  # argmax LR, lowest index
        rest = [i for i in live if i != m_plus]
        if not rest:
            raise ValueError("need at least two live messages for the cheap-talk split")
        s0 = np.zeros(n)
        s0[rest] = f0.masses[rest]
        sigma0 = normalize(s0, f0.space)
        s1 = beta * sigma0.masses.copy()
        s1[m_plus] = (1.0 - beta) / w[m_plus]  # point-mass phi at m_plus
        sigma1 = Pmf(f1.space, s1)
        regions = RegionPartition(tuple(sorted(rest)), (), (m_plus,))
    else:
        sigma0 = Pmf(f0.space, f0.masses)
        s1 = np.minimum(f1.masses, beta * f0.masses)
        deficit = 1.0 - float(np.dot(s1, w))
        if deficit > 1e-15:
            # water-fill the removed mass into the remaining slack
            slack = beta * f0.masses - s1
            total_slack = float(np.dot(slack, w))
            s1 = s1 + slack * (deficit / total_slack)
        sigma1 = normalize(s1, f1.space)
        regions = RegionPartition(tuple(sorted(live)), (), ())
    rule = _rule_from_regions(n, regions, r_star)
    p_f, p_d, p_cf = _profile_rates(rule, sigma0, sigma1, f1)
    return EquilibriumProfile(
        sigma0_star=sigma0, sigma1_star=sigma1, rule=rule, regions=regions,
        zeta=nan, c0=nan, c1=nan, rho0=np.full(n, nan), lam=0.0, beta=beta,
        r_star=r_star, p_f_defacto=p_f, p_d_defacto=p_d, p_d_counterfactual=p_cf,
    )


def _lam_inf_equilibrium(f0: Pmf, f1: Pmf, beta: float, r_star: float) -> EquilibriumProfile:
    """Disclosure limit: no distortion, regions from the nominal ratio."""
    n = f0.space.size
    lr = likelihood_ratio(f1, f0)
    live = list(f0.support)
    m1 = tuple(i for i in live if lr[i] > beta)
    m_star = tuple(i for i in live if lr[i] == beta)
    m0 = tuple(i for i in live if lr[i] < beta)
    regions = RegionPartition(m0, m_star, m1)
    rule = _rule_from_regions(n, regions, r_star)
    sigma0 = Pmf(f0.space, f0.masses)
    sigma1 = Pmf(f1.space, f1.masses)
    p_f, p_d, p_cf = _profile_rates(rule, sigma0, sigma1, f1)
    return EquilibriumProfile(
        sigma0_star=sigma0, sigma1_star=sigma1, rule=rule, regions=regions,
        zeta=1.0 / beta, c0=1.0, c1=1.0, rho0=np.full(n, float("nan")),
        lam=math.inf, beta=beta, r_star=r_star,
        p_f_defacto=p_f, p_d_defacto=p_d, p_d_counterfactual=p_cf,
    )


def proactive_equilibrium(f0: Pmf, f1: Pmf, spec: ThresholdSpec, lam: float,
                          r_star: float = 0.0) -> EquilibriumProfile:
    """Hybrid perfect-Bayesian equilibrium of the signaling game.

    For 0 < lambda < inf this solves the zeta balance equation and builds
    the piecewise closed-form strategies with normalizers c0, c1 = beta *
    zeta * c0.  The boundary randomization r_star defaults to 0 (boundary
    treated as acceptance).
    """
    if not (0.0 <= r_star <= 1.0):
        raise ValueError("r_star must lie in [0, 1]")
    beta = beta_from_spec(spec)
    if lam == math.inf:
        return _lam_inf_equilibrium(f0, f1, beta, r_star)
    if lam == 0.0:
        return _lam0_equilibrium(f0, f1, beta, r_star)
    if not (lam > 0 and math.isfinite(lam)):
        raise ValueError(f"lambda must be >= 0 or inf, got {lam!r}")

    _check_equal_support(f0, f1)
    sol = solve_zeta(f0, f1, beta, lam)
    zeta, regions = sol.zeta, sol.regions
    n = f0.space.size
    lr = likelihood_ratio(f1, f0)
    e = math.exp(-1.0 / lam)
    p = beta / (1.0 + beta)

    s0 = np.zeros(n)
    s1 = np.zeros(n)
    for i in regions.m0:
        s0[i] = f0.masses[i]
        s1[i] = f1.masses[i]
    for i in regions.m_star:
        geo = f1.masses[i] ** p * f0.masses[i] ** (1.0 - p)
        s0[i] = geo * zeta ** p
        s1[i] = geo * zeta ** (p - 1.0)
    for i in regions.m1:
        s0[i] = f0.masses[i]
        s1[i] = f1.masses[i] * e

    w = f0.space.weights
    c0 = 1.0 / float(np.dot(s0, w))
    c1 = beta * zeta * c0
    sigma0 = Pmf(f0.space, c0 * s0)
    sigma1 = normalize(c1 * s1, f1.space)  # exact renormalization of residual error

    rho0 = np.full(n, float("nan"))
    for i in regions.m_star:
        rho0[i] = (lam / (1.0 + beta)) * (math.log(lr[i]) + math.log(zeta))

    rule = _rule_from_regions(n, regions, r_star)
    p_f, p_d, p_cf = _profile_rates(rule, sigma0, sigma1, f1)
    return EquilibriumProfile(
        sigma0_star=sigma0, sigma1_star=sigma1, rule=rule, regions=regions,
        zeta=zeta, c0=c0, c1=c1, rho0=rho0, lam=lam, beta=beta, r_star=r_star,
        p_f_defacto=p_f, p_d_defacto=p_d, p_d_counterfactual=p_cf,
    )


def proactive_rates(profile: EquilibriumProfile, f1: Pmf) -> tuple[float, float, float]:
    """(P_F de facto, P_D de facto, P_D counterfactual) for a solved profile."""
    p_f, p_d, p_cf = _profile_rates(profile.rule, profile.sigma0_star,
                                    profile.sigma1_star, f1)
    return p_f, p_d, p_cf


@dataclass(frozen=True)
class ErocPoint:
    beta: float
    p_f: float
    p_d: float
    p_d_counterfactual: float
    ok: bool
    error: str = ""


def proactive_eroc(f0: Pmf, f1: Pmf, lam: float, beta_grid,
                   r_star: float = 0.0) -> list[ErocPoint]:
    """One equilibrium per beta; NoRoot points carry a failure marker."""
    grid = list(beta_grid)
    if any(b <= a for a, b in zip(grid, grid[1:])) or any(b <= 0 for b in grid):
        raise ValueError("beta grid must be positive and strictly increasing")
    out = []
    for beta in grid:
        try:
            eq = proactive_equilibrium(f0, f1, ThresholdSpec(beta=beta), lam, r_star)
            out.append(ErocPoint(float(beta), eq.p_f_defacto, eq.p_d_defacto,
                                 eq.p_d_counterfactual, True))
        except NoRootError as exc:
            out.append(ErocPoint(float(beta), float("nan"), float("nan"),
                                 float("nan"), False, str(exc)))
    return out
