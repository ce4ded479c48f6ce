"""Brute-force certification of equilibria on small message spaces.

Independent of the solver modules' algebra: evaluates the exact potential
objective on a dense product of probability-simplex grids and reports the
gap between the closed-form solution and the best grid point.  The
candidate set always includes the solution itself, so improvement
(solution value minus best candidate value) is nonnegative; a certified
equilibrium keeps it below the grid-resolution bound.

Also checks the first-order conditions at the solution: stationarity of
the active-set Lagrangian by central finite differences, the binding
constraint sigma1 = beta * sigma0 on the boundary region, and the scaling
relation c1 = beta * zeta * c0.

All grid work happens in probability-content space q(m) = sigma(m) * w(m),
where normalization is sum(q) = 1 and KL(sigma || f) = sum q ln(q / F)
with F = f * w.  Region membership is content-invariant: sigma1 > beta *
sigma0 iff q1 > beta * q0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iter_product

import numpy as np

from .errors import SpaceTooLargeError
from .passive import PassiveEquilibrium
from .pmf import Pmf, kl_divergence
from .proactive import EquilibriumProfile

KKT_FD_STEP = 1e-6
KKT_TOL = 1e-4
_REGION_RTOL = 1e-9


@dataclass(frozen=True)
class OracleReport:
    objective_at_solution: float
    best_grid_objective: float
    best_grid_point: tuple[Pmf, Pmf]
    improvement: float  # objective_at_solution - best_grid_objective, >= 0
    grid_step: float
    evaluations: int
    kkt_stationarity_residual: float
    kkt_slackness_residual: float
    kkt_scaling_residual: float


def _penalized_kl(lam: float, kl: float) -> float:
    if lam == math.inf:
        return 0.0 if kl <= 1e-12 else math.inf
    return lam * kl


def _induced_accept(sigma0: Pmf, sigma1: Pmf, beta: float, r_star: float) -> np.ndarray:
    """Detector response to a conjectured pair: reject where sigma1 > beta*sigma0."""
    s0 = beta * sigma0.masses
    s1 = sigma1.masses
    scale = np.maximum(np.maximum(np.abs(s0), np.abs(s1)), 1e-300)
    accept = np.where(s1 > s0 + _REGION_RTOL * scale, 1.0, 0.0)
    tied = np.abs(s1 - s0) <= _REGION_RTOL * scale
    accept[tied] = r_star
    return accept


def potential_value(sigma0: Pmf, sigma1: Pmf, f0: Pmf, f1: Pmf, lam: float, *,
                    rule=None, beta: float | None = None,
                    r_star: float = 0.0) -> float:
    """Attacker's potential: rejection mass of sigma1 plus distortion penalties.

    Exactly one of `rule` (fixed detector, the naive-detector game) or
    `beta` (detector best-responds to the conjectured pair) must be given.
    """
    if (rule is None) == (beta is None):
        raise ValueError("pass exactly one of rule= or beta=")
    accept = rule.accept_prob if rule is not None else _induced_accept(
        sigma0, sigma1, beta, r_star)
    rejection_mass = float(np.dot(accept, sigma1.weighted()))
    return (rejection_mass
            + _penalized_kl(lam, kl_divergence(sigma1, f1))
            + _penalized_kl(lam, kl_divergence(sigma0, f0)))


# ---------------------------------------------------------------------------
# simplex grids in content space
# ---------------------------------------------------------------------------

def _simplex_grid(n: int, step: float) -> np.ndarray:
    """All content vectors q >= 0 with sum 1 whose entries are multiples of step."""
    k = round(1.0 / step)
    if abs(k * step - 1.0) > 1e-9:
        raise ValueError("step must evenly divide 1")
    if n == 1:
        return np.ones((1, 1))
    rows = []
    if n == 2:
        for a in range(k + 1):
            rows.append((a, k - a))
    else:
        for combo in iter_product(range(k + 1), repeat=n - 1):
            rest = k - sum(combo)
            if rest >= 0:
                rows.append(combo + (rest,))
    return np.asarray(rows, dtype=float) / k


def _grid_kl(q: np.ndarray, f_content: np.ndarray) -> np.ndarray:
    """Row-wise KL of content grids against a reference content vector.

    Rows placing mass outside the reference support get +inf (they can
    never be best responses under a finite penalty weight).
    """
    out = np.zeros(q.shape[0])
    dead = f_content <= 0
    if np.any(dead):
        out[np.any(q[:, dead] > 0, axis=1)] = math.inf
    live = ~dead
    ql = q[:, live]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(ql > 0, ql * np.log(ql / f_content[live]), 0.0)
    out += np.where(np.isfinite(out), terms.sum(axis=1), 0.0)
    return out


def _content_to_pmf(q: np.ndarray, space) -> Pmf:
    return Pmf(space, q / space.weights)


def grid_best_response_check(profile, f0: Pmf, f1: Pmf, lam: float,
                             step: float = 1e-3) -> OracleReport:
    """Certify a solver output as a global minimum of its potential.

    Accepts either game's equilibrium object.  The candidate set is the
    full product of the two simplex grids plus the solution pair itself.
    First-order checks run only for finite positive lambda; the residual
    fields are 0 otherwise.
    """
    space = f0.space
    n_live = len(set(f0.support) | set(f1.support))
    if n_live > 3:
        raise SpaceTooLargeError(
            f"grid certification supports at most 3 live messages, got {n_live}"
        )
    n = space.size

    passive = isinstance(profile, PassiveEquilibrium)
    if passive:
        accept_fixed = profile.rule.accept_prob
        beta = None
        r_star = 0.0
    else:
        beta = profile.beta
        r_star = profile.r_star
        accept_fixed = None

    F0 = f0.weighted()
    F1 = f1.weighted()
    grid = _simplex_grid(n, step)
    kl0 = _grid_kl(grid, F0)
    kl1 = _grid_kl(grid, F1)
    pen0 = np.array([_penalized_kl(lam, v) for v in kl0])
    pen1 = np.array([_penalized_kl(lam, v) for v in kl1])

    if passive:
        # the objective separates, so the joint product-grid minimum is the
        # sum of the two marginal minima
        obj1 = grid @ accept_fixed + pen1
        i1 = int(np.argmin(obj1))
        i0 = int(np.argmin(pen0))
        best_val = float(pen0[i0] + obj1[i1])
        best_q0, best_q1 = grid[i0], grid[i1]
    else:
        # detector responds per pair: q1-mass of {q1 > beta*q0} plus ties
        finite0 = np.isfinite(pen0)
        finite1 = np.isfinite(pen1)
        g0 = grid[finite0]
        g1 = grid[finite1]
        p0 = pen0[finite0]
        p1 = pen1[finite1]
        best_val = math.inf
        best_q0 = best_q1 = None
        # chunk over sigma0 rows to bound the broadcast size
        chunk = max(1, int(1e6 // max(len(g1), 1)))
        for lo in range(0, len(g0), chunk):
            q0c = g0[lo:lo + chunk]  # (c, n)
            b0 = beta * q0c[:, None, :]  # (c, 1, n)
            q1b = g1[None, :, :]  # (1, G1, n)
            scale = np.maximum(np.maximum(b0, q1b), 1e-300)
            strict = q1b > b0 + _REGION_RTOL * scale
            tied = np.abs(q1b - b0) <= _REGION_RTOL * scale
            rej = (q1b * (strict + r_star * tied)).sum(axis=2)  # (c, G1)
            vals = rej + p1[None, :] + p0[lo:lo + chunk, None]
            flat = int(np.argmin(vals))
            v = float(vals.flat[flat])
            if v < best_val:
                best_val = v
                best_q0 = q0c[flat // len(g1)]
                best_q1 = g1[flat % len(g1)]
        if best_q0 is None:  # every grid row violated a support constraint
            best_q0, best_q1 = f0.weighted(), f1.weighted()
            best_val = math.inf

    if passive:
        sol_val = potential_value(profile.sigma0_star, profile.sigma1_star,
                                  f0, f1, lam, rule=profile.rule)
    else:
        sol_val = potential_value(profile.sigma0_star, profile.sigma1_star,
                                  f0, f1, lam, beta=beta, r_star=r_star)
    if sol_val <= best_val:
        best_val = sol_val
        best_q0 = profile.sigma0_star.weighted()
        best_q1 = profile.sigma1_star.weighted()

    stat = slack = scaling = 0.0
    if 0.0 < lam < math.inf:
        stat = _stationarity_residual(profile, f0, f1, lam)
        if not passive:
            s0 = profile.sigma0_star.masses
            s1 = profile.sigma1_star.masses
            slack = max((abs(s1[m] - beta * s0[m]) for m in profile.regions.m_star),
                        default=0.0)
            scaling = abs(profile.c1 - beta * profile.zeta * profile.c0)

    return OracleReport(
        objective_at_solution=sol_val,
        best_grid_objective=best_val,
        best_grid_point=(_content_to_pmf(best_q0, space), _content_to_pmf(best_q1, space)),
        improvement=sol_val - best_val,
        grid_step=step,
        evaluations=len(grid) ** 2 + 1,
        kkt_stationarity_residual=stat,
        kkt_slackness_residual=slack,
        kkt_scaling_residual=scaling,
    )


# ---------------------------------------------------------------------------
# first-order conditions
# ---------------------------------------------------------------------------

def _stationarity_residual(profile, f0: Pmf, f1: Pmf, lam: float) -> float:
    """Max |dL/d sigma| over live coordinates, by central finite differences.

    The Lagrangian fixes the solution's region partition (active set) and
    uses the closed-form multipliers: gamma_i = -lam*(ln c_i + 1) for the
    normalization constraints and the boundary multiplier stored on the
    profile for the binding constraint sigma1 = beta*sigma0.
    """
    w = f0.space.weights
    passive = isinstance(profile, PassiveEquilibrium)
    regions = profile.regions
    accept = profile.rule.accept_prob
    s0 = profile.sigma0_star.masses.copy()
    s1 = profile.sigma1_star.masses.copy()
    m1 = set(regions.m1)
    m_star = set(regions.m_star)

    if passive:
        # sigma0* = f0, sigma1* = f1 * factor / D; c0 = 1, c1 = 1/D
        c0 = 1.0
        on_m1 = next(iter(m1), None)
        if on_m1 is not None:
            c1 = s1[on_m1] / (f1.masses[on_m1] * math.exp(-1.0 / lam))
        else:
            any_live = f1.support[0]
            c1 = s1[any_live] / f1.masses[any_live]
        rho = np.zeros(f0.space.size)
        beta = None
    else:
        c0, c1, beta = profile.c0, profile.c1, profile.beta
        rho = np.nan_to_num(profile.rho0, nan=0.0)

    gamma0 = -lam * (math.log(c0) + 1.0)
    gamma1 = -lam * (math.log(c1) + 1.0)

    def lagrangian(v0: np.ndarray, v1: np.ndarray) -> float:
        val = float(np.dot(accept, v1 * w))
        for f, v, gamma in ((f1.masses, v1, gamma1), (f0.masses, v0, gamma0)):
            pos = v > 0
            val += lam * float(np.sum(v[pos] * np.log(v[pos] / f[pos]) * w[pos]))
            val += gamma * (float(np.dot(v, w)) - 1.0)
        if not passive:
            for m in m_star:
                val += rho[m] * (v1[m] - beta * v0[m]) * w[m]
        return val

    h = KKT_FD_STEP
    worst = 0.0
    for m in sorted(set(f0.support) | set(f1.support)):
        for v in (s0, s1):
            if v[m] <= h:  # log derivative blows up at the simplex boundary
                continue
            keep = v[m]
            v[m] = keep + h
            up = lagrangian(s0, s1)
            v[m] = keep - h
            down = lagrangian(s0, s1)
            v[m] = keep
            worst = max(worst, abs((up - down) / (2.0 * h * w[m])))
    return worst


def certify(profile, f0: Pmf, f1: Pmf, lam: float, step: float = 1e-3,
            tol: float = 1e-6) -> OracleReport:
    """Run the grid check and raise if the solution is not a grid minimum."""
    report = grid_best_response_check(profile, f0, f1, lam, step)
    if report.improvement > tol:
        raise AssertionError(
            f"grid search improved the objective by {report.improvement:.3e}"
        )
    return report
