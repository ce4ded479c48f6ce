"""Repeated-observation games: forward-induction equilibria and exact stage rates.

The proactive detector's multi-stage equilibrium is a history tree: each
node carries the effective stage threshold

    beta_j = beta * prod_{k<j} sigma0_k(m_k) / sigma1_k(m_k)

and the single-stage equilibrium solved at that threshold.  Rates are exact
sums of path-product masses (no sampling).

Two families of baselines are provided for the passive and non-adversarial
detectors:

  * size-alpha: the randomized NP test of exact size alpha on the product
    nominal likelihood ratio (so P_F is alpha at every stage);
  * fixed-beta: the product likelihood ratio thresholded against a constant
    beta, which is the rule whose false-alarm rate decays to zero and is
    comparable to the proactive detector's constant initial threshold.

In the fixed-beta passive game the attacker best-responds on the whole
j-sample product space (the rejection region is not a product set, so an
i.i.d. replay cannot be a best response there); in the size-alpha variant
he replays the single-stage Stackelberg equilibrium i.i.d. per stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .classical import np_rule
from .errors import CapExceededError
from .passive import _distortion_factor, passive_equilibrium
from .pmf import Pmf, likelihood_ratio
from .proactive import EquilibriumProfile, ThresholdSpec, beta_from_spec, proactive_equilibrium

DEFAULT_ENUMERATION_CAP = 10 ** 6

#: relative tolerance when clustering product likelihood-ratio values
_CLUSTER_RTOL = 1e-9


@dataclass(eq=False)
class HistoryNode:
    """Stage-j state after observing the messages in message_path (length j-1)."""

    depth: int  # stage index j, 1-based
    message_path: tuple[int, ...]
    beta_j: float
    profile: EquilibriumProfile
    posterior: tuple[float, float]  # (p(H0 | path), p(H1 | path))
    children: dict[int, "HistoryNode"] = field(default_factory=dict)

    @property
    def zeta_j(self) -> float:
        return self.profile.zeta

    @property
    def stage_sigma0(self) -> Pmf:
        return self.profile.sigma0_star

    @property
    def stage_sigma1(self) -> Pmf:
        return self.profile.sigma1_star

    @property
    def stage_rule(self):
        return self.profile.rule


@dataclass(eq=False)
class HistoryTree:
    root: HistoryNode
    stages: int
    f0: Pmf
    f1: Pmf
    lam: float
    beta: float
    prior0: float
    prior1: float

    def nodes_at(self, depth: int):
        """All stage-`depth` nodes, in deterministic path order."""
        level = [self.root]
        for _ in range(depth - 1):
            level = [child for node in level for _, child in sorted(node.children.items())]
        return level


def forward_induction(f0: Pmf, f1: Pmf, spec: ThresholdSpec, lam: float,
                      stages: int, r_star: float = 0.0,
                      enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
                      prior0: float = 0.5, prior1: float = 0.5) -> HistoryTree:
    """Build the s-PBNE history tree of the repeated proactive game.

    The per-stage base threshold is held constant at beta; beta_j follows
    the threshold recursion.  Stage equilibria are memoized on beta_j, so
    histories reaching the same effective threshold share one solve.
    """
    if stages < 1:
        raise ValueError("stages must be >= 1")
    beta = beta_from_spec(spec)
    live = f0.support
    if len(live) ** stages > enumeration_cap:
        raise CapExceededError(
            f"{len(live)}^{stages} paths exceed the cap of {enumeration_cap}"
        )

    cache: dict[float, EquilibriumProfile] = {}

    def stage_profile(beta_j: float) -> EquilibriumProfile:
        prof = cache.get(beta_j)
        if prof is None:
            prof = proactive_equilibrium(f0, f1, ThresholdSpec(beta=beta_j), lam, r_star)
            cache[beta_j] = prof
        return prof

    def build(depth: int, path: tuple[int, ...], beta_j: float,
              post: tuple[float, float]) -> HistoryNode:
        if not (math.isfinite(beta_j) and beta_j > 0):
            raise ValueError(
                f"stage threshold degenerated to {beta_j!r} after history {path}"
            )
        node = HistoryNode(depth=depth, message_path=path, beta_j=beta_j,
                           profile=stage_profile(beta_j), posterior=post)
        if depth < stages:
            s0 = node.profile.sigma0_star.masses
            s1 = node.profile.sigma1_star.masses
            p0, p1 = post
            for m in live:
                den = p0 * s0[m] + p1 * s1[m]
                child_post = (p0 * s0[m] / den, p1 * s1[m] / den) if den > 0 else (p0, p1)
                node.children[m] = build(
                    depth + 1, path + (m,), beta_j * s0[m] / s1[m], child_post
                )
        return node

    root = build(1, (), beta, (prior0, prior1))
    return HistoryTree(root=root, stages=stages, f0=f0, f1=f1, lam=lam,
                       beta=beta, prior0=prior0, prior1=prior1)


def sequential_rates(tree: HistoryTree, j: int) -> tuple[float, float]:
    """Exact (P_F, P_D) of the proactive detector's stage-j decision."""
    if not (1 <= j <= tree.stages):
        raise ValueError(f"stage index must lie in [1, {tree.stages}]")
    w = tree.f0.space.weights
    p_f = 0.0
    p_d = 0.0

    def walk(node: HistoryNode, prod0: float, prod1: float) -> None:
        nonlocal p_f, p_d
        if node.depth == j:
            a = node.profile.rule.accept_prob
            s0 = node.profile.sigma0_star.masses
            s1 = node.profile.sigma1_star.masses
            for m in tree.f0.support:
                p_f += prod0 * s0[m] * w[m] * a[m]
                p_d += prod1 * s1[m] * w[m] * a[m]
            return
        s0 = node.profile.sigma0_star.masses
        s1 = node.profile.sigma1_star.masses
        for m, child in node.children.items():
            walk(child, prod0 * s0[m] * w[m], prod1 * s1[m] * w[m])

    walk(tree.root, 1.0, 1.0)
    return p_f, p_d


# ---------------------------------------------------------------------------
# product-space machinery for the baseline detectors
# ---------------------------------------------------------------------------

def _product_clusters(log_lr: np.ndarray, per_msg: list[np.ndarray],
                      live, stages: int, cap: int) -> list[tuple[float, np.ndarray]]:
    """Exact convolution of per-message statistics, clustered by summed log-LR.

    Returns (log_lr_sum, totals) pairs sorted ascending, where totals
    accumulates the product masses of every column in per_msg.
    """
    if len(live) ** stages > cap:
        raise CapExceededError(
            f"{len(live)}^{stages} paths exceed the cap of {cap}"
        )
    k = len(per_msg)
    clusters: list[tuple[float, np.ndarray]] = [(0.0, np.ones(k))]
    for _ in range(stages):
        nxt: list[tuple[float, np.ndarray]] = []
        for key, vals in clusters:
            for m in live:
                nxt.append((key + log_lr[m], vals * np.array([col[m] for col in per_msg])))
        nxt.sort(key=lambda kv: kv[0])
        merged: list[tuple[float, np.ndarray]] = []
        for key, vals in nxt:
            if merged and abs(key - merged[-1][0]) <= _CLUSTER_RTOL * max(abs(key), 1.0):
                merged[-1] = (merged[-1][0], merged[-1][1] + vals)
            else:
                merged.append((key, vals.copy()))
        clusters = merged
    return clusters


def _size_alpha_product_rates(clusters, alpha: float,
                              eval_cols: tuple[int, int]) -> tuple[float, float]:
    """Randomized exact-size test on clustered product statistics.

    Column 0 of each cluster must be the nominal f0 product mass used to
    set the size; eval_cols selects the columns the rates are taken under.
    """
    desc = sorted(clusters, key=lambda kv: -kv[0])
    strict = 0.0
    p_f = p_d = 0.0
    i0, i1 = eval_cols
    for _, vals in desc:
        if strict + vals[0] <= alpha + 1e-15:
            strict += vals[0]
            p_f += vals[i0]
            p_d += vals[i1]
        else:
            r = (alpha - strict) / vals[0]
            p_f += r * vals[i0]
            p_d += r * vals[i1]
            break
    return p_f, p_d


def nonadversarial_sequential_rates(f0: Pmf, f1: Pmf, alpha: float, stages: int,
                                    cap: int = DEFAULT_ENUMERATION_CAP
                                    ) -> list[tuple[float, float]]:
    """Per-stage exact-size NP rates on untainted products; P_F = alpha at every stage."""
    rule, _ = np_rule(f0, f1, alpha)  # validates support and alpha
    del rule
    log_lr = np.log(likelihood_ratio(f1, f0))
    live = f0.support
    w0 = f0.weighted()
    w1 = f1.weighted()
    out = []
    for j in range(1, stages + 1):
        clusters = _product_clusters(log_lr, [w0, w1], live, j, cap)
        out.append(_size_alpha_product_rates(clusters, alpha, (0, 1)))
    return out


def passive_sequential_rates(f0: Pmf, f1: Pmf, alpha: float, lam: float, stages: int,
                             cap: int = DEFAULT_ENUMERATION_CAP
                             ) -> list[tuple[float, float]]:
    """Per-stage rates of the size-alpha passive detector, i.i.d. attacker replay."""
    eq = passive_equilibrium(f0, f1, alpha, lam)
    log_lr = np.log(likelihood_ratio(f1, f0))
    live = f0.support
    cols = [f0.weighted(), eq.sigma0_star.weighted(), eq.sigma1_star.weighted()]
    out = []
    for j in range(1, stages + 1):
        clusters = _product_clusters(log_lr, cols, live, j, cap)
        out.append(_size_alpha_product_rates(clusters, alpha, (1, 2)))
    return out


def _fixed_beta_rejection(clusters, beta: float, cols: tuple[int, ...]):
    """Total mass of the selected columns on {product LR > beta}."""
    log_beta = math.log(beta)
    totals = [0.0 for _ in cols]
    for key, vals in clusters:
        if key > log_beta + _CLUSTER_RTOL:
            for t, c in enumerate(cols):
                totals[t] += vals[c]
    return totals


def nonadversarial_sequential_rates_beta(f0: Pmf, f1: Pmf, beta: float, stages: int,
                                         cap: int = DEFAULT_ENUMERATION_CAP
                                         ) -> list[tuple[float, float]]:
    """Per-stage rates of the fixed-threshold test (product LR > beta) on untainted f's."""
    log_lr = np.log(likelihood_ratio(f1, f0))
    live = f0.support
    w0, w1 = f0.weighted(), f1.weighted()
    out = []
    for j in range(1, stages + 1):
        clusters = _product_clusters(log_lr, [w0, w1], live, j, cap)
        p_f, p_d = _fixed_beta_rejection(clusters, beta, (0, 1))
        out.append((p_f, p_d))
    return out


def passive_sequential_rates_beta(f0: Pmf, f1: Pmf, beta: float, lam: float, stages: int,
                                  cap: int = DEFAULT_ENUMERATION_CAP
                                  ) -> list[tuple[float, float]]:
    """Fixed-threshold passive game with the attacker best-responding per horizon.

    At horizon j the rejection region is {prod LR > beta} in the j-sample
    product space; the attacker's best response suppresses it by a single
    factor exp(-1/lambda) and renormalizes (the product-space analogue of
    the one-shot Stackelberg solution), so

        P_D = e*q / (e*q + 1 - q),   P_F = F0-mass of the region,

    with q the untainted f1-mass of the region and e = exp(-1/lambda).
    """
    e = _distortion_factor(lam)
    log_lr = np.log(likelihood_ratio(f1, f0))
    live = f0.support
    w0, w1 = f0.weighted(), f1.weighted()
    out = []
    for j in range(1, stages + 1):
        clusters = _product_clusters(log_lr, [w0, w1], live, j, cap)
        p_f, q = _fixed_beta_rejection(clusters, beta, (0, 1))
        den = e * q + (1.0 - q)
        p_d = e * q / den if den > 0 else 1.0
        out.append((p_f, p_d))
    return out
