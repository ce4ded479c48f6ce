"""Command-line interface: scenario configs in, deterministic CSV files out.

Commands:
  equilibrium   one-shot equilibrium of the configured detector
  eroc          operating curves for all three detectors over a grid
  sequential    per-stage rates of the repeated game, three detectors
  sweep         equilibrium strategy parameters over nominal-parameter grids
  oracle-check  brute-force certification report for the configured detector

Floats are serialized with 12 significant digits and rows are emitted in a
fixed order, so identical configs produce byte-identical files.  Every
command computes all rows before touching the filesystem; a failing run
leaves no partial output.

Exit codes: 0 success, 2 invalid config, 3 solver failure (no equilibrium
root, or the enumeration cap was exceeded).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .classical import rates, roc_curve
from .config import ScenarioConfig, load_config
from .errors import CapExceededError, ConfigError, NoRootError
from .oracle import grid_best_response_check
from .passive import passive_equilibrium
from .pmf import Pmf
from .proactive import (
    EquilibriumProfile,
    ThresholdSpec,
    beta_from_spec,
    proactive_equilibrium,
)
from .sequential import (
    forward_induction,
    nonadversarial_sequential_rates_beta,
    passive_sequential_rates_beta,
    sequential_rates,
)

COMMANDS = ("equilibrium", "eroc", "sequential", "sweep", "oracle-check")


def _fmt(x) -> str:
    v = float(x)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".12g")


def _write_csv(path: str, header: list[str], rows: list[list[str]]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _alpha_beta(cfg: ScenarioConfig, beta: float | None = None,
                alpha: float | None = None) -> tuple[float, float]:
    """Convert between the two threshold parameterizations using the priors."""
    ratio = cfg.prior0 / cfg.prior1
    if beta is not None:
        return 1.0 / (1.0 + beta / ratio), beta
    return alpha, ratio * (1.0 / alpha - 1.0)


def _require_threshold(cfg: ScenarioConfig) -> ThresholdSpec:
    if cfg.threshold is None:
        raise ConfigError("this command requires a 'threshold' entry")
    return cfg.threshold


def _region_labels(cfg: ScenarioConfig, regions) -> list[str]:
    out = ["dead"] * cfg.space.size
    for name, idx in (("M0", regions.m0), ("M*", regions.m_star), ("M1", regions.m1)):
        for i in idx:
            out[i] = name
    return out


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_equilibrium(cfg: ScenarioConfig, out_dir: str, _override) -> None:
    spec = _require_threshold(cfg)
    beta = beta_from_spec(spec)
    if cfg.detector == "passive":
        alpha, _ = _alpha_beta(cfg, beta=beta)
        eq = passive_equilibrium(cfg.f0, cfg.f1, alpha, cfg.lam)
        sigma0, sigma1, regions, rule = eq.sigma0_star, eq.sigma1_star, eq.regions, eq.rule
        _, p_cf = rates(rule, cfg.f0, cfg.f1)
        scalars = {"zeta": float("nan"), "c0": float("nan"), "c1": float("nan"),
                   "beta": beta, "lambda": cfg.lam, "pf": eq.p_f, "pd": eq.p_d,
                   "pd_counterfactual": p_cf}
    else:
        eq = proactive_equilibrium(cfg.f0, cfg.f1, spec, cfg.lam, cfg.r_star)
        sigma0, sigma1, regions, rule = eq.sigma0_star, eq.sigma1_star, eq.regions, eq.rule
        scalars = {"zeta": eq.zeta, "c0": eq.c0, "c1": eq.c1, "beta": eq.beta,
                   "lambda": cfg.lam, "pf": eq.p_f_defacto, "pd": eq.p_d_defacto,
                   "pd_counterfactual": eq.p_d_counterfactual}

    labels = _region_labels(cfg, regions)
    rows = []
    for i, name in enumerate(cfg.space.labels):
        rows.append([name, _fmt(cfg.f0.masses[i]), _fmt(cfg.f1.masses[i]),
                     _fmt(sigma0.masses[i]), _fmt(sigma1.masses[i]),
                     labels[i], _fmt(rule.accept_prob[i])])
    scalar_keys = ["zeta", "c0", "c1", "beta", "lambda", "pf", "pd", "pd_counterfactual"]

    _write_csv(os.path.join(out_dir, "equilibrium.csv"),
               ["message", "f0", "f1", "sigma0_star", "sigma1_star", "region", "rule"],
               rows)
    _write_csv(os.path.join(out_dir, "scalars.csv"), scalar_keys,
               [[_fmt(scalars[k]) for k in scalar_keys]])


def _cmd_eroc(cfg: ScenarioConfig, out_dir: str, override: int | None) -> None:
    if cfg.beta_grid is not None:
        betas = [float(b) for b in cfg.beta_grid.values(override)]
        alphas = [_alpha_beta(cfg, beta=b)[0] for b in betas]
    elif cfg.alpha_grid is not None:
        alphas = [float(a) for a in cfg.alpha_grid.values(override)]
        betas = [_alpha_beta(cfg, alpha=a)[1] for a in alphas]
    else:
        raise ConfigError("eroc requires 'beta_grid' or 'alpha_grid'")

    # the classical helper wants an increasing grid; rows keep config order
    na = {a: (pf, pd) for a, pf, pd in roc_curve(cfg.f0, cfg.f1, sorted(set(alphas)))}
    rows = []
    for a in alphas:
        pf, pd = na[a]
        rows.append(["nonadversarial", _fmt(a), _fmt(pf), _fmt(pd), _fmt(pd)])
    for a in alphas:
        eq = passive_equilibrium(cfg.f0, cfg.f1, a, cfg.lam)
        _, p_cf = rates(eq.rule, cfg.f0, cfg.f1)
        rows.append(["passive", _fmt(a), _fmt(eq.p_f), _fmt(eq.p_d), _fmt(p_cf)])
    for b in betas:
        try:
            eq = proactive_equilibrium(cfg.f0, cfg.f1, ThresholdSpec(beta=b),
                                       cfg.lam, cfg.r_star)
            rows.append(["proactive", _fmt(b), _fmt(eq.p_f_defacto),
                         _fmt(eq.p_d_defacto), _fmt(eq.p_d_counterfactual)])
        except NoRootError:
            nan = _fmt(float("nan"))
            rows.append(["proactive", _fmt(b), nan, nan, nan])

    _write_csv(os.path.join(out_dir, "eroc.csv"),
               ["detector", "param", "pf", "pd", "pd_counterfactual"], rows)


def _cmd_sequential(cfg: ScenarioConfig, out_dir: str, _override) -> None:
    spec = _require_threshold(cfg)
    beta = beta_from_spec(spec)
    na = nonadversarial_sequential_rates_beta(cfg.f0, cfg.f1, beta, cfg.stages,
                                              cfg.enumeration_cap)
    pas = passive_sequential_rates_beta(cfg.f0, cfg.f1, beta, cfg.lam, cfg.stages,
                                        cfg.enumeration_cap)
    tree = forward_induction(cfg.f0, cfg.f1, spec, cfg.lam, cfg.stages,
                             cfg.r_star, cfg.enumeration_cap,
                             cfg.prior0, cfg.prior1)
    pro = [sequential_rates(tree, j) for j in range(1, cfg.stages + 1)]

    rows = []
    for j in range(cfg.stages):
        for name, series in (("nonadversarial", na), ("passive", pas), ("proactive", pro)):
            pf, pd = series[j]
            rows.append([str(j + 1), name, _fmt(pf), _fmt(pd)])
    _write_csv(os.path.join(out_dir, "sequential.csv"),
               ["stage", "detector", "pf", "pd"], rows)


def _cmd_sweep(cfg: ScenarioConfig, out_dir: str, override: int | None) -> None:
    spec = _require_threshold(cfg)
    if cfg.theta0_grid is None or cfg.theta1_grid is None:
        raise ConfigError("sweep requires 'theta0_grid' and 'theta1_grid'")
    if cfg.space.size != 2:
        raise ConfigError("sweep requires a two-message space")
    for key, grid in (("theta0_grid", cfg.theta0_grid), ("theta1_grid", cfg.theta1_grid)):
        if grid.max >= 1:
            raise ConfigError(f"'{key}.max' must be < 1 (Bernoulli parameter)")

    w = cfg.space.weights
    nan = _fmt(float("nan"))
    rows = []
    for t0 in cfg.theta0_grid.values(override):
        f0 = Pmf(cfg.space, [(1.0 - t0) / w[0], t0 / w[1]])
        for t1 in cfg.theta1_grid.values(override):
            f1 = Pmf(cfg.space, [(1.0 - t1) / w[0], t1 / w[1]])
            try:
                eq = proactive_equilibrium(f0, f1, spec, cfg.lam, cfg.r_star)
                t0_bar = eq.sigma0_star.masses[1] * w[1]
                t1_bar = eq.sigma1_star.masses[1] * w[1]
                rows.append([_fmt(t0), _fmt(t1), _fmt(t0_bar), _fmt(t1_bar),
                             _fmt(eq.zeta), "ok"])
            except NoRootError:
                rows.append([_fmt(t0), _fmt(t1), nan, nan, nan, "no_root"])
    _write_csv(os.path.join(out_dir, "sweep.csv"),
               ["theta0", "theta1", "theta0_bar", "theta1_bar", "zeta", "status"], rows)


def _cmd_oracle_check(cfg: ScenarioConfig, out_dir: str, _override) -> None:
    spec = _require_threshold(cfg)
    beta = beta_from_spec(spec)
    if cfg.detector == "passive":
        alpha, _ = _alpha_beta(cfg, beta=beta)
        profile = passive_equilibrium(cfg.f0, cfg.f1, alpha, cfg.lam)
    else:
        profile = proactive_equilibrium(cfg.f0, cfg.f1, spec, cfg.lam, cfg.r_star)
    report = grid_best_response_check(profile, cfg.f0, cfg.f1, cfg.lam, cfg.oracle_step)

    q0, q1 = report.best_grid_point
    row = [_fmt(report.objective_at_solution), _fmt(report.best_grid_objective),
           _fmt(report.improvement), _fmt(report.grid_step), str(report.evaluations),
           _fmt(report.kkt_stationarity_residual), _fmt(report.kkt_slackness_residual),
           _fmt(report.kkt_scaling_residual),
           "|".join(_fmt(x) for x in q0.masses),
           "|".join(_fmt(x) for x in q1.masses)]
    _write_csv(os.path.join(out_dir, "oracle.csv"),
               ["objective_at_solution", "best_grid_objective", "improvement",
                "grid_step", "evaluations", "kkt_stationarity_residual",
                "kkt_slackness_residual", "kkt_scaling_residual",
                "best_sigma0", "best_sigma1"],
               [row])


_DISPATCH = {
    "equilibrium": _cmd_equilibrium,
    "eroc": _cmd_eroc,
    "sequential": _cmd_sequential,
    "sweep": _cmd_sweep,
    "oracle-check": _cmd_oracle_check,
}


def _error_line(kind: str, exc: Exception) -> None:
    print(json.dumps({"error": kind, "message": str(exc)}), file=sys.stderr)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="npgame",
        description="equilibrium solvers for adversarial hypothesis testing",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to a JSON scenario file")
    parser.add_argument("--out", required=True, help="output directory for CSV files")
    parser.add_argument("--grid-override", type=int, default=None, metavar="N",
                        help="override the point count of every sweep grid")
    args = parser.parse_args(argv)

    if args.grid_override is not None and args.grid_override < 1:
        _error_line("ConfigInvalid", ValueError("--grid-override must be >= 1"))
        return 2

    try:
        cfg = load_config(args.config)
        os.makedirs(args.out, exist_ok=True)
        _DISPATCH[args.command](cfg, args.out, args.grid_override)
    except ConfigError as exc:
        _error_line("ConfigInvalid", exc)
        return 2
    except NoRootError as exc:
        _error_line("NoRoot", exc)
        return 3
    except CapExceededError as exc:
        _error_line("CapExceeded", exc)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
