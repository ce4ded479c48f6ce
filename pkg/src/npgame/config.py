"""Declarative JSON scenario configs for the command-line interface.

A scenario file describes the message space, the two nominal densities,
the attacker's distortion weight lambda, the detector threshold (either
beta directly or alpha with priors), and optional sweep grids.  Validation
raises ConfigError with a message naming the offending key.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .pmf import MessageSpace, Pmf
from .proactive import ThresholdSpec


@dataclass(frozen=True)
class GridSpec:
    count: int
    min: float
    max: float
    spacing: str = "linear"  # or "log"

    def values(self, override_count: int | None = None) -> np.ndarray:
        n = override_count if override_count is not None else self.count
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, n)
        return np.linspace(self.min, self.max, n)


@dataclass(frozen=True)
class ScenarioConfig:
    space: MessageSpace
    f0: Pmf
    f1: Pmf
    lam: float
    threshold: ThresholdSpec | None
    detector: str = "proactive"  # equilibrium / oracle-check target
    stages: int = 1
    beta_grid: GridSpec | None = None
    alpha_grid: GridSpec | None = None
    theta0_grid: GridSpec | None = None
    theta1_grid: GridSpec | None = None
    r_star: float = 0.0
    enumeration_cap: int = 10 ** 6
    oracle_step: float = 1e-3
    prior0: float = 0.5

    @property
    def prior1(self) -> float:
        return 1.0 - self.prior0


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _scalar(raw, key: str, *, allow_inf: bool = False) -> float:
    if allow_inf and raw == "inf":
        return math.inf
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"'{key}' must be a number, got {raw!r}")
    v = float(raw)
    if not math.isfinite(v):
        raise ConfigError(f"'{key}' must be finite, got {raw!r}")
    return v


def _grid(raw, key: str) -> GridSpec:
    _require(isinstance(raw, dict), f"'{key}' must be an object")
    for k in ("count", "min", "max"):
        _require(k in raw, f"'{key}.{k}' is required")
    count = raw["count"]
    _require(isinstance(count, int) and count >= 1, f"'{key}.count' must be a positive integer")
    lo = _scalar(raw["min"], f"{key}.min")
    hi = _scalar(raw["max"], f"{key}.max")
    _require(0 < lo <= hi, f"'{key}' bounds must satisfy 0 < min <= max")
    spacing = raw.get("spacing", "linear")
    _require(spacing in ("linear", "log"), f"'{key}.spacing' must be linear or log")
    extra = set(raw) - {"count", "min", "max", "spacing"}
    _require(not extra, f"unknown keys in '{key}': {sorted(extra)}")
    return GridSpec(count=count, min=lo, max=hi, spacing=spacing)


_KNOWN_KEYS = {
    "space", "weights", "f0", "f1", "lambda", "threshold", "detector",
    "stages", "beta_grid", "alpha_grid", "theta0_grid", "theta1_grid",
    "r_star", "enumeration_cap", "oracle_step",
}


def load_config(path: str) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    return parse_config(raw)


def parse_config(raw: dict) -> ScenarioConfig:
    _require(isinstance(raw, dict), "config root must be an object")
    extra = set(raw) - _KNOWN_KEYS
    _require(not extra, f"unknown config keys: {sorted(extra)}")
    for k in ("space", "f0", "f1", "lambda"):
        _require(k in raw, f"'{k}' is required")

    labels = raw["space"]
    _require(isinstance(labels, list) and labels, "'space' must be a nonempty list of labels")
    weights = raw.get("weights")
    if weights is not None:
        _require(isinstance(weights, list) and len(weights) == len(labels),
                 "'weights' must align with 'space'")
    try:
        space = MessageSpace(tuple(str(x) for x in labels),
                             None if weights is None else np.asarray(weights, float))
    except ValueError as exc:
        raise ConfigError(str(exc))

    def pmf(key: str) -> Pmf:
        v = raw[key]
        _require(isinstance(v, list), f"'{key}' must be a list")
        _require(len(v) == space.size, f"'{key}' length must match 'space'")
        try:
            return Pmf(space, np.asarray([_scalar(x, key) for x in v]))
        except Exception as exc:
            raise ConfigError(f"'{key}': {exc}")

    f0 = pmf("f0")
    f1 = pmf("f1")

    lam_raw = raw["lambda"]
    lam = math.inf if lam_raw == "inf" else _scalar(lam_raw, "lambda")
    _require(lam >= 0, "'lambda' must be >= 0 or \"inf\"")

    prior0 = 0.5
    threshold = None
    if "threshold" in raw:
        t = raw["threshold"]
        _require(isinstance(t, dict), "'threshold' must be an object")
        has_beta = "beta" in t
        has_alpha = "alpha" in t
        _require(has_beta != has_alpha, "'threshold' needs exactly one of beta or alpha")
        if has_beta:
            _require(set(t) == {"beta"}, "'threshold' with beta takes no other keys")
            beta = _scalar(t["beta"], "threshold.beta")
            _require(beta > 0, "'threshold.beta' must be positive")
            threshold = ThresholdSpec(beta=beta)
        else:
            _require(set(t) <= {"alpha", "prior0"}, "unknown keys in 'threshold'")
            alpha = _scalar(t["alpha"], "threshold.alpha")
            _require(0 < alpha < 1, "'threshold.alpha' must lie in (0, 1)")
            prior0 = _scalar(t.get("prior0", 0.5), "threshold.prior0")
            _require(0 < prior0 < 1, "'threshold.prior0' must lie in (0, 1)")
            threshold = ThresholdSpec(alpha=alpha, prior0=prior0, prior1=1.0 - prior0)

    detector = raw.get("detector", "proactive")
    _require(detector in ("passive", "proactive"),
             "'detector' must be passive or proactive")

    stages = raw.get("stages", 1)
    _require(isinstance(stages, int) and stages >= 1, "'stages' must be an integer >= 1")

    r_star = _scalar(raw.get("r_star", 0.0), "r_star")
    _require(0.0 <= r_star <= 1.0, "'r_star' must lie in [0, 1]")

    cap = raw.get("enumeration_cap", 10 ** 6)
    _require(isinstance(cap, int) and cap >= 1, "'enumeration_cap' must be a positive integer")

    step = _scalar(raw.get("oracle_step", 1e-3), "oracle_step")
    _require(0 < step <= 0.5, "'oracle_step' must lie in (0, 0.5]")

    grids = {}
    for key in ("beta_grid", "alpha_grid", "theta0_grid", "theta1_grid"):
        grids[key] = _grid(raw[key], key) if key in raw else None
    _require(not (grids["beta_grid"] and grids["alpha_grid"]),
             "give at most one of 'beta_grid' and 'alpha_grid'")
    if grids["alpha_grid"] is not None:
        _require(grids["alpha_grid"].max < 1, "'alpha_grid.max' must be < 1")

    return ScenarioConfig(
        space=space, f0=f0, f1=f1, lam=lam, threshold=threshold,
        detector=detector, stages=stages,
        beta_grid=grids["beta_grid"], alpha_grid=grids["alpha_grid"],
        theta0_grid=grids["theta0_grid"], theta1_grid=grids["theta1_grid"],
        r_star=r_star, enumeration_cap=cap, oracle_step=step, prior0=prior0,
    )
