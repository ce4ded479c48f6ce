"""Equilibrium solvers for hypothesis testing against strategic evasion.

Three detector models on finite message spaces: the classical randomized
likelihood-ratio test, a naive detector facing a distortion-penalized
attacker, and an evasion-aware detector whose threshold anticipates the
attacker's best response.  Repeated-observation variants, operating
curves, and a brute-force certification oracle round out the toolkit.
"""

from .classical import (
    DecisionRule,
    RegionPartition,
    np_rule,
    rates,
    roc_curve,
)
from .config import GridSpec, ScenarioConfig, load_config, parse_config
from .errors import (
    AllZeroError,
    CapExceededError,
    ConfigError,
    InvalidAlphaError,
    InvalidPriorError,
    NegativeMassError,
    NoRootError,
    NpgameError,
    SpaceTooLargeError,
    SupportMismatchError,
    SupportViolationError,
)
from .oracle import OracleReport, certify, grid_best_response_check, potential_value
from .passive import PassiveEquilibrium, passive_equilibrium, passive_eroc
from .pmf import (
    MessageSpace,
    Pmf,
    kl_divergence,
    likelihood_ratio,
    live_messages,
    normalize,
)
from .proactive import (
    EquilibriumProfile,
    ErocPoint,
    ThresholdSpec,
    ZetaResult,
    beta_from_spec,
    posterior,
    proactive_equilibrium,
    proactive_eroc,
    proactive_rates,
    solve_zeta,
)
from .sequential import (
    HistoryNode,
    HistoryTree,
    forward_induction,
    nonadversarial_sequential_rates,
    nonadversarial_sequential_rates_beta,
    passive_sequential_rates,
    passive_sequential_rates_beta,
    sequential_rates,
)

__version__ = "1.0.0"

__all__ = [
    "AllZeroError",
    "CapExceededError",
    "ConfigError",
    "DecisionRule",
    "EquilibriumProfile",
    "ErocPoint",
    "GridSpec",
    "HistoryNode",
    "HistoryTree",
    "InvalidAlphaError",
    "InvalidPriorError",
    "MessageSpace",
    "NegativeMassError",
    "NoRootError",
    "NpgameError",
    "OracleReport",
    "PassiveEquilibrium",
    "Pmf",
    "RegionPartition",
    "ScenarioConfig",
    "SpaceTooLargeError",
    "SupportMismatchError",
    "SupportViolationError",
    "ThresholdSpec",
    "ZetaResult",
    "beta_from_spec",
    "certify",
    "forward_induction",
    "grid_best_response_check",
    "kl_divergence",
    "likelihood_ratio",
    "live_messages",
    "load_config",
    "nonadversarial_sequential_rates",
    "nonadversarial_sequential_rates_beta",
    "normalize",
    "np_rule",
    "parse_config",
    "passive_equilibrium",
    "passive_eroc",
    "passive_sequential_rates",
    "passive_sequential_rates_beta",
    "posterior",
    "potential_value",
    "proactive_equilibrium",
    "proactive_eroc",
    "proactive_rates",
    "rates",
    "roc_curve",
    "sequential_rates",
    "solve_zeta",
]
