"""Finite message spaces and probability mass functions.

Every integral in the solver modules reduces to a weighted sum over a finite
message space.  Continuous densities enter only through user-supplied grids
with quadrature weights, so this module is the sole numerical substrate.

Conventions:
  * 0 * ln(0 / q) = 0 in the KL divergence.
  * messages with zero mass under both hypotheses are "dead": they are
    flagged (NaN likelihood ratio) and excluded from region partitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AllZeroError, NegativeMassError, SupportViolationError

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MessageSpace:
    """Ordered finite message space with per-message quadrature weights."""

    labels: tuple[str, ...]
    weights: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MessageSpace):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.weights, other.weights)

    def __hash__(self) -> int:
        return hash((self.labels, self.weights.tobytes()))

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise ValueError("message space must be nonempty")
        if len(set(labels)) != len(labels):
            raise ValueError("message labels must be pairwise distinct")
        if self.weights is None:
            w = np.ones(len(labels))
        else:
            w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(labels),):
            raise ValueError("weights must align with labels")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("weights must be positive and finite")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability mass function aligned with a MessageSpace.

    Normalization means sum(masses * weights) == 1 within 1e-12.
    """

    space: MessageSpace
    masses: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float)
        if m.shape != (self.space.size,):
            raise ValueError("masses must align with the message space")
        if not np.all(np.isfinite(m)):
            raise ValueError("masses must be finite")
        if np.any(m < 0):
            raise NegativeMassError("pmf masses must be nonnegative")
        total = float(np.dot(m, self.space.weights))
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"pmf does not sum to 1 (got {total!r})")
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)

    def weighted(self) -> np.ndarray:
        """Per-message probability content masses * weights."""
        return self.masses * self.space.weights

    def mass_on(self, indices) -> float:
        """Total probability carried by the given message indices."""
        idx = np.asarray(list(indices), dtype=int)
        if idx.size == 0:
            return 0.0
        return float(np.dot(self.masses[idx], self.space.weights[idx]))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.nonzero(self.masses > 0)[0])


def normalize(raw, space: MessageSpace) -> Pmf:
    """Scale a nonnegative vector into a Pmf on the given space."""
    v = np.asarray(raw, dtype=float)
    if v.shape != (space.size,):
        raise ValueError("raw vector must align with the message space")
    if not np.all(np.isfinite(v)):
        raise ValueError("raw vector must be finite")
    if np.any(v < 0):
        raise NegativeMassError("raw vector contains a negative entry")
    total = float(np.dot(v, space.weights))
    if total == 0.0:
        raise AllZeroError("cannot normalize an all-zero vector")
    return Pmf(space, v / total)


def kl_divergence(p: Pmf, q: Pmf) -> float:
    """KL(p || q) in nats, with the convention 0 * ln(0/q) = 0."""
    if p.space is not q.space and p.space != q.space:
        raise ValueError("pmfs must live on the same message space")
    pm, qm = p.masses, q.masses
    bad = (pm > 0) & (qm == 0)
    if np.any(bad):
        raise SupportViolationError(
            f"supp(p) not contained in supp(q) at indices {np.nonzero(bad)[0].tolist()}"
        )
    pos = pm > 0
    terms = pm[pos] * np.log(pm[pos] / qm[pos]) * p.space.weights[pos]
    return float(np.sum(terms))


def likelihood_ratio(f1: Pmf, f0: Pmf) -> np.ndarray:
    """Per-message ratio f1/f0: +inf where f0=0 < f1, NaN where both vanish."""
    if f1.space != f0.space:
        raise ValueError("pmfs must live on the same message space")
    num, den = f1.masses, f0.masses
    out = np.empty_like(num)
    both_zero = (num == 0) & (den == 0)
    zero_den = (den == 0) & ~both_zero
    ok = den > 0
    out[ok] = num[ok] / den[ok]
    out[zero_den] = np.inf
    out[both_zero] = np.nan  # dead message: excluded downstream
    return out


def live_messages(f0: Pmf, f1: Pmf) -> tuple[int, ...]:
    """Indices carrying mass under at least one hypothesis."""
    alive = (f0.masses > 0) | (f1.masses > 0)
    return tuple(int(i) for i in np.nonzero(alive)[0])
