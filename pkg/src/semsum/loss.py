"""Summary interpretation, semantic loss and pointwise f-divergences."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Callable, Collection, Mapping, Sequence, Union

import numpy as np

from .model import Alphabet, DomainError, SemanticWeights, Summary

Policy = Union[Mapping[int, Summary], Callable[[int], Summary]]


class UndefinedInterpretationError(DomainError):
    """p(X(y)) = 0: the summary cannot occur under p."""


class InconsistentSummaryError(DomainError):
    """A policy emitted a summary that contradicts the report it summarizes."""


def _to_exact(value) -> Fraction:
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        # floats are taken at face value (shortest decimal repr), e.g. 0.1 -> 1/10
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class ReportDistribution:
    """A probability vector over the 2^v reports, exact or float backed."""

    v: int
    probs: tuple
    exact: bool = True

    def __post_init__(self):
        size = Alphabet(self.v).size
        if len(self.probs) != size:
            raise DomainError(f"expected {size} probabilities, got {len(self.probs)}")
        if any(not math.isfinite(p) or p < 0 for p in self.probs):
            raise DomainError("probabilities must be finite and nonnegative")
        total = sum(self.probs)
        if self.exact:
            if total != 1:
                raise DomainError(f"exact probabilities must sum to 1, got {total}")
        elif abs(total - 1.0) > 1e-12:
            raise DomainError(f"probabilities sum to {total!r}, not 1 within 1e-12")

    @classmethod
    def from_values(cls, v: int, values: Sequence, exact: bool = True) -> "ReportDistribution":
        if exact:
            return cls(v, tuple(_to_exact(x) for x in values), True)
        return cls(v, tuple(float(x) for x in values), False)

    @classmethod
    def uniform(cls, v: int, exact: bool = True) -> "ReportDistribution":
        size = 1 << v
        value = Fraction(1, size) if exact else 1.0 / size
        return cls(v, (value,) * size, exact)

    @classmethod
    def point_mass(cls, v: int, x: int, exact: bool = True) -> "ReportDistribution":
        one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
        return cls(v, tuple(one if a == x else zero for a in range(1 << v)), exact)

    @classmethod
    def product(cls, v: int, marginals: Sequence, exact: bool = True) -> "ReportDistribution":
        """Independent events with P(event e occurs) = marginals[e - 1]."""
        if len(marginals) != v:
            raise DomainError(f"expected {v} marginals, got {len(marginals)}")
        ms = [_to_exact(m) if exact else float(m) for m in marginals]
        if any(m < 0 or m > 1 for m in ms):
            raise DomainError("marginals must lie in [0, 1]")
        probs = []
        for x in range(1 << v):
            pr = Fraction(1) if exact else 1.0
            for e, m in enumerate(ms):
                pr *= m if x >> e & 1 else 1 - m
            probs.append(pr)
        if not exact:
            total = math.fsum(probs)
            probs = [pr / total for pr in probs]
        return cls(v, tuple(probs), exact)

    def __getitem__(self, x: int):
        return self.probs[x]

    def mass(self, reports: Collection[int]):
        return sum((self.probs[x] for x in reports), Fraction(0) if self.exact else 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs])

    def relabel(self, perm: Sequence[int]) -> "ReportDistribution":
        from .model import permute_mask

        probs = [None] * len(self.probs)
        for x, pr in enumerate(self.probs):
            probs[permute_mask(x, perm)] = pr
        return ReportDistribution(self.v, tuple(probs), self.exact)


@dataclass(frozen=True)
class Interpretation:
    """i_y: the conditional law of the report given summary ``y``."""

    summary: Summary
    probs: tuple

    def __getitem__(self, x: int):
        return self.probs[x]

    def mass(self, reports: Collection[int]):
        zero = self.probs[0] * 0
        return sum((self.probs[x] for x in reports), zero)

    def support(self) -> list[int]:
        return [x for x, pr in enumerate(self.probs) if pr > 0]


def interpretation(p: ReportDistribution, y: Summary) -> Interpretation:
    """i_y(x) = p(x) / p(X(y)) on X(y), zero elsewhere."""
    if y.events >> p.v:
        raise DomainError(f"summary selects events beyond v={p.v}")
    covered = [x for x in range(len(p.probs)) if y.covers(x)]
    norm = p.mass(covered)
    if norm == 0:
        raise UndefinedInterpretationError(f"p(X(y)) = 0 for summary {y}")
    zero = norm * 0
    probs = tuple(p.probs[x] / norm if y.covers(x) else zero for x in range(len(p.probs)))
    return Interpretation(y, probs)


def set_loss(W: Collection[int], i: Interpretation):
    """1 - i(W): the smallest variational distance from i to a law living on W."""
    return 1 - i.mass(W)


def _total_variation(q: Mapping[int, Real], i: Interpretation):
    total = 0
    for x, ix in enumerate(i.probs):
        total += abs(q.get(x, 0) - ix)
    return total / 2


def constructive_inner_distance(W: Collection[int], i: Interpretation):
    """Variational distance from ``i`` to the explicit minimizer on W.

    The minimizer rescales i on W up to total mass one (uniform on W when
    i(W) = 0); its distance equals 1 - i(W) exactly for rational inputs.
    """
    W = sorted(W)
    if not W:
        raise DomainError("W must be non-empty")
    mass = i.mass(W)
    if mass > 0:
        q = {x: i[x] / mass for x in W}
    else:
        share = Fraction(1, len(W)) if isinstance(mass, Fraction) else 1.0 / len(W)
        q = {x: share for x in W}
    return _total_variation(q, i)


def grid_inner_distance(W: Collection[int], i: Interpretation, grid_resolution: int) -> float:
    """Minimum variational distance from ``i`` over all laws on W with masses in
    multiples of 1/grid_resolution.

    The distance is separable across coordinates, so the grid minimum is found
    exactly by a min-plus recursion over W instead of listing every point.
    """
    if grid_resolution < 10:
        raise DomainError("grid_resolution must be at least 10")
    W = sorted(W)
    r = grid_resolution
    steps = np.arange(r + 1) / r
    # best[s]: least sum of |q(a) - i(a)| over the coordinates seen so far using s grid units
    best = np.full(r + 1, np.inf)
    best[0] = 0.0
    idx = np.arange(r + 1)
    used_minus_k = idx[:, None] - idx[None, :]
    for x in W:
        cost = np.abs(steps - float(i[x]))
        cand = np.where(used_minus_k >= 0, best[np.clip(used_minus_k, 0, r)] + cost[None, :], np.inf)
        best = cand.min(axis=1)
    inside = set(W)
    outside = sum(float(i[x]) for x in range(len(i.probs)) if x not in inside)
    return float((best[r] + outside) / 2)


def _resolve(policy: Policy, x: int) -> Summary:
    return policy[x] if isinstance(policy, Mapping) else policy(x)


def _loss_sum(p: ReportDistribution, policy: Policy, u: SemanticWeights, inner) -> Real:
    total = Fraction(0) if p.exact else 0.0
    for x, px in enumerate(p.probs):
        if px == 0:
            continue
        y = _resolve(policy, x)
        if not y.covers(x):
            raise InconsistentSummaryError(f"summary {y} is inconsistent with report {x}")
        terms = u.for_report(x)
        if not terms:
            continue
        i = _cached_interpretation(p, y)
        total += px * sum(w * inner(W, i) for W, w in terms)
    return total


@functools.lru_cache(maxsize=4096)
def _cached_interpretation(p: ReportDistribution, y: Summary) -> Interpretation:
    return interpretation(p, y)


def semantic_loss(p: ReportDistribution, policy: Policy, u: SemanticWeights):
    """sum_x p(x) sum_W u(x, W) (1 - i_{policy(x)}(W)) for a deterministic policy."""
    return _loss_sum(p, policy, u, set_loss)


def semantic_loss_definitional(
    p: ReportDistribution,
    policy: Policy,
    u: SemanticWeights,
    grid_resolution: int = 200,
    method: str = "grid",
):
    """Semantic loss with the inner infimum evaluated from its definition.

    ``method="grid"`` minimizes the variational distance over a grid of laws on
    each W (an upper bound within ~|W| / grid_resolution of the infimum);
    ``method="constructive"`` evaluates it at the explicit minimizer.
    """
    if method == "grid":
        return _loss_sum(p, policy, u, lambda W, i: grid_inner_distance(W, i, grid_resolution))
    if method == "constructive":
        return _loss_sum(p, policy, u, constructive_inner_distance)
    raise ValueError(f"unknown method {method!r}")


class _Infinite:
    """Tagged +infinity for divergences, distinct from float overflow."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("INFINITE")

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __float__(self):
        return math.inf


INFINITE = _Infinite()


@dataclass(frozen=True)
class ConvexGenerator:
    """A convex ``f`` on (0, inf) with ``f(1) = 0`` and its boundary behaviour.

    ``f_at_zero`` is lim_{t->0} f(t) and ``slope_at_infinity`` is
    lim_{t->inf} f(t)/t; either may be ``math.inf``.
    """

    name: str
    f: Callable[[Real], Real]
    f_at_zero: float
    slope_at_infinity: float

    def __post_init__(self):
        grid = [0.05 * k for k in range(1, 81)]
        for a in grid[::7]:
            for b in grid[3::9]:
                for lam in (0.25, 0.5, 0.75):
                    mid = self.f(lam * a + (1 - lam) * b)
                    chord = lam * self.f(a) + (1 - lam) * self.f(b)
                    if mid > chord + 1e-12 * (1 + abs(chord)):
                        raise DomainError(f"generator {self.name!r} fails convexity at ({a}, {b})")


TOTAL_VARIATION = ConvexGenerator(
    "total_variation", lambda t: abs(t - 1) / 2, Fraction(1, 2), Fraction(1, 2)
)
KL = ConvexGenerator("kl", lambda t: t * math.log(t) if t > 0 else 0.0, 0.0, math.inf)
REVERSE_KL = ConvexGenerator("reverse_kl", lambda t: -math.log(t), math.inf, 0.0)
CHI_SQUARE = ConvexGenerator("chi_square", lambda t: (t - 1) ** 2, 1.0, math.inf)

GENERATORS = {g.name: g for g in (TOTAL_VARIATION, KL, REVERSE_KL, CHI_SQUARE)}


def f_divergence_point(f: ConvexGenerator, x: int, i: Interpretation):
    """D_f(1_x || i) = i(x) f(1/i(x)) + (1 - i(x)) f(0), with 0 * inf = 0.

    Returns ``INFINITE`` when the value diverges.
    """
    ix = i[x]
    if ix == 0:
        # limit i -> 0 of f(0) + i [f(1/i) - f(0)] = f(0) + slope_at_infinity
        value = f.f_at_zero + f.slope_at_infinity
        return INFINITE if math.isinf(value) else value
    head = ix * f.f(1 / ix)
    if ix == 1:
        return head
    if math.isinf(f.f_at_zero):
        return INFINITE
    return head + (1 - ix) * f.f_at_zero
