"""Optimal summarizers for a known report law and universal summarizers that
learn from the report history.

Known law: pick the summary minimizing sum_W u(x, W) (1 - i_y(W)).

Unknown law: the uniform average of the semantic loss over the probability
simplex is sum over x^n of (1 - eta) / (|T^n| |P_n|), with eta built from the
add-one estimates q and q_hat.  The universal summarizer minimizes the
surrogate mu(x^n), whose gap to the true optimum is at most lambda_bound(n).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Real
from typing import Callable, Collection, Mapping, Sequence, Union

from .loss import ReportDistribution, interpretation, set_loss
from .model import (
    Alphabet,
    DomainError,
    EmpiricalCounts,
    SemanticWeights,
    Summary,
    consistent_summaries,
    empirical,
    iter_sequences,
    log_num_types,
    log_type_class_size,
    num_types,
    type_class_size,
)
from .numerics import epsilon, series_sum_factorial_ratio

DEFAULT_ENUM_CAP = 10**6
# Uniform-average weights 1/(|T||P_n|) stay exact rationals while n + |X| <= this.
EXACT_ARITHMETIC_LIMIT = 64

SequencePolicy = Union[Mapping[tuple, Summary], Callable[[tuple], Summary]]


class EnumerationCapError(RuntimeError):
    """|X|^n exceeds the enumeration cap; use the Monte Carlo estimator instead."""


def enumeration_cap() -> int:
    raw = os.environ.get("SEMSUM_ENUM_CAP")
    return int(raw) if raw else DEFAULT_ENUM_CAP


def _argmin(candidates: Sequence[Summary], score: Callable[[Summary], Real]) -> tuple[Summary, Real]:
    # candidates arrive sorted by events mask, so strict < keeps the smallest mask on ties
    best, best_score = None, None
    for y in candidates:
        s = score(y)
        if best is None or s < best_score:
            best, best_score = y, s
    return best, best_score


# ---------------------------------------------------------------------------
# known report law
# ---------------------------------------------------------------------------


def known_p_score(p: ReportDistribution, x: int, y: Summary, u: SemanticWeights):
    """sum_W u(x, W) (1 - i_y(W))."""
    terms = u.for_report(x)
    if not terms:
        return Fraction(0) if p.exact else 0.0
    i = interpretation(p, y)
    return sum(w * set_loss(W, i) for W, w in terms)


def known_p_summarize(p: ReportDistribution, x: int, j: int, u: SemanticWeights) -> Summary:
    """Loss-minimizing summary of ``x`` when p is known; smallest mask wins ties."""
    if p[x] == 0:
        raise DomainError(f"report {x} has zero probability under p")
    y, _ = _argmin(consistent_summaries(x, j, p.v), lambda y: known_p_score(p, x, y, u))
    return y


def optimal_policy(p: ReportDistribution, j: int, u: SemanticWeights) -> dict[int, Summary]:
    """Known-p summary for every positive-probability report."""
    return {x: known_p_summarize(p, x, j, u) for x in range(len(p.probs)) if p[x] > 0}


def min_semantic_loss(p: ReportDistribution, j: int, u: SemanticWeights):
    """sum_x p(x) min_y sum_W u(x, W) (1 - i_y(W))."""
    total = Fraction(0) if p.exact else 0.0
    for x, px in enumerate(p.probs):
        if px == 0:
            continue
        _, score = _argmin(consistent_summaries(x, j, p.v), lambda y: known_p_score(p, x, y, u))
        total += px * score
    return total


# ---------------------------------------------------------------------------
# add-one estimates and the exact uniform average
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LaplaceEstimates:
    """q(a) = (count(a) + 1)/(n + |X|) and q_hat, which adds one more unit to x(1)."""

    q: tuple[Fraction, ...]
    q_hat: tuple[Fraction, ...]
    counts: EmpiricalCounts
    current: int

    @property
    def n(self) -> int:
        return self.counts.n

    @property
    def size(self) -> int:
        return len(self.q)

    def q_mass(self, reports: Collection[int]) -> Fraction:
        return sum((self.q[a] for a in reports), Fraction(0))

    def q_hat_mass(self, reports: Collection[int]) -> Fraction:
        return sum((self.q_hat[a] for a in reports), Fraction(0))


def laplace(xn: Sequence[int], v: int) -> LaplaceEstimates:
    counts = empirical(xn, v)
    return _laplace_from_counts(counts, xn[0])


@lru_cache(maxsize=65536)
def _laplace_from_counts(counts: EmpiricalCounts, current: int) -> LaplaceEstimates:
    n, size = counts.n, len(counts)
    q = tuple(Fraction(c + 1, n + size) for c in counts.counts)
    q_hat = tuple(
        Fraction(c + 1 + (a == current), n + size + 1) for a, c in enumerate(counts.counts)
    )
    return LaplaceEstimates(q, q_hat, counts, current)


def eta_parameters(est: LaplaceEstimates, y: Summary) -> tuple[int, int]:
    """(b, c) with c = n + |X| and b = c - (c + 1) q_hat(X(y)), an integer."""
    c = est.n + est.size
    b_frac = c - (c + 1) * est.q_hat_mass(_covered(y, est.size))
    assert b_frac.denominator == 1
    return int(b_frac), c


def _covered(y: Summary, size: int) -> list[int]:
    return [a for a in range(size) if y.covers(a)]


def eta(
    xn: Sequence[int],
    y: Summary,
    W: Collection[int],
    v: int,
    tol: float = 0,
    literal_factor: bool = False,
):
    """q(W n X(y)) * sum_k (b+k)! c! / (b! (c+k)!) with c = n + |X|.

    ``tol == 0`` uses the exact closed form of the series; ``tol > 0`` sums it
    term by term so that the returned value is within ``tol`` of the truth.
    ``literal_factor=True`` replaces c! by the bare factor c, reproducing the
    undigested display formula for comparison only.
    """
    seq = Alphabet(v).check_sequence(xn)
    est = laplace(seq, v)
    return _eta_from_estimates(est, y, frozenset(W), tol, literal_factor)


def _eta_from_estimates(est: LaplaceEstimates, y: Summary, W: frozenset, tol=0, literal_factor=False):
    if not y.covers(est.current):
        raise DomainError(f"summary {y} is inconsistent with the current report {est.current}")
    covered = _covered(y, est.size)
    overlap = [a for a in covered if a in W]
    q_overlap = est.q_mass(overlap)
    if q_overlap == 0:
        return Fraction(0) if tol == 0 else 0.0
    b, c = eta_parameters(est, y)
    if b >= c - 1:
        raise DomainError(f"series diverges for b={b}, c={c}")
    if tol == 0:
        series = Fraction(c, c - b - 1)
    else:
        res = series_sum_factorial_ratio(b, c, tol=float(tol) / float(q_overlap))
        series = res.value
    value = q_overlap * series
    if literal_factor:
        value = value / math.factorial(c - 1)
    return value if tol == 0 else float(value)


def type_weight(counts: EmpiricalCounts, exact_limit: int = EXACT_ARITHMETIC_LIMIT):
    """1 / (|T^n| |P_n(X)|): the uniform-average mass of one sequence."""
    n, size = counts.n, len(counts)
    if n + size <= exact_limit:
        return Fraction(1, type_class_size(counts) * num_types(n, size))
    return math.exp(-log_type_class_size(counts.counts) - log_num_types(n, size))


def _check_enumerable(n: int, v: int, cap: int | None) -> int:
    if n < 1:
        raise DomainError("n must be at least 1")
    cap = enumeration_cap() if cap is None else cap
    total = (1 << v) ** n
    if total > cap:
        raise EnumerationCapError(
            f"|X|^n = {total} exceeds the enumeration cap {cap}; "
            "use mc_uniform_avg_loss or raise SEMSUM_ENUM_CAP"
        )
    return total


def _resolve_seq(policy: SequencePolicy, xn: tuple) -> Summary:
    return policy[xn] if isinstance(policy, Mapping) else policy(xn)


def uniform_avg_loss_exact(
    policy: SequencePolicy,
    n: int,
    v: int,
    j: int,
    u: SemanticWeights,
    tol: float = 0,
    cap: int | None = None,
    literal_factor: bool = False,
):
    """Uniform average semantic loss of a deterministic history-aware policy.

    Sums u(x(1), W) (1 - eta) / (|T^n| |P_n|) over all of X^n.  Exact rational
    when ``tol == 0`` and n + |X| stays under EXACT_ARITHMETIC_LIMIT.
    """
    _check_enumerable(n, v, cap)
    size = 1 << v
    total = Fraction(0)
    for xn in iter_sequences(n, v):
        terms = u.for_report(xn[0])
        y = _resolve_seq(policy, xn)
        if y.j != j:
            raise DomainError(f"policy returned a length-{y.j} summary, expected {j}")
        if not y.covers(xn[0]):
            raise DomainError(f"summary {y} is inconsistent with the current report {xn[0]}")
        if not terms:
            continue
        counts = _counts(xn, size)
        est = _laplace_from_counts(counts, xn[0])
        inner = sum(w * (1 - _eta_from_estimates(est, y, W, tol, literal_factor)) for W, w in terms)
        total += type_weight(counts) * inner
    return total


def _counts(xn: tuple, size: int) -> EmpiricalCounts:
    cs = [0] * size
    for a in xn:
        cs[a] += 1
    return EmpiricalCounts(tuple(cs))


def optimal_uniform_avg_loss(n: int, v: int, j: int, u: SemanticWeights, cap: int | None = None):
    """True minimum of the uniform average over deterministic policies.

    The objective is a sum of per-sequence terms, so the minimum picks the
    best consistent summary for each x^n separately (exact eta).
    """
    _check_enumerable(n, v, cap)
    size = 1 << v
    total = Fraction(0)
    for xn in iter_sequences(n, v):
        terms = u.for_report(xn[0])
        if not terms:
            continue
        counts = _counts(xn, size)
        est = _laplace_from_counts(counts, xn[0])
        best = min(
            sum(w * (1 - _eta_from_estimates(est, y, W)) for W, w in terms)
            for y in consistent_summaries(xn[0], j, v)
        )
        total += type_weight(counts) * best
    return total


# ---------------------------------------------------------------------------
# universal summarizer
# ---------------------------------------------------------------------------


def universal_score(est: LaplaceEstimates, y: Summary, u: SemanticWeights) -> Fraction:
    """sum_W u(x(1), W) (1 - q(W n X(y)) / q_hat(X(y)))."""
    covered = _covered(y, est.size)
    denom = est.q_hat_mass(covered)
    total = Fraction(0)
    for W, w in u.for_report(est.current):
        total += w * (1 - est.q_mass([a for a in covered if a in W]) / denom)
    return total


def universal_summarize(xn: Sequence[int], j: int, u: SemanticWeights) -> Summary:
    """Summary of x(1) minimizing the add-one surrogate; smallest mask wins ties."""
    y, _ = _universal_choice(xn, j, u)
    return y


def mu(xn: Sequence[int], j: int, u: SemanticWeights):
    """The minimized surrogate value for the history ``xn``."""
    _, score = _universal_choice(xn, j, u)
    return score


def _universal_choice(xn: Sequence[int], j: int, u: SemanticWeights) -> tuple[Summary, Fraction]:
    seq = Alphabet(u.v).check_sequence(xn)
    est = laplace(seq, u.v)
    return _argmin(consistent_summaries(seq[0], j, u.v), lambda y: universal_score(est, y, u))


def universal_policy(j: int, u: SemanticWeights) -> Callable[[tuple], Summary]:
    """The universal summarizer as a policy on full report sequences."""
    return lambda xn: universal_summarize(xn, j, u)


def lambda_bound(n: int, v: int, j: int, u: SemanticWeights) -> float:
    """u* [ (|X|-1)|X| / (n - sqrt(n) + |X| - 1) eps(|X| 2^-j) + eps(sqrt(n)) ]."""
    if n < 1:
        raise DomainError("n must be at least 1")
    size = 1 << v
    u_star = float(u.u_star())
    if u_star == 0:
        return 0.0
    rare = (size - 1) * size / (n - math.sqrt(n) + size - 1)
    return u_star * (rare * epsilon(size / 2**j) + epsilon(math.sqrt(n)))


@dataclass(frozen=True)
class UniversalLossReport:
    """Exact uniform average loss of the universal summarizer and its bracket."""

    n: int
    v: int
    j: int
    exact_value: Real
    mu_sum: Real
    lambda_bound: float

    @property
    def implied_lambda(self) -> Real:
        return self.mu_sum - self.exact_value

    @property
    def in_bracket(self) -> bool:
        return self.mu_sum - self.lambda_bound <= self.exact_value <= self.mu_sum


def mu_sum(n: int, v: int, j: int, u: SemanticWeights, cap: int | None = None):
    """sum over x^n of mu(x^n) / (|T^n| |P_n|)."""
    _check_enumerable(n, v, cap)
    size = 1 << v
    total = Fraction(0)
    for xn in iter_sequences(n, v):
        if not u.for_report(xn[0]):
            continue
        total += type_weight(_counts(xn, size)) * mu(xn, j, u)
    return total


def min_uniform_avg_loss(
    n: int, v: int, j: int, u: SemanticWeights, tol: float = 0, cap: int | None = None
) -> UniversalLossReport:
    """Uniform average loss of the universal summarizer with the mu / lambda bracket."""
    exact = uniform_avg_loss_exact(universal_policy(j, u), n, v, j, u, tol=tol, cap=cap)
    report = UniversalLossReport(
        n=n,
        v=v,
        j=j,
        exact_value=exact,
        mu_sum=mu_sum(n, v, j, u, cap=cap),
        lambda_bound=lambda_bound(n, v, j, u),
    )
    if not report.in_bracket:
        raise ArithmeticError(
            f"uniform average loss {report.exact_value} escapes "
            f"[{report.mu_sum} - {report.lambda_bound}, {report.mu_sum}]"
        )
    return report
