"""Monte Carlo estimation of the uniform average loss and convergence runs."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .loss import ReportDistribution
from .model import DomainError, SemanticWeights, Summary
from .numerics import rng_stream, simplex_uniform_sample
from .summarizers import known_p_score, min_semantic_loss, universal_policy, universal_summarize

# Samples per independently seeded stream; fixed so estimates do not depend on workers.
STREAM_SIZE = 1 << 16


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    std_error: float
    samples: int
    seed: int

    def __iter__(self):
        yield self.estimate
        yield self.std_error


def _draw_sequences(P: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    cdf = np.cumsum(P, axis=1)
    cdf[:, -1] = 1.0
    U = rng.random((P.shape[0], n))
    idx = (U[:, :, None] >= cdf[:, None, :]).sum(axis=2)
    return np.minimum(idx, P.shape[1] - 1)


def _stream_moments(v, j, n, u, policy, seed, stream, count):
    size = 1 << v
    rng = rng_stream(seed, stream)
    P = simplex_uniform_sample(size, rng, count)
    X = _draw_sequences(P, n, rng)
    rows, inverse = np.unique(X, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)

    combos: dict[tuple[int, Summary], int] = {}
    combo_of_row = np.empty(len(rows), dtype=np.int64)
    for r, row in enumerate(rows):
        xn = tuple(int(a) for a in row)
        y = policy(xn)
        if y.j != j or not y.covers(xn[0]):
            raise DomainError(f"policy returned an invalid summary {y} for {xn}")
        combo_of_row[r] = combos.setdefault((xn[0], y), len(combos))
    combo = combo_of_row[inverse]

    losses = np.zeros(count)
    reports = np.arange(size)
    for (x1, y), cid in combos.items():
        terms = u.for_report(x1)
        if not terms:
            continue
        sel = np.flatnonzero(combo == cid)
        Psel = P[sel]
        covered = np.array([y.covers(int(a)) for a in reports])
        p_cov = Psel @ covered
        acc = np.zeros(len(sel))
        for W, w in terms:
            inside = covered & np.isin(reports, list(W))
            acc += float(w) * (1.0 - (Psel @ inside) / p_cov)
        losses[sel] = acc
    return math.fsum(losses), math.fsum(losses * losses), count


def mc_uniform_avg_loss(
    v: int,
    j: int,
    n: int,
    u: SemanticWeights,
    samples: int,
    seed: int,
    policy: Callable[[tuple], Summary] | None = None,
    workers: int = 1,
) -> MCEstimate:
    """Estimate the uniform average semantic loss by simulation.

    Each sample draws p uniformly from the simplex, then x^n i.i.d. from p,
    and scores the policy's summary of x(1) with the true interpretation.
    Samples are split into fixed-size streams keyed by (seed, stream index)
    and merged in stream order.
    """
    if samples < 1000:
        raise DomainError("mc_uniform_avg_loss needs at least 1000 samples")
    if n < 1:
        raise DomainError("n must be at least 1")
    policy = policy or universal_policy(j, u)
    sizes = [STREAM_SIZE] * (samples // STREAM_SIZE)
    if samples % STREAM_SIZE:
        sizes.append(samples % STREAM_SIZE)
    jobs = [(v, j, n, u, policy, seed, s, c) for s, c in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _stream_moments(*a), jobs))
    else:
        parts = [_stream_moments(*a) for a in jobs]
    total = math.fsum(p[0] for p in parts)
    total_sq = math.fsum(p[1] for p in parts)
    mean = total / samples
    var = max(total_sq - samples * mean * mean, 0.0) / (samples - 1)
    return MCEstimate(mean, math.sqrt(var / samples), samples, seed)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    universal_loss: float
    known_p_loss: float
    gap: float
    std_error: float


def convergence_experiment(
    v: int,
    j: int,
    p: ReportDistribution,
    u: SemanticWeights,
    n_grid: Sequence[int],
    trials: int,
    seed: int,
) -> list[ConvergenceRow]:
    """Semantic loss of the universal summarizer under a fixed law p.

    For each n a trial draws the history x(2..n) from p and averages the loss
    of the universal summary exactly over the current report x(1) ~ p.  The
    known-p minimum is the same for every n.
    """
    if list(n_grid) != sorted(n_grid) or not n_grid or n_grid[0] < 1:
        raise DomainError("n_grid must be ascending positive integers")
    size = 1 << v
    probs = p.as_array()
    probs = probs / probs.sum()
    known = float(min_semantic_loss(p, j, u))
    support = [x for x in range(size) if p[x] > 0]
    score_cache: dict[tuple[int, Summary], float] = {}

    def true_score(x1: int, y: Summary) -> float:
        key = (x1, y)
        if key not in score_cache:
            score_cache[key] = float(known_p_score(p, x1, y, u))
        return score_cache[key]

    rows = []
    for idx, n in enumerate(n_grid):
        rng = rng_stream(seed, idx)
        losses = np.empty(trials)
        for t in range(trials):
            history = tuple(int(a) for a in rng.choice(size, size=n - 1, p=probs))
            losses[t] = math.fsum(
                float(p[x1]) * true_score(x1, universal_summarize((x1,) + history, j, u))
                for x1 in support
            )
        mean = float(losses.mean())
        se = float(losses.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        rows.append(ConvergenceRow(n, mean, known, mean - known, se))
    return rows
