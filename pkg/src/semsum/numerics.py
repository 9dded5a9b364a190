"""Numerical kernels: the factorial-ratio series, the epsilon envelope,
Beta integrals, uniform simplex sampling and the factorial/zeta bounds
used to audit the series envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import DomainError

# Largest b, c for which series_sum_factorial_ratio(tol=0) hands back an exact
# rational; past this callers get a float.
EXACT_SERIES_LIMIT = 64

_MAX_BLOCK = 1 << 18
_EXP_TWELFTH = math.exp(1.0 / 12.0)


class DivergentSeriesError(DomainError):
    """The factorial-ratio series diverges (c < b + 2)."""


@dataclass(frozen=True)
class SeriesResult:
    """Partial sum of a positive series with a certified bound on what is left.

    The true sum lies in ``[value, value + tail_bound]``.
    """

    value: float | Fraction
    tail_bound: float | Fraction
    terms_used: int

    @property
    def upper(self):
        return self.value + self.tail_bound

    def converged(self, tol: float) -> bool:
        return self.tail_bound <= tol


def series_term(b: int, c: int, k: int) -> Fraction:
    """s(k) = (b+k)! c! / ((c+k)! b!) as an exact rational."""
    return Fraction(math.perm(b + k, k), math.perm(c + k, k))


def series_closed_form(b: int, c: int) -> Fraction:
    """Sum over k >= 0 of s(k), equal to c / (c - b - 1).

    Telescopes: with T(k) = s(k) (c + k) / (c - b - 1) one has
    T(k) - T(k+1) = s(k) and T(k) -> 0, so the sum is T(0).
    """
    _check_series_args(b, c)
    return Fraction(c, c - b - 1)


def _check_series_args(b: int, c: int) -> None:
    if b < 0:
        raise DomainError(f"b must be a nonnegative integer, got {b}")
    if c < b + 2:
        raise DivergentSeriesError(f"series diverges unless c >= b + 2 (b={b}, c={c})")


def series_sum_factorial_ratio(
    b: int, c: int, tol: float = 1e-12, max_terms: int = 10_000_000
) -> SeriesResult:
    """Sum s(k) = (b+k)! c! / ((c+k)! b!) term by term with a certified tail.

    After terms 0..K the remainder is bounded by
    ``s(K) * (c + K + 1) / (c - b - 1)``: the term ratio obeys
    ``s(k+1)/s(k) = 1 - d/(c+k+1) <= exp(-d/(c+k+1))`` with ``d = c - b``,
    so ``s(k) <= s(K) ((c+K+1)/(c+k+1))^d`` and the tail is dominated by an
    integral of ``x^-d``.

    ``tol == 0`` returns the exact closed form (a Fraction for b, c up to
    EXACT_SERIES_LIMIT).  Summation stops once the certificate drops below
    ``tol`` or after ``max_terms`` terms; check ``converged(tol)`` in the
    latter case.
    """
    _check_series_args(b, c)
    if tol < 0:
        raise DomainError("tol must be nonnegative")
    if tol == 0:
        exact = series_closed_form(b, c)
        if b <= EXACT_SERIES_LIMIT and c <= EXACT_SERIES_LIMIT:
            return SeriesResult(exact, Fraction(0), 0)
        return SeriesResult(float(exact), 0.0, 0)

    d1 = c - b - 1
    partial = []
    term = 1.0  # s(K) for the next index K
    k0 = 0
    block = 64
    while True:
        ks = np.arange(k0, k0 + block, dtype=np.float64)
        # terms s(k0), ..., s(k0+block-1) from s(k0) and successive ratios
        ratios = (b + ks + 1.0) / (c + ks + 1.0)
        terms = term * np.concatenate(([1.0], np.cumprod(ratios[:-1])))
        partial.append(math.fsum(terms))
        last_k = k0 + block - 1
        last = float(terms[-1])
        tail = last * (c + last_k + 1) / d1
        used = last_k + 1
        if tail <= tol or used >= max_terms:
            return SeriesResult(math.fsum(partial), tail, used)
        term = last * float(ratios[-1])
        k0 += block
        block = min(block * 2, _MAX_BLOCK, max_terms - used)


def epsilon(a: float) -> float:
    """Envelope 3 (1 + ln a)/a + 4 e^(1/12) 2^(-a/2) on the series sum."""
    if not a > 0:
        raise DomainError(f"epsilon needs a > 0, got {a}")
    return 3.0 * (1.0 + math.log(a)) / a + 4.0 * _EXP_TWELFTH * 2.0 ** (-a / 2.0)


def series_bounds(b: int, c: int) -> tuple[float, float]:
    """Lower/upper envelope (c+1)/(c-b) and (c+1)/(c-b) (1 + epsilon(c-b))."""
    lower = (c + 1) / (c - b)
    return lower, lower * (1.0 + epsilon(c - b))


def beta_integral(a: int, b: int, c=1):
    """Integral over [0, c] of (c - x)^a x^b, i.e. a! b! / (a+b+1)! c^(a+b+1).

    Exact (Fraction) when ``c`` is an int or Fraction, float otherwise.
    """
    if a < 0 or b < 0 or int(a) != a or int(b) != b:
        raise DomainError("beta_integral needs nonnegative integers a, b")
    if not 0 <= c <= 1:
        raise DomainError(f"c must lie in [0, 1], got {c}")
    coeff = Fraction(math.factorial(a) * math.factorial(b), math.factorial(a + b + 1))
    if isinstance(c, (int, Fraction)):
        return coeff * Fraction(c) ** (a + b + 1)
    return float(coeff) * float(c) ** (a + b + 1)


def rng_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based Philox stream keyed by (seed, stream)."""
    if not 0 <= seed < 2**64:
        raise DomainError("seed must be an unsigned 64-bit integer")
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(ss))


def simplex_uniform_sample(dim: int, rng: np.random.Generator, size: int | None = None):
    """Uniform draw(s) from the (dim-1)-simplex via normalized exponentials.

    The uniform density on the simplex is (dim-1)!, i.e. Dirichlet(1, ..., 1).
    ``rng`` is advanced in place.
    """
    if dim < 2:
        raise DomainError("simplex dimension must be at least 2")
    shape = (dim,) if size is None else (size, dim)
    e = rng.standard_exponential(shape)
    return e / e.sum(axis=-1, keepdims=True)


def zeta_tail_bounds(k: int, t: float) -> tuple[float, float]:
    """Bounds on sum_{m > k} m^-t: ((k+1)^-(t-1), k^-(t-1)) / (t - 1)."""
    if k < 1 or int(k) != k:
        raise DomainError("k must be a positive integer")
    if not t > 1:
        raise DomainError("t must exceed 1")
    return (k + 1) ** (1 - t) / (t - 1), k ** (1 - t) / (t - 1)


def log_factorial(m: int) -> float:
    return math.lgamma(m + 1)


def robbins_bounds(m: int) -> tuple[float, float]:
    """Log of Robbins' two-sided Stirling bounds on m!."""
    if m < 1 or int(m) != m:
        raise DomainError("robbins_bounds needs a positive integer")
    base = 0.5 * math.log(2 * math.pi) + (m + 0.5) * math.log(m) - m
    return base + 1.0 / (12 * m + 1), base + 1.0 / (12 * m)
