"""Inequality predicates and exact counting identities used by the audits.

Each ``*_holds`` function returns True when the inequality is satisfied at the
given point; log-space comparisons allow ``LOG_SLACK`` for rounding.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath

from .model import DomainError, iter_types, num_types, type_class_size
from .numerics import robbins_bounds, zeta_tail_bounds

LOG_SLACK = 1e-9


def support1_holds(a: float, b: float) -> bool:
    """(a/b)^b e^-(a-b) <= 1 for reals a > b > 0."""
    return b * (math.log(a) - math.log(b)) - (a - b) <= LOG_SLACK


def _log_stirling_tail(x: float, j: int) -> float:
    return -x + (x + j + 0.5) * math.log1p(x / j)


def support2_holds(a: int, b: int, j: int) -> bool:
    """e^-b (1+b/j)^(b+j+1/2) <= e^-a (1+a/j)^(a+j+1/2) for integers a > b, j >= 1."""
    return _log_stirling_tail(b, j) - _log_stirling_tail(a, j) <= LOG_SLACK


def super_loose_holds(b: int, c: int) -> bool:
    """sqrt(c/b) <= 2^((c-b)/2), checked exactly as c <= b 2^(c-b)."""
    if not 1 <= b < c:
        raise DomainError(f"need 1 <= b < c, got b={b}, c={c}")
    return c <= b * (1 << (c - b))


def zeta_tail(k: int, t: float) -> float:
    """sum_{m > k} m^-t via the Hurwitz zeta function."""
    return float(mpmath.zeta(t, k + 1))


def zeta_tail_bounds_hold(k: int, t: float) -> bool:
    lower, upper = zeta_tail_bounds(k, t)
    value = zeta_tail(k, t)
    return lower <= value * (1 + 1e-12) and value <= upper * (1 + 1e-12)


def robbins_holds(m: int) -> bool:
    lower, upper = robbins_bounds(m)
    exact = math.log(math.factorial(m))
    return lower <= exact + 1e-12 and exact <= upper + 1e-12


def sequence_normalization(n: int, size: int) -> Fraction:
    """sum over X^n of 1 / (|T^n| |P_n|); equals 1."""
    total = Fraction(0)
    pn = num_types(n, size)
    for xn in iter_sequences_of_size(n, size):
        counts = [0] * size
        for a in xn:
            counts[a] += 1
        total += Fraction(1, type_class_size(counts) * pn)
    return total


def iter_sequences_of_size(n: int, size: int):
    return itertools.product(range(size), repeat=n)


def average_type_mass(n: int, size: int, a: int) -> Fraction:
    """sum over types rho of rho(a) / |P_n|; equals 1/|X|."""
    pn = num_types(n, size)
    return sum((Fraction(rho[a], n) for rho in iter_types(n, size)), Fraction(0)) / pn


def first_symbol_fraction(counts: tuple[int, ...], a: int) -> Fraction:
    """#{x^n of type counts with x(1) = a} / |T^n|, by enumeration; equals rho(a)."""
    n, size = sum(counts), len(counts)
    hits = total = 0
    for xn in iter_sequences_of_size(n, size):
        cs = [0] * size
        for s in xn:
            cs[s] += 1
        if tuple(cs) == tuple(counts):
            total += 1
            hits += xn[0] == a
    return Fraction(hits, total)
