"""Reports, summaries, empirical statistics and type counting.

A report over ``v`` possible events is an ``int`` bitmask: bit ``e - 1`` is set
iff event ``e`` occurred.  A summary names ``j`` events (``events`` mask) and
copies the occurrence bits of the current report on those events (``values``).
Everything here is immutable and uses exact integer / rational arithmetic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Iterable, Iterator, Mapping, Sequence

MAX_EVENTS = 16

ReportSequence = tuple  # tuple[int, ...]; element 0 is the current report x(1)


class DomainError(ValueError):
    """An argument lies outside the domain of the model."""


@dataclass(frozen=True)
class Alphabet:
    """The report space ``X = 2^V`` for ``v`` possible events."""

    v: int

    def __post_init__(self):
        if not isinstance(self.v, int) or not 1 <= self.v <= MAX_EVENTS:
            raise DomainError(f"v must be an integer in [1, {MAX_EVENTS}], got {self.v!r}")

    @property
    def size(self) -> int:
        return 1 << self.v

    @property
    def full_mask(self) -> int:
        return self.size - 1

    def reports(self) -> range:
        return range(self.size)

    def check_report(self, x: int) -> int:
        if not isinstance(x, int) or not 0 <= x < self.size:
            raise DomainError(f"report {x!r} is not a valid mask for v={self.v}")
        return x

    def check_sequence(self, xn: Iterable[int]) -> ReportSequence:
        seq = tuple(xn)
        if not seq:
            raise DomainError("a report sequence needs at least one report")
        for x in seq:
            self.check_report(x)
        return seq


@dataclass(frozen=True, order=True)
class Summary:
    """A truthful extract: ``events`` selects j events, ``values`` their bits.

    ``values`` is always a sub-mask of ``events``; the bit of an event that
    was selected but did not occur is simply 0.
    """

    events: int
    values: int

    def __post_init__(self):
        if self.events <= 0:
            raise DomainError("a summary must select at least one event")
        if self.values & ~self.events:
            raise DomainError("summary values set bits outside the selected events")

    @classmethod
    def of(cls, x: int, events: int) -> "Summary":
        """The truthful summary of report ``x`` on the events in ``events``."""
        return cls(events, x & events)

    @property
    def j(self) -> int:
        return bin(self.events).count("1")

    def event_list(self) -> list[int]:
        """Selected events, 1-based, ascending."""
        return [e + 1 for e in range(self.events.bit_length()) if self.events >> e & 1]

    def covers(self, x: int) -> bool:
        """True iff ``x`` lies in X(y), i.e. ``x`` agrees with the summary."""
        return x & self.events == self.values

    def relabel(self, perm: Sequence[int]) -> "Summary":
        return Summary(permute_mask(self.events, perm), permute_mask(self.values, perm))

    def describe(self, names: Sequence[str] | None = None) -> str:
        parts = []
        for e in self.event_list():
            label = names[e - 1] if names else f"e{e}"
            parts.append(f"{label}={'1' if self.values >> (e - 1) & 1 else '0'}")
        return "{" + ", ".join(parts) + "}"


def permute_mask(mask: int, perm: Sequence[int]) -> int:
    """Move bit ``i`` to bit ``perm[i]`` (0-based event relabeling)."""
    out = 0
    for i, target in enumerate(perm):
        if mask >> i & 1:
            out |= 1 << target
    return out


def event_subsets(v: int, j: int) -> list[int]:
    """All event masks with exactly ``j`` bits, ascending."""
    if not 1 <= j <= v:
        raise DomainError(f"summary length j={j} must lie in [1, v={v}]")
    masks = [sum(1 << e for e in combo) for combo in itertools.combinations(range(v), j)]
    return sorted(masks)


def consistent_summaries(x: int, j: int, v: int) -> list[Summary]:
    """Every length-``j`` summary of report ``x``, ordered by events mask."""
    Alphabet(v).check_report(x)
    return [Summary.of(x, ev) for ev in event_subsets(v, j)]


def consistent_reports(y: Summary, v: int) -> frozenset[int]:
    """X(y): the 2^(v-j) reports agreeing with ``y`` on its events."""
    alphabet = Alphabet(v)
    if y.events > alphabet.full_mask:
        raise DomainError(f"summary selects events beyond v={v}")
    return frozenset(x for x in alphabet.reports() if y.covers(x))


@dataclass(frozen=True)
class EmpiricalCounts:
    """Occurrence counts ``n * pi(a)`` over the whole report alphabet."""

    counts: tuple[int, ...]
    n: int = field(init=False)

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise DomainError("counts must be nonnegative")
        object.__setattr__(self, "n", sum(self.counts))

    def __getitem__(self, a: int) -> int:
        return self.counts[a]

    def __len__(self) -> int:
        return len(self.counts)

    def pi(self, a: int) -> Fraction:
        return Fraction(self.counts[a], self.n)

    def as_dict(self) -> dict[int, int]:
        return {a: c for a, c in enumerate(self.counts) if c}


def empirical(xn: Sequence[int], v: int) -> EmpiricalCounts:
    alphabet = Alphabet(v)
    seq = alphabet.check_sequence(xn)
    counts = [0] * alphabet.size
    for x in seq:
        counts[x] += 1
    return EmpiricalCounts(tuple(counts))


def type_class_size(counts: EmpiricalCounts | Sequence[int]) -> int:
    """|T^n|: the multinomial coefficient n! / prod counts(a)!."""
    cs = counts.counts if isinstance(counts, EmpiricalCounts) else tuple(counts)
    out, total = 1, 0
    for c in cs:
        total += c
        out *= math.comb(total, c)
    return out


def num_types(n: int, alphabet_size: int) -> int:
    """|P_n(X)| = C(n + |X| - 1, |X| - 1)."""
    if n < 1 or alphabet_size < 1:
        raise DomainError("num_types needs n >= 1 and alphabet_size >= 1")
    return math.comb(n + alphabet_size - 1, alphabet_size - 1)


def log_type_class_size(counts: Sequence[int]) -> float:
    n = sum(counts)
    return math.lgamma(n + 1) - sum(math.lgamma(c + 1) for c in counts)


def log_num_types(n: int, alphabet_size: int) -> float:
    return (
        math.lgamma(n + alphabet_size)
        - math.lgamma(n + 1)
        - math.lgamma(alphabet_size)
    )


def iter_types(n: int, alphabet_size: int) -> Iterator[tuple[int, ...]]:
    """All count vectors of length ``alphabet_size`` summing to ``n``."""
    if alphabet_size == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in iter_types(n - first, alphabet_size - 1):
            yield (first,) + rest


def iter_sequences(n: int, v: int) -> Iterator[ReportSequence]:
    """All of X^n in lexicographic order."""
    return itertools.product(range(1 << v), repeat=n)


def _check_weight(w) -> None:
    if isinstance(w, bool) or not isinstance(w, Real):
        raise DomainError(f"weight {w!r} is not a real number")
    if not math.isfinite(w) or w < 0:
        raise DomainError(f"weight {w!r} must be finite and nonnegative")


class SemanticWeights:
    """Sparse semantic weights ``u(x, W)``; only entries with ``x in W`` exist.

    Weights may be ints, Fractions or floats; exact inputs keep every
    downstream loss exact.
    """

    __slots__ = ("v", "_entries", "_by_report")

    def __init__(self, v: int, entries: Mapping[tuple[int, frozenset], Real] | Iterable = ()):
        alphabet = Alphabet(v)
        self.v = v
        items = entries.items() if isinstance(entries, Mapping) else (
            ((x, W), w) for x, W, w in entries
        )
        table: dict[tuple[int, frozenset], Real] = {}
        for (x, W), w in items:
            alphabet.check_report(x)
            W = frozenset(W)
            for a in W:
                alphabet.check_report(a)
            if x not in W:
                raise DomainError(f"u(x, W) requires x in W (x={x}, W={sorted(W)})")
            _check_weight(w)
            if (x, W) in table:
                raise DomainError(f"duplicate weight entry for x={x}, W={sorted(W)}")
            if w:
                table[(x, W)] = w
        self._entries = table
        by_report: dict[int, list[tuple[frozenset, Real]]] = {}
        for (x, W), w in sorted(table.items(), key=lambda kv: (kv[0][0], sorted(kv[0][1]))):
            by_report.setdefault(x, []).append((W, w))
        self._by_report = by_report

    @classmethod
    def identification(cls, v: int, weight: Real = 1) -> "SemanticWeights":
        """u(x, {x}) = weight: the user wants the exact report."""
        return cls(v, {(x, frozenset([x])): weight for x in range(1 << v)})

    @classmethod
    def per_event(cls, v: int, event_weights: Sequence[Real]) -> "SemanticWeights":
        """u(x, W_e(x)) = w_e with W_e(x) the reports agreeing with x on event e."""
        if len(event_weights) != v:
            raise DomainError(f"expected {v} event weights, got {len(event_weights)}")
        table: dict[tuple[int, frozenset], Real] = {}
        size = 1 << v
        for x in range(size):
            for e, w in enumerate(event_weights):
                bit = 1 << e
                W = frozenset(a for a in range(size) if a & bit == x & bit)
                table[(x, W)] = w
        return cls(v, table)

    @classmethod
    def empty(cls, v: int) -> "SemanticWeights":
        return cls(v, {})

    def entries(self) -> dict[tuple[int, frozenset], Real]:
        return dict(self._entries)

    def for_report(self, x: int) -> list[tuple[frozenset, Real]]:
        return self._by_report.get(x, [])

    def total(self, x: int) -> Real:
        return sum(w for _, w in self.for_report(x))

    def u_star(self) -> Real:
        """Average over reports of the total weight attached to each report."""
        size = 1 << self.v
        total = sum(self._entries.values())
        if isinstance(total, float):
            return total / size
        return Fraction(total, size)

    def __len__(self) -> int:
        return len(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __add__(self, other: "SemanticWeights") -> "SemanticWeights":
        if other.v != self.v:
            raise DomainError("cannot add weights over different alphabets")
        merged = dict(self._entries)
        for key, w in other._entries.items():
            merged[key] = merged.get(key, 0) + w
        return SemanticWeights(self.v, merged)

    def relabel(self, perm: Sequence[int]) -> "SemanticWeights":
        return SemanticWeights(
            self.v,
            {
                (permute_mask(x, perm), frozenset(permute_mask(a, perm) for a in W)): w
                for (x, W), w in self._entries.items()
            },
        )

    def __repr__(self) -> str:
        return f"SemanticWeights(v={self.v}, entries={len(self._entries)})"
