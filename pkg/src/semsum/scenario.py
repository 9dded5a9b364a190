"""JSON scenario documents.

Example::

    {
      "schema": "semsum.scenario/1",
      "v": 2, "j": 1, "n": 3,
      "distribution": {"kind": "explicit", "probs": ["1/10", "1/5", "3/10", "2/5"]},
      "weights": {"kind": "identification"},
      "experiment": "mc",
      "samples": 100000,
      "seed": 7,
      "tolerance": 0
    }

``distribution.kind`` is ``uniform``, ``explicit`` (``probs``, length 2^v) or
``product`` (``marginals``, length v).  ``weights.kind`` is
``identification``, ``per_event`` (``weights``, length v) or ``explicit``
(``entries``: list of ``{"x": mask, "W": [masks], "weight": w}``).
Numbers may be given as JSON numbers or as rational strings such as "1/3".
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .loss import ReportDistribution
from .model import Alphabet, DomainError, SemanticWeights

SCHEMA = "semsum.scenario/1"
EXPERIMENTS = ("loss", "summarize", "universal", "avg-loss", "mc", "converge", "verify", "demo")


class ScenarioError(ValueError):
    """A scenario document is malformed."""


def _number(value: Any) -> Fraction | float:
    if isinstance(value, bool):
        raise ScenarioError(f"expected a number, got {value!r}")
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ScenarioError(f"cannot parse number {value!r}") from exc
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ScenarioError(f"non-finite number {value!r}")
        return value
    raise ScenarioError(f"expected a number, got {value!r}")


@dataclass
class Scenario:
    v: int = 2
    j: int = 1
    n: int = 1
    distribution: dict = field(default_factory=lambda: {"kind": "uniform"})
    weights: dict = field(default_factory=lambda: {"kind": "identification"})
    experiment: str = "mc"
    samples: int = 100_000
    seed: int = 12345
    tolerance: float = 0.0
    schema: str = SCHEMA

    def __post_init__(self):
        for name in ("v", "j", "n", "samples", "seed"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ScenarioError(f"{name} must be an integer, got {value!r}")
        try:
            Alphabet(self.v)
        except DomainError as exc:
            raise ScenarioError(str(exc)) from exc
        if not 1 <= self.j <= self.v:
            raise ScenarioError(f"j must lie in [1, v], got j={self.j}, v={self.v}")
        if self.n < 1:
            raise ScenarioError("n must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ScenarioError("seed must be an unsigned 64-bit integer")
        if self.experiment not in EXPERIMENTS:
            raise ScenarioError(f"unknown experiment {self.experiment!r}")
        if self.schema != SCHEMA:
            raise ScenarioError(f"unsupported schema {self.schema!r}, expected {SCHEMA!r}")
        # build once so malformed documents fail at load time
        self.report_distribution()
        self.semantic_weights()

    @classmethod
    def from_dict(cls, doc: dict) -> "Scenario":
        if not isinstance(doc, dict):
            raise ScenarioError("scenario document must be a JSON object")
        if "schema" not in doc:
            raise ScenarioError("scenario document lacks the 'schema' field")
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ScenarioError(f"unknown scenario fields: {sorted(unknown)}")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ScenarioError(str(exc)) from exc

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return asdict(self)

    def report_distribution(self) -> ReportDistribution:
        cfg = self.distribution
        kind = cfg.get("kind") if isinstance(cfg, dict) else None
        try:
            if kind == "uniform":
                return ReportDistribution.uniform(self.v)
            if kind == "explicit":
                values = [_number(x) for x in cfg["probs"]]
                if len(values) != 1 << self.v:
                    raise ScenarioError(f"explicit probs need length {1 << self.v}")
                exact = all(isinstance(x, Fraction) for x in values)
                if not exact:
                    total = math.fsum(float(x) for x in values)
                    if abs(total - 1) > 1e-9:
                        raise ScenarioError(f"explicit probs sum to {total}, not 1 within 1e-9")
                    values = [float(x) / total for x in values]
                return ReportDistribution.from_values(self.v, values, exact=exact)
            if kind == "product":
                marginals = [_number(x) for x in cfg["marginals"]]
                exact = all(isinstance(x, Fraction) for x in marginals)
                return ReportDistribution.product(self.v, marginals, exact=exact)
        except KeyError as exc:
            raise ScenarioError(f"distribution config lacks {exc}") from exc
        except DomainError as exc:
            raise ScenarioError(str(exc)) from exc
        raise ScenarioError(f"unknown distribution kind {kind!r}")

    def semantic_weights(self) -> SemanticWeights:
        cfg = self.weights
        kind = cfg.get("kind") if isinstance(cfg, dict) else None
        try:
            if kind == "identification":
                return SemanticWeights.identification(self.v)
            if kind == "per_event":
                return SemanticWeights.per_event(self.v, [_number(w) for w in cfg["weights"]])
            if kind == "explicit":
                entries = [
                    (int(e["x"]), frozenset(int(a) for a in e["W"]), _number(e["weight"]))
                    for e in cfg["entries"]
                ]
                return SemanticWeights(self.v, entries)
        except (KeyError, TypeError) as exc:
            raise ScenarioError(f"malformed weights config: {exc}") from exc
        except DomainError as exc:
            raise ScenarioError(str(exc)) from exc
        raise ScenarioError(f"unknown weights kind {kind!r}")
