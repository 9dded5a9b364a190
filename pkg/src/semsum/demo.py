"""Seven-event weather forecast demo.

The forecast law is a two-component mixture: a typhoon occurs with a small
probability and the other six events are independent given whether it does.
The shipped numbers are illustrative only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .loss import ReportDistribution
from .model import SemanticWeights, Summary
from .numerics import rng_stream
from .summarizers import known_p_summarize, universal_summarize


@dataclass(frozen=True)
class WeatherFixture:
    events: tuple[str, ...]
    distribution: ReportDistribution
    weights: SemanticWeights
    current: int
    history_length: int
    seed: int
    provenance: str


def load_weather_fixture() -> WeatherFixture:
    doc = json.loads(resources.files("semsum").joinpath("data/weather.json").read_text())
    events = tuple(doc["events"])
    v = len(events)
    t_bit = 1 << (doc["typhoon_event"] - 1)
    others = [e for e in range(v) if not t_bit >> e & 1]
    p_t = Fraction(doc["typhoon_probability"])

    def component(marginals, x):
        pr = Fraction(1)
        for e, m in zip(others, marginals):
            m = Fraction(m)
            pr *= m if x >> e & 1 else 1 - m
        return pr

    probs = []
    for x in range(1 << v):
        if x & t_bit:
            probs.append(p_t * component(doc["marginals_given_typhoon"], x))
        else:
            probs.append((1 - p_t) * component(doc["marginals_given_no_typhoon"], x))
    current = sum(1 << events.index(name) for name in doc["current_report"])
    return WeatherFixture(
        events=events,
        distribution=ReportDistribution(v, tuple(probs)),
        weights=SemanticWeights.per_event(v, [Fraction(w) for w in doc["event_weights"]]),
        current=current,
        history_length=int(doc["history_length"]),
        seed=int(doc["seed"]),
        provenance=doc["provenance"],
    )


def format_summary(y: Summary, names) -> str:
    marks = []
    for e in y.event_list():
        occurred = y.values >> (e - 1) & 1
        marks.append(f"{names[e - 1]} [{'x' if occurred else ' '}]")
    return ", ".join(marks)


def weather_demo(lengths=(2, 3)) -> dict:
    """Known-law and universal summaries of the fixture's current report.

    The universal summarizer sees a seeded history drawn from the fixture law.
    Returns a dict of rows; ``format_weather_demo`` renders it as text.
    """
    fx = load_weather_fixture()
    v = len(fx.events)
    rng = rng_stream(fx.seed, 0)
    probs = fx.distribution.as_array()
    history = tuple(int(a) for a in rng.choice(1 << v, size=fx.history_length - 1, p=probs / probs.sum()))
    xn = (fx.current,) + history
    rows = []
    for j in lengths:
        for method, y in (
            ("known-p", known_p_summarize(fx.distribution, fx.current, j, fx.weights)),
            ("universal", universal_summarize(xn, j, fx.weights)),
        ):
            rows.append({
                "j": j,
                "method": method,
                "events": [fx.events[e - 1] for e in y.event_list()],
                "occurred": [bool(y.values >> (e - 1) & 1) for e in y.event_list()],
                "text": format_summary(y, fx.events),
            })
    report = [fx.events[e] for e in range(v) if fx.current >> e & 1]
    return {"report": report, "history_length": fx.history_length, "seed": fx.seed,
            "provenance": fx.provenance, "rows": rows}


def format_weather_demo(result: dict) -> str:
    lines = [
        "current report: " + ", ".join(result["report"]),
        f"history: {result['history_length']} reports, seed {result['seed']}",
    ]
    for row in result["rows"]:
        lines.append(f"j={row['j']} {row['method']:<9}  {row['text']}")
    lines.append(f"({result['provenance']})")
    return "\n".join(lines)
