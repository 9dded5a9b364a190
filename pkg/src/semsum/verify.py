"""End-to-end verification suite behind ``semsum verify``.

Every row records what it checks, the measured value, the bound it was held
to and whether it passed; stochastic rows echo their seed.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

from scipy import integrate

from . import checks
from .harness import convergence_experiment, mc_uniform_avg_loss
from .loss import (
    GENERATORS,
    TOTAL_VARIATION,
    ReportDistribution,
    f_divergence_point,
    interpretation,
    semantic_loss,
    semantic_loss_definitional,
    set_loss,
)
from .model import SemanticWeights, Summary, consistent_summaries, iter_types
from .numerics import (
    beta_integral,
    epsilon,
    series_bounds,
    series_closed_form,
    series_sum_factorial_ratio,
    series_term,
)
from .summarizers import (
    eta,
    lambda_bound,
    laplace,
    min_semantic_loss,
    min_uniform_avg_loss,
    optimal_uniform_avg_loss,
    uniform_avg_loss_exact,
    universal_policy,
)

LEVELS = {
    "quick": dict(
        loss_instances=50,
        policy_instances=20,
        mc_samples=100_000,
        series_cmax=60,
        convergence_trials=200,
        grid_points=2_000,
    ),
    "full": dict(
        loss_instances=50,
        policy_instances=20,
        mc_samples=1_000_000,
        series_cmax=200,
        convergence_trials=200,
        grid_points=20_000,
    ),
}


@dataclass
class Row:
    name: str
    checks: str
    value: float | str
    bound: float | str
    passed: bool
    seed: int | None = None
    note: str = ""


@dataclass
class RunReport:
    level: str
    seed: int
    rows: list[Row] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "seed": self.seed,
            "passed": self.passed,
            "wall_time": self.wall_time,
            "rows": [asdict(r) for r in self.rows],
        }


# ---------------------------------------------------------------------------
# random instances
# ---------------------------------------------------------------------------


def random_distribution(rng: random.Random, v: int) -> ReportDistribution:
    raw = [rng.randint(1, 20) for _ in range(1 << v)]
    total = sum(raw)
    return ReportDistribution(v, tuple(Fraction(r, total) for r in raw))


def random_weights(rng: random.Random, v: int, max_entries: int = 5) -> SemanticWeights:
    size = 1 << v
    table = {}
    for _ in range(rng.randint(1, max_entries)):
        x = rng.randrange(size)
        W = frozenset([x] + [a for a in range(size) if a != x and rng.random() < 0.4])
        table[(x, W)] = Fraction(rng.randint(1, 10), rng.randint(1, 4))
    return SemanticWeights(v, table)


def random_policy(rng: random.Random, v: int, j: int) -> dict[int, Summary]:
    return {x: rng.choice(consistent_summaries(x, j, v)) for x in range(1 << v)}


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def check_semantic_loss_forms(rng: random.Random, instances: int, grid: int = 200) -> list[Row]:
    worst_gap = 0.0
    grid_ok = exact_ok = True
    for _ in range(instances):
        v = rng.randint(1, 3)
        j = rng.randint(1, v)
        p = random_distribution(rng, v)
        u = random_weights(rng, v)
        policy = random_policy(rng, v, j)
        closed = semantic_loss(p, policy, u)
        by_grid = semantic_loss_definitional(p, policy, u, grid)
        constructive = semantic_loss_definitional(p, policy, u, method="constructive")
        gap = by_grid - float(closed)
        worst_gap = max(worst_gap, abs(gap))
        grid_ok &= -1e-12 <= gap <= 2 * (1 << v) / grid
        exact_ok &= constructive == closed
    return [
        Row("loss_closed_vs_grid", "semantic loss closed form vs definitional grid search",
            worst_gap, f"2|X|/{grid}", grid_ok),
        Row("loss_closed_vs_constructive", "semantic loss closed form vs explicit minimizer",
            0 if exact_ok else "mismatch", 0, exact_ok),
    ]


def check_known_p_optimality(rng: random.Random, instances: int) -> list[Row]:
    v, j = 2, 1
    ok = True
    worst_margin = None
    for _ in range(instances):
        p = random_distribution(rng, v)
        u = random_weights(rng, v)
        best = min_semantic_loss(p, j, u)
        choices = [consistent_summaries(x, j, v) for x in range(1 << v)]
        losses = [semantic_loss(p, dict(enumerate(pick)), u) for pick in itertools.product(*choices)]
        ok &= best == min(losses)
        margin = min(losses) - best
        worst_margin = margin if worst_margin is None else max(worst_margin, margin)
    return [Row("known_p_optimality", "minimum semantic loss over all deterministic policies",
                float(worst_margin), 0, ok)]


def check_uniform_average_vs_mc(samples: int, seed: int) -> list[Row]:
    v, j = 2, 1
    u = SemanticWeights.identification(v)
    rows = []
    for n in (1, 2, 3):
        exact = uniform_avg_loss_exact(universal_policy(j, u), n, v, j, u)
        est = mc_uniform_avg_loss(v, j, n, u, samples, seed)
        z = abs(est.estimate - float(exact)) / est.std_error
        rows.append(Row(f"uniform_average_vs_mc_n{n}", "uniform average loss formula vs Monte Carlo",
                        z, 4.0, z <= 4.0, seed, f"exact={exact} mc={est.estimate:.6f}±{est.std_error:.6f}"))
    exact1 = uniform_avg_loss_exact(universal_policy(j, u), 1, v, j, u)
    rows.append(Row("uniform_average_n1_value", "uniform average loss at v=2, j=1, n=1",
                    str(exact1), "1/3", exact1 == Fraction(1, 3)))
    literal = uniform_avg_loss_exact(universal_policy(j, u), 1, v, j, u, literal_factor=True)
    rows.append(Row("uniform_average_bare_factor", "display-formula variant with the bare factor n+|X|",
                    float(literal), str(exact1), True, note="informational: the factorial reading is used"))
    return rows


def check_series(cmax: int, rng: random.Random) -> list[Row]:
    violations = closed_bad = 0
    pairs = 0
    for c in range(3, cmax + 1):
        for b in range(1, c - 1):
            lower, upper = series_bounds(b, c)
            tol = 1e-9 * lower
            res = series_sum_factorial_ratio(b, c, tol=tol, max_terms=1 << 18)
            pairs += 1
            violations += not (lower <= res.value and res.upper <= upper)
            closed_bad += abs(res.value - float(series_closed_form(b, c))) > res.tail_bound + tol
    # exact partial sums on random (b, c): S_K + exact tail T(K) = closed form
    partial_bad = 0
    for _ in range(12):
        b = rng.randint(0, 30)
        c = rng.randint(b + 2, b + 40)
        K = rng.randint(5, 60)
        partial = sum((series_term(b, c, k) for k in range(K)), Fraction(0))
        if partial >= series_closed_form(b, c):
            partial_bad += 1
        res = series_sum_factorial_ratio(b, c, tol=1e-10, max_terms=1 << 22)
        partial_bad += abs(res.value - float(series_closed_form(b, c))) > res.tail_bound + 1e-10
    return [
        Row("series_sandwich", "factorial-ratio series envelope with epsilon(c-b)",
            violations, 0, violations == 0, note=f"{pairs} pairs, c <= {cmax}"),
        Row("series_closed_form", "series equals c/(c-b-1) within its certificate",
            closed_bad, 0, closed_bad == 0),
        Row("series_closed_form_random", "closed form vs partial sums on random (b, c)",
            partial_bad, 0, partial_bad == 0),
    ]


def check_bracket() -> list[Row]:
    rows = []
    j = 1
    for v in (1, 2):
        u = SemanticWeights.identification(v)
        for n in (1, 2, 3):
            rep = min_uniform_avg_loss(n, v, j, u)
            lam = rep.implied_lambda
            ok = rep.in_bracket and lam >= 0
            rows.append(Row(f"bracket_v{v}_n{n}", "minimum uniform average loss bracket [mu - lambda, mu]",
                            float(lam), rep.lambda_bound, ok,
                            note=f"exact={rep.exact_value} mu_sum={rep.mu_sum}"))
    u = SemanticWeights.identification(2)
    ok = all(
        uniform_avg_loss_exact(universal_policy(1, u), n, 2, 1, u) == optimal_uniform_avg_loss(n, 2, 1, u)
        for n in (1, 2, 3)
    )
    rows.append(Row("universal_attains_optimum", "universal summarizer attains the exact optimum (v=2, j=1)",
                    "equal" if ok else "differs", "equal", ok))
    bounds = [lambda_bound(n, 2, 1, u) for n in (10**2, 10**4, 10**6)]
    ok = bounds[0] > bounds[1] > bounds[2] > 0 and bounds[2] < 0.05
    rows.append(Row("lambda_bound_decay", "lambda bound decreases toward 0", bounds[2], 0.05, ok))
    return rows


def check_eta_sandwich() -> list[Row]:
    bad = checked = 0
    for v, n in ((2, 1), (2, 2), (2, 3), (3, 1), (3, 2)):
        size = 1 << v
        for xn in itertools.product(range(size), repeat=n):
            est = laplace(xn, v)
            for j in range(1, v + 1):
                for y in consistent_summaries(xn[0], j, v):
                    covered = [a for a in range(size) if y.covers(a)]
                    q_hat = est.q_hat_mass(covered)
                    c = n + size
                    b = c - (c + 1) * q_hat
                    if b < 1:
                        continue
                    for W in (frozenset([xn[0]]), frozenset(covered[: len(covered) // 2 + 1])):
                        ratio = est.q_mass([a for a in covered if a in W]) / q_hat
                        value = eta(xn, y, W, v)
                        checked += 1
                        scale = 1 + epsilon(float((c + 1) * q_hat))
                        bad += not (ratio <= value <= float(ratio) * scale)
    return [Row("eta_sandwich", "eta between q/q_hat and q/q_hat (1 + epsilon)", bad, 0, bad == 0,
                note=f"{checked} cases")]


def check_supporting_bounds(rng: random.Random, points: int) -> list[Row]:
    rows = []
    worst = 0.0
    for a in range(13):
        for b in range(13):
            for c in (1.0, 0.5, 0.3):
                quad, _ = integrate.quad(lambda t: (c - t) ** a * t**b, 0, c, epsabs=1e-13, epsrel=1e-13)
                worst = max(worst, abs(quad - beta_integral(a, b, c)))
    rows.append(Row("beta_integral", "Beta integral closed form vs quadrature", worst, 1e-10, worst <= 1e-10))

    ok_norm = all(checks.sequence_normalization(n, size) == 1 for n in range(1, 6) for size in (2, 3, 4))
    rows.append(Row("type_normalization", "sum of 1/(|T||P_n|) over X^n is 1",
                    "exact" if ok_norm else "mismatch", 1, ok_norm))
    ok_avg = all(
        checks.average_type_mass(n, size, a) == Fraction(1, size)
        for n in range(1, 6) for size in (2, 3, 4) for a in range(size)
    )
    rows.append(Row("type_average", "average of rho(a) over types is 1/|X|",
                    "exact" if ok_avg else "mismatch", "1/|X|", ok_avg))
    ok_first = True
    for n in range(1, 5):
        for size in (2, 3):
            for counts in iter_types(n, size):
                for a in range(size):
                    ok_first &= checks.first_symbol_fraction(counts, a) == Fraction(counts[a], n)
    rows.append(Row("first_symbol_fraction", "fixing the type and x(1)=a leaves a fraction rho(a)",
                    "exact" if ok_first else "mismatch", "rho(a)", ok_first))

    bad = sum(not checks.robbins_holds(m) for m in range(1, 171))
    rows.append(Row("robbins_bounds", "Robbins bounds bracket m! for m <= 170", bad, 0, bad == 0))

    bad = 0
    for _ in range(points):
        a = rng.uniform(1e-6, 1000.0)
        b = rng.uniform(0, a)
        if 0 < b < a:
            bad += not checks.support1_holds(a, b)
    rows.append(Row("support_power_exp", "(a/b)^b e^-(a-b) <= 1", bad, 0, bad == 0, note=f"{points} points"))

    bad = 0
    for _ in range(points):
        a = rng.randint(2, 1000)
        b = rng.randint(1, a - 1)
        jj = rng.randint(1, 1000)
        bad += not checks.support2_holds(a, b, jj)
    rows.append(Row("support_stirling_ratio", "Stirling-tail ratio <= 1", bad, 0, bad == 0, note=f"{points} points"))

    bad = sum(not checks.super_loose_holds(b, c) for c in range(3, 1001) for b in range(1, c - 1))
    rows.append(Row("sqrt_ratio_vs_power", "sqrt(c/b) <= 2^((c-b)/2) for b+2 <= c <= 1000", bad, 0, bad == 0))

    bad = 0
    for k in range(1, 41):
        for t in (1.1, 1.5, 2.0, 2.5, 3.0, 5.0, 10.0):
            bad += not checks.zeta_tail_bounds_hold(k, t)
    rows.append(Row("zeta_tail_bounds", "integral bounds on sum_{m>k} m^-t", bad, 0, bad == 0))
    return rows


def check_f_divergence(rng: random.Random, trials: int = 300) -> list[Row]:
    bad = 0
    for _ in range(trials):
        v = rng.randint(1, 3)
        p = random_distribution(rng, v)
        x = rng.randrange(1 << v)
        j1, j2 = rng.randint(1, v), rng.randint(1, v)
        y1 = rng.choice(consistent_summaries(x, j1, v))
        y2 = rng.choice(consistent_summaries(x, j2, v))
        i1, i2 = interpretation(p, y1), interpretation(p, y2)
        if i1[x] < i2[x]:
            i1, i2 = i2, i1
        for g in GENERATORS.values():
            d1, d2 = f_divergence_point(g, x, i1), f_divergence_point(g, x, i2)
            bad += not (d1 <= d2 or abs(float(d1) - float(d2)) <= 1e-12)
    tv_bad = 0
    for _ in range(trials):
        v = rng.randint(1, 3)
        p = random_distribution(rng, v)
        x = rng.randrange(1 << v)
        y = rng.choice(consistent_summaries(x, rng.randint(1, v), v))
        i = interpretation(p, y)
        tv_bad += f_divergence_point(TOTAL_VARIATION, x, i) != set_loss({x}, i)
    return [
        Row("f_divergence_monotone", "pointwise f-divergence non-increasing in i_y(x)", bad, 0, bad == 0),
        Row("tv_matches_set_loss", "total-variation generator equals 1 - i_y(x)", tv_bad, 0, tv_bad == 0),
    ]


def check_convergence(trials: int, seed: int) -> list[Row]:
    v, j = 2, 1
    p = ReportDistribution.from_values(v, ["1/10", "1/5", "3/10", "2/5"])
    u = SemanticWeights.identification(v)
    table = convergence_experiment(v, j, p, u, [1, 10, 100, 1000], trials, seed)
    first, last = table[0], table[-1]
    return [Row("convergence_gap", "universal loss approaches the known-p minimum",
                last.gap, first.gap, last.gap < first.gap, seed,
                "gaps " + ", ".join(f"n={r.n}:{r.gap:.4g}" for r in table))]


def verify_all(level: str = "quick", seed: int = 12345,
               progress: Callable[[Row], None] | None = None) -> RunReport:
    if level not in LEVELS:
        raise ValueError(f"level must be one of {sorted(LEVELS)}")
    cfg = LEVELS[level]
    rng = random.Random(seed)
    start = time.perf_counter()
    report = RunReport(level=level, seed=seed)
    suites = [
        lambda: check_semantic_loss_forms(rng, cfg["loss_instances"]),
        lambda: check_known_p_optimality(rng, cfg["policy_instances"]),
        lambda: check_uniform_average_vs_mc(cfg["mc_samples"], seed),
        lambda: check_series(cfg["series_cmax"], rng),
        check_bracket,
        check_eta_sandwich,
        lambda: check_supporting_bounds(rng, cfg["grid_points"]),
        lambda: check_f_divergence(rng),
        lambda: check_convergence(cfg["convergence_trials"], seed),
    ]
    for suite in suites:
        for row in suite():
            report.rows.append(row)
            if progress:
                progress(row)
    report.wall_time = time.perf_counter() - start
    return report
