"""Semantic summarization of event reports: loss, optimal and universal summarizers."""

from .loss import (
    GENERATORS,
    INFINITE,
    ConvexGenerator,
    Interpretation,
    ReportDistribution,
    f_divergence_point,
    interpretation,
    semantic_loss,
    semantic_loss_definitional,
    set_loss,
)
from .model import Alphabet, DomainError, EmpiricalCounts, SemanticWeights, Summary, empirical
from .numerics import SeriesResult, beta_integral, epsilon, series_sum_factorial_ratio
from .summarizers import (
    eta,
    known_p_summarize,
    lambda_bound,
    laplace,
    min_semantic_loss,
    min_uniform_avg_loss,
    mu,
    uniform_avg_loss_exact,
    universal_summarize,
)

__all__ = [
    "Alphabet", "ConvexGenerator", "DomainError", "EmpiricalCounts", "GENERATORS", "INFINITE",
    "Interpretation", "ReportDistribution", "SemanticWeights", "SeriesResult", "Summary",
    "beta_integral", "empirical", "epsilon", "eta", "f_divergence_point", "interpretation",
    "known_p_summarize", "lambda_bound", "laplace", "min_semantic_loss", "min_uniform_avg_loss",
    "mu", "semantic_loss", "semantic_loss_definitional", "series_sum_factorial_ratio", "set_loss",
    "uniform_avg_loss_exact", "universal_summarize",
]
