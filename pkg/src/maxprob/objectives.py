"""Training objectives that score a model event against an oracle event.

Two events over the same finite variable V: a parameterized model M and a
fixed oracle M*.  Each is identified by the conditional distribution it
induces on V (see bounds).  Objectives come in two families crossed with
two assumptions:

kind
    "likelihood"    log P(M* | M): how much of the oracle the model explains.
    "intersection"  likelihood plus the log soft bound on the model event
                    itself, penalizing models that hoard probability mass.

assumption
    "cond-independent"  M and M* are conditionally independent given V, so
                        P(M, M* | v) factors and the posterior over outcomes
                        given both events is model * oracle / prior,
                        renormalized.
    "oracle-subset"     the oracle event is contained in the model event;
                        the likelihood becomes a soft minimum over the
                        oracle's support of log model(v) - log oracle(v).

Values are reported up to additive constants that do not depend on the
model parameters; anything dropped is listed by name in
dropped_constant_terms so downstream comparisons stay honest.

Gradients are taken with respect to the model's log-probabilities in the
gauge where the model stays normalized: every gradient is the difference
of two probability vectors (an attraction term and a repulsion term), so
its entries sum to zero and it maps through any parameterization Jacobian
unchanged.  gradient_terms exposes the two vectors directly; the Monte
Carlo estimator in optimize samples from them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distributions import (
    FiniteDistribution,
    Parameterization,
    apply_parameterization,
    parameterization_jacobian,
    _require_same_range,
)
from .errors import (
    EmptyIntersectionSupport,
    NonFiniteEncountered,
    NonPositiveAlpha,
    OracleSupportEscapesModel,
    RangeMismatch,
)
from .logspace import NEG_INF, logsumexp, soft_min
from .bounds import softmax_probability

__all__ = [
    "KINDS",
    "ASSUMPTIONS",
    "ARGMAX_LOG_TOL",
    "ObjectiveConfig",
    "ObjectiveValue",
    "GradientVector",
    "posterior_given_both",
    "likelihood_value",
    "likelihood_gradient",
    "intersection_value",
    "intersection_gradient",
    "subset_likelihood_value",
    "subset_likelihood_gradient",
    "subset_intersection_value",
    "subset_intersection_gradient",
    "likelihood_concentration_residual",
    "evaluate",
    "gradient_terms",
    "gradient_logp",
    "value_at_theta",
    "gradient_at_theta",
]

KINDS = ("likelihood", "intersection")
ASSUMPTIONS = ("cond-independent", "oracle-subset")

# Log-space tolerance when collecting the argmax set of oracle/prior ratios.
ARGMAX_LOG_TOL = 1e-12

# Name used in dropped_constant_terms for the oracle event's own log-probability,
# which shifts the likelihood by a model-independent amount.
_DROPPED_ORACLE_MASS = "log_prob_oracle_event"


@dataclass(frozen=True)
class ObjectiveConfig:
    """Which objective to evaluate, against which prior, at which sharpness."""

    kind: str
    assumption: str
    alpha: float
    prior: FiniteDistribution

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise RangeMismatch(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.assumption not in ASSUMPTIONS:
            raise RangeMismatch(f"assumption must be one of {ASSUMPTIONS}, got {self.assumption!r}")
        if not self.alpha > 0:
            raise NonPositiveAlpha(f"alpha must be positive, got {self.alpha!r}")


@dataclass(frozen=True)
class ObjectiveValue:
    """Objective value plus the names of any dropped additive constants."""

    value: float
    dropped_constant_terms: tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class GradientVector:
    """Gradient in the normalized-model gauge; d_logp entries sum to zero."""

    d_logp: np.ndarray
    d_theta: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        d = np.asarray(self.d_logp, dtype=float)
        d.setflags(write=False)
        object.__setattr__(self, "d_logp", d)
        if self.d_theta is not None:
            t = np.asarray(self.d_theta, dtype=float)
            t.setflags(write=False)
            object.__setattr__(self, "d_theta", t)


def _joint_support(model: FiniteDistribution, oracle: FiniteDistribution,
                   prior: FiniteDistribution) -> np.ndarray:
    _require_same_range(model, oracle, "objectives")
    _require_same_range(model, prior, "objectives")
    return model.support & oracle.support & prior.support


def posterior_given_both(model: FiniteDistribution, oracle: FiniteDistribution,
                         prior: FiniteDistribution) -> FiniteDistribution:
    """Distribution over outcomes given that both events occurred.

    Proportional to model(v) * oracle(v) / prior(v) on the outcomes all
    three support.  Outcomes outside the prior's support are almost-surely
    absent and contribute nothing.
    """
    supp = _joint_support(model, oracle, prior)
    if not np.any(supp):
        raise EmptyIntersectionSupport(
            "model, oracle, and prior share no supported outcome; the joint event is null")
    logpost = np.where(supp, model.logp + oracle.logp - prior.logp, NEG_INF)
    return FiniteDistribution.from_logp(model.range, logpost, normalize=True)


def likelihood_value(model: FiniteDistribution, oracle: FiniteDistribution,
                     prior: FiniteDistribution) -> ObjectiveValue:
    """log P(M* | M) up to the constant log P(M*).

    Equals log sum_v oracle(v) * model(v) / prior(v); -inf when the two
    events share no prior-supported outcome.
    """
    supp = _joint_support(model, oracle, prior)
    terms = (model.logp + oracle.logp - prior.logp)[supp]
    return ObjectiveValue(logsumexp(terms), (_DROPPED_ORACLE_MASS,))


def likelihood_gradient(model: FiniteDistribution, oracle: FiniteDistribution,
                        prior: FiniteDistribution) -> GradientVector:
    """Attraction toward the joint posterior, repulsion from the model itself."""
    post = posterior_given_both(model, oracle, prior)
    return GradientVector(post.probs - model.probs)


def _ratio_skeleton(model: FiniteDistribution, prior: FiniteDistribution,
                    alpha: float) -> np.ndarray:
    """Probability vector proportional to (model/prior) ** alpha on supp(model).

    This is the exact repulsion term of the soft-bound penalty.  For a
    uniform prior it coincides with alpha_skeleton(model, alpha).
    """
    supp = model.support
    scaled = alpha * (model.logp[supp] - prior.logp[supp])
    if np.any(np.isinf(scaled) & (scaled > 0)):
        raise NonFiniteEncountered(
            "model mass on a zero-prior outcome makes the soft bound -inf; gradient undefined")
    out = np.zeros(len(model.range))
    out[supp] = np.exp(scaled - logsumexp(scaled))
    return out


def intersection_value(model: FiniteDistribution, oracle: FiniteDistribution,
                       prior: FiniteDistribution, alpha: float) -> ObjectiveValue:
    """log P(M* | M) plus the log soft bound on P(M), dropping log P(M*).

    The second term charges the model for the probability its own event
    could at most carry, so maximizing the sum finds events that are both
    oracle-compatible and individually probable.
    """
    lik = likelihood_value(model, oracle, prior)
    soft = softmax_probability(prior, model, alpha)
    return ObjectiveValue(lik.value + soft, lik.dropped_constant_terms)


def intersection_gradient(model: FiniteDistribution, oracle: FiniteDistribution,
                          prior: FiniteDistribution, alpha: float) -> GradientVector:
    """Posterior attraction minus the soft-bound's ratio-skeleton repulsion.

    With a uniform prior the repulsion term is exactly the alpha-skeleton of
    the model, and the critical points are models whose alpha-skeleton equals
    the joint posterior.  At alpha = 1 (uniform prior) this collapses to the
    likelihood gradient.
    """
    if not alpha > 0:
        raise NonPositiveAlpha(f"alpha must be positive, got {alpha!r}")
    post = posterior_given_both(model, oracle, prior)
    return GradientVector(post.probs - _ratio_skeleton(model, prior, alpha))


def _check_subset(model: FiniteDistribution, oracle: FiniteDistribution) -> np.ndarray:
    _require_same_range(model, oracle, "objectives")
    osupp = oracle.support
    if np.any(osupp & ~model.support):
        raise OracleSupportEscapesModel(
            "subset assumption requires the model to support every oracle outcome")
    return osupp


def subset_likelihood_value(model: FiniteDistribution, oracle: FiniteDistribution,
                            alpha: float) -> ObjectiveValue:
    """Soft minimum over the oracle's support of log model(v) - log oracle(v).

    Under the subset assumption P(M* | M) is at most the smallest such
    ratio; the soft minimum keeps the objective differentiable and tends to
    the hard minimum as alpha grows.
    """
    if not alpha > 0:
        raise NonPositiveAlpha(f"alpha must be positive, got {alpha!r}")
    osupp = _check_subset(model, oracle)
    gaps = model.logp[osupp] - oracle.logp[osupp]
    return ObjectiveValue(soft_min(gaps, alpha))


def _softmin_weights(model: FiniteDistribution, oracle: FiniteDistribution,
                     alpha: float) -> np.ndarray:
    """Probability vector proportional to (oracle/model) ** alpha on supp(oracle)."""
    osupp = _check_subset(model, oracle)
    scaled = -alpha * (model.logp[osupp] - oracle.logp[osupp])
    out = np.zeros(len(model.range))
    out[osupp] = np.exp(scaled - logsumexp(scaled))
    return out


def subset_likelihood_gradient(model: FiniteDistribution, oracle: FiniteDistribution,
                               alpha: float) -> GradientVector:
    """Attraction toward the binding (smallest-ratio) outcomes, minus the model."""
    if not alpha > 0:
        raise NonPositiveAlpha(f"alpha must be positive, got {alpha!r}")
    return GradientVector(_softmin_weights(model, oracle, alpha) - model.probs)


def subset_intersection_value(model: FiniteDistribution, oracle: FiniteDistribution,
                              prior: FiniteDistribution, alpha: float) -> ObjectiveValue:
    """Subset likelihood plus the log soft bound on the model event."""
    lik = subset_likelihood_value(model, oracle, alpha)
    return ObjectiveValue(lik.value + softmax_probability(prior, model, alpha))


def subset_intersection_gradient(model: FiniteDistribution, oracle: FiniteDistribution,
                                 prior: FiniteDistribution, alpha: float) -> GradientVector:
    if not alpha > 0:
        raise NonPositiveAlpha(f"alpha must be positive, got {alpha!r}")
    w = _softmin_weights(model, oracle, alpha)
    return GradientVector(w - _ratio_skeleton(model, prior, alpha))


def likelihood_concentration_residual(model: FiniteDistribution, oracle: FiniteDistribution,
                                      prior: FiniteDistribution) -> float:
    """Model mass outside the argmax set of oracle(v) / prior(v).

    Maximizing the likelihood concentrates the model on the outcomes where
    the oracle most exceeds the prior; this residual is the mass not yet
    concentrated there.  Ratio ties are collected within ARGMAX_LOG_TOL in
    log space.
    """
    _require_same_range(model, oracle, "objectives")
    _require_same_range(model, prior, "objectives")
    # oracle mass 0 never binds; positive oracle mass on a zero-prior outcome dominates all
    ratios = np.where(oracle.support,
                      np.where(prior.support, oracle.logp - prior.logp, np.inf),
                      NEG_INF)
    top = float(np.max(ratios))
    if top == np.inf:
        in_set = ratios == np.inf
    else:
        in_set = ratios >= top - ARGMAX_LOG_TOL
    return float(model.probs[~in_set].sum())


def evaluate(config: ObjectiveConfig, model: FiniteDistribution,
             oracle: FiniteDistribution) -> ObjectiveValue:
    """Dispatch on (kind, assumption)."""
    if config.assumption == "cond-independent":
        if config.kind == "likelihood":
            return likelihood_value(model, oracle, config.prior)
        return intersection_value(model, oracle, config.prior, config.alpha)
    if config.kind == "likelihood":
        return subset_likelihood_value(model, oracle, config.alpha)
    return subset_intersection_value(model, oracle, config.prior, config.alpha)


def gradient_terms(config: ObjectiveConfig, model: FiniteDistribution,
                   oracle: FiniteDistribution) -> tuple[np.ndarray, np.ndarray]:
    """The two probability vectors whose difference is the exact d_logp.

    First the attraction term (posterior or soft-min weights), then the
    repulsion term (model or ratio skeleton).  The Monte Carlo gradient
    estimator samples one empirical distribution from each.
    """
    if config.assumption == "cond-independent":
        attract = posterior_given_both(model, oracle, config.prior).probs
    else:
        attract = _softmin_weights(model, oracle, config.alpha)
    if config.kind == "likelihood":
        repulse = model.probs
    else:
        repulse = _ratio_skeleton(model, config.prior, config.alpha)
    return attract, repulse


def gradient_logp(config: ObjectiveConfig, model: FiniteDistribution,
                  oracle: FiniteDistribution) -> GradientVector:
    attract, repulse = gradient_terms(config, model, oracle)
    return GradientVector(attract - repulse)


def value_at_theta(config: ObjectiveConfig, oracle: FiniteDistribution,
                   p: Parameterization, theta) -> float:
    """Objective value of the parameterized model at theta."""
    return evaluate(config, apply_parameterization(p, theta), oracle).value


def gradient_at_theta(config: ObjectiveConfig, oracle: FiniteDistribution,
                      p: Parameterization, theta) -> GradientVector:
    """d_logp pulled back through the parameterization Jacobian to d_theta."""
    model = apply_parameterization(p, theta)
    g = gradient_logp(config, model, oracle)
    jac = parameterization_jacobian(p, theta)
    return GradientVector(g.d_logp, jac.T @ g.d_logp)
