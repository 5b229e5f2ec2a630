"""Grid Bayesian filter kept in log space.

A :class:`Belief` carries the prior log-weights and the accumulated
log-likelihood of each grid model, so the posterior can always be rebuilt
as ``prior * exp(cum_loglik)``.  Normalization uses log-sum-exp because the
accumulated log-likelihoods grow linearly with the number of observations.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import logsumexp

from .env import Environment, ModelGrid
from .errors import NoObservations, ZeroLikelihood


@dataclass(frozen=True, eq=False)
class Belief:
    log_post: np.ndarray
    t: int
    cum_loglik: np.ndarray
    cum_loglik_true: float
    log_prior: np.ndarray

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_post)

    def recomputed_log_post(self) -> np.ndarray:
        lp = self.log_prior + self.cum_loglik
        return lp - logsumexp(lp)


def _normalize(lp: np.ndarray) -> np.ndarray:
    return lp - logsumexp(lp)


def init_belief(grid: ModelGrid) -> Belief:
    lp = np.asarray(grid.log_prior, dtype=float)
    g = lp.shape[0]
    return Belief(_normalize(lp), 0, np.zeros(g), 0.0, lp.copy())


def belief_from_weights(weights, t: int = 0) -> Belief:
    """A belief with the given weights treated as its prior (zero weights allowed)."""
    w = np.asarray(weights, dtype=float)
    with np.errstate(divide="ignore"):
        lp = np.log(w / w.sum())
    return Belief(lp.copy(), t, np.zeros_like(lp), 0.0, lp)


def update_belief(env: Environment, belief: Belief, action, y) -> Belief:
    """One step of Bayes' rule after observing ``y`` from ``action``."""
    a = env.action_index(action)
    ll, ll_true = env.log_likelihood(a, y)
    cum = belief.cum_loglik + ll
    lp = belief.log_prior + cum
    if not np.any(np.isfinite(lp)):
        raise ZeroLikelihood(f"every grid model gives zero likelihood to {y!r} after {env.actions[a]}")
    return replace(belief, log_post=_normalize(lp), t=belief.t + 1, cum_loglik=cum,
                   cum_loglik_true=belief.cum_loglik_true + ll_true)


def log_likelihood_avg(belief: Belief, grid_index: int) -> float:
    """L_t(theta): average log-likelihood ratio of the truth against one grid model."""
    if belief.t == 0:
        raise NoObservations("no observations yet")
    return float((belief.cum_loglik_true - belief.cum_loglik[grid_index]) / belief.t)


def posterior_mean(env: Environment, belief: Belief) -> np.ndarray:
    return np.exp(belief.log_post) @ env.models.points


def predictive_pmf(env: Environment, belief: Belief) -> np.ndarray:
    """(X, Y) mixture pmf Q_bar_mu(y | x) for discrete families."""
    return np.einsum("g,gxy->xy", np.exp(belief.log_post), env.grid_pmf)
