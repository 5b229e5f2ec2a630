"""Kullback-Leibler divergence between the truth and the models on the grid.

``K(theta, sigma)`` is the sigma-weighted expected log-likelihood ratio of
the true consequence distribution against model ``theta``.  It is linear in
sigma, so on a finite grid every quantity reduces to one matrix product with
the cached ``(X, G)`` table ``env.kl_by_action``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .env import Environment, as_action_dist, project_to_simplex
from .errors import DomainError, GridMismatch, NonUniqueMinimizer, SupportError

TIE_TOL = 1e-9
CURVATURE_THRESHOLD = 1e-8


@dataclass(frozen=True)
class KldResult:
    k_star: float
    minimizers: tuple[int, ...]
    values: np.ndarray | None = None
    refined_theta: float | None = None
    refined_k_star: float | None = None


def _sigma(env: Environment, sigma) -> np.ndarray:
    try:
        return as_action_dist(sigma, env.n_actions)
    except ValueError as exc:
        raise DomainError(str(exc)) from None


def kl_divergence(env: Environment, theta, sigma) -> float:
    """Closed-form K(theta, sigma) in nats; ``theta`` may lie off the grid."""
    s = _sigma(env, sigma)
    theta = env.check_domain(theta)
    if not env.is_discrete:
        diff = env.truth.means - theta
        return float(0.5 * np.sum(s * np.sum(diff * diff, axis=1)))
    q = env.truth.pmf
    qm = env.model_pmf(theta)
    total = 0.0
    for x in np.nonzero(s > 0.0)[0]:
        pos = q[x] > 0.0
        if np.any(qm[x][pos] <= 0.0):
            raise SupportError(f"model {theta.tolist()} gives zero mass to a consequence of {env.actions[x]}")
        total += s[x] * float(np.sum(q[x][pos] * (np.log(q[x][pos]) - np.log(qm[x][pos]))))
    return total


def kl_values(env: Environment, sigma) -> np.ndarray:
    """K(theta_g, sigma) for every grid point; accepts a single sigma or a stack."""
    s = np.asarray(sigma, dtype=float)
    ka = env.kl_by_action
    if not np.all(np.isfinite(ka)):
        # 0 * inf must count as 0: only actions actually played matter
        with np.errstate(invalid="ignore"):
            terms = s[..., :, None] * ka
        terms = np.where(s[..., :, None] > 0.0, terms, 0.0)
        return terms.sum(axis=-2)
    return s @ ka


def _parabola_vertex(x0, x1, x2, f0, f1, f2):
    """Vertex of the parabola through three points, or None when it is not convex."""
    d1 = (f1 - f0) / (x1 - x0)
    d2 = (f2 - f1) / (x2 - x1)
    two_a = (d2 - d1) / (0.5 * (x2 - x0))
    if not two_a > 0.0:
        return None
    xv = 0.5 * (x0 + x1) - d1 / two_a
    fv = f1 - 0.5 * two_a * (x1 - xv) ** 2
    return xv, fv


def minimize_kld(env: Environment, sigma, tie_tol: float = TIE_TOL, keep_values: bool = True) -> KldResult:
    """Scan the grid for K*(sigma) and the tie set; refine the argmin on 1-d grids."""
    if tie_tol < 0:
        raise ValueError("tie_tol must be non-negative")
    s = _sigma(env, sigma)
    vals = kl_values(env, s)
    k_star = float(np.min(vals))
    mins = tuple(int(i) for i in np.nonzero(vals <= k_star + tie_tol)[0])
    refined_theta = refined_k = None
    grid = env.models
    if grid.is_1d:
        pts = grid.points[:, 0]
        i = int(np.argmin(vals))
        refined_theta, refined_k = float(pts[i]), k_star
        if 0 < i < grid.size - 1 and np.all(np.isfinite(vals[i - 1: i + 2])):
            vx = _parabola_vertex(pts[i - 1], pts[i], pts[i + 1], vals[i - 1], vals[i], vals[i + 1])
            if vx is not None:
                xv = min(max(vx[0], pts[i - 1]), pts[i + 1])
                refined_theta, refined_k = float(xv), float(max(min(vx[1], k_star), 0.0))
    return KldResult(k_star, mins, vals if keep_values else None, refined_theta, refined_k)


def closest_model(env: Environment, sigma, tie_tol: float = TIE_TOL) -> float:
    """Unique closest model on a 1-d grid, refined below the grid spacing."""
    if not env.models.is_1d:
        raise DomainError("closest_model needs a one-dimensional model grid")
    res = minimize_kld(env, sigma, tie_tol, keep_values=False)
    idx = np.asarray(res.minimizers)
    if idx.size > 1 and np.any(np.diff(idx) > 1):
        pts = env.models.points[idx, 0]
        raise NonUniqueMinimizer(f"non-adjacent grid models tie at K* = {res.k_star:.6g}: {pts.tolist()}")
    return res.refined_theta


def has_analytic_minimizer(env: Environment) -> bool:
    return env.models.family_kind in ("bernoulli_common", "gaussian_common_mean")


def analytic_minimizer(env: Environment, sigma) -> np.ndarray:
    """Exact closest model over the whole parameter domain for the built-in families.

    Both built-in families make K(., sigma) a convex function of the mixture
    mean, so the minimizer is that mean projected onto the domain.
    """
    s = np.asarray(sigma, dtype=float)
    grid = env.models
    if grid.family_kind == "bernoulli_common":
        m = (s @ env.truth.pmf[:, 1])[..., None]
    elif grid.family_kind == "gaussian_common_mean":
        m = s @ env.truth.means
    else:
        raise DomainError("no closed-form minimizer for tabulated families")
    if grid.domain == "simplex":
        if m.ndim == 1:
            return project_to_simplex(m)
        return np.apply_along_axis(project_to_simplex, -1, m)
    return np.clip(m, grid.lo, grid.hi)


def model_of(env: Environment, sigma) -> np.ndarray:
    """theta(sigma): closed form when available, refined grid argmin otherwise."""
    if has_analytic_minimizer(env):
        return analytic_minimizer(env, sigma)
    s = np.asarray(sigma, dtype=float)
    if s.ndim == 1:
        if env.models.is_1d:
            return np.array([closest_model(env, s)])
        res = minimize_kld(env, s, keep_values=False)
        return env.models.points[res.minimizers[0]]
    return np.stack([model_of(env, row) for row in s])


def closest_models(env: Environment, sigma, tie_tol: float = TIE_TOL) -> np.ndarray:
    """All closest models for one sigma as rows (a single row for the built-in families)."""
    if has_analytic_minimizer(env):
        return analytic_minimizer(env, sigma)[None, :]
    res = minimize_kld(env, sigma, tie_tol, keep_values=False)
    return env.models.points[list(res.minimizers)]


def weighted_kl_gap(env: Environment, sigma, belief) -> float:
    """Posterior-weighted excess divergence, sum_g mu(g) (K(theta_g, sigma) - K*(sigma))."""
    from ._engine import weighted_gap

    lp = belief.log_prior + belief.cum_loglik
    if lp.shape != (env.models.size,):
        raise GridMismatch(f"belief has {lp.shape[0]} weights, grid has {env.models.size} points")
    s = _sigma(env, sigma)
    return float(weighted_gap(env.kl_by_action, s, lp))


@dataclass(frozen=True)
class CurvatureCheck:
    theta: float
    curvature: float
    interior: bool
    passed: bool


def second_order_check(env: Environment, sigma, h: float | None = None,
                       threshold: float = CURVATURE_THRESHOLD) -> CurvatureCheck:
    """Central second difference of K(., sigma) at the refined minimizer (1-d only).

    Boundary minimizers are reported with ``interior=False`` and pass
    vacuously; the check flags, it does not raise.
    """
    if not env.models.is_1d:
        raise DomainError("second-order check needs a one-dimensional grid")
    theta = float(model_of(env, sigma)[0])
    lo, hi = float(env.models.lo[0]), float(env.models.hi[0])
    if h is None:
        h = (hi - lo) * 1e-4
    interior = lo + h <= theta <= hi - h
    if not interior:
        return CurvatureCheck(theta, float("nan"), False, True)
    f = [kl_divergence(env, [theta + k * h], sigma) for k in (-1, 0, 1)]
    curv = (f[0] - 2 * f[1] + f[2]) / (h * h)
    return CurvatureCheck(theta, curv, True, bool(curv > threshold))
