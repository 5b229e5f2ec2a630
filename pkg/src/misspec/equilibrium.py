"""Equilibria of the inclusion and numerical stability certificates.

Stability verdicts come from sampling: initial points are drawn around a
candidate set, a bundle of inclusion branches is integrated from each, and
the verdict records whether every sampled solution behaved as required.
``Inconclusive`` is returned whenever the sample does not support the claim.

For one-dimensional parameter spaces the analysis is exact: the map
``theta -> theta(Delta F(delta_theta))`` is a step correspondence whose
diagonal crossings are the equilibrium models.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from .env import Environment, project_rows_to_simplex, project_to_simplex, simplex_grid
from .errors import (
    IdentifiabilityFailure,
    MissingBasin,
    MonotonicityViolation,
    NonUniqueMinimizer,
    NotAnEquilibrium,
    ResolutionTooCoarse,
)
from .inclusion import (
    BranchSample,
    action_mask,
    action_masks,
    hull_distance,
    integrate_di,
    integrate_perturbed_di,
    stencil_directions,
)
from .kld import TIE_TOL, closest_models, has_analytic_minimizer, model_of
from .policy import Myopic, Table1D, _argmax_mask, labels_of, model_action_masks, model_payoffs

EQ_TOL = 1e-6
ATTRACTING = "Attracting"
ROBUSTLY_ATTRACTING = "RobustlyAttracting"
REPELLING = "Repelling"
INCONCLUSIVE = "Inconclusive"
ATTRACTING_MODEL = "AttractingModel"
REPELLING_MODEL = "RepellingModel"
NEITHER = "Neither"


# ---------------------------------------------------------------------------
# residuals and search


def equilibrium_residual(env: Environment, policy, sigma) -> float:
    """Distance from ``sigma`` to the face spanned by F(Delta Theta(sigma)); zero at equilibria."""
    s = np.asarray(sigma, dtype=float)
    return hull_distance(s, action_mask(env, policy, s))


def _relaxed_residuals(env, policy, pts: np.ndarray, eps: float) -> np.ndarray:
    """Residuals with action sets enlarged over the stencil of radius ``eps``."""
    n, x = pts.shape
    if eps > 0:
        d = stencil_directions(x)
        cloud = project_rows_to_simplex((pts[:, None, :] + eps * d[None]).reshape(-1, x))
        masks = action_masks(env, policy, np.vstack([pts, cloud]))
        m = masks[:n] | masks[n:].reshape(n, d.shape[0], x).any(axis=1)
    else:
        m = action_masks(env, policy, pts)
    return np.array([hull_distance(p, mk) for p, mk in zip(pts, m)])


def _components(pts: np.ndarray, radius: float) -> list[np.ndarray]:
    """Connected components (index arrays) of points under the ``radius`` adjacency."""
    n = pts.shape[0]
    seen = np.zeros(n, dtype=bool)
    out = []
    for i in range(n):
        if seen[i]:
            continue
        stack, comp = [i], []
        seen[i] = True
        while stack:
            j = stack.pop()
            comp.append(j)
            near = np.nonzero((np.linalg.norm(pts - pts[j], axis=1) <= radius) & ~seen)[0]
            seen[near] = True
            stack.extend(near.tolist())
        out.append(np.sort(np.asarray(comp)))
    return out


def _local_offsets(x: int, reach: int = 3) -> np.ndarray:
    """Integer lattice offsets with zero sum and entries in [-reach, reach]."""
    rng = range(-reach, reach + 1)
    rows = [z + (-sum(z),) for z in itertools.product(rng, repeat=x - 1) if abs(sum(z)) <= reach]
    return np.asarray(rows, dtype=float)


@dataclass(frozen=True, eq=False)
class EquilibriumComponent:
    """An isolated equilibrium (``point``) or a connected set of them (``points``)."""

    point: np.ndarray
    points: np.ndarray
    is_continuum: bool
    residual: float

    def __array__(self, dtype=None):
        return np.asarray(self.point, dtype=dtype)


def _zoom(env, policy, center: np.ndarray, h: float, tol: float, floor: float = 1e-11) -> np.ndarray:
    x = center.shape[0]
    offs = _local_offsets(x)
    while h > floor:
        h *= 0.5
        cand = center[None, :] + h * offs
        cand = cand[np.all(cand >= -1e-15, axis=1)]
        cand = np.maximum(cand, 0.0)
        cand /= cand.sum(axis=1, keepdims=True)
        r = _relaxed_residuals(env, policy, cand, h)
        keep = cand[r <= tol]
        if keep.shape[0] == 0:
            break
        center = keep.mean(axis=0)
    return center


def find_equilibria(env: Environment, policy, resolution: int = 30, tol: float = EQ_TOL,
                    continuum_spacings: float = 5.0) -> list[EquilibriumComponent]:
    """Scan a barycentric grid for zeros of the relaxed residual and refine each cluster.

    Grid points whose residual, with action sets enlarged to the grid
    spacing, is below ``tol`` are clustered by adjacency.  A cluster wider
    than ``continuum_spacings`` grid steps is reported as a connected set of
    equilibria; every other cluster is zoomed in on a shrinking local
    lattice until the spacing is negligible.
    """
    x = env.n_actions
    h = 1.0 / resolution
    pts = simplex_grid(x, resolution)
    r = _relaxed_residuals(env, policy, pts, h)
    cand = pts[r <= tol]
    out: list[EquilibriumComponent] = []
    adj = h * math.sqrt(2.0) * 1.01
    for comp in _components(cand, adj):
        cp = cand[comp]
        extent = max(float(np.max(np.linalg.norm(cp - cp[0], axis=1))), 0.0)
        if cp.shape[0] > 1:
            extent = max(float(np.linalg.norm(a - b)) for a, b in itertools.combinations(cp, 2))
        if extent > continuum_spacings * h:
            exact = np.array([equilibrium_residual(env, policy, p) for p in cp])
            members = cp[exact <= tol] if np.any(exact <= tol) else cp
            out.append(EquilibriumComponent(members.mean(axis=0), members, True, float(exact.min())))
            continue
        exact = np.array([equilibrium_residual(env, policy, p) for p in cp])
        zeros = cp[exact <= tol]
        if zeros.shape[0] > 1 and len(_components(zeros, adj)) > 1:
            raise ResolutionTooCoarse(
                f"separate equilibria merge in one cluster at resolution {resolution}: {zeros.tolist()}")
        center = _zoom(env, policy, cp.mean(axis=0), h, tol)
        res = equilibrium_residual(env, policy, center)
        out.append(EquilibriumComponent(center, center[None, :], False, res))
    # deduplicate isolated points closer than 2 / resolution
    kept: list[EquilibriumComponent] = []
    for c in out:
        if not c.is_continuum and any(
                np.min(np.linalg.norm(k.points - c.point, axis=1)) <= 2.0 * h for k in kept):
            continue
        kept.append(c)
    return kept


# ---------------------------------------------------------------------------
# candidate sets and certificates


@dataclass(frozen=True, eq=False)
class CandidateSet:
    """A point, a polyline (``closed=False``) or a closed polygon in the simplex."""

    vertices: np.ndarray
    closed: bool = False
    label: str = ""

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.ndim != 2 or v.size == 0 or not np.all(np.isfinite(v)):
            raise ValueError("candidate set needs finite vertices")
        object.__setattr__(self, "vertices", v)

    def _segments(self):
        v = self.vertices
        if v.shape[0] == 1:
            return v, v
        if self.closed:
            return v, np.roll(v, -1, axis=0)
        return v[:-1], v[1:]

    def distance(self, sigma) -> np.ndarray:
        """Distance from each row of ``sigma`` to the set."""
        s = np.atleast_2d(np.asarray(sigma, dtype=float))
        a, b = self._segments()
        ab = b - a
        den = np.einsum("kx,kx->k", ab, ab)
        num = np.einsum("nkx,kx->nk", s[:, None, :] - a[None], ab)
        lam = np.where(den > 0, np.clip(num / np.where(den > 0, den, 1.0), 0.0, 1.0), 0.0)
        proj = a[None] + lam[..., None] * ab[None]
        return np.min(np.linalg.norm(s[:, None, :] - proj, axis=2), axis=1)

    def sample_base(self, rng: np.random.Generator) -> np.ndarray:
        a, b = self._segments()
        k = int(rng.integers(a.shape[0]))
        return a[k] + rng.random() * (b[k] - a[k])

    def document(self) -> dict:
        return {"vertices": self.vertices.tolist(), "closed": self.closed, "label": self.label}


def as_candidate(a) -> CandidateSet:
    if isinstance(a, CandidateSet):
        return a
    if isinstance(a, EquilibriumComponent):
        return CandidateSet(a.points if a.is_continuum else a.point)
    return CandidateSet(np.asarray(a, dtype=float))


def sample_ball(rng: np.random.Generator, base: np.ndarray, radius: float) -> np.ndarray:
    """A point of the simplex within ``radius`` of ``base`` (uniform direction and volume)."""
    n = base.shape[0]
    d = rng.standard_normal(n)
    d -= d.mean()
    nd = np.linalg.norm(d)
    if nd == 0.0 or n == 1:
        return base.copy()
    r = radius * rng.random() ** (1.0 / max(n - 1, 1))
    return project_to_simplex(base + r * d / nd)


@dataclass(eq=False)
class StabilityCertificate:
    subject: dict
    verdict: str
    parameters: dict
    evidence: list = field(default_factory=list)

    def document(self) -> dict:
        return {"subject": self.subject, "verdict": self.verdict, "parameters": self.parameters,
                "evidence": self.evidence}

    def write(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.document(), indent=2, default=_jsonable), encoding="utf-8")
        return path


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"cannot serialize {type(o)}")


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def test_attracting(env: Environment, policy, A, U_radius: float = 0.4, eps: float = 0.05, T: float = 10.0,
                    n_init: int = 16, n_branch: int = 8, step: float = 1e-2, seed: int = 0,
                    initial_points=None) -> StabilityCertificate:
    """Every sampled solution from the ``U_radius`` neighbourhood stays within ``eps`` of A on [T, 2T].

    ``initial_points`` replaces the sampled starts, for neighbourhoods that
    are not balls around A.
    """
    if not eps < U_radius:
        raise ValueError("need eps < U_radius")
    cand = as_candidate(A)
    rng = _rng(seed)
    if initial_points is None:
        starts = [sample_ball(rng, cand.sample_base(rng), U_radius) for _ in range(n_init)]
    else:
        starts = [np.asarray(p, dtype=float) for p in initial_points]
    strategy = BranchSample(n_branch, seed)
    ok = True
    evidence = []
    for i, s0 in enumerate(starts):
        worst = 0.0
        for path in integrate_di(env, policy, s0, 2.0 * T, step, strategy):
            tail = path.times >= T
            worst = max(worst, float(cand.distance(path.states[tail]).max()))
        evidence.append({"start": s0.tolist(), "max_tail_distance": worst})
        ok &= worst < eps
    return StabilityCertificate(
        cand.document(), ATTRACTING if ok else INCONCLUSIVE,
        {"U_radius": U_radius, "eps": eps, "T": T, "n_init": len(starts), "n_branch": n_branch,
         "step": step, "seed": seed, "custom_starts": initial_points is not None},
        evidence)


def test_repelling(env: Environment, policy, sigma_star, U_radius: float = 0.05, T: float = 20.0,
                   n_sigma: int = 8, beta_ladder: Sequence[float] = (0.9, 0.99, 0.999), n_branch: int = 8,
                   step: float = 1e-2, seed: int = 0, tol: float = EQ_TOL) -> StabilityCertificate:
    """For sampled sigma near sigma*, x in F(Delta Theta(sigma*)) and each rung of the ladder,
    some beta above the rung makes every branch from beta sigma + (1 - beta) delta_x leave the ball."""
    s_star = np.asarray(sigma_star, dtype=float)
    res = equilibrium_residual(env, policy, s_star)
    if res > tol:
        raise NotAnEquilibrium(f"residual {res:.3g} exceeds {tol:.3g}")
    xs = np.nonzero(action_mask(env, policy, s_star))[0]
    rng = _rng(seed)
    strategy = BranchSample(n_branch, seed)
    sigmas = [sample_ball(rng, s_star, U_radius) for _ in range(n_sigma)]
    ok = True
    evidence = []
    for s in sigmas:
        for x in xs:
            for bbar in beta_ladder:
                found = None
                for frac in (0.25, 0.5, 0.75):
                    beta = bbar + (1.0 - bbar) * frac
                    s0 = beta * s
                    s0[x] += 1.0 - beta
                    exits = []
                    outside = lambda v: float(np.linalg.norm(v - s_star)) > U_radius  # noqa: E731
                    for path in integrate_di(env, policy, s0, T, step, strategy, stop=outside):
                        out = np.nonzero(np.linalg.norm(path.states - s_star, axis=1) > U_radius)[0]
                        exits.append(float(path.times[out[0]]) if out.size else None)
                    if all(e is not None for e in exits):
                        found = (beta, max(exits))
                        break
                evidence.append({"sigma": s.tolist(), "action": env.actions[x], "beta_bar": bbar,
                                 "beta": None if found is None else found[0],
                                 "exit_time": None if found is None else found[1]})
                ok &= found is not None
    return StabilityCertificate(
        {"point": s_star.tolist()}, REPELLING if ok else INCONCLUSIVE,
        {"U_radius": U_radius, "T": T, "n_sigma": n_sigma, "beta_ladder": list(beta_ladder),
         "n_branch": n_branch, "step": step, "seed": seed},
        evidence)


def test_robust_attracting(env: Environment, policy, A, zeta: float, eps: float, T: float = 10.0,
                           samples: int = 8, basin: StabilityCertificate | None = None, n_branch: int = 4,
                           step: float = 1e-2, seed: int = 0) -> StabilityCertificate:
    """Perturbed-inclusion branches from the ``zeta`` neighbourhood never leave the basin.

    ``basin`` must be an ``Attracting`` certificate for the same set; its
    ``U_radius`` is the basin used here.
    """
    if basin is None or basin.verdict != ATTRACTING:
        raise MissingBasin("robust attraction needs an Attracting certificate for the set")
    U = float(basin.parameters["U_radius"])
    cand = as_candidate(A)
    rng = _rng(seed)
    strategy = BranchSample(n_branch, seed)
    ok = True
    evidence = []
    for _ in range(samples):
        s0 = sample_ball(rng, cand.sample_base(rng), zeta)
        worst = 0.0
        for path in integrate_perturbed_di(env, policy, s0, 2.0 * T, step, eps, strategy):
            worst = max(worst, float(cand.distance(path.states).max()))
        evidence.append({"start": s0.tolist(), "max_distance": worst})
        ok &= worst < U
    return StabilityCertificate(
        cand.document(), ROBUSTLY_ATTRACTING if ok else INCONCLUSIVE,
        {"zeta": zeta, "eps": eps, "T": T, "samples": samples, "n_branch": n_branch, "basin_radius": U,
         "step": step, "seed": seed},
        evidence)


def best_response_cycle(coef: np.ndarray, start=None, max_switches: int = 200_000,
                        tol: float = 1e-14) -> CandidateSet:
    """Limit polygon of best-response dynamics for linear payoffs ``coef @ sigma`` on the 3-simplex.

    Segments towards the current best response are followed exactly and
    each switching point solves a linear equation in ``exp(-t)``; the
    return map is iterated until the switching points stop moving.
    """
    c = np.asarray(coef, dtype=float)
    n = c.shape[0]
    s = np.full(n, 1.0 / n) if start is None else np.asarray(start, dtype=float)
    if start is None:
        s = project_to_simplex(s + 0.01 * (np.eye(n)[0] - s))
    k = int(np.argmax(c @ s))
    prev = -1
    pts: list[np.ndarray] = []
    for _ in range(max_switches):
        e = np.eye(n)[k]
        best_r, best_j = -1.0, -1
        for j in range(n):
            if j in (k, prev):
                continue
            alpha = (c[j] - c[k]) @ e
            beta = (c[j] - c[k]) @ (s - e)
            if beta == 0.0:
                continue
            r = -alpha / beta
            if 0.0 < r < 1.0 and r > best_r:
                best_r, best_j = r, j
        if best_j < 0:
            raise ValueError("best-response path reaches a vertex without switching")
        s = e + (s - e) * best_r
        prev, k = k, best_j
        pts.append(s.copy())
        if len(pts) >= 2 * n and np.max(np.abs(pts[-1] - pts[-1 - n])) < tol:
            break
    return CandidateSet(np.asarray(pts[-n:]), closed=True, label="best_response_cycle")


# ---------------------------------------------------------------------------
# one-dimensional analysis


def _theta_pure(env: Environment) -> np.ndarray:
    """theta(delta_x) for every action."""
    return model_of(env, np.eye(env.n_actions))[:, 0]


def _theta_masks(env: Environment, policy, thetas: np.ndarray) -> np.ndarray:
    return model_action_masks(env, policy, np.asarray(thetas, dtype=float)[:, None])


def _require_1d(env: Environment):
    if not env.models.is_1d:
        raise ValueError("one-dimensional parameter space required")


def _switch_points(env: Environment, policy, n_scan: int = 20001) -> np.ndarray:
    """Parameters where F(delta_theta) changes, exact for tables and bisected otherwise."""
    lo, hi = float(env.models.lo[0]), float(env.models.hi[0])
    if isinstance(policy, Table1D):
        return np.array([b for b in policy.breakpoints if lo < b < hi])
    if isinstance(policy, Myopic):
        policy = Myopic(0.0)  # exact argmax: each switch is a single crossing
    grid = np.linspace(lo, hi, n_scan)
    m = _theta_masks(env, policy, grid)
    out = []
    for i in np.nonzero(np.any(m[1:] != m[:-1], axis=1))[0]:
        a, b = grid[i], grid[i + 1]
        ma = m[i]
        for _ in range(200):
            mid = 0.5 * (a + b)
            if mid in (a, b):
                break
            if np.array_equal(_theta_masks(env, policy, [mid])[0], ma):
                a = mid
            else:
                b = mid
        c = 0.5 * (a + b)
        # a grid point sitting on an exact tie reports the same switch twice
        if out and c - out[-1] <= 1e-7:
            out[-1] = 0.5 * (out[-1] + c)
        else:
            out.append(c)
    return np.asarray(out)


def _pure_actions_at(env: Environment, policy, theta: float, pure: np.ndarray) -> np.ndarray:
    m = _theta_masks(env, policy, [theta])[0]
    return pure[m]


def classify_model(env: Environment, policy, theta_star: float, eps: float = 0.1, n_samples: int = 2001,
                   halvings: int = 20) -> str:
    """Attracting / repelling model test on the open windows either side of ``theta_star``.

    The sign conditions are checked on ``n_samples`` points of each window
    plus every switch point inside it.  Both definitions are existential
    in the window width, so widths ``eps / 2**k`` are tried in turn.
    """
    _require_1d(env)
    if not has_analytic_minimizer(env):
        try:
            pure = np.array([model_of(env, row)[0] for row in np.eye(env.n_actions)])
        except NonUniqueMinimizer as exc:
            raise IdentifiabilityFailure(str(exc)) from exc
    else:
        pure = _theta_pure(env)
    lo, hi = float(env.models.lo[0]), float(env.models.hi[0])
    ts = float(theta_star)
    switches = _switch_points(env, policy)

    def window(a, b):
        a, b = max(a, lo), min(b, hi)
        if b <= a:
            return np.zeros(0)
        inner = np.linspace(a, b, n_samples + 2)[1:-1]
        extra = switches[(switches > a) & (switches < b)]
        return np.concatenate([inner, extra])

    def values(thetas):
        if thetas.size == 0:
            return [np.zeros(0)]
        m = _theta_masks(env, policy, thetas)
        return [pure[row] for row in m]

    attracting = repelling = False
    interior = lo < ts < hi
    at_star = _pure_actions_at(env, policy, ts, pure)
    excluded = np.any(np.abs(at_star - ts) <= 1e-12)
    for k in range(halvings + 1):
        e = eps / 2 ** k
        below = values(window(ts - e, ts))
        above = values(window(ts, ts + e))
        if not attracting:
            attracting = all(np.all(v >= ts - 1e-12) for v in below) and all(np.all(v <= ts + 1e-12) for v in above)
        if not repelling and interior and not excluded:
            repelling = all(np.all(v <= ts - e + 1e-12) for v in below) and \
                all(np.all(v >= ts + e - 1e-12) for v in above)
    if attracting:
        return ATTRACTING_MODEL
    if repelling:
        return REPELLING_MODEL
    return NEITHER


@dataclass(frozen=True)
class FixedPoint:
    theta: float
    case: int  # 1 vertical end-point, 2 vertical interior, 3 horizontal interior, 4 domain boundary


@dataclass(frozen=True, eq=False)
class Staircase:
    breakpoints: np.ndarray  # a_0 = lo < a_1 < ... < a_K = hi
    levels: list  # (min, max) of theta(delta_x) over x in F on each open interval
    verticals: list  # (min, max) at each interior breakpoint a_1 .. a_{K-1}
    interval_actions: list
    breakpoint_actions: list
    fixed_points: list
    monotone: bool

    def B(self, theta: float) -> tuple[float, float]:
        """The correspondence value as a closed interval."""
        bp = self.breakpoints
        for i in range(1, bp.shape[0] - 1):
            if abs(theta - bp[i]) <= 1e-12:
                return self.verticals[i - 1]
        i = int(np.clip(np.searchsorted(bp, theta, side="right") - 1, 0, len(self.levels) - 1))
        return self.levels[i]


def build_staircase(env: Environment, policy, require_monotone: bool = True) -> Staircase:
    """Step structure of theta -> theta(Delta F(delta_theta)) with its diagonal crossings."""
    _require_1d(env)
    pure = _theta_pure(env)
    lo, hi = float(env.models.lo[0]), float(env.models.hi[0])
    sw = _switch_points(env, policy)
    bp = np.concatenate([[lo], sw, [hi]])
    levels, verticals, ia, ba = [], [], [], []
    for i in range(bp.shape[0] - 1):
        mid = 0.5 * (bp[i] + bp[i + 1])
        m = _theta_masks(env, policy, [mid])[0]
        ia.append(labels_of(env, m))
        levels.append((float(pure[m].min()), float(pure[m].max())))
    for b in sw:
        if isinstance(policy, Table1D):
            m = _theta_masks(env, policy, [b])[0]
        else:
            h = 1e-9 * max(1.0, abs(b))
            m = _theta_masks(env, policy, [b - h, b, b + h]).any(axis=0)
        ba.append(labels_of(env, m))
        verticals.append((float(pure[m].min()), float(pure[m].max())))
    pieces = [levels[0]]
    for v, lv in zip(verticals, levels[1:]):
        pieces += [v, lv]
    monotone = all(p[1] <= q[0] + 1e-12 for p, q in zip(pieces, pieces[1:])) and np.all(np.diff(pure) >= 0)
    if require_monotone and not monotone:
        raise MonotonicityViolation("theta(Delta F(delta_theta)) is not non-decreasing")
    fps: list[FixedPoint] = []
    tol = 1e-12
    for i, (l0, l1) in enumerate(levels):
        a, b = bp[i], bp[i + 1]
        for c in sorted({l0, l1}):
            if a + tol < c < b - tol:
                fps.append(FixedPoint(c, 3))
        if i == 0 and l0 <= lo + tol:
            fps.append(FixedPoint(lo, 4))
        if i == len(levels) - 1 and l1 >= hi - tol:
            fps.append(FixedPoint(hi, 4))
    for b, (v0, v1) in zip(sw, verticals):
        if v0 - tol <= b <= v1 + tol:
            fps.append(FixedPoint(float(b), 1 if min(abs(b - v0), abs(b - v1)) <= tol else 2))
    fps.sort(key=lambda f: f.theta)
    uniq: list[FixedPoint] = []
    for f in fps:
        if uniq and abs(uniq[-1].theta - f.theta) <= 1e-12:
            continue
        uniq.append(f)
    return Staircase(bp, levels, verticals, ia, ba, uniq, bool(monotone))


def equilibrium_models(env: Environment, policy) -> list[float]:
    """Models theta* supported by some equilibrium, as fixed points of the staircase map."""
    return [f.theta for f in build_staircase(env, policy, require_monotone=False).fixed_points]


def model_equilibrium_set(env: Environment, policy, theta_star: float) -> CandidateSet:
    """{sigma in Delta F(delta_theta*) : theta(sigma) = theta*} for one-dimensional mean models."""
    _require_1d(env)
    pure = _theta_pure(env)
    idx = np.nonzero(_theta_masks(env, policy, [theta_star])[0])[0]
    verts = []
    for i in idx:
        if abs(pure[i] - theta_star) <= 1e-12:
            verts.append(np.eye(env.n_actions)[i])
    for i, j in itertools.combinations(idx, 2):
        a, b = pure[i], pure[j]
        if min(a, b) < theta_star < max(a, b):
            w = (theta_star - a) / (b - a)
            v = np.zeros(env.n_actions)
            v[i], v[j] = 1.0 - w, w
            verts.append(v)
    if not verts:
        raise NotAnEquilibrium(f"theta = {theta_star} is not supported by any equilibrium")
    return CandidateSet(np.asarray(verts), closed=len(verts) > 2, label=f"theta={theta_star:.12g}")


# ---------------------------------------------------------------------------
# identification and Berk-Nash comparison


@dataclass(frozen=True)
class WeakIdentification:
    identified: bool
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.identified


def _tv(env: Environment, ta: np.ndarray, tb: np.ndarray, x: int) -> float:
    fam = env.models.family_kind
    if fam == "gaussian_common_mean":
        return float(2.0 * ndtr(np.linalg.norm(ta - tb) / 2.0) - 1.0)
    pa = env.model_pmf(ta)[x]
    pb = env.model_pmf(tb)[x]
    return float(0.5 * np.abs(pa - pb).sum())


def check_weak_identification(env: Environment, sigma, tol: float = 1e-9,
                              tie_tol: float = TIE_TOL) -> WeakIdentification:
    """All closest models agree on the consequence distribution of every played action."""
    s = np.asarray(sigma, dtype=float)
    ties = closest_models(env, s, tie_tol)
    for a, b in itertools.combinations(range(ties.shape[0]), 2):
        for x in np.nonzero(s > 0)[0]:
            d = _tv(env, ties[a], ties[b], x)
            if d > tol:
                return WeakIdentification(False, {"theta": ties[a].tolist(), "theta_prime": ties[b].tolist(),
                                                  "action": env.actions[x], "total_variation": d})
    return WeakIdentification(True, None)


def berk_nash_residual(env: Environment, sigma, belief_resolution: int = 200,
                       tie_tol: float = TIE_TOL) -> float:
    """min over beliefs on the closest models of the distance to Delta F_0(belief)."""
    s = np.asarray(sigma, dtype=float)
    models = closest_models(env, s, tie_tol)
    pay = model_payoffs(env, models)  # (k, X)
    beliefs = simplex_grid(models.shape[0], belief_resolution) if models.shape[0] > 1 else np.ones((1, 1))
    masks = _argmax_mask(beliefs @ pay, Myopic().tie_tol)
    best = np.inf
    for m in masks:
        best = min(best, hull_distance(s, m))
        if best == 0.0:
            break
    return float(best)


# keep test collectors from treating the certificate builders as tests
for _fn in (test_attracting, test_repelling, test_robust_attracting):
    _fn.__test__ = False
