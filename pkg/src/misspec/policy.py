"""Policy correspondences and action selection.

A policy maps a belief over models to a nonempty set of actions.  Four kinds
are supported:

``Myopic``
    maximizes the one-period expected payoff under the predictive
    distribution of the belief.
``Table1D``
    an exogenous step policy on a one-dimensional parameter, evaluated at
    the posterior mean.
``TableSimplex``
    an exogenous policy on the 3-point simplex given by convex polygonal
    regions, evaluated at the posterior mean.
``Bellman``
    the discounted optimal policy for grids of at most three models,
    solved by value iteration on a discretized belief simplex.

Action sets are returned as tuples of labels in environment order.
Evaluating a policy at a model ``theta`` means evaluating it at the
degenerate belief on ``theta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .bayes import Belief
from .env import Environment, simplex_grid
from .errors import (
    EmptyActionSet,
    NonConvergence,
    SchemaError,
    UnsupportedBeliefReduction,
    UnsupportedSize,
    ValidationError,
)

TIE_TOL = 1e-9
SNAP = 1e-9


# ---------------------------------------------------------------------------
# specifications


@dataclass(frozen=True)
class Myopic:
    tie_tol: float = TIE_TOL
    kind = "myopic"


@dataclass(frozen=True)
class Table1D:
    """Step policy on [0, 1]; ``interval_actions[i]`` covers (b[i-1], b[i])."""

    breakpoints: tuple[float, ...]
    interval_actions: tuple[tuple[str, ...], ...]
    breakpoint_actions: tuple[tuple[str, ...], ...] | None = None
    snap: float = SNAP
    kind = "table_1d"

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "interval_actions", tuple(tuple(s) for s in self.interval_actions))
        if len(self.interval_actions) != len(bp) + 1:
            raise ValidationError("policy_partition", "need one action set per interval")
        if any(not s for s in self.interval_actions):
            raise ValidationError("policy_partition", "empty interval action set")
        if any(b < 0.0 or b > 1.0 for b in bp) or any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValidationError("policy_partition", "breakpoints must be increasing inside [0, 1]")
        unions = []
        for i in range(len(bp)):
            left, right = self.interval_actions[i], self.interval_actions[i + 1]
            unions.append(tuple(dict.fromkeys(left + right)))
        if self.breakpoint_actions is None:
            object.__setattr__(self, "breakpoint_actions", tuple(unions))
        else:
            given = tuple(tuple(s) for s in self.breakpoint_actions)
            if len(given) != len(bp):
                raise ValidationError("policy_partition", "need one action set per breakpoint")
            for i, (g, u) in enumerate(zip(given, unions)):
                if not set(u) <= set(g):
                    raise ValidationError(
                        "policy_upper_hemicontinuity",
                        f"breakpoint {bp[i]} set {g} lacks neighbouring actions {sorted(set(u) - set(g))}",
                    )
            object.__setattr__(self, "breakpoint_actions", given)


@dataclass(frozen=True)
class Region:
    vertices: tuple[tuple[float, float, float], ...]
    actions: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(tuple(float(c) for c in v) for v in self.vertices))
        object.__setattr__(self, "actions", tuple(self.actions))


@dataclass(frozen=True)
class TableSimplex:
    """Convex polygonal regions of the 3-point simplex, each with an action set.

    The action set at a point is the union over all regions containing it
    (within ``snap``), so boundary points get the union of adjacent sets.
    """

    regions: tuple[Region, ...]
    snap: float = SNAP
    name: str = "custom"
    kind = "table_simplex"

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        if not self.regions:
            raise ValidationError("policy_coverage", "no regions")
        pts = simplex_grid(3, 24)
        inside = _simplex_inside(_halfplanes(self.regions), pts, self.snap)
        if not np.all(inside.any(axis=1)):
            miss = pts[np.nonzero(~inside.any(axis=1))[0][0]]
            raise ValidationError("policy_coverage", f"point {miss.tolist()} is in no region")


@dataclass(frozen=True)
class Bellman:
    beta: float
    resolution: int = 40
    tol: float = 1e-10
    tie_tol: float = TIE_TOL
    max_iter: int = 200_000
    kind = "bellman"

    def __post_init__(self):
        if not 0.0 <= self.beta < 1.0:
            raise ValidationError("policy_discount", "beta must lie in [0, 1)")
        if self.resolution < 1:
            raise ValidationError("policy_resolution", "resolution must be positive")


PolicySpec = Myopic | Table1D | TableSimplex | Bellman


# ---------------------------------------------------------------------------
# simplex regions


def _to_plane(p: np.ndarray) -> np.ndarray:
    """Barycentric 3-vectors to planar coordinates (first two weights)."""
    return np.asarray(p, dtype=float)[..., :2]


def _halfplanes(regions: Sequence[Region]):
    """Outward unit normals and offsets of every polygon edge, padded per region."""
    polys = []
    for reg in regions:
        v = _to_plane(np.asarray(reg.vertices))
        area = 0.5 * np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
        if area < 0:
            v = v[::-1]
        rows = []
        for k in range(len(v)):
            e = v[(k + 1) % len(v)] - v[k]
            norm = np.hypot(*e)
            if norm < 1e-15:
                continue
            n = np.array([e[1], -e[0]]) / norm
            rows.append((n[0], n[1], n @ v[k]))
        polys.append(np.asarray(rows))
    emax = max(len(r) for r in polys)
    hp = np.zeros((len(polys), emax, 3))
    hp[:, :, 2] = np.inf  # padding rows never bind
    for i, r in enumerate(polys):
        hp[i, : len(r)] = r
    return hp


def _simplex_inside(hp: np.ndarray, pts: np.ndarray, snap: float) -> np.ndarray:
    """(N, R) membership of points in regions."""
    q = _to_plane(pts)
    slack = hp[None, :, :, 2] - (q[:, None, None, 0] * hp[None, :, :, 0] + q[:, None, None, 1] * hp[None, :, :, 1])
    return np.all(slack >= -snap, axis=2)


def _simplex_slack(hp: np.ndarray, pts: np.ndarray) -> np.ndarray:
    q = _to_plane(pts)
    slack = hp[None, :, :, 2] - (q[:, None, None, 0] * hp[None, :, :, 0] + q[:, None, None, 1] * hp[None, :, :, 1])
    return slack.min(axis=2)


def _clip(poly: list[np.ndarray], w: np.ndarray) -> list[np.ndarray]:
    """Keep the part of a polygon (barycentric vertices) where w . theta <= 0."""
    out = []
    n = len(poly)
    for k in range(n):
        a, b = poly[k], poly[(k + 1) % n]
        fa, fb = w @ a, w @ b
        if fa <= 0:
            out.append(a)
        if (fa < 0 < fb) or (fb < 0 < fa):
            out.append(a + (b - a) * (fa / (fa - fb)))
    return out


def argmax_regions(coef: np.ndarray, labels: Sequence[str]) -> tuple[Region, ...]:
    """Regions of the simplex where each linear payoff ``coef[i] . theta`` is maximal."""
    coef = np.asarray(coef, dtype=float)
    regions = []
    for i, lab in enumerate(labels):
        poly = [np.array(e, dtype=float) for e in np.eye(3)]
        for j in range(len(labels)):
            if j != i:
                poly = _clip(poly, coef[j] - coef[i])
                if not poly:
                    break
        if len(poly) >= 3:
            regions.append(Region(tuple(tuple(p) for p in poly), (lab,)))
    return tuple(regions)


def cyclic_shift_coef(win: float = 1.0, loss: float = 2.0) -> np.ndarray:
    """Payoffs ``u_i(theta) = win * theta_{i-1} - loss * theta_{i+1}`` (indices mod 3)."""
    c = np.zeros((3, 3))
    for i in range(3):
        c[i, (i - 1) % 3] = win
        c[i, (i + 1) % 3] = -loss
    return c


def cyclic_shift(labels: Sequence[str] = ("x1", "x2", "x3"), win: float = 1.0, loss: float = 2.0) -> TableSimplex:
    """Best responses to a rock-paper-scissors payoff on the model simplex.

    The model ``e_i`` makes action ``i+1`` (cyclically) the unique choice.
    """
    return TableSimplex(argmax_regions(cyclic_shift_coef(win, loss), labels), name="cyclic_shift")


def spiral_regions(labels: Sequence[str] = ("x1", "x2", "x3")) -> TableSimplex:
    """Inner triangle A B C split at its centre into three single-action wedges.

    Corner triangles outside A B C allow every action.
    """
    a = (2 / 3, 0.0, 1 / 3)
    b = (1 / 3, 2 / 3, 0.0)
    c = (0.0, 1 / 3, 2 / 3)
    m = (1 / 3, 1 / 3, 1 / 3)
    x1, x2, x3 = labels
    every = tuple(labels)
    regions = (
        Region((a, b, m), (x2,)),
        Region((b, c, m), (x3,)),
        Region((c, a, m), (x1,)),
        Region(((1.0, 0.0, 0.0), b, a), every),
        Region(((0.0, 1.0, 0.0), c, b), every),
        Region(((0.0, 0.0, 1.0), a, c), every),
    )
    return TableSimplex(regions, name="spiral")


# ---------------------------------------------------------------------------
# compiled form (label sets -> boolean masks)


@dataclass(frozen=True, eq=False)
class Compiled:
    kind: str
    tie_tol: float = TIE_TOL
    snap: float = SNAP
    breakpoints: np.ndarray = field(default_factory=lambda: np.zeros(0))
    interval_masks: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), bool))
    breakpoint_masks: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), bool))
    halfplanes: np.ndarray = field(default_factory=lambda: np.zeros((0, 0, 3)))
    region_masks: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), bool))


def _mask(env: Environment, labels) -> np.ndarray:
    m = np.zeros(env.n_actions, dtype=bool)
    for lab in labels:
        m[env.action_index(lab)] = True
    return m


@lru_cache(maxsize=64)
def compile_policy(env: Environment, policy) -> Compiled:
    if isinstance(policy, Table1D):
        return Compiled(
            "table_1d",
            snap=policy.snap,
            breakpoints=np.asarray(policy.breakpoints, dtype=float),
            interval_masks=np.stack([_mask(env, s) for s in policy.interval_actions]),
            breakpoint_masks=(np.stack([_mask(env, s) for s in policy.breakpoint_actions])
                              if policy.breakpoints else np.zeros((0, env.n_actions), bool)),
        )
    if isinstance(policy, TableSimplex):
        return Compiled(
            "table_simplex",
            snap=policy.snap,
            halfplanes=_halfplanes(policy.regions),
            region_masks=np.stack([_mask(env, r.actions) for r in policy.regions]),
        )
    return Compiled("myopic", tie_tol=policy.tie_tol)


def labels_of(env: Environment, mask: np.ndarray) -> tuple[str, ...]:
    return tuple(env.actions[i] for i in np.nonzero(mask)[0])


def _argmax_mask(values: np.ndarray, tie_tol: float) -> np.ndarray:
    return values >= values.max(axis=-1, keepdims=True) - tie_tol


def model_payoffs(env: Environment, thetas) -> np.ndarray:
    """(N, X) expected payoff of each action under each degenerate model belief."""
    th = np.atleast_2d(np.asarray(thetas, dtype=float))
    if env.payoff.kind == "affine":
        return env.payoff.coef[None, :, 0] + th @ env.payoff.coef[:, 1:].T
    fam = env.models.family_kind
    if fam == "bernoulli_common":
        p = th[:, :1]
        return (1.0 - p) * env.payoff.coef[None, :, 0] + p * env.payoff.coef[None, :, 1]
    rows = []
    for t in th:
        i = env.models.index_of(t)
        if i is None:
            rows.append(env.expected_payoff_at(t))
        else:
            rows.append(env.expected_payoff_grid[i])
    return np.asarray(rows)


def model_action_masks(env: Environment, policy, thetas) -> np.ndarray:
    """(N, X) boolean masks of F(delta_theta) for a stack of models."""
    th = np.atleast_2d(np.asarray(thetas, dtype=float))
    if isinstance(policy, (Myopic, Bellman)):
        return _argmax_mask(model_payoffs(env, th), policy.tie_tol)
    comp = compile_policy(env, policy)
    if comp.kind == "table_1d":
        return _table1d_masks(comp, th[:, 0])
    if th.shape[1] != 3:
        raise UnsupportedBeliefReduction("simplex table policies need models on the 3-point simplex")
    inside = _simplex_inside(comp.halfplanes, th, comp.snap)
    none = ~inside.any(axis=1)
    if np.any(none):
        best = np.argmax(_simplex_slack(comp.halfplanes, th[none]), axis=1)
        inside[np.nonzero(none)[0], best] = True
    return (inside.astype(np.int64) @ comp.region_masks.astype(np.int64)) > 0


def _table1d_masks(comp: Compiled, th: np.ndarray) -> np.ndarray:
    bp = comp.breakpoints
    idx = np.searchsorted(bp, th, side="right")
    out = comp.interval_masks[idx].copy()
    if bp.size:
        near = np.clip(np.searchsorted(bp, th), 0, bp.size - 1)
        for cand in (near, np.clip(near - 1, 0, bp.size - 1)):
            hit = np.abs(th - bp[cand]) <= comp.snap
            out[hit] = comp.breakpoint_masks[cand[hit]]
    return out


def actions_at_model(env: Environment, policy, theta) -> tuple[str, ...]:
    return labels_of(env, model_action_masks(env, policy, theta)[0])


# ---------------------------------------------------------------------------
# beliefs


def belief_payoffs(env: Environment, weights: np.ndarray) -> np.ndarray:
    """Expected payoff of each action under the predictive distribution of ``weights``."""
    return weights @ env.expected_payoff_grid


def myopic_actions(env: Environment, belief: Belief, tie_tol: float = TIE_TOL) -> tuple[str, ...]:
    v = belief_payoffs(env, np.exp(belief.log_post))
    return labels_of(env, _argmax_mask(v, tie_tol))


def policy_actions(env: Environment, policy, belief: Belief) -> tuple[str, ...]:
    """F(mu).  Table policies are evaluated at the posterior mean model."""
    if isinstance(policy, Myopic):
        return myopic_actions(env, belief, policy.tie_tol)
    if isinstance(policy, Bellman):
        return bellman_actions(env, solve_bellman_cached(env, policy), belief)
    w = np.exp(belief.log_post)
    mean = w @ env.models.points
    if isinstance(policy, Table1D) and not env.models.is_1d:
        raise UnsupportedBeliefReduction("one-dimensional table policy on a multi-dimensional grid")
    if isinstance(policy, TableSimplex) and not (env.models.domain == "simplex" and env.models.dim == 3):
        raise UnsupportedBeliefReduction("simplex table policy needs the model grid to be the 3-point simplex")
    return labels_of(env, model_action_masks(env, policy, mean)[0])


# ---------------------------------------------------------------------------
# selection


@dataclass(frozen=True)
class Lexicographic:
    name = "lexicographic"


@dataclass(frozen=True)
class UniformRandom:
    name = "uniform"


@dataclass(frozen=True)
class StickyPrevious:
    previous: str | None = None
    name = "sticky"


TIE_RULES = {"lexicographic": 0, "uniform": 1, "sticky": 2}


def tie_rule_code(rule) -> int:
    if isinstance(rule, str):
        try:
            return TIE_RULES[rule]
        except KeyError:
            raise SchemaError(f"unknown tie rule {rule!r}") from None
    return TIE_RULES[rule.name]


def select_action(action_set: Sequence[str], rule=Lexicographic(), rng: np.random.Generator | None = None,
                  u: float | None = None) -> str:
    """Pick one member of ``action_set``.

    ``UniformRandom`` uses one uniform (``u`` if given, else drawn from
    ``rng``) and takes element ``floor(u * k)``; it consumes the uniform even
    for singletons so that the stream position never depends on the set.
    """
    if not action_set:
        raise EmptyActionSet("the policy returned no actions")
    code = tie_rule_code(rule)
    if code == 1:
        if u is None:
            if rng is None:
                raise ValueError("UniformRandom needs rng or u")
            u = rng.random()
        return action_set[min(int(u * len(action_set)), len(action_set) - 1)]
    if code == 2 and isinstance(rule, StickyPrevious) and rule.previous in action_set:
        return rule.previous
    return action_set[0]


# ---------------------------------------------------------------------------
# discounted optimal policy


@dataclass(frozen=True, eq=False)
class ValueFunction:
    grid: np.ndarray  # (N, G) beliefs
    values: np.ndarray  # (N,)
    policy_sets: tuple[tuple[str, ...], ...]
    beta: float
    resolution: int
    tie_tol: float
    iterations: int

    def interpolate(self, beliefs) -> np.ndarray:
        idx, wts = _kuhn_weights(np.atleast_2d(beliefs), self.resolution)
        return np.sum(self.values[idx] * wts, axis=-1)


def _node_index(counts: np.ndarray, n: int) -> np.ndarray:
    """Row index of integer compositions in :func:`simplex_grid` order."""
    g = counts.shape[-1]
    table = {tuple(r): i for i, r in enumerate(np.rint(simplex_grid(g, n) * n).astype(int))}
    flat = counts.reshape(-1, g)
    out = np.fromiter((table[tuple(r)] for r in flat), dtype=np.int64, count=flat.shape[0])
    return out.reshape(counts.shape[:-1])


def _kuhn_weights(p: np.ndarray, n: int):
    """Barycentric interpolation weights on the simplex grid of resolution ``n``.

    Uses the Kuhn triangulation in cumulative coordinates
    ``u_k = n * (p_1 + ... + p_k)``, where the simplex becomes the order
    simplex ``0 <= u_1 <= ... <= u_{G-1} <= n``.
    Returns node indices and weights of shape (M, G).
    """
    p = np.asarray(p, dtype=float)
    m, g = p.shape
    if g == 1:
        return np.zeros((m, 1), dtype=np.int64), np.ones((m, 1))
    u = np.cumsum(p[:, :-1], axis=1) * n
    u = np.clip(np.maximum.accumulate(np.clip(u, 0.0, n), axis=1), 0.0, n)
    base = np.minimum(np.floor(u), n - 1)
    frac = u - base
    # descending fractions; ties put the later coordinate first so vertices stay ordered
    order = (g - 2) - np.argsort(-frac[:, ::-1], axis=1, kind="stable")
    sf = np.take_along_axis(frac, order, axis=1)
    wts = np.empty((m, g))
    wts[:, 0] = 1.0 - sf[:, 0]
    wts[:, 1:-1] = sf[:, :-1] - sf[:, 1:]
    wts[:, -1] = sf[:, -1]
    verts = np.empty((m, g, g - 1))
    cur = base.copy()
    verts[:, 0] = cur
    for k in range(g - 1):
        cur = cur.copy()
        cur[np.arange(m), order[:, k]] += 1
        verts[:, k + 1] = cur
    cu = verts.astype(np.int64)
    counts = np.concatenate([cu[..., :1], np.diff(cu, axis=-1), n - cu[..., -1:]], axis=-1)
    valid = np.all(counts >= 0, axis=-1)
    wts = np.where(valid, wts, 0.0)
    counts = np.where(valid[..., None], counts, 0)
    counts[~valid, -1] = n
    wts = wts / wts.sum(axis=1, keepdims=True)
    return _node_index(counts, n), wts


def _posteriors(env: Environment, beliefs: np.ndarray):
    """Predictive pmf (N, X, Y) and updated beliefs (N, X, Y, G)."""
    q = env.grid_pmf  # (G, X, Y)
    joint = beliefs[:, :, None, None] * q[None]  # (N, G, X, Y)
    pred = joint.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        post = np.where(pred[:, None] > 0, joint / pred[:, None], beliefs[:, :, None, None])
    return pred, np.moveaxis(post, 1, -1)


def _q_values(env, beliefs, values_fn, beta):
    r = belief_payoffs(env, beliefs)  # (N, X)
    if beta == 0.0:
        return r
    pred, post = _posteriors(env, beliefs)
    n, x, y, g = post.shape
    cont = values_fn(post.reshape(-1, g)).reshape(n, x, y)
    return r + beta * np.sum(pred * cont, axis=2)


def solve_bellman(env: Environment, beta: float, resolution: int = 40, tol: float = 1e-10,
                  tie_tol: float = TIE_TOL, max_iter: int = 200_000) -> ValueFunction:
    """Value iteration on the belief simplex over a grid of at most three models.

    Iteration stops once ``beta / (1 - beta) * ||W_{k+1} - W_k||`` drops below
    ``tol``, which bounds the distance to the fixed point by ``tol``.
    """
    if env.models.size > 3:
        raise UnsupportedSize(f"belief simplex over {env.models.size} models is not supported (max 3)")
    if not env.is_discrete:
        raise UnsupportedSize("Bellman policies need a discrete consequence model")
    if not 0.0 <= beta < 1.0:
        raise ValueError("beta must lie in [0, 1)")
    g = env.models.size
    nodes = simplex_grid(g, resolution)
    r = belief_payoffs(env, nodes)
    pred, post = _posteriors(env, nodes)
    n, x, y, _ = post.shape
    idx, wts = _kuhn_weights(post.reshape(-1, g), resolution)
    idx = idx.reshape(n, x, y, g)
    wts = wts.reshape(n, x, y, g)
    w = r.max(axis=1)
    factor = beta / (1.0 - beta)
    it = 0
    while True:
        it += 1
        cont = np.sum(w[idx] * wts, axis=-1)
        qv = r + beta * np.sum(pred * cont, axis=2)
        w_new = qv.max(axis=1)
        change = float(np.max(np.abs(w_new - w)))
        w = w_new
        if factor * change < tol:
            break
        if it >= max_iter:
            raise NonConvergence(f"value iteration did not converge in {max_iter} sweeps (change {change:.3g})")
    cont = np.sum(w[idx] * wts, axis=-1)
    qv = r + beta * np.sum(pred * cont, axis=2)
    sets = tuple(labels_of(env, m) for m in _argmax_mask(qv, tie_tol))
    return ValueFunction(nodes, w, sets, float(beta), int(resolution), float(tie_tol), it)


@lru_cache(maxsize=16)
def solve_bellman_cached(env: Environment, policy: Bellman) -> ValueFunction:
    return solve_bellman(env, policy.beta, policy.resolution, policy.tol, policy.tie_tol, policy.max_iter)


def bellman_actions(env: Environment, vf: ValueFunction, belief: Belief | np.ndarray) -> tuple[str, ...]:
    """epsilon-optimal actions at an arbitrary belief using the interpolated value function."""
    w = np.exp(belief.log_post) if isinstance(belief, Belief) else np.asarray(belief, dtype=float)
    qv = _q_values(env, w[None, :], vf.interpolate, vf.beta)[0]
    return labels_of(env, _argmax_mask(qv, vf.tie_tol))


# ---------------------------------------------------------------------------
# documents


def load_policy(doc: Mapping | None, actions: Sequence[str] = ()) -> PolicySpec:
    """Parse the ``policy`` section of a configuration document."""
    if doc is None:
        return Myopic()
    kind = doc.get("kind", "myopic")
    if kind == "myopic":
        return Myopic(float(doc.get("tie_tol", TIE_TOL)))
    if kind == "table_1d":
        try:
            return Table1D(tuple(doc["breakpoints"]), tuple(tuple(s) for s in doc["interval_actions"]),
                           tuple(tuple(s) for s in doc["breakpoint_actions"]) if "breakpoint_actions" in doc else None)
        except KeyError as exc:
            raise SchemaError(f"policy: missing {exc}") from None
    if kind == "table_simplex":
        labels = tuple(doc.get("labels", actions[:3]))
        builtin = doc.get("builtin")
        if builtin == "cyclic_shift":
            return cyclic_shift(labels, float(doc.get("win", 1.0)), float(doc.get("loss", 2.0)))
        if builtin == "spiral":
            return spiral_regions(labels)
        if builtin is not None:
            raise SchemaError(f"unknown builtin region set {builtin!r}")
        try:
            regions = tuple(Region(tuple(map(tuple, r["vertices"])), tuple(r["actions"])) for r in doc["regions"])
        except (KeyError, TypeError) as exc:
            raise SchemaError("policy.regions must list {vertices, actions} tables") from exc
        return TableSimplex(regions)
    if kind == "bellman":
        return Bellman(float(doc["beta"]), int(doc.get("resolution", 40)), float(doc.get("tol", 1e-10)))
    raise SchemaError(f"unknown policy kind {kind!r}")


def policy_document(policy) -> dict:
    if isinstance(policy, Myopic):
        return {"kind": "myopic", "tie_tol": policy.tie_tol}
    if isinstance(policy, Table1D):
        return {"kind": "table_1d", "breakpoints": list(policy.breakpoints),
                "interval_actions": [list(s) for s in policy.interval_actions],
                "breakpoint_actions": [list(s) for s in policy.breakpoint_actions]}
    if isinstance(policy, TableSimplex):
        return {"kind": "table_simplex",
                "regions": [{"vertices": [list(v) for v in r.vertices], "actions": list(r.actions)}
                            for r in policy.regions]}
    return {"kind": "bellman", "beta": policy.beta, "resolution": policy.resolution, "tol": policy.tol}
