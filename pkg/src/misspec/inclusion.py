"""Solutions of the differential inclusion  sigma' in conv{delta_x : x in F(sigma)} - sigma.

``F(sigma)`` is the union of the policy's action sets at the degenerate
beliefs on the closest models given ``sigma``.  While a pure action ``x`` is
held the field is affine and the segment is solved exactly,

    sigma(t) = delta_x + (sigma_0 - delta_x) exp(-t),

so the only numerical work is locating switching events (bisection on the
segment parameter) and choosing what to do at them:

* a pure action is *consistent* at a point if moving towards it keeps it in
  the action set; selections pick among consistent actions;
* when no pure action is consistent the path slides along the boundary
  with the convex combination of two fields that keeps both actions
  available (Filippov), or rests if the point is stationary.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .env import Environment, project_rows_to_simplex, project_to_simplex
from .errors import NonFiniteState, StepTooLarge
from .kld import closest_models, has_analytic_minimizer, analytic_minimizer
from .policy import model_action_masks

EVENT_TOL = 1e-10
PROBE = 1e-7
REST_TOL = 1e-9
MAX_EVENTS = 20_000


# ---------------------------------------------------------------------------
# strategies


@dataclass(frozen=True)
class FixedSelection:
    """Take the first consistent action in ``priority`` (environment order by default).

    With ``stationary`` the path rests at any equilibrium it reaches even if
    a consistent pure action exists.
    """

    priority: tuple[str, ...] | None = None
    stationary: bool = False
    name = "fixed"


@dataclass(frozen=True)
class Filippov:
    """Lexicographic pure selections with sliding on attracting boundaries."""

    name = "filippov"


@dataclass(frozen=True)
class BranchSample:
    """A bundle of ``count`` branches.

    The first branches run every priority order of the actions (up to
    ``count``); the rest choose uniformly among consistent actions at every
    decision, seeded by ``seed`` and the branch index.
    """

    count: int = 32
    seed: int = 0
    name = "branch"


@dataclass(frozen=True)
class DIConfig:
    step: float = 1e-2
    strategy: object = field(default_factory=lambda: BranchSample(8, 0))


# ---------------------------------------------------------------------------
# right-hand side


def hull_distance(sigma: np.ndarray, mask: np.ndarray) -> float:
    """Euclidean distance from ``sigma`` to the face spanned by the vertices in ``mask``."""
    sigma = np.asarray(sigma, dtype=float)
    idx = np.nonzero(mask)[0]
    if idx.size == 0:
        return float("inf")
    off = np.delete(sigma, idx)
    proj = project_to_simplex(sigma[idx])
    return float(math.sqrt(float(off @ off) + float(np.sum((sigma[idx] - proj) ** 2))))


def action_masks(env: Environment, policy, sigmas) -> np.ndarray:
    """(N, X) masks of F(Theta(sigma)) evaluated at degenerate beliefs on closest models."""
    s = np.atleast_2d(np.asarray(sigmas, dtype=float))
    if has_analytic_minimizer(env):
        th = analytic_minimizer(env, s).reshape(s.shape[0], -1)
        return model_action_masks(env, policy, th)
    out = np.zeros((s.shape[0], env.n_actions), dtype=bool)
    for i, row in enumerate(s):
        out[i] = model_action_masks(env, policy, closest_models(env, row)).any(axis=0)
    return out


def action_mask(env: Environment, policy, sigma) -> np.ndarray:
    return action_masks(env, policy, sigma)[0]


@dataclass(frozen=True)
class RhsSet:
    sigma: np.ndarray
    actions: tuple[str, ...]
    mask: np.ndarray
    velocities: np.ndarray  # extreme points of the right-hand side, one row per action

    def contains_zero(self, tol: float = REST_TOL) -> bool:
        return hull_distance(self.sigma, self.mask) <= tol


def di_rhs(env: Environment, policy, sigma) -> RhsSet:
    """Extreme velocities delta_x - sigma for every x in F(Theta(sigma))."""
    s = np.asarray(sigma, dtype=float)
    mask = action_mask(env, policy, s)
    idx = np.nonzero(mask)[0]
    vel = np.eye(env.n_actions)[idx] - s
    return RhsSet(s, tuple(env.actions[i] for i in idx), mask, vel)


def stencil_directions(n: int) -> np.ndarray:
    """Unit directions of the ball stencil: +-(e_i - u)/|e_i - u| and +-(e_i - e_j)/sqrt(2)."""
    u = np.full(n, 1.0 / n)
    dirs = []
    for i in range(n):
        e = np.eye(n)[i] - u
        e /= np.linalg.norm(e)
        dirs.extend([e, -e])
    for i, j in itertools.combinations(range(n), 2):
        e = (np.eye(n)[i] - np.eye(n)[j]) / math.sqrt(2.0)
        dirs.extend([e, -e])
    return np.asarray(dirs)


def stencil_points(sigma: np.ndarray, epsilon: float) -> np.ndarray:
    """Centre plus the projected stencil points at radius ``epsilon``."""
    d = stencil_directions(sigma.shape[0])
    pts = sigma[None, :] + epsilon * d
    return np.vstack([sigma[None, :], project_rows_to_simplex(pts)])


def perturbed_mask_fn(env: Environment, policy, epsilon: float) -> Callable[[np.ndarray], np.ndarray]:
    if epsilon == 0.0:
        return lambda s: action_mask(env, policy, s)
    if epsilon < 0.0:
        raise ValueError("epsilon must be non-negative")

    def fn(s):
        return action_masks(env, policy, stencil_points(np.asarray(s, dtype=float), epsilon)).any(axis=0)

    return fn


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class Event:
    time: float
    state: np.ndarray
    from_set: tuple[str, ...]
    to_set: tuple[str, ...]
    selection: str


@dataclass(eq=False)
class DIPath:
    actions: tuple[str, ...]
    times: np.ndarray
    states: np.ndarray
    is_event: np.ndarray
    selection: list[str]
    events: list[Event]
    strategy: str

    def at(self, t) -> np.ndarray:
        """Piecewise-linear evaluation between samples (exact at samples)."""
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape + (self.states.shape[1],))
        for k in range(self.states.shape[1]):
            out[..., k] = np.interp(t, self.times, self.states[:, k])
        return out

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            wr = csv.writer(fh)
            wr.writerow(["time", *[f"sigma_{a}" for a in self.actions], "event", "selection"])
            for i in range(self.times.shape[0]):
                wr.writerow([repr(float(self.times[i])), *[repr(float(v)) for v in self.states[i]],
                             int(self.is_event[i]), self.selection[i]])
        return path


def read_dipath_csv(path, actions: Sequence[str]) -> DIPath:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    times = np.array([float(r["time"]) for r in rows])
    states = np.array([[float(r[f"sigma_{a}"]) for a in actions] for r in rows])
    ev = np.array([r["event"] == "1" for r in rows])
    sel = [r["selection"] for r in rows]
    events = [Event(times[i], states[i], (), (), sel[i]) for i in np.nonzero(ev)[0]]
    return DIPath(tuple(actions), times, states, ev, sel, events, "csv")


def segment(sigma: np.ndarray, x: int, s: float) -> np.ndarray:
    """Exact flow towards vertex ``x`` for time ``s``."""
    out = sigma * math.exp(-s)
    out[x] += 1.0 - math.exp(-s)
    return out


def _clean(sigma: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(sigma)):
        raise NonFiniteState(f"non-finite state {sigma}")
    s = np.maximum(sigma, 0.0)
    return s / s.sum()


class _Chooser:
    def __init__(self, env, mask_fn, order, stationary, rng):
        self.env = env
        self.mask_fn = mask_fn
        self.order = list(order)
        self.stationary = stationary
        self.rng = rng

    def consistent(self, sigma, mask):
        out = []
        for x in self.order:
            if mask[x] and self.mask_fn(segment(sigma, x, PROBE))[x]:
                out.append(x)
        return out

    def choose(self, sigma, mask):
        """Returns ('pure', x) | ('slide', velocity, label) | ('rest', None)."""
        if self.stationary and hull_distance(sigma, mask) <= REST_TOL:
            return ("rest", None, "rest")
        cons = self.consistent(sigma, mask)
        if cons:
            x = cons[int(self.rng.integers(len(cons)))] if self.rng is not None else cons[0]
            return ("pure", x, self.env.actions[x])
        if hull_distance(sigma, mask) <= REST_TOL:
            return ("rest", None, "rest")
        slide = self._slide(sigma, mask)
        if slide is not None:
            return slide
        x = next(x for x in self.order if mask[x])
        return ("pure", x, self.env.actions[x])

    def _slide(self, sigma, mask):
        n = sigma.shape[0]
        members = [x for x in self.order if mask[x]]
        for x, xp in itertools.combinations(members, 2):
            vx = np.eye(n)[x] - sigma
            vp = np.eye(n)[xp] - sigma

            def side(lam):
                m = self.mask_fn(_clean(sigma + PROBE * (lam * vx + (1 - lam) * vp)))
                if m[x] and m[xp]:
                    return 0
                return 1 if not m[x] else -1

            s1, s0 = side(1.0), side(0.0)
            if not (s1 == 1 and s0 == -1):
                continue
            lo, hi = 0.0, 1.0
            found = None
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                sm = side(mid)
                if sm == 0:
                    found = mid
                    break
                if sm == 1:
                    hi = mid
                else:
                    lo = mid
            lam = found if found is not None else 0.5 * (lo + hi)
            v = lam * vx + (1 - lam) * vp
            if np.linalg.norm(v) < REST_TOL:
                return ("rest", None, "rest")
            label = f"slide:{self.env.actions[x]}+{self.env.actions[xp]}"
            return ("slide", v, label)
        return None


def _labels(env, mask) -> tuple[str, ...]:
    return tuple(env.actions[i] for i in np.nonzero(mask)[0])


def _integrate_one(env, mask_fn, sigma0, T, step, chooser, strategy_name, max_events, stop=None) -> DIPath:
    sigma = _clean(np.asarray(sigma0, dtype=float).copy())
    t = 0.0
    times, states, flags, sels, events = [0.0], [sigma.copy()], [False], [], []
    mask = mask_fn(sigma)
    kind, arg, label = chooser.choose(sigma, mask)
    sels.append(label)
    stalls = 0
    while t < T - 1e-15:
        if stop is not None and stop(sigma):
            break
        h = min(step, T - t)
        if kind == "rest":
            n_rest = max(1, int(math.ceil((T - t) / step)))
            for k in range(1, n_rest + 1):
                times.append(min(t + k * step, T))
                states.append(sigma.copy())
                flags.append(False)
                sels.append("rest")
            t = T
            break
        if kind == "slide":
            nxt = _clean(sigma + h * arg)
            t += h
            sigma = nxt
            times.append(t), states.append(sigma.copy()), flags.append(False)
            mask = mask_fn(sigma)
            kind, arg, label = chooser.choose(sigma, mask)
            sels.append(label)
            continue
        x = arg
        nxt = _clean(segment(sigma, x, h))
        m_next = mask_fn(nxt)
        if m_next[x]:
            t += h
            sigma = nxt
            times.append(t), states.append(sigma.copy()), flags.append(False), sels.append(label)
            continue
        lo, hi = 0.0, h
        while hi - lo > EVENT_TOL:
            mid = 0.5 * (lo + hi)
            if mask_fn(segment(sigma, x, mid))[x]:
                lo = mid
            else:
                hi = mid
        before = mask_fn(sigma)
        sigma = _clean(segment(sigma, x, lo))
        t += lo
        mask = mask_fn(sigma)
        new_kind, new_arg, new_label = chooser.choose(sigma, mask)
        if new_kind == "pure" and new_arg == x:
            # the probe still sees x available: step across the boundary
            stalls += 1
            if stalls > 1000:
                raise StepTooLarge(f"event location stalled at t={t:.6g}")
            sigma = _clean(segment(sigma, x, hi - lo))
            t += hi - lo
            mask = mask_fn(sigma)
            new_kind, new_arg, new_label = chooser.choose(sigma, mask)
        else:
            stalls = 0
        times.append(t), states.append(sigma.copy()), flags.append(True), sels.append(new_label)
        events.append(Event(t, sigma.copy(), _labels(env, before), _labels(env, mask), new_label))
        if len(events) > max_events:
            raise StepTooLarge(f"more than {max_events} switching events before t={t:.6g} (accumulating switches)")
        kind, arg, label = new_kind, new_arg, new_label
    return DIPath(env.actions, np.asarray(times), np.asarray(states), np.asarray(flags), sels[: len(times)],
                  events, strategy_name)


def _orders(env: Environment, strategy):
    """(priority order, rng) per branch."""
    n = env.n_actions
    if isinstance(strategy, FixedSelection):
        pr = strategy.priority or env.actions
        order = [env.action_index(a) for a in pr]
        order += [i for i in range(n) if i not in order]
        return [(order, None, strategy.stationary)]
    if isinstance(strategy, Filippov):
        return [(list(range(n)), None, False)]
    if isinstance(strategy, BranchSample):
        perms = list(itertools.permutations(range(n)))
        out = []
        for b in range(strategy.count):
            if b < len(perms):
                out.append((list(perms[b]), None, False))
            else:
                rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(strategy.seed), b])))
                out.append((list(range(n)), rng, False))
        return out
    raise TypeError(f"unknown strategy {strategy!r}")


def integrate_di(env: Environment, policy, sigma0, T: float, step: float, strategy=Filippov(),
                 max_events: int = MAX_EVENTS, stop: Callable[[np.ndarray], bool] | None = None) -> list[DIPath]:
    """Integrate the inclusion from ``sigma0`` over ``[0, T]``; one path per branch.

    A path ends early at the first recorded state where ``stop`` is true.
    """
    return integrate_perturbed_di(env, policy, sigma0, T, step, 0.0, strategy, max_events, stop)


def integrate_perturbed_di(env: Environment, policy, sigma0, T: float, step: float, epsilon: float,
                           strategy=Filippov(), max_events: int = MAX_EVENTS,
                           stop: Callable[[np.ndarray], bool] | None = None) -> list[DIPath]:
    """As :func:`integrate_di` with action sets enlarged over an ``epsilon``-ball stencil.

    The stencil is the centre, the ``2|X|`` projected axis points and the
    ``|X|(|X|-1)`` projected pairwise diagonal points; ``epsilon=0`` is the
    unperturbed inclusion.
    """
    if step <= 0 or T < 0:
        raise ValueError("need step > 0 and T >= 0")
    mask_fn = perturbed_mask_fn(env, policy, float(epsilon))
    paths = []
    for order, rng, stationary in _orders(env, strategy):
        chooser = _Chooser(env, mask_fn, order, stationary, rng)
        paths.append(_integrate_one(env, mask_fn, sigma0, T, step, chooser, strategy.name, max_events, stop))
    return paths
