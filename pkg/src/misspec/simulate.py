"""The discrete-time learner and the continuous-time interpolation of its frequencies.

Each period the agent forms the policy's action set from the current
posterior, breaks ties with a selection rule, observes a consequence from
the true kernel and updates the posterior.  The action frequency follows

    sigma_{t+1} = sigma_t + (1(x_{t+1}) - sigma_t) / (t + 1)

and is stored as ``counts / t``, which satisfies the recursion to rounding.
Two engines produce the same stream consumption: a compiled loop (default)
and a step-by-step reference built from the library's public functions.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _engine
from .bayes import Belief, init_belief, update_belief
from .env import Environment, environment_document, make_streams, sample_consequence, uniforms_per_draw
from .errors import (
    CoverageError,
    EmptyHistory,
    NonUniqueMinimizer,
    TooShort,
    UnsupportedBeliefReduction,
    ZeroLikelihood,
)
from .inclusion import DIConfig, integrate_di
from .kld import has_analytic_minimizer, model_of, weighted_kl_gap
from .policy import (
    Bellman,
    Myopic,
    StickyPrevious,
    compile_policy,
    policy_actions,
    policy_document,
    select_action,
    tie_rule_code,
)

CHUNK = 1 << 16
PREFIX = 1000


@dataclass(eq=False)
class Trajectory:
    """Recorded steps of one run.  Arrays are aligned on the record axis."""

    actions: tuple[str, ...]
    t: np.ndarray
    action: np.ndarray
    consequence: np.ndarray  # outcome index (discrete) or (n, d) vectors
    sigma: np.ndarray
    kl_gap: np.ndarray
    theta_hat: np.ndarray
    belief_mean: np.ndarray
    seed: int
    config_hash: str
    support: tuple | None = None
    horizon: int = 0
    tie_events: int = 0
    innovation_sum: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self) -> int:
        return self.t.shape[0]

    @property
    def final_sigma(self) -> np.ndarray:
        return self.sigma[-1]

    def steps(self):
        for i in range(len(self)):
            yield {
                "t": int(self.t[i]),
                "action": self.actions[self.action[i]],
                "consequence": self._consequence(i),
                "sigma": self.sigma[i],
                "kl_gap": float(self.kl_gap[i]),
                "theta_hat": self.theta_hat[i],
                "belief_mean": self.belief_mean[i],
            }

    def _consequence(self, i):
        if self.support is not None:
            return self.support[int(self.consequence[i])]
        return self.consequence[i]

    def innovation_mean(self) -> np.ndarray:
        if self.tie_events == 0:
            return np.zeros(len(self.actions))
        return self.innovation_sum / self.tie_events

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t", "action", "consequence", *[f"sigma_{a}" for a in self.actions],
                         "kl_gap", "theta_hat", "belief_mean"])
            for i in range(len(self)):
                c = self._consequence(i)
                c = ";".join(repr(float(v)) for v in c) if isinstance(c, np.ndarray) else str(c)
                wr.writerow([int(self.t[i]), self.actions[self.action[i]], c,
                             *[repr(float(v)) for v in self.sigma[i]], repr(float(self.kl_gap[i])),
                             _join(self.theta_hat[i]), _join(self.belief_mean[i])])
        return path


def _join(v) -> str:
    return ";".join(repr(float(x)) for x in np.atleast_1d(v))


def read_trajectory_csv(path, env: Environment, seed: int = 0, config_hash: str = "") -> Trajectory:
    """Parse a trajectory CSV written by :meth:`Trajectory.to_csv`."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise EmptyHistory(f"{path} has no rows")
    acts = env.actions
    support = env.truth.support if env.is_discrete else None
    if support is not None:
        labels = [str(s) for s in support]
        cons = np.array([labels.index(r["consequence"]) for r in rows])
    else:
        cons = np.array([[float(v) for v in r["consequence"].split(";")] for r in rows])
    vec = lambda key: np.array([[float(v) for v in r[key].split(";")] for r in rows])  # noqa: E731
    return Trajectory(
        actions=acts,
        t=np.array([int(r["t"]) for r in rows]),
        action=np.array([acts.index(r["action"]) for r in rows]),
        consequence=cons,
        sigma=np.array([[float(r[f"sigma_{a}"]) for a in acts] for r in rows]),
        kl_gap=np.array([float(r["kl_gap"]) for r in rows]),
        theta_hat=vec("theta_hat"),
        belief_mean=vec("belief_mean"),
        seed=seed,
        config_hash=config_hash,
        support=support,
        horizon=int(rows[-1]["t"]),
    )


def config_hash(env: Environment, policy) -> str:
    doc = {"environment": environment_document(env), "policy": policy_document(policy)}
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:16]


def record_schedule(horizon: int, record_every: int, extra: Sequence[int] | None = None) -> np.ndarray:
    """Steps to record: the first 1000, every ``record_every``-th, the last, plus ``extra``."""
    if record_every < 1:
        raise ValueError("record_every must be positive")
    parts = [np.arange(1, min(PREFIX, horizon) + 1), np.arange(record_every, horizon + 1, record_every), [horizon]]
    if extra is not None:
        ex = np.asarray(extra, dtype=np.int64)
        parts.append(ex[(ex >= 1) & (ex <= horizon)])
    return np.unique(np.concatenate([np.asarray(p, dtype=np.int64) for p in parts]))


def tau_of(t) -> np.ndarray:
    """Interpolation time tau_t = 1 + 1/2 + ... + 1/t (tau_0 = 0)."""
    t = np.asarray(t, dtype=np.int64)
    if t.size == 0:
        return np.zeros(0)
    top = int(t.max())
    harmonic = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, top + 1))])
    return harmonic[t]


def tau_schedule(t_from: int, t_to: int, dtau: float) -> np.ndarray:
    """Integer steps in [t_from, t_to] spaced roughly ``dtau`` apart in interpolation time."""
    t = np.unique(np.round(t_from * np.exp(np.arange(0.0, np.log(t_to / t_from) + dtau, dtau))).astype(np.int64))
    return t[(t >= t_from) & (t <= t_to)]


def _theta_hat(env: Environment, sigma: np.ndarray) -> np.ndarray:
    if has_analytic_minimizer(env):
        th = model_of(env, sigma)
        return th.reshape(sigma.shape[0], -1)
    out = np.full((sigma.shape[0], env.models.dim), np.nan)
    for i, s in enumerate(sigma):
        try:
            out[i] = model_of(env, s)
        except NonUniqueMinimizer:
            pass  # ties leave the estimate undefined
    return out


def run_learning(env: Environment, policy=Myopic(), horizon: int = 1000, seed: int = 0,
                 tie_rule="lexicographic", record_every: int = 1, engine: str = "auto",
                 record_times: Sequence[int] | None = None) -> Trajectory:
    """Simulate ``horizon`` periods of the learner with seeded, reproducible streams.

    ``engine='auto'`` uses the compiled loop for every policy except
    ``Bellman``, which always runs on the reference path.
    """
    if horizon < 1:
        raise ValueError("horizon must be positive")
    sched = record_schedule(horizon, record_every, record_times)
    use_fast = engine == "fast" or (engine == "auto" and not isinstance(policy, Bellman))
    if use_fast and isinstance(policy, Bellman):
        raise ValueError("the compiled engine does not support Bellman policies")
    if use_fast:
        traj = _run_fast(env, policy, horizon, seed, tie_rule, sched)
    else:
        traj = _run_reference(env, policy, horizon, seed, tie_rule, sched)
    traj.theta_hat = _theta_hat(env, traj.sigma)
    traj.config_hash = config_hash(env, policy)
    return traj


def _empty_records(env: Environment, n: int):
    d = 1 if env.is_discrete else env.truth.dim
    return (np.zeros(n, np.int64), np.zeros(n, np.int64), np.zeros((n, d)), np.zeros((n, env.n_actions)),
            np.zeros(n), np.zeros((n, env.models.dim)))


def _rescan_plan(env: Environment) -> tuple[int, float]:
    """How often the compiled loop must revisit every grid point.

    For discrete families one observation moves the log weights of two
    grid points apart by at most the spread of the log-likelihood table over
    the grid, so points far below the best one can be skipped for a while.
    """
    if not env.is_discrete:
        return 1, np.inf
    ll = env.loglik_table
    reachable = env.truth.pmf > 0.0
    rows = ll[reachable]  # (k, G)
    if not np.all(np.isfinite(rows)):
        return 1, np.inf
    spread = float(np.max(rows.max(axis=1) - rows.min(axis=1)))
    if spread == 0.0:
        return 64, 1.0
    every = int(min(64, max(1, 200.0 // spread)))
    return every, every * spread + 1.0


def _run_fast(env, policy, horizon, seed, tie_rule, sched) -> Trajectory:
    rng_c, rng_t = make_streams(seed)
    comp = compile_policy(env, policy)
    ptype = {"myopic": _engine.POLICY_MYOPIC, "table_1d": _engine.POLICY_TABLE_1D,
             "table_simplex": _engine.POLICY_TABLE_SIMPLEX}[comp.kind]
    if ptype == _engine.POLICY_TABLE_1D and not env.models.is_1d:
        raise UnsupportedBeliefReduction("one-dimensional table policy on a multi-dimensional grid")
    if ptype == _engine.POLICY_TABLE_SIMPLEX and not (env.models.domain == "simplex" and env.models.dim == 3):
        raise UnsupportedBeliefReduction("simplex table policy needs the model grid to be the 3-point simplex")
    n_g, n_x = env.models.size, env.n_actions
    discrete = env.is_discrete
    k = uniforms_per_draw(env)
    if discrete:
        cdf, ll_table, true_lp = env.truth.cdf, env.loglik_table, env.true_logpmf
        means = np.zeros((n_x, 1))
    else:
        cdf = np.zeros((n_x, 1))
        ll_table = np.zeros((n_x, 1, n_g))
        true_lp = np.zeros((n_x, 1))
        means = env.truth.means
    ep = np.ascontiguousarray(env.expected_payoff_grid)
    points = np.ascontiguousarray(env.models.points)
    ka = np.ascontiguousarray(env.kl_by_action)
    cum = np.zeros(n_g)
    log_prior = np.ascontiguousarray(env.models.log_prior, dtype=float)
    counts = np.zeros(n_x)
    fstate = np.zeros(1)
    istate = np.array([-1, 0, 0], dtype=np.int64)
    innov = np.zeros(n_x)
    rec_t, rec_a, rec_y, rec_sigma, rec_gap, rec_mean = _empty_records(env, sched.shape[0])
    rule = tie_rule_code(tie_rule)
    bp = comp.breakpoints.astype(float)
    int_masks = comp.interval_masks if comp.interval_masks.size else np.zeros((1, n_x), bool)
    bp_masks = comp.breakpoint_masks if comp.breakpoint_masks.size else np.zeros((1, n_x), bool)
    hp = comp.halfplanes if comp.halfplanes.size else np.zeros((1, 1, 3))
    reg_masks = comp.region_masks if comp.region_masks.size else np.zeros((1, n_x), bool)
    rescan_every, margin = _rescan_plan(env)
    done = 0
    while done < horizon:
        n = min(CHUNK, horizon - done)
        uc = rng_c.random(n * k)
        ut = rng_t.random(n)
        status = _engine.run_chunk(
            done, n, cum, log_prior, counts, fstate, istate,
            discrete, cdf, ll_table, true_lp, means, points, k,
            ptype, ep, comp.tie_tol, bp, int_masks, bp_masks, hp, reg_masks, comp.snap, rule,
            uc, ut,
            sched, rec_t, rec_a, rec_y, rec_sigma, rec_gap, rec_mean, ka,
            innov, rescan_every, margin,
        )
        if status == _engine.STATUS_ZERO_LIKELIHOOD:
            raise ZeroLikelihood("every grid model gives zero likelihood to an observed consequence")
        done += n
    cons = rec_y[:, 0].astype(np.int64) if discrete else rec_y
    return Trajectory(env.actions, rec_t, rec_a, cons, rec_sigma, rec_gap, np.zeros((0, 1)), rec_mean,
                      int(seed), "", env.truth.support if discrete else None, horizon, int(istate[2]), innov)


def _run_reference(env, policy, horizon, seed, tie_rule, sched) -> Trajectory:
    rng_c, rng_t = make_streams(seed)
    belief = init_belief(env.models)
    counts = np.zeros(env.n_actions)
    rec_t, rec_a, rec_y, rec_sigma, rec_gap, rec_mean = _empty_records(env, sched.shape[0])
    innov = np.zeros(env.n_actions)
    ties = 0
    prev = None
    ptr = 0
    code = tie_rule_code(tie_rule)
    for t in range(1, horizon + 1):
        aset = policy_actions(env, policy, belief)
        u = rng_t.random()
        rule = StickyPrevious(prev) if code == 2 else tie_rule
        label = select_action(aset, rule, u=u)
        a = env.action_index(label)
        if len(aset) > 1:
            for lab in aset:
                i = env.action_index(lab)
                innov[i] += (1.0 if i == a else 0.0) - 1.0 / len(aset)
            ties += 1
        prev = label
        y = sample_consequence(env, a, rng_c)
        belief = update_belief(env, belief, a, y)
        counts[a] += 1.0
        if ptr < sched.shape[0] and sched[ptr] == t:
            sigma = counts / t
            rec_t[ptr], rec_a[ptr] = t, a
            rec_y[ptr] = env.outcome_index(y) if env.is_discrete else y
            rec_sigma[ptr] = sigma
            rec_gap[ptr] = weighted_kl_gap(env, sigma, belief)
            lp = belief.log_prior + belief.cum_loglik
            w = np.empty_like(lp)
            s = _engine.posterior_weights(lp, w)
            _engine.weighted_mean(w, s, np.ascontiguousarray(env.models.points), rec_mean[ptr])
            ptr += 1
    cons = rec_y[:, 0].astype(np.int64) if env.is_discrete else rec_y
    return Trajectory(env.actions, rec_t, rec_a, cons, rec_sigma, rec_gap, np.zeros((0, 1)), rec_mean,
                      int(seed), "", env.truth.support if env.is_discrete else None, horizon, ties, innov)


def thread_count() -> int:
    raw = os.environ.get("MISSPEC_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def run_batch(env: Environment, policy, horizon: int, seeds: Sequence[int], **kwargs) -> list[Trajectory]:
    """Run several seeds concurrently (capped by ``MISSPEC_THREADS``); results in seed order."""
    seeds = sorted(int(s) for s in seeds)
    workers = min(thread_count(), len(seeds)) or 1
    job = lambda s: run_learning(env, policy, horizon, s, **kwargs)  # noqa: E731
    if workers == 1:
        return [job(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, seeds))


# ---------------------------------------------------------------------------
# frequencies and interpolation


def action_frequency(actions: Sequence, env: Environment) -> np.ndarray:
    if len(actions) == 0:
        raise EmptyHistory("no actions recorded")
    counts = np.zeros(env.n_actions)
    for a in actions:
        counts[env.action_index(a)] += 1.0
    return counts / len(actions)


@dataclass(frozen=True, eq=False)
class Interpolation:
    """Piecewise-linear curve through (tau_t, sigma_t)."""

    tau_breaks: np.ndarray
    values: np.ndarray

    def __call__(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        out = np.empty(tau.shape + (self.values.shape[1],))
        for k in range(self.values.shape[1]):
            out[..., k] = np.interp(tau, self.tau_breaks, self.values[:, k])
        return out

    @property
    def start(self) -> float:
        return float(self.tau_breaks[0])

    @property
    def end(self) -> float:
        return float(self.tau_breaks[-1])


def interpolate(traj: Trajectory) -> Interpolation:
    if len(traj) < 2:
        raise TooShort("interpolation needs at least two recorded steps")
    return Interpolation(tau_of(traj.t), traj.sigma.copy())


def apt_distance(traj: Trajectory, env: Environment, policy, t_start: float, T: float, di_config=None) -> float:
    """Shadowing distance of the interpolated path by a bundle of inclusion solutions.

    Integrates branches from ``w(t_start)`` over ``[0, T]`` and returns the
    smallest (over branches) sup-distance to the interpolation.
    """
    cfg = di_config or DIConfig()
    w = interpolate(traj)
    if T == 0:
        return 0.0
    if t_start < w.start - 1e-12 or t_start + T > w.end + 1e-12:
        raise CoverageError(f"interpolation covers [{w.start:.4g}, {w.end:.4g}], "
                            f"need [{t_start:.4g}, {t_start + T:.4g}]")
    sigma0 = w(t_start)
    paths = integrate_di(env, policy, sigma0, T, cfg.step, cfg.strategy)
    best = np.inf
    for path in paths:
        grid = np.union1d(path.times, w.tau_breaks[(w.tau_breaks >= t_start) & (w.tau_breaks <= t_start + T)] - t_start)
        dist = np.linalg.norm(w(t_start + grid) - path.at(grid), axis=1)
        best = min(best, float(dist.max()))
    return best
