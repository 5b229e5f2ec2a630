"""Objective environment, the agent's parametric family, and sampling.

An :class:`Environment` bundles the action labels, the true consequence
kernel, the payoff specification and the finite model grid the agent
learns over.  Everything is immutable after construction; derived tables
(log-likelihoods, per-action divergences, expected payoffs on the grid)
are computed lazily and cached.

Random draws use a fixed algorithm so that seeded runs are reproducible:

* a discrete consequence consumes one uniform ``u`` and returns the first
  support index whose cumulative probability exceeds ``u``;
* a Gaussian consequence of dimension ``d`` consumes ``2 * ceil(d / 2)``
  uniforms, turned into normals pairwise by Box-Muller
  (``r = sqrt(-2 log(1 - u1))``, ``z1 = r cos(2 pi u2)``,
  ``z2 = r sin(2 pi u2)``), keeping the first ``d``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import DomainError, SchemaError, SupportError, UnknownAction, ValidationError

SUM_TOL = 1e-12
FAMILY_KINDS = ("bernoulli_common", "gaussian_common_mean", "discrete_table")


# ---------------------------------------------------------------------------
# simplex helpers


def as_action_dist(weights, n: int | None = None) -> np.ndarray:
    """Return ``weights`` as a float vector after checking it is a distribution."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or (n is not None and w.shape[0] != n):
        raise ValueError(f"expected a vector of length {n}, got shape {w.shape}")
    if np.any(w < 0.0) or abs(w.sum() - 1.0) > SUM_TOL:
        raise ValueError(f"not a probability vector: {w}")
    return w


def project_to_simplex(v) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based, exact)."""
    v = np.asarray(v, dtype=float)
    n = v.shape[0]
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, n + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    shift = css[rho] / (rho + 1.0)
    w = np.maximum(v - shift, 0.0)
    return w / w.sum()


def project_rows_to_simplex(v) -> np.ndarray:
    """Row-wise :func:`project_to_simplex` for a 2-d array."""
    v = np.asarray(v, dtype=float)
    n = v.shape[1]
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    idx = np.arange(1, n + 1)
    rho = n - 1 - np.argmax((u - css / idx > 0)[:, ::-1], axis=1)
    shift = css[np.arange(v.shape[0]), rho] / (rho + 1.0)
    w = np.maximum(v - shift[:, None], 0.0)
    return w / w.sum(axis=1, keepdims=True)


def simplex_grid(dim: int, n: int) -> np.ndarray:
    """All points of the ``dim``-vertex simplex with coordinates in ``{0, 1/n, ..., 1}``.

    Rows are ordered lexicographically by their integer numerators, largest
    first coordinate first.
    """
    if dim < 1 or n < 1:
        raise ValueError("dim and n must be positive")
    out: list[list[int]] = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + [remaining])
            return
        for k in range(remaining, -1, -1):
            rec(prefix + [k], remaining - k, slots - 1)

    rec([], n, dim)
    return np.asarray(out, dtype=float) / n


def make_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent counter-based streams for consequence draws and tie-breaks."""
    cons, ties = np.random.SeedSequence(int(seed)).spawn(2)
    return np.random.Generator(np.random.Philox(cons)), np.random.Generator(np.random.Philox(ties))


def normals_from_uniforms(u: np.ndarray) -> np.ndarray:
    """Box-Muller on consecutive pairs along the last axis (length must be even)."""
    u = np.asarray(u, dtype=float)
    u1 = u[..., 0::2]
    u2 = u[..., 1::2]
    r = np.sqrt(-2.0 * np.log1p(-u1))
    ang = 2.0 * np.pi * u2
    z = np.empty_like(u)
    z[..., 0::2] = r * np.cos(ang)
    z[..., 1::2] = r * np.sin(ang)
    return z


def uniforms_per_draw(env: "Environment") -> int:
    if isinstance(env.truth, DiscreteTruth):
        return 1
    d = env.truth.dim
    return 2 * ((d + 1) // 2)


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True, eq=False)
class DiscreteTruth:
    support: tuple
    pmf: np.ndarray  # (X, Y)

    kind = "discrete"

    @property
    def n_outcomes(self) -> int:
        return len(self.support)

    @cached_property
    def cdf(self) -> np.ndarray:
        return np.cumsum(self.pmf, axis=1)


@dataclass(frozen=True, eq=False)
class GaussianTruth:
    means: np.ndarray  # (X, d)

    kind = "gaussian"

    @property
    def dim(self) -> int:
        return self.means.shape[1]


@dataclass(frozen=True, eq=False)
class Payoff:
    """``table`` holds pi(x, y) as an (X, Y) array; ``affine`` holds rows ``[c0, c_1..c_d]``."""

    kind: str
    coef: np.ndarray


@dataclass(frozen=True, eq=False)
class ModelGrid:
    points: np.ndarray  # (G, p)
    family_kind: str
    log_prior: np.ndarray  # (G,), log-sum-exp = 0
    table: np.ndarray | None = None  # (G, X, Y) for discrete_table
    domain: str = "box"  # "box" or "simplex"
    spec: Mapping | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @cached_property
    def lo(self) -> np.ndarray:
        if self.spec is not None and "lo" in self.spec:
            return np.atleast_1d(np.asarray(self.spec["lo"], dtype=float))
        return self.points.min(axis=0)

    @cached_property
    def hi(self) -> np.ndarray:
        if self.spec is not None and "hi" in self.spec:
            return np.atleast_1d(np.asarray(self.spec["hi"], dtype=float))
        return self.points.max(axis=0)

    @property
    def is_1d(self) -> bool:
        return self.dim == 1

    @property
    def prior(self) -> np.ndarray:
        return np.exp(self.log_prior)

    def contains(self, theta, tol: float = 1e-12) -> bool:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if theta.shape != (self.dim,) or not np.all(np.isfinite(theta)):
            return False
        if self.domain == "simplex":
            return bool(np.all(theta >= -tol) and abs(theta.sum() - 1.0) <= 1e-9)
        return bool(np.all(theta >= self.lo - tol) and np.all(theta <= self.hi + tol))

    def index_of(self, theta, tol: float = 1e-12) -> int | None:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        d = np.max(np.abs(self.points - theta), axis=1)
        i = int(np.argmin(d))
        return i if d[i] <= tol else None


@dataclass(frozen=True, eq=False)
class Environment:
    actions: tuple[str, ...]
    truth: DiscreteTruth | GaussianTruth
    payoff: Payoff
    models: ModelGrid

    def __eq__(self, other):
        if not isinstance(other, Environment):
            return NotImplemented
        return _doc_equal(environment_document(self), environment_document(other))

    __hash__ = object.__hash__

    # -- basic accessors ---------------------------------------------------

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def is_discrete(self) -> bool:
        return isinstance(self.truth, DiscreteTruth)

    def action_index(self, action) -> int:
        if isinstance(action, (int, np.integer)) and not isinstance(action, bool):
            if 0 <= action < self.n_actions:
                return int(action)
            raise UnknownAction(action)
        try:
            return self.actions.index(action)
        except ValueError:
            raise UnknownAction(action) from None

    def outcome_index(self, y) -> int:
        support = self.truth.support
        try:
            return support.index(y)
        except ValueError:
            pass
        for i, s in enumerate(support):
            if str(s) == str(y):
                return i
        raise SupportError(f"{y!r} is not in the consequence support {support}")

    # -- model family --------------------------------------------------------

    def model_pmf(self, theta) -> np.ndarray:
        """(X, Y) consequence pmf under a discrete-family model ``theta``."""
        fam = self.models.family_kind
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if fam == "bernoulli_common":
            if not (0.0 <= theta[0] <= 1.0):
                raise DomainError(f"Bernoulli parameter {theta[0]} outside [0, 1]")
            row = np.array([1.0 - theta[0], theta[0]])
            return np.tile(row, (self.n_actions, 1))
        if fam == "discrete_table":
            i = self.models.index_of(theta)
            if i is None:
                raise DomainError(f"{theta} is not a grid point of the model table")
            return self.models.table[i]
        raise DomainError("model_pmf needs a discrete consequence family")

    def check_domain(self, theta) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if not self.models.contains(theta):
            raise DomainError(f"model {theta} lies outside the parameter domain")
        return theta

    def expected_payoff_at(self, theta) -> np.ndarray:
        """Expected payoff of each action under the degenerate belief on ``theta``."""
        theta = self.check_domain(theta)
        if self.payoff.kind == "affine":
            return self.payoff.coef[:, 0] + self.payoff.coef[:, 1:] @ theta
        return np.sum(self.model_pmf(theta) * self.payoff.coef, axis=1)

    def true_expected_payoff(self) -> np.ndarray:
        if self.payoff.kind == "affine":
            return self.payoff.coef[:, 0] + np.sum(self.payoff.coef[:, 1:] * self.truth.means, axis=1)
        return np.sum(self.truth.pmf * self.payoff.coef, axis=1)

    # -- cached grid tables --------------------------------------------------

    @cached_property
    def grid_pmf(self) -> np.ndarray:
        """(G, X, Y) model pmfs on the grid (discrete families only)."""
        fam = self.models.family_kind
        if fam == "discrete_table":
            return self.models.table
        if fam == "bernoulli_common":
            th = self.models.points[:, 0]
            row = np.stack([1.0 - th, th], axis=1)
            return np.repeat(row[:, None, :], self.n_actions, axis=1)
        raise DomainError("grid_pmf needs a discrete consequence family")

    @cached_property
    def loglik_table(self) -> np.ndarray:
        """(X, Y, G) values of ln q_theta(y | x); -inf where the model gives zero mass."""
        with np.errstate(divide="ignore"):
            return np.log(np.transpose(self.grid_pmf, (1, 2, 0)))

    @cached_property
    def true_logpmf(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.truth.pmf)

    @cached_property
    def kl_by_action(self) -> np.ndarray:
        """(X, G) divergence of each grid model from the truth, action by action."""
        if self.is_discrete:
            q = self.truth.pmf[:, :, None]
            with np.errstate(divide="ignore", invalid="ignore"):
                terms = q * (self.true_logpmf[:, :, None] - self.loglik_table)
            terms = np.where(q > 0.0, terms, 0.0)
            return terms.sum(axis=1)
        diff = self.truth.means[:, None, :] - self.models.points[None, :, :]
        return 0.5 * np.sum(diff * diff, axis=2)

    @cached_property
    def expected_payoff_grid(self) -> np.ndarray:
        """(G, X) expected payoff of each action under each grid model."""
        if self.payoff.kind == "affine":
            return self.payoff.coef[None, :, 0] + self.models.points @ self.payoff.coef[:, 1:].T
        return np.einsum("gxy,xy->gx", self.grid_pmf, self.payoff.coef)

    def log_likelihood(self, action: int, y) -> tuple[np.ndarray, float]:
        """Per-grid-point and true log-likelihood of observing ``y`` after ``action``.

        For the Gaussian family the common ``-d/2 ln 2 pi`` term is dropped.
        """
        if self.is_discrete:
            j = self.outcome_index(y)
            return self.loglik_table[action, j], float(self.true_logpmf[action, j])
        y = np.asarray(y, dtype=float)
        diff = self.models.points - y
        ll = -0.5 * np.sum(diff * diff, axis=1)
        dt = self.truth.means[action] - y
        return ll, float(-0.5 * dt @ dt)


# ---------------------------------------------------------------------------
# validation


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list[Check]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate_environment(env: Environment) -> ValidationReport:
    """Check the assumptions that are checkable on a finite grid; never raises."""
    checks: list[Check] = []
    X = env.n_actions
    grid = env.models
    fam = grid.family_kind

    checks.append(Check("grid_nonempty", grid.size > 0, f"{grid.size} grid points"))

    if env.is_discrete:
        pmf = env.truth.pmf
        ok = pmf.shape == (X, env.truth.n_outcomes) and bool(
            np.all(pmf >= 0.0) and np.all(np.abs(pmf.sum(axis=1) - 1.0) <= SUM_TOL)
        )
        checks.append(Check("pmf_normalized", ok, "true pmf rows are probability vectors" if ok else
                            f"row sums {pmf.sum(axis=1).tolist()}"))
    else:
        m = env.truth.means
        ok = m.ndim == 2 and m.shape[0] == X and m.shape[1] >= 1
        checks.append(Check("gaussian_dims", ok, f"means shape {m.shape}"))

    # family vs truth
    if fam == "bernoulli_common":
        ok = env.is_discrete and env.truth.n_outcomes == 2 and grid.dim == 1
        checks.append(Check("family_matches_truth", ok, "Bernoulli family needs a binary discrete truth"))
        inside = bool(np.all((grid.points >= 0.0) & (grid.points <= 1.0)))
        checks.append(Check("model_domain", inside, "Bernoulli parameters lie in [0, 1]"))
    elif fam == "gaussian_common_mean":
        ok = (not env.is_discrete) and grid.dim == env.truth.dim
        checks.append(Check("family_matches_truth", ok, "Gaussian family needs a Gaussian truth of equal dimension"))
    elif fam == "discrete_table":
        t = grid.table
        ok = env.is_discrete and t is not None and t.shape == (grid.size, X, env.truth.n_outcomes)
        checks.append(Check("family_matches_truth", ok, "model table must be (grid, actions, outcomes)"))
        if ok:
            norm = bool(np.all(t >= 0.0) and np.all(np.abs(t.sum(axis=2) - 1.0) <= SUM_TOL))
            checks.append(Check("model_pmf_normalized", norm, "model pmf rows are probability vectors"))
    else:
        checks.append(Check("family_matches_truth", False, f"unknown family {fam!r}"))

    structurally_ok = all(c.passed for c in checks)

    if env.is_discrete and structurally_ok:
        q = env.truth.pmf[None, :, :]
        bad = np.argwhere((q > 0.0) & (env.grid_pmf <= 0.0))
        if bad.size:
            g, x, y = bad[0]
            detail = (f"model {grid.points[g].tolist()} gives zero mass to outcome "
                      f"{env.truth.support[y]!r} after {env.actions[x]} ({len(bad)} violations)")
        else:
            detail = "every model charges every outcome the truth charges"
        checks.append(Check("support_containment", bad.size == 0, detail))

    full = bool(np.all(np.isfinite(grid.log_prior)))
    checks.append(Check("prior_full_support", full, "all prior weights strictly positive" if full
                        else f"{int(np.sum(~np.isfinite(grid.log_prior)))} grid points have zero prior weight"))

    if env.payoff.kind == "table":
        ok = env.is_discrete and env.payoff.coef.shape == (X, env.truth.n_outcomes)
    else:
        ok = (not env.is_discrete) and env.payoff.coef.shape == (X, env.truth.dim + 1)
    checks.append(Check("payoff_shape", ok, f"payoff {env.payoff.kind} with shape {env.payoff.coef.shape}"))
    checks.append(Check("payoff_integrable", True, "bounded tables and affine payoffs are integrable"))
    checks.append(Check("envelope_condition", True,
                        "existence condition; not checkable on a grid beyond support containment"))
    return ValidationReport(checks)


# ---------------------------------------------------------------------------
# documents


def _rows(value, labels: Sequence[str], what: str) -> np.ndarray:
    if isinstance(value, Mapping):
        missing = [a for a in labels if a not in value]
        if missing:
            raise SchemaError(f"{what}: missing rows for {missing}")
        value = [value[a] for a in labels]
    if not isinstance(value, (list, tuple)) or len(value) != len(labels):
        raise SchemaError(f"{what}: expected {len(labels)} rows")
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{what}: rows must be numeric") from exc
    if arr.ndim != 2:
        raise SchemaError(f"{what}: ragged rows")
    return arr


def _require(doc: Mapping, key: str, where: str):
    if not isinstance(doc, Mapping) or key not in doc:
        raise SchemaError(f"{where}: missing key {key!r}")
    return doc[key]


def _parse_grid(models: Mapping) -> tuple[np.ndarray, str, dict]:
    grid = _require(models, "grid", "models")
    if not isinstance(grid, Mapping):
        raise SchemaError("models.grid must be a table")
    if "points" in grid:
        pts = np.asarray(grid["points"], dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise SchemaError("models.grid.points must be a nonempty list")
        return pts, "box", {"points": pts.tolist()}
    if "simplex" in grid:
        d, n = int(grid["simplex"]), int(_require(grid, "n", "models.grid"))
        return simplex_grid(d, n), "simplex", {"simplex": d, "n": n}
    try:
        lo, hi, n = float(grid["lo"]), float(grid["hi"]), int(grid["n"])
    except KeyError as exc:
        raise SchemaError(f"models.grid: missing {exc}") from None
    except (TypeError, ValueError) as exc:
        raise SchemaError("models.grid: lo/hi/n must be numbers") from exc
    if n < 1 or hi < lo:
        raise SchemaError("models.grid: need n >= 1 and lo <= hi")
    return np.linspace(lo, hi, n)[:, None], "box", {"lo": lo, "hi": hi, "n": n}


def load_environment(doc: Mapping, *, validate: bool = True) -> Environment:
    """Build an :class:`Environment` from a parsed configuration document.

    With ``validate`` (the default) every check of :func:`validate_environment`
    must pass, otherwise :class:`ValidationError` names the first failure.
    """
    if not isinstance(doc, Mapping):
        raise SchemaError("configuration document must be a table")
    actions = _require(doc, "actions", "document")
    if not isinstance(actions, (list, tuple)) or not actions or not all(isinstance(a, str) for a in actions):
        raise SchemaError("actions must be a nonempty list of strings")
    if len(set(actions)) != len(actions):
        raise SchemaError("action labels must be unique")
    actions = tuple(actions)

    truth_doc = _require(doc, "truth", "document")
    kind = _require(truth_doc, "kind", "truth")
    if kind == "discrete":
        support = _require(truth_doc, "support", "truth")
        if not isinstance(support, (list, tuple)) or not support:
            raise SchemaError("truth.support must be a nonempty list")
        pmf = _rows(_require(truth_doc, "pmf", "truth"), actions, "truth.pmf")
        if pmf.shape[1] != len(support):
            raise SchemaError("truth.pmf rows must match the support length")
        truth: DiscreteTruth | GaussianTruth = DiscreteTruth(tuple(support), pmf)
    elif kind == "gaussian":
        means = _rows(_require(truth_doc, "means", "truth"), actions, "truth.means")
        if "dim" in truth_doc and int(truth_doc["dim"]) != means.shape[1]:
            raise ValidationError("gaussian_dims", f"means have length {means.shape[1]}, dim is {truth_doc['dim']}")
        truth = GaussianTruth(means)
    else:
        raise SchemaError(f"unknown truth kind {kind!r}")

    pay_doc = _require(doc, "payoff", "document")
    if not isinstance(pay_doc, Mapping):
        raise SchemaError("payoff must be a table")
    if "table" in pay_doc:
        payoff = Payoff("table", _rows(pay_doc["table"], actions, "payoff.table"))
    elif "affine" in pay_doc:
        payoff = Payoff("affine", _rows(pay_doc["affine"], actions, "payoff.affine"))
    else:
        raise SchemaError("payoff needs 'table' or 'affine'")

    models_doc = _require(doc, "models", "document")
    fam = _require(models_doc, "family_kind", "models")
    if fam not in FAMILY_KINDS:
        raise SchemaError(f"unknown family_kind {fam!r}")
    points, domain, spec = _parse_grid(models_doc)
    prior = models_doc.get("prior", "uniform")
    if isinstance(prior, str):
        if prior != "uniform":
            raise SchemaError(f"unknown prior {prior!r}")
        w = np.full(points.shape[0], 1.0)
    else:
        w = np.asarray(prior, dtype=float)
        if w.shape != (points.shape[0],):
            raise SchemaError("models.prior must list one weight per grid point")
        if np.any(w < 0.0):
            raise ValidationError("prior_full_support", "negative prior weight")
    with np.errstate(divide="ignore"):
        log_prior = np.log(w) - np.log(w.sum())
    spec = dict(spec)
    spec["prior"] = prior if isinstance(prior, str) else w.tolist()
    table = None
    if fam == "discrete_table":
        raw = _require(models_doc, "table", "models")
        try:
            table = np.asarray([_rows(r, actions, "models.table") for r in raw], dtype=float)
        except (TypeError, ValueError) as exc:
            raise SchemaError("models.table must hold one pmf table per grid point") from exc
    grid = ModelGrid(points, fam, log_prior, table, domain, spec)
    env = Environment(actions, truth, payoff, grid)
    if validate:
        report = validate_environment(env)
        if not report.ok:
            bad = report.failures()[0]
            raise ValidationError(bad.name, bad.detail)
    return env


def environment_document(env: Environment) -> dict[str, Any]:
    """Inverse of :func:`load_environment` (plain JSON-compatible values)."""
    if env.is_discrete:
        truth = {"kind": "discrete", "support": list(env.truth.support), "pmf": env.truth.pmf.tolist()}
    else:
        truth = {"kind": "gaussian", "dim": env.truth.dim, "means": env.truth.means.tolist()}
    spec = dict(env.models.spec or {})
    prior = spec.pop("prior", None)
    if not spec:
        spec = {"points": env.models.points.tolist()}
    if prior is None:
        prior = np.exp(env.models.log_prior).tolist()
    models: dict[str, Any] = {"family_kind": env.models.family_kind, "grid": spec, "prior": prior}
    if env.models.table is not None:
        models["table"] = env.models.table.tolist()
    return {
        "actions": list(env.actions),
        "truth": truth,
        "payoff": {env.payoff.kind: env.payoff.coef.tolist()},
        "models": models,
    }


def _doc_equal(a, b) -> bool:
    if isinstance(a, Mapping) and isinstance(b, Mapping):
        return a.keys() == b.keys() and all(_doc_equal(a[k], b[k]) for k in a)
    if isinstance(a, (list, tuple)) and isinstance(b, (list, tuple)):
        return len(a) == len(b) and all(_doc_equal(x, y) for x, y in zip(a, b))
    return a == b


def read_document(path) -> dict[str, Any]:
    """Parse a JSON or TOML configuration file (chosen by suffix)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".toml":
        try:
            import tomllib as tomli
        except ModuleNotFoundError:  # Python 3.10
            import tomli

        try:
            return tomli.loads(text)
        except tomli.TOMLDecodeError as exc:
            raise SchemaError(f"{path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# sampling


def sample_consequence(env: Environment, action, rng: np.random.Generator):
    """Draw y ~ Q(. | action) with the documented uniform-consumption order."""
    a = env.action_index(action)
    if env.is_discrete:
        u = rng.random()
        j = int(np.searchsorted(env.truth.cdf[a], u, side="right"))
        j = min(j, env.truth.n_outcomes - 1)
        return env.truth.support[j]
    k = uniforms_per_draw(env)
    z = normals_from_uniforms(rng.random(k))
    return env.truth.means[a] + z[: env.truth.dim]


def closest_index_for_outcome(env: Environment, y) -> int:
    return env.outcome_index(y)


def ceil_half(d: int) -> int:
    return int(math.ceil(d / 2))
