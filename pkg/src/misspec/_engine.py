"""Compiled inner loop of the learning simulation.

The kernel advances one trajectory by a chunk of steps.  All randomness is
drawn outside in chunks from the two seeded streams, so the compiled and the
pure-Python paths consume the streams identically.  The posterior helpers
below are shared with the Python side so that diagnostics recomputed from a
recorded history reproduce the in-loop values bit for bit.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# weights below exp(-50) of the largest are dropped: the normalizer is at
# least 1, so they sit far below its double-precision resolution
EXP_FLOOR = -50.0

POLICY_MYOPIC = 0
POLICY_TABLE_1D = 1
POLICY_TABLE_SIMPLEX = 2

STATUS_OK = 0
STATUS_ZERO_LIKELIHOOD = 1


@njit(cache=True, nogil=True)
def posterior_weights(lp, w):
    """Fill ``w`` with exp(lp - max lp) and return the sum (0 when every entry is -inf)."""
    m = -np.inf
    for g in range(lp.shape[0]):
        if lp[g] > m:
            m = lp[g]
    if m == -np.inf:
        w[:] = 0.0
        return 0.0
    s = 0.0
    for g in range(lp.shape[0]):
        d = lp[g] - m
        if d < EXP_FLOOR:
            w[g] = 0.0
        else:
            w[g] = math.exp(d)
            s += w[g]
    return s


@njit(cache=True, nogil=True)
def weighted_mean(w, s, points, out):
    """Posterior mean of the grid points for weights ``w`` summing to ``s``."""
    for j in range(points.shape[1]):
        acc = 0.0
        for g in range(points.shape[0]):
            if w[g] > 0.0:
                acc += w[g] * points[g, j]
        out[j] = acc / s


@njit(cache=True, nogil=True)
def weighted_gap(ka, sigma, lp):
    """Posterior-weighted excess divergence for unnormalized log weights ``lp``."""
    n_g = lp.shape[0]
    n_x = ka.shape[0]
    w = np.empty(n_g)
    s = posterior_weights(lp, w)
    k = np.empty(n_g)
    kmin = np.inf
    for g in range(n_g):
        acc = 0.0
        for x in range(n_x):
            if sigma[x] > 0.0:
                acc += sigma[x] * ka[x, g]
        k[g] = acc
        if acc < kmin:
            kmin = acc
    gap = 0.0
    for g in range(n_g):
        if w[g] > 0.0:
            gap += w[g] * (k[g] - kmin)
    return gap / s


@njit(cache=True, nogil=True)
def _table1d_mask(theta, bp, int_masks, bp_masks, snap, out):
    n_b = bp.shape[0]
    for b in range(n_b):
        if abs(theta - bp[b]) <= snap:
            out[:] = bp_masks[b]
            return
    k = 0
    while k < n_b and theta >= bp[k]:
        k += 1
    out[:] = int_masks[k]


@njit(cache=True, nogil=True)
def _simplex_mask(q0, q1, hp, reg_masks, snap, out):
    n_r = hp.shape[0]
    out[:] = False
    found = False
    best = -np.inf
    best_r = 0
    for r in range(n_r):
        worst = np.inf
        for e in range(hp.shape[1]):
            sl = hp[r, e, 2] - (q0 * hp[r, e, 0] + q1 * hp[r, e, 1])
            if sl < worst:
                worst = sl
        if worst >= -snap:
            found = True
            for x in range(out.shape[0]):
                if reg_masks[r, x]:
                    out[x] = True
        if worst > best:
            best = worst
            best_r = r
    if not found:
        out[:] = reg_masks[best_r]


@njit(cache=True, nogil=True)
def _rescan(cum, log_prior, lp, active, margin):
    """Full pass: refresh every log weight and collect the active points."""
    m = -np.inf
    for g in range(cum.shape[0]):
        lp[g] = log_prior[g] + cum[g]
        if lp[g] > m:
            m = lp[g]
    n_act = 0
    cut = EXP_FLOOR - margin
    for g in range(cum.shape[0]):
        if lp[g] - m >= cut:
            active[n_act] = g
            n_act += 1
    return m, n_act


@njit(cache=True, nogil=True)
def run_chunk(
    t0, n_steps, cum, log_prior, counts, fstate, istate,
    discrete, cdf, ll_table, true_lp, means, points, n_unif,
    ptype, ep, tie_tol, bp, int_masks, bp_masks, hp, reg_masks, snap, tie_rule,
    uc, ut,
    rec_times, rec_t, rec_a, rec_y, rec_sigma, rec_gap, rec_mean, ka,
    innov, rescan_every, margin,
):
    """Advance ``n_steps`` steps starting after step ``t0``.

    ``fstate = [cum_loglik_true]``; ``istate = [previous action, record
    pointer, tie events]``.  Returns a status code.

    Only grid points within ``EXP_FLOOR - margin`` of the best log weight
    are visited between full rescans every ``rescan_every`` steps.  When
    ``margin`` bounds how far one point can gain on the best one over that
    many steps, the skipped points keep zero weight and the results equal a
    full scan.
    """
    n_g = cum.shape[0]
    n_x = counts.shape[0]
    n_p = points.shape[1]
    lp = np.empty(n_g)
    w = np.empty(n_g)
    vals = np.empty(n_x)
    mask = np.zeros(n_x, dtype=np.bool_)
    mean = np.empty(n_p)
    sigma = np.empty(n_x)
    d = means.shape[1]
    z = np.empty(max(n_unif, 2))
    y = np.empty(max(d, 1))
    active = np.empty(n_g, dtype=np.int64)
    m, n_act = _rescan(cum, log_prior, lp, active, margin)
    since = 0
    for i in range(n_steps):
        t = t0 + i + 1
        # posterior weights fused with the policy statistics
        s = 0.0
        if ptype == POLICY_MYOPIC:
            for x in range(n_x):
                vals[x] = 0.0
            for q in range(n_act):
                g = active[q]
                dd = lp[g] - m
                if dd >= EXP_FLOOR:
                    wg = math.exp(dd)
                    s += wg
                    for x in range(n_x):
                        vals[x] += wg * ep[g, x]
            vmax = -np.inf
            for x in range(n_x):
                vals[x] = vals[x] / s
                if vals[x] > vmax:
                    vmax = vals[x]
            for x in range(n_x):
                mask[x] = vals[x] >= vmax - tie_tol
        else:
            for j in range(n_p):
                mean[j] = 0.0
            for q in range(n_act):
                g = active[q]
                dd = lp[g] - m
                if dd >= EXP_FLOOR:
                    wg = math.exp(dd)
                    s += wg
                    for j in range(n_p):
                        mean[j] += wg * points[g, j]
            for j in range(n_p):
                mean[j] = mean[j] / s
            if ptype == POLICY_TABLE_1D:
                _table1d_mask(mean[0], bp, int_masks, bp_masks, snap, mask)
            else:
                _simplex_mask(mean[0], mean[1], hp, reg_masks, snap, mask)
        # selection
        k = 0
        first = -1
        for x in range(n_x):
            if mask[x]:
                if first < 0:
                    first = x
                k += 1
        a = first
        if k > 1:
            if tie_rule == 1:
                target = int(ut[i] * k)
                if target >= k:
                    target = k - 1
                c = 0
                for x in range(n_x):
                    if mask[x]:
                        if c == target:
                            a = x
                            break
                        c += 1
            elif tie_rule == 2:
                prev = istate[0]
                if prev >= 0 and mask[prev]:
                    a = prev
            for x in range(n_x):
                if mask[x]:
                    innov[x] += (1.0 if x == a else 0.0) - 1.0 / k
            istate[2] += 1
        istate[0] = a
        # consequence and Bayes update
        if discrete:
            u = uc[i]
            n_y = cdf.shape[1]
            j = 0
            while j < n_y - 1 and not (cdf[a, j] > u):
                j += 1
            for g in range(n_g):
                cum[g] += ll_table[a, j, g]
            fstate[0] += true_lp[a, j]
            yval = j
        else:
            base = i * n_unif
            for p2 in range(0, n_unif, 2):
                u1 = uc[base + p2]
                u2 = uc[base + p2 + 1]
                r = math.sqrt(-2.0 * math.log1p(-u1))
                ang = 2.0 * math.pi * u2
                z[p2] = r * math.cos(ang)
                z[p2 + 1] = r * math.sin(ang)
            for j in range(d):
                y[j] = means[a, j] + z[j]
            for g in range(n_g):
                acc = 0.0
                for j in range(d):
                    diff = points[g, j] - y[j]
                    acc += diff * diff
                cum[g] += -0.5 * acc
            acc = 0.0
            for j in range(d):
                diff = means[a, j] - y[j]
                acc += diff * diff
            fstate[0] += -0.5 * acc
            yval = 0
        counts[a] += 1.0
        since += 1
        if since >= rescan_every:
            m, n_act = _rescan(cum, log_prior, lp, active, margin)
            since = 0
        else:
            m = -np.inf
            for q in range(n_act):
                g = active[q]
                lp[g] = log_prior[g] + cum[g]
                if lp[g] > m:
                    m = lp[g]
        # recording
        ptr = istate[1]
        if ptr < rec_times.shape[0] and rec_times[ptr] == t:
            for g in range(n_g):
                lp[g] = log_prior[g] + cum[g]
            s = posterior_weights(lp, w)
            if s == 0.0:
                return STATUS_ZERO_LIKELIHOOD
            for x in range(n_x):
                sigma[x] = counts[x] / t
                rec_sigma[ptr, x] = sigma[x]
            rec_t[ptr] = t
            rec_a[ptr] = a
            if discrete:
                rec_y[ptr, 0] = yval
            else:
                for j in range(d):
                    rec_y[ptr, j] = y[j]
            rec_gap[ptr] = weighted_gap(ka, sigma, lp)
            weighted_mean(w, s, points, rec_mean[ptr])
            istate[1] = ptr + 1
        elif m == -np.inf:
            # the grid rules out what was observed
            return STATUS_ZERO_LIKELIHOOD
    return STATUS_OK
