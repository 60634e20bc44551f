"""Numerical solution of the nested Bethe equations.

The solver iterates on the cleared-denominator residual system: each Bethe
equation is multiplied through by its denominators so the left-hand side is
an entire function of the roots, then divided by the magnitude of its
largest term to stay O(1).  Within one damped-Newton iteration the magnitude
normalisers are frozen (they are non-smooth and would otherwise corrupt the
Jacobian); the convergence measure always uses the freshly scaled residual.

Root multisets carry two exact symmetries, lam -> lam + i pi and the
crossing map lam -> -lam - k eta.  Iterates are wrapped back to the
fundamental strip after every step, and states are compared through the
invariant spectra cosh(2 lam + k eta), which both symmetries leave fixed.

Parasitic solutions of the cleared system (coincident roots, roots pinned
where a cleared factor vanishes) are real: every converged state must pass
the independent residue-form polynomiality check before it is reported.

``verify_against_spectrum`` closes the loop: eigenvalue curves of the
transfer matrix from exact diagonalisation are matched against the T-Q
values of each state over a grid, giving per-state sup-norm errors and
whole-spectrum coverage.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from .spectrum import (BetheState, SpectralContext, expected_root_count,
                       lambda1, pole_distance, polynomiality_residues)
from .transfer import eigenvalue_curves, spectral_frame

sh = np.sinh

_SEED_BATCH = 16          # fixed batch size keeps runs thread-count independent
_RE_CLAMP = 4.0
_DEDUP_TOL = 1e-8
_DEFLATION_TOL = 1e-3


def worker_count():
    """Worker cap from ODBA_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("ODBA_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SolveTask:
    """One sector's solve: context, optional seeds, and search budget."""

    ctx: SpectralContext
    seeds: tuple = ()
    starts: int = 200
    tol: float = 1e-12
    max_iter: int = 60
    rng_seed: int = 0
    table_aware: bool = False
    residue_tol: float = 1e-8

    def __post_init__(self):
        for s in self.seeds:
            self.ctx.validate_state(s)


@dataclass
class SolveResult:
    state: BetheState
    residual_norm: float
    iterations: int
    energy: complex = None
    matched_eigenvalue_index: int = None
    sup_norm_error: float = None
    sector_expectation: float = None


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

def _q_at(points, roots, k, eta):
    points = np.atleast_1d(points)
    if len(roots) == 0:
        return np.ones(points.shape, dtype=complex)
    d = points[:, None] - roots[None, :]
    s = points[:, None] + roots[None, :] + k * eta
    return np.prod(sh(d) * sh(s), axis=1)


def _cleared_terms(l1, l2, ctx):
    """Raw cleared terms of both Bethe equation families."""
    spec, pair, h = ctx.spec, ctx.pair, ctx.h
    eta = spec.eta
    from .spectrum import a0, b0, k_decomposition

    lam = np.asarray(l1)
    k1 = k_decomposition(1, lam, pair, eta)
    k2 = k_decomposition(2, lam, pair, eta)
    t1 = (64 * k1 * a0(lam, spec) * _q_at(lam - eta, lam, 1, eta)
          * _q_at(lam, np.asarray(l2), 2, eta) * sh(2 * lam + 2 * eta))
    t2 = (64 * sh(2 * lam) * k2 * b0(lam, spec) * _q_at(lam + eta, lam, 1, eta)
          * _q_at(lam - eta, np.asarray(l2), 2, eta))
    t3 = (h * sh(2 * lam) ** 2 * sh(2 * lam + eta) ** 3 * sh(2 * lam + 2 * eta) ** 2
          * sh(2 * lam + 3 * eta) * sh(2 * lam - eta) * a0(lam, spec) * b0(lam, spec)
          * _q_at(lam, np.asarray(l2), 2, eta) * _q_at(lam - eta, np.asarray(l2), 2, eta))
    if len(l2):
        mu = np.asarray(l2)
        k2m = k_decomposition(2, mu, pair, eta)
        k3m = k_decomposition(3, mu, pair, eta)
        g1 = (sh(2 * mu + 3 * eta) * k2m * _q_at(mu + eta, lam, 1, eta)
              * _q_at(mu - eta, mu, 2, eta))
        g2 = (sh(2 * mu + eta) * k3m * _q_at(mu, lam, 1, eta)
              * _q_at(mu + eta, mu, 2, eta))
    else:
        g1 = g2 = np.zeros(0, dtype=complex)
    return (t1, t2, t3), (g1, g2)


def bae_residuals(state: BetheState, ctx: SpectralContext):
    """Scaled cleared-denominator residual vector (length L1 + M)."""
    ctx.validate_state(state)
    (t1, t2, t3), (g1, g2) = _cleared_terms(state.lambda1, state.lambda2, ctx)
    s1 = np.maximum.reduce([np.abs(t1), np.abs(t2), np.abs(t3)])
    s2 = np.maximum(np.abs(g1), np.abs(g2))
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        r1 = (t1 + t2 + t3) / np.where(s1 > 0, s1, 1.0)
        r2 = (g1 + g2) / np.where(s2 > 0, s2, 1.0)
    return np.concatenate([r1, r2])


def _weights(l1, l2, ctx):
    (t1, t2, t3), (g1, g2) = _cleared_terms(l1, l2, ctx)
    s = np.concatenate([np.maximum.reduce([np.abs(t1), np.abs(t2), np.abs(t3)]),
                        np.maximum(np.abs(g1), np.abs(g2))])
    with np.errstate(over="ignore", divide="ignore"):
        return 1.0 / np.where(s > 0, s, 1.0)


def _raw_residuals(l1, l2, ctx):
    (t1, t2, t3), (g1, g2) = _cleared_terms(l1, l2, ctx)
    return np.concatenate([t1 + t2 + t3, g1 + g2])


# ---------------------------------------------------------------------------
# canonical form and state identity
# ---------------------------------------------------------------------------

def _wrap_strip(z):
    """Reduce Im to (-pi/2, pi/2] using the i*pi periodicity."""
    z = np.asarray(z, dtype=complex)
    im = np.imag(z)
    im = im - np.pi * np.ceil((im - np.pi / 2) / np.pi - 1e-12)
    return np.real(z) + 1j * im


def canonicalize(state: BetheState, eta):
    """Deterministic representative of a state's symmetry orbit.

    Each root is wrapped to the fundamental strip, replaced by the
    lexicographically larger of itself and its wrapped crossing partner,
    and the lists are sorted by (Re, Im).
    """
    out = []
    for roots, k in ((state.lambda1, 1), (state.lambda2, 2)):
        canon = []
        for lam in _wrap_strip(np.asarray(roots)):
            partner = _wrap_strip(-lam - k * eta)
            pick = max((lam, partner),
                       key=lambda z: (round(z.real, 12), round(z.imag, 12)))
            canon.append(complex(pick))
        canon.sort(key=lambda z: (z.real, z.imag))
        out.append(tuple(canon))
    return BetheState(state.sector, out[0], out[1])


def _invariants(roots, k, eta):
    """cosh(2 lam + k eta): fixed under both root symmetries."""
    z = np.asarray(roots, dtype=complex)
    return np.cosh(2 * z + k * eta)


def state_distance(a: BetheState, b: BetheState, eta):
    """Max matched distance between symmetry orbits (inf if sectors differ).

    Roots are paired by minimum-cost assignment on the strip metric, each
    candidate pairing allowing the crossing partner.
    """
    if a.sector != b.sector or len(a.lambda1) != len(b.lambda1):
        return np.inf

    def family_distance(ra, rb, k):
        if len(ra) == 0:
            return 0.0
        za = _wrap_strip(np.asarray(ra))
        zb = _wrap_strip(np.asarray(rb))
        zb_part = _wrap_strip(-np.asarray(rb) - k * eta)

        def strip_d(x, y):
            d = x[:, None] - y[None, :]
            d = d - 1j * np.pi * np.round(np.imag(d) / np.pi)
            return np.abs(d)

        cost = np.minimum(strip_d(za, zb), strip_d(za, zb_part))
        rows, cols = linear_sum_assignment(cost)
        return float(cost[rows, cols].max())

    return max(family_distance(a.lambda1, b.lambda1, 1),
               family_distance(a.lambda2, b.lambda2, 2))


def states_equal(a, b, eta, tol=_DEDUP_TOL):
    return state_distance(a, b, eta) <= tol


def min_root_separation(state: BetheState, eta):
    """Smallest strip distance between distinct roots of one family,
    counting crossing partners; parasitic states collapse this to ~0."""
    best = np.inf
    for roots, k in ((state.lambda1, 1), (state.lambda2, 2)):
        z = np.asarray(roots)
        for i in range(len(z)):
            for j in range(len(z)):
                if i == j:
                    continue
                for cand in (z[j], -z[j] - k * eta):
                    d = z[i] - cand
                    d = d - 1j * np.pi * np.round(np.imag(d) / np.pi)
                    best = min(best, abs(d))
    return best


# ---------------------------------------------------------------------------
# damped Newton
# ---------------------------------------------------------------------------

def newton_refine(state: BetheState, ctx: SpectralContext, tol=1e-12,
                  max_iter=60, fd_step=1e-7):
    """Damped Newton with per-iteration frozen row weights.

    Returns (refined BetheState, scaled residual norm, iterations used).
    """
    ctx.validate_state(state)
    n1 = len(state.lambda1)
    n = n1 + len(state.lambda2)

    def clamp(z):
        z = _wrap_strip(z)
        return np.clip(np.real(z), -_RE_CLAMP, _RE_CLAMP) + 1j * np.imag(z)

    z = clamp(np.concatenate([np.asarray(state.lambda1, complex),
                              np.asarray(state.lambda2, complex)]))

    def scaled_norm(zv):
        st = BetheState(state.sector, zv[:n1], zv[n1:])
        r = bae_residuals(st, ctx)
        r = np.where(np.isfinite(r), r, 1e9)
        return float(np.linalg.norm(r))

    used = 0
    for it in range(max_iter):
        used = it
        nr = scaled_norm(z)
        if nr < tol:
            break
        w = _weights(z[:n1], z[n1:], ctx)
        base = _raw_residuals(z[:n1], z[n1:], ctx) * w
        if not np.all(np.isfinite(w)) or not np.all(np.isfinite(base)):
            break
        x = np.concatenate([z.real, z.imag])

        def weighted(xv):
            zz = xv[:n] + 1j * xv[n:]
            r = _raw_residuals(zz[:n1], zz[n1:], ctx) * w
            r = np.where(np.isfinite(r), r, 1e9)
            return np.concatenate([r.real, r.imag])

        r0 = np.concatenate([base.real, base.imag])
        jac = np.empty((2 * n, 2 * n))
        for j in range(2 * n):
            step = fd_step * max(1.0, abs(x[j]))
            xp = x.copy(); xp[j] += step
            xm = x.copy(); xm[j] -= step
            jac[:, j] = (weighted(xp) - weighted(xm)) / (2 * step)
        if not np.all(np.isfinite(jac)):
            break
        try:
            dx, *_ = np.linalg.lstsq(jac, -r0, rcond=None)
        except np.linalg.LinAlgError:
            break
        norm0 = np.linalg.norm(r0)
        damping = 1.0
        improved = False
        for _ in range(35):
            xn = x + damping * dx
            zn = clamp(xn[:n] + 1j * xn[n:])
            rn = _raw_residuals(zn[:n1], zn[n1:], ctx) * w
            rn = np.where(np.isfinite(rn), rn, 1e9)
            if np.linalg.norm(np.concatenate([rn.real, rn.imag])) \
                    < norm0 * (1 - 1e-4 * damping):
                z = zn
                improved = True
                break
            damping *= 0.5
        if not improved:
            break
    final = BetheState(state.sector, z[:n1], z[n1:])
    return final, scaled_norm(z), used + 1


# ---------------------------------------------------------------------------
# seed generation
# ---------------------------------------------------------------------------

def _uniform_seed(rng, n1, n2, ctx):
    l1 = rng.uniform(-1.5, 1.5, n1) + 1j * rng.uniform(-np.pi / 2, np.pi / 2, n1)
    l2 = rng.uniform(-1.5, 1.5, n2) + 1j * rng.uniform(-np.pi / 2, np.pi / 2, n2)
    return BetheState(ctx.sector, l1, l2)


def _structured_seed(rng, n1, n2, ctx):
    """Conjugation-closed draw over the symmetry classes physical roots use:
    plain conjugate pairs, real roots, Im = pi/2 roots, and roots on the
    crossing lines Re = -k eta / 2."""
    eta = ctx.spec.eta.real
    n_single = int(rng.choice([k for k in range(0, 5)
                               if (n1 - k) % 2 == 0 and k <= n1]))
    roots = []
    for _ in range((n1 - n_single) // 2):
        re = rng.uniform(-1.0, 1.0)
        w = rng.uniform()
        if w < 0.4:
            im = rng.uniform(0.02, 0.6)
        elif w < 0.75:
            im = rng.normal(1.35, 0.15)
        else:
            im = rng.uniform(0.6, 1.55)
        roots += [re + 1j * im, re - 1j * im]
    for _ in range(n_single):
        w = rng.uniform()
        if w < 0.5:
            roots.append(complex(rng.uniform(-1.0, 1.0)))
        elif w < 0.8:
            roots.append(rng.uniform(-1.0, 1.0) + 0.5j * np.pi)
        else:
            roots.append(-eta / 2 + 1j * rng.uniform(0.05, 0.7))
    l2 = []
    rem = n2
    while rem > 0:
        if rem >= 2 and rng.uniform() < 0.4:
            re, im = rng.uniform(-0.6, 0.6), rng.uniform(0.02, 0.6)
            l2 += [re + 1j * im, re - 1j * im]
            rem -= 2
        else:
            if rng.uniform() < 0.55:
                l2.append(complex(rng.uniform(-0.6, 0.6)))
            else:
                l2.append(-eta + 1j * rng.uniform(0.05, 0.6))
            rem -= 1
    return BetheState(ctx.sector, roots[:n1], l2)


def _mutated_seed(rng, found, ctx, scale=0.25):
    base = found[int(rng.integers(0, len(found)))]
    l1 = np.asarray(base.lambda1, complex).copy()
    l2 = np.asarray(base.lambda2, complex).copy()
    k = max(1, int(rng.integers(1, len(l1) + 1)) // 2)
    idx = rng.choice(len(l1), size=k, replace=False)
    l1[idx] += rng.normal(0, scale, k) + 1j * rng.normal(0, scale, k)
    if len(l2) and rng.uniform() < 0.5:
        j = int(rng.integers(0, len(l2)))
        l2[j] += rng.normal(0, scale) + 1j * rng.normal(0, scale)
    return BetheState(ctx.sector, l1, l2)


# ---------------------------------------------------------------------------
# the multi-start driver
# ---------------------------------------------------------------------------

def _accept(state, ctx, residue_tol):
    """Reject parasitic cleared-system solutions via the residue form."""
    if min_root_separation(state, ctx.spec.eta) < 1e-5:
        return False
    try:
        res = polynomiality_residues(state, ctx)
    except ValueError:
        return False
    return bool(np.abs(res).max() <= residue_tol) if len(res) else True


def newton_solve(task: SolveTask):
    """Seeded refinement plus multi-start search; deduplicated results.

    Explicit seeds are refined first.  Random starts then run in fixed-size
    batches (optionally in parallel; ODBA_THREADS caps the workers) with
    deflation: a draw landing within 1e-3 of an already-found state is
    redrawn rather than re-iterated.
    """
    ctx = task.ctx
    eta = ctx.spec.eta
    n1 = expected_root_count(ctx.spec, ctx.sector)
    n2 = ctx.sector
    rng = np.random.default_rng(task.rng_seed)
    results = []
    found_states = []

    def register(refined, resid, iters):
        canon = canonicalize(refined, eta)
        if any(states_equal(canon, r.state, eta) for r in results):
            return
        if not _accept(canon, ctx, task.residue_tol):
            return
        en = None
        if ctx.spec.is_homogeneous:
            from .spectrum import energy as energy_of
            try:
                en = energy_of(canon, ctx)
            except ValueError:
                en = None
        results.append(SolveResult(state=canon, residual_norm=resid,
                                   iterations=iters, energy=en))
        found_states.append(canon)

    for seed in task.seeds:
        refined, resid, iters = newton_refine(seed, ctx, task.tol, task.max_iter)
        if resid <= max(task.tol, 1e-10):
            register(refined, resid, iters)

    def draw_seed():
        for _ in range(50):
            if found_states and task.table_aware and rng.uniform() < 0.45:
                cand = _mutated_seed(rng, found_states, ctx)
            elif task.table_aware:
                cand = _structured_seed(rng, n1, n2, ctx)
            else:
                cand = _uniform_seed(rng, n1, n2, ctx)
            near_known = any(state_distance(canonicalize(cand, eta), s, eta)
                             < _DEFLATION_TOL for s in found_states)
            if not near_known:
                return cand
        return cand

    remaining = task.starts
    workers = worker_count()
    while remaining > 0:
        batch = [draw_seed() for _ in range(min(_SEED_BATCH, remaining))]
        remaining -= len(batch)
        runner = lambda s: newton_refine(s, ctx, task.tol, task.max_iter)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(runner, batch))
        else:
            outcomes = [runner(s) for s in batch]
        for refined, resid, iters in outcomes:
            if resid <= max(task.tol, 1e-10):
                register(refined, resid, iters)

    results.sort(key=lambda r: ((r.energy.real if r.energy is not None else 0.0),
                                r.residual_norm))
    return results


# ---------------------------------------------------------------------------
# verification against exact diagonalisation
# ---------------------------------------------------------------------------

def verify_against_spectrum(results, ctx: SpectralContext, u_min=-1.0, u_max=1.0,
                            n_points=50, offset=1e-4, match_tol=1e-6, frame=None):
    """Match each solved state's Lambda(u) to an exact eigenvalue curve.

    Grid points closer than 1e-6 to a pole of the state's T-Q expression are
    shifted by i*offset before both sides are evaluated, so the comparison
    stays exact.  Matches within match_tol of two different curves are
    flagged as ambiguous.
    """
    spec, pair = ctx.spec, ctx.pair
    frame = frame or spectral_frame(spec, pair)
    dim = frame["vectors"].shape[0]
    base_grid = np.linspace(u_min, u_max, n_points)
    charge = None
    report = {"states": [], "coverage": 0, "dimension": dim,
              "ambiguous": 0, "probe": frame["probe"]}
    matched = set()
    for res in results:
        pts = []
        for ug in base_grid:
            u = complex(ug)
            if pole_distance(u, res.state, ctx) < 1e-6:
                u = u + 1j * offset
            pts.append(u)
        curves = eigenvalue_curves(frame, spec, pair, pts)
        lam_vals = np.array([lambda1(u, res.state, ctx, pole_tol=None)
                             for u in pts])
        sup = np.abs(curves - lam_vals[:, None]).max(axis=0)
        order = np.argsort(sup)
        best = int(order[0])
        ambiguous = bool(len(order) > 1 and sup[order[1]] <= match_tol)
        res.matched_eigenvalue_index = best
        res.sup_norm_error = float(sup[best])
        res.sector_expectation = float(frame["sectors"][best])
        ok = sup[best] <= match_tol
        entry = {"matched_index": best, "sup_norm_error": res.sup_norm_error,
                 "curve_sector": int(frame["sectors"][best]),
                 "state_sector": res.state.sector,
                 "sector_consistent": int(frame["sectors"][best]) == res.state.sector,
                 "within_tolerance": bool(ok), "ambiguous": ambiguous}
        if ok and entry["sector_consistent"]:
            matched.add(best)
        report["ambiguous"] += int(ambiguous)
        report["states"].append(entry)
    report["coverage"] = len(matched)
    report["matched_indices"] = sorted(matched)
    return report
