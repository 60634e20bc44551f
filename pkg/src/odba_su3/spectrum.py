"""Scalar spectral machinery: Q-functions, nested T-Q eigenvalue ansatz,
Bethe-root residue checks, and the energy formula.

The transfer-matrix eigenvalue in charge sector M is written as

    Lambda(u) = z_1(u) + z_2(u) + z_3(u) + x_1(u),

three "homogeneous" terms built from two Q-functions

    Q^(k)(u) = prod_l sinh(u - lam^(k)_l) sinh(u + lam^(k)_l + k eta),

with root counts L_1 = N + M + 6 and L_2 = M, plus one inhomogeneous term
x_1 whose strength h is pinned by the large-|u| behaviour and depends on the
sector.  Lambda is a trigonometric polynomial exactly when its residues at
the Q-zeros cancel; those cancellation conditions are the Bethe equations.
``polynomiality_residues`` evaluates the residues directly and is kept
deliberately independent of the cleared-denominator residuals the solver
iterates on, so the two formulations cross-check each other.

Note Q^(k)(u) = 2^{-L_k} prod_l (cosh(2u + k eta) - cosh(2 lam_l + k eta)):
root multisets are only defined modulo lam -> lam + i pi and the crossing
map lam -> -lam - k eta, which is what canonicalisation (solver module)
quotients out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryPair, delta_q_k_minus, delta_q_k_plus
from .transfer import ChainSpec, quantum_determinant

sh = np.sinh
ex = np.exp


class PoleProximityError(ValueError):
    """Evaluation point too close to a pole of the T-Q expression."""

    def __init__(self, u, distance):
        super().__init__(f"u = {u} is within {distance:.2e} of a pole; "
                         "retry with an offset")
        self.u = u
        self.distance = distance


@dataclass(frozen=True)
class BetheState:
    """Sector label plus the two root families of the nested ansatz."""

    sector: int
    lambda1: tuple
    lambda2: tuple

    def __post_init__(self):
        object.__setattr__(self, "sector", int(self.sector))
        object.__setattr__(self, "lambda1", tuple(complex(z) for z in self.lambda1))
        object.__setattr__(self, "lambda2", tuple(complex(z) for z in self.lambda2))
        if len(self.lambda2) != self.sector:
            raise ValueError(
                f"sector {self.sector} requires {self.sector} second-level "
                f"roots, got {len(self.lambda2)}")


def expected_root_count(spec: ChainSpec, sector):
    """First-level root count in a sector: N + M + 6."""
    return spec.n_sites + sector + 6


@dataclass(frozen=True)
class SpectralContext:
    """Chain, boundary, sector, and the sector-bound inhomogeneity constant."""

    spec: ChainSpec
    pair: BoundaryPair
    sector: int
    h: complex

    @classmethod
    def create(cls, spec, pair, sector):
        if not 0 <= sector <= spec.n_sites:
            raise ValueError(f"sector {sector} outside [0, {spec.n_sites}]")
        return cls(spec, pair, int(sector),
                   h_constant(pair.kind, sector, spec, pair))

    def validate_state(self, state: BetheState):
        if state.sector != self.sector:
            raise ValueError(f"state sector {state.sector} != context sector "
                             f"{self.sector}")
        want = expected_root_count(self.spec, self.sector)
        if len(state.lambda1) != want:
            raise ValueError(f"expected {want} first-level roots, "
                             f"got {len(state.lambda1)}")


# ---------------------------------------------------------------------------
# scalar building blocks
# ---------------------------------------------------------------------------

def b0(u, spec: ChainSpec):
    r = np.ones_like(np.asarray(u, dtype=complex))
    for th in spec.theta:
        r = r * sh(u - th) * sh(u + th)
    return r if np.ndim(u) else complex(r)


def a0(u, spec: ChainSpec):
    return b0(u + spec.eta, spec)


def q_function(k, u, state: BetheState, spec: ChainSpec):
    """Q^(k)(u); k = 0 is the inhomogeneity product, k = 3 is one."""
    if k == 0:
        return b0(u, spec)
    if k == 3:
        return np.ones_like(np.asarray(u, dtype=complex)) if np.ndim(u) else 1.0 + 0j
    roots = {1: state.lambda1, 2: state.lambda2}[k]
    r = np.ones_like(np.asarray(u, dtype=complex))
    for lam in roots:
        r = r * sh(u - lam) * sh(u + lam + k * spec.eta)
    return r if np.ndim(u) else complex(r)


def k_decomposition(m, u, pair: BoundaryPair, eta):
    """Scalar factors K^(m)(u) splitting the boundary quantum determinant.

    K^(3) = K^(2) for every family.  The diagonal (all-c-zero) limit reduces
    to e^{3 eta / 2} sinh-products automatically.
    """
    if m not in (1, 2, 3):
        raise ValueError(f"m must be 1, 2 or 3, got {m}")
    if m == 3:
        m = 2
    z, c = pair.minus.zeta, pair.minus.c
    zp, cp = pair.plus.zeta, pair.plus.c
    kind = pair.kind
    if kind == "I":
        if m == 1:
            return ex(2 * eta) * (ex(-u) * sh(z + u) - c * ex(-2 * u) * sh(2 * u)) * \
                (ex(u - eta / 2) * sh(zp - u + eta / 2)
                 + cp * ex(2 * (u - eta / 2)) * sh(2 * (u - eta / 2)))
        return ex(2 * eta) * (ex(u + eta) * sh(z - u - eta)
                              + c * ex(2 * (u + eta)) * sh(2 * (u + eta))) * \
            (ex(-u - 1.5 * eta) * sh(zp + u + 1.5 * eta)
             - cp * ex(-2 * (u + 1.5 * eta)) * sh(2 * (u + 1.5 * eta)))
    if kind == "II":
        if m == 1:
            return ex(2 * eta) * (ex(-u) * sh(z + u) - c * sh(2 * u)) * \
                (ex(u - eta / 2) * sh(zp - u + eta / 2) + cp * sh(2 * (u - eta / 2)))
        return ex(2 * eta) * (ex(u + eta) * sh(z - u - eta) + c * sh(2 * (u + eta))) * \
            (ex(-u - 1.5 * eta) * sh(zp + u + 1.5 * eta) - cp * sh(2 * (u + 1.5 * eta)))
    if m == 1:
        return ex(2 * eta) * (ex(u) * sh(z - u) - c * ex(2 * u) * sh(2 * u)) * \
            (ex(-u + eta / 2) * sh(zp + u - eta / 2)
             + cp * ex(-2 * (u - eta / 2)) * sh(2 * (u - eta / 2)))
    return ex(2 * eta) * (ex(-u - eta) * sh(z + u + eta)
                          + c * ex(-2 * (u + eta)) * sh(2 * (u + eta))) * \
        (ex(u + 1.5 * eta) * sh(zp - u - 1.5 * eta)
         - cp * ex(2 * (u + 1.5 * eta)) * sh(2 * (u + 1.5 * eta)))


def h_constant(kind, sector, spec: ChainSpec, pair: BoundaryPair):
    """Sector-resolved strength of the inhomogeneous T-Q term."""
    pm, pp = pair.minus, pair.plus
    if pm.c == 0 or pp.c == 0:
        raise ValueError("h is defined for off-diagonal boundaries only "
                         "(c and c' nonzero); use the diagonal mode instead")
    eta = spec.eta
    MN = sector + spec.n_sites
    c, c1, c2 = pm.c, pm.c1, pm.c2
    cp, c1p, c2p = pp.c, pp.c1, pp.c2
    if kind == "I":
        return (c * (c1p * c2p / cp) * ex(MN * eta + 15 * eta)
                + cp * (c1 * c2 / c) * ex(-MN * eta - 13 * eta)
                - (c1 * c2p + c1p * c2 * ex(2 * eta)))
    if kind == "II":
        return (c * (c1p * c2p / cp) * ex(-MN * eta - 12 * eta)
                + cp * (c1 * c2 / c) * ex(MN * eta + 16 * eta)
                - (c1 * c2p + c1p * c2 * ex(4 * eta)))
    return (c * (c1p * c2p / cp) * ex(-MN * eta - 11 * eta)
            + cp * (c1 * c2 / c) * ex(MN * eta + 17 * eta)
            - (c1 * c2p + c1p * c2 * ex(2 * eta)) * ex(2 * eta))


def f1(u, ctx: SpectralContext):
    """Inhomogeneous-term profile; crossing symmetric, f1(u) = f1(-u-eta)."""
    eta = ctx.spec.eta
    return ((0.25 ** 3) * ctx.h * sh(2 * u) * sh(2 * u + eta) ** 2
            * sh(2 * u + 2 * eta) * sh(2 * u - eta) * sh(2 * u + 3 * eta))


# ---------------------------------------------------------------------------
# the nested T-Q eigenvalue and its relatives
# ---------------------------------------------------------------------------

def pole_distance(u, state: BetheState, ctx: SpectralContext, fused=False):
    """Distance from u to the nearest pole of Lambda (or Lambda_2)."""
    eta = ctx.spec.eta

    def per(a):
        return abs(a - 1j * np.pi * np.round(np.imag(a) / np.pi))

    ds = [per(u + eta / 2), per(u + eta)]   # zeros of sinh(2u+eta), sinh(2u+2eta)
    if fused:
        ds += [per(u), per(u - eta / 2)]
    for lam in state.lambda1:
        ds += [per(u - lam), per(u + lam + eta)]
    for lam in state.lambda2:
        ds += [per(u - lam), per(u + lam + 2 * eta)]
    return min(ds) if ds else np.inf


def _require_clear(u, state, ctx, fused, pole_tol):
    if pole_tol is not None:
        d = pole_distance(u, state, ctx, fused)
        if d < pole_tol:
            raise PoleProximityError(u, d)


def _z_parts(u, state, ctx):
    spec, pair, eta = ctx.spec, ctx.pair, ctx.spec.eta
    q1 = lambda x: q_function(1, x, state, spec)
    q2 = lambda x: q_function(2, x, state, spec)
    z1 = (sh(2 * u + 3 * eta) / sh(2 * u + eta)
          * k_decomposition(1, u, pair, eta) * a0(u, spec) * q1(u - eta) / q1(u))
    z2 = (sh(2 * u) * sh(2 * u + 3 * eta) / (sh(2 * u + eta) * sh(2 * u + 2 * eta))
          * k_decomposition(2, u, pair, eta) * b0(u, spec)
          * q1(u + eta) * q2(u - eta) / (q1(u) * q2(u)))
    z3 = (sh(2 * u) / sh(2 * u + 2 * eta)
          * k_decomposition(3, u, pair, eta) * b0(u, spec) * q2(u + eta) / q2(u))
    x1 = (sh(2 * u) * sh(2 * u + 3 * eta) * a0(u, spec) * b0(u, spec)
          * f1(u, ctx) * q2(-u - eta) / q1(u))
    return z1, z2, z3, x1


def lambda1(u, state: BetheState, ctx: SpectralContext, pole_tol=1e-6):
    """The four-term T-Q expression for the transfer-matrix eigenvalue."""
    ctx.validate_state(state)
    _require_clear(u, state, ctx, False, pole_tol)
    z1, z2, z3, x1 = _z_parts(u, state, ctx)
    return z1 + z2 + z3 + x1


def lambda2(u, state: BetheState, ctx: SpectralContext, pole_tol=1e-6):
    """Eigenvalue of the first fused transfer matrix."""
    ctx.validate_state(state)
    _require_clear(u, state, ctx, True, pole_tol)
    spec, pair, eta = ctx.spec, ctx.pair, ctx.spec.eta
    q1 = lambda x: q_function(1, x, state, spec)
    q2 = lambda x: q_function(2, x, state, spec)
    rho2u = -sh(2 * u - eta) * sh(2 * u - eta + 3 * eta)
    front = rho2u * b0(u - eta, spec)
    k1 = k_decomposition(1, u, pair, eta)
    k2 = k_decomposition(2, u, pair, eta)
    k3m = k_decomposition(3, u - eta, pair, eta)
    term1 = (sh(2 * u - 2 * eta) * sh(2 * u + 3 * eta) / (sh(2 * u) * sh(2 * u - eta))
             * k1 * k_decomposition(2, u - eta, pair, eta) * a0(u, spec)
             * q2(u - 2 * eta) / q2(u - eta))
    term2 = (sh(2 * u - 2 * eta) * sh(2 * u + 3 * eta) / (sh(2 * u + eta) * sh(2 * u))
             * k1 * k3m * a0(u, spec) * q1(u - eta) * q2(u) / (q1(u) * q2(u - eta)))
    term3 = (sh(2 * u - 2 * eta) * sh(2 * u + 3 * eta) / (sh(2 * u + eta) * sh(2 * u + 2 * eta))
             * k2 * k3m * b0(u, spec) * q1(u + eta) / q1(u))
    term4 = (sh(2 * u - 2 * eta) * sh(2 * u + 3 * eta) * a0(u, spec) * b0(u, spec)
             * f1(u, ctx) * q2(-u - eta) * q2(u) * k3m / (q1(u) * q2(u - eta)))
    return front * (term1 + term2 + term3 + term4)


def lambda3(u, ctx: SpectralContext):
    """Eigenvalue of the maximally fused transfer matrix: the quantum
    determinant, independent of the Bethe roots."""
    return quantum_determinant(u, ctx.spec, ctx.pair)


def lambda3_from_roots(u, state: BetheState, ctx: SpectralContext):
    """Same quantity assembled from the z-products; root dependence cancels."""
    spec, pair, eta = ctx.spec, ctx.pair, ctx.spec.eta
    q2v = lambda x: q_function(2, x, state, spec)
    q1v = lambda x: q_function(1, x, state, spec)
    pref = 1.0 + 0j
    for k in (1, 2, 3):
        pref *= -sh(2 * u - k * eta) * sh(2 * u - k * eta + 3 * eta)
    z1 = (sh(2 * u + 3 * eta) / sh(2 * u + eta)
          * k_decomposition(1, u, pair, eta) * a0(u, spec) * q1v(u - eta) / q1v(u))
    v = u - eta
    z2 = (sh(2 * v) * sh(2 * v + 3 * eta) / (sh(2 * v + eta) * sh(2 * v + 2 * eta))
          * k_decomposition(2, v, pair, eta) * b0(v, spec)
          * q1v(v + eta) * q2v(v - eta) / (q1v(v) * q2v(v)))
    w = u - 2 * eta
    z3 = (sh(2 * w) / sh(2 * w + 2 * eta)
          * k_decomposition(3, w, pair, eta) * b0(w, spec) * q2v(w + eta) / q2v(w))
    return pref * z1 * z2 * z3


# ---------------------------------------------------------------------------
# residue (polynomiality) checks
# ---------------------------------------------------------------------------

def polynomiality_residues(state: BetheState, ctx: SpectralContext,
                           degenerate_tol=1e-8):
    """Scaled pole residues of Lambda at every Bethe root.

    For each first-level root the three Lambda terms sharing the Q^(1) pole
    are summed and divided by the largest of them; for each second-level root
    likewise with the Q^(2) pole pair.  A converged state drives all entries
    to zero.  Nearly coincident roots make the simple-pole form meaningless
    and are reported as degenerate.
    """
    ctx.validate_state(state)
    spec, pair = ctx.spec, ctx.pair
    eta = spec.eta
    l1 = np.asarray(state.lambda1)
    l2 = np.asarray(state.lambda2)

    def perdist(a, b):
        d = a - b
        d = d - 1j * np.pi * np.round(np.imag(d) / np.pi)
        return abs(d)

    for fam, k in ((l1, 1), (l2, 2)):
        for i in range(len(fam)):
            for j in range(len(fam)):
                if i < j and (perdist(fam[i], fam[j]) < degenerate_tol
                              or perdist(fam[i], -fam[j] - k * eta) < degenerate_tol):
                    raise ValueError(
                        f"nearly coincident roots {fam[i]} and {fam[j]} "
                        "(degenerate pole structure)")

    out = []
    for lam in l1:
        n1 = (sh(2 * lam + 3 * eta) / sh(2 * lam + eta)
              * k_decomposition(1, lam, pair, eta) * a0(lam, spec)
              * q_function(1, lam - eta, state, spec))
        n2 = (sh(2 * lam) * sh(2 * lam + 3 * eta)
              / (sh(2 * lam + eta) * sh(2 * lam + 2 * eta))
              * k_decomposition(2, lam, pair, eta) * b0(lam, spec)
              * q_function(1, lam + eta, state, spec)
              * q_function(2, lam - eta, state, spec)
              / q_function(2, lam, state, spec))
        n3 = (sh(2 * lam) * sh(2 * lam + 3 * eta) * a0(lam, spec) * b0(lam, spec)
              * f1(lam, ctx) * q_function(2, -lam - eta, state, spec))
        scale = max(abs(n1), abs(n2), abs(n3))
        out.append((n1 + n2 + n3) / scale if scale > 0 else 0.0)
    for mu in l2:
        n1 = (sh(2 * mu + 3 * eta) * k_decomposition(2, mu, pair, eta)
              * q_function(1, mu + eta, state, spec)
              * q_function(2, mu - eta, state, spec))
        n2 = (sh(2 * mu + eta) * k_decomposition(3, mu, pair, eta)
              * q_function(1, mu, state, spec)
              * q_function(2, mu + eta, state, spec))
        scale = max(abs(n1), abs(n2))
        out.append((n1 + n2) / scale if scale > 0 else 0.0)
    return np.asarray(out)


def check_functional_relations(state: BetheState, ctx: SpectralContext, tol=1e-8):
    """Production relations among Lambda, Lambda_2, Lambda_3 at u = +-theta_j.

    These hold identically in the roots by the structure of the ansatz; the
    returned report therefore also carries the residue check, which is the
    part that actually distinguishes Bethe roots from arbitrary ones.  With a
    homogeneous chain the relations degenerate and only the residue part is
    meaningful.
    """
    spec = ctx.spec
    eta = spec.eta
    checks = []
    if not spec.is_homogeneous:
        lam_at = lambda x: lambda1(x, state, ctx, pole_tol=None)
        lam2_at = lambda x: lambda2(x, state, ctx, pole_tol=None)
        for j, th in enumerate(spec.theta):
            for sgn in (1, -1):
                x = sgn * th
                lam_x = lam_at(x)
                rel1 = (lam_x * lam_at(x - eta)
                        - lam2_at(x) / (-sh(2 * x - eta) * sh(2 * x + 2 * eta)))
                scal1 = abs(lam_x * lam_at(x - eta))
                checks.append({"name": f"Lambda production m=1 j={j + 1} sign={sgn:+d}",
                               "residual": abs(rel1) / max(1.0, scal1)})
                norm2 = ((-sh(2 * x - eta) * sh(2 * x + 2 * eta))
                         * (-sh(2 * x - 2 * eta) * sh(2 * x + eta)))
                rel2 = lam_x * lam2_at(x - eta) - lambda3(x, ctx) / norm2
                checks.append({"name": f"Lambda production m=2 j={j + 1} sign={sgn:+d}",
                               "residual": abs(rel2) / max(1.0, abs(lambda3(x, ctx) / norm2))})
                checks.append({"name": f"Lambda2 zero at {sgn:+d}theta_{j + 1}+eta",
                               "residual": abs(lam2_at(x + eta))
                               / max(1.0, abs(lam2_at(x + eta + 0.31)))})
    res = polynomiality_residues(state, ctx)
    checks.append({"name": "max scaled pole residue",
                   "residual": float(np.abs(res).max()) if len(res) else 0.0})
    for c in checks:
        c["passed"] = bool(c["residual"] <= tol)
    return {"checks": checks, "passed": all(c["passed"] for c in checks)}


# ---------------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------------

def energy(state: BetheState, ctx: SpectralContext, step=2.5e-4):
    """E = sinh(eta) Lambda'(0) / Lambda(0) for a homogeneous chain.

    Lambda'(0) uses sixth-order central differences with points inside
    |u| <= 4 * step plus one Richardson sweep; u = 0 itself is pole-free
    because the sinh(2u) prefactors remove three of the four terms there.
    """
    if not ctx.spec.is_homogeneous:
        raise ValueError("the energy formula applies to the homogeneous chain")
    lam0 = lambda1(0.0, state, ctx, pole_tol=None)
    if abs(lam0) < 1e-12:
        raise ValueError(f"Lambda(0) = {lam0:.3e} is singular")

    def diff6(h):
        f = lambda x: lambda1(x, state, ctx, pole_tol=None)
        return (0.75 * (f(h) - f(-h)) - 0.15 * (f(2 * h) - f(-2 * h))
                + (f(3 * h) - f(-3 * h)) / 60) / h

    d_h = diff6(step)
    d_h2 = diff6(step / 2)
    deriv = (64 * d_h2 - d_h) / 63
    return np.sinh(ctx.spec.eta) * deriv / lam0


# ---------------------------------------------------------------------------
# diagonal-boundary reduction
# ---------------------------------------------------------------------------

def diagonal_k_decomposition(m, u, pair: BoundaryPair, eta):
    """The all-c-zero limit of the K^(m) factors (kind I layout)."""
    if m == 3:
        m = 2
    z, zp = pair.minus.zeta, pair.plus.zeta
    if m == 1:
        return ex(1.5 * eta) * sh(z + u) * sh(zp - u + eta / 2)
    return ex(1.5 * eta) * sh(z - u - eta) * sh(zp + u + 1.5 * eta)


def diagonal_lambda(u, state: BetheState, spec: ChainSpec, pair: BoundaryPair):
    """Three-term homogeneous T-Q for diagonal boundaries."""
    if not pair.is_diagonal:
        raise ValueError("diagonal mode requires all off-diagonal c's to vanish")
    eta = spec.eta
    q1 = lambda x: q_function(1, x, state, spec)
    q2 = lambda x: q_function(2, x, state, spec)
    t1 = (sh(2 * u + 3 * eta) / sh(2 * u + eta)
          * diagonal_k_decomposition(1, u, pair, eta) * a0(u, spec)
          * q1(u - eta) / q1(u))
    t2 = (sh(2 * u) * sh(2 * u + 3 * eta) / (sh(2 * u + eta) * sh(2 * u + 2 * eta))
          * diagonal_k_decomposition(2, u, pair, eta) * b0(u, spec)
          * q1(u + eta) * q2(u - eta) / (q1(u) * q2(u)))
    t3 = (sh(2 * u) / sh(2 * u + 2 * eta)
          * diagonal_k_decomposition(3, u, pair, eta) * b0(u, spec)
          * q2(u + eta) / q2(u))
    return t1 + t2 + t3


def diagonal_lambda2(u, state: BetheState, spec: ChainSpec, pair: BoundaryPair):
    """Three-term homogeneous form of the fused eigenvalue."""
    if not pair.is_diagonal:
        raise ValueError("diagonal mode requires all off-diagonal c's to vanish")
    eta = spec.eta
    q1 = lambda x: q_function(1, x, state, spec)
    q2 = lambda x: q_function(2, x, state, spec)
    kd = lambda m, x: diagonal_k_decomposition(m, x, pair, eta)
    rho2u = -sh(2 * u - eta) * sh(2 * u + 2 * eta)
    front = rho2u * b0(u - eta, spec)
    t1 = (sh(2 * u - 2 * eta) * sh(2 * u + 3 * eta) / (sh(2 * u) * sh(2 * u - eta))
          * kd(1, u) * kd(2, u - eta) * a0(u, spec) * q2(u - 2 * eta) / q2(u - eta))
    t2 = (sh(2 * u - 2 * eta) * sh(2 * u + 3 * eta) / (sh(2 * u + eta) * sh(2 * u))
          * kd(1, u) * kd(3, u - eta) * a0(u, spec)
          * q1(u - eta) * q2(u) / (q1(u) * q2(u - eta)))
    t3 = (sh(2 * u - 2 * eta) * sh(2 * u + 3 * eta)
          / (sh(2 * u + eta) * sh(2 * u + 2 * eta))
          * kd(2, u) * kd(3, u - eta) * b0(u, spec) * q1(u + eta) / q1(u))
    return front * (t1 + t2 + t3)


def diagonal_vacuum_lambda(u, spec: ChainSpec, pair: BoundaryPair):
    """Eigenvalue of the all-down reference state (trivial Q-functions)."""
    vac = BetheState(0, (), ())
    return diagonal_lambda(u, vac, spec, pair)


# ---------------------------------------------------------------------------
# consistency checks on the K decomposition
# ---------------------------------------------------------------------------

def check_k_consistency(pair: BoundaryPair, eta, n_points=20, seed=0, tol=1e-12):
    """Crossing pairing of the K^(m) and their quantum-determinant product.

    The product identity holds with an overall minus sign relative to the
    bare quantum-determinant quotient; the sign is fixed here once and the
    fused-transfer checks pin it independently.
    """
    rng = np.random.default_rng(seed)
    p = None
    checks = []
    worst_pairing = 0.0
    worst_product = 0.0
    from .vertex import BulkParams
    bulk = BulkParams(eta)
    for _ in range(n_points):
        u = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        for r in (1, 2):
            lhs = (k_decomposition(r, u, pair, eta)
                   * k_decomposition(r, -u - r * eta, pair, eta))
            rhs = (k_decomposition(r + 1, u, pair, eta)
                   * k_decomposition(r + 1, -u - r * eta, pair, eta))
            worst_pairing = max(worst_pairing,
                                abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0))
        lhs = (k_decomposition(1, u, pair, eta)
               * k_decomposition(2, u - eta, pair, eta)
               * k_decomposition(3, u - 2 * eta, pair, eta))
        den = 1.0 + 0j
        for k in (1, 2, 3):
            den *= sh(2 * u + k * eta) * sh(2 * u - (k + 1) * eta)
        rhs = -delta_q_k_minus(u, pair.minus, bulk) * delta_q_k_plus(u, pair, bulk) / den
        worst_product = max(worst_product,
                            abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0))
    checks.append({"name": "crossing pairing of K^(m)", "residual": worst_pairing})
    checks.append({"name": "quantum-determinant product", "residual": worst_product})
    for c in checks:
        c["passed"] = bool(c["residual"] <= tol)
    return {"checks": checks, "passed": all(c["passed"] for c in checks)}
