"""Double-row transfer matrices, fusion, and the machine checks of their
operator identities.

Conventions.  Operators live on legs ordered (aux_1, ..., aux_m, site_1, ...,
site_N), all of dimension 3.  The one-row monodromy T_a(u) multiplies
R_{a,site} factors from site N down to site 1; its partner That_a(u) runs the
opposite way with the R legs swapped.  The double-row transfer matrix is

    t(u) = tr_a { K^+_a(u) T_a(u) K^-_a(u) That_a(u) },

and the fused matrices t_2, t_3 replace the auxiliary space by (anti)
symmetrised tensor powers built from the degeneracy projectors of R at
u = -eta.  The projector with reversed leg order differs from the plain one
(P-_{12} != P-_{21}); every sandwich below keeps the printed index order.

One deliberate deviation from the naive reading of the fused dual boundary
matrix: in K^+_{1..m}(u) every factor R_{1k} is conjugated by the crossing
matrix on leg k (equivalently, by M on leg 1, which the R-matrix invariance
makes identical).  Conjugating only leg 2 breaks the quantum-determinant
factorisation of t_3 at the 1e-2 level, while the per-leg form reproduces
it to machine precision together with all production identities; see the
checks in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import (BoundaryPair, delta_q_k_minus, delta_q_k_plus, k_minus,
                       k_plus, rho_k_minus_scalar, rho_k_plus_scalar)
from .tensor import (Operator, TrigPolynomial, embed, mul_embedded_left,
                     mul_embedded_right, reconstruct_trig_polynomial,
                     swap_matrix, trace_out)
from .vertex import (BulkParams, E_UNITS, crossing_matrix, r_matrix,
                     relative_residual, rho1, rho2)

IPI_HALF = 0.5j * np.pi


@dataclass(frozen=True)
class ChainSpec:
    """Bulk chain data: site count, crossing parameter, inhomogeneities."""

    n_sites: int
    eta: complex
    theta: tuple

    def __post_init__(self):
        n = int(self.n_sites)
        if n < 1:
            raise ValueError("need at least one site")
        theta = tuple(complex(t) for t in self.theta)
        if len(theta) != n:
            raise ValueError(f"{len(theta)} inhomogeneities for {n} sites")
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "eta", complex(self.eta))
        object.__setattr__(self, "theta", theta)
        BulkParams(self.eta)  # reject degenerate eta

    @classmethod
    def homogeneous(cls, n_sites, eta):
        return cls(n_sites, eta, (0.0,) * n_sites)

    @property
    def bulk(self):
        return BulkParams(self.eta)

    @property
    def is_homogeneous(self):
        return all(t == 0 for t in self.theta)

    def identity_point_margin(self):
        """Smallest |rho2(+-2 theta_j - k eta)| over the production-identity
        normalisers; ~0 means the ChainSpec invariant is violated."""
        vals = []
        for th in self.theta:
            for sgn in (1, -1):
                for k in (1, 2):
                    vals.append(abs(rho2(2 * sgn * th - k * self.eta, self.bulk)))
        return min(vals)


# ---------------------------------------------------------------------------
# fusion projectors
# ---------------------------------------------------------------------------

def _pair_vectors(eta):
    nrm = 1.0 / np.sqrt(2 * np.exp(eta) * np.cosh(eta))
    out = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        v = np.zeros(9, dtype=complex)
        v[3 * i + j] = 1.0
        v[3 * j + i] = -np.exp(eta)
        out.append(nrm * v)
    return out


def _triple_vector(eta):
    nrm = 1.0 / np.sqrt(2 * np.exp(3 * eta) * (2 * np.cosh(eta) + np.cosh(3 * eta)))
    v = np.zeros(27, dtype=complex)
    terms = (((0, 1, 2), 1.0),
             ((0, 2, 1), -np.exp(eta)),
             ((2, 0, 1), np.exp(2 * eta)),
             ((1, 0, 2), -np.exp(eta)),
             ((1, 2, 0), np.exp(2 * eta)),
             ((2, 1, 0), -np.exp(3 * eta)))
    for (i, j, k), w in terms:
        v[9 * i + 3 * j + k] = w
    return nrm * v


def _reverse_legs(mat, m):
    perm = tuple(range(m - 1, -1, -1))
    tens = mat.reshape((3,) * (2 * m))
    return tens.transpose(perm + tuple(m + p for p in perm)).reshape(3 ** m, 3 ** m)


@dataclass(frozen=True)
class FusionProjectors:
    """Rank-3 pair and rank-1 triple projectors with their degeneracy scales.

    The outer products use the bilinear pairing (no conjugation), which is
    what makes p^2 = p hold for complex eta.
    """

    p12: Operator
    p21: Operator
    p123: Operator
    p321: Operator
    s12: Operator
    s123: Operator
    phi123: np.ndarray
    phi321: np.ndarray


def fusion_projectors(p: BulkParams) -> FusionProjectors:
    eta = p.eta
    p12 = sum(np.outer(v, v) for v in _pair_vectors(eta))
    sw = swap_matrix(3)
    p21 = sw @ p12 @ sw
    v123 = _triple_vector(eta)
    v321 = v123.reshape(3, 3, 3).transpose(2, 1, 0).reshape(27)
    s12 = -np.sinh(2 * eta) * np.diag(
        [1, np.exp(eta), np.exp(eta), np.exp(-eta), 1, np.exp(eta),
         np.exp(-eta), np.exp(-eta), 1]).astype(complex)
    s123 = (-2 * np.sinh(2 * eta) * np.sinh(eta) ** 2
            * (2 * np.cosh(eta) + np.cosh(3 * eta))) * np.diag(
        [1, 1, 1, 1, 1, np.exp(3 * eta), 1, np.exp(eta), 1,
         1, 1, np.exp(eta), 1, 1, 1, np.exp(-eta), 1, 1,
         1, np.exp(-eta), 1, np.exp(-3 * eta), 1, 1, 1, 1, 1]).astype(complex)
    return FusionProjectors(
        p12=Operator(p12, (3, 3)),
        p21=Operator(p21, (3, 3)),
        p123=Operator(np.outer(v123, v123), (3, 3, 3)),
        p321=Operator(np.outer(v321, v321), (3, 3, 3)),
        s12=Operator(s12, (3, 3)),
        s123=Operator(s123, (3, 3, 3)),
        phi123=v123,
        phi321=v321,
    )


# ---------------------------------------------------------------------------
# monodromies and the plain transfer matrix
# ---------------------------------------------------------------------------

def _monodromy_raw(u, spec, aux, dims, sites):
    p = spec.bulk
    big = np.eye(int(np.prod(dims)), dtype=complex)
    for s, th in zip(sites, spec.theta):
        big = mul_embedded_left(r_matrix(u - th, p).mat, [aux, s], dims, big)
    return big


def _hat_monodromy_raw(u, spec, aux, dims, sites):
    p = spec.bulk
    big = np.eye(int(np.prod(dims)), dtype=complex)
    for s, th in zip(reversed(sites), reversed(spec.theta)):
        big = mul_embedded_left(r_matrix(u + th, p).mat, [s, aux], dims, big)
    return big


def monodromy(u, spec: ChainSpec) -> Operator:
    """T_0(u) on legs (aux, site_1..site_N)."""
    n = spec.n_sites + 1
    dims = (3,) * n
    mat = _monodromy_raw(u, spec, 0, dims, list(range(1, n)))
    return Operator(mat, dims)


def hat_monodromy(u, spec: ChainSpec) -> Operator:
    """That_0(u) on legs (aux, site_1..site_N)."""
    n = spec.n_sites + 1
    dims = (3,) * n
    mat = _hat_monodromy_raw(u, spec, 0, dims, list(range(1, n)))
    return Operator(mat, dims)


def transfer_matrix(u, spec: ChainSpec, pair: BoundaryPair) -> Operator:
    """Double-row transfer matrix on the quantum legs."""
    p = spec.bulk
    n = spec.n_sites + 1
    dims = (3,) * n
    sites = list(range(1, n))
    big = _hat_monodromy_raw(u, spec, 0, dims, sites)
    big = mul_embedded_left(k_minus(u, pair.minus).mat, [0], dims, big)
    big = _monodromy_raw(u, spec, 0, dims, sites) @ big
    big = mul_embedded_left(k_plus(u, pair, p).mat, [0], dims, big)
    return Operator(trace_out(big, [0], dims), (3,) * spec.n_sites)


# ---------------------------------------------------------------------------
# fused boundary matrices (auxiliary space only)
# ---------------------------------------------------------------------------

def fused_k_minus_pair(u, pair: BoundaryPair, p: BulkParams, proj=None):
    """K^-_{<12>}(u) as a 9x9 matrix on two auxiliary legs."""
    proj = proj or fusion_projectors(p)
    eta = p.eta
    sw = swap_matrix(3)
    i3 = np.eye(3)
    r21 = sw @ r_matrix(2 * u - eta, p).mat @ sw
    raw = (np.kron(k_minus(u, pair.minus).mat, i3) @ r21
           @ np.kron(i3, k_minus(u - eta, pair.minus).mat))
    return proj.p21.mat @ raw @ proj.p12.mat


def fused_k_plus_pair(u, pair: BoundaryPair, p: BulkParams, proj=None):
    """K^+_{<12>}(u) as a 9x9 matrix on two auxiliary legs."""
    proj = proj or fusion_projectors(p)
    eta = p.eta
    i3 = np.eye(3)
    m = crossing_matrix(p).mat
    raw = (np.kron(i3, k_plus(u - eta, pair, p).mat)
           @ np.kron(i3, np.linalg.inv(m))
           @ r_matrix(-2 * u - 2 * eta, p).mat
           @ np.kron(i3, m)
           @ np.kron(k_plus(u, pair, p).mat, i3))
    return proj.p12.mat @ raw @ proj.p21.mat


def fused_k_minus_triple(u, pair: BoundaryPair, p: BulkParams, proj=None):
    """K^-_{<123>}(u) as a 27x27 matrix on three auxiliary legs."""
    proj = proj or fusion_projectors(p)
    eta = p.eta
    k23 = embed(Operator(fused_k_minus_pair(u - eta, pair, p, proj), (3, 3)), [1, 2], 3).mat
    r21 = embed(r_matrix(2 * u - eta, p), [1, 0], 3).mat
    r31 = embed(r_matrix(2 * u - 2 * eta, p), [2, 0], 3).mat
    k1 = embed(k_minus(u, pair.minus), [0], 3).mat
    raw = k1 @ r21 @ r31 @ k23
    return proj.p321.mat @ raw @ proj.p123.mat


def fused_k_plus_triple(u, pair: BoundaryPair, p: BulkParams, proj=None):
    """K^+_{<123>}(u) on three auxiliary legs, per-leg crossing conjugation."""
    proj = proj or fusion_projectors(p)
    eta = p.eta
    m = crossing_matrix(p).mat
    mi = np.linalg.inv(m)
    k23 = embed(Operator(fused_k_plus_pair(u - eta, pair, p, proj), (3, 3)), [1, 2], 3).mat
    r13 = embed(r_matrix(-2 * u - eta, p), [0, 2], 3).mat
    r12 = embed(r_matrix(-2 * u - 2 * eta, p), [0, 1], 3).mat
    k1 = embed(k_plus(u, pair, p), [0], 3).mat
    raw = (k23
           @ embed(Operator(mi, (3,)), [2], 3).mat @ r13 @ embed(Operator(m, (3,)), [2], 3).mat
           @ embed(Operator(mi, (3,)), [1], 3).mat @ r12 @ embed(Operator(m, (3,)), [1], 3).mat
           @ k1)
    return proj.p123.mat @ raw @ proj.p321.mat


# ---------------------------------------------------------------------------
# fused transfer matrices
# ---------------------------------------------------------------------------

def fused_transfer_2(u, spec: ChainSpec, pair: BoundaryPair, proj=None) -> Operator:
    """t_2(u): two fused auxiliary legs traced out."""
    p = spec.bulk
    proj = proj or fusion_projectors(p)
    eta = p.eta
    N = spec.n_sites
    n = N + 2
    dims = (3,) * n
    sites = list(range(2, n))
    aux = [0, 1]

    t_part = (_monodromy_raw(u, spec, 0, dims, sites)
              @ _monodromy_raw(u - eta, spec, 1, dims, sites))
    t_part = mul_embedded_left(proj.p21.mat, aux, dims,
                               mul_embedded_right(t_part, proj.p21.mat, aux, dims))
    hat_part = (_hat_monodromy_raw(u, spec, 0, dims, sites)
                @ _hat_monodromy_raw(u - eta, spec, 1, dims, sites))
    hat_part = mul_embedded_left(proj.p12.mat, aux, dims,
                                 mul_embedded_right(hat_part, proj.p12.mat, aux, dims))

    big = mul_embedded_left(fused_k_minus_pair(u, pair, p, proj), aux, dims, hat_part)
    big = t_part @ big
    big = mul_embedded_left(fused_k_plus_pair(u, pair, p, proj), aux, dims, big)
    return Operator(trace_out(big, aux, dims), (3,) * N)


def fused_transfer_3(u, spec: ChainSpec, pair: BoundaryPair, proj=None) -> Operator:
    """t_3(u): three fused auxiliary legs traced out (scalar times identity)."""
    p = spec.bulk
    proj = proj or fusion_projectors(p)
    eta = p.eta
    N = spec.n_sites
    n = N + 3
    dims = (3,) * n
    sites = list(range(3, n))
    aux = [0, 1, 2]

    t_part = (_monodromy_raw(u, spec, 0, dims, sites)
              @ _monodromy_raw(u - eta, spec, 1, dims, sites)
              @ _monodromy_raw(u - 2 * eta, spec, 2, dims, sites))
    t_part = mul_embedded_left(proj.p321.mat, aux, dims,
                               mul_embedded_right(t_part, proj.p321.mat, aux, dims))
    hat_part = (_hat_monodromy_raw(u, spec, 0, dims, sites)
                @ _hat_monodromy_raw(u - eta, spec, 1, dims, sites)
                @ _hat_monodromy_raw(u - 2 * eta, spec, 2, dims, sites))
    hat_part = mul_embedded_left(proj.p123.mat, aux, dims,
                                 mul_embedded_right(hat_part, proj.p123.mat, aux, dims))

    big = mul_embedded_left(fused_k_minus_triple(u, pair, p, proj), aux, dims, hat_part)
    big = t_part @ big
    big = mul_embedded_left(fused_k_plus_triple(u, pair, p, proj), aux, dims, big)
    return Operator(trace_out(big, aux, dims), (3,) * N)


def quantum_determinant(u, spec: ChainSpec, pair: BoundaryPair):
    """Scalar Delta_q(u): the value of t_3(u) divided by the identity."""
    p = spec.bulk
    eta = p.eta
    sh = np.sinh
    dq_t = dq_hat = 1.0 + 0j
    for th in spec.theta:
        dq_t *= sh(u - th + eta) * sh(u - th - eta) * sh(u - th - 2 * eta)
        dq_hat *= sh(u + th + eta) * sh(u + th - eta) * sh(u + th - 2 * eta)
    return (dq_t * dq_hat * delta_q_k_plus(u, pair, p)
            * delta_q_k_minus(u, pair.minus, p))


def conserved_charge(kind, spec: ChainSpec) -> Operator:
    """Surviving U(1) generator: sum over sites of E^{kk}, k set by the kind."""
    level = {"I": 0, "II": 1, "III": 2}[kind]
    N = spec.n_sites
    mat = np.zeros((3 ** N, 3 ** N), dtype=complex)
    for site in range(N):
        mat += embed(Operator(E_UNITS[level][level], (3,)), [site], N).mat
    return Operator(mat, (3,) * N)


def charge_sectors(kind, n_sites):
    """Charge of each computational basis state, as an integer array."""
    level = {"I": 0, "II": 1, "III": 2}[kind]
    idx = np.arange(3 ** n_sites)
    return sum((idx // 3 ** k) % 3 == level for k in range(n_sites)).astype(int)


# ---------------------------------------------------------------------------
# Hamiltonian and vacuum reference check
# ---------------------------------------------------------------------------

def transfer_polynomial(spec, pair, fused=False, **kw):
    """TrigPolynomial of t(u) (degree N+2) or t_2(u) (degree 2N+6)."""
    N = spec.n_sites
    if fused:
        span = 2 * N + 6
        fun = lambda u: fused_transfer_2(u, spec, pair).mat
    else:
        span = N + 2
        fun = lambda u: transfer_matrix(u, spec, pair).mat
    return reconstruct_trig_polynomial(fun, -span, span, **kw)


def hamiltonian(spec: ChainSpec, pair: BoundaryPair) -> Operator:
    """H = sinh(eta) t'(0) t(0)^{-1} at the homogeneous point.

    t(0) is a scalar multiple of the identity, so the inverse is a scalar
    division; t'(0) comes from exact differentiation of the reconstructed
    trigonometric polynomial.
    """
    if not spec.is_homogeneous:
        raise ValueError("the Hamiltonian is defined at theta_j = 0")
    t0 = transfer_matrix(0.0, spec, pair).mat
    scalar = np.trace(t0) / t0.shape[0]
    if abs(scalar) < 1e-12 * max(1.0, np.linalg.norm(t0)):
        raise ValueError(f"t(0) = {scalar:.3e} is singular; cannot normalise")
    resid = relative_residual(t0, scalar * np.eye(t0.shape[0]))
    if resid > 1e-10:
        raise ValueError(f"t(0) deviates from a scalar by {resid:.3e}")
    poly = transfer_polynomial(spec, pair)
    deriv = poly.derivative()(0.0)
    return Operator(np.sinh(spec.eta) * deriv / scalar, (3,) * spec.n_sites)


def vacuum_eigenvalue_check(spec: ChainSpec, pair: BoundaryPair, n_points=10, seed=0):
    """All-down reference state check for diagonal boundaries.

    Verifies that |3..3> is an eigenstate of t(u) and that its eigenvalue
    matches the three-term closed form with trivial Q-functions.
    """
    from .spectrum import diagonal_vacuum_lambda

    if not pair.is_diagonal:
        raise ValueError("vacuum check requires diagonal boundaries (all c's zero)")
    N = spec.n_sites
    vac = np.zeros(3 ** N)
    vac[-1] = 1.0   # |3>^N is the last basis vector
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(n_points):
        u = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        tv = transfer_matrix(u, spec, pair).mat @ vac
        lam = tv[-1]
        off = np.linalg.norm(tv - lam * vac)
        pred = diagonal_vacuum_lambda(u, spec, pair)
        rows.append({
            "u": u,
            "off_component": float(off / max(1.0, abs(lam))),
            "eigenvalue_residual": float(abs(lam - pred) / max(1.0, abs(pred), abs(lam))),
        })
    worst = max(max(r["off_component"], r["eigenvalue_residual"]) for r in rows)
    return {"points": rows, "worst": worst, "passed": bool(worst <= 1e-9)}


# ---------------------------------------------------------------------------
# identity report suites
# ---------------------------------------------------------------------------

def check_production_identities(spec: ChainSpec, pair: BoundaryPair, tol=1e-9):
    """t(+-theta_j) t_m(+-theta_j - eta) against t_{m+1}(+-theta_j) for m = 1, 2."""
    p = spec.bulk
    eta = spec.eta
    proj = fusion_projectors(p)
    checks = []
    cache_t = {}
    cache_t2 = {}

    def t_at(u):
        if u not in cache_t:
            cache_t[u] = transfer_matrix(u, spec, pair).mat
        return cache_t[u]

    def t2_at(u):
        if u not in cache_t2:
            cache_t2[u] = fused_transfer_2(u, spec, pair, proj).mat
        return cache_t2[u]

    for j, th in enumerate(spec.theta):
        for sgn in (1, -1):
            x = sgn * th
            norm1 = rho2(2 * x - eta, p)
            norm2 = norm1 * rho2(2 * x - 2 * eta, p)
            if min(abs(norm1), abs(norm2)) < 1e-8:
                checks.append({"name": f"production j={j + 1} sign={sgn:+d}",
                               "residual": None, "passed": False,
                               "skipped": "near-singular normaliser rho2"})
                continue
            lhs = t_at(x) @ t_at(x - eta)
            rhs = t2_at(x) / norm1
            checks.append({"name": f"production m=1 j={j + 1} sign={sgn:+d}",
                           "residual": relative_residual(lhs, rhs),
                           "passed": None})
            lhs = t_at(x) @ t2_at(x - eta)
            rhs = fused_transfer_3(x, spec, pair, proj).mat / norm2
            checks.append({"name": f"production m=2 j={j + 1} sign={sgn:+d}",
                           "residual": relative_residual(lhs, rhs),
                           "passed": None})
            lhs_extra = t2_at(x + eta)
            scale = max(1.0, *(np.linalg.norm(v) for v in cache_t2.values()))
            checks.append({"name": f"t2 zero at {sgn:+d}theta_{j + 1}+eta",
                           "residual": float(np.linalg.norm(lhs_extra) / scale),
                           "passed": None})
    for c in checks:
        if c["passed"] is None:
            c["passed"] = bool(c["residual"] <= tol)
    return {"checks": checks, "passed": all(c["passed"] for c in checks)}


def check_special_points(spec: ChainSpec, pair: BoundaryPair, tol=1e-9):
    """The sixteen closed-form values and zeros of t and t_2."""
    p = spec.bulk
    eta = spec.eta
    N = spec.n_sites
    proj = fusion_projectors(p)
    ident = np.eye(3 ** N)
    sh = np.sinh
    m = crossing_matrix(p).mat
    sign = (-1) ** N

    def prod1(x):
        return np.prod([rho1(x - th, p) for th in spec.theta])

    def prod2(x):
        return np.prod([rho2(x - th, p) for th in spec.theta])

    def tr_kp(x):
        return np.trace(k_plus(x, pair, p).mat)

    def tr_km_m(x):
        return np.trace(k_minus(x, pair.minus).mat @ m)

    t = lambda u: transfer_matrix(u, spec, pair).mat
    t2 = lambda u: fused_transfer_2(u, spec, pair, proj).mat
    zeta = pair.minus.zeta
    zeta_p = pair.plus.zeta
    checks = []

    def add(name, lhs, rhs):
        checks.append({"name": name, "residual": relative_residual(lhs, rhs)})

    add("t(0)", t(0.0), prod1(0) * tr_kp(0) * sh(zeta) * ident)
    add("t(ipi/2)", t(IPI_HALF),
        sign * prod1(IPI_HALF) * tr_kp(IPI_HALF) * np.cosh(zeta) * ident)
    add("t(-3eta/2)", t(-1.5 * eta),
        prod2(-1.5 * eta) * tr_km_m(-1.5 * eta) * sh(zeta_p) * ident)
    add("t(-3eta/2+ipi/2)", t(-1.5 * eta + IPI_HALF),
        sign * prod2(-1.5 * eta - IPI_HALF) * tr_km_m(-1.5 * eta + IPI_HALF)
        * np.cosh(zeta_p) * ident)

    i3 = np.eye(3)
    mi = np.linalg.inv(m)
    sw = swap_matrix(3)

    def t2_trace_plus(shift):
        w = 0.5 * eta + shift
        trace = np.trace(proj.p12.mat
                         @ np.kron(i3, k_plus(-0.5 * eta + shift, pair, p).mat)
                         @ np.kron(i3, mi) @ r_matrix(-3 * eta, p).mat
                         @ np.kron(i3, m) @ np.kron(k_plus(w, pair, p).mat, i3)
                         @ r_matrix(0.0, p).mat @ proj.p12.mat)
        scal = rho_k_minus_scalar(w, pair.minus)
        bulkprod = np.prod([rho1(0.5 * eta - th + shift, p)
                            * rho1(-0.5 * eta - th + shift, p) for th in spec.theta])
        return trace * scal * bulkprod

    add("t2(eta/2)", t2(0.5 * eta), t2_trace_plus(0.0) * ident)
    add("t2(eta/2+ipi/2)", t2(0.5 * eta + IPI_HALF), t2_trace_plus(IPI_HALF) * ident)

    def t2_trace_minus(shift):
        trace = np.trace(proj.p12.mat @ r_matrix(0.0, p).mat
                         @ np.kron(k_minus(-eta + shift, pair.minus).mat, i3)
                         @ (sw @ r_matrix(-3 * eta, p).mat @ sw)
                         @ np.kron(i3, k_minus(-2 * eta + shift, pair.minus).mat)
                         @ np.kron(m, m) @ proj.p12.mat)
        scal = rho_k_plus_scalar(0.5 * eta + shift, pair)
        bulkprod = np.prod([rho2(-th - 2 * eta + shift, p)
                            * rho2(-th - eta + shift, p) for th in spec.theta])
        return trace * scal * bulkprod

    add("t2(-eta)", t2(-eta), t2_trace_minus(0.0) * ident)
    add("t2(-eta+ipi/2)", t2(-eta + IPI_HALF), t2_trace_minus(IPI_HALF) * ident)

    b = np.sinh
    add("t2(0) ~ t(-eta)", t2(0.0),
        b(-eta) * b(-2 * eta) * sh(zeta) * prod1(0) * tr_kp(0) * t(-eta))
    add("t2(ipi/2) ~ t(-eta+ipi/2)", t2(IPI_HALF),
        b(-eta) * b(-2 * eta) * np.cosh(zeta) * sign * prod1(IPI_HALF)
        * tr_kp(IPI_HALF) * t(-eta + IPI_HALF))
    add("t2(-eta/2) ~ t(-eta/2)", t2(-0.5 * eta),
        b(-eta) * b(-2 * eta) * sh(zeta_p) * prod2(-1.5 * eta)
        * tr_km_m(-1.5 * eta) * t(-0.5 * eta))
    add("t2(-eta/2+ipi/2) ~ t(-eta/2+ipi/2)", t2(-0.5 * eta + IPI_HALF),
        b(-eta) * b(-2 * eta) * np.cosh(zeta_p) * sign * prod2(-1.5 * eta + IPI_HALF)
        * tr_km_m(-1.5 * eta + IPI_HALF) * t(-0.5 * eta + IPI_HALF))

    scale = max(1.0, np.linalg.norm(t2(0.3 + 0.2j)))
    for name, x in (("t2(eta)=0", eta), ("t2(eta+ipi/2)=0", eta + IPI_HALF),
                    ("t2(-3eta/2)=0", -1.5 * eta),
                    ("t2(-3eta/2+ipi/2)=0", -1.5 * eta + IPI_HALF)):
        checks.append({"name": name,
                       "residual": float(np.linalg.norm(t2(x)) / scale)})

    for c in checks:
        c["passed"] = bool(c["residual"] <= tol)
    return {"checks": checks, "passed": all(c["passed"] for c in checks)}


def _asymptotic_scalars(kind, side, which, M, N, eta, pm, pp):
    """Per-sector leading coefficient of t (which='t') or t_2 (which='t2')."""
    e = np.exp
    c, c1, c2 = pm.c, pm.c1, pm.c2
    cp, c1p, c2p = pp.c, pp.c1, pp.c2
    if kind == "I":
        mix = c1 * c2p + c1p * c2 * e(2 * eta)
        up = c * (c1p * c2p / cp) * e(2 * M * eta + eta) + mix * e((N - M) * eta)
        dn = cp * (c1 * c2 / c) * e(-2 * M * eta + eta) + mix * e((M - N) * eta)
        pre_t_top, pre_t_bot = e(3 * eta), e(-3 * eta)
        pre_2_top, pre_2_bot = e(4 * eta) * c * c1p * c2p / cp, e(-2 * eta) * cp * c1 * c2 / c
        top2, bot2 = dn, up
    elif kind == "II":
        mix = c1 * c2p + c1p * c2 * e(4 * eta)
        up = cp * (c1 * c2 / c) * e(2 * M * eta + 2 * eta) + mix * e((N - M) * eta)
        dn = c * (c1p * c2p / cp) * e(-2 * M * eta + 2 * eta) + mix * e((M - N) * eta)
        pre_t_top, pre_t_bot = e(3 * eta), e(-3 * eta)
        pre_2_top, pre_2_bot = e(5 * eta) * cp * c1 * c2 / c, e(-eta) * c * c1p * c2p / cp
        top2, bot2 = dn, up
    else:
        mix = c1 * c2p + c1p * c2 * e(2 * eta)
        up = cp * (c1 * c2 / c) * e(2 * M * eta + eta) + mix * e((N - M) * eta)
        dn = c * (c1p * c2p / cp) * e(-2 * M * eta + eta) + mix * e((M - N) * eta)
        pre_t_top, pre_t_bot = e(5 * eta), e(-eta)
        pre_2_top, pre_2_bot = e(8 * eta) * cp * c1 * c2 / c, e(2 * eta) * c * c1p * c2p / cp
        top2, bot2 = dn, up
    if which == "t":
        pre = pre_t_top if side == "top" else pre_t_bot
        body = up if side == "top" else dn
        return -pre * body / 4 ** (N + 1)
    pre = pre_2_top if side == "top" else pre_2_bot
    body = top2 if side == "top" else bot2
    return -pre * body / 4 ** (2 * N + 3)


def check_asymptotics(spec: ChainSpec, pair: BoundaryPair, tol=1e-8):
    """Sector-resolved leading/trailing Laurent coefficients of t and t_2.

    The extreme coefficients are orders of magnitude below the mid ones, so
    each end is extracted from its own reconstruction whose sampling offset
    (+-0.3 real part) makes that end dominate the samples; this keeps the
    extraction relatively accurate to near machine precision.
    """
    N = spec.n_sites
    eta = spec.eta
    kind = pair.kind
    sectors = charge_sectors(kind, N)
    polys = {}
    for side, off in (("top", 0.3 + 0.035j), ("bot", -0.3 + 0.035j)):
        polys["t", side] = transfer_polynomial(spec, pair, phase_offset=off)
        polys["t2", side] = transfer_polynomial(spec, pair, fused=True,
                                                phase_offset=off)
    checks = []
    for which, span in (("t", N + 2), ("t2", 2 * N + 6)):
        for side, k in (("top", span), ("bot", -span)):
            coeff = polys[which, side].coeff(k)
            for M in range(N + 1):
                mask = sectors == M
                sub = coeff[np.ix_(mask, mask)]
                scal = _asymptotic_scalars(kind, side, which, M, N, eta,
                                           pair.minus, pair.plus)
                resid = relative_residual(sub / scal, np.eye(mask.sum()))
                checks.append({"name": f"{which} {side} sector M={M}",
                               "residual": resid, "passed": bool(resid <= tol)})
    return {"checks": checks, "passed": all(c["passed"] for c in checks)}


# ---------------------------------------------------------------------------
# simultaneous eigenbasis of the commuting family
# ---------------------------------------------------------------------------

def spectral_frame(spec: ChainSpec, pair: BoundaryPair, probe=0.31 + 0.17j,
                   gap_tol=1e-8, max_retries=5):
    """Eigenvector frame of t at a generic probe point.

    The commuting family shares eigenvectors; any t_m(v) is then read off as
    the diagonal of V^{-1} t_m(v) V.  If the probe spectrum is nearly
    degenerate the probe is nudged and the decomposition retried.
    """
    from .tensor import eig_general

    u0 = complex(probe)
    for attempt in range(max_retries):
        w, v = eig_general(transfer_matrix(u0, spec, pair).mat)
        gaps = np.abs(w[:, None] - w[None, :])
        np.fill_diagonal(gaps, np.inf)
        if gaps.min() > gap_tol * max(1.0, np.abs(w).max()):
            vi = np.linalg.inv(v)
            charge = conserved_charge(pair.kind, spec).mat
            sector = np.real(np.diag(vi @ charge @ v)).round().astype(int)
            return {"probe": u0, "eigenvalues": w, "vectors": v,
                    "inverse": vi, "sectors": sector}
        u0 = u0 + (0.11 + 0.073j) * (attempt + 1)
    raise RuntimeError(f"no non-degenerate probe found near {probe}")


def eigenvalue_curves(frame, spec, pair, us):
    """Eigenvalues of t(u) along a grid, consistently ordered by the frame."""
    out = np.empty((len(us), frame["vectors"].shape[0]), dtype=complex)
    for i, u in enumerate(us):
        out[i] = np.diag(frame["inverse"] @ transfer_matrix(u, spec, pair).mat
                         @ frame["vectors"])
    return out
