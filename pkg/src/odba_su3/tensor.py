"""Dense complex linear algebra on small tensor-product spaces.

Operators on (C^3)^{x n} are stored as full matrices together with the
ordered list of local dimensions ("legs") they act on.  Everything here is
a pure function of its inputs; nothing is mutated after construction.

Besides the generic kron / embed / partial-trace toolkit there are two
specialised pieces:

  * ``mul_embedded_left``/``mul_embedded_right`` multiply a big matrix by an
    operator embedded on a few legs without ever materialising the embedded
    matrix.  Transfer-matrix builders rely on these; the cost per call is
    d_small * D^2 instead of D^3.

  * ``TrigPolynomial`` represents finite Laurent series in e^{2u}, the form
    every i*pi-periodic quantity of the chain takes.  Coefficients are
    recovered exactly from equispaced samples on a segment parallel to the
    imaginary axis (a shifted discrete Fourier system).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_PHASE_OFFSET = 0.05 + 0.035j


class EigenDecompositionError(RuntimeError):
    """Raised when the dense eigensolver fails or misses its residual bound."""


@dataclass(frozen=True)
class Operator:
    """Dense matrix with tensor-leg metadata.

    ``mat`` is a square complex matrix of side prod(legs); ``legs`` lists the
    local dimension of each tensor factor, in order.
    """

    mat: np.ndarray
    legs: tuple

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        legs = tuple(int(d) for d in self.legs)
        dim = 1
        for d in legs:
            if d <= 0:
                raise ValueError(f"leg dimensions must be positive, got {legs}")
            dim *= d
        if mat.ndim != 2 or mat.shape != (dim, dim):
            raise ValueError(f"matrix shape {mat.shape} does not match legs {legs}")
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "legs", legs)

    @property
    def dim(self):
        return self.mat.shape[0]

    def __matmul__(self, other):
        if isinstance(other, Operator):
            if self.legs != other.legs:
                raise ValueError(f"leg mismatch: {self.legs} vs {other.legs}")
            return Operator(self.mat @ other.mat, self.legs)
        return NotImplemented


def identity(legs) -> Operator:
    dim = int(np.prod(legs)) if len(legs) else 1
    return Operator(np.eye(dim, dtype=complex), legs)


def kron(a: Operator, b: Operator) -> Operator:
    """Tensor product; legs of the result are legs(a) ++ legs(b)."""
    return Operator(np.kron(a.mat, b.mat), a.legs + b.legs)


def _check_positions(positions, total):
    positions = [int(p) for p in positions]
    if len(set(positions)) != len(positions):
        raise ValueError(f"positions must be distinct, got {positions}")
    for p in positions:
        if not 0 <= p < total:
            raise ValueError(f"position {p} out of range for {total} factors")
    return positions


def embed(op: Operator, positions, total_factors, fill_dim=3) -> Operator:
    """Embed ``op`` so it acts on the named factors and as identity elsewhere.

    ``positions`` may be non-adjacent and permuted; op leg i is placed on
    factor positions[i].  Identity factors get dimension ``fill_dim``.
    """
    positions = _check_positions(positions, total_factors)
    if len(positions) != len(op.legs):
        raise ValueError(f"{len(op.legs)} legs cannot go to {len(positions)} positions")
    dims = [fill_dim] * total_factors
    for leg_dim, p in zip(op.legs, positions):
        dims[p] = leg_dim
    rest = [q for q in range(total_factors) if q not in positions]
    m = len(positions)
    tens = op.mat.reshape(tuple(op.legs) * 2)
    for q in rest:
        tens = np.multiply.outer(tens, np.eye(dims[q], dtype=complex))
    # tens axes: out_0..out_{m-1}, in_0..in_{m-1}, then (out, in) per rest leg
    axes = [0] * (2 * total_factors)
    for k, p in enumerate(positions):
        axes[p] = k
        axes[total_factors + p] = m + k
    for k, q in enumerate(rest):
        axes[q] = 2 * m + 2 * k
        axes[total_factors + q] = 2 * m + 2 * k + 1
    dim = int(np.prod(dims))
    return Operator(tens.transpose(axes).reshape(dim, dim), tuple(dims))


def partial_trace(op: Operator, traced_positions) -> Operator:
    """Contract the named legs; remaining legs keep their order."""
    traced = _check_positions(traced_positions, len(op.legs))
    tens = op.mat.reshape(tuple(op.legs) * 2)
    n = len(op.legs)
    for p in sorted(traced, reverse=True):
        half = tens.ndim // 2
        tens = np.trace(tens, axis1=p, axis2=p + half)
    keep = tuple(d for q, d in enumerate(op.legs) if q not in traced)
    dim = int(np.prod(keep)) if keep else 1
    return Operator(tens.reshape(dim, dim), keep)


def partial_transpose(op: Operator, positions) -> Operator:
    """Transpose the named legs only (basis convention: row leg i, column leg i)."""
    positions = _check_positions(positions, len(op.legs))
    n = len(op.legs)
    tens = op.mat.reshape(tuple(op.legs) * 2)
    axes = list(range(2 * n))
    for p in positions:
        axes[p], axes[n + p] = axes[n + p], axes[p]
    return Operator(tens.transpose(axes).reshape(op.dim, op.dim), op.legs)


def swap_matrix(d=3):
    """Permutation matrix exchanging two d-dimensional factors."""
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[i * d + j, j * d + i] = 1.0
    return s


# ---------------------------------------------------------------------------
# fast embedded products on raw ndarrays (hot path of the transfer builders)
# ---------------------------------------------------------------------------

def mul_embedded_left(small, positions, dims, big):
    """Return embed(small, positions) @ big without forming the embedding.

    ``small`` acts on len(positions) legs in the given (possibly permuted)
    order, ``dims`` are the leg dimensions of the full space, ``big`` is a
    full D x D matrix.
    """
    n = len(dims)
    D = big.shape[0]
    rest = [q for q in range(n) if q not in positions]
    d_small = int(np.prod([dims[p] for p in positions]))
    perm = list(positions) + rest + [n]
    x = big.reshape(tuple(dims) + (D,)).transpose(perm).reshape(d_small, -1)
    y = small @ x
    shape = tuple(dims[p] for p in positions) + tuple(dims[q] for q in rest) + (D,)
    inv = np.argsort(perm)
    return y.reshape(shape).transpose(inv).reshape(D, D)


def mul_embedded_right(big, small, positions, dims):
    """Return big @ embed(small, positions) without forming the embedding."""
    n = len(dims)
    D = big.shape[0]
    rest = [q for q in range(n) if q not in positions]
    d_small = int(np.prod([dims[p] for p in positions]))
    perm = [0] + [1 + q for q in rest] + [1 + p for p in positions]
    x = big.reshape((D,) + tuple(dims)).transpose(perm).reshape(-1, d_small)
    y = x @ small
    shape = (D,) + tuple(dims[q] for q in rest) + tuple(dims[p] for p in positions)
    inv = np.argsort(perm)
    return y.reshape(shape).transpose(inv).reshape(D, D)


def trace_out(big, positions, dims):
    """Partial trace of a raw matrix over the named legs."""
    tens = big.reshape(tuple(dims) * 2)
    n = len(dims)
    for p in sorted(positions, reverse=True):
        half = tens.ndim // 2
        tens = np.trace(tens, axis1=p, axis2=p + half)
    keep = int(np.prod([d for q, d in enumerate(dims) if q not in positions]))
    return tens.reshape(keep, keep)


# ---------------------------------------------------------------------------
# eigendecomposition
# ---------------------------------------------------------------------------

def eig_general(m, residual_tol=1e-10):
    """Right eigenpairs of a dense (generally non-normal) complex matrix.

    Returns (eigenvalues, eigenvector matrix).  Each pair is checked against
    ||m v - w v|| / max(1, ||m||) <= residual_tol; degenerate eigenvalues come
    back unclustered with an arbitrary basis in their subspace.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    try:
        w, v = np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise EigenDecompositionError(
            f"QR iteration failed for {m.shape[0]}x{m.shape[0]} matrix "
            f"(norm {np.linalg.norm(m):.3e}): {exc}"
        ) from exc
    scale = max(1.0, np.linalg.norm(m, 2))
    resid = np.linalg.norm(m @ v - v * w[None, :], axis=0) / scale
    if np.any(resid > residual_tol):
        k = int(np.argmax(resid))
        raise EigenDecompositionError(
            f"eigenpair {k} residual {resid[k]:.3e} exceeds {residual_tol:.1e}"
        )
    return w, v


# ---------------------------------------------------------------------------
# trigonometric polynomials
# ---------------------------------------------------------------------------

class TrigPolynomial:
    """Finite Laurent series sum_k C_k e^{2ku}, k in [k_min, k_max].

    Coefficients may be scalars or matrices; evaluation is i*pi-periodic by
    construction.
    """

    def __init__(self, coeffs, k_min):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape[0] == 0:
            raise ValueError("need at least one coefficient")
        self.coeffs = coeffs
        self.k_min = int(k_min)
        self.k_max = self.k_min + coeffs.shape[0] - 1

    @property
    def degrees(self):
        return np.arange(self.k_min, self.k_max + 1)

    def coeff(self, k):
        if not self.k_min <= k <= self.k_max:
            raise KeyError(f"degree {k} outside window [{self.k_min}, {self.k_max}]")
        return self.coeffs[k - self.k_min]

    def __call__(self, u):
        phases = np.exp(2 * self.degrees * complex(u))
        return np.tensordot(phases, self.coeffs, axes=(0, 0))

    def derivative(self):
        """Exact derivative; degree window is unchanged."""
        scaled = self.coeffs * (2 * self.degrees).reshape((-1,) + (1,) * (self.coeffs.ndim - 1))
        return TrigPolynomial(scaled, self.k_min)


def reconstruct_trig_polynomial(f, k_min, k_max, phase_offset=DEFAULT_PHASE_OFFSET,
                                check_tol=1e-9):
    """Recover the Laurent coefficients of an i*pi-periodic function.

    Samples f at u_j = phase_offset + i*pi*j/K for K = k_max - k_min + 1 and
    inverts the resulting shifted Fourier system.  Three fresh evaluation
    points guard against a wrong degree window; failure there raises.
    """
    if k_max < k_min:
        raise ValueError("empty degree window")
    K = k_max - k_min + 1
    us = phase_offset + 1j * np.pi * np.arange(K) / K
    samples = np.asarray([np.asarray(f(u), dtype=complex) for u in us])
    ks = np.arange(k_min, k_max + 1)
    system = np.exp(np.outer(2 * us, ks))
    cond = np.linalg.cond(system)
    if not np.isfinite(cond) or cond > 1e12:
        raise ValueError(f"degenerate sample system (cond {cond:.2e}); "
                         f"choose a different phase_offset")
    coeffs = np.linalg.solve(system, samples.reshape(K, -1))
    poly = TrigPolynomial(coeffs.reshape(samples.shape), k_min)
    for probe in (0.2331 + 0.0791j, -0.1779 + 0.1413j, 0.4517 - 0.0437j):
        u = phase_offset + probe
        ref = np.asarray(f(u), dtype=complex)
        err = np.linalg.norm(poly(u) - ref) / max(1.0, np.linalg.norm(ref))
        if err > check_tol:
            raise ValueError(
                f"reconstruction residual {err:.3e} at fresh point exceeds "
                f"{check_tol:.1e}; the function is not in degree window "
                f"[{k_min}, {k_max}]"
            )
    return poly
