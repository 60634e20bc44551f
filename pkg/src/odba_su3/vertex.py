"""Trigonometric SU_q(3) R-matrix and its bulk algebraic properties.

The two-site R-matrix on C^3 (x) C^3 has Boltzmann weights

    a(u) = sinh(u + eta)        on |ii><ii|,
    b(u) = sinh(u)              on |ij><ij|, i != j,
    c(u) = e^u  sinh(eta)       on |ij><ji|, i < j,
    d(u) = e^-u sinh(eta)       on |ij><ji|, i > j,

in the lexicographic basis |11>, |12>, ..., |33| with the first leg as the
slower index.  The ``check_*`` functions recompute both sides of each bulk
identity independently and return a scale-free Frobenius residual, so a
transcription error anywhere shows up as an O(1) number rather than a
silently wrong spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import Operator, embed, partial_transpose, swap_matrix

_DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class BulkParams:
    """Crossing parameter of the bulk model.

    eta = 0 or eta = i*pi/2 (mod i*pi) degenerate the fusion degeneracy
    matrices and are rejected.
    """

    eta: complex

    def __post_init__(self):
        eta = complex(self.eta)
        object.__setattr__(self, "eta", eta)
        # reduce Im to (-pi/2, pi/2] and test the two bad points
        shifted = eta - 1j * np.pi * np.round(eta.imag / np.pi)
        for bad in (0.0, 0.5j * np.pi, -0.5j * np.pi):
            if abs(shifted - bad) < _DEGENERACY_TOL:
                raise ValueError(
                    f"crossing parameter eta={eta} is degenerate "
                    "(eta mod i*pi must stay away from 0 and i*pi/2)"
                )


def _unit(i, j):
    m = np.zeros((3, 3), dtype=complex)
    m[i, j] = 1.0
    return m


E_UNITS = [[_unit(i, j) for j in range(3)] for i in range(3)]
PERMUTATION_9 = swap_matrix(3)


def r_matrix(u, p: BulkParams) -> Operator:
    """Two-site R-matrix R_{12}(u), legs (3, 3)."""
    eta = p.eta
    a = np.sinh(u + eta)
    b = np.sinh(u)
    c = np.exp(u) * np.sinh(eta)
    d = np.exp(-u) * np.sinh(eta)
    m = np.zeros((9, 9), dtype=complex)
    for i in range(3):
        for j in range(3):
            row = 3 * i + j
            m[row, row] = a if i == j else b
    for i in range(3):
        for j in range(3):
            if i != j:
                # |ij><ji| entry: row (i,j), column (j,i)
                m[3 * i + j, 3 * j + i] = c if i < j else d
    return Operator(m, (3, 3))


def r_matrix_swapped(u, p: BulkParams) -> Operator:
    """R_{21}(u) = P_{12} R_{12}(u) P_{12}."""
    m = PERMUTATION_9 @ r_matrix(u, p).mat @ PERMUTATION_9
    return Operator(m, (3, 3))


def crossing_matrix(p: BulkParams) -> Operator:
    """diag(e^{4 eta}, e^{2 eta}, 1)."""
    eta = p.eta
    return Operator(np.diag([np.exp(4 * eta), np.exp(2 * eta), 1.0]), (3,))


def rho1(u, p: BulkParams):
    """Unitarity scalar: R_{12}(u) R_{21}(-u) = rho1(u) id."""
    return -np.sinh(u - p.eta) * np.sinh(u + p.eta)


def rho2(u, p: BulkParams):
    """Crossing-unitarity scalar: -sinh(u) sinh(u + 3 eta)."""
    return -np.sinh(u) * np.sinh(u + 3 * p.eta)


def relative_residual(lhs, rhs):
    """Frobenius-norm residual, normalised by max(1, |lhs|, |rhs|)."""
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    scale = max(1.0, np.linalg.norm(lhs), np.linalg.norm(rhs))
    return float(np.linalg.norm(lhs - rhs) / scale)


def check_qybe(u1, u2, u3, p: BulkParams):
    """Residual of the Yang-Baxter equation on C^3 (x) C^3 (x) C^3."""
    r12 = embed(r_matrix(u1 - u2, p), [0, 1], 3).mat
    r13 = embed(r_matrix(u1 - u3, p), [0, 2], 3).mat
    r23 = embed(r_matrix(u2 - u3, p), [1, 2], 3).mat
    return relative_residual(r12 @ r13 @ r23, r23 @ r13 @ r12)


def check_unitarity(u, p: BulkParams):
    lhs = r_matrix(u, p).mat @ r_matrix_swapped(-u, p).mat
    return relative_residual(lhs, rho1(u, p) * np.eye(9))


def check_crossing_unitarity(u, p: BulkParams):
    """Residual of R_12^{t1}(u) M_1 R_21^{t1}(-u - 3 eta) M_1^{-1} = rho2(u) id."""
    m1 = np.kron(crossing_matrix(p).mat, np.eye(3))
    lhs = (partial_transpose(r_matrix(u, p), [0]).mat @ m1
           @ partial_transpose(r_matrix_swapped(-u - 3 * p.eta, p), [0]).mat
           @ np.linalg.inv(m1))
    return relative_residual(lhs, rho2(u, p) * np.eye(9))


def check_pt_symmetry(u, p: BulkParams):
    """Residual of R_21(u) = R_12^{t1 t2}(u)."""
    return relative_residual(r_matrix_swapped(u, p).mat, r_matrix(u, p).mat.T)


def check_periodicity(u, p: BulkParams):
    return relative_residual(r_matrix(u + 1j * np.pi, p).mat, -r_matrix(u, p).mat)


def check_m_invariance(u, p: BulkParams):
    """Residual of M_1 M_2 R_12(u) M_1^{-1} M_2^{-1} = R_12(u)."""
    mm = np.kron(crossing_matrix(p).mat, crossing_matrix(p).mat)
    r = r_matrix(u, p).mat
    return relative_residual(mm @ r @ np.linalg.inv(mm), r)


def structural_support():
    """Boolean 9x9 mask of entries that may be nonzero in the R-matrix."""
    mask = np.zeros((9, 9), dtype=bool)
    for i in range(3):
        for j in range(3):
            mask[3 * i + j, 3 * i + j] = True
            if i != j:
                mask[3 * i + j, 3 * j + i] = True
    return mask
