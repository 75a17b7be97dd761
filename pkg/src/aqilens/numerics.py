"""Small dense linear algebra: matrix product, symmetric eigendecomposition,
and an SPD solver.

Everything here targets desk-scale matrices (covariance and Gram matrices of
at most ~10 columns), so the algorithms favour verifiability over speed:
eigendecomposition is classical cyclic Jacobi, the solver is an explicit
Cholesky factorization, and tolerances are fixed module constants rather than
knobs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    NoConvergence,
    NotPositiveDefinite,
    NotSymmetric,
)

# Fixed tolerances. Matrices here are O(1)-scaled (correlation/Gram matrices),
# so absolute thresholds are appropriate.
SYMMETRY_TOL = 1e-10
JACOBI_OFFDIAG_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
SIGN_CANON_TOL = 1e-12


@dataclass(frozen=True)
class Mat:
    """Immutable dense matrix, row-major storage."""

    rows: int
    cols: int
    data: tuple[float, ...]

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise DimensionMismatch(f"invalid shape {self.rows}x{self.cols}")
        if len(self.data) != self.rows * self.cols:
            raise DimensionMismatch(
                f"data length {len(self.data)} != {self.rows}x{self.cols}"
            )
        if not all(math.isfinite(v) for v in self.data):
            raise ValueError("matrix entries must be finite")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "Mat":
        r = len(rows)
        if r == 0:
            raise DimensionMismatch("no rows")
        c = len(rows[0])
        if any(len(row) != c for row in rows):
            raise DimensionMismatch("ragged rows")
        return cls(r, c, tuple(float(v) for row in rows for v in row))

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Mat":
        a = np.asarray(arr, dtype=float)
        if a.ndim != 2:
            raise DimensionMismatch(f"expected 2-d array, got {a.ndim}-d")
        return cls(a.shape[0], a.shape[1], tuple(float(v) for v in a.ravel()))

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls(n, n, tuple(1.0 if i == j else 0.0 for i in range(n) for j in range(n)))

    def at(self, i: int, j: int) -> float:
        return self.data[i * self.cols + j]

    def row(self, i: int) -> tuple[float, ...]:
        return self.data[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[float, ...]:
        return self.data[j::self.cols]

    def transpose(self) -> "Mat":
        return Mat(self.cols, self.rows,
                   tuple(self.at(i, j) for j in range(self.cols) for i in range(self.rows)))

    def to_array(self) -> np.ndarray:
        return np.array(self.data, dtype=float).reshape(self.rows, self.cols)


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues sorted descending with matching orthonormal column vectors."""

    values: tuple[float, ...]
    vectors: Mat  # column k pairs with values[k]


def matmul(a: Mat, b: Mat) -> Mat:
    """Standard matrix product a @ b."""
    if a.cols != b.rows:
        raise DimensionMismatch(f"{a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    out = []
    for i in range(a.rows):
        arow = a.row(i)
        for j in range(b.cols):
            s = 0.0
            for k in range(a.cols):
                s += arow[k] * b.at(k, j)
            out.append(s)
    return Mat(a.rows, b.cols, tuple(out))


def mat_vec(a: Mat, v: Sequence[float]) -> list[float]:
    """Matrix-vector product a @ v."""
    if a.cols != len(v):
        raise DimensionMismatch(f"{a.rows}x{a.cols} @ vector of length {len(v)}")
    return [sum(a.at(i, k) * v[k] for k in range(a.cols)) for i in range(a.rows)]


def _require_square_symmetric(a: Mat) -> np.ndarray:
    if a.rows != a.cols:
        raise NotSymmetric(f"matrix is {a.rows}x{a.cols}, not square")
    w = a.to_array()
    if np.max(np.abs(w - w.T)) > SYMMETRY_TOL:
        raise NotSymmetric("matrix is not symmetric within tolerance")
    # symmetrize exactly so rotations preserve symmetry bit-for-bit
    return (w + w.T) / 2.0


def eigen_symmetric(a: Mat) -> EigenResult:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps row-by-row over the upper triangle, annihilating each off-diagonal
    entry with a Givens rotation, until every off-diagonal magnitude falls
    below ``JACOBI_OFFDIAG_TOL`` or the sweep cap is hit.  Results are sorted
    by descending eigenvalue and each eigenvector's first component of
    magnitude above ``SIGN_CANON_TOL`` is made positive, so the decomposition
    is deterministic across runs.
    """
    w = _require_square_symmetric(a)
    n = w.shape[0]
    v = np.eye(n)

    def offdiag_max() -> float:
        if n == 1:
            return 0.0
        m = np.abs(w.copy())
        np.fill_diagonal(m, 0.0)
        return float(m.max())

    sweeps = 0
    while offdiag_max() >= JACOBI_OFFDIAG_TOL:
        if sweeps >= JACOBI_MAX_SWEEPS:
            raise NoConvergence(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = w[p, q]
                if abs(apq) < JACOBI_OFFDIAG_TOL:
                    continue
                # stable rotation angle: tan(2θ) = 2 a_pq / (a_qq - a_pp)
                tau = (w[q, q] - w[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau)) if tau != 0.0 else 1.0
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rot_p = c * w[:, p] - s * w[:, q]
                rot_q = s * w[:, p] + c * w[:, q]
                w[:, p], w[:, q] = rot_p, rot_q
                rot_p = c * w[p, :] - s * w[q, :]
                rot_q = s * w[p, :] + c * w[q, :]
                w[p, :], w[q, :] = rot_p, rot_q
                w[p, q] = w[q, p] = 0.0
                vec_p = c * v[:, p] - s * v[:, q]
                vec_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = vec_p, vec_q

    values = np.diag(w).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    v = v[:, order]
    for k in range(n):
        col = v[:, k]
        for comp in col:
            if abs(comp) > SIGN_CANON_TOL:
                if comp < 0.0:
                    v[:, k] = -col
                break
    return EigenResult(tuple(float(x) for x in values), Mat.from_array(v))


def solve_spd(a: Mat, b: Sequence[float]) -> list[float]:
    """Solve a @ x = b for symmetric positive definite a via Cholesky."""
    w = _require_square_symmetric(a)
    n = w.shape[0]
    if len(b) != n:
        raise DimensionMismatch(f"rhs length {len(b)} != {n}")
    low = np.zeros((n, n))
    for j in range(n):
        d = w[j, j] - sum(low[j, k] ** 2 for k in range(j))
        if d <= 0.0:
            raise NotPositiveDefinite(f"non-positive pivot at column {j}")
        low[j, j] = math.sqrt(d)
        for i in range(j + 1, n):
            low[i, j] = (w[i, j] - sum(low[i, k] * low[j, k] for k in range(j))) / low[j, j]
    # forward substitution L y = b
    y = [0.0] * n
    for i in range(n):
        y[i] = (float(b[i]) - sum(low[i, k] * y[k] for k in range(i))) / low[i, i]
    # back substitution L^T x = y
    x = [0.0] * n
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - sum(low[k, i] * x[k] for k in range(i + 1, n))) / low[i, i]
    return [float(v) for v in x]
