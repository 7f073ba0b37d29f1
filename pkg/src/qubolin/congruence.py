"""Congruence diagonalization D = R^T S R of real symmetric matrices.

The main routine runs symmetric Gaussian elimination: simultaneous row and
column operations accumulated into R, with diagonal pivoting.  When every
remaining diagonal entry is numerically zero but the trailing block is not,
the standard congruence fix (add one row/column into another to create a
usable pivot) is applied.  This works for singular inputs, where the zero
diagonal entries of D count n - rank(S).

For invertible A there is also a shortcut through the QR factorization of A,
which yields D = I directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CongruenceError, SingularMatrixError

# Scale-relative rank cutoff; |det R| cutoff for the nonsingularity check.
RANK_TOL = 1e-10
DET_TOL = 1e-12


@dataclass(frozen=True)
class SymMatrix:
    """Dense real symmetric matrix; symmetry is enforced at construction."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise ValueError("matrix is not symmetric")
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class CongruencePair:
    """Diagonal D (as a vector) and nonsingular R with diag(D) = R^T S R.

    Entries may be floats or exact rationals; ``d_float``/``r_float`` give
    float views for numeric work.  ``rank`` counts the nonzero entries of D
    under the rank tolerance, which by inertia equals rank(S).
    """

    d: np.ndarray
    r: np.ndarray
    rank: int = field(default=-1)

    def __post_init__(self):
        d = np.asarray(self.d)
        r = np.asarray(self.r)
        n = d.shape[0]
        if r.shape != (n, n):
            raise ValueError("R must be square and match len(D)")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "r", r)
        if self.rank < 0:
            df = np.asarray(d, dtype=float)
            tol = RANK_TOL * max(1.0, np.abs(df).max() if n else 1.0)
            object.__setattr__(self, "rank", int(np.count_nonzero(np.abs(df) > tol)))

    @property
    def n(self) -> int:
        return self.d.shape[0]

    @property
    def d_float(self) -> np.ndarray:
        return np.asarray(self.d, dtype=float)

    @property
    def r_float(self) -> np.ndarray:
        return np.asarray(self.r, dtype=float)


def _as_sym(s) -> SymMatrix:
    return s if isinstance(s, SymMatrix) else SymMatrix(np.asarray(s, dtype=float))


def diagonalize_congruent(s) -> CongruencePair:
    """Compute (D, R, rank) with diag(D) = R^T S R by symmetric elimination.

    Accepts a SymMatrix or anything convertible to one.  The returned R has
    |det R| = 1 (it is a product of permutations and shears), so it always
    passes the nonsingularity tolerance.

    Raises CongruenceError if elimination stalls on a pivot that stays
    below tolerance even after the zero-diagonal fix.
    """
    sym = _as_sym(s)
    n = sym.n
    S = sym.entries.copy()
    R = np.eye(n)
    scale = max(1.0, np.abs(S).max())
    tol = RANK_TOL * scale

    for k in range(n):
        diag = np.abs(np.diag(S)[k:])
        j = k + int(np.argmax(diag))
        if abs(S[j, j]) <= tol:
            sub = np.abs(np.triu(S[k:, k:], 1))
            if sub.size == 0 or sub.max() <= tol:
                break  # trailing block is numerically zero
            p, q = np.unravel_index(int(np.argmax(sub)), sub.shape)
            p += k
            q += k
            # S[p,p] ~ 0 but S[p,q] is not: fold row/column q into p
            S[:, p] += S[:, q]
            S[p, :] += S[q, :]
            R[:, p] += R[:, q]
            j = p
            if abs(S[j, j]) <= tol:
                raise CongruenceError(
                    f"pivot {abs(S[j, j]):.3e} below tolerance {tol:.3e} at step {k}"
                )
        if j != k:
            S[:, [k, j]] = S[:, [j, k]]
            S[[k, j], :] = S[[j, k], :]
            R[:, [k, j]] = R[:, [j, k]]
        for i in range(k + 1, n):
            f = S[i, k] / S[k, k]
            if f != 0.0:
                S[i, :] -= f * S[k, :]
                S[:, i] -= f * S[:, k]
                R[:, i] -= f * R[:, k]

    d = np.diag(S).copy()
    d[np.abs(d) <= tol] = 0.0
    rank = int(np.count_nonzero(d))
    return CongruencePair(d=d, r=R, rank=rank)


def qr_congruence(a) -> CongruencePair:
    """Congruence pair for A^T A with D = I, via the QR factorization of A.

    A = Q R' with Q orthogonal gives (R'^-1)^T (A^T A) R'^-1 = I, so the
    returned pair is D = (1, ..., 1), R = R'^-1.  Requires invertible A.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    _, rprime = np.linalg.qr(a)
    det = float(np.prod(np.diag(rprime)))
    if abs(det) <= DET_TOL * max(1.0, np.abs(a).max()) ** n:
        raise SingularMatrixError(f"matrix is singular within tolerance (det ~ {det:.3e})")
    r = np.linalg.inv(rprime)
    return CongruencePair(d=np.ones(n), r=r, rank=n)


def rank_of(s) -> int:
    """Numerical rank of a symmetric matrix under the rank tolerance."""
    return diagonalize_congruent(s).rank


def congruence_residual(s, pair: CongruencePair) -> float:
    """Max-norm of R^T S R - diag(D), in floats."""
    sym = _as_sym(s)
    rf = pair.r_float
    return float(np.abs(rf.T @ sym.entries @ rf - np.diag(pair.d_float)).max())


def inertia(pair: CongruencePair) -> tuple[int, int, int]:
    """Counts of positive, negative and zero entries of D under the rank tolerance."""
    d = pair.d_float
    tol = RANK_TOL * max(1.0, np.abs(d).max() if d.size else 1.0)
    pos = int(np.count_nonzero(d > tol))
    neg = int(np.count_nonzero(d < -tol))
    return pos, neg, pair.n - pos - neg
