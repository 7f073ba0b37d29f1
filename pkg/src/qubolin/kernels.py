"""Hot numeric kernels: simulated annealing sweeps and exhaustive scans.

Each kernel has two interchangeable implementations: a numba ``@njit`` build
(parallel across annealing reads) and a pure-numpy build that vectorizes the
same algorithm across reads.  The numba path is used when available; setting
the environment variable ``QUBOLIN_NO_NUMBA=1`` forces the numpy path.
``QUBOLIN_THREADS`` caps the numba thread count (0 or unset means auto).

Randomness comes from explicit splitmix64 streams, one per read, derived
from (seed, read index).  Both implementations consume identical streams in
identical order (k draws to initialize the state, then exactly one draw per
flip proposal), so results do not depend on thread scheduling.
"""

from __future__ import annotations

import math
import os

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV53 = 2.0 ** -53

_numba_kernels = None


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def use_numba() -> bool:
    """Backend choice: numba unless disabled by env flag or unavailable."""
    flag = os.environ.get("QUBOLIN_NO_NUMBA", "").strip().lower()
    if flag in {"1", "true", "yes", "on"}:
        return False
    return numba_available()


# ---------------------------------------------------------------------------
# pure-numpy implementations (vectorized across reads)
# ---------------------------------------------------------------------------

def _streams(seed: int, reads: int) -> np.ndarray:
    idx = np.arange(1, reads + 1, dtype=np.uint64)
    return np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + _GOLDEN * idx


def _draw(states: np.ndarray) -> np.ndarray:
    """Advance every stream one step; return uniforms in [0, 1)."""
    states += _GOLDEN
    z = (states ^ (states >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z ^= z >> np.uint64(31)
    return (z >> np.uint64(11)).astype(np.float64) * _INV53


def sa_anneal_numpy(diag, indptr, indices, weights, betas, reads, seed):
    """Independent single-bit-flip Metropolis anneals, vectorized over reads.

    CSR (indptr, indices, weights) holds the symmetric off-diagonal
    couplings.  Returns the final bit matrix, shape (reads, n_qubits).
    """
    k = diag.shape[0]
    states = _streams(seed, reads)
    bits = np.empty((reads, k), dtype=np.float64)
    for i in range(k):
        bits[:, i] = _draw(states) < 0.5
    for beta in betas:
        for i in range(k):
            lo, hi = indptr[i], indptr[i + 1]
            if hi > lo:
                fld = diag[i] + bits[:, indices[lo:hi]] @ weights[lo:hi]
            else:
                fld = np.full(reads, diag[i])
            d_e = (1.0 - 2.0 * bits[:, i]) * fld
            u = _draw(states)
            with np.errstate(over="ignore"):
                accept = u < np.exp(-beta * np.maximum(d_e, 0.0))
            np.logical_xor(bits[:, i], accept, out=bits[:, i], casting="unsafe")
    return bits.astype(np.uint8)


def exhaustive_scan_numpy(upper, rel_tol, chunk=1 << 16):
    """Scan all 2**k assignments; return (best energy, minimizer indices).

    Minimizers are all assignments with energy within
    ``rel_tol * max(1, |best|)`` of the best energy found.
    """
    k = upper.shape[0]
    total = 1 << k
    shifts = np.arange(k, dtype=np.uint64)
    best = math.inf
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        bits = ((idx[:, None] >> shifts) & np.uint64(1)).astype(np.float64)
        e = np.einsum("ri,ij,rj->r", bits, upper, bits)
        best = min(best, float(e.min()))
    cut = best + rel_tol * max(1.0, abs(best))
    hits = []
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        bits = ((idx[:, None] >> shifts) & np.uint64(1)).astype(np.float64)
        e = np.einsum("ri,ij,rj->r", bits, upper, bits)
        hits.append(idx[e <= cut])
    return best, np.concatenate(hits).astype(np.int64)


# ---------------------------------------------------------------------------
# numba implementations (same algorithm, compiled; parallel over reads)
# ---------------------------------------------------------------------------

def _load_numba_kernels():
    global _numba_kernels
    if _numba_kernels is not None:
        return _numba_kernels

    import numba
    from numba import njit, prange

    threads = os.environ.get("QUBOLIN_THREADS", "").strip()
    if threads.isdigit() and int(threads) > 0:
        numba.set_num_threads(min(int(threads), numba.config.NUMBA_NUM_THREADS))

    golden = np.uint64(0x9E3779B97F4A7C15)
    mix1 = np.uint64(0xBF58476D1CE4E5B9)
    mix2 = np.uint64(0x94D049BB133111EB)

    @njit(inline="always")
    def _next_uniform(state):
        state = state + golden
        z = (state ^ (state >> np.uint64(30))) * mix1
        z = (z ^ (z >> np.uint64(27))) * mix2
        z = z ^ (z >> np.uint64(31))
        return state, (z >> np.uint64(11)) * _INV53

    @njit(parallel=True, cache=True)
    def sa_anneal(diag, indptr, indices, weights, betas, reads, seed):
        k = diag.shape[0]
        out = np.empty((reads, k), dtype=np.uint8)
        for r in prange(reads):
            state = np.uint64(seed) + golden * np.uint64(r + 1)
            bits = np.zeros(k, dtype=np.uint8)
            for i in range(k):
                state, u = _next_uniform(state)
                bits[i] = 1 if u < 0.5 else 0
            for s in range(betas.shape[0]):
                beta = betas[s]
                for i in range(k):
                    fld = diag[i]
                    for t in range(indptr[i], indptr[i + 1]):
                        if bits[indices[t]]:
                            fld += weights[t]
                    d_e = (1.0 - 2.0 * bits[i]) * fld
                    state, u = _next_uniform(state)
                    if d_e <= 0.0 or u < math.exp(-beta * d_e):
                        bits[i] = 1 - bits[i]
            out[r] = bits
        return out

    @njit(cache=True)
    def exhaustive_scan(coo_i, coo_j, coo_v, k, rel_tol):
        total = np.int64(1) << np.int64(k)
        best = np.inf
        for a in range(total):
            e = 0.0
            for t in range(coo_i.shape[0]):
                if (a >> coo_i[t]) & 1 and (a >> coo_j[t]) & 1:
                    e += coo_v[t]
            if e < best:
                best = e
        cut = best + rel_tol * max(1.0, abs(best))
        count = 0
        for a in range(total):
            e = 0.0
            for t in range(coo_i.shape[0]):
                if (a >> coo_i[t]) & 1 and (a >> coo_j[t]) & 1:
                    e += coo_v[t]
            if e <= cut:
                count += 1
        hits = np.empty(count, dtype=np.int64)
        pos = 0
        for a in range(total):
            e = 0.0
            for t in range(coo_i.shape[0]):
                if (a >> coo_i[t]) & 1 and (a >> coo_j[t]) & 1:
                    e += coo_v[t]
            if e <= cut:
                hits[pos] = a
                pos += 1
        return best, hits

    _numba_kernels = (sa_anneal, exhaustive_scan)
    return _numba_kernels


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def sa_anneal(diag, indptr, indices, weights, betas, reads, seed):
    """Run the annealing kernel on the active backend."""
    if use_numba():
        kern, _ = _load_numba_kernels()
        return kern(diag, indptr, indices, weights, betas, np.int64(reads),
                    np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    return sa_anneal_numpy(diag, indptr, indices, weights, betas, reads, seed)


def exhaustive_scan(upper, coo, rel_tol):
    """Scan all assignments of a model on the active backend.

    ``upper`` is the dense upper-triangular matrix, ``coo`` its (i, j, value)
    arrays; both describe the same coefficients.
    """
    if use_numba():
        _, kern = _load_numba_kernels()
        coo_i, coo_j, coo_v = coo
        return kern(coo_i, coo_j, coo_v, upper.shape[0], rel_tol)
    return exhaustive_scan_numpy(upper, rel_tol)
