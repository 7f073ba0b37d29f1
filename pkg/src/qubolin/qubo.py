"""QUBO construction for linear systems, plus structural analytics.

Two formulations are built from Ax = b:

* vanilla: substitute the binary encoding of x directly into
  ``x^T (A^T A) x - 2 (b^T A) x`` and reduce with q*q = q.  Every cross term
  of the expansion is kept, so the model energy equals the quadratic form at
  the decoded x for every assignment.
* diagonalized ("sylvester"): given a congruence pair diag(D) = R^T (A^T A) R,
  substitute the encoding of y = R^-1 x into ``y^T D y - 2 (b^T A R) y``.
  Because D is diagonal, no terms couple different variables, and for the
  signed-pair encoding the positive/negative cross terms of one variable are
  dropped (their product is constrained to zero), which is what makes the
  coefficient matrix block diagonal.

Coefficients are accumulated in exact rational arithmetic and converted to
float only when stored, so models built from rational data reproduce their
reference values bit for bit.  The constant b^T b is kept separately as the
model offset: an assignment solves the system exactly when its energy equals
minus the offset.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .congruence import CongruencePair, congruence_residual
from .encoding import EncodingKind, EncodingSpec
from .errors import CongruenceResidualError, InstrumentationError

ZERO_DROP = 1e-12
RESIDUAL_TOL = 1e-6


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, (float, np.floating)):
        return Fraction(float(x))  # exact binary expansion
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def _frac_matrix(a) -> list[list[Fraction]]:
    return [[_to_fraction(x) for x in row] for row in a]


def _frac_vector(b) -> list[Fraction]:
    return [_to_fraction(x) for x in b]


class LinearSystem:
    """The pair (A, b) defining Ax = b with n unknowns.

    Entries are kept both as exact rationals (ints and decimal strings parse
    exactly; floats convert via their binary expansion) and as float arrays
    for numeric work.
    """

    def __init__(self, a, b):
        self.a_exact = _frac_matrix(a)
        self.b_exact = _frac_vector(b)
        n = len(self.a_exact)
        if n < 1 or any(len(row) != n for row in self.a_exact):
            raise ValueError("A must be square and non-empty")
        if len(self.b_exact) != n:
            raise ValueError(f"b has length {len(self.b_exact)}, expected {n}")
        self.n = n
        self.a = np.array([[float(x) for x in row] for row in self.a_exact])
        self.b = np.array([float(x) for x in self.b_exact])
        if not (np.isfinite(self.a).all() and np.isfinite(self.b).all()):
            raise ValueError("system entries must be finite")

    def normal_matrix(self) -> np.ndarray:
        return self.a.T @ self.a

    def offset_exact(self) -> Fraction:
        return sum((x * x for x in self.b_exact), Fraction(0))

    def __repr__(self):
        return f"LinearSystem(n={self.n})"


@dataclass
class QuboModel:
    """Upper-triangular QUBO coefficients over labeled qubits.

    ``coeffs`` maps flat qubit index pairs (i, j) with i <= j to real
    coefficients.  The constant offset b^T b is stored separately, so the
    all-zero assignment always has energy 0.  ``linear_ops`` counts the
    multiply-adds spent on the linear-coefficient sums when the model was
    built with instrumentation.
    """

    n_qubits: int
    coeffs: dict[tuple[int, int], float]
    offset: float
    formulation: str  # "vanilla" or "sylvester"
    spec: EncodingSpec
    pair: CongruencePair | None = None
    keep_zeros: bool = False
    linear_ops: int | None = field(default=None, repr=False)

    def dense_upper(self) -> np.ndarray:
        u = np.zeros((self.n_qubits, self.n_qubits))
        for (i, j), c in self.coeffs.items():
            u[i, j] = c
        return u


class _CoeffAccumulator:
    """Accumulate rational coefficients; drop near-zeros unless keeping them."""

    def __init__(self, n_qubits: int, keep_zeros: bool):
        self.n_qubits = n_qubits
        self.keep_zeros = keep_zeros
        self.acc: dict[tuple[int, int], Fraction] = {}

    def add(self, i: int, j: int, value: Fraction):
        if i > j:
            i, j = j, i
        key = (i, j)
        self.acc[key] = self.acc.get(key, Fraction(0)) + value

    def finish(self) -> dict[tuple[int, int], float]:
        out = {}
        if self.keep_zeros:
            for i in range(self.n_qubits):
                for j in range(i, self.n_qubits):
                    out[(i, j)] = float(self.acc.get((i, j), Fraction(0)))
            return out
        for key, val in self.acc.items():
            f = float(val)
            if abs(f) > ZERO_DROP:
                out[key] = f
        return out


def _qubit_weights(spec: EncodingSpec):
    """Per-qubit (var, signed weight, role) in flat order."""
    weights = spec.weights()
    roles = [r for r, _ in spec._var_roles()]
    out = []
    for var in range(spec.n_vars):
        for w, role in zip(weights, roles):
            out.append((var, w, role))
    return out


def build_vanilla(system: LinearSystem, spec: EncodingSpec, *,
                  keep_zeros: bool = False, instrument: bool = True) -> QuboModel:
    """Build the direct QUBO for ||Ax - b||^2 - b^T b under the encoding.

    For every assignment, the model energy equals the quadratic form
    x^T A^T A x - 2 b^T A x at the decoded x.
    """
    if spec.n_vars != system.n:
        raise ValueError(f"spec encodes {spec.n_vars} variables, system has {system.n}")
    a = system.a_exact
    b = system.b_exact
    n = system.n
    ops = 0
    # normal matrix P = A^T A
    p = [[sum(a[k][i] * a[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    # w_j = sum_k b_k a_{k,j}
    w = [sum(b[k] * a[k][j] for k in range(n)) for j in range(n)]
    ops += n * n

    qubits = _qubit_weights(spec)
    acc = _CoeffAccumulator(spec.total_qubits(), keep_zeros)
    for u, (vu, wu, _) in enumerate(qubits):
        acc.add(u, u, p[vu][vu] * wu * wu - 2 * w[vu] * wu)
        ops += 1
        for v in range(u + 1, len(qubits)):
            vv, wv, _ = qubits[v]
            acc.add(u, v, 2 * p[vu][vv] * wu * wv)

    return QuboModel(
        n_qubits=spec.total_qubits(),
        coeffs=acc.finish(),
        offset=float(system.offset_exact()),
        formulation="vanilla",
        spec=spec,
        keep_zeros=keep_zeros,
        linear_ops=ops if instrument else None,
    )


def build_sylvester(system: LinearSystem, pair: CongruencePair, spec: EncodingSpec, *,
                    keep_zeros: bool = False, instrument: bool = True) -> QuboModel:
    """Build the block-diagonal QUBO for y^T D y - 2 (b^T A R) y.

    ``pair`` must be a congruence of this system's A^T A (checked by
    residual).  For assignments that respect the signed-pair constraint, the
    model energy equals ||A R y - b||^2 - b^T b at the decoded y.
    """
    if spec.n_vars != system.n:
        raise ValueError(f"spec encodes {spec.n_vars} variables, system has {system.n}")
    if pair.n != system.n:
        raise ValueError("congruence pair dimension does not match the system")
    s = system.normal_matrix()
    resid = congruence_residual(s, pair)
    if resid > RESIDUAL_TOL * (1.0 + np.abs(s).max()):
        raise CongruenceResidualError(
            f"pair is not a congruence of A^T A (residual {resid:.3e})"
        )

    a = system.a_exact
    b = system.b_exact
    n = system.n
    d = [_to_fraction(x) for x in np.asarray(pair.d).tolist()]
    r = _frac_matrix(np.asarray(pair.r).tolist())
    ops = 0
    w = [sum(b[k] * a[k][j] for k in range(n)) for j in range(n)]
    ops += n * n
    # c_i = sum_j sum_k b_k a_{k,j} r_{j,i}
    c = [sum(w[j] * r[j][i] for j in range(n)) for i in range(n)]
    ops += n * n

    signed_pair = spec.kind is EncodingKind.SIGNED_PAIR
    qubits = _qubit_weights(spec)
    acc = _CoeffAccumulator(spec.total_qubits(), keep_zeros)
    per = spec.per_var_qubits
    for u, (vu, wu, ru) in enumerate(qubits):
        acc.add(u, u, d[vu] * wu * wu - 2 * c[vu] * wu)
        ops += 1
        # quadratic terms exist only inside one variable (D is diagonal)
        for v in range(u + 1, (vu + 1) * per):
            _, wv, rv = qubits[v]
            if signed_pair and ru != rv:
                continue  # q+ q- = 0 within one variable
            acc.add(u, v, 2 * d[vu] * wu * wv)

    return QuboModel(
        n_qubits=spec.total_qubits(),
        coeffs=acc.finish(),
        offset=float(system.offset_exact()),
        formulation="sylvester",
        spec=spec,
        pair=pair,
        keep_zeros=keep_zeros,
        linear_ops=ops if instrument else None,
    )


def energy(model: QuboModel, bits) -> float:
    """Energy sum_{i<=j} Q[i,j] b_i b_j of one assignment (offset excluded)."""
    bits = np.asarray(bits)
    if bits.shape != (model.n_qubits,):
        raise ValueError(f"assignment has shape {bits.shape}, expected ({model.n_qubits},)")
    total = 0.0
    for (i, j), coeff in model.coeffs.items():
        if bits[i] and bits[j]:
            total += coeff
    return total


def energies_of(model: QuboModel, batch: np.ndarray) -> np.ndarray:
    """Energies of a batch of assignments (rows)."""
    batch = np.asarray(batch, dtype=float)
    u = model.dense_upper()
    return np.einsum("ri,ij,rj->r", batch, u, batch)


def nonzero_count(model: QuboModel) -> int:
    """Number of stored coefficients that are nonzero."""
    return sum(1 for c in model.coeffs.values() if c != 0.0)


@dataclass(frozen=True)
class CouplingGraph:
    """Qubit-coupling structure: one edge per nonzero off-diagonal coefficient."""

    n_nodes: int
    edges: tuple[tuple[int, int], ...]

    def adjacency(self) -> list[list[int]]:
        adj = [[] for _ in range(self.n_nodes)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj


def coupling_graph(model: QuboModel) -> CouplingGraph:
    edges = sorted(
        (i, j) for (i, j), c in model.coeffs.items() if i != j and c != 0.0
    )
    return CouplingGraph(n_nodes=model.n_qubits, edges=tuple(edges))


def block_decomposition(model: QuboModel) -> list[list[int]]:
    """Connected components of the coupling graph, sorted by lowest qubit."""
    graph = coupling_graph(model)
    adj = graph.adjacency()
    seen = [False] * graph.n_nodes
    components = []
    for start in range(graph.n_nodes):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        stack = [start]
        while stack:
            node = stack.pop()
            for nxt in adj[node]:
                if not seen[nxt]:
                    seen[nxt] = True
                    comp.append(nxt)
                    stack.append(nxt)
        components.append(sorted(comp))
    return components


def build_cost(model: QuboModel) -> int:
    """Multiply-adds spent on the linear-coefficient sums during the build."""
    if model.linear_ops is None:
        raise InstrumentationError("model was built with instrument=False")
    return model.linear_ops


def cost_bound(spec: EncodingSpec, n: int) -> int:
    """Budget 4 * (digits per sign) * n^2 that build_cost must respect."""
    return 4 * spec.n_digits * n * n


def count_bounds(n: int, digits_per_sign: int) -> dict[str, float]:
    """Nonzero-count ceilings for both formulations and their ratio window.

    With m digits per sign and n variables the vanilla matrix is 2mn x 2mn,
    so it holds at most mn(2mn+1) upper-triangular nonzeros; the diagonalized
    model decomposes into 2n blocks of m and holds at most mn(m+1).
    """
    m = digits_per_sign
    return {
        "vanilla_max": m * n * (2 * m * n + 1),
        "sylvester_max": m * n * (m + 1),
        "ratio_window": (1.0 / (2 * n), 1.0 / (2 * n - 1)),
    }
