"""Ground-state search: exhaustive enumeration and seeded simulated annealing.

The exhaustive path enumerates every assignment of small models and returns
all minimizers.  The annealing path mimics a hardware sampler's interface:
``reads`` independent anneals, aggregated into (assignment, energy, count)
rows.  Both are deterministic; annealing results are a pure function of the
model and SaParams regardless of thread count.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .congruence import CongruencePair, diagonalize_congruent, qr_congruence
from .encoding import EncodingSpec, decode
from .errors import ExhaustiveCapError
from .qubo import LinearSystem, QuboModel, build_sylvester, build_vanilla, energies_of

EXHAUSTIVE_CAP = 26
GROUND_TOL = 1e-9
SOLVED_TOL = 1e-6


@dataclass(frozen=True)
class SaParams:
    """Annealing schedule: geometric beta ramp, one stream per read."""

    reads: int = 1000
    sweeps: int = 200
    beta: tuple[float, float] = (0.1, 10.0)
    seed: int = 0

    def __post_init__(self):
        if self.reads < 1 or self.sweeps < 1:
            raise ValueError("reads and sweeps must be >= 1")
        b0, b1 = self.beta
        if not (0.0 < b0 < b1):
            raise ValueError("beta must satisfy 0 < beta_start < beta_end")

    def schedule(self) -> np.ndarray:
        if self.sweeps == 1:
            return np.array([self.beta[1]])
        return np.geomspace(self.beta[0], self.beta[1], self.sweeps)


@dataclass
class SampleSet:
    """Solver output: distinct assignments with energies and read counts.

    Rows are sorted by ascending energy, ties broken lexicographically on the
    assignment.  ``decoded`` pairs (y, x) with one entry per ground state,
    where x = R y for diagonalized models and x = y otherwise.
    """

    samples: list[tuple[tuple[int, ...], float, int]]
    best_energy: float
    decoded: list[tuple[np.ndarray, np.ndarray]]
    n_reads: int | None = None

    def ground_states(self) -> list[tuple[int, ...]]:
        tol = GROUND_TOL * max(1.0, abs(self.best_energy))
        return [bits for bits, e, _ in self.samples if e <= self.best_energy + tol]


def _apply_r(pair: CongruencePair | None, y: np.ndarray) -> np.ndarray:
    if pair is None:
        return np.asarray(y, dtype=float)
    r = np.asarray(pair.r)
    if r.dtype == object:
        # exact rational R: keep the matvec exact (y entries are dyadic)
        yf = [Fraction(float(v)) for v in y]
        return np.array([float(sum(r[i, j] * yf[j] for j in range(len(yf))))
                         for i in range(r.shape[0])])
    return r @ np.asarray(y, dtype=float)


def _decode_rows(model: QuboModel, rows: list[tuple[int, ...]]):
    out = []
    for bits in rows:
        y = decode(model.spec, np.array(bits))
        x = _apply_r(model.pair, y) if model.formulation == "sylvester" else y
        out.append((y, x))
    return out


def _finish(model: QuboModel, rows, counts, n_reads=None) -> SampleSet:
    energies = energies_of(model, np.array(rows, dtype=float))
    order = sorted(range(len(rows)), key=lambda i: (energies[i], rows[i]))
    samples = [(tuple(int(b) for b in rows[i]), float(energies[i]), int(counts[i]))
               for i in order]
    best = samples[0][1]
    sample_set = SampleSet(samples=samples, best_energy=best, decoded=[], n_reads=n_reads)
    sample_set.decoded = _decode_rows(model, sample_set.ground_states())
    return sample_set


def solve_exhaustive(model: QuboModel, cap: int = EXHAUSTIVE_CAP) -> SampleSet:
    """Enumerate all assignments; return every minimizer with count 1."""
    k = model.n_qubits
    if k > cap:
        raise ExhaustiveCapError(f"{k} qubits exceeds the exhaustive cap of {cap}")
    upper = model.dense_upper()
    items = sorted(model.coeffs.items())
    coo = (
        np.array([i for (i, _), _ in items], dtype=np.int64),
        np.array([j for (_, j), _ in items], dtype=np.int64),
        np.array([v for _, v in items], dtype=np.float64),
    )
    _, hits = kernels.exhaustive_scan(upper, coo, GROUND_TOL)
    shifts = np.arange(k, dtype=np.uint64)
    rows = ((hits.astype(np.uint64)[:, None] >> shifts) & np.uint64(1)).astype(np.uint8)
    rows = [tuple(int(b) for b in row) for row in rows]
    return _finish(model, rows, [1] * len(rows))


def _csr_symmetric(model: QuboModel):
    k = model.n_qubits
    diag = np.zeros(k)
    neighbors: list[list[tuple[int, float]]] = [[] for _ in range(k)]
    for (i, j), c in model.coeffs.items():
        if i == j:
            diag[i] += c
        elif c != 0.0:
            neighbors[i].append((j, c))
            neighbors[j].append((i, c))
    indptr = np.zeros(k + 1, dtype=np.int64)
    idx, wts = [], []
    for i, row in enumerate(neighbors):
        row.sort()
        indptr[i + 1] = indptr[i] + len(row)
        idx.extend(j for j, _ in row)
        wts.extend(w for _, w in row)
    return diag, indptr, np.array(idx, dtype=np.int64), np.array(wts, dtype=np.float64)


def solve_sa(model: QuboModel, params: SaParams) -> SampleSet:
    """Aggregate ``params.reads`` independent annealing reads."""
    diag, indptr, indices, weights = _csr_symmetric(model)
    bits = kernels.sa_anneal(diag, indptr, indices, weights,
                             params.schedule(), params.reads, params.seed)
    rows, counts = np.unique(bits, axis=0, return_counts=True)
    rows = [tuple(int(b) for b in row) for row in rows]
    return _finish(model, rows, counts.tolist(), n_reads=params.reads)


@dataclass
class SolveResult:
    sample_set: SampleSet
    x_best: np.ndarray
    residual: float
    solved: bool
    model: QuboModel
    pair: CongruencePair | None


def solve_system(system: LinearSystem, formulation: str, spec: EncodingSpec,
                 method: str = "exhaustive", sa_params: SaParams | None = None, *,
                 pair: CongruencePair | None = None, qr: bool = False,
                 keep_zeros: bool = False, cap: int = EXHAUSTIVE_CAP) -> SolveResult:
    """End-to-end pipeline: congruence, build, solve, decode.

    The system is declared solved when the best energy reaches -b^T b within
    a relative tolerance (the exact criterion for an exact solution).
    """
    if formulation == "sylvester":
        if pair is None:
            pair = qr_congruence(system.a) if qr else diagonalize_congruent(system.normal_matrix())
        model = build_sylvester(system, pair, spec, keep_zeros=keep_zeros)
    elif formulation == "vanilla":
        model = build_vanilla(system, spec, keep_zeros=keep_zeros)
        pair = None
    else:
        raise ValueError(f"unknown formulation {formulation!r}")

    if method == "exhaustive":
        sample_set = solve_exhaustive(model, cap=cap)
    elif method == "sa":
        sample_set = solve_sa(model, sa_params or SaParams())
    else:
        raise ValueError(f"unknown method {method!r}")

    _, x_best = sample_set.decoded[0]
    residual = float(np.linalg.norm(system.a @ x_best - system.b))
    offset = model.offset
    solved = sample_set.best_energy + offset <= SOLVED_TOL * (1.0 + offset)
    return SolveResult(sample_set=sample_set, x_best=np.asarray(x_best),
                       residual=residual, solved=solved, model=model, pair=pair)


@dataclass
class SuccessReport:
    """Occurrence counts of minimum-energy reads, one row per trial."""

    rows: list[dict]
    average_occurrences: float
    average_probability: float
    ground_energy: float


def success_report(model: QuboModel, params: SaParams, trials: int,
                   ground_energy: float | None = None) -> SuccessReport:
    """Count reads that reach the known minimum, for ``trials`` repeated runs.

    Trial t runs with seed ``params.seed + t``.  The minimum is taken from an
    exhaustive solve when not supplied (model must fit under the cap then).
    """
    if ground_energy is None:
        ground_energy = solve_exhaustive(model).best_energy
    tol = GROUND_TOL * max(1.0, abs(ground_energy))
    rows = []
    for t in range(trials):
        run = solve_sa(model, SaParams(reads=params.reads, sweeps=params.sweeps,
                                       beta=params.beta, seed=params.seed + t))
        occ = sum(c for _, e, c in run.samples if e <= ground_energy + tol)
        rows.append({"trial": t + 1, "occurrences": occ,
                     "probability": occ / params.reads})
    avg_occ = sum(r["occurrences"] for r in rows) / max(1, trials)
    avg_p = sum(r["probability"] for r in rows) / max(1, trials)
    return SuccessReport(rows=rows, average_occurrences=avg_occ,
                         average_probability=avg_p, ground_energy=ground_energy)
