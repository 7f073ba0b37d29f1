"""Binary fixed-point encodings mapping real unknowns onto labeled qubits.

Two encodings are supported.  The signed-pair encoding represents a value as
a difference of two non-negative binary expansions (one qubit per power of
two and sign).  The offset-binary encoding uses a single non-negative
expansion plus one high-weight negative sign qubit, which roughly halves the
qubit count per variable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np


class EncodingKind(Enum):
    SIGNED_PAIR = "signed-pair"
    OFFSET_BINARY = "offset-binary"


@dataclass(frozen=True)
class EncodingSpec:
    """Digit range and encoding kind for a block of real variables.

    Qubit weights are the powers 2**lo .. 2**hi.  Signed-pair uses one such
    digit per sign (2*(hi-lo+1) qubits per variable); offset-binary uses the
    positive digits plus a sign qubit of weight -2**(hi+1) (hi-lo+2 qubits).
    """

    kind: EncodingKind
    lo: int
    hi: int
    n_vars: int

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValueError(f"hi ({self.hi}) must be >= lo ({self.lo})")
        if self.n_vars < 1:
            raise ValueError("n_vars must be positive")

    @property
    def n_digits(self) -> int:
        return self.hi - self.lo + 1

    @property
    def per_var_qubits(self) -> int:
        if self.kind is EncodingKind.SIGNED_PAIR:
            return 2 * self.n_digits
        return self.n_digits + 1

    def total_qubits(self) -> int:
        return self.n_vars * self.per_var_qubits

    def weights(self) -> list[Fraction]:
        """Signed per-qubit weights for one variable, in canonical order."""
        pos = [Fraction(2) ** l for l in range(self.lo, self.hi + 1)]
        if self.kind is EncodingKind.SIGNED_PAIR:
            return pos + [-w for w in pos]
        return pos + [-(Fraction(2) ** (self.hi + 1))]

    def labels(self) -> list["QubitLabel"]:
        """Labels for every qubit in flat order."""
        out = []
        for var in range(self.n_vars):
            for role, exp in self._var_roles():
                out.append(QubitLabel(var=var, role=role, exponent=exp, flat=len(out)))
        return out

    def _var_roles(self):
        exps = range(self.lo, self.hi + 1)
        if self.kind is EncodingKind.SIGNED_PAIR:
            return [("pos", l) for l in exps] + [("neg", l) for l in exps]
        return [("pos", l) for l in exps] + [("sign", self.hi + 1)]


@dataclass(frozen=True)
class QubitLabel:
    """Position of one qubit in the canonical flat ordering.

    Ordering is all qubits of variable 0, then variable 1, and so on; within
    a variable, positive digits ascending by exponent, then negative digits
    ascending (signed-pair) or the single sign qubit (offset-binary).
    """

    var: int
    role: str  # "pos", "neg" or "sign"
    exponent: int
    flat: int


def _check_length(spec: EncodingSpec, bits) -> np.ndarray:
    bits = np.asarray(bits)
    if bits.shape != (spec.total_qubits(),):
        raise ValueError(
            f"assignment has {bits.shape} bits, expected ({spec.total_qubits()},)"
        )
    return bits


def decode(spec: EncodingSpec, bits) -> np.ndarray:
    """Decode a full assignment to the real vector it represents.

    Signed-pair assignments with both a positive and a negative digit set are
    decoded arithmetically, not rejected; use ``violates_pair_constraint`` to
    detect them.
    """
    bits = _check_length(spec, bits)
    w = np.array([float(x) for x in spec.weights()])
    per = spec.per_var_qubits
    return bits.reshape(spec.n_vars, per).astype(float) @ w


def violates_pair_constraint(spec: EncodingSpec, bits) -> bool:
    """True iff some variable has both a positive and a negative digit set."""
    if spec.kind is not EncodingKind.SIGNED_PAIR:
        raise ValueError("pair constraint applies to the signed-pair encoding only")
    bits = _check_length(spec, bits)
    per = spec.per_var_qubits
    half = spec.n_digits
    blocks = bits.reshape(spec.n_vars, per)
    return bool(np.any(blocks[:, :half].any(axis=1) & blocks[:, half:].any(axis=1)))


def representations_of(spec: EncodingSpec, value, var: int = 0) -> list[tuple[int, ...]]:
    """All per-variable bit patterns that decode exactly to ``value``.

    The search is exhaustive over the variable's 2**k patterns, so cancelling
    signed-pair patterns (positive and negative digits set simultaneously)
    are included whenever they decode correctly.  Returns an empty list when
    the value is not representable.
    """
    if not 0 <= var < spec.n_vars:
        raise ValueError(f"var {var} out of range for {spec.n_vars} variables")
    target = Fraction(value)
    # weights are multiples of 2**lo; scale to integers for exact comparison
    scale = Fraction(2) ** (-spec.lo)
    scaled = target * scale
    if scaled.denominator != 1:
        return []
    target_int = scaled.numerator
    iw = [int(w * scale) for w in spec.weights()]
    k = spec.per_var_qubits
    out = []
    for pattern in itertools.product((0, 1), repeat=k):
        if sum(w for w, q in zip(iw, pattern) if q) == target_int:
            out.append(pattern)
    return out
