"""QAOA circuit construction.

Gate conventions (matching the kernels):

    H          = (1/sqrt 2) [[1, 1], [1, -1]]
    RX(theta)  = exp(-i theta X / 2)
    RZ(theta)  = exp(-i theta Z / 2)
    RZZ(theta) = exp(-i theta (Z x Z) / 2)

One layer applies exp(-i gamma H_C) as RZ/RZZ gates with angles
2*gamma*coefficient, then exp(-i beta H_M) as RX(2*beta) on every qubit.
The Hamiltonian constant contributes only a global phase and emits no gate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ContractViolation
from .hamiltonian import IsingHamiltonian

GATE_H = "H"
GATE_RZ = "RZ"
GATE_RZZ = "RZZ"
GATE_RX = "RX"
GATE_MEASURE_ALL = "MEASURE_ALL"

# Integer codes used by the numeric kernels.
KIND_CODES = {GATE_H: 0, GATE_RZ: 1, GATE_RZZ: 2, GATE_RX: 3}


class Gate(NamedTuple):
    kind: str
    qubits: tuple[int, ...]
    theta: Optional[float]


@dataclass(frozen=True)
class QaoaParams:
    """Depth-p angle set: p gammas followed by p betas."""

    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        if len(self.gammas) != len(self.betas) or len(self.gammas) < 1:
            raise ContractViolation("gammas and betas must have equal length p >= 1")

    @property
    def depth(self) -> int:
        return len(self.gammas)

    @classmethod
    def from_vector(cls, x) -> "QaoaParams":
        x = np.asarray(x, dtype=float).ravel()
        if x.size % 2 != 0 or x.size == 0:
            raise ContractViolation(f"parameter vector must have even positive length, got {x.size}")
        p = x.size // 2
        return cls(tuple(x[:p]), tuple(x[p:]))

    def to_vector(self) -> np.ndarray:
        return np.array(self.gammas + self.betas, dtype=float)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        for i, gate in enumerate(self.gates):
            if gate.kind == GATE_MEASURE_ALL:
                if i != len(self.gates) - 1:
                    raise ContractViolation("MEASURE_ALL may appear only as the final gate")
                continue
            if gate.kind not in KIND_CODES:
                raise ContractViolation(f"unknown gate kind {gate.kind!r}")
            for q in gate.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ContractViolation(f"gate {gate.kind} targets qubit {q} outside [0, {self.n_qubits})")
            expected = 2 if gate.kind == GATE_RZZ else 1
            if len(gate.qubits) != expected:
                raise ContractViolation(f"gate {gate.kind} takes {expected} qubit(s)")
            if gate.kind == GATE_RZZ and gate.qubits[0] == gate.qubits[1]:
                raise ContractViolation("RZZ qubits must be distinct")

    def gate_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for gate in self.gates:
            counts[gate.kind] = counts.get(gate.kind, 0) + 1
        return counts

    def to_arrays(self):
        """(kinds, qa, qb, thetas) arrays for the kernels; MEASURE_ALL is dropped."""
        ops = [g for g in self.gates if g.kind != GATE_MEASURE_ALL]
        kinds = np.array([KIND_CODES[g.kind] for g in ops], dtype=np.int64)
        qa = np.array([g.qubits[0] for g in ops], dtype=np.int64)
        qb = np.array([g.qubits[1] if len(g.qubits) == 2 else -1 for g in ops], dtype=np.int64)
        thetas = np.array([g.theta if g.theta is not None else 0.0 for g in ops], dtype=np.float64)
        return kinds, qa, qb, thetas


@dataclass(frozen=True)
class QaoaTemplate:
    """Parameter-independent circuit skeleton for one Hamiltonian and depth.

    Gate g carries angle coeffs[g] * x[slots[g]] where x is the parameter
    vector (gammas then betas); slot -1 marks the initial Hadamards.
    """

    n_qubits: int
    depth: int
    kinds: np.ndarray
    qa: np.ndarray
    qb: np.ndarray
    coeffs: np.ndarray
    slots: np.ndarray

    @property
    def n_params(self) -> int:
        return 2 * self.depth

    @property
    def n_shiftable(self) -> int:
        return int(np.count_nonzero(self.slots >= 0))

    def thetas(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.size != self.n_params:
            raise ContractViolation(f"expected {self.n_params} parameters, got {x.size}")
        th = np.zeros(self.kinds.size, dtype=np.float64)
        mask = self.slots >= 0
        th[mask] = self.coeffs[mask] * x[self.slots[mask]]
        return th


def build_qaoa_template(h: IsingHamiltonian, depth: int) -> QaoaTemplate:
    if depth < 1:
        raise ContractViolation("depth must be >= 1")
    kinds, qa, qb, coeffs, slots = [], [], [], [], []

    def add(kind, q1, q2, coeff, slot):
        kinds.append(KIND_CODES[kind])
        qa.append(q1)
        qb.append(q2)
        coeffs.append(coeff)
        slots.append(slot)

    n = h.n_qubits
    for q in range(n):
        add(GATE_H, q, -1, 0.0, -1)
    for layer in range(depth):
        gamma_slot, beta_slot = layer, depth + layer
        for q, coeff in enumerate(h.linear):
            if coeff != 0.0:
                add(GATE_RZ, q, -1, 2.0 * coeff, gamma_slot)
        for (u, v) in sorted(h.quadratic):
            add(GATE_RZZ, u, v, 2.0 * h.quadratic[(u, v)], gamma_slot)
        for q in range(n):
            add(GATE_RX, q, -1, 2.0, beta_slot)
    return QaoaTemplate(
        n_qubits=n,
        depth=depth,
        kinds=np.array(kinds, dtype=np.int64),
        qa=np.array(qa, dtype=np.int64),
        qb=np.array(qb, dtype=np.int64),
        coeffs=np.array(coeffs, dtype=np.float64),
        slots=np.array(slots, dtype=np.int64),
    )


_KIND_NAMES = {code: name for name, code in KIND_CODES.items()}


def build_qaoa_circuit(h: IsingHamiltonian, params: QaoaParams) -> Circuit:
    """Alternating cost/mixer ansatz on the |+...+> state."""
    template = build_qaoa_template(h, params.depth)
    thetas = template.thetas(params.to_vector())
    gates = []
    for g in range(template.kinds.size):
        kind = _KIND_NAMES[int(template.kinds[g])]
        if kind == GATE_H:
            gates.append(Gate(GATE_H, (int(template.qa[g]),), None))
        elif kind == GATE_RZZ:
            gates.append(Gate(GATE_RZZ, (int(template.qa[g]), int(template.qb[g])), float(thetas[g])))
        else:
            gates.append(Gate(kind, (int(template.qa[g]),), float(thetas[g])))
    return Circuit(h.n_qubits, tuple(gates))
