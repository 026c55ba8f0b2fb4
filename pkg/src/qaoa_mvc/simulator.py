"""Circuit execution backends: exact state vector and noisy density matrix.

Measurement sampling and the noise channels live here too; the inner numeric
loops are delegated to `kernels`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .circuits import Circuit
from .errors import ContractViolation
from .graphs import Graph, index_to_bits
from .hamiltonian import IsingHamiltonian, PenaltyWeights, classical_cost, diagonal
from .noise import NoiseModel

MAX_STATEVECTOR_QUBITS = 20
MAX_DENSITY_QUBITS = 10

PURE = "pure"
MIXED = "mixed"


@dataclass(frozen=True)
class QuantumState:
    """Either a 2^n state vector (kind 'pure') or a 2^n x 2^n density matrix ('mixed')."""

    kind: str
    data: np.ndarray

    @property
    def n_qubits(self) -> int:
        return int(self.data.shape[0]).bit_length() - 1

    @property
    def dim(self) -> int:
        return int(self.data.shape[0])

    def probabilities(self) -> np.ndarray:
        """Computational-basis outcome distribution (clipped and renormalized)."""
        if self.kind == PURE:
            p = np.abs(self.data) ** 2
        else:
            p = np.real(np.diag(self.data)).copy()
        p = np.clip(p, 0.0, None)
        return p / p.sum()

    def validate(self, atol: float = 1e-10) -> None:
        """Assert the physical-state invariants; used by tests."""
        if self.kind == PURE:
            norm = float(np.sum(np.abs(self.data) ** 2))
            if abs(norm - 1.0) > atol:
                raise ContractViolation(f"state norm {norm} deviates from 1")
        else:
            tr = complex(np.trace(self.data))
            if abs(tr - 1.0) > atol:
                raise ContractViolation(f"density trace {tr} deviates from 1")
            if np.max(np.abs(self.data - self.data.conj().T)) > atol:
                raise ContractViolation("density matrix is not Hermitian")
            if float(np.linalg.eigvalsh(self.data).min()) < -1e-9:
                raise ContractViolation("density matrix has negative eigenvalues")


@dataclass(frozen=True)
class ShotCounts:
    """Histogram of measured bit strings; counts sum to the shot total."""

    counts: dict[str, int]
    shots: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ContractViolation("counts must sum to the shot total")


def run_statevector(c: Circuit) -> QuantumState:
    """Exact pure-state execution starting from |0...0>."""
    if c.n_qubits > MAX_STATEVECTOR_QUBITS:
        raise ContractViolation(f"state vectors limited to {MAX_STATEVECTOR_QUBITS} qubits")
    kinds, qa, qb, thetas = c.to_arrays()
    return QuantumState(PURE, kernels.sv_run(c.n_qubits, kinds, qa, qb, thetas))


def run_density_matrix(c: Circuit, noise: NoiseModel) -> QuantumState:
    """Mixed-state execution with the gate-level noise channels applied after each gate."""
    if c.n_qubits > MAX_DENSITY_QUBITS:
        raise ContractViolation(f"density matrices limited to {MAX_DENSITY_QUBITS} qubits")
    kinds, qa, qb, thetas = c.to_arrays()
    ch = noise.channel_arrays(c.n_qubits)
    rho = kernels.dm_run(
        c.n_qubits, kinds, qa, qb, thetas,
        ch["p1q"], ch["gad1"], ch["f1"], ch["p2"], ch["gad2"], ch["f2"],
    )
    return QuantumState(MIXED, rho)


def expectation_exact(s: QuantumState, h: IsingHamiltonian) -> float:
    """<H> of a diagonal operator: sum of outcome probabilities times eigenvalues."""
    diag = diagonal(h)
    if diag.size != s.dim:
        raise ContractViolation(
            f"operator on {h.n_qubits} qubits does not match {s.n_qubits}-qubit state"
        )
    if s.kind == PURE:
        probs = np.abs(s.data) ** 2
    else:
        probs = np.real(np.diag(s.data))
    return float(probs @ diag)


def sample_indices(probs: np.ndarray, shots: int, rng: np.random.Generator,
                   readout: np.ndarray | None = None) -> np.ndarray:
    """Draw basis-state indices, then flip each bit per its confusion matrix."""
    n = probs.size.bit_length() - 1
    outcomes = rng.choice(probs.size, size=shots, p=probs)
    if readout is not None:
        for q in range(n):
            bit = (outcomes >> q) & 1
            p_flip = np.where(bit == 1, readout[q, 1, 0], readout[q, 0, 1])
            flips = rng.random(shots) < p_flip
            outcomes = np.where(flips, outcomes ^ (1 << q), outcomes)
    return outcomes


def sample(s: QuantumState, shots: int, readout: np.ndarray | None = None,
           seed: int = 0) -> ShotCounts:
    """Measure all qubits `shots` times; deterministic for a fixed seed.

    `readout` is an optional (n, 2, 2) stack of per-qubit confusion matrices
    (see NoiseModel.confusion); each measured bit is flipped independently.
    """
    if shots < 1:
        raise ContractViolation("shots must be >= 1")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    outcomes = sample_indices(s.probabilities(), shots, rng, readout)
    n = s.n_qubits
    values, freq = np.unique(outcomes, return_counts=True)
    counts = {index_to_bits(int(v), n): int(c) for v, c in zip(values, freq)}
    return ShotCounts(counts, shots)


def expectation_from_counts(counts: ShotCounts, g: Graph, w: PenaltyWeights) -> float:
    """Shot estimate of <H>: count-weighted mean of the classical costs."""
    total = 0.0
    for z, c in counts.counts.items():
        total += c * classical_cost(g, w, z)
    return total / counts.shots


def apply_depolarizing(s: QuantumState, qubits, prob: float) -> QuantumState:
    """Replace the targets by the maximally mixed state with probability `prob`."""
    if s.kind != MIXED:
        raise ContractViolation("depolarizing acts on mixed states")
    if not 0.0 <= prob <= 1.0:
        raise ContractViolation("depolarizing probability must lie in [0, 1]")
    targets = (qubits,) if isinstance(qubits, int) else tuple(qubits)
    if len(targets) not in (1, 2):
        raise ContractViolation("depolarizing supports 1 or 2 target qubits")
    for q in targets:
        if not 0 <= q < s.n_qubits:
            raise ContractViolation(f"target qubit {q} outside [0, {s.n_qubits})")
    rho = np.array(s.data, dtype=np.complex128, copy=True, order="C")
    if len(targets) == 1:
        kernels.dm_depolarize_1q(rho, targets[0], prob)
    else:
        if targets[0] == targets[1]:
            raise ContractViolation("two-qubit depolarizing targets must be distinct")
        kernels.dm_depolarize_2q(rho, targets[0], targets[1], prob)
    return QuantumState(MIXED, rho)


def apply_thermal_relaxation(s: QuantumState, qubit: int, t1: float, t2: float,
                             duration: float) -> QuantumState:
    """Amplitude damping over `duration` composed with pure dephasing.

    Population transfer is 1 - exp(-duration/t1); the off-diagonal element
    decays by exp(-duration/t2) in total.  t1, t2, duration share one time
    unit.  Requires t2 <= 2*t1 (complete positivity).
    """
    if s.kind != MIXED:
        raise ContractViolation("thermal relaxation acts on mixed states")
    if duration < 0:
        raise ContractViolation("duration must be nonnegative")
    if t1 <= 0 or t2 <= 0:
        raise ContractViolation("t1 and t2 must be positive")
    if t2 > 2 * t1:
        raise ContractViolation("thermal relaxation requires t2 <= 2*t1")
    if not 0 <= qubit < s.n_qubits:
        raise ContractViolation(f"target qubit {qubit} outside [0, {s.n_qubits})")
    gad = 1.0 - math.exp(-duration / t1)
    decay = math.exp(-duration / t2)
    rho = np.array(s.data, dtype=np.complex128, copy=True, order="C")
    kernels.dm_thermal_1q(rho, qubit, gad, decay)
    return QuantumState(MIXED, rho)
