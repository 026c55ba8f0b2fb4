"""Objective functions over the 2p angles and their gradients.

The parameter-shift rule here is exact: every RZ/RZZ/RX gate is exp(-i theta
P/2) with P^2 = I, so d<H>/d(theta_gate) = [F(theta_gate + pi/2) -
F(theta_gate - pi/2)] / 2.  A layer parameter shared by several gates sums the
per-gate results weighted by each gate's angle coefficient (chain rule).  Each
shifted evaluation is one full circuit execution on the objective's backend.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .circuits import QaoaParams, build_qaoa_template
from .errors import ContractViolation
from .graphs import Graph
from .hamiltonian import PenaltyWeights, build_ising, diagonal
from .noise import NoiseModel
from .simulator import MAX_DENSITY_QUBITS, MAX_STATEVECTOR_QUBITS, sample_indices

STATEVECTOR = "statevector"
SHOTS = "shots"
NOISY = "noisy"
BACKENDS = (STATEVECTOR, SHOTS, NOISY)

# Central-difference steps: exact backend vs shot backends, where the noise
# floor dominates below ~0.05.
FD_STEP_EXACT = 1e-5
FD_STEP_SHOTS = 0.05

_ZERO_NOISE_KEYS = ("p1q", "gad1", "f1", "p2", "gad2", "f2")


class Objective:
    """Expectation of the cover Hamiltonian as a callable of the 2p angles.

    Calling it with identical parameters at the same evaluation index is
    bit-reproducible per backend: shot draws are seeded from (seed, index),
    and the index advances by one per circuit execution, so a rerun of the
    same call sequence reproduces the same values.
    """

    def __init__(self, graph: Graph, weights: PenaltyWeights, depth: int, backend: str,
                 shots: int = 10000, seed: int = 0, noise: NoiseModel | None = None):
        if backend not in BACKENDS:
            raise ContractViolation(f"backend must be one of {BACKENDS}, got {backend!r}")
        if backend != STATEVECTOR and shots < 1:
            raise ContractViolation("shot backends need shots >= 1")
        if backend == NOISY and graph.n_vertices > MAX_DENSITY_QUBITS:
            raise ContractViolation(f"noisy backend limited to {MAX_DENSITY_QUBITS} qubits")
        if graph.n_vertices > MAX_STATEVECTOR_QUBITS:
            raise ContractViolation(f"objectives limited to {MAX_STATEVECTOR_QUBITS} qubits")
        self.graph = graph
        self.weights = weights
        self.depth = depth
        self.backend = backend
        self.shots = shots
        self.seed = seed
        self.noise = noise if noise is not None else (NoiseModel.default() if backend == NOISY else None)
        self.hamiltonian = build_ising(graph, weights)
        self.costs = diagonal(self.hamiltonian)
        self.template = build_qaoa_template(self.hamiltonian, depth)
        self.evaluations = 0
        n = graph.n_vertices
        if backend == NOISY:
            ch = self.noise.channel_arrays(n)
            self._channels = tuple(ch[k] for k in _ZERO_NOISE_KEYS)
            self._readout = self.noise.confusion(n)
        else:
            self._channels = None
            self._readout = None

    @property
    def dim(self) -> int:
        return self.template.n_params

    def __call__(self, x) -> float:
        return self.evaluate_thetas(self.template.thetas(np.asarray(x, dtype=float)))

    def evaluate_thetas(self, thetas: np.ndarray) -> float:
        """One circuit execution with explicit per-gate angles; advances the counter."""
        self.evaluations += 1
        probs = self._probs(thetas)
        if self.backend == STATEVECTOR:
            return float(probs @ self.costs)
        rng = self._rng(self.evaluations)
        outcomes = sample_indices(probs, self.shots, rng, self._readout)
        return float(np.mean(self.costs[outcomes]))

    def exact_expectation(self, x) -> float:
        """Shot-free expectation: exact pure state, or the channel-exact mixed state."""
        probs = self._probs(self.template.thetas(np.asarray(x, dtype=float)))
        return float(probs @ self.costs)

    def state_probs(self, x) -> np.ndarray:
        """Exact outcome distribution of the final state (no readout errors)."""
        return self._probs(self.template.thetas(np.asarray(x, dtype=float)))

    def sample_outcomes(self, x, shots: int, seed: int) -> np.ndarray:
        """Measured basis indices at parameters x, with readout errors on the noisy backend."""
        probs = self._probs(self.template.thetas(np.asarray(x, dtype=float)))
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        return sample_indices(probs, shots, rng, self._readout)

    def _probs(self, thetas: np.ndarray) -> np.ndarray:
        tpl = self.template
        if self.backend == NOISY:
            rho = kernels.dm_run(tpl.n_qubits, tpl.kinds, tpl.qa, tpl.qb, thetas, *self._channels)
            p = np.clip(np.real(np.diag(rho)), 0.0, None)
            return p / p.sum()
        psi = kernels.sv_run(tpl.n_qubits, tpl.kinds, tpl.qa, tpl.qb, thetas)
        p = np.abs(psi) ** 2
        return p / p.sum()

    def _rng(self, index: int) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence((self.seed, index))))


def _as_vector(params) -> np.ndarray:
    if isinstance(params, QaoaParams):
        return params.to_vector()
    return np.asarray(params, dtype=float).ravel()


def parameter_shift_grad(obj: Objective, params) -> np.ndarray:
    """Gradient of the objective with respect to all 2p parameters.

    Costs 2 * (non-Hadamard gate count) circuit executions; shifted runs on
    shot backends draw fresh shots (seeds advance with the evaluation index).
    """
    x = _as_vector(params)
    tpl = obj.template
    base = tpl.thetas(x)
    grad = np.zeros(tpl.n_params, dtype=float)
    half_pi = 0.5 * math.pi
    for g in range(tpl.kinds.size):
        slot = int(tpl.slots[g])
        if slot < 0:
            continue
        shifted = base.copy()
        shifted[g] = base[g] + half_pi
        f_plus = obj.evaluate_thetas(shifted)
        shifted[g] = base[g] - half_pi
        f_minus = obj.evaluate_thetas(shifted)
        grad[slot] += 0.5 * tpl.coeffs[g] * (f_plus - f_minus)
    return grad


def finite_difference_grad(obj, params, h: float = FD_STEP_EXACT) -> np.ndarray:
    """Central differences (F(x+h) - F(x-h)) / 2h per parameter.

    `obj` may be any callable of a parameter vector; this is the independent
    check against the parameter-shift rule.
    """
    if h <= 0:
        raise ContractViolation("finite-difference step must be positive")
    x = _as_vector(params).copy()
    grad = np.zeros(x.size, dtype=float)
    for i in range(x.size):
        orig = x[i]
        x[i] = orig + h
        f_plus = obj(x)
        x[i] = orig - h
        f_minus = obj(x)
        x[i] = orig
        grad[i] = (f_plus - f_minus) / (2.0 * h)
    return grad


def make_parameter_shift(obj: Objective):
    """Gradient callable for the optimizers; carries its true circuit cost."""

    def grad_fn(x):
        return parameter_shift_grad(obj, x)

    grad_fn.cost_per_call = 2 * obj.template.n_shiftable
    return grad_fn


def make_finite_difference(obj, dim: int, h: float | None = None):
    """Finite-difference gradient callable; step defaults per backend noise floor."""
    if h is None:
        backend = getattr(obj, "backend", STATEVECTOR)
        h = FD_STEP_EXACT if backend == STATEVECTOR else FD_STEP_SHOTS
    step = h

    def grad_fn(x):
        return finite_difference_grad(obj, x, step)

    grad_fn.cost_per_call = 2 * dim
    return grad_fn
