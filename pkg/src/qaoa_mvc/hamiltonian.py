"""Diagonal Ising encoding of the minimum-vertex-cover cost function.

Cost of a bit string z (vertex i in the cover iff bit i is 1):

    cost(z) = a * (#edges with both endpoints outside the cover) + b * |cover|

Spin convention: bit 0 <-> spin +1 ("not in cover"), so substituting
x_i = (1 - z_i) / 2 into the cost yields

    constant        = a * |E| / 4 + b * n / 2
    linear[v]       = a * deg(v) / 4 - b / 2
    quadratic[(u,v)] = a / 4
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation
from .graphs import Graph

MAX_DIAGONAL_QUBITS = 20


@dataclass(frozen=True)
class PenaltyWeights:
    """Constraint penalty a and cover-size weight b; a > b > 0 keeps minimum
    covers as exact ground states."""

    a: float = 2.0
    b: float = 1.0

    def __post_init__(self):
        if not (self.a > self.b > 0):
            raise ContractViolation(f"penalty weights require a > b > 0, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class IsingHamiltonian:
    """Constant + single-spin + two-spin coefficients of a diagonal cost operator."""

    n_qubits: int
    constant: float
    linear: tuple[float, ...]
    quadratic: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.linear) != self.n_qubits:
            raise ContractViolation("linear coefficient count must equal n_qubits")
        for u, v in self.quadratic:
            if not (0 <= u < v < self.n_qubits):
                raise ContractViolation(f"quadratic key ({u}, {v}) must satisfy 0 <= u < v < n")


def classical_cost(g: Graph, w: PenaltyWeights, z: str) -> float:
    """Penalized cover cost of bit string z."""
    if len(z) != g.n_vertices:
        raise ContractViolation(f"bit string length {len(z)} does not match {g.n_vertices} vertices")
    if any(ch not in "01" for ch in z):
        raise ContractViolation(f"bit string must contain only 0/1, got {z!r}")
    violations = sum(1 for u, v in g.edges if z[u] == "0" and z[v] == "0")
    return w.a * violations + w.b * z.count("1")


def build_ising(g: Graph, w: PenaltyWeights) -> IsingHamiltonian:
    """Expand the penalized cover cost into Ising coefficients."""
    deg = g.degrees()
    constant = w.a * len(g.edges) / 4.0 + w.b * g.n_vertices / 2.0
    linear = tuple(w.a * int(d) / 4.0 - w.b / 2.0 for d in deg)
    quadratic = {(u, v): w.a / 4.0 for u, v in g.edges}
    return IsingHamiltonian(g.n_vertices, constant, linear, quadratic)


def diagonal(h: IsingHamiltonian) -> np.ndarray:
    """All 2^n eigenvalues, indexed by basis state (qubit i at bit i of the index)."""
    n = h.n_qubits
    if n > MAX_DIAGONAL_QUBITS:
        raise ContractViolation(f"diagonal limited to {MAX_DIAGONAL_QUBITS} qubits")
    idx = np.arange(1 << n, dtype=np.int64)
    out = np.full(idx.size, h.constant, dtype=np.float64)
    for i, coeff in enumerate(h.linear):
        if coeff != 0.0:
            out += coeff * (1 - 2 * ((idx >> i) & 1))
    for (u, v), coeff in h.quadratic.items():
        s = (1 - 2 * ((idx >> u) & 1)) * (1 - 2 * ((idx >> v) & 1))
        out += coeff * s
    return out
