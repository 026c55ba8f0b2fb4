import numpy as np
import pytest

from qaoa_mvc.circuits import QaoaParams, build_qaoa_circuit
from qaoa_mvc.graphs import Graph, enumerate_connected_graphs
from qaoa_mvc.hamiltonian import PenaltyWeights, build_ising
from qaoa_mvc.noise import NoiseModel
from qaoa_mvc.simulator import run_density_matrix, run_statevector


@pytest.fixture(scope="session")
def triangle():
    return Graph(3, ((0, 1), (0, 2), (1, 2)))


@pytest.fixture(scope="session")
def five_vertex_graphs():
    return enumerate_connected_graphs(5)


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # Trigger JIT compilation outside any timed test body.
    g = Graph(2, ((0, 1),))
    h = build_ising(g, PenaltyWeights())
    c = build_qaoa_circuit(h, QaoaParams((0.1,), (0.2,)))
    run_statevector(c)
    run_density_matrix(c, NoiseModel.default())


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))
