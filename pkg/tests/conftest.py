import pytest

from flowtune import Aig, GenSpec, gen_random


def build_chain(n_inputs: int) -> Aig:
    """Left-deep AND chain: n_inputs-1 gates, depth n_inputs-1."""
    g = Aig(n_inputs)
    lits = g.input_literals()
    t = lits[0]
    for l in lits[1:]:
        t = g.add_and(t, l)
    g.outputs = [t]
    return g


def build_balanced_tree(n_inputs: int) -> Aig:
    """Complete binary AND tree over n_inputs (a power of two)."""
    g = Aig(n_inputs)
    layer = g.input_literals()
    while len(layer) > 1:
        layer = [g.add_and(layer[i], layer[i + 1])
                 for i in range(0, len(layer), 2)]
    g.outputs = [layer[0]]
    return g


def build_absorption() -> Aig:
    """AND(a, AND(a, b)): one redundant level above the inner gate."""
    g = Aig(2)
    a, b = g.input_literals()
    inner = g.add_and(a, b)
    g.outputs = [g.add_and(a, inner)]
    return g


@pytest.fixture
def chain8() -> Aig:
    return build_chain(8)


@pytest.fixture
def absorption() -> Aig:
    return build_absorption()


@pytest.fixture(scope="session")
def redundant_small() -> Aig:
    """Mid-size redundancy-injected circuit, exhaustively checkable."""
    return gen_random(GenSpec(12, 600, 8, 2024))
