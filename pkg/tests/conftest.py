import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dwshell.stability import StateSpaceSystem


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_complex(rng, n, scale=1.0):
    return scale * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / math.sqrt(2 * n)


@pytest.fixture
def nilpotent():
    return np.array([[0.0, 1.0], [0.0, 0.0]])


@pytest.fixture
def example1_pair():
    a = np.diag([-1j, 1.0 + 0j])
    b = np.exp(-1j * 3 * math.pi / 4) * np.eye(2)
    return a, b


def example2_systems():
    """The two-by-two loop whose high-frequency limit is nilpotent.

    Entry-wise first-order realizations assembled into block MIMO form;
    G(0) = I, G(i inf) = [[0,1],[0,0]], H(0) = diag(1/3, 0),
    H(i inf) = [[0,0],[0.5,1]].
    """
    g = StateSpaceSystem(
        A=-np.eye(3),
        B=[[1.0, 0.0], [0.0, 1.0], [0.0, 1.0]],
        C=[[1.0, -1.0, 0.0], [0.0, 0.0, 1.0]],
        D=[[0.0, 1.0], [0.0, 0.0]],
        name="G",
    )
    h = StateSpaceSystem(
        A=np.diag([-3.0, -2.0, -1.0]),
        B=[[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        C=[[1.0, 0.0, 0.0], [0.0, -1.0, -1.0]],
        D=[[0.0, 0.0], [0.5, 1.0]],
        name="H",
    )
    return g, h


@pytest.fixture
def example2():
    return example2_systems()


def random_stable_system(rng, io_dim, state_dim, gain=1.0):
    """Random stable system normalized to a peak gain of roughly ``gain``."""
    a = rng.normal(size=(state_dim, state_dim))
    a = a - (np.max(np.linalg.eigvals(a).real) + rng.uniform(0.5, 1.5)) * np.eye(state_dim)
    b = rng.normal(size=(state_dim, io_dim))
    c = rng.normal(size=(io_dim, state_dim))
    d = rng.normal(size=(io_dim, io_dim)) * 0.3
    sys = StateSpaceSystem(a, b, c, d)
    from dwshell.stability import freq_response

    peak = max(np.linalg.norm(freq_response(sys, w), 2)
               for w in [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, math.inf])
    s = gain / max(peak, 1e-9)
    return StateSpaceSystem(a, b, s * c, s * d)
