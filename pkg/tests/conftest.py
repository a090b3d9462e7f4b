import numpy as np
import pytest

from qmetro.channel import SZ, phase_encode, random_hermitian, random_kraus
from qmetro.models import MODELS, ModelSpec, build


def random_channel(rng, d_in=None, d_out=None, k=None, kind="generic"):
    """Random phase-encoded channel.

    kind="generic" draws a Stinespring isometry (phi-extremal unless full rank),
    kind="full" forces k = d_in*d_out, kind="diagonal" gives commuting diagonal
    Kraus operators with a diagonal generator (rank-deficient but phi-nonextremal).
    """
    d_in = d_in or int(rng.integers(2, 4))
    d_out = d_out or int(rng.integers(2, 4))
    if kind == "diagonal":
        V = rng.standard_normal((d_in, d_in)) + 1j * rng.standard_normal((d_in, d_in))
        V /= np.linalg.norm(V, axis=0)
        K = np.array([np.diag(row) for row in V])
        G = np.diag(rng.standard_normal(d_in))
        return phase_encode(K, G, rng.uniform(-np.pi, np.pi))
    if kind == "full":
        k = d_in * d_out
    k = k or int(rng.integers(-(-d_in // d_out), d_in * d_out + 1))
    K = random_kraus(d_in, d_out, k, rng)
    return phase_encode(K, random_hermitian(d_in, rng), rng.uniform(-np.pi, np.pi))


@pytest.fixture
def rng():
    return np.random.default_rng(20120924)


@pytest.fixture
def unitary_channel():
    return phase_encode([np.eye(2)], SZ / 2, 0.0)


@pytest.fixture(params=MODELS)
def model_name(request):
    return request.param


def model(name, eta, phi0=0.0):
    return build(ModelSpec(name, eta), phi0)
