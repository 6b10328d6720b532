import numpy as np
import pytest

from stopred import BinaryMatrix, golay_extended


@pytest.fixture(scope="session")
def golay():
    return golay_extended()


@pytest.fixture(scope="session")
def golay_dense(golay):
    return golay.H.to_dense().tolist()


def random_dense(rng, m, n, p=0.5):
    return (rng.random((m, n)) < p).astype(np.uint8).tolist()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def as_matrix(dense):
    return BinaryMatrix.from_dense(dense)
