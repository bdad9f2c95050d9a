import pytest

from erbp.data import load_mnist, mnist_available


@pytest.fixture(scope="session")
def mnist():
    if not mnist_available():
        pytest.skip("MNIST not found; set ERBP_DATA_DIR")
    return load_mnist()
