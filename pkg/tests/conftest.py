import pytest

from qadic import _kernels


@pytest.fixture(params=_kernels.available_backends())
def backend(request):
    """Run the test once per kernel backend."""
    prev = _kernels.get_backend()
    _kernels.set_backend(request.param)
    yield request.param
    _kernels.set_backend(prev)
