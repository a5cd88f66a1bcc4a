import numpy as np
import pytest

from stripcavity import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jitted kernels once so timed tests measure work, not JIT."""
    n = np.array([1.5 - 0.5j], dtype=np.complex128)
    d = np.array([10.0])
    _kernels.chain_product(n, d, 0.004)
    _kernels.chain_sweep(n, d, 0, np.array([5.0, 6.0]), 0.004)
