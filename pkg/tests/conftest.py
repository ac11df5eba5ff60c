import mpmath
import pytest


@pytest.fixture(autouse=True)
def _restore_mp_precision():
    # the CLI entry point sets the global mpmath precision; keep tests independent of order
    dps = mpmath.mp.dps
    yield
    mpmath.mp.dps = dps
