import functools

import pytest

from stokes_rabi.pipeline import analyze


@functools.lru_cache(maxsize=None)
def _analysis(coeffs):
    return analyze(coeffs)


@pytest.fixture(scope="session")
def analysis():
    """Memoised full analysis keyed by coefficients, shared across test modules."""
    return _analysis
