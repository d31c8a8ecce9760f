from functools import lru_cache

import pytest

from schrocex.bump import build_bump
from schrocex.counterexample import CounterexampleParams
from schrocex.omega import build_omega


@pytest.fixture(scope="session")
def profile():
    return build_bump()


@lru_cache(maxsize=None)
def omega_system(Q: int, k: int, n: int = 2):
    return build_omega(Q, n, k)


@lru_cache(maxsize=None)
def desk_params(k: int, n: int = 2, Q: int = 2048):
    return CounterexampleParams.desk(n, k, Q, 64 * Q, 64.0).check()
