import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from schrocex.modular import (
    discrete_logs,
    factorize_small,
    is_prime,
    mod_inverse,
    mod_pow,
    power_table,
    prime_window,
    primes_in_range,
    primitive_root,
)


def test_is_prime_matches_sympy_below_20000():
    mine = [n for n in range(20000) if is_prime(n)]
    assert mine == list(sympy.primerange(0, 20000))


@pytest.mark.parametrize("n", [2**61 - 1, 3215031751, 2152302898747, 341550071728321, 3825123056546413051])
def test_is_prime_large_and_strong_pseudoprimes(n):
    assert is_prime(n) == sympy.isprime(n)


@given(st.integers(min_value=0, max_value=10**18))
@settings(max_examples=300)
def test_is_prime_property(n):
    assert is_prime(n) == sympy.isprime(n)


def test_primes_in_range_sieve_and_fallback_agree():
    assert primes_in_range(1000, 1100) == list(sympy.primerange(1000, 1101))
    assert primes_in_range(10, 5) == []


@given(st.integers(2, 10**6), st.integers(0, 10**6), st.integers(2, 10**6))
def test_mod_pow_matches_builtin(b, e, q):
    assert mod_pow(b, e, q) == pow(b, e, q)


@given(st.sampled_from(list(sympy.primerange(3, 2000))), st.integers(1, 10**9))
def test_mod_inverse_property(q, a):
    if a % q == 0:
        with pytest.raises(ValueError):
            mod_inverse(a, q)
    else:
        assert a * mod_inverse(a, q) % q == 1


def test_mod_pow_rejects_bad_input():
    with pytest.raises(ValueError):
        mod_pow(2, -1, 7)
    with pytest.raises(ValueError):
        mod_pow(2, 3, 0)


@pytest.mark.parametrize("q", [3, 5, 7, 101, 1999, 2003, 16381])
def test_primitive_root_and_logs(q):
    g = primitive_root(q)
    assert g == sympy.primitive_root(q)
    g2, logs = discrete_logs(q)
    a = np.arange(1, q)
    assert np.all(np.array([pow(g2, int(e), q) for e in logs[1:]]) == a)
    assert len(set(power_table(g, q).tolist())) == q - 1


def test_factorize_small():
    assert factorize_small(2 * 2 * 3 * 7 * 7 * 101) == [2, 3, 7, 101]
    assert factorize_small(97) == [97]


@pytest.mark.parametrize("Q", [2048, 4096, 16384])
def test_prime_window_density(Q):
    w = prime_window(Q)
    assert w.primes == tuple(sympy.primerange(math.ceil(Q / 2), Q + 1))
    assert w.dense and w.count >= Q / (4 * math.log(Q))
