import os
import subprocess
import sys

import numpy as np
import pytest

from charlab import _fallback, arith, kernels

compiled = pytest.importorskip("charlab._kernels")


def values_at_primes(x, seed):
    rng = np.random.default_rng(seed)
    pv = np.zeros(x + 1, dtype=np.complex128)
    ps = arith.primes_up_to(x)
    pv[ps] = np.exp(2j * np.pi * rng.integers(0, 12, len(ps)) / 12)
    return pv


def test_backend_selected():
    assert kernels.BACKEND == "compiled"


def test_pure_env_forces_fallback():
    env = dict(os.environ, CHARLAB_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import charlab.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("n", [0, 1, 2, 30, 1000, 65537])
def test_spf(n):
    a, b = compiled.spf_sieve(n), _fallback.spf_sieve(n)
    assert np.array_equal(np.asarray(a), b)
    if n >= 30:
        assert b[30] == 2 and b[29] == 29 and b[25] == 5


@pytest.mark.parametrize("x", [1, 2, 100, 5000])
def test_multiplicative_extension_and_convolutions(x):
    pv = values_at_primes(x, x)
    spf = _fallback.spf_sieve(x)
    f1 = np.asarray(compiled.extend_multiplicative(pv, spf, x))
    f2 = _fallback.extend_multiplicative(pv, spf, x)
    assert np.allclose(f1, f2, atol=1e-13)
    h1, h2 = np.asarray(compiled.divisor_sum(f1)), _fallback.divisor_sum(f2)
    assert np.allclose(h1, h2, atol=1e-11)
    g1, g2 = np.asarray(compiled.convolve_conj(h1)), _fallback.convolve_conj(h2)
    assert np.allclose(g1, g2, atol=1e-9)


def test_cumsum_and_distance_grid():
    rng = np.random.default_rng(1)
    v = np.exp(2j * np.pi * rng.random(10**5))
    assert np.allclose(compiled.kahan_cumsum(v), _fallback.kahan_cumsum(v), atol=1e-10)
    ps = arith.primes_up_to(10**4).astype(float)
    re, im = np.cos(ps), np.sin(ps)
    ts = np.linspace(-3, 3, 101)
    args = (np.log(ps), 1 / ps, np.ascontiguousarray(re), np.ascontiguousarray(im), ts)
    assert np.allclose(compiled.distance_grid(*args), _fallback.distance_grid(*args), atol=1e-12)
