import os
import subprocess
import sys

import numpy as np
import pytest

from bohrfact import _backend, _pycore

try:
    from bohrfact import _core
except ImportError:
    _core = None

needs_core = pytest.mark.skipif(_core is None, reason="compiled extension not built")
BACKENDS = [pytest.param(_pycore, id="python"), pytest.param(_core, id="cython", marks=needs_core)]


def _arrays(rng, n, box):
    return (rng.integers(-box, box + 1, n), rng.integers(-box, box + 1, n),
            rng.standard_normal(n) + 1j * rng.standard_normal(n))


def _dense_oracle(a, b):
    out = {}
    for j1, k1, c1 in zip(*a):
        for j2, k2, c2 in zip(*b):
            key = (int(j1 + j2), int(k1 + k2))
            out[key] = out.get(key, 0) + c1 * c2
    return out


@pytest.mark.parametrize("mod", BACKENDS)
@pytest.mark.parametrize("box", [3, 40, 10**7])
def test_cauchy_product_matches_double_loop(mod, box, rng):
    a, b = _arrays(rng, 17, box), _arrays(rng, 11, box)
    j, k, c = mod.cauchy_product(*a, *b)
    oracle = _dense_oracle(a, b)
    assert list(zip(j.tolist(), k.tolist())) == sorted(oracle)
    assert np.allclose(c, [oracle[key] for key in sorted(oracle)], atol=1e-12)


@pytest.mark.parametrize("mod", BACKENDS)
def test_cauchy_product_empty(mod):
    e = (np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0, complex))
    j, k, c = mod.cauchy_product(*e, np.array([1]), np.array([1]), np.array([1 + 0j]))
    assert len(j) == len(k) == len(c) == 0


@pytest.mark.parametrize("mod", BACKENDS)
@pytest.mark.parametrize("kind", [0, 1, 2, 3])
def test_kernel_modulus_matches_series(mod, kind):
    N = 7
    x = np.linspace(0.013, 0.987, 301)
    e = lambda j: np.exp(2j * np.pi * j * x)
    if kind == 0:
        series = sum(e(j) for j in range(-N, N + 1))
    elif kind == 1:
        series = sum(e(j) - e(-j) for j in range(1, N + 1))
    elif kind == 2:
        series = 0.5 + sum(e(j) for j in range(1, N + 1))
    else:
        series = 1 + sum(e(j) for j in range(1, N + 1))
    assert np.allclose(mod.kernel_modulus(kind, N, x), np.abs(series), atol=1e-9)


@pytest.mark.parametrize("mod", BACKENDS)
def test_kernel_abs_integral_small_cases(mod):
    assert mod.kernel_abs_integral(0, 0, 1e-8)[0] == pytest.approx(1)
    assert mod.kernel_abs_integral(3, 0, 1e-8)[0] == pytest.approx(1)
    assert mod.kernel_abs_integral(1, 0, 1e-8)[0] == pytest.approx(0)
    # D_1 = 1 + 2 cos 2 pi x: |D_1| integrates to 1/3 + 2 sqrt(3)/pi
    val, err = mod.kernel_abs_integral(0, 1, 1e-10)
    assert val == pytest.approx(1 / 3 + 2 * np.sqrt(3) / np.pi, abs=1e-9)
    assert err <= 1e-10


@needs_core
@pytest.mark.parametrize("kind", [0, 1, 2, 3])
@pytest.mark.parametrize("N", [1, 5, 64, 255])
def test_backends_agree_on_integrals(kind, N):
    a = _pycore.kernel_abs_integral(kind, N, 1e-8)[0]
    b = _core.kernel_abs_integral(kind, N, 1e-8)[0]
    assert a == pytest.approx(b, abs=1e-9)


def test_env_var_forces_python_backend():
    env = dict(os.environ, BOHRFACT_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", "from bohrfact import _backend; print(_backend.NAME)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_default_backend_name():
    assert _backend.NAME in ("python", "cython")
    if _core is not None and os.environ.get("BOHRFACT_BACKEND", "") != "python":
        assert _backend.NAME == "cython"
