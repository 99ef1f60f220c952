import os
import subprocess
import sys

import numpy as np
import pytest

from micropolar import _kernels

BACKENDS = _kernels.backends()


def _inputs(rng, n=16):
    shape = (n, n // 2 + 1)
    c = lambda: rng.standard_normal(shape) + 1j * rng.standard_normal(shape)  # noqa: E731
    r = lambda: rng.standard_normal(shape)  # noqa: E731
    ksq = rng.uniform(0, 50, shape)
    return c, r, ksq


@pytest.mark.skipif("compiled" not in BACKENDS, reason="compiled kernels not built")
def test_backends_agree(rng):
    py, cy = BACKENDS["python"], BACKENDS["compiled"]
    c, r, ksq = _inputs(rng)
    w, h = c(), c()
    e = [r() for _ in range(4)]
    for a, b in zip(py.apply_propagator(w, h, *e), cy.apply_propagator(w, h, *e)):
        np.testing.assert_allclose(a, b, rtol=1e-15, atol=1e-15)
    phys = [rng.standard_normal((16, 16)) for _ in range(6)]
    for a, b in zip(py.transport(*phys), cy.transport(*phys)):
        np.testing.assert_allclose(a, b, rtol=1e-15, atol=1e-15)
    inv = 1.0 / (ksq + 1.0)
    wt = np.full(ksq.shape, 2.0)
    np.testing.assert_allclose(py.quadratic_moments(w, h, ksq, inv, wt), cy.quadratic_moments(w, h, ksq, inv, wt),
                               rtol=1e-13)
    assert py.masked_sum(w, ksq, inv, wt, 20.0) == pytest.approx(cy.masked_sum(w, ksq, inv, wt, 20.0), rel=1e-13)


def test_python_moments_definition(rng):
    c, _, ksq = _inputs(rng, 8)
    w, h = c(), c()
    wt = np.ones(ksq.shape)
    inv = 1.0 / (1.0 + ksq)
    m = BACKENDS["python"].quadratic_moments(w, h, ksq, inv, wt)
    assert m[3] == pytest.approx(np.sum(np.abs(w) ** 2))
    assert m[4] == pytest.approx(np.sum(np.abs(h) ** 2))
    assert m[5] == pytest.approx(np.sum((w * np.conj(h)).real))
    assert m[0] == pytest.approx(np.sum(inv * np.abs(w) ** 2))
    assert m[7] == pytest.approx(np.sum(ksq * np.abs(h) ** 2))


def test_backend_selection_by_environment():
    code = "import micropolar._kernels as k; print(k.BACKEND)"
    env = dict(os.environ, MICROPOLAR_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    env["MICROPOLAR_BACKEND"] = "bogus"
    bad = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert bad.returncode != 0 and "MICROPOLAR_BACKEND" in bad.stderr
