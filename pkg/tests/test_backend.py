import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from fracdo import _backend


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8, 0.999])
@pytest.mark.parametrize("kind", _backend.KINDS)
def test_backends_agree(alpha, kind):
    impls = _backend.implementations()
    if "cython" not in impls:
        pytest.skip("compiled core not built")
    x = np.geomspace(0.6, 200.0, 64)
    m1, s1 = impls["python"].wright_family(alpha, kind, x, 1e-13)
    m2, s2 = impls["cython"].wright_family(alpha, kind, x, 1e-13)
    ok = np.isfinite(s1)
    assert np.array_equal(ok, np.isfinite(s2))
    # the value is m exp(s); compare it in log form since |s| can reach 1e300
    assert np.array_equal(np.sign(m1[ok]), np.sign(m2[ok]))
    with np.errstate(divide="ignore"):
        l1, l2 = np.log(np.abs(m1[ok])) + s1[ok], np.log(np.abs(m2[ok])) + s2[ok]
    assert_allclose(l1, l2, rtol=1e-12, atol=1e-10)


def test_env_forces_fallback():
    env = dict(os.environ, FRACDO_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from fracdo import _backend; print(_backend.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_backend_name():
    assert _backend.BACKEND in ("cython", "python")
    assert set(_backend.implementations()) >= {"python"}
