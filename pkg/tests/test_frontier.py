import os
import subprocess
import sys

import numpy as np
import pytest

from lmpbisim import _frontier_py, frontier


def _case(rng, dtype, rows=40, n=7, k=3):
    F = rng.integers(0, 50, size=(rows, n)).astype(dtype)
    F[rng.random(F.shape) < 0.4] = 0
    mats = rng.integers(0, 12, size=(k, n, n)).astype(dtype)
    return F, mats


@pytest.mark.skipif(not frontier.HAVE_EXTENSION, reason="compiled extension not built")
@pytest.mark.parametrize("dtype", [np.int64, np.float64])
def test_backends_agree(dtype):
    rng = np.random.default_rng(0)
    for _ in range(20):
        F, mats = _case(rng, dtype)
        R = np.ascontiguousarray(mats.sum(axis=2).T)
        assert np.array_equal(frontier.child_masses(F, R, True), frontier.child_masses(F, R, False))
        keep = rng.random(F.shape[0] * mats.shape[0]) < 0.5
        flat = np.nonzero(keep)[0]
        parents, acts = flat // mats.shape[0], flat % mats.shape[0]
        a = frontier.expand(F, mats, parents, acts, True)
        b = frontier.expand(F, mats, parents, acts, False)
        assert np.array_equal(a, b)


def test_pure_expand_matches_definition():
    rng = np.random.default_rng(1)
    F, mats = _case(rng, np.int64, rows=5)
    parents = np.array([0, 0, 3, 4])
    acts = np.array([2, 0, 1, 1])
    out = _frontier_py.expand(F, mats, parents, acts)
    for r, (p, a) in enumerate(zip(parents, acts)):
        assert np.array_equal(out[r], F[p] @ mats[a])


def test_object_arrays_use_numpy_path():
    F = np.array([[2**70, 1]], dtype=object)
    R = np.array([[1], [2]], dtype=object)
    assert frontier.child_masses(F, R)[0, 0] == 2**70 + 2


def test_env_forces_pure_backend():
    code = "import lmpbisim.frontier as f; print(f.backend_name())"
    env = dict(os.environ, LMPBISIM_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
