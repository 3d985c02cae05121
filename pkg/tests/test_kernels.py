import os
import subprocess
import sys

import numpy as np
import pytest

from stpipe import kernels
from stpipe._accel import HAVE_NUMBA


@pytest.mark.parametrize("m, n", [(0, 0), (0, 5), (4, 0), (7, 9), (30, 25)])
def test_levenshtein_forms_agree(m, n):
    rng = np.random.default_rng(m * 100 + n)
    a = rng.integers(0, 4, m)
    b = rng.integers(0, 4, n)
    assert np.array_equal(kernels.lev_table_loops(a, b), kernels.lev_table_numpy(a, b))


def test_em_forms_agree():
    rng = np.random.default_rng(0)
    n_pairs, n_rows = 40, 25
    row_ids = np.repeat(np.arange(n_rows), 3)
    pair_ids = rng.integers(0, n_pairs, row_ids.size)
    t = rng.uniform(0.01, 1.0, n_pairs)
    c1, l1 = kernels.em_estep_loops(t, pair_ids, row_ids, n_rows, n_pairs, 1.5)
    c2, l2 = kernels.em_estep_numpy(t, pair_ids, row_ids, n_rows, n_pairs, 1.5)
    np.testing.assert_allclose(c1, c2, rtol=1e-12)
    assert l1 == pytest.approx(l2, rel=1e-12)


def test_logloss_forms_agree():
    rng = np.random.default_rng(1)
    w = rng.normal(size=12)
    feat_ptr = np.arange(0, 31, 3)
    feat_idx = rng.integers(0, 12, 30)
    y = rng.integers(0, 2, 10).astype(float)
    assert kernels.logloss_loops(w, 0.3, feat_idx, feat_ptr, y) == pytest.approx(
        kernels.logloss_numpy(w, 0.3, feat_idx, feat_ptr, y), rel=1e-12)


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not active")
def test_compiled_matches_python_source():
    rng = np.random.default_rng(2)
    gain = rng.normal(size=15)
    b1, ok1 = kernels.segment_dp(gain, 15, 2, 5, False)
    b2, ok2 = kernels.segment_dp.py_func(gain, 15, 2, 5, False)
    assert ok1 == ok2 and np.array_equal(b1, b2)


def test_disable_flag_selects_numpy_path():
    env = dict(os.environ, STPIPE_DISABLE_NUMBA="1")
    code = ("import stpipe, stpipe.kernels as k; from stpipe.metrics import mwer_resegment;"
            "assert stpipe.backend() == 'numpy';"
            "assert k.levenshtein_table is k.lev_table_numpy;"
            "print(mwer_resegment('a x c'.split(), [['a','b'],['c']]))")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "([['a', 'x'], ['c']], 1)"
