import os
import subprocess
import sys

import numpy as np
import pytest

from bnscore import _kernels_py, kernels

try:
    from bnscore import _kernels as compiled
except ImportError:
    compiled = None

needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def random_case(rng, n=4, m=500):
    cards = tuple(int(r) for r in rng.integers(2, 5, size=n))
    data = np.ascontiguousarray(np.column_stack([rng.integers(0, r, size=m) for r in cards]).astype(np.int64))
    return cards, data


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")


@needs_compiled
def test_config_counts_agree():
    rng = np.random.default_rng(0)
    for _ in range(20):
        cards, data = random_case(rng)
        variables = [int(v) for v in rng.permutation(4)[: rng.integers(1, 5)]]
        np.testing.assert_array_equal(
            compiled.config_counts(data, variables, cards), _kernels_py.config_counts(data, variables, cards)
        )


@needs_compiled
def test_config_counts_empty():
    data = np.zeros((0, 2), dtype=np.int64)
    np.testing.assert_array_equal(compiled.config_counts(data, [0, 1], (2, 3)), np.zeros(6, dtype=np.int64))


@needs_compiled
def test_lgamma_sums_agree():
    rng = np.random.default_rng(1)
    for _ in range(20):
        q, r = rng.integers(1, 10, size=2)
        alpha = rng.uniform(0.01, 5, size=(q, r))
        counts = rng.integers(0, 30, size=(q, r)).astype(np.int64)
        counts[rng.random((q, r)) < 0.3] = 0
        a = np.ascontiguousarray(alpha.ravel())
        c = np.ascontiguousarray(counts.ravel())
        assert compiled.lgamma_shift_sum(a, c) == pytest.approx(_kernels_py.lgamma_shift_sum(a, c), rel=1e-13, abs=1e-12)
        assert compiled.bde_family(alpha, counts) == pytest.approx(_kernels_py.bde_family(alpha, counts), rel=1e-13, abs=1e-12)


def test_pure_python_switch():
    code = "from bnscore import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, BNSCORE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
