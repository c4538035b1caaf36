"""Compiled and numpy backends must agree to rounding error."""
import subprocess
import sys

import numpy as np
import pytest

from qsteer import kernels
from qsteer.classical import random_strategy_batch
from qsteer.encoding import fourier_matrix
from qsteer.qstate import random_density
from qsteer.witness import projector_stack

compiled = pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="extension not built")


def random_epr_inputs(n, rng):
    alice = projector_stack(n, 2, offsets=[rng.normal(0, 0.1, 2 ** (m - 1)) for m in range(1, n + 1)])
    bob = projector_stack(n, 1)
    rho = np.stack([random_density(4, rng).data for _ in range(n)])
    return alice, bob, rho


@compiled
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_epr_table_parity(n):
    rng = np.random.default_rng(n)
    args = random_epr_inputs(n, rng)
    a = kernels.epr_table(*args, backend="cython")
    b = kernels.epr_table(*args, backend="python")
    np.testing.assert_allclose(a, b, atol=1e-14)
    assert a.sum() == pytest.approx(1.0, abs=1e-12)


@compiled
def test_product_table_parity():
    rng = np.random.default_rng(1)
    factors = rng.uniform(size=(4, 16, 16))
    np.testing.assert_allclose(
        kernels.product_table(factors, backend="cython"), kernels.product_table(factors, backend="python"), rtol=1e-14
    )


@compiled
@pytest.mark.parametrize("d", [2, 4, 8, 16])
def test_lhs_values_parity(d):
    rng = np.random.default_rng(d)
    w, a1, a2, resp = random_strategy_batch(d, 64, rng)
    F = fourier_matrix(d)
    np.testing.assert_allclose(
        kernels.lhs_values(w, a1, a2, resp, F, backend="cython"),
        kernels.lhs_values(w, a1, a2, resp, F, backend="python"),
        atol=1e-13,
    )


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get("fortran")


def test_fallback_selected_when_extension_missing():
    code = (
        "import sys; sys.modules['qsteer._kernels'] = None\n"
        "import qsteer\n"
        "assert qsteer.BACKEND == 'python', qsteer.BACKEND\n"
        "assert abs(qsteer.witness.exact_epr_kernel(8) - 2) < 1e-9\n"
    )
    subprocess.run([sys.executable, "-c", code], check=True)
