"""Pure-numpy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def epr_table(alice, bob, rho):
    n = rho.shape[0]
    cells = np.einsum("nkab,nlce,nbeac->nkl", alice, bob, rho.reshape(n, 2, 2, 2, 2))
    return np.prod(cells.real, axis=0)


def product_table(factors):
    return np.prod(factors, axis=0)


def lhs_values(weights, first, second, responses, fourier):
    S, L = weights.shape
    s_idx = np.arange(S)[:, None]
    j_idx = np.arange(L)[None, :]
    comp = responses[s_idx, j_idx, first, first].real
    f = fourier[:, second]  # (D, S, L)
    four = np.einsum("psl,slpq,qsl->sl", f.conj(), responses, f).real
    return np.sum(weights * (comp + four), axis=1)
