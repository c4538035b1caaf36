"""Local-hidden-state (LHS) mimicry of the steering witness.

A hidden variable is the pair of outcomes ``(a1, a2)`` Alice will announce for
the two settings, together with the state ``rho`` that Bob ends up holding.
Such a strategy scores

    sum_lambda P(lambda) (<a1|rho|a1> + <f_a2|rho|f_a2>),

where ``|f_n>`` are the Fourier vectors. No strategy scores above
``1 + 1/sqrt(d)``; this module evaluates strategies, computes the bound from
eigenvalues, and searches numerically for the best strategy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .encoding import fourier_matrix
from .qstate import ATOL, DensityMatrix


@dataclass(frozen=True, eq=False)
class LhsStrategy:
    """Distribution over declared outcome pairs with one response state each.

    ``pairs[j] = (a1, a2)``, ``weights[j] = P(lambda_j)`` and ``responses[j]``
    is the d x d state Bob holds for that hidden variable.
    """

    pairs: tuple
    weights: np.ndarray
    responses: tuple

    def __post_init__(self):
        pairs = tuple((int(a1), int(a2)) for a1, a2 in self.pairs)
        w = np.asarray(self.weights, dtype=float)
        resp = tuple(r if isinstance(r, DensityMatrix) else DensityMatrix(r) for r in self.responses)
        if not (len(pairs) == len(w) == len(resp)) or not pairs:
            raise ValueError("pairs, weights and responses must be non-empty and equally long")
        if w.min() < 0 or abs(w.sum() - 1) > ATOL:
            raise ValueError("weights must be a probability distribution")
        d = resp[0].dim
        if any(r.dim != d for r in resp) or any(not (0 <= a < d and 0 <= b < d) for a, b in pairs):
            raise ValueError("responses and declared outcomes must share one dimension")
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "responses", resp)

    @property
    def d(self) -> int:
        return self.responses[0].dim

    def p_alice(self, setting: int) -> np.ndarray:
        """P(a_i) for setting ``i``."""
        p = np.zeros(self.d)
        for (a1, a2), w in zip(self.pairs, self.weights):
            p[a1 if setting == 1 else a2] += w
        return p

    def p_lambda_given(self, setting: int, a: int) -> np.ndarray:
        """P(lambda | a_i = a) over the strategy's hidden variables."""
        idx = 0 if setting == 1 else 1
        mask = np.array([pair[idx] == a for pair in self.pairs])
        total = self.weights[mask].sum()
        if total == 0:
            return np.zeros(len(self.pairs))
        return np.where(mask, self.weights, 0.0) / total

    @classmethod
    def deterministic(cls, a1: int, a2: int, state) -> "LhsStrategy":
        psi = np.asarray(getattr(state, "data", state), dtype=complex)
        rho = np.outer(psi, psi.conj()) if psi.ndim == 1 else psi
        return cls(((a1, a2),), np.ones(1), (DensityMatrix(rho),))


def lhs_kernel_value(strategy: LhsStrategy, d: int | None = None) -> float:
    """Witness kernel reached by ``strategy``, summed over settings and outcomes."""
    d = strategy.d if d is None else d
    if d != strategy.d:
        raise ValueError(f"strategy is {strategy.d}-dimensional, expected {d}")
    F = fourier_matrix(d)
    basis = {1: np.eye(d), 2: F}
    total = 0.0
    for setting in (1, 2):
        pa = strategy.p_alice(setting)
        vecs = basis[setting]
        for a in range(d):
            if pa[a] == 0:
                continue
            cond = strategy.p_lambda_given(setting, a)
            v = vecs[:, a]
            for w, rho in zip(cond, strategy.responses):
                if w:
                    total += np.vdot(v, rho.data @ v).real * w * pa[a]
    return float(total)


def lhs_values_batch(weights, first, second, responses, backend=None) -> np.ndarray:
    """Kernel values for many strategies at once.

    Arrays are shaped ``(S, L)`` for ``weights``/``first``/``second`` and
    ``(S, L, d, d)`` for ``responses``.
    """
    d = responses.shape[-1]
    return kernels.lhs_values(weights, first, second, responses, fourier_matrix(d), backend=backend)


def projector_sum(d: int, m: int, n: int) -> np.ndarray:
    """|m><m| + |f_n><f_n|."""
    f = fourier_matrix(d)[:, n]
    P = np.zeros((d, d), dtype=complex)
    P[m, m] = 1.0
    return P + np.outer(f, f.conj())


EXHAUSTIVE_MAX_DIM = 32


def lhs_bound_exact(d: int, exhaustive: bool | None = None) -> float:
    """Max over (m, n) of the top eigenvalue of |m><m| + |f_n><f_n|.

    The shift X|j> = |j+1> fixes every |f_n> up to phase and the clock
    Z|j> = w^j|j> moves |f_n> to |f_{n+1}>, so all (m, n) give unitarily
    equivalent operators. Above ``EXHAUSTIVE_MAX_DIM`` only m = 0 is scanned
    unless ``exhaustive`` is set.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if exhaustive is None:
        exhaustive = d <= EXHAUSTIVE_MAX_DIM
    F = fourier_matrix(d)
    four = np.einsum("in,jn->nij", F, F.conj())
    best = -np.inf
    for m in range(d if exhaustive else 1):
        ops = four.copy()
        ops[:, m, m] += 1.0
        best = max(best, float(np.linalg.eigvalsh(ops)[:, -1].max()))
    return best


def optimal_strategy(d: int, m: int = 0, n: int = 0) -> LhsStrategy:
    """Always announce (m, n) and hand Bob the top eigenvector of the projector sum."""
    P = projector_sum(d, m, n)
    _, vecs = np.linalg.eigh(P)
    return LhsStrategy.deterministic(m, n, vecs[:, -1])


def unsteerable_state(strategy: LhsStrategy) -> DensityMatrix:
    """Bob's average state sum_a P(a) sum_lambda P(lambda|a) rho_lambda."""
    pa = strategy.p_alice(1)
    rho = np.zeros((strategy.d, strategy.d), dtype=complex)
    for a in range(strategy.d):
        if pa[a] == 0:
            continue
        for w, r in zip(strategy.p_lambda_given(1, a), strategy.responses):
            rho += pa[a] * w * r.data
    return DensityMatrix(rho)


def _magnitudes(theta: np.ndarray) -> np.ndarray:
    """Hyperspherical coordinates; works row-wise on a 2-d array of angle sets."""
    theta = np.atleast_2d(theta)
    ones = np.ones((theta.shape[0], 1))
    sin_prefix = np.concatenate([ones, np.cumprod(np.sin(theta), axis=1)], axis=1)
    return sin_prefix * np.concatenate([np.cos(theta), ones], axis=1)


def angles_to_state(params: np.ndarray, d: int) -> np.ndarray:
    """Pure state from d-1 hyperspherical angles and d-1 relative phases."""
    theta, phi = params[: d - 1], params[d - 1 :]
    return _magnitudes(theta)[0] * np.exp(1j * np.concatenate(([0.0], phi)))


def _state_jacobian(params: np.ndarray, d: int) -> np.ndarray:
    """d psi / d params, shape (d, 2(d-1))."""
    theta, phi = params[: d - 1], params[d - 1 :]
    phase = np.exp(1j * np.concatenate(([0.0], phi)))
    # a quarter-period shift of theta_i differentiates every factor that contains it
    shifted = theta[None, :] + (np.pi / 2) * np.eye(d - 1)
    dmag = np.triu(_magnitudes(shifted), k=0)
    jac = np.zeros((d, 2 * (d - 1)), dtype=complex)
    jac[:, : d - 1] = (dmag * phase).T
    psi = _magnitudes(theta)[0] * phase
    jac[np.arange(1, d), np.arange(d - 1, 2 * (d - 1))] = 1j * psi[1:]
    return jac


@dataclass(frozen=True)
class SearchResult:
    value: float
    strategy: LhsStrategy
    restart: int
    values: tuple


def lhs_search(d: int, restarts: int = 32, seed: int = 0) -> SearchResult:
    """Random-restart gradient ascent over pure deterministic strategies.

    Each restart draws its announced pair (m, n) and starting angles from a
    stream keyed by ``(seed, restart)``, so the result is reproducible and
    independent of evaluation order. Ties go to the lowest restart index.
    """
    if restarts < 1:
        raise ValueError("need at least one restart")
    F = fourier_matrix(d)
    values = []
    best = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        m, n = (int(x) for x in rng.integers(0, d, size=2))
        f = F[:, n]

        P = np.outer(f, f.conj())
        P[m, m] += 1.0

        def neg_score(x):
            psi = angles_to_state(x, d)
            Ppsi = P @ psi
            grad = 2 * (Ppsi.conj() @ _state_jacobian(x, d)).real
            return -np.vdot(psi, Ppsi).real, -grad

        x0 = rng.uniform(0, 2 * np.pi, size=2 * (d - 1))
        res = minimize(neg_score, x0, jac=True, method="BFGS", options={"gtol": 1e-10, "maxiter": 2000})
        value = -float(res.fun)
        values.append(value)
        if best is None or value > best[0]:
            best = (value, r, m, n, angles_to_state(res.x, d))
    value, r, m, n, psi = best
    return SearchResult(value, LhsStrategy.deterministic(m, n, psi), r, tuple(values))


def random_strategy_batch(d: int, count: int, rng: np.random.Generator, support: int = 3):
    """Random strategies as arrays for :func:`lhs_values_batch`.

    A third of the responses are random mixed states, a third random pure
    states, and a third perturbations of the optimal response for the
    announced pair, which probes the region closest to the bound.
    """
    weights = rng.dirichlet(np.ones(support), size=count)
    first = rng.integers(0, d, size=(count, support))
    second = rng.integers(0, d, size=(count, support))
    responses = np.empty((count, support, d, d), dtype=complex)
    F = fourier_matrix(d)
    for s in range(count):
        for j in range(support):
            kind = rng.integers(3)
            if kind == 0:
                g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
                rho = g @ g.conj().T
                responses[s, j] = rho / np.trace(rho).real
            else:
                if kind == 1:
                    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
                else:
                    e = np.zeros(d, dtype=complex)
                    e[first[s, j]] = 1.0
                    psi = e + F[:, second[s, j]]
                    psi += rng.uniform(0, 0.05) * (rng.standard_normal(d) + 1j * rng.standard_normal(d))
                psi /= np.linalg.norm(psi)
                responses[s, j] = np.outer(psi, psi.conj())
    return weights, first, second, responses

