"""Random states, matrices and parameter sets with deterministic seeding.

All generators draw from an explicit numpy Generator so that a fixed
(seed, stream id) pair reproduces identical samples on every run and on
any worker layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qstate import BellLabel, DensityMatrix, XState, bell_vector


@dataclass(frozen=True)
class RngStream:
    """A named, splittable random stream.

    ``generator()`` yields the stream's own generator; ``substream(i)``
    derives an independent generator keyed by (seed, stream_id, i),
    which keeps per-sample draws reproducible no matter how samples are
    partitioned across workers.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng((self.seed, self.stream_id))

    def substream(self, index: int) -> np.random.Generator:
        return np.random.default_rng((self.seed, self.stream_id, index))


def ginibre(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """n x k matrix with i.i.d. entries N(0,1) + i N(0,1).

    Each complex entry has E[z] = 0 and E[|z|^2] = 2 under this
    convention (both quadratures carry unit variance).
    """
    if n < 1 or k < 1:
        raise ValueError("matrix dimensions must be positive")
    return rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed n x n unitary via QR of a Ginibre matrix.

    The raw QR factor is not Haar; multiplying each column by the phase
    of the matching diagonal entry of R removes the convention
    dependence and restores the invariant distribution.
    """
    q, r = np.linalg.qr(ginibre(rng, n, n))
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def random_induced(rng: np.random.Generator, n: int = 4, k: int = 4) -> DensityMatrix:
    """Random density matrix from the induced measure with ancilla size k.

    Computed as G G^dag / tr(G G^dag) for an n x k Ginibre G; the result
    has rank exactly min(n, k), and k = n gives the Hilbert-Schmidt
    ensemble.
    """
    if n != 4:
        raise ValueError("only two-qubit (n=4) states are supported")
    if not 1 <= k <= 4:
        raise ValueError(f"ancilla size k must lie in 1..4, got {k}")
    g = ginibre(rng, n, k)
    m = g @ g.conj().T
    return DensityMatrix(m / m.trace().real)


def random_bures(rng: np.random.Generator, n: int = 4) -> DensityMatrix:
    """Random density matrix from the Bures measure:
    (1+U) G G^dag (1+U^dag) normalized, with U Haar and G Ginibre."""
    if n != 4:
        raise ValueError("only two-qubit (n=4) states are supported")
    g = ginibre(rng, n, n)
    u = haar_unitary(rng, n)
    a = (np.eye(n) + u) @ g
    m = a @ a.conj().T
    return DensityMatrix(m / m.trace().real)


def random_pure(rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure two-qubit state: first column of a Haar unitary."""
    return haar_unitary(rng, 4)[:, 0]


@dataclass(frozen=True)
class BellDiagonalParams:
    """Mixing weights (alpha, beta, gamma, delta) of psi+, psi-, phi+, phi-."""

    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        weights = (self.alpha, self.beta, self.gamma, self.delta)
        if min(weights) < -1e-12:
            raise ValueError(f"weights must be nonnegative, got {weights}")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {sum(weights)!r}")

    def to_x_state(self) -> XState:
        # psi+/- populate the inner parity block, phi+/- the outer one.
        return XState(
            c11=0.5 * (self.gamma + self.delta),
            c22=0.5 * (self.alpha + self.beta),
            c33=0.5 * (self.alpha + self.beta),
            c44=0.5 * (self.gamma + self.delta),
            c14=0.5 * (self.gamma - self.delta),
            c23=0.5 * (self.alpha - self.beta),
        )

    def to_density_matrix(self) -> DensityMatrix:
        return self.to_x_state().to_density_matrix()


def random_bell_diagonal(rng: np.random.Generator) -> BellDiagonalParams:
    """Uniform sample from the 3-simplex of Bell mixing weights."""
    w = rng.dirichlet(np.ones(4))
    return BellDiagonalParams(alpha=w[0], beta=w[1], gamma=w[2], delta=w[3])


def random_x_state(rng: np.random.Generator) -> XState:
    """Random X-state: Dirichlet diagonal, coherences uniform within the
    positivity disks of the two parity blocks, phases uniform."""
    d = rng.dirichlet(np.ones(4))
    r14, r23 = rng.uniform(size=2)
    ph14, ph23 = rng.uniform(0.0, 2.0 * np.pi, size=2)
    return XState(
        c11=d[0],
        c22=d[1],
        c33=d[2],
        c44=d[3],
        c14=r14 * np.sqrt(d[0] * d[3]) * np.exp(1j * ph14),
        c23=r23 * np.sqrt(d[1] * d[2]) * np.exp(1j * ph23),
    )


def rank2_bell_mixture(alpha: float, first: BellLabel = BellLabel.PSI_PLUS,
                       second: BellLabel = BellLabel.PSI_MINUS) -> DensityMatrix:
    """alpha |first><first| + (1-alpha) |second><second|, a rank-2 state
    with concurrence |2 alpha - 1|."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"mixing weight must lie in [0, 1], got {alpha}")
    va, vb = bell_vector(first), bell_vector(second)
    mat = alpha * np.outer(va, va.conj()) + (1.0 - alpha) * np.outer(vb, vb.conj())
    return DensityMatrix(mat)
