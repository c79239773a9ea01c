"""Two-qubit state types, fixed-dimension complex linear algebra, and
entanglement/rank measures.

Basis convention used everywhere in this package: a two-qubit space is
ordered |HH>, |HV>, |VH>, |VV> with H=0, V=1, so the flat index of
|ij> is 2*i + j. Four-qubit matrices are ordered with mode 1 as the
most significant qubit, i.e. index = 8*m1 + 4*m2 + 2*m3 + m4.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

BASIS_LABELS = ("HH", "HV", "VH", "VV")

# Tolerances for structural invariants of a physical state.
HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-10
# Relative eigenvalue cutoff for the numerical rank (fraction of the
# largest eigenvalue). Overridable per call.
DEFAULT_RANK_TOL = 1e-10
# Modulus bound on the eight entries that must vanish in an X-state.
X_ENTRY_TOL = 1e-10

# sigma_y (x) sigma_y, the spin-flip kernel of the concurrence.
_YY = np.array(
    [
        [0, 0, 0, -1],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [-1, 0, 0, 0],
    ],
    dtype=complex,
)
# Conjugation by _YY is a signed anti-transpose: (YY m YY)[i, j] equals
# s_i s_j m[3-i, 3-j] with signs s = (-1, 1, 1, -1).
_YY_SIGNS = np.array([-1.0, 1.0, 1.0, -1.0])
_YY_SIGNS = np.outer(_YY_SIGNS, _YY_SIGNS)


class ValidationError(ValueError):
    """A matrix failed one of the density-matrix invariants."""


class NotAnXState(ValueError):
    """A density matrix carries weight outside the X pattern."""


class BellLabel(enum.Enum):
    """The four maximally entangled two-qubit states."""

    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"

    @classmethod
    def from_string(cls, text: str) -> "BellLabel":
        for label in cls:
            if label.value == text:
                return label
        raise ValueError(
            f"unknown Bell label {text!r}; expected one of "
            f"{[label.value for label in cls]}"
        )

    def __str__(self) -> str:
        return self.value


def bell_vector(label: BellLabel) -> np.ndarray:
    """Amplitude vector of a Bell state in the |HH>,|HV>,|VH>,|VV> basis.

    phi+/- = (|HH> +/- |VV>)/sqrt(2), psi+/- = (|HV> +/- |VH>)/sqrt(2).
    """
    s = 1.0 / np.sqrt(2.0)
    if label is BellLabel.PHI_PLUS:
        return np.array([s, 0, 0, s], dtype=complex)
    if label is BellLabel.PHI_MINUS:
        return np.array([s, 0, 0, -s], dtype=complex)
    if label is BellLabel.PSI_PLUS:
        return np.array([0, s, s, 0], dtype=complex)
    return np.array([0, s, -s, 0], dtype=complex)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two complex matrices.

    The entry at (rows(b)*i + k, cols(b)*j + l) is a[i, j] * b[k, l], so
    tensoring two trace-one matrices preserves unit trace.
    """
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace_23(rho1234: np.ndarray) -> np.ndarray:
    """Trace qubits 2 and 3 out of a four-qubit operator, keeping (1, 4).

    The input must be 16x16 and ordered with qubit 1 most significant
    (index = 8*m1 + 4*m2 + 2*m3 + m4). No renormalization is applied;
    the trace of the output equals the trace of the input.
    """
    rho1234 = np.asarray(rho1234, dtype=complex)
    if rho1234.shape != (16, 16):
        raise ValueError(f"expected a 16x16 matrix, got shape {rho1234.shape}")
    r8 = rho1234.reshape([2] * 8)
    return np.einsum("aijbcijd->abcd", r8).reshape(4, 4)


def _hermitize(mat: np.ndarray) -> np.ndarray:
    return 0.5 * (mat + mat.conj().T)


def _psd_sqrt(hermitian: np.ndarray) -> np.ndarray:
    # Hermitian-specialized square root; tiny negative eigenvalues from
    # roundoff are clipped to zero.
    w, v = np.linalg.eigh(hermitian)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


class DensityMatrix:
    """A validated 4x4 two-qubit density matrix.

    Construction checks Hermiticity, unit trace and positive
    semidefiniteness (to the module tolerances) and freezes the backing
    array, so instances can be shared across threads or processes.
    """

    __slots__ = ("mat", "_eigs")

    def __init__(self, mat: np.ndarray, validate: bool = True):
        arr = np.array(mat, dtype=complex, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "mat", arr)
        object.__setattr__(self, "_eigs", None)
        if validate:
            self.validate()

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("DensityMatrix is immutable")

    def validate(self) -> None:
        """Re-check all invariants, raising ValidationError on failure."""
        mat = self.mat
        if mat.shape != (4, 4):
            raise ValidationError(f"shape invariant violated: {mat.shape} != (4, 4)")
        if not np.all(np.isfinite(mat.view(float))):
            raise ValidationError("finiteness invariant violated: NaN or Inf entry")
        herm_err = np.abs(mat - mat.conj().T).max()
        if herm_err > HERMITICITY_TOL:
            raise ValidationError(
                f"hermiticity invariant violated: max |m_ij - conj(m_ji)| = {herm_err:.3e}"
            )
        trace_err = abs(mat.trace() - 1.0)
        if trace_err > TRACE_TOL:
            raise ValidationError(f"trace invariant violated: |tr - 1| = {trace_err:.3e}")
        # eigvalsh reads one triangle, which Hermiticity (checked above)
        # makes equivalent to the Hermitized matrix to within tolerance
        eigs = np.linalg.eigvalsh(mat)
        if eigs[0] < EIGENVALUE_FLOOR:
            raise ValidationError(
                f"eigenvalue invariant violated: min eigenvalue = {eigs[0]:.3e}"
            )
        descending = eigs[::-1].copy()
        descending.setflags(write=False)
        object.__setattr__(self, "_eigs", descending)

    @classmethod
    def from_pure(cls, amplitudes: np.ndarray) -> "DensityMatrix":
        """Projector |psi><psi| onto a four-component amplitude vector."""
        v = np.asarray(amplitudes, dtype=complex).reshape(4)
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > 1e-12:
            raise ValidationError(f"norm invariant violated: ||psi|| = {norm!r}")
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls) -> "DensityMatrix":
        return cls(np.eye(4, dtype=complex) / 4.0)

    def eigenvalues(self) -> np.ndarray:
        """Real eigenvalues in descending order (cached by validate)."""
        if self._eigs is None:
            eigs = np.linalg.eigvalsh(_hermitize(self.mat))[::-1].copy()
            eigs.setflags(write=False)
            object.__setattr__(self, "_eigs", eigs)
        return self._eigs

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    def __repr__(self) -> str:
        return f"DensityMatrix({np.array2string(self.mat, precision=4)})"


def bell_density(label: BellLabel) -> DensityMatrix:
    return DensityMatrix.from_pure(bell_vector(label))


def werner(p: float) -> DensityMatrix:
    """p |phi+><phi+| + (1-p) I/4 for p in [-1/3, 1]."""
    mat = p * np.outer(bell_vector(BellLabel.PHI_PLUS), bell_vector(BellLabel.PHI_PLUS).conj())
    return DensityMatrix(mat + (1.0 - p) * np.eye(4) / 4.0)


@dataclass(frozen=True)
class XState:
    """Density matrix with decoupled parity sectors: nonzero entries only on
    the main diagonal and the anti-diagonal.

    Parameters are the four diagonal populations and the two independent
    coherences; the remaining anti-diagonal entries are fixed by
    Hermiticity (c41 = conj(c14), c32 = conj(c23)).
    """

    c11: float
    c22: float
    c33: float
    c44: float
    c14: complex = 0.0
    c23: complex = 0.0

    def __post_init__(self):
        diag = (self.c11, self.c22, self.c33, self.c44)
        if min(diag) < -TRACE_TOL:
            raise ValidationError(f"diagonal invariant violated: negative population {min(diag):.3e}")
        total = sum(diag)
        if abs(total - 1.0) > TRACE_TOL:
            raise ValidationError(f"trace invariant violated: sum = {total!r}")
        if abs(self.c14) ** 2 > self.c11 * self.c44 + TRACE_TOL:
            raise ValidationError("eigenvalue invariant violated: |c14|^2 > c11*c44")
        if abs(self.c23) ** 2 > self.c22 * self.c33 + TRACE_TOL:
            raise ValidationError("eigenvalue invariant violated: |c23|^2 > c22*c33")

    def to_matrix(self) -> np.ndarray:
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0], m[1, 1], m[2, 2], m[3, 3] = self.c11, self.c22, self.c33, self.c44
        m[0, 3], m[3, 0] = self.c14, np.conj(self.c14)
        m[1, 2], m[2, 1] = self.c23, np.conj(self.c23)
        return m

    def to_density_matrix(self) -> DensityMatrix:
        return DensityMatrix(self.to_matrix())

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in descending order, from the two 2x2 parity blocks."""
        outer = _block_eigs(self.c11, self.c44, self.c14)
        inner = _block_eigs(self.c22, self.c33, self.c23)
        return np.sort(np.concatenate([outer, inner]))[::-1]


def _block_eigs(p: float, q: float, c: complex) -> np.ndarray:
    half_sum = 0.5 * (p + q)
    radius = np.hypot(0.5 * (p - q), abs(c))
    return np.array([half_sum + radius, half_sum - radius])


def as_x_state(rho: DensityMatrix, tol: float = X_ENTRY_TOL) -> XState:
    """Extract the X-state parameters of ``rho``.

    Raises NotAnXState if any of the eight entries outside the diagonal
    and anti-diagonal has modulus above ``tol``.
    """
    mat = rho.mat
    x_positions = {(0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)}
    for i in range(4):
        for j in range(4):
            if (i, j) not in x_positions and abs(mat[i, j]) >= tol:
                raise NotAnXState(
                    f"entry ({i + 1},{j + 1}) has modulus {abs(mat[i, j]):.3e} >= {tol}"
                )
    return XState(
        c11=mat[0, 0].real,
        c22=mat[1, 1].real,
        c33=mat[2, 2].real,
        c44=mat[3, 3].real,
        c14=complex(mat[0, 3]),
        c23=complex(mat[1, 2]),
    )


def concurrence(state: "DensityMatrix | XState") -> float:
    """Concurrence of a two-qubit state, in [0, 1].

    For a general density matrix this is the spin-flip construction:
    with rho~ = (sy x sy) rho* (sy x sy), the concurrence is
    max(0, l1 - l2 - l3 - l4) where the l's are the descending square
    roots of the eigenvalues of rho rho~. They are computed here as the
    singular values of sqrt(rho) sqrt(rho~), which stays accurate when
    eigenvalues underflow toward zero.

    X-states take the exact algebraic branch
    2 max[0, |c14| - sqrt(c22 c33), |c23| - sqrt(c11 c44)].
    """
    if isinstance(state, XState):
        return concurrence_x(state)
    rho = _hermitize(state.mat)
    root = _psd_sqrt(rho)
    # sqrt commutes with the (sy x sy) conjugation, so sqrt(rho~) is the
    # signed anti-transpose of the conjugated sqrt(rho)
    root_tilde = _YY_SIGNS * root[::-1, ::-1].conj()
    lam = np.linalg.svd(root @ root_tilde, compute_uv=False)
    return float(np.clip(lam[0] - lam[1] - lam[2] - lam[3], 0.0, 1.0))


def concurrence_x(x: XState) -> float:
    """Closed-form concurrence of an X-state."""
    outer = abs(x.c14) - np.sqrt(max(x.c22 * x.c33, 0.0))
    inner = abs(x.c23) - np.sqrt(max(x.c11 * x.c44, 0.0))
    return float(np.clip(2.0 * max(0.0, outer, inner), 0.0, 1.0))


def pure_concurrence(amplitudes: np.ndarray) -> float:
    """Concurrence 2|a0 a3 - a1 a2| of a normalized pure state."""
    v = np.asarray(amplitudes, dtype=complex).reshape(4)
    return float(np.clip(2.0 * abs(v[0] * v[3] - v[1] * v[2]), 0.0, 1.0))


def numerical_rank(state: "DensityMatrix | XState", tol: float = DEFAULT_RANK_TOL) -> int:
    """Number of eigenvalues above ``tol`` times the largest eigenvalue."""
    eigs = state.eigenvalues()
    return int(np.count_nonzero(eigs > tol * eigs[0]))


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Half the trace norm of a - b."""
    diff = _hermitize(a.mat - b.mat)
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())


def matrix_to_json_dict(rho: DensityMatrix) -> dict:
    """Serialize to the interchange format {"basis": ..., "matrix": [[[re, im], ...]]}."""
    return {
        "basis": ",".join(BASIS_LABELS),
        "matrix": [[[z.real, z.imag] for z in row] for row in rho.mat],
    }


def matrix_from_json_dict(obj: dict) -> DensityMatrix:
    """Parse the interchange format back into a validated DensityMatrix."""
    if not isinstance(obj, dict):
        raise ValueError("expected a JSON object with 'basis' and 'matrix' keys")
    basis = obj.get("basis")
    if basis != ",".join(BASIS_LABELS):
        raise ValueError(f"unsupported basis {basis!r}; expected {','.join(BASIS_LABELS)!r}")
    rows = obj.get("matrix")
    try:
        mat = np.array(
            [[complex(entry[0], entry[1]) for entry in row] for row in rows],
            dtype=complex,
        )
    except (TypeError, ValueError, IndexError) as exc:
        raise ValueError(f"malformed matrix entries: {exc}") from exc
    if mat.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {mat.shape}")
    return DensityMatrix(mat)
