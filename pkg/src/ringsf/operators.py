"""Thin wrappers binding sparse matrices and state arrays to a basis tag.

Every Hamiltonian, jump operator, and state in the package carries the tag of
the basis it was built on; combining objects with different tags raises
:class:`BasisMismatchError` instead of silently producing nonsense.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import BasisMismatchError, NonHermitianError, NormalizationError

HERMITICITY_TOL = 1e-12


@dataclass
class Operator:
    """Complex sparse matrix over a tagged basis."""

    matrix: sp.csr_matrix
    basis_tag: str

    def __post_init__(self) -> None:
        self.matrix = sp.csr_matrix(self.matrix)
        if self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValueError("operators must be square")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __add__(self, other: "Operator") -> "Operator":
        require_same_basis(self, other)
        return Operator(self.matrix + other.matrix, self.basis_tag)

    def __sub__(self, other: "Operator") -> "Operator":
        require_same_basis(self, other)
        return Operator(self.matrix - other.matrix, self.basis_tag)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.matrix * scalar, self.basis_tag)

    __rmul__ = __mul__

    def __matmul__(self, other: "Operator") -> "Operator":
        require_same_basis(self, other)
        return Operator(self.matrix @ other.matrix, self.basis_tag)

    def dagger(self) -> "Operator":
        return Operator(self.matrix.conj().T.tocsr(), self.basis_tag)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def hermiticity_defect(self) -> float:
        """Max-entry norm of H - H^dagger."""
        diff = (self.matrix - self.matrix.conj().T).tocoo()
        return 0.0 if diff.nnz == 0 else float(np.abs(diff.data).max())

    def require_hermitian(self, tol: float = HERMITICITY_TOL) -> "Operator":
        defect = self.hermiticity_defect()
        if defect > tol:
            raise NonHermitianError(f"hermiticity defect {defect:.3e} exceeds {tol:.1e}")
        return self

    def expect(self, state: "StateVector") -> complex:
        require_same_basis(self, state)
        return complex(np.vdot(state.amplitudes, self.matrix @ state.amplitudes))


def require_same_basis(*objs) -> None:
    tags = {o.basis_tag for o in objs}
    if len(tags) > 1:
        raise BasisMismatchError(f"basis tags differ: {sorted(tags)}")


def identity(dim: int, basis_tag: str) -> Operator:
    return Operator(sp.identity(dim, dtype=complex, format="csr"), basis_tag)


def diagonal_operator(values, basis_tag: str) -> Operator:
    return Operator(sp.diags(np.asarray(values, dtype=complex), format="csr"), basis_tag)


def operator_from_entries(entries: dict[tuple[int, int], complex], dim: int,
                          basis_tag: str) -> Operator:
    """Assemble a CSR operator from a (row, col) -> value map."""
    if entries:
        rows, cols = zip(*entries.keys())
        data = list(entries.values())
    else:
        rows, cols, data = (), (), ()
    mat = sp.csr_matrix(
        sp.coo_matrix((data, (rows, cols)), shape=(dim, dim), dtype=complex)
    )
    return Operator(mat, basis_tag)


def commutator_maxnorm(a: Operator, b: Operator) -> float:
    """Max-entry norm of [A, B]."""
    require_same_basis(a, b)
    comm = (a.matrix @ b.matrix - b.matrix @ a.matrix).tocoo()
    return 0.0 if comm.nnz == 0 else float(np.abs(comm.data).max())


@dataclass
class StateVector:
    """Pure state over a tagged basis."""

    amplitudes: np.ndarray
    basis_tag: str

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)

    @property
    def dim(self) -> int:
        return len(self.amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def require_normalized(self, tol: float = 1e-10) -> "StateVector":
        n = self.norm()
        if abs(n - 1.0) > tol:
            raise NormalizationError(f"state norm {n} deviates from 1 by more than {tol}")
        return self

    def normalized(self) -> "StateVector":
        return StateVector(self.amplitudes / self.norm(), self.basis_tag)

    def overlap(self, other: "StateVector") -> complex:
        require_same_basis(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass
class DensityMatrix:
    """Mixed state over a tagged basis (dense storage)."""

    matrix: np.ndarray
    basis_tag: str

    def __post_init__(self) -> None:
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValueError("density matrix must be square")

    @classmethod
    def from_pure(cls, state: StateVector) -> "DensityMatrix":
        psi = state.amplitudes
        return cls(np.outer(psi, psi.conj()), state.basis_tag)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def expect(self, op: Operator) -> complex:
        require_same_basis(self, op)
        return complex((op.matrix.multiply(self.matrix.T)).sum())

    def validate(self, herm_tol: float = 1e-10, trace_tol: float = 1e-8,
                 eig_floor: float = -1e-7, check_positivity: bool = True) -> "DensityMatrix":
        defect = float(np.abs(self.matrix - self.matrix.conj().T).max())
        if defect > herm_tol:
            raise NormalizationError(f"density matrix hermiticity defect {defect:.3e}")
        tr = np.trace(self.matrix)
        if abs(tr - 1.0) > trace_tol:
            raise NormalizationError(f"density matrix trace {tr} deviates from 1")
        if check_positivity and self.dim <= 512:
            lam_min = float(np.linalg.eigvalsh(self.matrix)[0])
            if lam_min < eig_floor:
                raise NormalizationError(f"density matrix min eigenvalue {lam_min:.3e}")
        return self
