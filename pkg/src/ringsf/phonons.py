"""Tier-I phonon embedding and the Markovian tier-II dissipator.

Every ring site carries one harmonic mode truncated to ``d_ph`` Fock states.
The embedded index space is exciton-major: global index
``ex_index * d_ph**N + phonon_index`` with the phonon tuple encoded base
``d_ph``, site 0 most significant.  Exciton-phonon couplings are linear in
the local displacement ``a_i^dag + a_i``; the phonon-modulated
singlet-triplet interaction additionally carries the scalar offset ``x0`` and
*replaces* the bare interaction whenever phonons are modelled.  The tier-II
bath enters as local jump operators ``a_i`` (rate ``gamma_minus``) and
``a_i^dag`` (rate ``gamma_plus``), which commute with C = 2 N_S + N_T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .basis import Basis, ring_bonds
from .errors import BasisMismatchError, DimensionOverflowError, NormalizationError
from .hamiltonians import bond_interaction_operator, number_diagonals
from .operators import Operator, StateVector, diagonal_operator
from .params import DisorderRealization, ModelParams, PhononParams, zero_disorder

#: Refuse embeddings beyond this total dimension by default.
DEFAULT_DIM_CAP = 2**24


@dataclass(frozen=True)
class EmbeddedBasis:
    """Tensor product of an exciton basis with N truncated phonon modes."""

    exciton: Basis
    d_ph: int

    def __post_init__(self) -> None:
        if self.d_ph < 2:
            raise ValueError("d_ph must be >= 2")

    @property
    def N(self) -> int:
        return self.exciton.N

    @property
    def phonon_dim(self) -> int:
        return self.d_ph ** self.N

    @property
    def dim(self) -> int:
        return self.exciton.dim * self.phonon_dim

    @property
    def tag(self) -> str:
        return f"embedded[{self.exciton.tag},d_ph={self.d_ph}]"

    def index(self, exciton_index: int, occupations) -> int:
        """Global index of (exciton config index, phonon Fock tuple)."""
        if len(occupations) != self.N:
            raise ValueError("need one phonon occupation per site")
        ph = 0
        for n in occupations:
            if not 0 <= n < self.d_ph:
                raise ValueError(f"phonon occupation {n} outside [0, {self.d_ph})")
            ph = ph * self.d_ph + int(n)
        return exciton_index * self.phonon_dim + ph


def build_embedded_basis(exciton: Basis, d_ph: int,
                         dim_cap: int = DEFAULT_DIM_CAP) -> EmbeddedBasis:
    emb = EmbeddedBasis(exciton, d_ph)
    if emb.dim > dim_cap:
        raise DimensionOverflowError(
            f"embedded dimension {emb.dim} exceeds the cap {dim_cap}"
        )
    return emb


def _ladder(d_ph: int) -> sp.csr_matrix:
    """Truncated annihilation operator: a|n> = sqrt(n)|n-1>, a^dag|d-1> = 0."""
    return sp.diags(np.sqrt(np.arange(1, d_ph)), 1, format="csr", dtype=complex)


def _site_phonon_operator(embedded: EmbeddedBasis, site: int,
                          local: sp.spmatrix) -> sp.csr_matrix:
    """Lift a single-mode operator to the N-mode phonon factor."""
    left = sp.identity(embedded.d_ph ** site, dtype=complex, format="csr")
    right = sp.identity(embedded.d_ph ** (embedded.N - site - 1), dtype=complex,
                        format="csr")
    return sp.kron(sp.kron(left, local, format="csr"), right, format="csr")


def lift_exciton_operator(embedded: EmbeddedBasis, op: Operator) -> Operator:
    """op_ex (x) identity on the phonon factor."""
    if op.basis_tag != embedded.exciton.tag:
        raise BasisMismatchError(
            f"operator on {op.basis_tag} cannot be lifted into {embedded.tag}"
        )
    eye = sp.identity(embedded.phonon_dim, dtype=complex, format="csr")
    return Operator(sp.kron(op.matrix, eye, format="csr"), embedded.tag)


def total_phonon_occupation(embedded: EmbeddedBasis) -> np.ndarray:
    """Total Fock occupation for every phonon index (site 0 most significant)."""
    d, n = embedded.d_ph, embedded.N
    occ = np.zeros(embedded.phonon_dim)
    for site in range(n):
        occ += np.tile(np.repeat(np.arange(d), d ** (n - site - 1)), d**site)
    return occ


def build_H_ph(embedded: EmbeddedBasis, params: PhononParams) -> Operator:
    """Free phonon Hamiltonian ``omega0 * sum_i a_i^dag a_i``."""
    diag = params.omega0 * np.tile(total_phonon_occupation(embedded),
                                   embedded.exciton.dim)
    return diagonal_operator(diag, embedded.tag)


def build_local_couplings(embedded: EmbeddedBasis, params: PhononParams,
                          which: str) -> Operator:
    """Population-displacement coupling ``g * sum_i n^(i) (a_i^dag + a_i)``
    with ``which`` selecting the singlet (g_S) or triplet (g_T) density."""
    if which not in ("singlet", "triplet"):
        raise ValueError("which must be 'singlet' or 'triplet'")
    g = params.g_S if which == "singlet" else params.g_T
    total = sp.csr_matrix((embedded.dim, embedded.dim), dtype=complex)
    if g == 0.0:
        return Operator(total, embedded.tag)
    a = _ladder(embedded.d_ph)
    displacement = (a + a.conj().T).tocsr()
    for site in range(embedded.N):
        if which == "singlet":
            dens = np.array([1.0 if cfg[site] == 1 else 0.0
                             for cfg in embedded.exciton.configs])
        else:
            dens = np.array([1.0 if cfg[site] >= 2 else 0.0
                             for cfg in embedded.exciton.configs])
        x_site = _site_phonon_operator(embedded, site, displacement)
        total = total + sp.kron(sp.diags(dens).astype(complex), g * x_site,
                                format="csr")
    return Operator(total, embedded.tag).require_hermitian()


def build_modulated_interaction(embedded: EmbeddedBasis, params: PhononParams,
                                model: ModelParams,
                                realization: DisorderRealization | None = None,
                                ) -> Operator:
    """Phonon-modulated singlet-triplet interaction.

    For each ring bond (i, j) the bare fission/fusion term is multiplied by
    ``a_i^dag + a_i + x0`` on the bond's first site.  At ``x0 = 0`` the
    phonon-vacuum block vanishes, so fission requires phonon motion; the
    vacuum-to-vacuum block equals ``x0`` times the bare interaction.
    In dissipative mode this operator replaces the bare interaction term.
    """
    rel = realization if realization is not None else zero_disorder(embedded.N)
    a = _ladder(embedded.d_ph)
    displacement = (a + a.conj().T).tocsr()
    eye_ph = sp.identity(embedded.phonon_dim, dtype=complex, format="csr")
    total = sp.csr_matrix((embedded.dim, embedded.dim), dtype=complex)
    for b, bond in enumerate(ring_bonds(embedded.N)):
        g = model.gamma + rel.delta_gamma[b]
        if g == 0.0:
            continue
        exciton_part = bond_interaction_operator(embedded.exciton, bond, g)
        x_site = _site_phonon_operator(embedded, bond[0], displacement)
        modulation = (x_site + params.x0 * eye_ph).tocsr()
        total = total + sp.kron(exciton_part.matrix, modulation, format="csr")
    return Operator(total, embedded.tag).require_hermitian()


@dataclass(frozen=True)
class LindbladSpec:
    """Jump operators with their rates; empty means closed dynamics."""

    jumps: tuple[tuple[Operator, float], ...]
    basis_tag: str

    def __post_init__(self) -> None:
        for op, rate in self.jumps:
            if rate < 0:
                raise ValueError("jump rates must be >= 0")
            if op.basis_tag != self.basis_tag:
                raise BasisMismatchError(
                    f"jump on {op.basis_tag} inside dissipator on {self.basis_tag}"
                )

    @property
    def is_empty(self) -> bool:
        return len(self.jumps) == 0


def empty_dissipator(basis_tag: str) -> LindbladSpec:
    return LindbladSpec((), basis_tag)


def build_dissipator(embedded: EmbeddedBasis, params: PhononParams) -> LindbladSpec:
    """Local tier-II jumps: one ``a_i`` per site at gamma_minus and one
    ``a_i^dag`` per site at gamma_plus; zero-rate entries are omitted."""
    eye_ex = sp.identity(embedded.exciton.dim, dtype=complex, format="csr")
    a = _ladder(embedded.d_ph)
    jumps: list[tuple[Operator, float]] = []
    for rate, local in ((params.gamma_minus, a), (params.gamma_plus, a.conj().T.tocsr())):
        if rate == 0.0:
            continue
        for site in range(embedded.N):
            lifted = sp.kron(eye_ex, _site_phonon_operator(embedded, site, local),
                             format="csr")
            jumps.append((Operator(lifted, embedded.tag), rate))
    return LindbladSpec(tuple(jumps), embedded.tag)


def franck_condon_state(embedded: EmbeddedBasis, exciton_state: StateVector,
                        norm_tol: float = 1e-10) -> StateVector:
    """Product of an exciton state with the all-mode phonon vacuum."""
    if exciton_state.basis_tag != embedded.exciton.tag:
        raise BasisMismatchError(
            f"state on {exciton_state.basis_tag} does not match {embedded.tag}"
        )
    n = exciton_state.norm()
    if abs(n - 1.0) > norm_tol:
        raise NormalizationError(f"exciton state norm {n} is not 1 within {norm_tol}")
    amplitudes = np.zeros(embedded.dim, dtype=complex)
    vacuum = 0  # phonon tuple (0, ..., 0)
    for ex_idx, amp in enumerate(exciton_state.amplitudes):
        if amp != 0.0:
            amplitudes[ex_idx * embedded.phonon_dim + vacuum] = amp
    return StateVector(amplitudes, embedded.tag)


def embedded_number_diagonals(embedded: EmbeddedBasis) -> tuple[np.ndarray, np.ndarray]:
    """(n_S, n_T) diagonals lifted to the embedded basis."""
    n_s, n_t = number_diagonals(embedded.exciton)
    return (np.repeat(n_s, embedded.phonon_dim), np.repeat(n_t, embedded.phonon_dim))


def embedded_number_operators(embedded: EmbeddedBasis) -> tuple[Operator, Operator, Operator]:
    """(N_S, N_T, C) lifted to the embedded basis."""
    n_s, n_t = embedded_number_diagonals(embedded)
    return (
        diagonal_operator(n_s, embedded.tag),
        diagonal_operator(n_t, embedded.tag),
        diagonal_operator(2 * n_s + n_t, embedded.tag),
    )
