"""Sparse exciton Hamiltonians and number operators on a configuration basis.

All builders work on either a :class:`~ringsf.basis.SectorBasis` or the full
product space (:class:`~ringsf.basis.FullBasis`); in a sector every generated
matrix element stays inside the sector because each term conserves
``C = 2 n_S + n_T``.  Second-quantised amplitudes carry no exchange phases:
the quasi-particles commute on different sites and exclude each other on the
same site, so every element equals the bare coupling.

Disorder enters through a :class:`~ringsf.params.DisorderRealization`; site
energies pick up per-site offsets and couplings per-bond offsets (one value
per undirected bond keeps the matrix Hermitian).
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from .basis import (
    S0,
    S1,
    T1,
    TM1,
    T0,
    TP1,
    Basis,
    count_particles,
    is_triplet,
    ring_bonds,
)
from .errors import BasisMismatchError, NonHermitianError
from .operators import Operator, diagonal_operator, operator_from_entries
from .params import DisorderRealization, ModelParams, SpinfulParams, zero_disorder

#: Spinful triplet labels in m = -1, 0, +1 order; SPIN_INDEX maps label -> 0..2.
TRIPLET_LABELS = (TM1, T0, TP1)
SPIN_INDEX = {TM1: 0, T0: 1, TP1: 2}


def _realization(basis: Basis, realization: DisorderRealization | None) -> DisorderRealization:
    if realization is None:
        return zero_disorder(basis.N)
    if realization.n_sites != basis.N:
        raise BasisMismatchError(
            f"realization has {realization.n_sites} sites, basis has {basis.N}"
        )
    return realization


def _require_mode(basis: Basis, mode: str) -> None:
    if basis.spin_mode != mode:
        raise BasisMismatchError(f"operation requires a {mode} basis, got {basis.tag}")


def _assemble(entries: dict[tuple[int, int], complex], basis: Basis,
              add_dagger: bool = False) -> Operator:
    op = operator_from_entries(entries, basis.dim, basis.tag)
    if add_dagger:
        op = Operator(op.matrix + op.matrix.conj().T, basis.tag)
    return op.require_hermitian()


def build_H_S(basis: Basis, params: ModelParams,
              realization: DisorderRealization | None = None) -> Operator:
    """Singlet Hamiltonian: local energies plus nearest-neighbour hopping.

    ``sum_i eps_S^(i) n_S^(i) + sum_bonds J_S^(b) (S^dag_i S_j + h.c.)``
    with periodic closure.  Valid on spinless and spinful bases (the singlet
    labels are identical in both).
    """
    rel = _realization(basis, realization)
    bonds = ring_bonds(basis.N)
    eps = params.eps_S + rel.delta_eps_S
    hop = params.J_S + rel.delta_J_S
    entries: dict[tuple[int, int], complex] = defaultdict(complex)
    for a, cfg in enumerate(basis.configs):
        diag = sum(eps[i] for i in range(basis.N) if cfg[i] == S1)
        if diag:
            entries[(a, a)] += diag
        for b, (i, j) in enumerate(bonds):
            if hop[b] == 0.0:
                continue
            # S^dag_i S_j moves a singlet j -> i; the reverse is the h.c.
            for src, dst in ((j, i), (i, j)):
                if cfg[src] == S1 and cfg[dst] == S0:
                    tgt = list(cfg)
                    tgt[src], tgt[dst] = S0, S1
                    entries[(basis.index_of[tuple(tgt)], a)] += hop[b]
    return _assemble(entries, basis)


def build_H_T(basis: Basis, params: ModelParams,
              realization: DisorderRealization | None = None) -> Operator:
    """Spinless triplet Hamiltonian: local energies, hopping, and the
    density-density exchange ``chi^(b) n_T^(i) n_T^(j)`` on ring bonds."""
    _require_mode(basis, "spinless")
    rel = _realization(basis, realization)
    bonds = ring_bonds(basis.N)
    eps = params.eps_T + rel.delta_eps_T
    hop = params.J_T + rel.delta_J_T
    exch = params.chi + rel.delta_chi
    entries: dict[tuple[int, int], complex] = defaultdict(complex)
    for a, cfg in enumerate(basis.configs):
        diag = sum(eps[i] for i in range(basis.N) if cfg[i] == T1)
        diag += sum(exch[b] for b, (i, j) in enumerate(bonds)
                    if cfg[i] == T1 and cfg[j] == T1)
        if diag:
            entries[(a, a)] += diag
        for b, (i, j) in enumerate(bonds):
            if hop[b] == 0.0:
                continue
            for src, dst in ((j, i), (i, j)):
                if cfg[src] == T1 and cfg[dst] == S0:
                    tgt = list(cfg)
                    tgt[src], tgt[dst] = S0, T1
                    entries[(basis.index_of[tuple(tgt)], a)] += hop[b]
    return _assemble(entries, basis)


def bond_interaction_operator(basis: Basis, bond: tuple[int, int],
                              coupling: float) -> Operator:
    """Singlet-fission term of a single bond (i, j):

    ``coupling * (T^dag_i T^dag_j S_i + T^dag_i T^dag_j S_j + h.c.)``

    On a spinful basis the created pair is the total-spin-zero combination
    ``(1/sqrt(3)) (T0 T0 - T- T+ - T+ T-)``, the only channel coupled to S1.
    """
    i, j = bond
    entries: dict[tuple[int, int], complex] = defaultdict(complex)
    spinless = basis.spin_mode == "spinless"
    if spinless:
        pair_channels = (((T1, T1), 1.0),)
    else:
        rt3 = 1.0 / np.sqrt(3.0)
        pair_channels = (((T0, T0), rt3), ((TM1, TP1), -rt3), ((TP1, TM1), -rt3))
    for a, cfg in enumerate(basis.configs):
        if {cfg[i], cfg[j]} == {S1, S0}:
            for (mi, mj), weight in pair_channels:
                tgt = list(cfg)
                tgt[i], tgt[j] = mi, mj
                key = tuple(tgt)
                if key in basis.index_of:
                    entries[(basis.index_of[key], a)] += coupling * weight
    # raising part built above; add the fusion (h.c.) half
    return _assemble(entries, basis, add_dagger=True)


def build_H_int(basis: Basis, params: ModelParams,
                realization: DisorderRealization | None = None) -> Operator:
    """Spinless singlet-triplet interaction over all ring bonds."""
    _require_mode(basis, "spinless")
    return _build_interaction(basis, params, realization)


def build_spinful_H_int(basis: Basis, params: ModelParams,
                        realization: DisorderRealization | None = None) -> Operator:
    """Spinful singlet-triplet interaction: S1 couples to the normalized
    singlet-character triplet pair on each ring bond."""
    _require_mode(basis, "spinful")
    return _build_interaction(basis, params, realization)


def _build_interaction(basis: Basis, params: ModelParams,
                       realization: DisorderRealization | None) -> Operator:
    rel = _realization(basis, realization)
    total = operator_from_entries({}, basis.dim, basis.tag)
    for b, bond in enumerate(ring_bonds(basis.N)):
        g = params.gamma + rel.delta_gamma[b]
        if g == 0.0:
            continue
        total = total + bond_interaction_operator(basis, bond, g)
    return total.require_hermitian()


def spin_matrices() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Local spin-1 operators (Sx, Sy, Sz) as 5x5 matrices on the spinful
    single-site space (zero on the S0/S1 block)."""
    rt2 = 1.0 / np.sqrt(2.0)
    sx = np.zeros((5, 5), dtype=complex)
    sy = np.zeros((5, 5), dtype=complex)
    sz = np.zeros((5, 5), dtype=complex)
    for m_label in (TM1, TP1):
        m = -1 if m_label == TM1 else +1
        sx[T0, m_label] += rt2
        sx[m_label, T0] += rt2
        sy[T0, m_label] += 1j * rt2 * m
        sy[m_label, T0] += -1j * rt2 * m
    for m_label, m in ((TM1, -1), (T0, 0), (TP1, +1)):
        sz[m_label, m_label] = m
    return sx, sy, sz


def build_spinful_H_T(basis: Basis, params: ModelParams, spinful: SpinfulParams,
                      realization: DisorderRealization | None = None) -> Operator:
    """Spinful triplet Hamiltonian.

    Per site: ``eps_T sum_m n_{T,m} + B . S_i + S_i^T D S_i``; per ring bond:
    m-resolved hopping ``J_{T;m,m'} T^dag_{i,m} T_{j,m'} + h.c.`` (the scalar
    J_T bond disorder is added to every diagonal m channel) and isotropic
    exchange ``chi_iso S_i . S_j``.
    """
    _require_mode(basis, "spinful")
    rel = _realization(basis, realization)
    bonds = ring_bonds(basis.N)
    eps = params.eps_T + rel.delta_eps_T

    j_mm = spinful.hopping_matrix(params.J_T)
    if not np.allclose(j_mm, j_mm.conj().T, atol=1e-12):
        raise NonHermitianError("J_T_mm must be a Hermitian 3x3 matrix")

    sx, sy, sz = spin_matrices()
    b_field = np.asarray(spinful.B, dtype=float)
    d_tensor = spinful.d_matrix()
    spin_ops = (sx, sy, sz)
    local = sum(b_field[a] * spin_ops[a] for a in range(3))
    local = local + sum(
        d_tensor[a, b] * (spin_ops[a] @ spin_ops[b]) for a in range(3) for b in range(3)
    )

    # Two-site Heisenberg kernel on the 25-dim local pair space.
    heis = sum(np.kron(s, s) for s in spin_ops)

    entries: dict[tuple[int, int], complex] = defaultdict(complex)
    for a, cfg in enumerate(basis.configs):
        diag = sum(eps[i] for i in range(basis.N) if is_triplet(cfg[i], "spinful"))
        if diag:
            entries[(a, a)] += diag
        # on-site Zeeman + ZFS (mixes m at fixed site)
        for i in range(basis.N):
            if not is_triplet(cfg[i], "spinful"):
                continue
            for new_label in TRIPLET_LABELS:
                amp = local[new_label, cfg[i]]
                if amp != 0.0:
                    tgt = list(cfg)
                    tgt[i] = new_label
                    entries[(basis.index_of[tuple(tgt)], a)] += amp
        for b, (i, j) in enumerate(bonds):
            j_bond = j_mm + rel.delta_J_T[b] * np.eye(3)
            # hopping, built one direction then mirrored through + h.c.
            for src, dst in ((j, i), (i, j)):
                if is_triplet(cfg[src], "spinful") and cfg[dst] == S0:
                    m_src = SPIN_INDEX[cfg[src]]
                    for m_dst, dst_label in enumerate(TRIPLET_LABELS):
                        if src == j and dst == i:
                            amp = j_bond[m_dst, m_src]
                        else:
                            amp = np.conj(j_bond[m_src, m_dst])
                        if amp != 0.0:
                            tgt = list(cfg)
                            tgt[src], tgt[dst] = S0, dst_label
                            entries[(basis.index_of[tuple(tgt)], a)] += amp
            if spinful.chi_iso != 0.0:
                if is_triplet(cfg[i], "spinful") and is_triplet(cfg[j], "spinful"):
                    col = cfg[i] * 5 + cfg[j]
                    for pi in TRIPLET_LABELS:
                        for pj in TRIPLET_LABELS:
                            amp = heis[pi * 5 + pj, col]
                            if amp != 0.0:
                                tgt = list(cfg)
                                tgt[i], tgt[j] = pi, pj
                                entries[(basis.index_of[tuple(tgt)], a)] += (
                                    spinful.chi_iso * amp
                                )
    return _assemble(entries, basis)


def number_diagonals(basis: Basis) -> tuple[np.ndarray, np.ndarray]:
    """(n_S, n_T) diagonal arrays over the basis, for fast expectations."""
    counts = [count_particles(cfg) for cfg in basis.configs]
    n_s = np.array([c[0] for c in counts], dtype=float)
    n_t = np.array([c[1] for c in counts], dtype=float)
    return n_s, n_t


def build_number_operators(basis: Basis) -> tuple[Operator, Operator, Operator]:
    """Diagonal (N_S, N_T, C) counting operators with C = 2 N_S + N_T."""
    n_s, n_t = number_diagonals(basis)
    return (
        diagonal_operator(n_s, basis.tag),
        diagonal_operator(n_t, basis.tag),
        diagonal_operator(2 * n_s + n_t, basis.tag),
    )


def build_exciton_hamiltonian(basis: Basis, params: ModelParams,
                              realization: DisorderRealization | None = None,
                              spinful: SpinfulParams | None = None) -> Operator:
    """Total exciton Hamiltonian H_S + H_T + H_int for either spin mode."""
    h = build_H_S(basis, params, realization)
    if basis.spin_mode == "spinless":
        h = h + build_H_T(basis, params, realization)
        h = h + build_H_int(basis, params, realization)
    else:
        h = h + build_spinful_H_T(basis, params, spinful or SpinfulParams(), realization)
        h = h + build_spinful_H_int(basis, params, realization)
    return h.require_hermitian()
