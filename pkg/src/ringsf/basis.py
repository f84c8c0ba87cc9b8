"""Exciton configuration bases for 1D rings.

Each of the N ring sites carries exactly one label (no double occupancy):

* spinless mode: ``S0`` (ground), ``S1`` (singlet exciton), ``T1`` (triplet),
* spinful mode:  ``S0``, ``S1``, and three triplet states ``T(m)`` with
  ``m = -1, 0, +1``.

The quantity ``C = 2 n_S + n_T`` generates a U(1) symmetry of the full model,
so dynamics can be restricted to the subspace with a fixed value ``C0``.
:func:`enumerate_sector` builds that subspace with a deterministic
(lexicographic) configuration order; :func:`enumerate_full` builds the
unrestricted product space used by brute-force cross-checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import NotInSectorError

SpinMode = Literal["spinless", "spinful"]

# Per-site label codes; lexicographic config order uses these integers.
S0 = 0
S1 = 1
T1 = 2  # spinless triplet
TM1, T0, TP1 = 2, 3, 4  # spinful triplets, m = -1, 0, +1

SPINLESS_LABELS = (S0, S1, T1)
SPINFUL_LABELS = (S0, S1, TM1, T0, TP1)

#: m quantum number of each spinful label (None for non-triplets).
SPINFUL_M = {TM1: -1, T0: 0, TP1: +1}

Config = tuple[int, ...]


def local_dim(spin_mode: SpinMode) -> int:
    """Number of local states: 3 (spinless) or 5 (spinful)."""
    if spin_mode == "spinless":
        return 3
    if spin_mode == "spinful":
        return 5
    raise ValueError(f"unknown spin mode {spin_mode!r}")


def is_triplet(label: int, spin_mode: SpinMode) -> bool:
    return label >= 2 and label < local_dim(spin_mode)


def count_particles(config: Sequence[int]) -> tuple[int, int]:
    """Count (n_S, n_T) labels in a configuration.

    Works for both spin modes: every label code >= 2 is a triplet.
    ``2 * n_S + n_T`` is the configuration's conserved-quantity value.
    """
    n_s = sum(1 for c in config if c == S1)
    n_t = sum(1 for c in config if c >= 2)
    return n_s, n_t


def ring_bonds(n_sites: int) -> tuple[tuple[int, int], ...]:
    """Nearest-neighbour bonds of an N-site ring, each undirected bond once.

    For N >= 3 the bonds are (0,1), (1,2), ..., (N-1,0).  For N = 2 the two
    directed pairs (0,1), (1,0) describe the same physical bond, so only
    (0,1) is kept; keeping both would double every bond coupling.
    """
    if n_sites < 2:
        raise ValueError("a ring needs at least 2 sites")
    if n_sites == 2:
        return ((0, 1),)
    return tuple((i, (i + 1) % n_sites) for i in range(n_sites))


@dataclass(frozen=True)
class SectorBasis:
    """Ordered basis of all configurations with ``2 n_S + n_T = C0``."""

    N: int
    C0: int
    spin_mode: SpinMode
    configs: tuple[Config, ...]
    index_of: dict[Config, int] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.configs)

    @property
    def tag(self) -> str:
        return f"sector(N={self.N},C={self.C0},{self.spin_mode})"

    def index(self, config: Sequence[int]) -> int:
        """Canonical index of a configuration; inverse of ``configs[i]``."""
        key = tuple(config)
        n_s, n_t = count_particles(key)
        if 2 * n_s + n_t != self.C0:
            raise NotInSectorError(
                f"config {key} has C = {2 * n_s + n_t}, sector requires {self.C0}"
            )
        try:
            return self.index_of[key]
        except KeyError as exc:  # pragma: no cover - unreachable for valid labels
            raise NotInSectorError(f"config {key} not in basis {self.tag}") from exc

    def particle_counts(self) -> tuple[list[int], list[int]]:
        """Per-configuration (n_S, n_T) lists, in basis order."""
        n_s_list, n_t_list = [], []
        for cfg in self.configs:
            n_s, n_t = count_particles(cfg)
            n_s_list.append(n_s)
            n_t_list.append(n_t)
        return n_s_list, n_t_list


@dataclass(frozen=True)
class FullBasis:
    """The unrestricted product space (3^N or 5^N), for brute-force oracles."""

    N: int
    spin_mode: SpinMode
    configs: tuple[Config, ...]
    index_of: dict[Config, int] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.configs)

    @property
    def tag(self) -> str:
        return f"full(N={self.N},{self.spin_mode})"

    def index(self, config: Sequence[int]) -> int:
        return self.index_of[tuple(config)]


Basis = SectorBasis | FullBasis


def _sector_configs(n_sites: int, c0: int, spin_mode: SpinMode) -> list[Config]:
    """All configurations with 2 n_S + n_T = c0, unsorted."""
    configs: list[Config] = []
    if spin_mode == "spinless":
        triplet_labels: tuple[int, ...] = (T1,)
    else:
        triplet_labels = (TM1, T0, TP1)
    for n_s in range(c0 // 2 + 1):
        n_t = c0 - 2 * n_s
        if n_s + n_t > n_sites:
            continue
        sites = range(n_sites)
        for s_pos in itertools.combinations(sites, n_s):
            remaining = [i for i in sites if i not in s_pos]
            for t_pos in itertools.combinations(remaining, n_t):
                base = [S0] * n_sites
                for i in s_pos:
                    base[i] = S1
                for ms in itertools.product(triplet_labels, repeat=n_t):
                    cfg = list(base)
                    for i, lab in zip(t_pos, ms):
                        cfg[i] = lab
                    configs.append(tuple(cfg))
    return configs


def enumerate_sector(n_sites: int, c0: int, spin_mode: SpinMode = "spinless") -> SectorBasis:
    """Enumerate the C = c0 symmetry sector in lexicographic config order.

    Raises ValueError for c0 outside [0, 2N] (the reachable range: every site
    contributes at most 2 through a singlet).
    """
    if n_sites < 2:
        raise ValueError("n_sites must be >= 2")
    if c0 < 0 or c0 > 2 * n_sites:
        raise ValueError(f"C0 = {c0} outside the valid range [0, {2 * n_sites}]")
    local_dim(spin_mode)  # validates the mode
    configs = sorted(_sector_configs(n_sites, c0, spin_mode))
    index_of = {cfg: i for i, cfg in enumerate(configs)}
    return SectorBasis(n_sites, c0, spin_mode, tuple(configs), index_of)


def enumerate_full(n_sites: int, spin_mode: SpinMode = "spinless") -> FullBasis:
    """Enumerate the full product space in lexicographic order."""
    if n_sites < 2:
        raise ValueError("n_sites must be >= 2")
    labels = range(local_dim(spin_mode))
    configs = tuple(itertools.product(labels, repeat=n_sites))
    index_of = {cfg: i for i, cfg in enumerate(configs)}
    return FullBasis(n_sites, spin_mode, configs, index_of)


def sector_dimension(n_sites: int, c0: int, spin_mode: SpinMode = "spinless") -> int:
    """Closed-form sector dimension (multinomial placement count).

    For each split c0 = 2k + (c0 - 2k) into k singlets and n_t = c0 - 2k
    triplets: N! / (k! n_t! (N-k-n_t)!) placements, times 3^n_t m-choices in
    spinful mode.
    """
    total = 0
    m_choices = 1 if spin_mode == "spinless" else 3
    for k in range(c0 // 2 + 1):
        n_t = c0 - 2 * k
        rest = n_sites - k - n_t
        if rest < 0:
            continue
        total += comb(n_sites, k) * comb(n_sites - k, n_t) * m_choices**n_t
    return total


def embed_sector_state(sector: SectorBasis, full: FullBasis, amplitudes) -> np.ndarray:
    """Lift a sector-basis amplitude vector into the full product space."""
    if sector.N != full.N or sector.spin_mode != full.spin_mode:
        raise NotInSectorError("sector and full basis describe different systems")
    out = np.zeros(full.dim, dtype=complex)
    for i, cfg in enumerate(sector.configs):
        out[full.index(cfg)] = amplitudes[i]
    return out


def iter_singlet_placements(n_sites: int, n_singlets: int) -> Iterable[Config]:
    """Pure-singlet configurations (no triplets) with n_singlets S1 labels,
    in the same lexicographic order used by the sector bases."""
    for cfg in sorted(
        tuple(S1 if i in pos else S0 for i in range(n_sites))
        for pos in itertools.combinations(range(n_sites), n_singlets)
    ):
        yield cfg
