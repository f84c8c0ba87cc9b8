"""Model parameter records, the optimisation box, and disorder sampling.

Energies are in eV with hbar = 1, so times are in 1/eV.  The singlet energy
``eps_S`` acts as the reference scale (default 1).  Each exciton parameter may
carry independent zero-mean Gaussian disorder with standard deviation
``sigma_<name>``: site energies fluctuate per site, couplings per undirected
ring bond (one value shared by the two Hermitian-conjugate hopping terms).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from . import rng
from .basis import ring_bonds


@dataclass(frozen=True)
class ModelParams:
    """Exciton model parameters (eV) and their disorder widths."""

    eps_S: float = 1.0
    eps_T: float = 0.5
    J_S: float = 0.0
    J_T: float = 0.0
    chi: float = 0.0
    gamma: float = 0.0
    sigma_eps_S: float = 0.0
    sigma_eps_T: float = 0.0
    sigma_J_S: float = 0.0
    sigma_J_T: float = 0.0
    sigma_chi: float = 0.0
    sigma_gamma: float = 0.0
    mu: float = 1.0  # local optical dipole moment, arbitrary units

    def __post_init__(self) -> None:
        for name in ("eps_S", "eps_T", "J_S", "J_T", "chi", "gamma"):
            sigma = getattr(self, f"sigma_{name}")
            if sigma < 0:
                raise ValueError(f"sigma_{name} must be >= 0, got {sigma}")

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class SpinfulParams:
    """Extra parameters of the spinful triplet model (eV).

    ``B``: magnetic field vector applied at every site.
    ``D``: symmetric zero-field-splitting tensor.
    ``J_T_mm``: Hermitian 3x3 matrix of m-resolved hopping amplitudes in the
    m = (-1, 0, +1) ordering; the scalar model corresponds to J_T * identity.
    ``chi_iso``: isotropic Heisenberg exchange S_i . S_j on ring bonds.  This
    is a different physical knob from the spinless density-density ``chi``
    and is never converted from it.
    """

    B: tuple[float, float, float] = (0.0, 0.0, 0.0)
    D: tuple[tuple[float, float, float], ...] = (
        (0.0, 0.0, 0.0),
        (0.0, 0.0, 0.0),
        (0.0, 0.0, 0.0),
    )
    J_T_mm: tuple[tuple[complex, ...], ...] | None = None
    chi_iso: float = 0.0

    def d_matrix(self) -> np.ndarray:
        d = np.asarray(self.D, dtype=float)
        if d.shape != (3, 3) or not np.allclose(d, d.T, atol=1e-12):
            raise ValueError("D must be a symmetric 3x3 tensor")
        return d

    def hopping_matrix(self, scalar_j_t: float) -> np.ndarray:
        """3x3 hopping matrix; defaults to scalar_j_t * identity."""
        if self.J_T_mm is None:
            return scalar_j_t * np.eye(3)
        j = np.asarray(self.J_T_mm, dtype=complex)
        if j.shape != (3, 3):
            raise ValueError("J_T_mm must be 3x3")
        return j


@dataclass(frozen=True)
class PhononParams:
    """Tier-I vibrational mode and tier-II Markovian bath parameters.

    One harmonic mode of frequency ``omega0`` sits on every site, truncated to
    ``d_ph`` Fock states.  ``g_S``/``g_T`` couple the local singlet/triplet
    populations to the mode displacement; ``x0`` is the common scalar offset
    entering only the phonon-modulated singlet-triplet interaction.  The
    tier-II bath damps each mode with annihilation rate ``gamma_minus`` and
    excitation rate ``gamma_plus`` (zero below room temperature, where the
    mode quantum greatly exceeds the thermal energy).
    """

    omega0: float = 0.25
    d_ph: int = 4
    x0: float = 0.0
    g_S: float = 0.0
    g_T: float = 0.0
    gamma_minus: float = 0.1
    gamma_plus: float = 0.0

    def __post_init__(self) -> None:
        if self.d_ph < 2:
            raise ValueError("d_ph must be >= 2 (a single Fock state has no dynamics)")
        if self.gamma_minus < 0 or self.gamma_plus < 0:
            raise ValueError("relaxation rates must be >= 0")


@dataclass(frozen=True)
class DisorderRealization:
    """One concrete sample of the Gaussian parameter disorder.

    Site offsets have length N; bond offsets have one entry per undirected
    ring bond, in ``ring_bonds(N)`` order.  Regenerating with the same
    (params, seed) reproduces the realization bit-for-bit.
    """

    seed: int
    delta_eps_S: np.ndarray
    delta_eps_T: np.ndarray
    delta_J_S: np.ndarray
    delta_J_T: np.ndarray
    delta_chi: np.ndarray
    delta_gamma: np.ndarray

    @property
    def n_sites(self) -> int:
        return len(self.delta_eps_S)


def zero_disorder(n_sites: int) -> DisorderRealization:
    """The all-zero realization (ordered ring)."""
    n_bonds = len(ring_bonds(n_sites))
    z_site = np.zeros(n_sites)
    z_bond = np.zeros(n_bonds)
    return DisorderRealization(0, z_site, z_site.copy(), z_bond, z_bond.copy(),
                               z_bond.copy(), z_bond.copy())


def sample_disorder(params: ModelParams, seed: int, n_sites: int) -> DisorderRealization:
    """Draw one disorder realization for an N-site ring.

    Every offset is an independent zero-mean normal with the matching sigma.
    The draw order (and hence the realization for a given seed) is fixed:
    eps_S sites, eps_T sites, then J_S, J_T, chi, gamma bonds.  A zero sigma
    yields exactly zero offsets but still consumes the same random variates,
    so toggling one sigma does not reshuffle the others.
    """
    gen = rng.generator(seed)
    n_bonds = len(ring_bonds(n_sites))
    draws = {
        "eps_S": gen.standard_normal(n_sites),
        "eps_T": gen.standard_normal(n_sites),
        "J_S": gen.standard_normal(n_bonds),
        "J_T": gen.standard_normal(n_bonds),
        "chi": gen.standard_normal(n_bonds),
        "gamma": gen.standard_normal(n_bonds),
    }
    return DisorderRealization(
        seed,
        delta_eps_S=params.sigma_eps_S * draws["eps_S"],
        delta_eps_T=params.sigma_eps_T * draws["eps_T"],
        delta_J_S=params.sigma_J_S * draws["J_S"],
        delta_J_T=params.sigma_J_T * draws["J_T"],
        delta_chi=params.sigma_chi * draws["chi"],
        delta_gamma=params.sigma_gamma * draws["gamma"],
    )


#: Optimisation box: admissible range of every tunable parameter (eV).
PARAMETER_BOX: Mapping[str, tuple[float, float]] = {
    "eps_S": (1.0, 1.0),
    "eps_T": (0.35, 0.65),
    "J_S": (-0.2, 0.2),
    "J_T": (0.0, 0.5),
    "chi": (0.0, 0.3),
    "gamma": (0.001, 0.6),
    "sigma_J_T": (0.0, 0.2),
    "sigma_chi": (0.0, 0.2),
    "omega0": (0.0, 0.5),
    "x0": (-0.1, 0.1),
    "g_S": (0.0, 0.5),
    "g_T": (0.0, 0.5),
}

#: Which box entries live on ModelParams vs PhononParams.
MODEL_FIELDS = ("eps_S", "eps_T", "J_S", "J_T", "chi", "gamma",
                "sigma_eps_S", "sigma_eps_T", "sigma_J_S", "sigma_J_T",
                "sigma_chi", "sigma_gamma", "mu")
PHONON_FIELDS = ("omega0", "d_ph", "x0", "g_S", "g_T", "gamma_minus", "gamma_plus")


def resonant_params(j_s: float = -0.1, gamma: float = 0.05) -> ModelParams:
    """Resonant triplet-pair family: eps_T tuned so a triplet pair matches
    the delocalised bright singlet energy eps_S - 2|J_S| (requires J_S < 0,
    J_T = chi = 0)."""
    if not -0.5 < j_s < 0.0:
        raise ValueError("the resonant family needs -eps_S/2 < J_S < 0")
    return ModelParams(eps_S=1.0, eps_T=0.5 - abs(j_s), J_S=j_s, J_T=0.0,
                       chi=0.0, gamma=gamma)


#: Best coherent (phonon-free) solution found over the box, N = 10 reference.
OPTIMIZED_NONDISSIPATIVE = ModelParams(
    eps_S=1.0, eps_T=0.515, J_S=-0.001, J_T=0.3, chi=0.068, gamma=0.437,
    sigma_J_T=0.114, sigma_chi=0.005,
)

#: Best dissipative solution (exciton part), N = 2 reference.
OPTIMIZED_DISSIPATIVE = ModelParams(
    eps_S=1.0, eps_T=0.372, J_S=-0.001, J_T=0.0, chi=0.0, gamma=0.0103,
)

#: Phonon parameters of the dissipative solution.
OPTIMIZED_DISSIPATIVE_PHONONS = PhononParams(
    omega0=0.25, d_ph=4, x0=-0.035, g_S=0.0, g_T=0.0038,
    gamma_minus=0.1, gamma_plus=0.0,
)


def in_box(name: str, value: float) -> bool:
    lo, hi = PARAMETER_BOX[name]
    return lo <= value <= hi


def params_in_box(params: ModelParams) -> bool:
    """True if every boxed field of ``params`` lies inside the box."""
    return all(
        in_box(name, getattr(params, name))
        for name in PARAMETER_BOX
        if hasattr(params, name)
    )
