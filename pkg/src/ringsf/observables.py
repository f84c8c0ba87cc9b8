"""Initial-state selection, optical dipole, and efficiency functionals.

The fission figure of merit is ``eta(t) = <N_T>_t / (2 <N_S>_0)``: the
conservation of C = 2 N_S + N_T bounds ``<N_T>_t`` by twice the initial
singlet number, so eta lives in [0, 1].  ``eta_bar`` is its running time
average; in dissipative runs eta is instead read out at the final time after
a steady-state check.
"""

from __future__ import annotations

import warnings
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .basis import (
    S0,
    S1,
    Basis,
    Config,
    FullBasis,
    SectorBasis,
    enumerate_sector,
    iter_singlet_placements,
    ring_bonds,
)
from .errors import BasisMismatchError
from .operators import Operator, StateVector, operator_from_entries
from .params import DisorderRealization, ModelParams, zero_disorder

_trapezoid = getattr(np, "trapezoid", None) or np.trapz

ETA_GUARD = 1e-6  # factory hard-fails beyond this bound violation


@dataclass
class ObservableSeries:
    """Time series of the standard observables of one run."""

    times: np.ndarray
    n_s: np.ndarray
    n_t: np.ndarray
    cqn: np.ndarray  # <C> = 2 <N_S> + <N_T>
    eta: np.ndarray
    stderr_n_s: np.ndarray | None = None
    stderr_n_t: np.ndarray | None = None
    stderr_cqn: np.ndarray | None = None
    stderr_eta: np.ndarray | None = None

    @classmethod
    def from_counts(cls, times, n_s, n_t, n_s0: float | None = None,
                    **stderr) -> "ObservableSeries":
        times = np.asarray(times, dtype=float)
        n_s = np.asarray(n_s, dtype=float)
        n_t = np.asarray(n_t, dtype=float)
        cqn = 2.0 * n_s + n_t
        if n_s0 is None:
            n_s0 = float(n_s[0])
        eta = efficiency(n_t, n_s0)
        if np.any(n_t > cqn[0] + 1e-6):
            raise ValueError("triplet number exceeds the conserved-quantity bound")
        return cls(times, n_s, n_t, cqn, np.clip(eta, 0.0, 1.0), **stderr)

    @property
    def has_stderr(self) -> bool:
        return self.stderr_eta is not None


def efficiency(n_t, n_s0: float) -> np.ndarray:
    """eta = <N_T> / (2 <N_S>_0), checked against its [0, 1] bound."""
    if n_s0 == 0:
        raise ZeroDivisionError("efficiency undefined for zero initial singlets")
    eta = np.asarray(n_t, dtype=float) / (2.0 * n_s0)
    if np.any(eta < -ETA_GUARD) or np.any(eta > 1.0 + ETA_GUARD):
        raise ValueError("efficiency outside [0, 1] beyond numerical tolerance")
    return eta


def time_avg_efficiency(times, eta, tau: float | None = None,
                        min_points: int = 50) -> tuple[float, float]:
    """Trapezoidal time average of eta over [0, tau] and the RMS fluctuation
    of eta around that average on the same window."""
    times = np.asarray(times, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if tau is None:
        tau = float(times[-1])
    if tau > times[-1] + 1e-12:
        raise ValueError(f"tau = {tau} exceeds the simulated horizon {times[-1]}")
    mask = times <= tau + 1e-12
    t_win, eta_win = times[mask], eta[mask]
    if len(t_win) < min_points:
        warnings.warn(
            f"only {len(t_win)} grid points in [0, tau]; the time average may be coarse",
            stacklevel=2,
        )
    if len(t_win) < 2 or t_win[-1] == 0.0:
        return float(eta_win[0]), 0.0
    span = t_win[-1] - t_win[0]
    mean = float(_trapezoid(eta_win, t_win) / span)
    fluct = float(np.sqrt(_trapezoid((eta_win - mean) ** 2, t_win) / span))
    return mean, fluct


def thermodynamic_efficiency(eps_s: float, eps_t: float) -> float:
    """1 - Q_out / eps_S with Q_out = eps_S - 2 eps_T: the fraction of the
    absorbed photon energy retained by the triplet pair."""
    if eps_s <= 0:
        raise ValueError("eps_S must be > 0")
    return 1.0 - (eps_s - 2.0 * eps_t) / eps_s


def resonant_reference(gamma: float, times) -> np.ndarray:
    """Closed-form triplet number of the resonant triplet-pair solution:
    cos(4 gamma t + pi) + 1, for one initial delocalised singlet."""
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    t = np.asarray(times, dtype=float)
    return np.cos(4.0 * gamma * t + np.pi) + 1.0


def steady_state_reached(times, eta, gamma: float, window_fraction: float = 0.1,
                         rel_tol: float = 1e-4) -> bool:
    """True when |d eta/dt| < rel_tol * gamma over the last window of the run."""
    times = np.asarray(times, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if len(times) < 3:
        return False
    t_start = times[-1] - window_fraction * (times[-1] - times[0])
    mask = times >= t_start
    if mask.sum() < 2:
        return False
    slopes = np.diff(eta[mask]) / np.diff(times[mask])
    return bool(np.abs(slopes).max() < rel_tol * gamma)


@dataclass(frozen=True)
class SectorUnion:
    """Concatenation of adjacent C sectors, used to represent the dipole."""

    N: int
    spin_mode: str
    sector_values: tuple[int, ...]
    configs: tuple[Config, ...]
    index_of: dict[Config, int] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.configs)

    @property
    def tag(self) -> str:
        cs = ",".join(str(c) for c in self.sector_values)
        return f"union(N={self.N},C={{{cs}}},{self.spin_mode})"


def total_dipole_operator(basis: Basis, mu: float) -> tuple[Operator, Basis | SectorUnion]:
    """Total optical dipole ``M = mu sum_i (S_i^dag + S_i)``.

    M changes C by +-2, so on a sector basis it is represented on the union
    of the adjacent sectors (C0 - 2, C0, C0 + 2 where they exist); on a full
    basis it acts directly.  Returns the operator and the basis it lives on.
    """
    if isinstance(basis, FullBasis):
        home: Basis | SectorUnion = basis
    else:
        values = [c for c in (basis.C0 - 2, basis.C0, basis.C0 + 2)
                  if 0 <= c <= 2 * basis.N]
        configs: list[Config] = []
        for c in values:
            configs.extend(enumerate_sector(basis.N, c, basis.spin_mode).configs)
        index_of = {cfg: i for i, cfg in enumerate(configs)}
        home = SectorUnion(basis.N, basis.spin_mode, tuple(values),
                           tuple(configs), index_of)
    entries: dict[tuple[int, int], complex] = defaultdict(complex)
    for a, cfg in enumerate(home.configs):
        for i in range(len(cfg)):
            if cfg[i] == S0:
                tgt = list(cfg)
                tgt[i] = S1
                key = tuple(tgt)
                if key in home.index_of:
                    entries[(home.index_of[key], a)] += mu
    op = operator_from_entries(entries, home.dim, home.tag)
    return Operator(op.matrix + op.matrix.conj().T, home.tag), home


@dataclass(frozen=True)
class InitialStateSpec:
    """How to pick the photoexcited state: ``n0`` singlets, no triplets."""

    n0: int = 1
    method: str = "brightest_eigenstate"

    def __post_init__(self) -> None:
        if self.n0 < 1:
            raise ValueError("n0 must be >= 1")
        if self.method not in ("brightest_eigenstate", "sector_ground_state",
                               "w_state"):
            raise ValueError(f"unknown initial-state method {self.method!r}")


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate so the largest-magnitude amplitude is real and positive."""
    k = int(np.argmax(np.abs(vec)))
    phase = vec[k] / abs(vec[k])
    out = vec / phase
    # kill the residual imaginary dust on the pivot
    out[k] = abs(out[k])
    return out


def _singlet_block(n_sites: int, k: int, params: ModelParams,
                   realization: DisorderRealization) -> tuple[list[Config], np.ndarray]:
    """Pure-singlet configurations with k excitations and the H_S block
    restricted to them (dense)."""
    configs = list(iter_singlet_placements(n_sites, k))
    index = {cfg: i for i, cfg in enumerate(configs)}
    dim = len(configs)
    h = np.zeros((dim, dim), dtype=complex)
    eps = params.eps_S + realization.delta_eps_S
    hop = params.J_S + realization.delta_J_S
    bonds = ring_bonds(n_sites)
    for a, cfg in enumerate(configs):
        h[a, a] = sum(eps[i] for i in range(n_sites) if cfg[i] == S1)
        for b, (i, j) in enumerate(bonds):
            for src, dst in ((j, i), (i, j)):
                if cfg[src] == S1 and cfg[dst] == S0:
                    tgt = list(cfg)
                    tgt[src], tgt[dst] = S0, S1
                    h[index[tuple(tgt)], a] += hop[b]
    return configs, h


def _dipole_block(n_sites: int, k: int, mu: float) -> np.ndarray:
    """Rectangular M block raising (k-1)-singlet placements to k-singlet ones."""
    lower = list(iter_singlet_placements(n_sites, k - 1))
    upper = {cfg: i for i, cfg in enumerate(iter_singlet_placements(n_sites, k))}
    block = np.zeros((len(upper), len(lower)))
    for col, cfg in enumerate(lower):
        for i in range(n_sites):
            if cfg[i] == S0:
                tgt = list(cfg)
                tgt[i] = S1
                block[upper[tuple(tgt)], col] = mu
    return block


def _brightest_in_block(h_block: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Eigenstate of h_block maximising |<target|psi>|, resolving degenerate
    eigenspaces by projecting the dipole-image vector onto each cluster.

    Ties (equal brightness within tolerance) resolve to the lowest-energy
    cluster; the returned state's global phase is fixed deterministically.
    """
    energies, vectors = np.linalg.eigh(h_block)
    scale = max(1.0, float(np.abs(energies).max()))
    tol = 1e-10 * scale
    best_vec, best_val = None, -1.0
    start = 0
    while start < len(energies):
        stop = start + 1
        while stop < len(energies) and energies[stop] - energies[stop - 1] <= tol:
            stop += 1
        cluster = vectors[:, start:stop]
        coeffs = cluster.conj().T @ target
        brightness = float(np.linalg.norm(coeffs))
        if brightness > best_val + 1e-12 * max(1.0, best_val):
            best_val = brightness
            best_vec = cluster @ coeffs
        start = stop
    if best_val < 1e-14:  # dipole functional vanished; fall back to the ground state
        return _fix_phase(vectors[:, 0])
    return _fix_phase(best_vec / np.linalg.norm(best_vec))


def select_initial_state(spec: InitialStateSpec, basis: SectorBasis,
                         params: ModelParams,
                         realization: DisorderRealization | None = None) -> StateVector:
    """Photoexcited exciton state in the ``C0 = 2 n0`` sector.

    * ``brightest_eigenstate``: diagonalise the n0-singlet block of H_S and
      return the eigenstate with the strongest dipole matrix element from the
      (n0-1)-singlet bright state, built recursively from the vacuum.  In a
      degenerate block the dipole functional selects the optimal combination
      inside the eigenspace (for J_S = 0 this is the uniform superposition).
    * ``sector_ground_state``: minimum-energy eigenstate of that block.
    * ``w_state``: the uniform single-excitation superposition (n0 = 1 only).
    """
    if not isinstance(basis, SectorBasis):
        raise BasisMismatchError("initial states are defined on a sector basis")
    if spec.n0 > basis.N:
        raise ValueError(f"n0 = {spec.n0} exceeds the ring size {basis.N}")
    if basis.C0 != 2 * spec.n0:
        raise BasisMismatchError(
            f"initial state with {spec.n0} singlets needs the C = {2 * spec.n0} "
            f"sector, got {basis.tag}"
        )
    realization = realization if realization is not None else zero_disorder(basis.N)

    if spec.method == "w_state":
        if spec.n0 != 1:
            raise ValueError("w_state is defined for n0 = 1 only")
        amplitudes = np.zeros(basis.dim, dtype=complex)
        for cfg in iter_singlet_placements(basis.N, 1):
            amplitudes[basis.index_of[cfg]] = 1.0 / np.sqrt(basis.N)
        return StateVector(amplitudes, basis.tag)

    configs, h_block = _singlet_block(basis.N, spec.n0, params, realization)
    if spec.method == "sector_ground_state":
        _, vectors = np.linalg.eigh(h_block)
        block_state = _fix_phase(vectors[:, 0])
    else:
        bright = np.ones(1, dtype=complex)  # vacuum block
        for k in range(1, spec.n0 + 1):
            _, h_k = _singlet_block(basis.N, k, params, realization)
            target = _dipole_block(basis.N, k, params.mu) @ bright
            bright = _brightest_in_block(h_k, target)
        block_state = bright
    amplitudes = np.zeros(basis.dim, dtype=complex)
    for i, cfg in enumerate(configs):
        amplitudes[basis.index_of[cfg]] = block_state[i]
    return StateVector(amplitudes, basis.tag).require_normalized(1e-10)


def series_from_states(times, states: list[StateVector], ns_diag: np.ndarray,
                       nt_diag: np.ndarray, n_s0: float | None = None) -> ObservableSeries:
    """Observable series of a pure-state trajectory (diagonal counters)."""
    amps = np.array([s.amplitudes for s in states])
    probs = np.abs(amps) ** 2
    return ObservableSeries.from_counts(times, probs @ ns_diag, probs @ nt_diag,
                                        n_s0=n_s0)
