"""Time propagation: closed unitary, exact Liouville-space GKSL, and Monte
Carlo wavefunction (quantum trajectory) unraveling.

Engines
-------
* Small problems use exact eigendecomposition (Hermitian for closed dynamics,
  general for the non-Hermitian effective trajectory generator), which
  evaluates the propagator at every output time to machine precision.
* Larger problems use the exponential-action algorithm behind
  ``scipy.sparse.linalg.expm_multiply``, which plays the role of an adaptive
  Krylov-type propagator with near-machine accuracy per step.
* The GKSL generator is vectorised row-major: with ``vec(rho)`` flattened in
  C order, ``A rho B -> kron(A, B.T) vec(rho)``.

The trajectory unraveling uses the waiting-time algorithm: evolve under
``H_eff = H - (i/2) sum_k rate_k L_k^dag L_k``, draw u ~ U(0,1), bisect the
time where the squared norm crosses u, then jump through channel k with
probability proportional to ``rate_k ||L_k psi||^2``.  This samples jump
times exactly rather than to first order in the step.

``expm_multiply`` estimates matrix 1-norms with a randomized probe that
consumes NumPy's *global* RNG; every call here is wrapped in a fixed-seed
save/restore of that global state so outputs are bit-reproducible.
"""

from __future__ import annotations

import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from . import rng
from .errors import DimensionOverflowError, PropagationError
from .operators import DensityMatrix, Operator, StateVector, require_same_basis
from .phonons import LindbladSpec

HBAR = 1.0  # energies in eV, times in 1/eV


@dataclass(frozen=True)
class TimeGrid:
    """Uniform output grid from 0 to t_max (1/eV)."""

    t_max: float
    n_out: int = 200

    def __post_init__(self) -> None:
        if self.t_max < 0:
            raise ValueError("t_max must be >= 0")
        if self.n_out < 1:
            raise ValueError("n_out must be >= 1")

    def times(self) -> np.ndarray:
        if self.t_max == 0.0:
            return np.zeros(1)
        return np.linspace(0.0, self.t_max, self.n_out)

    @classmethod
    def over_coupling(cls, gamma: float, tau_over_gamma: float = 20.0,
                      n_out: int = 400) -> "TimeGrid":
        """Horizon expressed as a multiple of 1/gamma."""
        if gamma <= 0:
            raise ValueError("gamma must be > 0 to set the horizon in 1/gamma units")
        return cls(tau_over_gamma / gamma, n_out)


@dataclass(frozen=True)
class MCWFConfig:
    n_traj: int = 1000
    seed: int = 0
    jump_bisection_tol: float = 1e-10  # on the squared norm
    dense_cutoff: int = 512

    def __post_init__(self) -> None:
        if self.n_traj < 1:
            raise ValueError("n_traj must be >= 1")
        if self.jump_bisection_tol <= 0:
            raise ValueError("jump_bisection_tol must be > 0")


@dataclass(frozen=True)
class PropagatorConfig:
    method: str = "auto"  # auto | krylov | dense_expm
    tolerance: float = 1e-10
    dense_cutoff: int = 256
    liouville_dim_cap: int = 2000
    liouville_dense_cutoff: int = 1024  # on the vectorised dimension
    mcwf: MCWFConfig = field(default_factory=MCWFConfig)

    def __post_init__(self) -> None:
        if self.tolerance <= 0:
            raise ValueError("tolerance must be > 0")
        if self.method not in ("auto", "krylov", "dense_expm"):
            raise ValueError(f"unknown propagation method {self.method!r}")

    def with_mcwf(self, **changes) -> "PropagatorConfig":
        return replace(self, mcwf=replace(self.mcwf, **changes))


_NORMEST_SEED = 0x1E57A11



@contextmanager
def _seeded_global_rng():
    """Pin NumPy's legacy global RNG around expm_multiply's norm estimator."""
    state = np.random.get_state()
    np.random.seed(_NORMEST_SEED)
    try:
        yield
    finally:
        np.random.set_state(state)


def _expm_multiply_grid(a: sp.spmatrix, v: np.ndarray, times: np.ndarray) -> np.ndarray:
    """exp(a t_k) v on a uniform grid including t=0; returns (n_t, dim)."""
    if len(times) == 1:
        return v[np.newaxis, :].copy()
    with _seeded_global_rng():
        out = expm_multiply(a, v, start=times[0], stop=times[-1],
                            num=len(times), endpoint=True)
    return np.asarray(out)


def _use_dense(dim: int, method: str, cutoff: int) -> bool:
    if method == "dense_expm":
        return True
    if method == "krylov":
        return False
    return dim <= cutoff


def propagate_unitary(h: Operator, psi0: StateVector, grid: TimeGrid,
                      config: PropagatorConfig | None = None) -> list[StateVector]:
    """Closed evolution psi(t_k) = exp(-i H t_k) psi0 on the output grid."""
    config = config or PropagatorConfig()
    require_same_basis(h, psi0)
    h.require_hermitian(1e-10)
    psi0.require_normalized(1e-10)
    times = grid.times()

    if _use_dense(h.dim, config.method, config.dense_cutoff):
        energies, vectors = np.linalg.eigh(h.to_dense())
        coeffs = vectors.conj().T @ psi0.amplitudes
        phases = np.exp(-1j * np.outer(times, energies))
        states = (vectors @ (phases * coeffs[np.newaxis, :]).T).T
    else:
        states = _expm_multiply_grid(-1j * h.matrix, psi0.amplitudes, times)

    norms = np.linalg.norm(states, axis=1)
    budget = config.tolerance * max(1.0, grid.t_max)
    drift = float(np.abs(norms - 1.0).max())
    if drift > max(budget, 1e-9):
        raise PropagationError(f"norm drift {drift:.3e} exceeds budget {budget:.1e}")
    return [StateVector(states[k], h.basis_tag) for k in range(len(times))]


def liouvillian_matrix(h: Operator, dissipator: LindbladSpec | None) -> sp.csr_matrix:
    """Vectorised GKSL generator (row-major convention)."""
    dim = h.dim
    eye = sp.identity(dim, dtype=complex, format="csr")
    hm = h.matrix
    gen = -1j * (sp.kron(hm, eye, format="csr") - sp.kron(eye, hm.T, format="csr"))
    if dissipator is not None:
        for op, rate in dissipator.jumps:
            lm = op.matrix
            ldl = (lm.conj().T @ lm).tocsr()
            gen = gen + rate * (
                sp.kron(lm, lm.conj(), format="csr")
                - 0.5 * sp.kron(ldl, eye, format="csr")
                - 0.5 * sp.kron(eye, ldl.T, format="csr")
            )
    return gen.tocsr()


@dataclass
class LiouvilleResult:
    times: np.ndarray
    expectations: np.ndarray | None  # (n_obs, n_t), real parts
    final: DensityMatrix
    states: list[DensityMatrix] | None = None


def propagate_liouville(h: Operator, dissipator: LindbladSpec | None,
                        rho0: DensityMatrix, grid: TimeGrid,
                        config: PropagatorConfig | None = None,
                        observables: list[Operator] | None = None,
                        keep_states: bool = True) -> LiouvilleResult:
    """Exact GKSL propagation of the density matrix on the output grid.

    For vectorised dimensions up to ``liouville_dense_cutoff`` a dense
    eigendecomposition of the generator evaluates every output time directly;
    beyond that the sparse exponential-action engine steps the grid.
    """
    config = config or PropagatorConfig()
    require_same_basis(h, rho0)
    if dissipator is not None and not dissipator.is_empty:
        require_same_basis(h, *(op for op, _ in dissipator.jumps))
    if h.dim > config.liouville_dim_cap:
        raise DimensionOverflowError(
            f"Liouville propagation capped at dim {config.liouville_dim_cap}, "
            f"got {h.dim}"
        )
    h.require_hermitian(1e-10)
    rho0.validate()

    times = grid.times()
    gen = liouvillian_matrix(h, dissipator)
    vec0 = rho0.matrix.reshape(-1)
    dim = h.dim

    if gen.shape[0] <= config.liouville_dense_cutoff and config.method != "krylov":
        dense = gen.toarray()
        lam, w = scipy.linalg.eig(dense)
        coeffs = np.linalg.solve(w, vec0)
        residual = float(np.abs(dense @ w - w * lam[np.newaxis, :]).max())
        scale = max(1.0, float(np.abs(dense).max()))
        if residual > 1e-8 * scale:  # fall back if the eigenbasis is poor
            vecs = _expm_multiply_grid(gen, vec0, times)
        else:
            phases = np.exp(np.outer(times, lam))
            vecs = (w @ (phases * coeffs[np.newaxis, :]).T).T
    else:
        vecs = _expm_multiply_grid(gen, vec0, times)

    n_t = len(times)
    exp_out = None
    if observables is not None:
        require_same_basis(h, *observables)
        exp_out = np.empty((len(observables), n_t))
    states: list[DensityMatrix] | None = [] if keep_states else None
    final: DensityMatrix | None = None
    for k in range(n_t):
        rho = vecs[k].reshape(dim, dim)
        tr = np.trace(rho)
        if abs(tr - 1.0) > 1e-8:
            raise PropagationError(f"trace drift {abs(tr - 1.0):.3e} at t={times[k]:.3g}")
        dm = DensityMatrix(rho, h.basis_tag)
        if exp_out is not None:
            for i, op in enumerate(observables):
                exp_out[i, k] = dm.expect(op).real
        if states is not None:
            states.append(dm)
        if k == n_t - 1:
            final = dm
    return LiouvilleResult(times, exp_out, final, states)


class _EffectiveEigPropagator:
    """Dense eigendecomposition of a (generally non-Hermitian) generator."""

    def __init__(self, h_eff: np.ndarray):
        self.lam, self.vectors = scipy.linalg.eig(h_eff)
        self.inv = np.linalg.inv(self.vectors)
        scale = max(1.0, float(np.abs(h_eff).max()))
        residual = float(
            np.abs(h_eff @ self.vectors - self.vectors * self.lam[np.newaxis, :]).max()
        )
        self.ok = residual <= 1e-9 * scale

    def evolve(self, psi: np.ndarray, dt: float) -> np.ndarray:
        return self.vectors @ (np.exp(-1j * self.lam * dt) * (self.inv @ psi))


class _EffectiveKrylovPropagator:
    """Exponential-action fallback for large effective generators."""

    def __init__(self, h_eff: sp.spmatrix):
        self.a = sp.csr_matrix(-1j * h_eff)

    def evolve(self, psi: np.ndarray, dt: float) -> np.ndarray:
        if dt == 0.0:
            return psi.copy()
        with _seeded_global_rng():
            return np.asarray(expm_multiply(self.a * dt, psi))


@dataclass
class MCWFResult:
    """Trajectory ensemble: per-trajectory observable series and statistics."""

    times: np.ndarray
    observable_values: np.ndarray  # (n_traj, n_obs, n_t)
    mean: np.ndarray  # (n_obs, n_t)
    stderr: np.ndarray  # (n_obs, n_t)
    n_jumps: np.ndarray  # per trajectory

    @property
    def n_traj(self) -> int:
        return self.observable_values.shape[0]


def _run_trajectory(propagator, jump_ops: list[tuple[sp.csr_matrix, float]],
                    psi0: np.ndarray, times: np.ndarray,
                    obs_mats: list[sp.csr_matrix], seed: int,
                    bisect_tol: float) -> tuple[np.ndarray, int]:
    gen = rng.generator(seed)
    n_obs, n_t = len(obs_mats), len(times)
    out = np.empty((n_obs, n_t))
    psi = psi0.copy()

    def record(k: int, state: np.ndarray) -> None:
        nrm = np.linalg.norm(state)
        normed = state / nrm
        for i, mat in enumerate(obs_mats):
            out[i, k] = np.vdot(normed, mat @ normed).real

    record(0, psi)
    threshold = gen.random()
    jumps = 0
    for k in range(1, n_t):
        remaining = times[k] - times[k - 1]
        while True:
            trial = propagator.evolve(psi, remaining)
            norm2 = float(np.vdot(trial, trial).real)
            if norm2 >= threshold:
                psi = trial
                break
            # a jump happens inside this interval: bisect its time
            lo, hi = 0.0, remaining
            psi_hi = trial
            n2_hi = norm2
            for _ in range(200):
                if abs(n2_hi - threshold) <= bisect_tol:
                    break
                mid = 0.5 * (lo + hi)
                trial_mid = propagator.evolve(psi, mid)
                n2_mid = float(np.vdot(trial_mid, trial_mid).real)
                if n2_mid >= threshold:
                    lo = mid
                else:
                    hi, psi_hi, n2_hi = mid, trial_mid, n2_mid
            t_jump = hi
            at_jump = psi_hi
            weights = np.array(
                [rate * float(np.vdot(mat @ at_jump, mat @ at_jump).real)
                 for mat, rate in jump_ops]
            )
            total = weights.sum()
            if total <= 0.0:  # norm loss without open channel: numerically dead end
                psi = at_jump / np.linalg.norm(at_jump)
                threshold = gen.random()
                remaining -= t_jump
                continue
            pick = np.searchsorted(np.cumsum(weights) / total, gen.random())
            pick = min(pick, len(jump_ops) - 1)
            post = jump_ops[pick][0] @ at_jump
            psi = post / np.linalg.norm(post)
            jumps += 1
            threshold = gen.random()
            remaining -= t_jump
            if remaining <= 0.0:
                break
        record(k, psi)
    return out, jumps


def propagate_mcwf(h: Operator, dissipator: LindbladSpec, psi0: StateVector,
                   grid: TimeGrid, observables: list[Operator],
                   config: PropagatorConfig | None = None) -> MCWFResult:
    """Monte Carlo wavefunction unraveling of the GKSL equation.

    Per-trajectory RNG streams derive deterministically from
    ``(mcwf.seed, trajectory index)``; trajectory averages converge to the
    Liouville solution and the reported standard error is across trajectories.
    """
    config = config or PropagatorConfig()
    mc = config.mcwf
    require_same_basis(h, psi0, *observables)
    if not dissipator.is_empty:
        require_same_basis(h, *(op for op, _ in dissipator.jumps))
    h.require_hermitian(1e-10)
    psi0.require_normalized(1e-10)

    jump_ops = [(op.matrix, rate) for op, rate in dissipator.jumps]
    h_eff = sp.csr_matrix(h.matrix, dtype=complex, copy=True)
    for mat, rate in jump_ops:
        h_eff = h_eff - 0.5j * rate * (mat.conj().T @ mat)

    if h.dim <= mc.dense_cutoff and config.method != "krylov":
        propagator = _EffectiveEigPropagator(h_eff.toarray())
        if not propagator.ok:
            warnings.warn("effective-generator eigenbasis ill-conditioned; "
                          "falling back to exponential-action stepping")
            propagator = _EffectiveKrylovPropagator(h_eff)
    else:
        propagator = _EffectiveKrylovPropagator(h_eff)

    times = grid.times()
    obs_mats = [op.matrix for op in observables]
    values = np.empty((mc.n_traj, len(observables), len(times)))
    n_jumps = np.zeros(mc.n_traj, dtype=int)
    for traj in range(mc.n_traj):
        seed = rng.derive_seed(mc.seed, traj)
        values[traj], n_jumps[traj] = _run_trajectory(
            propagator, jump_ops, psi0.amplitudes, times, obs_mats, seed,
            mc.jump_bisection_tol,
        )
    mean = values.mean(axis=0)
    if mc.n_traj > 1:
        stderr = values.std(axis=0, ddof=1) / np.sqrt(mc.n_traj)
    else:
        stderr = np.zeros_like(mean)
    return MCWFResult(times, values, mean, stderr, n_jumps)
