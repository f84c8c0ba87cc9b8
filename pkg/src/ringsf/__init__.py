"""Singlet fission in 1D exciton rings: exact sector dynamics and optimisation."""

__version__ = "0.1.0"

from .basis import (
    FullBasis,
    SectorBasis,
    count_particles,
    enumerate_full,
    enumerate_sector,
    ring_bonds,
)
from .dynamics import (
    MCWFConfig,
    PropagatorConfig,
    TimeGrid,
    propagate_liouville,
    propagate_mcwf,
    propagate_unitary,
)
from .hamiltonians import (
    build_exciton_hamiltonian,
    build_H_int,
    build_H_S,
    build_H_T,
    build_number_operators,
    build_spinful_H_int,
    build_spinful_H_T,
)
from .observables import (
    InitialStateSpec,
    ObservableSeries,
    efficiency,
    resonant_reference,
    select_initial_state,
    steady_state_reached,
    thermodynamic_efficiency,
    time_avg_efficiency,
    total_dipole_operator,
)
from .operators import DensityMatrix, Operator, StateVector
from .params import (
    OPTIMIZED_DISSIPATIVE,
    OPTIMIZED_DISSIPATIVE_PHONONS,
    OPTIMIZED_NONDISSIPATIVE,
    PARAMETER_BOX,
    DisorderRealization,
    ModelParams,
    PhononParams,
    SpinfulParams,
    resonant_params,
    sample_disorder,
    zero_disorder,
)
from .phonons import (
    EmbeddedBasis,
    LindbladSpec,
    build_dissipator,
    build_embedded_basis,
    build_H_ph,
    build_local_couplings,
    build_modulated_interaction,
    franck_condon_state,
)
