"""STIRAP in a three-level transmon: simulation and experiment harness."""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    ComplexMatrix,
    DensityMatrix,
    Ket,
    ValidityReport,
    basis_ket,
    dm_from_ket,
    jacobi_eigh,
    populations,
    sigma_op,
    validate_density_matrix,
)
from .errors import (  # noqa: F401
    ConfigurationError,
    IntegrationFailureError,
    InvalidPulseError,
    InvalidStateError,
    MaxIterationsError,
    NonAdiabaticRunError,
    NonDispersiveError,
    NumericalError,
    PreconditionError,
    SingularDesignError,
    SingularPointError,
    StirapError,
    UndefinedFrameError,
)
from .hamiltonian import (  # noqa: F401
    AdiabaticFrame,
    CavityParams,
    DispersiveShifts,
    DriveSample,
    SplitSpec,
    TransmonParams,
    adiabatic_frame,
    build_rotating_hamiltonian,
    build_split_hamiltonian,
    dispersive_shifts,
)
from .holonomy import (  # noqa: F401
    OraclePhase,
    ParameterPath,
    PhaseResult,
    adiabatic_phase_oracle,
    berry_phase,
    berry_vs_oracle,
    plateau_phase_sequence,
    realized_path,
)
from .lindblad import (  # noqa: F401
    Jump,
    LindbladSpec,
    SimResult,
    TimeGrid,
    build_dissipators,
    evolve,
    lindblad_rhs,
)
from .pulses import (  # noqa: F401
    AdiabaticityReport,
    Convention,
    FastPulse,
    GaussianPulse,
    PhaseRamp,
    PulseSequence,
    SequenceKind,
    Transition,
    build_sequence,
    gaussian_envelope,
    global_adiabaticity_metric,
    local_adiabaticity,
    two_pulse_sequence,
)
from .tomography import (  # noqa: F401
    MeasuredTrace,
    ReferenceTrace,
    TomographyResult,
    mix_traces,
    reconstruct_populations,
    synth_reference_traces,
    tomography_timeline,
)
from .units import mhz_to_rad_ns, rad_ns_to_mhz, rate_mhz_to_per_ns  # noqa: F401
