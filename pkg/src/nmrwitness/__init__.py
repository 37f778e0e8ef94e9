"""Simulator and analysis toolkit for witnessing the quantumness of
correlations in two-qubit room-temperature NMR states."""

__version__ = "0.1.0"

from .circuit import (
    Gate,
    ProtocolReadout,
    WitnessDirection,
    WitnessReport,
    cnot,
    local_magnetizations,
    pair_rotation,
    protocol_state,
    readout_sigma_x_a,
    rotation,
    run_protocol,
    sample_direction,
    witness,
)
from .correlations import (
    CorrelationReport,
    MeasurementBasis,
    OptimizerConfig,
    discord_epsilon,
    entropy,
    measure_map,
    measure_map_deviation,
    mim_epsilon,
    mutual_information,
    mutual_information_epsilon,
    symmetric_discord,
)
from .errors import (
    BadDistribution,
    BadIndex,
    EpsilonMismatch,
    NotAState,
    OptimizerFailure,
    SequenceMismatch,
    UnknownKind,
)
from .harness import (
    CrossCheckFailure,
    ExperimentConfig,
    RunReport,
    perturb_deviation,
    run_custom,
    run_experiment,
    run_fig2,
    run_fig3,
    run_fig4,
    validate_state_doc,
)
from .nmr import (
    DynamicsSeries,
    PulseEvent,
    SpinSystemParams,
    composite_cnot,
    composite_z_rotation,
    dynamics_sweep,
    free_evolution,
    gradient_dephase,
    ideal_deviation,
    load_pulse_sequence,
    prepare_state,
    pulse_sequence_to_json,
    relax,
    rf_pulse,
    thermal_equilibrium_state,
)
from .states import (
    BlochSpec,
    ClassicalSpec,
    DensityMatrix,
    DeviationState,
    bloch_decompose,
    classical_state,
    compose_deviation,
    extract_deviation,
    from_bloch,
    normalized_trace_distance,
    partial_trace,
    state_from_json,
    state_to_json,
)
