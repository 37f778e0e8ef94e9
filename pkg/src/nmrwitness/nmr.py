"""Pulse-level simulation of the two-spin (1H, 13C) experiment.

Covers the on-resonance rotating-frame dynamics (J coupling plus rf pulses),
the composite z-rotation and CNOT sequences, gradient dephasing, T1/T2*
relaxation channels, preparation of the documented initial states at both
deviation and pulse level, and the relaxation sweep that traces the witness
and the correlation quantifiers over time.

Pulse sequences are stored in time order (first event acts first).  The rf
convention is exp(-i * angle * (cos(phase) sx + sin(phase) sy) / 2); under it
the nine-pulse CNOT sequence reproduces the ideal gate exactly when read in
time order, while the three-pulse z-rotation must be read as an operator
product (reversed time order) to give R_z(+pi/2) rather than its inverse.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .circuit import WitnessDirection, cnot, sample_direction, witness
from .correlations import OptimizerConfig, discord_epsilon
from .errors import BadIndex, SequenceMismatch, UnknownKind
from .pauli import IDENTITY_2, IDENTITY_4, SIGMA_X, SIGMA_Y, SIGMA_Z, on_a, on_b
from .states import (
    DensityMatrix,
    DeviationState,
    compose_deviation,
    extract_deviation,
)


@dataclass(frozen=True)
class SpinSystemParams:
    """Measured constants of the chloroform two-spin system."""

    j_coupling: float = 215.1          # Hz
    t1_h: float = 2.5                  # s
    t1_c: float = 7.0                  # s
    t2s_h: float = 0.31                # s, effective transverse (line width)
    t2s_c: float = 0.12                # s
    pulse_pi2_h: float = 7.4e-6        # s
    pulse_pi2_c: float = 9.6e-6        # s
    epsilon: float = 1e-5
    gamma_ratio: float = 3.98          # omega_H / omega_C
    offset_h: float = 0.0              # Hz, rotating-frame offset (on resonance)
    offset_c: float = 0.0              # Hz

    _POSITIVE = ("j_coupling", "t1_h", "t1_c", "t2s_h", "t2s_c",
                 "pulse_pi2_h", "pulse_pi2_c", "epsilon", "gamma_ratio")

    def __post_init__(self):
        for name in self._POSITIVE:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        # T2* is the total transverse rate; it cannot be slower than the
        # longitudinal contribution alone.
        if self.t2s_h > 2 * self.t1_h or self.t2s_c > 2 * self.t1_c:
            raise ValueError("T2* must not exceed 2*T1")


@dataclass(frozen=True)
class PulseEvent:
    """One step of a pulse program: an rf pulse, a J-coupling delay, or a
    z-gradient crusher."""

    kind: str                          # rf | delay | gradient
    channel: str = "H"                 # rf only: H | C | both
    angle: float = 0.0                 # rad, rf only
    phase: float = 0.0                 # rad, rf axis azimuth
    duration: float | None = None      # s, rf only; default from calibration
    j_units: float = 0.0               # delay length in units of 1/J

    def __post_init__(self):
        if self.kind not in ("rf", "delay", "gradient"):
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.kind == "rf":
            if self.channel not in ("H", "C", "both"):
                raise ValueError(f"unknown channel {self.channel!r}")
            if not 0.0 < self.angle <= 2 * np.pi:
                raise ValueError(f"rf angle must be in (0, 2pi], got {self.angle}")
        if self.kind == "delay" and self.j_units < 0:
            raise ValueError("delay must be nonnegative")


def rf(channel: str, angle: float, phase: float) -> PulseEvent:
    return PulseEvent(kind="rf", channel=channel, angle=angle, phase=phase)


def delay(j_units: float) -> PulseEvent:
    return PulseEvent(kind="delay", j_units=j_units)


def gradient() -> PulseEvent:
    return PulseEvent(kind="gradient")


@dataclass(frozen=True)
class DynamicsSeries:
    """Witness and correlation quantifiers along a relaxation sweep."""

    times: np.ndarray                  # s
    witness_values: np.ndarray
    mutual_info: np.ndarray            # (epsilon^2/ln2) bit
    quantum: np.ndarray
    classical: np.ndarray
    deviations: tuple

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        for name in ("times", "witness_values", "mutual_info", "quantum", "classical"):
            v = np.array(getattr(self, name), dtype=float)
            v.flags.writeable = False
            object.__setattr__(self, name, v)

    def to_csv(self) -> str:
        lines = ["t_s,W,I,Q,C"]
        for k in range(len(self.times)):
            row = (self.times[k], self.witness_values[k], self.mutual_info[k],
                   self.quantum[k], self.classical[k])
            lines.append(",".join(f"{v:.12g}" for v in row))
        return "\n".join(lines) + "\n"

    def first_time_below(self, series: str, threshold: float) -> float | None:
        values = getattr(self, series)
        below = np.nonzero(values < threshold)[0]
        return float(self.times[below[0]]) if below.size else None


# --- coherent dynamics -------------------------------------------------------


def _drift_diagonal(params: SpinSystemParams) -> np.ndarray:
    """Diagonal of the drift Hamiltonian: J coupling plus any rotating-frame
    offsets (zero on resonance, the experimental default)."""
    h = 2 * np.pi * params.j_coupling / 4.0 * np.array([1.0, -1.0, -1.0, 1.0])
    h -= 2 * np.pi * params.offset_h / 2.0 * np.array([1.0, 1.0, -1.0, -1.0])
    h -= 2 * np.pi * params.offset_c / 2.0 * np.array([1.0, -1.0, 1.0, -1.0])
    return h


def free_evolution_propagator(tau: float, params: SpinSystemParams) -> np.ndarray:
    """exp(-i H_drift tau); the drift is diagonal, so no matrix exponential."""
    return np.diag(np.exp(-1j * _drift_diagonal(params) * tau))


def free_evolution(rho: DensityMatrix, tau: float, params: SpinSystemParams) -> DensityMatrix:
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    u = free_evolution_propagator(tau, params)
    return DensityMatrix(u @ rho.matrix @ u.conj().T)


def _rf_axis(phase: float) -> np.ndarray:
    return np.cos(phase) * SIGMA_X + np.sin(phase) * SIGMA_Y


def rf_propagator(event: PulseEvent, params: SpinSystemParams, model: str = "instantaneous") -> np.ndarray:
    """4x4 unitary for an rf pulse.

    The instantaneous model is the ideal rotation.  The finite model
    integrates rf and J coupling together over the calibrated duration
    (channels of a 'both' pulse are played back to back).
    """
    if event.kind != "rf":
        raise ValueError("not an rf event")
    if model == "instantaneous":
        r = expm(-1j * event.angle * _rf_axis(event.phase) / 2.0)
        if event.channel == "H":
            return on_a(r)
        if event.channel == "C":
            return on_b(r)
        return np.kron(r, r)
    if model != "finite":
        raise ValueError(f"unknown pulse model {model!r}")

    def one_channel(channel: str) -> np.ndarray:
        pi2 = params.pulse_pi2_h if channel == "H" else params.pulse_pi2_c
        t_p = event.duration if event.duration is not None else pi2 * event.angle / (np.pi / 2)
        omega1 = event.angle / t_p
        h_rf = omega1 * _rf_axis(event.phase) / 2.0
        h_rf = on_a(h_rf) if channel == "H" else on_b(h_rf)
        return expm(-1j * t_p * (h_rf + np.diag(_drift_diagonal(params))))

    if event.channel == "both":
        return one_channel("C") @ one_channel("H")
    return one_channel(event.channel)


def rf_pulse(rho: DensityMatrix, event: PulseEvent, params: SpinSystemParams,
             model: str = "instantaneous") -> DensityMatrix:
    u = rf_propagator(event, params, model)
    return DensityMatrix(u @ rho.matrix @ u.conj().T)


def gradient_dephase(rho: DensityMatrix) -> DensityMatrix:
    """z-gradient crusher: full dephasing in the computational product basis."""
    return DensityMatrix(np.diag(np.diag(rho.matrix)))


def sequence_propagator(events: list, params: SpinSystemParams,
                        model: str = "instantaneous") -> np.ndarray:
    """Net unitary of a gradient-free pulse program (time-ordered list)."""
    u = IDENTITY_4.copy()
    for ev in events:
        if ev.kind == "rf":
            u = rf_propagator(ev, params, model) @ u
        elif ev.kind == "delay":
            u = free_evolution_propagator(ev.j_units / params.j_coupling, params) @ u
        else:
            raise ValueError("gradient events have no unitary propagator")
    return u


def apply_sequence(rho: DensityMatrix, events: list, params: SpinSystemParams,
                   model: str = "instantaneous") -> DensityMatrix:
    for ev in events:
        if ev.kind == "rf":
            rho = rf_pulse(rho, ev, params, model)
        elif ev.kind == "delay":
            rho = free_evolution(rho, ev.j_units / params.j_coupling, params)
        else:
            rho = gradient_dephase(rho)
    return rho


def propagator_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """|tr(U^dag V)| / d, insensitive to global phase."""
    d = u.shape[0]
    return float(abs(np.trace(u.conj().T @ v)) / d)


# --- composite gates ---------------------------------------------------------

_PX, _PY, _PMX, _PMY = 0.0, np.pi / 2, np.pi, -np.pi / 2


def z_rotation_events(channel: str) -> list:
    """Composite pi/2 z rotation, (pi/2)_-y (pi/2)_x (pi/2)_y read as an
    operator product (rightmost pulse first), realizing R_z(+pi/2)."""
    return [rf(channel, np.pi / 2, _PY), rf(channel, np.pi / 2, _PX), rf(channel, np.pi / 2, _PMY)]


def cnot_events() -> list:
    """Composite CNOT (a control): C pulses around a 3/2J evolution, then the
    z-rotation block on H."""
    return [
        rf("C", np.pi / 2, _PY),
        delay(1.5),
        rf("C", np.pi / 2, _PMX),
        rf("C", np.pi / 2, _PMY),
        rf("C", np.pi / 2, _PMX),
        rf("C", np.pi / 2, _PY),
        rf("H", np.pi / 2, _PMY),
        rf("H", np.pi / 2, _PX),
        rf("H", np.pi / 2, _PY),
    ]


def composite_z_rotation(rho: DensityMatrix, channel: str,
                         params: SpinSystemParams | None = None,
                         model: str = "instantaneous") -> DensityMatrix:
    params = params or SpinSystemParams()
    return apply_sequence(rho, z_rotation_events(channel), params, model)


def composite_cnot(rho: DensityMatrix, params: SpinSystemParams | None = None,
                   model: str = "instantaneous") -> DensityMatrix:
    params = params or SpinSystemParams()
    u = sequence_propagator(cnot_events(), params, model)
    threshold = 1 - 1e-6 if model == "instantaneous" else 0.999
    fid = propagator_fidelity(u, cnot().unitary)
    if fid < threshold:
        raise SequenceMismatch(f"composite CNOT fidelity {fid} below {threshold}")
    return DensityMatrix(u @ rho.matrix @ u.conj().T)


# --- relaxation ---------------------------------------------------------------


def _apply_kraus(m: np.ndarray, kraus: list) -> np.ndarray:
    out = np.zeros_like(m)
    for k in kraus:
        out += k @ m @ k.conj().T
    return out


def _qubit_relax_kraus(t: float, t1: float, t2s: float, z_eq: float) -> list:
    """Single-qubit Kraus set: generalized amplitude damping toward the
    thermal population (1 + z_eq)/2 at rate 1/T1, plus the extra dephasing
    that makes the total transverse decay rate exactly 1/T2*."""
    gam = 1.0 - math.exp(-t / t1)
    p = (1.0 + z_eq) / 2.0
    root = math.sqrt(1.0 - gam)
    gad = [
        math.sqrt(p) * np.array([[1, 0], [0, root]], dtype=complex),
        math.sqrt(p) * np.array([[0, math.sqrt(gam)], [0, 0]], dtype=complex),
        math.sqrt(1 - p) * np.array([[root, 0], [0, 1]], dtype=complex),
        math.sqrt(1 - p) * np.array([[0, 0], [math.sqrt(gam), 0]], dtype=complex),
    ]
    rate_phi = 1.0 / t2s - 1.0 / (2.0 * t1)
    f = math.exp(-t * rate_phi)
    pd = [
        math.sqrt((1 + f) / 2) * IDENTITY_2,
        math.sqrt((1 - f) / 2) * SIGMA_Z.astype(complex),
    ]
    return [kp @ kg for kp in pd for kg in gad]


def relax(rho: DensityMatrix, t: float, params: SpinSystemParams) -> DensityMatrix:
    """Independent per-qubit T1/T2* relaxation for a time t."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return rho
    eps = params.epsilon
    kraus_h = _qubit_relax_kraus(t, params.t1_h, params.t2s_h, 2 * eps)
    kraus_c = _qubit_relax_kraus(t, params.t1_c, params.t2s_c, 2 * eps / params.gamma_ratio)
    m = _apply_kraus(rho.matrix, [on_a(k) for k in kraus_h])
    m = _apply_kraus(m, [on_b(k) for k in kraus_c])
    return DensityMatrix(m)


# --- state preparation --------------------------------------------------------


def thermal_deviation(params: SpinSystemParams) -> np.ndarray:
    """Deviation of the equilibrium state: the heteronuclear Boltzmann form
    (sz x I + I x sz / gamma) / 2 with the hydrogen term setting the scale."""
    return (on_a(SIGMA_Z) + on_b(SIGMA_Z) / params.gamma_ratio) / 2.0


def thermal_equilibrium_state(params: SpinSystemParams) -> DensityMatrix:
    return compose_deviation(DeviationState(delta=thermal_deviation(params), epsilon=params.epsilon))


def relaxation_fixed_point(params: SpinSystemParams) -> DensityMatrix:
    """Product of the per-qubit thermal states, the exact stationary state of
    ``relax``; differs from the linear thermal form only at order epsilon^2."""
    eps = params.epsilon
    qubit_h = IDENTITY_2 / 2 + eps * SIGMA_Z
    qubit_c = IDENTITY_2 / 2 + (eps / params.gamma_ratio) * SIGMA_Z
    return DensityMatrix(np.kron(qubit_h, qubit_c))


def _ket(i: int, j: int) -> np.ndarray:
    v = np.zeros(4, dtype=complex)
    v[2 * i + j] = 1.0
    return v


_IDEAL_DEVIATIONS = {
    "QC": (2 * np.kron(SIGMA_X, SIGMA_X) + 2 * np.kron(SIGMA_Y, SIGMA_Y)
           - 2 * np.kron(SIGMA_Z, SIGMA_Z)) / 4.0,
    "CC": -np.kron(SIGMA_Z, SIGMA_Z).astype(complex),
    "pseudo_pure_11": 2.0 * (np.outer(_ket(1, 1), _ket(1, 1).conj()) - IDENTITY_4 / 4.0),
}

# Spatial averaging keeps 1/4 of the thermal hydrogen amplitude (the 5pi/12 and
# -pi/12 effective tips multiply to cos products of exactly 1/4 for a 4:1
# gyromagnetic ratio); readout normalization against the equilibrium spectrum
# absorbs that factor.
PP_CALIBRATION = 4.0
PULSE_PREP_TOLERANCE = 0.02


def ideal_deviation(kind: str, params: SpinSystemParams) -> np.ndarray:
    """Target deviation matrix for one of the documented state kinds."""
    if kind == "thermal":
        return thermal_deviation(params)
    if kind in _IDEAL_DEVIATIONS:
        return _IDEAL_DEVIATIONS[kind]
    raise UnknownKind(f"unknown state kind {kind!r}")


def pseudo_pure_11_events() -> list:
    """Spatial-averaging preparation of the |11> pseudo-pure state.

    Composite 5pi/12 tip on H, J evolution split into two 1/4J delays, a
    composite -pi/12 y tip, a crusher gradient, then pi flips on both spins
    to move the pseudo-pure population from |00> to |11>.
    """
    return [
        rf("H", np.pi / 4, _PX),
        rf("H", np.pi / 6, _PX),
        delay(0.25),
        delay(0.25),
        rf("H", np.pi / 6, _PY),
        rf("H", np.pi / 4, _PMY),
        gradient(),
        rf("H", np.pi, _PX),
        rf("C", np.pi, _PX),
    ]


def pseudo_epr_events() -> list:
    """Pseudo-EPR gate: a -y half-pulse on H followed by the composite CNOT,
    carrying |11> onto the triplet Bell state (|01>+|10>)/sqrt(2)."""
    return [rf("H", np.pi / 2, _PMY)] + cnot_events()


def _pulse_level_deviation(events: list, params: SpinSystemParams, model: str) -> np.ndarray:
    rho = apply_sequence(thermal_equilibrium_state(params), events, params, model)
    dev = extract_deviation(rho, params.epsilon)
    return PP_CALIBRATION * dev.delta


def prepare_state(kind: str, params: SpinSystemParams | None = None,
                  level: str = "deviation", model: str = "instantaneous") -> DensityMatrix:
    """Prepare one of the documented initial states.

    Deviation level injects the target deviation exactly; pulse level runs
    the preparation sequence from thermal equilibrium and checks the result
    against the ideal target (CC has no documented pulse program and is only
    available at deviation level).
    """
    params = params or SpinSystemParams()
    if level not in ("deviation", "pulse"):
        raise ValueError(f"unknown level {level!r}")

    if kind == "thermal":
        return thermal_equilibrium_state(params)

    if kind not in _IDEAL_DEVIATIONS:
        raise UnknownKind(f"unknown state kind {kind!r}")

    if level == "deviation":
        return compose_deviation(
            DeviationState(delta=_IDEAL_DEVIATIONS[kind], epsilon=params.epsilon)
        )

    if kind == "CC":
        raise UnknownKind("CC has no pulse-level preparation; use level='deviation'")
    events = pseudo_pure_11_events()
    if kind == "QC":
        events = events + pseudo_epr_events()
    delta = _pulse_level_deviation(events, params, model)
    dist = float(np.abs(np.linalg.eigvalsh(delta - _IDEAL_DEVIATIONS[kind])).sum() / 2)
    if dist > PULSE_PREP_TOLERANCE:
        raise SequenceMismatch(
            f"pulse-level {kind} preparation misses target by {dist:.4f}"
        )
    return compose_deviation(DeviationState(delta=delta, epsilon=params.epsilon))


# --- pulse-level witness circuit ----------------------------------------------


def pulse_protocol_state(rho: DensityMatrix, i: int, params: SpinSystemParams,
                         model: str = "instantaneous") -> DensityMatrix:
    """Witness circuit step realized with the experimental pulse sequences:
    the y rotation is a direct rf pulse, the z rotation is its composite."""
    if i == 2:
        rho = composite_z_rotation(rho, "H", params, model)
        rho = composite_z_rotation(rho, "C", params, model)
    elif i == 3:
        rho = rf_pulse(rho, rf("both", np.pi / 2, _PY), params, model)
    elif i != 1:
        raise BadIndex(f"protocol step must be 1, 2 or 3, got {i}")
    return composite_cnot(rho, params, model)


# --- relaxation sweep ----------------------------------------------------------


def dynamics_sweep(rho0: DensityMatrix, delta_t: float, n_steps: int,
                   params: SpinSystemParams,
                   dir: WitnessDirection | None = None,
                   opt: OptimizerConfig | None = None) -> DynamicsSeries:
    """Relax for t_n = n * delta_t, n = 0..n_steps-1, and at each point run
    the witness protocol (three-readout Bell-diagonal form, normalized to the
    thermal amplitude) and the expansion-order correlation quantifiers."""
    dir = dir or sample_direction(0)
    times, w_vals, i_vals, q_vals, c_vals, devs = [], [], [], [], [], []
    for n in range(n_steps):
        t = n * delta_t
        state = relax(rho0, t, params)
        rep = witness(state, dir, mode="circuit", normalization="thermal",
                      epsilon=params.epsilon, include_o4=False)
        dev = extract_deviation(state, params.epsilon)
        corr = discord_epsilon(dev, opt)
        times.append(t)
        w_vals.append(rep.w)
        i_vals.append(corr.mutual_info)
        q_vals.append(corr.quantum)
        c_vals.append(corr.classical)
        devs.append(dev)
    return DynamicsSeries(
        times=np.array(times),
        witness_values=np.array(w_vals),
        mutual_info=np.array(i_vals),
        quantum=np.array(q_vals),
        classical=np.array(c_vals),
        deviations=tuple(devs),
    )


# --- pulse sequence wire format -------------------------------------------------


def load_pulse_sequence(doc: list) -> list:
    """Parse the JSON list form of a pulse program."""
    events = []
    for item in doc:
        kind = item["kind"]
        if kind == "rf":
            events.append(PulseEvent(
                kind="rf",
                channel=item["channel"],
                angle=float(item["angle"]),
                phase=float(item.get("phase", 0.0)),
                duration=float(item["duration"]) if "duration" in item else None,
            ))
        elif kind == "delay":
            events.append(delay(float(item["j_units"])))
        elif kind == "gradient":
            events.append(gradient())
        else:
            raise ValueError(f"unknown event kind {kind!r}")
    return events


def pulse_sequence_to_json(events: list) -> list:
    doc = []
    for ev in events:
        if ev.kind == "rf":
            entry = {"kind": "rf", "channel": ev.channel, "angle": ev.angle, "phase": ev.phase}
            if ev.duration is not None:
                entry["duration"] = ev.duration
            doc.append(entry)
        elif ev.kind == "delay":
            doc.append({"kind": "delay", "j_units": ev.j_units})
        else:
            doc.append({"kind": "gradient"})
    return doc
