"""Two-qubit state representations: density matrices, high-temperature
deviation states, Bloch-coefficient specs, and classically correlated mixtures.

All types are immutable after construction and validate their invariants
eagerly, so anything downstream can assume it holds a physical state.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import BadDistribution, EpsilonMismatch, NotAState
from .pauli import IDENTITY_4, SIGMA, on_a, on_b

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
# Eigenvalues above this are accepted as nonnegative; states failing the bound
# are rejected rather than projected back onto the PSD cone.
PSD_TOL = -1e-10

DEFAULT_EPSILON = 1e-5


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class DensityMatrix:
    """4x4 Hermitian, unit-trace, positive-semidefinite operator."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise NotAState(f"expected a 4x4 matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise NotAState("matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL or abs(np.trace(m).imag) > TRACE_TOL:
            raise NotAState(f"trace is {np.trace(m)}, expected 1")
        evals = np.linalg.eigvalsh(m)
        if evals.min() < PSD_TOL:
            raise NotAState(f"negative eigenvalue {evals.min():.3e}")
        object.__setattr__(self, "matrix", _freeze(m))

    def expectation(self, observable: np.ndarray) -> float:
        return float(np.trace(self.matrix @ observable).real)


@dataclass(frozen=True)
class DeviationState:
    """High-temperature state rho = I/4 + epsilon * delta.

    ``delta`` is the traceless Hermitian deviation matrix carrying all the
    observable structure; ``epsilon`` is the magnetic-to-thermal energy ratio.
    """

    delta: np.ndarray
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        d = np.array(self.delta, dtype=complex)
        if d.shape != (4, 4):
            raise ValueError(f"expected a 4x4 deviation matrix, got {d.shape}")
        if np.max(np.abs(d - d.conj().T)) > HERMITICITY_TOL:
            raise ValueError("deviation matrix is not Hermitian")
        if abs(np.trace(d)) > TRACE_TOL:
            raise ValueError(f"deviation matrix has trace {np.trace(d)}")
        object.__setattr__(self, "delta", _freeze(d))


@dataclass(frozen=True)
class BlochSpec:
    """Local Bloch vectors a, b and diagonal correlation coefficients c for
    rho = (I + sum_i a_i s_i x I + b_i I x s_i + c_i s_i x s_i) / 4."""

    a: np.ndarray = field(default_factory=lambda: np.zeros(3))
    b: np.ndarray = field(default_factory=lambda: np.zeros(3))
    c: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        for name in ("a", "b", "c"):
            v = np.array(getattr(self, name), dtype=float)
            if v.shape != (3,):
                raise ValueError(f"{name} must be a 3-vector")
            if not np.all(np.isfinite(v)):
                raise ValueError(f"{name} has non-finite entries")
            v.flags.writeable = False
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class ClassicalSpec:
    """Classically correlated mixture sum_ij p_ij |a_i><a_i| x |b_j><b_j|.

    Bases are encoded by Bloch angles (theta, phi) so orthonormality is
    structural.  ``probabilities`` is (p00, p01, p10, p11).
    """

    probabilities: np.ndarray
    basis_a: tuple = (0.0, 0.0)
    basis_b: tuple = (0.0, 0.0)

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float).reshape(-1)
        if p.shape != (4,):
            raise BadDistribution("need exactly four probabilities")
        if np.any(p < 0):
            raise BadDistribution(f"negative probability in {p}")
        if abs(p.sum() - 1.0) > TRACE_TOL:
            raise BadDistribution(f"probabilities sum to {p.sum()}")
        p.flags.writeable = False
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "basis_a", (float(self.basis_a[0]), float(self.basis_a[1])))
        object.__setattr__(self, "basis_b", (float(self.basis_b[0]), float(self.basis_b[1])))


def from_bloch(spec: BlochSpec) -> DensityMatrix:
    """Compose the density matrix for a diagonal-correlation Bloch spec.

    Raises NotAState if the coefficients do not describe a positive operator.
    """
    m = IDENTITY_4.copy()
    for i in range(3):
        m += spec.a[i] * on_a(SIGMA[i])
        m += spec.b[i] * on_b(SIGMA[i])
        m += spec.c[i] * np.kron(SIGMA[i], SIGMA[i])
    return DensityMatrix(m / 4.0)


def bloch_decompose(rho: DensityMatrix) -> tuple[BlochSpec, np.ndarray]:
    """Read off local Bloch vectors and the full 3x3 correlation matrix.

    Returns (spec, corr) where spec.c is the diagonal of corr.  Inverse of
    ``from_bloch`` whenever the off-diagonal correlations vanish.
    """
    m = rho.matrix
    a = np.array([np.trace(m @ on_a(s)).real for s in SIGMA])
    b = np.array([np.trace(m @ on_b(s)).real for s in SIGMA])
    corr = np.array(
        [[np.trace(m @ np.kron(si, sj)).real for sj in SIGMA] for si in SIGMA]
    )
    return BlochSpec(a=a, b=b, c=np.diag(corr).copy()), corr


def compose_deviation(dev: DeviationState) -> DensityMatrix:
    """rho = I/4 + epsilon * delta; raises NotAState if epsilon is too large."""
    return DensityMatrix(IDENTITY_4 / 4.0 + dev.epsilon * dev.delta)


def extract_deviation(rho: DensityMatrix, epsilon: float = DEFAULT_EPSILON) -> DeviationState:
    """delta = (rho - I/4) / epsilon, the exact inverse of compose_deviation.

    Dividing by epsilon amplifies float noise from rho (already validated to
    1e-12) beyond the deviation tolerances, so the rounding crumbs are
    projected out before construction.
    """
    delta = (rho.matrix - IDENTITY_4 / 4.0) / epsilon
    delta = (delta + delta.conj().T) / 2.0
    delta -= np.trace(delta) / 4.0 * IDENTITY_4
    return DeviationState(delta=delta, epsilon=epsilon)


def basis_kets(theta: float, phi: float) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal qubit basis along the Bloch direction (theta, phi)."""
    up = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
    down = np.array([np.sin(theta / 2), -np.exp(1j * phi) * np.cos(theta / 2)])
    return up, down


def classical_state(spec: ClassicalSpec) -> DensityMatrix:
    """Build the classically correlated mixture described by ``spec``."""
    kets_a = basis_kets(*spec.basis_a)
    kets_b = basis_kets(*spec.basis_b)
    m = np.zeros((4, 4), dtype=complex)
    p = spec.probabilities.reshape(2, 2)
    for i in range(2):
        proj_a = np.outer(kets_a[i], kets_a[i].conj())
        for j in range(2):
            proj_b = np.outer(kets_b[j], kets_b[j].conj())
            m += p[i, j] * np.kron(proj_a, proj_b)
    return DensityMatrix(m)


def partial_trace(rho, keep: str = "a") -> np.ndarray:
    """Reduced 2x2 state of one qubit; ``keep`` is 'a' or 'b'."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    t = m.reshape(2, 2, 2, 2)
    if keep == "a":
        return np.einsum("ijkj->ik", t)
    if keep == "b":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'a' or 'b', got {keep!r}")


def trace_norm(m: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.abs(np.linalg.eigvalsh(m)).sum())


def normalized_trace_distance(d1: DeviationState, d2: DeviationState) -> float:
    """tr|delta1 - delta2| / 2, the deviation-level state distance."""
    if abs(d1.epsilon - d2.epsilon) > 1e-15:
        raise EpsilonMismatch(f"epsilon {d1.epsilon} vs {d2.epsilon}")
    return trace_norm(d1.delta - d2.delta) / 2.0


# --- JSON wire formats -----------------------------------------------------
#
# Deviation form: {"epsilon": e, "delta_re": [[...]], "delta_im": [[...]]}
# Bloch shorthand: {"bloch": {"a": [...], "b": [...], "c": [...]}}


def state_to_json(state) -> dict:
    if isinstance(state, DeviationState):
        return {
            "epsilon": state.epsilon,
            "delta_re": state.delta.real.tolist(),
            "delta_im": state.delta.imag.tolist(),
        }
    if isinstance(state, BlochSpec):
        return {"bloch": {"a": state.a.tolist(), "b": state.b.tolist(), "c": state.c.tolist()}}
    raise TypeError(f"cannot serialize {type(state).__name__}")


def state_from_json(doc: dict):
    """Parse either wire form; returns a DeviationState or a DensityMatrix."""
    if "bloch" in doc:
        blk = doc["bloch"]
        return from_bloch(BlochSpec(a=np.array(blk["a"]), b=np.array(blk["b"]), c=np.array(blk["c"])))
    delta = np.array(doc["delta_re"], dtype=float) + 1j * np.array(doc["delta_im"], dtype=float)
    return DeviationState(delta=delta, epsilon=float(doc["epsilon"]))
