"""Quantum channels in operator-sum form, with a Gaussian-picture layer for
deriving photon-loss channels from beam-splitter Hamiltonians.

Qubit channels act on polarization; fiber-level channels act on a 3-level
single-rail space ordered (|0>, |1>, vacuum) so photon loss is a proper
trace-preserving map and heralding is a later projection onto the photon
subspace. Channel composition multiplies operator sets, so keep stacks
shallow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .linalg import (
    MAX_DIM,
    DensityMatrix,
    DimensionError,
    StateError,
    PAULI_I,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    _as_complex_matrix,
)

COMPLETENESS_TOL = 1e-10
CHOI_PSD_TOL = 1e-10
SYMPLECTIC_TOL = 1e-9

# Single-rail optical space: photon polarization levels first, vacuum last.
RAIL_DIM = 3
VACUUM_INDEX = 2


@dataclass(frozen=True)
class KrausChannel:
    """A channel given by Kraus operators, all shaped (out_dim, in_dim).

    Completeness (sum K^dag K = I, or <= I when heralded) is a soft
    invariant: it is not enforced here so that verify_cptp can report on
    defective sets, but every constructor in this module satisfies it.
    """

    operators: tuple[np.ndarray, ...]
    label: str = ""
    heralded: bool = False

    def __post_init__(self) -> None:
        if not self.operators:
            raise DimensionError("channel needs at least one Kraus operator")
        ops = []
        shape = None
        for i, op in enumerate(self.operators):
            arr = _as_complex_matrix(op, f"Kraus operator {i}")
            if shape is None:
                shape = arr.shape
            elif arr.shape != shape:
                raise DimensionError(
                    f"Kraus operator {i} has shape {arr.shape}, expected {shape}"
                )
            arr = arr.copy()
            arr.flags.writeable = False
            ops.append(arr)
        if max(shape) > MAX_DIM:
            raise DimensionError(f"dimension {max(shape)} exceeds limit {MAX_DIM}")
        object.__setattr__(self, "operators", tuple(ops))

    @property
    def in_dim(self) -> int:
        return self.operators[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.operators[0].shape[0]


@dataclass(frozen=True)
class CptpReport:
    """Result of verify_cptp. valid means the set is usable as declared."""

    completeness_residual: float
    choi_min_eigenvalue: float
    trace_preserving: bool
    completely_positive: bool
    heralded: bool
    valid: bool


def completeness_operator(channel: KrausChannel) -> np.ndarray:
    """Sum of K^dag K over the operator set."""
    acc = np.zeros((channel.in_dim, channel.in_dim), dtype=complex)
    for op in channel.operators:
        acc += op.conj().T @ op
    return acc


def choi_matrix(channel: KrausChannel) -> np.ndarray:
    """Choi matrix as sum of vec(K) vec(K)^dag with row-major vec.

    Positive semidefinite exactly when the map is completely positive;
    eigenvalue floor is what verify_cptp reports.
    """
    d = channel.in_dim * channel.out_dim
    c = np.zeros((d, d), dtype=complex)
    for op in channel.operators:
        v = op.reshape(-1)
        c += np.outer(v, v.conj())
    return c


def verify_cptp(channel: KrausChannel) -> CptpReport:
    """Check completeness and complete positivity; reports, never raises."""
    comp = completeness_operator(channel)
    residual = float(np.abs(comp - np.eye(channel.in_dim)).max())
    trace_preserving = residual <= COMPLETENESS_TOL
    if channel.heralded:
        # Trace-nonincreasing: I - sum K^dag K must be PSD.
        defect_lo = float(np.linalg.eigvalsh(np.eye(channel.in_dim) - comp).min())
        completeness_ok = defect_lo >= -COMPLETENESS_TOL
    else:
        completeness_ok = trace_preserving
    choi_lo = float(np.linalg.eigvalsh(choi_matrix(channel)).min())
    completely_positive = choi_lo >= -CHOI_PSD_TOL
    return CptpReport(
        completeness_residual=residual,
        choi_min_eigenvalue=choi_lo,
        trace_preserving=trace_preserving,
        completely_positive=completely_positive,
        heralded=channel.heralded,
        valid=completeness_ok and completely_positive,
    )


def apply_channel(channel: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """Operator-sum action. Heralded channels renormalize the output."""
    if channel.in_dim != rho.dim:
        raise DimensionError(
            f"channel input dim {channel.in_dim} does not match state dim {rho.dim}"
        )
    out = np.zeros((channel.out_dim, channel.out_dim), dtype=complex)
    for op in channel.operators:
        out += op @ rho.matrix @ op.conj().T
    out = (out + out.conj().T) / 2
    if channel.heralded:
        tr = float(np.real(np.trace(out)))
        if tr < 1e-14:
            raise StateError("heralded channel annihilated the state")
        out = out / tr
    return DensityMatrix(out)


def compose(first: KrausChannel, then: KrausChannel) -> KrausChannel:
    """Channel applying `first` and then `then` (operators {B_j A_i})."""
    if then.in_dim != first.out_dim:
        raise DimensionError(
            f"cannot compose: output dim {first.out_dim} feeds input dim {then.in_dim}"
        )
    ops = tuple(b @ a for b in then.operators for a in first.operators)
    label = f"{then.label}*{first.label}" if first.label and then.label else ""
    return KrausChannel(ops, label=label, heralded=first.heralded or then.heralded)


def apply_to_subsystem(
    channel: KrausChannel, rho: DensityMatrix, index: int, dims: list[int]
) -> DensityMatrix:
    """Apply a channel to one tensor factor of a composite state."""
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != rho.dim:
        raise DimensionError(f"dims {dims} do not match state dim {rho.dim}")
    if not 0 <= index < len(dims):
        raise DimensionError(f"subsystem index {index} out of range")
    if channel.in_dim != dims[index] or channel.out_dim != dims[index]:
        raise DimensionError("subsystem application needs a square channel")
    before = int(np.prod(dims[:index])) if index > 0 else 1
    after = int(np.prod(dims[index + 1:])) if index + 1 < len(dims) else 1
    ops = tuple(
        np.kron(np.kron(np.eye(before), op), np.eye(after))
        for op in channel.operators
    )
    return apply_channel(
        KrausChannel(ops, label=channel.label, heralded=channel.heralded), rho
    )


# Qubit channel catalog.

def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel((np.eye(dim, dtype=complex),), label="identity")


def depolarizing_channel(p: float) -> KrausChannel:
    """Isotropic qubit noise: keeps the state with weight 1 - p, scrambles
    with weight p. Entanglement fidelity with a Bell pair is 1 - 3p/4."""
    if not 0.0 <= p <= 1.0:
        raise StateError(f"depolarizing strength {p} outside [0, 1]")
    ops = (
        np.sqrt(1.0 - 3.0 * p / 4.0) * PAULI_I,
        np.sqrt(p / 4.0) * PAULI_X,
        np.sqrt(p / 4.0) * PAULI_Y,
        np.sqrt(p / 4.0) * PAULI_Z,
    )
    return KrausChannel(ops, label=f"depolarizing({p:g})")


def dephasing_channel(p: float) -> KrausChannel:
    """Phase-flip channel: Z with probability p, scales coherences by 1 - 2p."""
    if not 0.0 <= p <= 1.0:
        raise StateError(f"dephasing probability {p} outside [0, 1]")
    ops = (np.sqrt(1.0 - p) * PAULI_I, np.sqrt(p) * PAULI_Z)
    return KrausChannel(ops, label=f"dephasing({p:g})")


def rotation_unitary(theta: float, axis: np.ndarray) -> np.ndarray:
    """SU(2) rotation exp(-i (theta/2) n.sigma) about unit axis n."""
    n = np.asarray(axis, dtype=float).reshape(-1)
    if n.shape != (3,):
        raise DimensionError("rotation axis must be a 3-vector")
    norm = np.linalg.norm(n)
    if norm < 1e-12:
        raise StateError("rotation axis has zero norm")
    n = n / norm
    generator = n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z
    return np.cos(theta / 2) * PAULI_I - 1j * np.sin(theta / 2) * generator


def sop_rotation_channel(
    omega: float,
    delta_t: float,
    mode: str = "averaged",
    axis: np.ndarray | None = None,
) -> KrausChannel:
    """Polarization drift accumulated between recalibrations.

    A drift rate omega (rad/s) acting for delta_t seconds rotates the
    polarization qubit by theta = omega * delta_t about some axis on the
    Poincare sphere. "sampled" mode takes the axis as given (one unitary
    Kraus operator); "averaged" mode integrates the axis over the uniform
    sphere, which collapses to the Pauli mixture
    {cos(theta/2) I, sin(theta/2)/sqrt(3) (X, Y, Z)}.
    """
    if omega < 0 or delta_t < 0:
        raise StateError("drift rate and interval must be nonnegative")
    theta = omega * delta_t
    if mode == "sampled":
        if axis is None:
            raise StateError("sampled mode needs a rotation axis")
        return KrausChannel(
            (rotation_unitary(theta, axis),), label=f"sop_sampled({theta:g})"
        )
    if mode == "averaged":
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        ops = (
            c * PAULI_I,
            s / np.sqrt(3.0) * PAULI_X,
            s / np.sqrt(3.0) * PAULI_Y,
            s / np.sqrt(3.0) * PAULI_Z,
        )
        return KrausChannel(ops, label=f"sop_averaged({theta:g})")
    raise StateError(f"unknown sop mode {mode!r}")


def averaged_rotation_fidelity(theta: float) -> float:
    """Bell-pair fidelity after an axis-averaged rotation by theta."""
    return float(np.cos(theta / 2) ** 2)


# Single-rail optical channels (3 levels, vacuum last).

def loss_channel(eta: float) -> KrausChannel:
    """Photon survival with probability eta; lost photons land in vacuum."""
    if not 0.0 <= eta <= 1.0:
        raise StateError(f"transmittance {eta} outside [0, 1]")
    keep = np.zeros((RAIL_DIM, RAIL_DIM), dtype=complex)
    keep[VACUUM_INDEX, VACUUM_INDEX] = 1.0
    keep[0, 0] = keep[1, 1] = np.sqrt(eta)
    ops = [keep]
    for level in (0, 1):
        drop = np.zeros((RAIL_DIM, RAIL_DIM), dtype=complex)
        drop[VACUUM_INDEX, level] = np.sqrt(1.0 - eta)
        ops.append(drop)
    return KrausChannel(tuple(ops), label=f"loss({eta:g})")


def embed_qubit_channel(channel: KrausChannel) -> KrausChannel:
    """Lift a polarization-qubit channel to the 3-level rail space.

    The first operator extends with 1 on the vacuum level and the rest with
    0, so vacuum passes through untouched and completeness is preserved.
    """
    if channel.in_dim != 2 or channel.out_dim != 2:
        raise DimensionError("only qubit channels embed into the rail space")
    ops = []
    for i, op in enumerate(channel.operators):
        big = np.zeros((RAIL_DIM, RAIL_DIM), dtype=complex)
        big[:2, :2] = op
        if i == 0:
            big[VACUUM_INDEX, VACUUM_INDEX] = 1.0
        ops.append(big)
    return KrausChannel(tuple(ops), label=channel.label, heralded=channel.heralded)


# Gaussian layer: quadratic bosonic Hamiltonians act as symplectic
# transforms on the quadrature vector (x1, p1, x2, p2, ...).

@dataclass(frozen=True)
class GaussianHamiltonian:
    """Quadratic Hamiltonian data: a Hermitian coupling block (beam-splitter
    and rotation terms, rad/s) and a symmetric squeezing block, acting for
    duration_s seconds."""

    coupling: np.ndarray
    squeezing: np.ndarray
    duration_s: float

    def __post_init__(self) -> None:
        k = _as_complex_matrix(self.coupling, "coupling")
        d = _as_complex_matrix(self.squeezing, "squeezing")
        if k.shape[0] != k.shape[1] or k.shape != d.shape:
            raise DimensionError("coupling and squeezing must be square and matched")
        if np.abs(k - k.conj().T).max() > 1e-12:
            raise StateError("coupling block must be Hermitian")
        if np.abs(d - d.T).max() > 1e-12:
            raise StateError("squeezing block must be symmetric")
        if self.duration_s < 0:
            raise StateError("duration must be nonnegative")
        k, d = k.copy(), d.copy()
        k.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "coupling", k)
        object.__setattr__(self, "squeezing", d)

    @property
    def modes(self) -> int:
        return self.coupling.shape[0]


def symplectic_form(modes: int) -> np.ndarray:
    """Block-diagonal form Omega with [[0, 1], [-1, 0]] per mode (x, p order)."""
    omega = np.zeros((2 * modes, 2 * modes))
    for m in range(modes):
        omega[2 * m, 2 * m + 1] = 1.0
        omega[2 * m + 1, 2 * m] = -1.0
    return omega


@dataclass(frozen=True)
class SymplecticTransform:
    """Real 2N x 2N matrix S with S Omega S^T = Omega (tolerance 1e-9)."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        s = np.asarray(self.matrix, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
            raise DimensionError(f"symplectic matrix must be 2N x 2N, got {s.shape}")
        omega = symplectic_form(s.shape[0] // 2)
        defect = np.abs(s @ omega @ s.T - omega).max()
        if defect > SYMPLECTIC_TOL:
            raise StateError(f"not symplectic: max defect {defect:.3e}")
        s = s.copy()
        s.flags.writeable = False
        object.__setattr__(self, "matrix", s)

    @property
    def modes(self) -> int:
        return self.matrix.shape[0] // 2


def gaussian_evolve(h: GaussianHamiltonian) -> SymplecticTransform:
    """Exponentiate the quadratic Hamiltonian into a symplectic transform.

    The mode-operator generator is A = -i [[K, D], [-D*, -K*]] on
    (a_1..a_N, a^dag_1..a^dag_N); conjugating by the quadrature change of
    basis gives a real generator, exponentiated with scipy's expm.
    """
    n = h.modes
    k, d = h.coupling, h.squeezing
    a = -1j * np.block([[k, d], [-d.conj(), -k.conj()]])
    eye = np.eye(n)
    # Quadrature change of basis: (x, p) blocks from (a, a^dag) blocks.
    t = np.block([[eye, eye], [-1j * eye, 1j * eye]]) / np.sqrt(2.0)
    t_inv = np.block([[eye, 1j * eye], [eye, -1j * eye]]) / np.sqrt(2.0)
    b = t @ a @ t_inv
    if np.abs(b.imag).max() > 1e-10:
        raise StateError("quadrature generator failed to come out real")
    s_grouped = scipy.linalg.expm(b.real * h.duration_s)
    # Regroup from (x1..xN, p1..pN) to interleaved (x1, p1, x2, p2, ...).
    perm = np.empty(2 * n, dtype=int)
    perm[0::2] = np.arange(n)
    perm[1::2] = np.arange(n) + n
    return SymplecticTransform(s_grouped[np.ix_(perm, perm)])


def mode_transmittance(transform: SymplecticTransform, mode: int) -> float:
    """Power transmittance of one mode under a passive transform: the mean
    squared magnitude of the mode's diagonal 2x2 quadrature block."""
    if not 0 <= mode < transform.modes:
        raise DimensionError(f"mode {mode} out of range")
    block = transform.matrix[2 * mode: 2 * mode + 2, 2 * mode: 2 * mode + 2]
    return float(np.sum(block * block) / 2.0)


def beamsplitter_to_kraus(eta: float) -> KrausChannel:
    """Photon loss derived from its beam-splitter dilation.

    A beam splitter of transmittance eta couples the signal rail to a vacuum
    environment rail; writing the interaction unitary on the two-rail space
    and tracing the environment yields Kraus operators
    K_k = (I x <k|) U (I x |vac>). Restricted to at most one photon the
    two-photon sector is never populated, so the unitary completes it with
    the identity. The result reproduces loss_channel(eta) exactly.
    """
    if not 0.0 <= eta <= 1.0:
        raise StateError(f"transmittance {eta} outside [0, 1]")
    t, r = np.sqrt(eta), np.sqrt(1.0 - eta)
    d = RAIL_DIM
    vac = VACUUM_INDEX

    def idx(sys_level: int, env_level: int) -> int:
        return sys_level * d + env_level

    u = np.zeros((d * d, d * d), dtype=complex)
    u[idx(vac, vac), idx(vac, vac)] = 1.0
    for pol in (0, 1):
        # Single photon superposes between staying in the signal rail and
        # hopping to the environment rail, preserving polarization.
        u[idx(pol, vac), idx(pol, vac)] = t
        u[idx(vac, pol), idx(pol, vac)] = r
        u[idx(pol, vac), idx(vac, pol)] = -r
        u[idx(vac, pol), idx(vac, pol)] = t
    for pol_a in (0, 1):
        for pol_b in (0, 1):
            u[idx(pol_a, pol_b), idx(pol_a, pol_b)] = 1.0
    defect = np.abs(u.conj().T @ u - np.eye(d * d)).max()
    if defect > 1e-12:
        raise StateError(f"dilation unitary defect {defect:.3e}")
    ops = []
    for env_out in range(d):
        kraus = np.zeros((d, d), dtype=complex)
        for sys_out in range(d):
            for sys_in in range(d):
                kraus[sys_out, sys_in] = u[idx(sys_out, env_out), idx(sys_in, vac)]
        ops.append(kraus)
    # Drop identically zero operators (environment outcomes never reached).
    ops = [op for op in ops if np.abs(op).max() > 0.0]
    return KrausChannel(tuple(ops), label=f"beamsplitter_loss({eta:g})")
