"""Density-matrix simulation of small circuits with configurable noise.

The simulator is deliberately small: H / RY / RZ / CNOT gates, three
single-qubit Kraus channels (amplitude damping, bit flip, depolarizing), and
two noise insertion policies.  Circuit builders produce the entangled-state
families used throughout the package -- phase-tagged GHZ states, their
Hadamard-transformed ("twisted") relatives, and circuit or closed-form
mixtures of a singlet with white noise (Werner states).

Noise policies
--------------
``"post"``     apply the channel once to every qubit after the final gate.
``"pergate"``  apply the channel to every qubit touched by a gate, right
               after that gate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import (
    HADAMARD,
    PAULI_I,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    as_matrix,
    basis_ket,
    embed_one_qubit,
    num_qubits,
    partial_trace,
    projector,
    tensor,
)

KRAUS_COMPLETENESS_ATOL = 1e-12

CHANNEL_NONE = "none"
CHANNEL_AMPLITUDE_DAMPING = "amplitude_damping"
CHANNEL_BIT_FLIP = "bit_flip"
CHANNEL_DEPOLARIZING = "depolarizing"
# Alias: the Pauli-twirl form (1-q) rho + (q/3)(X rho X + Y rho Y + Z rho Z)
# equals the replacement form at level p = 4q/3, so it is accepted as a
# reparametrized spelling of the same channel (valid for q <= 3/4).
CHANNEL_DEPOLARIZING_PAULI = "depolarizing_pauli"
CHANNELS = (
    CHANNEL_NONE,
    CHANNEL_AMPLITUDE_DAMPING,
    CHANNEL_BIT_FLIP,
    CHANNEL_DEPOLARIZING,
    CHANNEL_DEPOLARIZING_PAULI,
)

POLICY_POST = "post"
POLICY_PER_GATE = "pergate"


@dataclass(frozen=True)
class Gate:
    kind: str              # "h" | "ry" | "rz" | "cnot"
    qubit: int             # target qubit
    theta: float | None = None
    control: int | None = None

    @classmethod
    def h(cls, qubit: int) -> "Gate":
        return cls("h", qubit)

    @classmethod
    def ry(cls, theta: float, qubit: int) -> "Gate":
        return cls("ry", qubit, theta=float(theta))

    @classmethod
    def rz(cls, theta: float, qubit: int) -> "Gate":
        return cls("rz", qubit, theta=float(theta))

    @classmethod
    def cnot(cls, control: int, target: int) -> "Gate":
        if control == target:
            raise ValueError("cnot control and target must differ")
        return cls("cnot", target, control=control)

    @property
    def qubits(self) -> tuple[int, ...]:
        if self.kind == "cnot":
            return (self.control, self.qubit)
        return (self.qubit,)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"gate {g} out of range for {self.n_qubits} qubits")


@dataclass(frozen=True)
class NoiseModel:
    channel: str = CHANNEL_NONE
    level: float = 0.0
    policy: str = POLICY_POST

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}")
        if self.policy not in (POLICY_POST, POLICY_PER_GATE):
            raise ValueError(f"unknown noise policy {self.policy!r}")
        hi = 0.75 if self.channel == CHANNEL_DEPOLARIZING_PAULI else 1.0
        if self.channel != CHANNEL_NONE and not 0.0 <= self.level <= hi:
            raise ValueError(f"noise level {self.level} outside [0, {hi}]")

    @classmethod
    def none(cls) -> "NoiseModel":
        return cls()


def gate_unitary(gate: Gate, n_qubits: int) -> np.ndarray:
    """Full 2^n x 2^n unitary for a gate acting on an n-qubit register."""
    if gate.kind == "h":
        return embed_one_qubit(HADAMARD, gate.qubit, n_qubits)
    if gate.kind == "ry":
        half = gate.theta / 2.0
        u = np.array(
            [[np.cos(half), -np.sin(half)], [np.sin(half), np.cos(half)]], dtype=complex
        )
        return embed_one_qubit(u, gate.qubit, n_qubits)
    if gate.kind == "rz":
        half = gate.theta / 2.0
        u = np.array([[np.exp(-1j * half), 0.0], [0.0, np.exp(1j * half)]], dtype=complex)
        return embed_one_qubit(u, gate.qubit, n_qubits)
    if gate.kind == "cnot":
        p0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
        p1 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
        term0 = [PAULI_I] * n_qubits
        term1 = [PAULI_I] * n_qubits
        term0[gate.control] = p0
        term1[gate.control] = p1
        term1[gate.qubit] = PAULI_X
        return tensor(*term0) + tensor(*term1)
    raise ValueError(f"unknown gate kind {gate.kind!r}")


def kraus_operators(channel: str, level: float) -> list[np.ndarray]:
    """Single-qubit Kraus set for a named channel at the given level.

    Every returned set satisfies sum_k K_k^dag K_k = 1 exactly (within
    floating-point roundoff), which ``apply_channel`` relies on to preserve
    the trace.
    """
    if channel == CHANNEL_NONE or level == 0.0:
        return [PAULI_I.copy()]
    if channel == CHANNEL_AMPLITUDE_DAMPING:
        k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - level)]], dtype=complex)
        k1 = np.array([[0.0, np.sqrt(level)], [0.0, 0.0]], dtype=complex)
        return [k0, k1]
    if channel == CHANNEL_BIT_FLIP:
        return [np.sqrt(1.0 - level) * PAULI_I, np.sqrt(level) * PAULI_X]
    if channel == CHANNEL_DEPOLARIZING_PAULI:
        level = 4.0 * level / 3.0  # reparametrize to the replacement form
        channel = CHANNEL_DEPOLARIZING
    if channel == CHANNEL_DEPOLARIZING:
        # replacement form: rho -> (1-p) rho + p * (1/2) tr_qubit(rho)
        return [
            np.sqrt(1.0 - 0.75 * level) * PAULI_I,
            np.sqrt(level / 4.0) * PAULI_X,
            np.sqrt(level / 4.0) * PAULI_Y,
            np.sqrt(level / 4.0) * PAULI_Z,
        ]
    raise ValueError(f"unknown channel {channel!r}")


def apply_channel(rho, channel: str, level: float, qubit: int) -> np.ndarray:
    """Apply a single-qubit channel to one qubit of a register state."""
    rho = as_matrix(rho)
    n = num_qubits(rho.shape[0])
    out = np.zeros_like(rho)
    for k in kraus_operators(channel, level):
        full = embed_one_qubit(k, qubit, n)
        out += full @ rho @ full.conj().T
    return out


def run_circuit(circuit: Circuit, noise: NoiseModel = NoiseModel.none()) -> np.ndarray:
    """Evolve |0...0><0...0| through the circuit under the noise model."""
    n = circuit.n_qubits
    rho = projector(basis_ket("0" * n))
    for gate in circuit.gates:
        u = gate_unitary(gate, n)
        rho = u @ rho @ u.conj().T
        if noise.policy == POLICY_PER_GATE and noise.channel != CHANNEL_NONE:
            for q in gate.qubits:
                rho = apply_channel(rho, noise.channel, noise.level, q)
    if noise.policy == POLICY_POST and noise.channel != CHANNEL_NONE:
        for q in range(n):
            rho = apply_channel(rho, noise.channel, noise.level, q)
    return 0.5 * (rho + rho.conj().T)


# ---------------------------------------------------------------------------
# State families
# ---------------------------------------------------------------------------

def ghz_state(n_qubits: int, theta: float = 0.0) -> np.ndarray:
    """(|0...0> + e^{i theta} |1...1>) / sqrt(2) as a state vector."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    vec = np.zeros(2**n_qubits, dtype=complex)
    vec[0] = 1.0 / np.sqrt(2.0)
    vec[-1] = np.exp(1j * theta) / np.sqrt(2.0)
    return vec


def twisted_state(n_qubits: int, theta: float = 0.0) -> np.ndarray:
    """Hadamard transform of the phase-tagged GHZ state.

    Amplitudes are (1 + (-1)^{parity(x)} e^{i theta}) / sqrt(2^{n+1}); for
    theta = 0 on one qubit this reduces to |0>.
    """
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    d = 2**n_qubits
    parity = np.array([bin(x).count("1") % 2 for x in range(d)])
    amps = (1.0 + (-1.0) ** parity * np.exp(1j * theta)) / np.sqrt(2.0 ** (n_qubits + 1))
    return amps.astype(complex)


def build_ghz_phase(n_qubits: int, theta: float = 0.0) -> Circuit:
    """Hadamard + phase rotation on qubit 0, then a CNOT chain.

    The circuit output matches ``ghz_state(n_qubits, theta)`` exactly up to a
    global phase (the RZ convention contributes e^{-i theta/2} overall, which
    is invisible at the density-matrix level).
    """
    gates = [Gate.h(0), Gate.rz(theta, 0)]
    gates += [Gate.cnot(q, q + 1) for q in range(n_qubits - 1)]
    return Circuit(n_qubits, tuple(gates))


def build_twisted(n_qubits: int, theta: float = 0.0) -> Circuit:
    """GHZ-phase circuit followed by a Hadamard on every qubit."""
    base = build_ghz_phase(n_qubits, theta)
    gates = base.gates + tuple(Gate.h(q) for q in range(n_qubits))
    return Circuit(n_qubits, gates)


def singlet_state() -> np.ndarray:
    """(|01> - |10>) / sqrt(2)."""
    return (basis_ket("01") - basis_ket("10")) / np.sqrt(2.0)


def werner_exact(p: float, n_pairs: int = 1, p2: float | None = None) -> np.ndarray:
    """Closed-form Werner state(s): (1-p)/4 * 1 + p |s><s| with s the singlet.

    With ``n_pairs=2`` the result is the tensor product of two such states,
    the second at level ``p2`` (defaults to ``p``).
    """
    if not -1.0 / 3.0 <= p <= 1.0:
        raise ValueError(f"werner parameter {p} outside [-1/3, 1]")
    one = (1.0 - p) / 4.0 * np.eye(4, dtype=complex) + p * projector(singlet_state())
    if n_pairs == 1:
        return one
    if n_pairs == 2:
        q = p if p2 is None else p2
        return np.kron(one, werner_exact(q))
    raise ValueError("n_pairs must be 1 or 2")


def build_werner_pair(theta_a: float, theta_b: float) -> Circuit:
    """Four-qubit circuit whose (qubit 0, qubit 1) marginal is a Werner state.

    Qubits 2 and 3 are ancillas; entangling them with the signal pair and
    discarding them produces the mixture.  The angles steer the mixing
    weight; (0, pi) yields the pure singlet.
    """
    gates = (
        Gate.ry(theta_a, 0),
        Gate.cnot(0, 1),
        Gate.ry(theta_b, 0),
        Gate.ry(theta_b, 1),
        Gate.cnot(0, 2),
        Gate.cnot(1, 3),
        Gate.h(0),
        Gate.cnot(0, 1),
    )
    return Circuit(4, gates)


def run_werner_pair(theta_a: float, theta_b: float, noise: NoiseModel = NoiseModel.none()) -> np.ndarray:
    """Run the Werner-pair circuit and trace out the two ancilla qubits."""
    rho = run_circuit(build_werner_pair(theta_a, theta_b), noise)
    reduced = partial_trace(rho, (0, 1))
    return 0.5 * (reduced + reduced.conj().T)


def werner_weight(rho_pair) -> float:
    """Best-fit mixing weight p of a two-qubit state against the Werner form."""
    rho_pair = as_matrix(rho_pair)
    if rho_pair.shape != (4, 4):
        raise ValueError("werner_weight expects a two-qubit state")
    overlap = float(np.real(singlet_state().conj() @ rho_pair @ singlet_state()))
    return (4.0 * overlap - 1.0) / 3.0
