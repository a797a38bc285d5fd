"""Dense statevector simulation for the small gate set used by the feature maps.

Conventions
-----------
* Rotations are ``R_P(theta) = exp(-i theta P / 2)``; ``RZZ(theta) = exp(-i theta Z Z / 2)``.
* Qubit ``q`` is bit ``q`` of the amplitude index (qubit 0 is least significant).

Besides the per-state API (:func:`apply_gate`, :func:`run_circuit`) there is a
batched path, :func:`run_batch`, that evolves many states sharing one circuit
layout but carrying per-row angles. Runs of diagonal gates are fused into a
single phase multiplication there, which is what keeps Gram matrices over a few
hundred points cheap.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError

MAX_QUBITS = 20

GATE_ARITY = {
    # kind: (n_targets, n_angles)
    "H": (1, 0),
    "RX": (1, 1),
    "RY": (1, 1),
    "RZ": (1, 1),
    "RXYZ": (1, 3),
    "CZ": (2, 0),
    "RZZ": (2, 1),
}
DIAGONAL = frozenset({"RZ", "CZ", "RZZ"})


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    angles: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        n_targets, n_angles = GATE_ARITY[self.kind]
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        if len(self.targets) != n_targets:
            raise ValueError(f"{self.kind} takes {n_targets} target(s), got {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"{self.kind} targets must be distinct, got {self.targets}")
        if len(self.angles) != n_angles:
            raise ValueError(f"{self.kind} takes {n_angles} angle(s), got {self.angles}")

    def inverse(self) -> "Gate":
        if self.kind in ("H", "CZ"):
            return self
        if self.kind == "RXYZ":
            # U(t1, t2, t3)^dagger == U(-t1, -t3, -t2)
            t1, t2, t3 = self.angles
            return Gate("RXYZ", self.targets, (-t1, -t3, -t2))
        return Gate(self.kind, self.targets, tuple(-a for a in self.angles))


@dataclass(frozen=True)
class CircuitSpec:
    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))

    def __add__(self, other: "CircuitSpec") -> "CircuitSpec":
        if other.n_qubits != self.n_qubits:
            raise ValueError("cannot concatenate circuits of different width")
        return CircuitSpec(self.n_qubits, self.gates + other.gates)

    def __len__(self):
        return len(self.gates)


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(
                f"expected {2**self.n_qubits} amplitudes for {self.n_qubits} qubits, got {amps.shape}"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)


def _check_width(n_qubits: int) -> None:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")


def zero_state(n_qubits: int) -> StateVector:
    _check_width(n_qubits)
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def single_qubit_matrix(kind: str, angles) -> np.ndarray:
    """2x2 unitary for a one-qubit gate.

    ``angles`` may be a tuple of floats or a tuple of equal-length arrays; in the
    latter case the result has shape ``(m, 2, 2)``.
    """
    if kind == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    if kind == "RXYZ":
        t1, t2, t3 = (np.asarray(a, dtype=float) for a in angles)
        c, s = np.cos(t1 / 2), np.sin(t1 / 2)
        mat = np.stack(
            [
                np.stack([c + 0j, -np.exp(1j * t2) * s], axis=-1),
                np.stack([np.exp(1j * t3) * s, np.exp(1j * (t2 + t3)) * c], axis=-1),
            ],
            axis=-2,
        )
        return mat
    (theta,) = angles
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    if kind == "RX":
        rows = [[c + 0j, -1j * s], [-1j * s, c + 0j]]
    elif kind == "RY":
        rows = [[c + 0j, -s + 0j], [s + 0j, c + 0j]]
    elif kind == "RZ":
        zero = np.zeros_like(c) + 0j
        rows = [[np.exp(-0.5j * theta), zero], [zero, np.exp(0.5j * theta)]]
    else:
        raise ValueError(f"{kind} is not a single-qubit gate")
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def _bits(n_qubits: int) -> np.ndarray:
    """(n_qubits, 2**n_qubits) array of index bits, row q = bit q."""
    idx = np.arange(2**n_qubits)
    return (idx[None, :] >> np.arange(n_qubits)[:, None]) & 1


def _diagonal_phase_coeffs(kind: str, targets: tuple[int, ...], bits: np.ndarray, z=None):
    """Return (slope, offset) with phase(index) = slope * angle + offset."""
    if z is None:
        z = 1.0 - 2.0 * bits  # +1 for |0>, -1 for |1>
    if kind == "RZ":
        return -0.5 * z[targets[0]], 0.0
    if kind == "RZZ":
        j, k = targets
        return -0.5 * z[j] * z[k], 0.0
    if kind == "CZ":
        j, k = targets
        return 0.0, np.pi * (bits[j] & bits[k])
    raise ValueError(f"{kind} is not diagonal")


def _apply_1q(states: np.ndarray, mats: np.ndarray, q: int, n_qubits: int) -> np.ndarray:
    """states: (m, 2**n); mats: (2, 2) or (m, 2, 2)."""
    m = states.shape[0]
    view = states.reshape(m, 2 ** (n_qubits - 1 - q), 2, 2**q)
    if mats.ndim == 3:
        mats = mats[:, None, :, :]
    return np.matmul(mats, view).reshape(m, -1)


def _check_targets(gate: Gate, n_qubits: int) -> None:
    for t in gate.targets:
        if not 0 <= t < n_qubits:
            raise ValueError(f"target {t} out of range for {n_qubits} qubits in {gate}")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    _check_targets(gate, state.n_qubits)
    n = state.n_qubits
    amps = state.amplitudes[None, :]
    if gate.kind in DIAGONAL:
        slope, offset = _diagonal_phase_coeffs(gate.kind, gate.targets, _bits(n))
        angle = gate.angles[0] if gate.angles else 0.0
        out = amps * np.exp(1j * (slope * angle + offset))
    else:
        out = _apply_1q(amps, single_qubit_matrix(gate.kind, gate.angles), gate.targets[0], n)
    return StateVector(n, out[0])


def run_circuit(spec: CircuitSpec) -> StateVector:
    state = zero_state(spec.n_qubits)
    for gate in spec.gates:
        state = apply_gate(state, gate)
    return state


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


# --------------------------------------------------------------------------- batched


@dataclass
class CircuitBatch:
    """One gate layout shared by ``m`` circuits, angles stored per row.

    ``ops`` holds ``(kind, targets, angles)`` where ``angles`` has shape
    ``(m, n_angles)``.
    """

    n_qubits: int
    m: int
    ops: list = field(default_factory=list)

    def add(self, kind: str, targets: Sequence[int], angles: Sequence = ()) -> None:
        """Append a gate; each entry of ``angles`` is a scalar or a length-``m`` array."""
        n_targets, n_angles = GATE_ARITY[kind]
        if len(targets) != n_targets or len(angles) != n_angles:
            raise ValueError(f"bad arity for {kind}: targets={targets}, {len(angles)} angles")
        cols = [np.broadcast_to(np.asarray(a, dtype=float), (self.m,)) for a in angles]
        arr = np.column_stack(cols) if cols else np.zeros((self.m, 0))
        self.ops.append((kind, tuple(int(t) for t in targets), arr))

    def extend(self, other: "CircuitBatch") -> None:
        if (other.n_qubits, other.m) != (self.n_qubits, self.m):
            raise ValueError("batch shapes differ")
        self.ops.extend(other.ops)

    def circuit(self, row: int) -> CircuitSpec:
        return CircuitSpec(
            self.n_qubits, tuple(Gate(k, t, tuple(a[row])) for k, t, a in self.ops)
        )


@dataclass(frozen=True, eq=False)
class CompiledBatch:
    """A :class:`CircuitBatch` reduced to fused steps.

    ``steps`` holds ``("phase", factors)`` with ``factors`` of shape ``(m, 2**n)``
    and ``("unitary", q, mats)`` with ``mats`` of shape ``(2, 2)`` or ``(m, 2, 2)``.
    Compiling once and running many times pays off when the same circuits act on
    different input states.
    """

    n_qubits: int
    m: int
    steps: tuple


def compile_batch(batch: CircuitBatch) -> CompiledBatch:
    n, m = batch.n_qubits, batch.m
    _check_width(n)
    ops = batch.ops
    for kind, targets, _ in ops:
        if any(not 0 <= t < n for t in targets):
            raise ValueError(f"{kind} target out of range for {n} qubits: {targets}")
    bits = _bits(n)
    z = 1.0 - 2.0 * bits
    steps = []
    i = 0
    while i < len(ops):
        if ops[i][0] in DIAGONAL:
            # fuse the whole run of diagonal gates into one phase
            slopes, cols = [], []
            offset = np.zeros(2**n)
            while i < len(ops) and ops[i][0] in DIAGONAL:
                kind, targets, angles = ops[i]
                slope, off = _diagonal_phase_coeffs(kind, targets, bits, z)
                offset = offset + off
                if kind != "CZ":
                    slopes.append(slope)
                    cols.append(angles[:, 0])
                i += 1
            phase = np.broadcast_to(offset, (m, 2**n))
            if slopes:
                phase = np.column_stack(cols) @ np.vstack(slopes) + offset
            steps.append(("phase", np.exp(1j * phase)))
            continue
        # fuse the run of one-qubit gates, per qubit, into one 2x2 (or (m, 2, 2)) product
        fused = {}
        while i < len(ops) and ops[i][0] not in DIAGONAL:
            kind, targets, angles = ops[i]
            if kind == "H" or _uniform(angles):
                mats = single_qubit_matrix(kind, tuple(angles[0]))
            else:
                mats = single_qubit_matrix(kind, tuple(angles.T))
            q = targets[0]
            fused[q] = mats if q not in fused else np.matmul(mats, fused[q])
            i += 1
        steps.extend(("unitary", q, mats) for q, mats in fused.items())
    return CompiledBatch(n, m, tuple(steps))


def run_compiled(compiled: CompiledBatch, initial=None) -> np.ndarray:
    """Apply compiled circuits to ``initial`` (default ``|0...0>``); one row per circuit.

    ``initial`` may be a single ``2**n`` state shared by every row or an
    ``(m, 2**n)`` array.
    """
    n, m = compiled.n_qubits, compiled.m
    if initial is None:
        states = np.zeros((m, 2**n), dtype=complex)
        states[:, 0] = 1.0
    else:
        states = np.array(np.broadcast_to(np.asarray(initial, dtype=complex), (m, 2**n)))
    for step in compiled.steps:
        if step[0] == "phase":
            states *= step[1]
        else:
            states = _apply_1q(states, step[2], step[1], n)
    return states


def run_batch(batch: CircuitBatch, initial=None) -> np.ndarray:
    """Evolve ``initial`` (default ``|0...0>``) under every row of ``batch``; returns ``(m, 2**n)``."""
    return run_compiled(compile_batch(batch), initial)


def _uniform(angles: np.ndarray) -> bool:
    return angles.shape[0] <= 1 or bool(np.all(angles == angles[0]))
