"""Dense 2^N statevector simulation of qubit excitation evolutions.

Basis index bit p encodes the occupation of spin orbital p. A qubit
excitation evolution exp(theta T) acts as a Givens rotation between paired
occupation patterns and carries no fermionic parity string:

    source (q occupied / pair (r,s) occupied):  a -> cos(t) a - sin(t) b
    destination (p occupied / pair (p,q)):      b -> cos(t) b + sin(t) a

so d/dtheta exp(theta T)|source> at 0 is +|destination>. This sign
convention is fixed here once and shared by every gradient formula.

Energy and overlap gradients are exact reverse (adjoint) sweeps: one
Hamiltonian application plus O(m) excitation applications for an
m-parameter ansatz.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .pauli import _I_POWERS, QubitOperator
from .pool import SingleExcitation

__all__ = [
    "Statevector",
    "Ansatz",
    "prepare_hf",
    "apply_excitation",
    "apply_generator",
    "apply_ansatz",
    "expectation",
    "overlap",
    "energy_and_gradient",
    "overlap_and_gradient",
    "format_state",
]

MAX_QUBITS = 24


class Statevector:
    """Complex amplitude vector over the 2^N computational basis."""

    def __init__(self, n_qubits: int, amplitudes=None):
        if n_qubits > MAX_QUBITS:
            raise ValueError(
                f"{n_qubits} qubits exceeds the {MAX_QUBITS}-qubit dense-simulation cap")
        self.n_qubits = n_qubits
        if amplitudes is None:
            self.amplitudes = np.zeros(1 << n_qubits, dtype=np.complex128)
        else:
            amplitudes = np.asarray(amplitudes, dtype=np.complex128)
            if amplitudes.shape != (1 << n_qubits,):
                raise ValueError("amplitude array has wrong length")
            self.amplitudes = amplitudes

    def copy(self):
        return Statevector(self.n_qubits, self.amplitudes.copy())

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self):
        return Statevector(self.n_qubits, self.amplitudes / self.norm())


def prepare_hf(n_qubits: int, n_electrons: int) -> Statevector:
    """Hartree-Fock reference: amplitude 1 on the lowest-n-bits basis index."""
    if n_electrons > n_qubits:
        raise ValueError(f"{n_electrons} electrons do not fit in {n_qubits} spin orbitals")
    state = Statevector(n_qubits)
    state.amplitudes[(1 << n_electrons) - 1] = 1.0
    return state


@lru_cache(maxsize=None)
def _pair_indices(excitation, n_qubits):
    """(source, destination) basis-index arrays coupled by the excitation."""
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    if isinstance(excitation, SingleExcitation):
        p, q = excitation.p, excitation.q
        flip = (1 << p) | (1 << q)
        mask = ((idx >> q) & 1 == 1) & ((idx >> p) & 1 == 0)
    else:
        p, q, r, s = excitation.p, excitation.q, excitation.r, excitation.s
        flip = (1 << p) | (1 << q) | (1 << r) | (1 << s)
        mask = (((idx >> r) & 1 == 1) & ((idx >> s) & 1 == 1)
                & ((idx >> p) & 1 == 0) & ((idx >> q) & 1 == 0))
    src = idx[mask]
    return src, src ^ flip


def _rotate(amps, excitation, theta, n_qubits):
    src, dst = _pair_indices(excitation, n_qubits)
    c, s = np.cos(theta), np.sin(theta)
    a = amps[src]
    b = amps[dst]
    amps[src] = c * a - s * b
    amps[dst] = c * b + s * a


def apply_excitation(state: Statevector, excitation, theta: float) -> Statevector:
    """Return exp(theta T)|state> for a single or double qubit excitation."""
    _validate_excitation(excitation, state.n_qubits)
    out = state.copy()
    _rotate(out.amplitudes, excitation, theta, state.n_qubits)
    return out


def apply_generator(state: Statevector, excitation) -> Statevector:
    """Return T|state>: +|dst><src| - |src><dst| on the coupled pairs."""
    _validate_excitation(excitation, state.n_qubits)
    src, dst = _pair_indices(excitation, state.n_qubits)
    out = Statevector(state.n_qubits)
    out.amplitudes[dst] = state.amplitudes[src]
    out.amplitudes[src] = -state.amplitudes[dst]
    return out


def _validate_excitation(excitation, n_qubits):
    for i in excitation.indices():
        if not 0 <= i < n_qubits:
            raise ValueError(f"orbital index {i} outside [0, {n_qubits})")


@dataclass
class Ansatz:
    """Ordered (excitation, angle) list applied to the Hartree-Fock state.

    Entry 0 is applied first, matching left-appension of newly selected
    operators.
    """

    n_qubits: int
    n_electrons: int
    excitations: list = field(default_factory=list)
    thetas: list = field(default_factory=list)

    def append(self, excitation, theta=0.0):
        self.excitations.append(excitation)
        self.thetas.append(float(theta))

    def copy(self):
        return Ansatz(self.n_qubits, self.n_electrons,
                      list(self.excitations), list(self.thetas))

    def with_thetas(self, thetas):
        return Ansatz(self.n_qubits, self.n_electrons,
                      list(self.excitations), [float(t) for t in thetas])

    def __len__(self):
        return len(self.excitations)


def apply_ansatz(ansatz: Ansatz, thetas=None) -> Statevector:
    state = prepare_hf(ansatz.n_qubits, ansatz.n_electrons)
    thetas = ansatz.thetas if thetas is None else thetas
    for excitation, theta in zip(ansatz.excitations, thetas):
        _rotate(state.amplitudes, excitation, theta, ansatz.n_qubits)
    return state


def _operator_matvec(operator, amps, n_qubits):
    """H|psi> for a QubitOperator, sparse matrix, or dense array."""
    if isinstance(operator, QubitOperator):
        if operator.n_qubits != n_qubits:
            raise ValueError("qubit-count mismatch between operator and state")
        out = np.zeros_like(amps)
        idx = np.arange(len(amps), dtype=np.int64)
        groups = {}
        for s, c in operator.sorted_terms():
            groups.setdefault(s.x_mask, []).append((s.z_mask, c))
        for x_mask, entries in groups.items():
            rows = idx ^ x_mask
            data = np.zeros(len(amps), dtype=np.complex128)
            for z_mask, c in entries:
                phase = _I_POWERS[(-(z_mask & x_mask).bit_count()) % 4]
                signs = 1.0 - 2.0 * (np.bitwise_count(rows & z_mask) & 1)
                data += (c * phase) * signs
            out[rows] += data * amps
        return out
    if sp.issparse(operator) or isinstance(operator, np.ndarray):
        if operator.shape[0] != len(amps):
            raise ValueError("operator dimension does not match the state")
        return operator @ amps
    raise TypeError(f"unsupported operator type {type(operator).__name__}")


def expectation(state: Statevector, operator) -> float:
    """<state|H|state> for a hermitian operator; imaginary residue is rejected."""
    h_psi = _operator_matvec(operator, state.amplitudes, state.n_qubits)
    value = np.vdot(state.amplitudes, h_psi)
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise ValueError(
            f"expectation has imaginary part {value.imag:.3e}; operator not hermitian?")
    return float(value.real)


def overlap(a: Statevector, b: Statevector) -> complex:
    """<a|b>."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("statevector size mismatch")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def _pair_bracket(left, right, excitation, n_qubits):
    """<left|T|right> from the coupled index pairs, without materializing T."""
    src, dst = _pair_indices(excitation, n_qubits)
    return complex(np.vdot(left[dst], right[src]) - np.vdot(left[src], right[dst]))


def energy_and_gradient(ansatz: Ansatz, operator, thetas=None):
    """E(theta) = <psi|H|psi> and dE/dtheta_k for all k via a reverse sweep.

    The backward pass un-applies each evolution from both |psi> and
    lambda = H|psi>, reading off dE/dtheta_k = 2 Re <lambda_k|T_k|psi_k>;
    total cost is one Hamiltonian application plus O(m) excitation
    applications.
    """
    thetas = ansatz.thetas if thetas is None else list(thetas)
    psi = apply_ansatz(ansatz, thetas)
    lam = _operator_matvec(operator, psi.amplitudes, ansatz.n_qubits)
    energy = np.vdot(psi.amplitudes, lam)
    if abs(energy.imag) > 1e-10 * max(1.0, abs(energy.real)):
        raise ValueError("non-hermitian operator in energy evaluation")
    grad = np.zeros(len(ansatz))
    phi = psi.amplitudes
    for k in range(len(ansatz) - 1, -1, -1):
        excitation = ansatz.excitations[k]
        grad[k] = 2.0 * _pair_bracket(lam, phi, excitation, ansatz.n_qubits).real
        _rotate(phi, excitation, -thetas[k], ansatz.n_qubits)
        _rotate(lam, excitation, -thetas[k], ansatz.n_qubits)
    return float(energy.real), grad


def overlap_and_gradient(ansatz: Ansatz, target: Statevector, thetas=None):
    """F(theta) = |<target|psi(theta)>|^2 and its gradient via a reverse sweep."""
    if target.n_qubits != ansatz.n_qubits:
        raise ValueError("target size mismatch")
    thetas = ansatz.thetas if thetas is None else list(thetas)
    psi = apply_ansatz(ansatz, thetas)
    c = np.vdot(target.amplitudes, psi.amplitudes)
    grad = np.zeros(len(ansatz))
    phi = psi.amplitudes
    mu = target.amplitudes.copy()
    for k in range(len(ansatz) - 1, -1, -1):
        excitation = ansatz.excitations[k]
        bracket = _pair_bracket(mu, phi, excitation, ansatz.n_qubits)
        grad[k] = 2.0 * (np.conjugate(c) * bracket).real
        _rotate(phi, excitation, -thetas[k], ansatz.n_qubits)
        _rotate(mu, excitation, -thetas[k], ansatz.n_qubits)
    return float(abs(c) ** 2), grad


def format_state(state: Statevector, cutoff=0.0) -> str:
    """`index amplitude_re amplitude_im` lines for debugging dumps."""
    lines = []
    for i, a in enumerate(state.amplitudes):
        if abs(a) > cutoff:
            lines.append(f"{i} {a.real: .16e} {a.imag: .16e}")
    return "\n".join(lines)
