"""Three-qubit model: parameters, Pauli algebra and the system Hamiltonian.

Conventions used across the package:

* hbar = 1, all frequencies and couplings are bare numbers;
* sigma_z = diag(+1, -1), so |0> is the +1 eigenvector;
* qubit order A (x) B (x) C with A the most significant bit, i.e. the basis
  state |abc> sits at index 4*a + 2*b + c.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

SITES = ("A", "B", "C")

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
IDENTITY2 = np.eye(2, dtype=complex)


def basis_index(label: str) -> int:
    """Index of the computational basis state ``label`` (e.g. ``"011"``)."""
    if len(label) != 3 or set(label) - {"0", "1"}:
        raise ValueError(f"invalid basis label {label!r}")
    return int(label, 2)


@dataclass(frozen=True)
class SystemParams:
    """Hamiltonian parameters.

    ``omega0`` is the splitting of the identical qubits A and B, ``omegaC``
    the splitting of qubit C, ``J`` the A-B (signal) coupling and ``JC`` the
    A-C and B-C (probe) coupling.
    """

    omega0: float
    omegaC: float
    J: float
    JC: float

    def __post_init__(self):
        for name in ("omega0", "omegaC", "J", "JC"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.omega0 <= 0 or self.omegaC <= 0:
            raise ValueError("omega0 and omegaC must be positive")

    def with_jc(self, jc: float) -> "SystemParams":
        return replace(self, JC=jc)

    def as_dict(self) -> dict:
        return {"omega0": self.omega0, "omegaC": self.omegaC, "J": self.J, "JC": self.JC}


def pauli(axis: str) -> np.ndarray:
    """Return the 2x2 Pauli matrix for ``axis`` in {"x", "y", "z"}."""
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValueError(f"invalid Pauli axis {axis!r}") from None


def embed(op: np.ndarray, site: str) -> np.ndarray:
    """Place a single-qubit operator on ``site`` of the three-qubit register."""
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2):
        raise ValueError(f"expected a 2x2 operator, got shape {op.shape}")
    if site not in SITES:
        raise ValueError(f"invalid site {site!r}, expected one of {SITES}")
    factors = [op if s == site else IDENTITY2 for s in SITES]
    return np.kron(np.kron(factors[0], factors[1]), factors[2])


def xx(site1: str, site2: str) -> np.ndarray:
    """sigma_x on two distinct sites."""
    return embed(_PAULI["x"], site1) @ embed(_PAULI["x"], site2)


def free_hamiltonian(p: SystemParams) -> np.ndarray:
    sz = _PAULI["z"]
    return 0.5 * p.omega0 * (embed(sz, "A") + embed(sz, "B")) + 0.5 * p.omegaC * embed(sz, "C")


def interaction_hamiltonian(p: SystemParams) -> np.ndarray:
    return p.J * xx("A", "B") + p.JC * (xx("A", "C") + xx("B", "C"))


def build_hamiltonian(p: SystemParams) -> np.ndarray:
    """8x8 Hamiltonian ``H0 + HI``.

    All terms are real in the computational basis, so the result is a real
    symmetric matrix stored with complex dtype.
    """
    return free_hamiltonian(p) + interaction_hamiltonian(p)


def is_hermitian(m: np.ndarray, atol: float = 1e-14) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.allclose(m, m.conj().T, rtol=0, atol=atol)
