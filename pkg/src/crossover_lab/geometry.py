"""Two-qubit Bloch geometry: Fano form, quantum obesity and steering ellipsoids."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import IDENTITY2, pauli

_SIGMAS = [pauli(a) for a in "xyz"]

DEGENERATE_MARGINAL_TOL = 1e-9
EIGEN_CLAMP = -1e-12


@dataclass(frozen=True)
class FanoDecomposition:
    """Local vectors ``x`` (first qubit), ``y`` (second qubit) and correlations ``T``."""

    x: np.ndarray
    y: np.ndarray
    T: np.ndarray

    @property
    def R(self) -> np.ndarray:
        """The 4x4 matrix [[1, x], [y^T, T]], x along the top row and y down the first column."""
        R = np.empty((4, 4))
        R[0, 0] = 1.0
        R[0, 1:] = self.x
        R[1:, 0] = self.y
        R[1:, 1:] = self.T
        return R

    @property
    def Theta(self) -> np.ndarray:
        """[[1, y], [x^T, T]]: the local vectors placed to match the row/column indices of T.

        det Theta = det(T - x y^T) is invariant under local unitaries.  It
        equals det R whenever T is symmetric, as for every ground state of
        the model, but not for general two-qubit states.
        """
        R = self.R
        R[0, 1:] = self.y
        R[1:, 0] = self.x
        return R

    def swapped(self) -> "FanoDecomposition":
        """Same state with the two qubits exchanged."""
        return FanoDecomposition(self.y, self.x, self.T.T.copy())

    def reconstruct(self) -> np.ndarray:
        rho = np.kron(IDENTITY2, IDENTITY2).astype(complex)
        for i, s in enumerate(_SIGMAS):
            rho += self.x[i] * np.kron(s, IDENTITY2) + self.y[i] * np.kron(IDENTITY2, s)
            for j, s2 in enumerate(_SIGMAS):
                rho += self.T[i, j] * np.kron(s, s2)
        return rho / 4


@dataclass(frozen=True)
class SteeringEllipsoid:
    center: np.ndarray
    semiaxes: np.ndarray
    orientation: np.ndarray  # columns are the principal axes
    gamma: float
    volume: float
    obesity: float
    degenerate: bool
    matrix: np.ndarray | None = None

    @property
    def axes_volume(self) -> float:
        """(4 pi / 3) s1 s2 s3."""
        return 4 * math.pi / 3 * float(np.prod(self.semiaxes))


def fano(rho: np.ndarray) -> FanoDecomposition:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a two-qubit state, got shape {rho.shape}")
    x = np.array([np.trace(rho @ np.kron(s, IDENTITY2)).real for s in _SIGMAS])
    y = np.array([np.trace(rho @ np.kron(IDENTITY2, s)).real for s in _SIGMAS])
    T = np.array([[np.trace(rho @ np.kron(a, b)).real for b in _SIGMAS] for a in _SIGMAS])
    return FanoDecomposition(x, y, T)


def obesity(f: FanoDecomposition) -> float:
    """|det Theta|^(1/4); equal to |det R|^(1/4) for symmetric correlation matrices."""
    return float(abs(np.linalg.det(f.Theta)) ** 0.25)


def ellipsoid(f: FanoDecomposition, steered_party: str = "first") -> SteeringEllipsoid:
    """Steering ellipsoid of ``steered_party`` when the other qubit is measured.

    When the measured qubit's marginal is pure (|y| within 1e-9 of 1) the
    ellipsoid collapses; the result is flagged ``degenerate`` with zero
    volume instead of raising.
    """
    if steered_party == "second":
        f = f.swapped()
    elif steered_party != "first":
        raise ValueError(f"steered_party must be 'first' or 'second', got {steered_party!r}")
    x, y, T = f.x, f.y, f.T
    omega = obesity(f)
    y2 = float(y @ y)
    if math.sqrt(y2) >= 1 - DEGENERATE_MARGINAL_TOL:
        return SteeringEllipsoid(
            center=x.copy(),
            semiaxes=np.zeros(3),
            orientation=np.eye(3),
            gamma=math.inf,
            volume=0.0,
            obesity=omega,
            degenerate=True,
        )
    gamma = 1.0 / (1.0 - y2)
    M = T - np.outer(x, y)
    Q = gamma * M @ (np.eye(3) + gamma * np.outer(y, y)) @ M.T
    Q = 0.5 * (Q + Q.T)
    q, vecs = np.linalg.eigh(Q)
    if q.min() < EIGEN_CLAMP * max(1.0, q.max()):
        raise ArithmeticError(f"ellipsoid matrix has negative eigenvalue {q.min():.3e}")
    semiaxes = np.sqrt(np.clip(q, 0.0, None))
    return SteeringEllipsoid(
        center=gamma * (x - T @ y),
        semiaxes=semiaxes,
        orientation=vecs,
        gamma=gamma,
        volume=4 * math.pi / 3 * gamma**2 * omega**4,
        obesity=omega,
        degenerate=False,
        matrix=Q,
    )


@dataclass(frozen=True)
class ClosedForms:
    omega_AB: float
    omega_AC: float
    V_AB: float
    V_AC: float
    y_AB_local: np.ndarray
    y_C_local: np.ndarray
    V_AB_reduced: float
    V_AC_reduced: float
    V_AC_degenerate: bool


def closed_forms(alpha: complex, beta: complex, normN: float | None = None) -> ClosedForms:
    """Obesities, local vectors and ellipsoid volumes as functions of alpha, beta.

    ``V_AB`` and ``V_AC`` are the printed volume expressions.  They carry an
    extra factor ``gamma^2`` relative to ``(4 pi / 3) gamma^2 Omega^4``, so
    ``V_AB_reduced`` and ``V_AC_reduced`` give that expression written out
    in alpha and beta.  For AC the steered qubit is A and the measured one C.
    """
    a2, b2 = abs(alpha) ** 2, abs(beta) ** 2
    N = 1 + a2 + 2 * b2 if normN is None else float(normN)
    omega_ab = 2 / N * math.sqrt(abs(b2 * b2 - a2))
    omega_ac = 2 * math.sqrt(b2) / N * math.sqrt(abs(a2 - 1))
    y_ab = np.array([0.0, 0.0, (a2 - 1) / N])
    y_c = np.array([0.0, 0.0, -(a2 - 2 * b2 + 1) / N])

    v_ab = math.pi * N**4 / 12 * (b2 * b2 - a2) ** 2 / ((1 + b2) ** 4 * (a2 + b2) ** 4)
    v_ab_reduced = 4 * math.pi / 3 * (b2 * b2 - a2) ** 2 / ((1 + b2) ** 2 * (a2 + b2) ** 2)
    # beta -> 0 purifies the C marginal; the printed form diverges there
    degenerate_ac = b2 == 0.0
    if degenerate_ac:
        v_ac = math.inf
        v_ac_reduced = 0.0
    else:
        v_ac = math.pi * N**4 / 192 * (1 - a2) ** 2 / ((1 + a2) ** 4 * b2 * b2)
        v_ac_reduced = math.pi / 3 * (1 - a2) ** 2 / (1 + a2) ** 2
    return ClosedForms(
        omega_AB=omega_ab,
        omega_AC=omega_ac,
        V_AB=v_ab,
        V_AC=v_ac,
        y_AB_local=y_ab,
        y_C_local=y_c,
        V_AB_reduced=v_ab_reduced,
        V_AC_reduced=v_ac_reduced,
        V_AC_degenerate=degenerate_ac,
    )
