"""Zero-temperature microscopic master equation for the three-qubit system.

Superoperators act on column-stacked density matrices: ``vec(rho)`` stacks
the columns of ``rho``, so ``vec(A rho B) = kron(B.T, A) @ vec(rho)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .model import SITES, embed, pauli

log = logging.getLogger(__name__)

BOHR_RTOL = 1e-9
NULL_RTOL = 1e-10


class SteadyStateMultiplicityError(ValueError):
    def __init__(self, dimension: int):
        super().__init__(f"Liouvillian null space has dimension {dimension}, expected 1")
        self.dimension = dimension


@dataclass(frozen=True)
class JumpOperator:
    omega: float
    operator: np.ndarray
    site: str
    rate: float


@dataclass(frozen=True)
class JumpOperatorSet:
    transitions: list[JumpOperator]
    energies: np.ndarray
    eigenvectors: np.ndarray
    warnings: list[str] = field(default_factory=list)

    def for_site(self, site: str) -> list[JumpOperator]:
        return [j for j in self.transitions if j.site == site]


@dataclass(frozen=True)
class Liouvillian:
    matrix: np.ndarray
    convention: str = "column-stacking"

    def apply(self, rho: np.ndarray) -> np.ndarray:
        d = rho.shape[0]
        return unvec(self.matrix @ vec(rho), d)


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape((d, d), order="F")


def _levels(energies: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group sorted eigenvalue indices into degenerate levels."""
    groups = [[0]]
    for k in range(1, len(energies)):
        if energies[k] - energies[groups[-1][0]] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return [np.array(g) for g in groups]


def _bin_frequencies(diffs: list[float], tol: float) -> tuple[list[float], list[str]]:
    """Cluster positive Bohr frequencies; returns bin centers and warnings."""
    bins: list[list[float]] = []
    warnings = []
    for w in sorted(diffs):
        if bins and w - bins[-1][0] <= tol:
            bins[-1].append(w)
        else:
            if bins and w - bins[-1][-1] <= 10 * tol:
                warnings.append(f"Bohr frequencies {bins[-1][-1]:.12g} and {w:.12g} nearly coincide")
            bins.append([w])
    return [float(np.mean(b)) for b in bins], warnings


def build_jump_operators(H: np.ndarray, mu: float | dict[str, float] = 1.0) -> JumpOperatorSet:
    """Jump operators A_j(omega) for sigma_x coupling on every site, omega > 0 only.

    ``mu`` is the Ohmic prefactor, either shared or given per site; the rate
    of each transition is ``mu_j * omega``.
    """
    H = np.asarray(H, dtype=complex)
    mus = {s: float(mu) for s in SITES} if np.isscalar(mu) else {s: float(mu[s]) for s in SITES}
    if any(m < 0 for m in mus.values()):
        raise ValueError("mu must be nonnegative")
    energies, vecs = np.linalg.eigh(H)
    tol = BOHR_RTOL * max(energies[-1] - energies[0], 1.0)
    levels = _levels(energies, tol)
    level_e = [float(np.mean(energies[g])) for g in levels]
    projectors = [vecs[:, g] @ vecs[:, g].conj().T for g in levels]

    pairs = []  # (omega, lower level i, upper level k)
    for k in range(len(levels)):
        for i in range(k):
            pairs.append((level_e[k] - level_e[i], i, k))
    centers, warnings = _bin_frequencies([w for w, _, _ in pairs], tol)
    for w in warnings:
        log.warning(w)

    transitions = []
    for site in SITES:
        sx = embed(pauli("x"), site)
        for center in centers:
            op = np.zeros_like(H)
            for w, i, k in pairs:
                if abs(w - center) <= tol:
                    op += projectors[i] @ sx @ projectors[k]
            if np.abs(op).max() > 1e-14:
                transitions.append(JumpOperator(center, op, site, mus[site] * center))
    return JumpOperatorSet(transitions, energies, vecs, warnings)


def build_liouvillian(H: np.ndarray, jumps: JumpOperatorSet | list[JumpOperator] | None) -> Liouvillian:
    H = np.asarray(H, dtype=complex)
    d = H.shape[0]
    eye = np.eye(d)
    L = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    items = jumps.transitions if isinstance(jumps, JumpOperatorSet) else (jumps or [])
    for j in items:
        A = j.operator
        AdA = A.conj().T @ A
        L += j.rate * (
            np.kron(A.conj(), A) - 0.5 * np.kron(eye, AdA) - 0.5 * np.kron(AdA.T, eye)
        )
    return Liouvillian(L)


def steady_state(L: Liouvillian) -> np.ndarray:
    """The unique unit-trace null vector of ``L`` as a density matrix.

    Raises :class:`SteadyStateMultiplicityError` if the null space is not
    one-dimensional.
    """
    M = L.matrix
    d = int(round(np.sqrt(M.shape[0])))
    _, s, vh = np.linalg.svd(M)
    threshold = NULL_RTOL * max(s[0], 1.0)
    dim = int(np.sum(s <= threshold))
    if dim != 1:
        raise SteadyStateMultiplicityError(dim)
    rho = unvec(vh[-1].conj(), d)
    rho = rho / np.trace(rho)
    return 0.5 * (rho + rho.conj().T)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of ``rho - sigma``."""
    return float(0.5 * np.abs(np.linalg.eigvalsh(rho - sigma)).sum())
