"""Classical and quantum Fisher information with respect to the probe coupling JC.

Derivatives are central differences with one Richardson level,
``D = (4 D(h/2) - D(h)) / 3``, and a default stride ``1e-5 * max(1, |JC|)``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import DEGENERATE_MARGINAL_TOL
from .model import SystemParams, pauli
from .spectral import GroundState, ground_state, partial_trace

log = logging.getLogger(__name__)

PROBABILITY_FLOOR = 1e-12
EIGEN_FLOOR = 1e-12
_OFFSETS = (-1.0, -0.5, 0.5, 1.0)


class DegenerateMarginalError(ValueError):
    """The single-qubit marginal is pure, so the local-vector FI is undefined."""


@dataclass(frozen=True)
class FisherReport:
    theta: float
    F_pop_A: float
    F_pop_B: float
    F_pop_C: float
    F_vec_A: float
    F_vec_C: float
    QFI_global: float
    derivative_step: float
    floored: bool = False


def default_step(jc: float) -> float:
    return 1e-5 * max(1.0, abs(jc))


def richardson(samples: dict[float, np.ndarray | float], h: float):
    """Derivative at 0 from samples at offsets -h, -h/2, h/2, h (keyed by offset / h)."""
    d1 = (samples[1.0] - samples[-1.0]) / (2 * h)
    d2 = (samples[0.5] - samples[-0.5]) / h
    return (4 * d2 - d1) / 3


def derivative(f: Callable[[float], float], x: float, h: float):
    return richardson({k: f(x + k * h) for k in _OFFSETS}, h)


def stencil(p: SystemParams, step: float, method: str = "symmetric") -> dict[float, GroundState]:
    """Ground states at JC and the four Richardson offsets."""
    out = {0.0: ground_state(p, method)}
    for k in _OFFSETS:
        out[k] = ground_state(p.with_jc(p.JC + k * step), method)
    return out


def site_state(gs: GroundState, site: str) -> np.ndarray:
    return partial_trace(gs.density_matrix, site)


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    return np.array([np.trace(rho @ pauli(a)).real for a in "xyz"])


def population_probabilities(rho_l: np.ndarray) -> tuple[float, float]:
    """Probabilities of |0> and |1> for a single-qubit state."""
    rho_l = np.asarray(rho_l)
    if rho_l.shape != (2, 2):
        raise ValueError(f"expected a single-qubit state, got shape {rho_l.shape}")
    return float(rho_l[0, 0].real), float(rho_l[1, 1].real)


def _population_fi(P: np.ndarray, dP: np.ndarray) -> tuple[float, bool]:
    total, floored = 0.0, False
    for prob, dprob in zip(P, dP):
        if prob < PROBABILITY_FLOOR:
            floored = True
            if abs(dprob) >= PROBABILITY_FLOOR:
                log.warning("probability %.3e below floor with slope %.3e; term skipped", prob, dprob)
            continue
        total += dprob * dprob / prob
    return total, floored


def _site_populations(states: dict[float, GroundState], site: str) -> dict[float, np.ndarray]:
    return {k: np.array(population_probabilities(site_state(g, site))) for k, g in states.items()}


def classical_fi_population(
    p: SystemParams, site: str, step: float | None = None, method: str = "symmetric"
) -> float:
    """FI of the |0>/|1> population measurement on ``site``.

    Probabilities below ``1e-12`` are skipped (their contribution vanishes in
    the limit where the slope vanishes with them).
    """
    step = default_step(p.JC) if step is None else step
    if step <= 0:
        raise ValueError("step must be positive")
    pops = _site_populations(stencil(p, step, method), site)
    return _population_fi(pops[0.0], richardson(pops, step))[0]


def _local_fi(z: float, dz: float) -> float:
    if abs(z) >= 1 - DEGENERATE_MARGINAL_TOL:
        raise DegenerateMarginalError(f"|y| = {abs(z):.12f} is within 1e-9 of 1")
    return dz * dz / (1 - z * z)


def classical_fi_localvector(
    p: SystemParams, site: str, step: float | None = None, method: str = "symmetric"
) -> float:
    """FI from the local Bloch vector, ``(d|y|/dJC)^2 / (1 - |y|^2)``.

    The marginal Bloch vector of every qubit points along z, so the signed z
    component is differenced; this avoids the kink of |y| at y = 0.
    """
    step = default_step(p.JC) if step is None else step
    if step <= 0:
        raise ValueError("step must be positive")
    states = stencil(p, step, method)
    z = {k: bloch_vector(site_state(g, site))[2] for k, g in states.items()}
    return _local_fi(z[0.0], richardson(z, step))


def _aligned(psi: np.ndarray, ref: np.ndarray) -> np.ndarray:
    ov = np.vdot(ref, psi)
    return psi if abs(ov) == 0 else psi * (abs(ov) / ov)


def _qfi_pure_from_states(states: dict[float, GroundState], step: float) -> float:
    psi = states[0.0].amplitudes
    vecs = {k: _aligned(g.amplitudes, psi) for k, g in states.items() if k != 0.0}
    dpsi = richardson(vecs, step)
    return float(4 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(psi, dpsi)) ** 2))


def qfi_pure(p: SystemParams, step: float | None = None, method: str = "symmetric") -> float:
    """QFI of the global ground state, ``4 (<dpsi|dpsi> - |<psi|dpsi>|^2)``."""
    step = default_step(p.JC) if step is None else step
    if step <= 0:
        raise ValueError("step must be positive")
    return _qfi_pure_from_states(stencil(p, step, method), step)


def qfi_mixed(
    rho_family: Callable[[float], np.ndarray], theta: float, step: float | None = None
) -> float:
    """QFI of a density-matrix family from its spectral decomposition.

    Returns the population term ``sum_n (dp_n)^2 / p_n`` plus the eigenvector
    term ``2 sum_{m != n} (p_m - p_n)^2 / (p_m + p_n) |<phi_m|d phi_n>|^2``.
    The eigenvector overlaps come from ``<phi_m|d rho|phi_n> / (p_n - p_m)``,
    so no eigenvectors need to be tracked across the stencil.  Degenerate
    eigenvalues contribute nothing to the second sum and are rotated to
    diagonalize ``d rho`` within their block for the first.
    """
    step = default_step(theta) if step is None else step
    if step <= 0:
        raise ValueError("step must be positive")
    rho = np.asarray(rho_family(theta), dtype=complex)
    drho = richardson({k: np.asarray(rho_family(theta + k * step), dtype=complex) for k in _OFFSETS}, step)
    drho = 0.5 * (drho + drho.conj().T)
    evals, evecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))

    # group degenerate eigenvalues and diagonalize drho inside each group
    groups, start = [], 0
    for k in range(1, len(evals) + 1):
        if k == len(evals) or evals[k] - evals[start] > EIGEN_FLOOR:
            groups.append(list(range(start, k)))
            start = k
    for g in groups:
        if len(g) > 1:
            block = evecs[:, g].conj().T @ drho @ evecs[:, g]
            _, rot = np.linalg.eigh(block)
            evecs[:, g] = evecs[:, g] @ rot
    D = evecs.conj().T @ drho @ evecs
    label = np.empty(len(evals), dtype=int)
    for gi, g in enumerate(groups):
        label[g] = gi

    populations = 0.0
    for n, pn in enumerate(evals):
        if pn > EIGEN_FLOOR:
            populations += D[n, n].real ** 2 / pn
    coherences = 0.0
    for m, pm in enumerate(evals):
        for n, pn in enumerate(evals):
            if m == n or label[m] == label[n] or pm + pn <= EIGEN_FLOOR:
                continue
            overlap = D[m, n] / (pn - pm)
            coherences += (pm - pn) ** 2 / (pm + pn) * abs(overlap) ** 2
    return float(populations + 2 * coherences)


def fisher_report(p: SystemParams, step: float | None = None, method: str = "symmetric") -> FisherReport:
    """All Fisher quantities at ``p`` from one shared five-point stencil."""
    step = default_step(p.JC) if step is None else step
    states = stencil(p, step, method)
    floored = False
    pops, fvec = {}, {}
    for site in "ABC":
        P = _site_populations(states, site)
        pops[site], fl = _population_fi(P[0.0], richardson(P, step))
        floored |= fl
        if site != "B":
            # P0 - P1 is the z component of the Bloch vector
            z = {k: v[0] - v[1] for k, v in P.items()}
            try:
                fvec[site] = _local_fi(z[0.0], richardson(z, step))
            except DegenerateMarginalError:
                fvec[site] = math.nan
    return FisherReport(
        theta=p.JC,
        F_pop_A=pops["A"],
        F_pop_B=pops["B"],
        F_pop_C=pops["C"],
        F_vec_A=fvec["A"],
        F_vec_C=fvec["C"],
        QFI_global=_qfi_pure_from_states(states, step),
        derivative_step=step,
        floored=floored,
    )
