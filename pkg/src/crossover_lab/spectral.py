"""Ground state of the three-qubit Hamiltonian and its reduced states.

Two independent routes are provided: a dense eigensolver
(:func:`ground_state_numeric`) and the closed-form cubic solution
(:func:`ground_state_analytic`).  :func:`ground_state` prefers the closed
form and falls back to the eigensolver where the closed form is singular.

The ground state lives in the odd-parity sector spanned by
|001>, |010>, |100>, |111> and is written as
``(-alpha|001> - beta|010> - beta|100> + |111>) / sqrt(N)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .model import SITES, SystemParams, basis_index, build_hamiltonian

I001 = basis_index("001")
I010 = basis_index("010")
I100 = basis_index("100")
I111 = basis_index("111")
ODD_SECTOR = (I001, I010, I100, I111)
EVEN_SECTOR = (basis_index("000"), basis_index("011"), basis_index("101"), basis_index("110"))

DEGENERACY_RTOL = 1e-10
SINGULARITY_RTOL = 1e-12
BRANCH_IMAG_TOL = 1e-8


class DegenerateGroundStateError(ValueError):
    """The lowest eigenvalue is (numerically) degenerate."""


class RatioUndefinedError(ValueError):
    """The |111> amplitude vanishes, so alpha and beta are undefined."""


class AnalyticSingularityError(ArithmeticError):
    """The closed-form denominators vanish; use the eigensolver instead."""


class BranchSelectionError(ArithmeticError):
    """No cube-root branch gives real alpha and beta."""


@dataclass(frozen=True)
class GroundState:
    amplitudes: np.ndarray
    energy: float
    alpha: complex
    beta: complex
    normN: float
    t_root: complex
    provenance: str = "analytic"
    gap: float = field(default=math.nan, compare=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def density_matrix(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


def _amplitudes(alpha: complex, beta: complex) -> tuple[np.ndarray, float]:
    normN = 1.0 + abs(alpha) ** 2 + 2.0 * abs(beta) ** 2
    v = np.zeros(8, dtype=complex)
    v[I001] = -alpha
    v[I010] = -beta
    v[I100] = -beta
    v[I111] = 1.0
    return v / math.sqrt(normN), normN


def ground_state_numeric(H: np.ndarray) -> GroundState:
    """Lowest eigenvector of ``H`` with the |111> amplitude made real positive.

    Raises :class:`DegenerateGroundStateError` when the two lowest levels are
    closer than ``1e-10`` times the spectral range, and
    :class:`RatioUndefinedError` when the |111> amplitude vanishes.
    """
    H = np.asarray(H, dtype=complex)
    evals, evecs = np.linalg.eigh(H)
    spread = evals[-1] - evals[0]
    gap = evals[1] - evals[0]
    if gap < DEGENERACY_RTOL * max(spread, np.finfo(float).tiny):
        raise DegenerateGroundStateError(
            f"ground level degenerate: gap {gap:.3e}, spectral range {spread:.3e}"
        )
    psi = evecs[:, 0]
    a111 = psi[I111]
    if abs(a111) < 1e-12:
        raise RatioUndefinedError("|111> amplitude vanishes; alpha and beta undefined")
    psi = psi * (abs(a111) / a111)
    alpha = -psi[I001] / psi[I111]
    beta = -psi[I010] / psi[I111]
    return GroundState(
        amplitudes=psi,
        energy=float(evals[0]),
        alpha=complex(alpha),
        beta=complex(beta),
        normN=float(1.0 / abs(psi[I111]) ** 2),
        t_root=complex(2.0 * evals[0]),
        provenance="numeric",
        gap=float(gap),
    )


def _exchange_isometries() -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases (as columns) of the A <-> B symmetric and antisymmetric subspaces."""
    sym, anti = [], []
    r = 1 / math.sqrt(2)
    for c in (0, 1):
        for a in (0, 1):
            v = np.zeros(8)
            v[4 * a + 2 * a + c] = 1.0
            sym.append(v)
        v_plus, v_minus = np.zeros(8), np.zeros(8)
        v_plus[2 + c], v_plus[4 + c] = r, r
        v_minus[2 + c], v_minus[4 + c] = r, -r
        sym.append(v_plus)
        anti.append(v_minus)
    return np.array(sym).T, np.array(anti).T


_SYM, _ANTI = _exchange_isometries()


def ground_state_symmetric(H: np.ndarray) -> GroundState:
    """Lowest eigenvector of ``H`` computed inside the A <-> B symmetric subspace.

    The amplitudes of |010> and |100> come out bitwise equal, which keeps
    finite differences of site-resolved quantities exactly exchange
    symmetric.  ``H`` must commute with the exchange; the antisymmetric
    block is checked to lie above the symmetric ground level.
    """
    H = np.asarray(H, dtype=complex)
    hs = _SYM.T @ H @ _SYM
    ha = _ANTI.T @ H @ _ANTI
    evals, evecs = np.linalg.eigh(0.5 * (hs + hs.conj().T))
    anti_min = np.linalg.eigvalsh(0.5 * (ha + ha.conj().T))[0]
    spread = max(evals[-1], anti_min) - evals[0]
    gap = min(evals[1], anti_min) - evals[0]
    if gap < DEGENERACY_RTOL * max(spread, np.finfo(float).tiny):
        raise DegenerateGroundStateError(
            f"ground level degenerate or antisymmetric: gap {gap:.3e}, spectral range {spread:.3e}"
        )
    psi = _SYM @ evecs[:, 0]
    a111 = psi[I111]
    if abs(a111) < 1e-12:
        raise RatioUndefinedError("|111> amplitude vanishes; alpha and beta undefined")
    psi = psi * (abs(a111) / a111)
    return GroundState(
        amplitudes=psi,
        energy=float(evals[0]),
        alpha=complex(-psi[I001] / psi[I111]),
        beta=complex(-psi[I010] / psi[I111]),
        normN=float(1.0 / abs(psi[I111]) ** 2),
        t_root=complex(2.0 * evals[0]),
        provenance="symmetric",
        gap=float(gap),
    )


def cubic_coefficients(p: SystemParams) -> tuple[float, float]:
    """The A and B coefficients entering the cube root."""
    w, wc, J, Jc = p.omega0, p.omegaC, p.J, p.JC
    A = 4 * J**2 + 12 * Jc**2 + 3 * w**2 + 2 * J * wc + wc**2
    B = (
        -8 * J**3 + 72 * J * Jc**2 - 9 * J * w**2 - 6 * J**2 * wc + 18 * Jc**2 * wc
        - 9 * w**2 * wc + 3 * J * wc**2 + wc**3
    )
    return A, B


def t_candidates(p: SystemParams) -> list[complex]:
    """The three values of ``t``, one per cube root of ``B + sqrt(B^2 - A^3)``.

    Each candidate equals twice an eigenvalue of the odd-parity sector
    restricted to states symmetric under A <-> B.
    """
    A, B = cubic_coefficients(p)
    root = B + cmath.sqrt(B * B - A**3)
    if root == 0:  # needs A = 0, excluded by omegaC > 0
        raise AnalyticSingularityError("vanishing cube-root argument")
    c0 = root ** (1.0 / 3.0)
    s3 = math.sqrt(3.0)
    out = []
    for k in range(3):
        c = c0 * cmath.exp(2j * math.pi * k / 3)
        out.append((2 * p.J - p.omegaC - A * (1 + 1j * s3) / c + (-1 + 1j * s3) * c) / 3)
    return out


def alpha_beta_from_t(p: SystemParams, t: complex) -> tuple[complex, complex, complex]:
    """Closed-form alpha and beta for a given ``t``; also returns the denominator."""
    w, wc, J, Jc = p.omega0, p.omegaC, p.J, p.JC
    den = 2 * J**2 - 4 * Jc**2 + J * wc - J * t
    scale = max(abs(J), abs(Jc), abs(wc)) ** 2
    if abs(den) < SINGULARITY_RTOL * scale:
        raise AnalyticSingularityError(f"closed-form denominator {abs(den):.3e} too small")
    alpha = (-8 * Jc**2 - 4 * J * w - 2 * J * wc - 2 * w * wc - wc**2 - 2 * t * J + 2 * w * t + t * t) / (2 * den)
    beta = (2 * J * Jc + 2 * Jc * w + Jc * wc + Jc * t) / den
    return alpha, beta, den


def ground_state_analytic(p: SystemParams, energy_hint: float | None = None) -> GroundState:
    """Closed-form ground state.

    The branch of ``t`` with the lowest energy ``Re(t)/2`` is used, or the
    one closest to ``energy_hint`` when given.  Raises
    :class:`AnalyticSingularityError` when that branch hits a vanishing
    denominator and :class:`BranchSelectionError` when it yields complex
    alpha or beta.
    """
    ts = t_candidates(p)
    if energy_hint is None:
        t = min(ts, key=lambda z: z.real)
    else:
        t = min(ts, key=lambda z: abs(z.real / 2 - energy_hint))
    alpha, beta, _ = alpha_beta_from_t(p, t)
    if abs(alpha.imag) > BRANCH_IMAG_TOL or abs(beta.imag) > BRANCH_IMAG_TOL:
        raise BranchSelectionError(
            f"complex branch: |Im alpha| = {abs(alpha.imag):.3e}, |Im beta| = {abs(beta.imag):.3e}"
        )
    alpha, beta = complex(alpha.real, 0.0), complex(beta.real, 0.0)
    amps, normN = _amplitudes(alpha, beta)
    return GroundState(
        amplitudes=amps,
        energy=float(t.real / 2),
        alpha=alpha,
        beta=beta,
        normN=normN,
        t_root=complex(t),
        provenance="analytic",
    )


def ground_state(p: SystemParams, method: str = "auto") -> GroundState:
    """Ground state by ``method`` in {"auto", "analytic", "numeric", "symmetric"}.

    ``symmetric`` is the eigensolver restricted to the A <-> B symmetric
    subspace (see :func:`ground_state_symmetric`).  ``auto`` uses the closed form and falls back to the eigensolver when the
    closed form is singular; the result's ``provenance`` records which one
    was used.
    """
    if method == "numeric":
        return ground_state_numeric(build_hamiltonian(p))
    if method == "symmetric":
        return ground_state_symmetric(build_hamiltonian(p))
    if method == "analytic":
        return ground_state_analytic(p)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    try:
        return ground_state_analytic(p)
    except (AnalyticSingularityError, BranchSelectionError):
        gs = ground_state_numeric(build_hamiltonian(p))
        return GroundState(
            amplitudes=gs.amplitudes,
            energy=gs.energy,
            alpha=gs.alpha,
            beta=gs.beta,
            normN=gs.normN,
            t_root=gs.t_root,
            provenance="numeric-fallback",
            gap=gs.gap,
        )


def fidelity(psi: np.ndarray, phi: np.ndarray) -> float:
    """|<psi|phi>|^2 for normalized state vectors."""
    return float(abs(np.vdot(psi, phi)) ** 2)


def _site_axes(keep: Iterable[str]) -> list[int]:
    keep = list(dict.fromkeys(keep))
    bad = [s for s in keep if s not in SITES]
    if bad:
        raise ValueError(f"invalid sites {bad}")
    if not keep or len(keep) == len(SITES):
        raise ValueError("keep must be a nonempty proper subset of sites")
    return sorted(SITES.index(s) for s in keep)


def partial_trace(rho: np.ndarray, keep: Iterable[str]) -> np.ndarray:
    """Reduced state of the three-qubit ``rho`` on the sites in ``keep``.

    Kept sites stay in A, B, C order regardless of the order given.
    """
    axes = _site_axes(keep)
    t = np.asarray(rho, dtype=complex).reshape((2,) * 6)
    traced = [i for i in range(3) if i not in axes]
    # trace the highest axis first so the lower indices stay valid
    for i in sorted(traced, reverse=True):
        n = t.ndim // 2
        t = np.trace(t, axis1=i, axis2=i + n)
    d = 2 ** len(axes)
    return t.reshape(d, d)


def linear_entropy(rho: np.ndarray) -> float:
    """``1 - Tr(rho^2)``."""
    rho = np.asarray(rho, dtype=complex)
    return float(1.0 - np.real(np.einsum("ij,ji->", rho, rho)))


def reduced_state_templates(alpha: complex, beta: complex) -> dict[str, np.ndarray]:
    """Closed-form reduced states of the ground state, keyed "AB", "AC", "A", "C".

    "BC" equals "AC" and "B" equals "A" by the A <-> B symmetry.
    """
    a, b = complex(alpha), complex(beta)
    a2, b2 = abs(a) ** 2, abs(b) ** 2
    N = 1 + a2 + 2 * b2
    ab = np.array(
        [[a2, 0, 0, -a], [0, b2, b2, 0], [0, b2, b2, 0], [-a.conjugate(), 0, 0, 1]],
        dtype=complex,
    )
    ac = np.array(
        [
            [b2, 0, 0, -b],
            [0, a2, a * b.conjugate(), 0],
            [0, a.conjugate() * b, b2, 0],
            [-b.conjugate(), 0, 0, 1],
        ],
        dtype=complex,
    )
    return {
        "AB": ab / N,
        "AC": ac / N,
        "A": np.diag([a2 + b2, 1 + b2]).astype(complex) / N,
        "C": np.diag([2 * b2, 1 + a2]).astype(complex) / N,
    }


def is_density_matrix(rho: np.ndarray, atol: float = 1e-12) -> bool:
    rho = np.asarray(rho, dtype=complex)
    if not np.allclose(rho, rho.conj().T, rtol=0, atol=max(atol, 1e-14)):
        return False
    if abs(np.trace(rho) - 1) > atol:
        return False
    return bool(np.linalg.eigvalsh(rho).min() >= -atol)
