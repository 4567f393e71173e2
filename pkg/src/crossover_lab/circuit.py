"""Map transmon and SQUID-coupler parameters onto the effective three-qubit model.

Energies are given in GHz (i.e. E/h).  The effective Hamiltonian
``hbar omega_j / 2 sigma_z^j + hbar g_jk sigma_x^j sigma_x^k`` is converted to
the package's dimensionless units by multiplying every energy by
``ENERGY_TO_ANGULAR`` (2 pi, so a 1 GHz energy becomes an angular frequency
of 2 pi rad/ns).  Only ratios matter for the ground-state physics.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from scipy import constants

from .model import SystemParams

log = logging.getLogger(__name__)

ENERGY_TO_ANGULAR = 2 * math.pi

# (Phi0 / 2 pi)^2 / (1 nH), expressed in GHz: E_L = INDUCTIVE_ENERGY_GHZ_NH / L[nH]
INDUCTIVE_ENERGY_GHZ_NH = (constants.physical_constants["mag. flux quantum"][0] / (2 * math.pi)) ** 2 / 1e-9 / constants.h / 1e9

TRANSMON_MIN_RATIO = 20.0
TRANSMON_WARN_RATIO = 50.0
IDENTICAL_TOL = 1e-9
PAIRS = ("AB", "AC", "BC")


class CircuitConstraintError(ValueError):
    """The circuit cannot be mapped onto the symmetric three-qubit model."""


class AsymmetricProbeError(CircuitConstraintError):
    pass


class IdenticalQubitError(CircuitConstraintError):
    pass


@dataclass(frozen=True)
class Transmon:
    EC: float
    EJ: float

    def __post_init__(self):
        if not (self.EC > 0 and self.EJ > 0):
            raise ValueError("EC and EJ must be positive")


@dataclass(frozen=True)
class TransmonParams:
    """Charging and Josephson energies (GHz) of qubits A, B and C.

    Each qubit must sit in the transmon regime EJ/EC >= 20; a warning is
    logged below 50.
    """

    A: Transmon
    B: Transmon
    C: Transmon

    def __post_init__(self):
        for name in "ABC":
            q = getattr(self, name)
            ratio = q.EJ / q.EC
            if ratio < TRANSMON_MIN_RATIO:
                raise CircuitConstraintError(
                    f"qubit {name}: EJ/EC = {ratio:.3g} is outside the transmon regime (needs >= {TRANSMON_MIN_RATIO:g})"
                )
            if ratio < TRANSMON_WARN_RATIO:
                log.warning("qubit %s: EJ/EC = %.3g is below %g; two-level truncation is marginal", name, ratio, TRANSMON_WARN_RATIO)

    def qubit(self, name: str) -> Transmon:
        if name not in ("A", "B", "C"):
            raise ValueError(f"invalid qubit {name!r}")
        return getattr(self, name)


@dataclass(frozen=True)
class CouplerParams:
    """SQUID couplers; ``L0`` in nH and fluxes in units of the flux quantum."""

    L0: float
    flux_AB: float
    flux_AC: float
    flux_BC: float

    def __post_init__(self):
        if not self.L0 > 0:
            raise ValueError("L0 must be positive")

    def flux(self, pair: str) -> float:
        return getattr(self, f"flux_{pair}")


def zpf(t: TransmonParams | Transmon, qubit: str | None = None) -> tuple[float, float]:
    """Phase and charge zero-point amplitudes ``(2 EC / EJ)^(1/4)``, ``(EJ / 32 EC)^(1/4)``."""
    q = t.qubit(qubit) if isinstance(t, TransmonParams) else t
    return (2 * q.EC / q.EJ) ** 0.25, (q.EJ / (32 * q.EC)) ** 0.25


def inductive_energy(L0: float, flux: float) -> float:
    """E_L(flux) = (Phi0 / 2 pi)^2 |cos(pi flux)| / L0, in GHz.

    At half a flux quantum the SQUID inductance diverges and the coupler is
    off; this returns exactly 0 there.
    """
    if math.isclose(abs(flux) % 1.0, 0.5, rel_tol=0, abs_tol=1e-15):
        return 0.0
    return INDUCTIVE_ENERGY_GHZ_NH / L0 * abs(math.cos(math.pi * flux))


def coupling(t: TransmonParams, c: CouplerParams, pair: str) -> float:
    """hbar g_jk = E_L^(jk) phi_zpf,j phi_zpf,k, in GHz."""
    j, k = pair
    return inductive_energy(c.L0, c.flux(pair)) * zpf(t, j)[0] * zpf(t, k)[0]


def qubit_frequency(t: TransmonParams, c: CouplerParams, qubit: str, include_inductive_shift: bool = False) -> float:
    """hbar omega_j = sqrt(8 EC EJ), optionally plus half the attached inductive energies (GHz)."""
    q = t.qubit(qubit)
    w = math.sqrt(8 * q.EC * q.EJ)
    if include_inductive_shift:
        w += sum(inductive_energy(c.L0, c.flux(pr)) / 2 for pr in PAIRS if qubit in pr)
    return w


@dataclass(frozen=True)
class CircuitMapping:
    params: SystemParams
    g_AB: float
    g_AC: float
    g_BC: float
    omega: dict


def effective_params(
    t: TransmonParams,
    c: CouplerParams,
    include_inductive_shift: bool = False,
    energy_to_angular: float = ENERGY_TO_ANGULAR,
) -> CircuitMapping:
    """Effective ``SystemParams`` plus the three couplings, in angular units.

    Raises :class:`IdenticalQubitError` if qubits A and B map to different
    frequencies and :class:`AsymmetricProbeError` if g_AC != g_BC.
    """
    omega = {q: energy_to_angular * qubit_frequency(t, c, q, include_inductive_shift) for q in "ABC"}
    g = {pr: energy_to_angular * coupling(t, c, pr) for pr in PAIRS}
    if abs(omega["A"] - omega["B"]) > IDENTICAL_TOL * max(1.0, abs(omega["A"])):
        raise IdenticalQubitError(f"omega_A = {omega['A']:.12g} differs from omega_B = {omega['B']:.12g}")
    if abs(g["AC"] - g["BC"]) > IDENTICAL_TOL * max(1.0, abs(g["AC"])):
        raise AsymmetricProbeError(f"g_AC = {g['AC']:.12g} differs from g_BC = {g['BC']:.12g}")
    params = SystemParams(omega0=omega["A"], omegaC=omega["C"], J=g["AB"], JC=g["AC"])
    return CircuitMapping(params, g["AB"], g["AC"], g["BC"], omega)
