import logging
import math

import numpy as np
import pytest

from crossover_lab import circuit
from crossover_lab.circuit import (
    AsymmetricProbeError,
    CircuitConstraintError,
    CouplerParams,
    IdenticalQubitError,
    Transmon,
    TransmonParams,
    coupling,
    effective_params,
    inductive_energy,
    qubit_frequency,
    zpf,
)
from crossover_lab.model import build_hamiltonian, embed, pauli

Q_AB = Transmon(0.25, 50.0)
Q_C = Transmon(0.3, 45.0)
T = TransmonParams(Q_AB, Q_AB, Q_C)


def test_zpf_values():
    assert zpf(Transmon(1.0, 2.0))[0] == pytest.approx(1.0, abs=1e-15)
    assert zpf(Transmon(0.25, 50.0))[0] == pytest.approx(0.01**0.25, abs=1e-15)
    assert zpf(T, "C") == zpf(Q_C)
    for ec, ej in ((0.2, 10.0), (1.0, 2.0), (0.3, 77.0)):
        phi, n = zpf(Transmon(ec, ej))
        assert phi * n == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(ValueError):
        Transmon(0.0, 1.0)


def test_inductive_energy_constant():
    # (Phi0 / 2 pi)^2 / (1 nH) / h in GHz with Phi0 = h / 2e
    h, e = 6.62607015e-34, 1.602176634e-19
    ref = (h / (2 * e) / (2 * math.pi)) ** 2 / 1e-9 / h / 1e9
    assert circuit.INDUCTIVE_ENERGY_GHZ_NH == pytest.approx(ref, rel=1e-12)
    assert inductive_energy(2.0, 0.0) == pytest.approx(ref / 2, rel=1e-12)


def test_half_flux_switches_coupling_off():
    c = CouplerParams(10.0, 0.5, 0.5, -0.5)
    for pair in circuit.PAIRS:
        assert coupling(T, c, pair) == 0.0
    assert inductive_energy(10.0, 1.5) == 0.0


def test_coupling_flux_dependence():
    g0 = coupling(T, CouplerParams(10.0, 0.0, 0.0, 0.0), "AC")
    assert g0 == pytest.approx(inductive_energy(10.0, 0.0) * zpf(Q_AB)[0] * zpf(Q_C)[0], rel=1e-15)
    g = coupling(T, CouplerParams(10.0, 0.0, 0.25, 0.25), "AC")
    assert g / g0 == pytest.approx(math.cos(math.pi / 4), abs=1e-12)
    for phi in np.linspace(-0.9, 0.9, 19):
        g = coupling(T, CouplerParams(10.0, 0.0, phi, phi), "AC")
        assert g / g0 == pytest.approx(abs(math.cos(math.pi * phi)), abs=1e-12)
        assert g <= g0 * (1 + 1e-15)


def test_qubit_frequency():
    c = CouplerParams(10.0, 0.0, 0.0, 0.0)
    assert qubit_frequency(T, c, "A") == pytest.approx(math.sqrt(8 * 0.25 * 50.0))
    shifted = qubit_frequency(T, c, "A", include_inductive_shift=True)
    assert shifted - qubit_frequency(T, c, "A") == pytest.approx(inductive_energy(10.0, 0.0))


def test_effective_params_matrix_identity():
    m = effective_params(T, CouplerParams(10.0, 0.1, 0.3, 0.3))
    sz, sx = pauli("z"), pauli("x")
    H = sum(m.omega[q] / 2 * embed(sz, q) for q in "ABC")
    H = H + m.g_AB * embed(sx, "A") @ embed(sx, "B") + m.g_AC * embed(sx, "A") @ embed(sx, "C")
    H = H + m.g_BC * embed(sx, "B") @ embed(sx, "C")
    assert np.abs(build_hamiltonian(m.params) - H).max() <= 1e-12
    assert m.params.omega0 == pytest.approx(2 * math.pi * math.sqrt(8 * 0.25 * 50.0))


def test_coupling_ratio_example():
    m = effective_params(T, CouplerParams(10.0, 0.0, 0.3, 0.3))
    expected = zpf(Q_AB)[0] / (zpf(Q_C)[0] * math.cos(0.3 * math.pi))
    assert m.params.J / m.params.JC == pytest.approx(expected, rel=1e-12)
    assert effective_params(T, CouplerParams(10.0, 0.0, 0.5, 0.5)).params.JC == 0.0


def test_constraint_errors(caplog):
    with pytest.raises(AsymmetricProbeError):
        effective_params(T, CouplerParams(10.0, 0.0, 0.2, 0.3))
    with pytest.raises(IdenticalQubitError):
        effective_params(TransmonParams(Q_AB, Transmon(0.25, 60.0), Q_C), CouplerParams(10.0, 0, 0, 0))
    with pytest.raises(CircuitConstraintError):
        TransmonParams(Transmon(1.0, 10.0), Q_AB, Q_C)
    with caplog.at_level(logging.WARNING):
        TransmonParams(Transmon(1.0, 30.0), Transmon(1.0, 30.0), Q_C)
    assert "marginal" in caplog.text
    with pytest.raises(ValueError):
        CouplerParams(0.0, 0, 0, 0)
