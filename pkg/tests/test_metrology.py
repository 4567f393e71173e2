import numpy as np
import pytest

from crossover_lab.metrology import (
    DegenerateMarginalError,
    classical_fi_localvector,
    classical_fi_population,
    default_step,
    derivative,
    fisher_report,
    population_probabilities,
    qfi_mixed,
    qfi_pure,
)
from crossover_lab.model import SystemParams, build_hamiltonian, embed, pauli
from crossover_lab.spectral import ground_state, partial_trace

SENSITIVITY_POINT = 1.86994601  # F_A zero / |y_A| extremum at J = 1 (located by bisection)


def perturbative(p):
    """Ground state and its JC derivative from first-order perturbation theory."""
    H = build_hamiltonian(p)
    dH = embed(pauli("x"), "A") @ embed(pauli("x"), "C") + embed(pauli("x"), "B") @ embed(pauli("x"), "C")
    e, v = np.linalg.eigh(H)
    g = v[:, 0]
    dpsi = sum(v[:, n] * (v[:, n].conj() @ dH @ g) / (e[0] - e[n]) for n in range(1, 8))
    return g, dpsi


def oracle_site_fi(p, site):
    g, d = perturbative(p)
    rho = np.outer(g, g.conj())
    drho = np.outer(d, g.conj()) + np.outer(g, d.conj())
    P = np.diag(partial_trace(rho, site)).real
    dP = np.diag(partial_trace(drho, site)).real
    return float(np.sum(dP**2 / P))


def oracle_qfi(p):
    g, d = perturbative(p)
    return float(4 * (np.vdot(d, d).real - abs(np.vdot(g, d)) ** 2))


def test_population_probabilities_closed_forms(ref):
    g = ground_state(ref)
    a2, b2, N = abs(g.alpha) ** 2, abs(g.beta) ** 2, g.normN
    rho = g.density_matrix
    assert population_probabilities(partial_trace(rho, "A")) == pytest.approx(((a2 + b2) / N, (1 + b2) / N), abs=1e-12)
    assert population_probabilities(partial_trace(rho, "C")) == pytest.approx((2 * b2 / N, (1 + a2) / N), abs=1e-12)
    assert population_probabilities(np.eye(2) / 2) == (0.5, 0.5)
    with pytest.raises(ValueError):
        population_probabilities(np.eye(4) / 4)


@pytest.mark.parametrize("p", [(0.1, 5.0, 0.1, 0.5), (0.1, 5.0, 1.0, 1.2), (0.1, 5.0, 0.1, 1.7)])
def test_fisher_against_perturbation_theory(p):
    p = SystemParams(*p)
    r = fisher_report(p)
    assert r.F_pop_A == pytest.approx(oracle_site_fi(p, "A"), rel=1e-6)
    assert r.F_pop_C == pytest.approx(oracle_site_fi(p, "C"), rel=1e-6)
    assert r.QFI_global == pytest.approx(oracle_qfi(p), rel=1e-6)


def test_exchange_symmetry_is_exact():
    for jc in np.linspace(0.05, 2.5, 25):
        r = fisher_report(SystemParams(0.1, 5.0, 1.0, jc))
        assert abs(r.F_pop_A - r.F_pop_B) <= 1e-12


def test_fi_vanishes_at_sensitivity_point():
    p = SystemParams(0.1, 5.0, 1.0, SENSITIVITY_POINT)
    assert classical_fi_population(p, "A") < 1e-6
    assert classical_fi_localvector(p, "A") < 1e-8
    # off the point the population FI is sizeable
    assert classical_fi_population(p.with_jc(1.5), "A") > 1e-3


def test_localvector_equals_population(ref):
    for site in ("A", "C"):
        a = classical_fi_population(ref, site)
        b = classical_fi_localvector(ref, site)
        assert b == pytest.approx(a, rel=1e-4)


def test_pure_marginal_rejected():
    with pytest.raises(DegenerateMarginalError):
        classical_fi_localvector(SystemParams(0.1, 5.0, 0.1, 0.0), "C")
    assert np.isnan(fisher_report(SystemParams(0.1, 5.0, 0.1, 0.0)).F_vec_C)


def test_decoupled_probe_fi_vanishes():
    r = fisher_report(SystemParams(0.1, 5.0, 0.0, 0.0))
    assert abs(r.F_pop_C) < 1e-9
    assert r.floored


def test_qfi_bounds_site_fi(ref):
    r = fisher_report(ref)
    assert r.QFI_global >= max(r.F_pop_A, r.F_pop_C) - 1e-6 * (1 + r.QFI_global)
    assert min(r.F_pop_A, r.F_pop_B, r.F_pop_C, r.QFI_global) >= -1e-9


def test_qfi_step_halving(ref):
    h = default_step(ref.JC)
    q1, q2 = qfi_pure(ref, h), qfi_pure(ref, h / 2)
    assert abs(q1 - q2) <= 1e-6 * q1


def test_qfi_mixed_reduces_to_pure(ref):
    fam = lambda jc: ground_state(ref.with_jc(jc), "symmetric").density_matrix
    assert qfi_mixed(fam, ref.JC) == pytest.approx(qfi_pure(ref), rel=1e-6)


def test_qfi_mixed_diagonal_family_is_population_fi(ref):
    fam = lambda jc: partial_trace(ground_state(ref.with_jc(jc), "symmetric").density_matrix, "A")
    assert qfi_mixed(fam, ref.JC) == pytest.approx(classical_fi_population(ref, "A"), rel=1e-8)


def test_qfi_mixed_rotating_qubit():
    # rho(theta) = (I + r (cos theta, sin theta, 0) . sigma) / 2 has QFI = r^2
    r = 0.6

    def fam(t):
        return 0.5 * (np.eye(2) + r * (np.cos(t) * pauli("x") + np.sin(t) * pauli("y")))

    assert qfi_mixed(fam, 0.3, 1e-4) == pytest.approx(r * r, rel=1e-8)


def test_constant_families_have_zero_qfi():
    assert qfi_mixed(lambda t: np.eye(4) / 4, 0.2) == 0.0


def test_derivative_helper():
    assert derivative(np.sin, 0.4, 1e-3) == pytest.approx(np.cos(0.4), rel=1e-11)


def test_bad_step(ref):
    with pytest.raises(ValueError):
        qfi_pure(ref, 0.0)
