"""Acceptance criteria 1-10, one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed even
without ``-s``) or directly with ``python3 tests/test_acceptance.py``.
"""
import math
import time

import numpy as np
import pytest

from crossover_lab import circuit, geometry
from crossover_lab.crossover import (
    basis_probabilities,
    entropy_crossings,
    fi_zeros,
    find_extrema,
    local_vector_crossings,
    local_vector_norm,
    obesity_zeros,
    superposition_probabilities,
    sweep,
)
from crossover_lab.lindblad import build_jump_operators, build_liouvillian, steady_state, trace_distance
from crossover_lab.metrology import fisher_report
from crossover_lab.model import SystemParams, build_hamiltonian, embed, pauli
from crossover_lab.spectral import fidelity, ground_state, ground_state_numeric, partial_trace
from crossover_lab.verify import run_checks

W0, WC = 0.1, 5.0
JS = (0.1, 1.0)
GRID = np.linspace(0.01, 3.0, 200)
TOL = 1e-8

_capture = None


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    global _capture
    _capture = capsys
    yield
    _capture = None


def report(n, passed, text):
    line = f"CRITERION {n}: {'PASS' if passed else 'FAIL'} - {text}"
    if _capture is not None:
        with _capture.disabled():
            print("\n" + line)
    else:
        print(line)
    assert passed, line


def P(J, jc=0.0):
    return SystemParams(W0, WC, J, jc)


def test_criterion_1_ground_state_agreement():
    t0 = time.perf_counter()
    worst, flagged = 0.0, 0
    for J in JS:
        for jc in GRID:
            p = P(J, jc)
            g = ground_state(p)
            if g.provenance != "analytic":
                flagged += 1
                continue
            worst = max(worst, 1 - fidelity(g.amplitudes, ground_state_numeric(build_hamiltonian(p)).amplitudes))
    dt = time.perf_counter() - t0
    report(1, worst <= 1e-10 and dt < 1.0, f"max infidelity {worst:.2e} (tol 1e-10), {flagged} flagged fallbacks, {dt:.2f} s (< 1 s)")


def test_criterion_2_closed_form_equivalence():
    w_omega = w_printed = w_axes = 0.0
    for J in JS:
        for jc in GRID:
            g = ground_state(P(J, jc))
            cf = geometry.closed_forms(g.alpha, g.beta, g.normN)
            for keep, om, vol in (("AB", cf.omega_AB, cf.V_AB), ("AC", cf.omega_AC, cf.V_AC)):
                f = geometry.fano(partial_trace(g.density_matrix, keep))
                w_omega = max(w_omega, abs(om - abs(np.linalg.det(f.R)) ** 0.25))
                if np.linalg.norm(f.y) >= 1 - 1e-6:
                    continue
                e = geometry.ellipsoid(f)
                v_gamma = 4 * math.pi / 3 * e.gamma**2 * e.obesity**4
                w_printed = max(w_printed, abs(vol - v_gamma) / v_gamma, abs(vol - e.axes_volume) / e.axes_volume)
                w_axes = max(w_axes, abs(e.axes_volume - v_gamma) / v_gamma)
    ok = w_omega <= 1e-9 and w_printed <= 1e-6 and w_axes <= 1e-6
    report(
        2, ok,
        f"obesity abs err {w_omega:.2e} (tol 1e-9); printed volume rel err {w_printed:.2e} (tol 1e-6); "
        f"gamma-form vs s1s2s3 rel err {w_axes:.2e}",
    )


def test_criterion_3_lindblad_steady_state():
    t0 = time.perf_counter()
    w_ss = w_mu = 0.0
    for jc in (0.2, 0.5, 1.0):
        H = build_hamiltonian(P(0.1, jc))
        psi = ground_state_numeric(H).amplitudes
        r1 = steady_state(build_liouvillian(H, build_jump_operators(H, 1.0)))
        r2 = steady_state(build_liouvillian(H, build_jump_operators(H, 0.37)))
        w_ss = max(w_ss, trace_distance(r1, np.outer(psi, psi.conj())))
        w_mu = max(w_mu, trace_distance(r1, r2))
    dt = time.perf_counter() - t0
    report(3, w_ss <= 1e-8 and w_mu <= 1e-9 and dt < 2.0, f"trace distance {w_ss:.2e} (tol 1e-8), mu change {w_mu:.2e} (tol 1e-9), {dt:.2f} s")


def test_criterion_4_crossing_coincidence():
    ent = entropy_crossings(P(0.1), (0.01, 2.0), TOL)
    vec = local_vector_crossings(P(0.1), (0.01, 2.0), TOL)
    gap = max((abs(a.JC_star - b.JC_star) for a, b in zip(ent, vec)), default=math.inf)
    ok = len(ent) >= 1 and len(ent) == len(vec) and gap <= 1e-7
    report(4, ok, f"{len(ent)} crossing(s) at {[round(c.JC_star, 9) for c in ent]}, max gap {gap:.2e} (tol 1e-7)")


def test_criterion_5_fisher_identity_and_ordering():
    w_rel = w_ex = w_order = 0.0
    for J in JS:
        for jc in GRID:
            p = P(J, jc)
            r = fisher_report(p)
            rho = ground_state(p).density_matrix
            for site, fp, fv in (("A", r.F_pop_A, r.F_vec_A), ("C", r.F_pop_C, r.F_vec_C)):
                y = abs(np.trace(partial_trace(rho, site) @ pauli("z")).real)
                if 1e-3 <= y <= 1 - 1e-3:
                    w_rel = max(w_rel, abs(fp - fv) / max(fp, fv))
            w_ex = max(w_ex, abs(r.F_pop_A - r.F_pop_B))
            top = max(r.F_pop_A, r.F_pop_B, r.F_pop_C)
            w_order = max(w_order, (top - r.QFI_global) / top)
    ok = w_rel <= 1e-4 and w_ex <= 1e-12 and w_order <= 1e-6
    report(5, ok, f"population vs local-vector FI rel {w_rel:.2e} (tol 1e-4), |F_A-F_B| {w_ex:.2e} (tol 1e-12), FI excess over QFI {max(w_order, 0):.2e} (tol 1e-6)")


def test_criterion_6_sensitivity_point():
    z = fi_zeros(P(1.0), (0.01, 2.0), TOL)
    e = find_extrema(local_vector_norm(P(1.0), "A"), (0.01, 2.0), TOL)
    gap = abs(z[0].JC_star - e[0].JC_star) if z and e else math.inf
    report(6, len(z) == 1 and gap <= 1e-6, f"F_A zero {[round(c.JC_star, 9) for c in z]}, |y_A| extremum {[round(c.JC_star, 9) for c in e]}, gap {gap:.2e} (tol 1e-6)")


def _dense_oracle(J):
    xs = np.linspace(0.01, 2.0, 10_000)
    base, probe = build_hamiltonian(P(J, 0.0)), build_hamiltonian(P(J, 1.0)) - build_hamiltonian(P(J, 0.0))
    psi = np.linalg.eigh(base[None] + xs[:, None, None] * probe[None])[1][:, :, 0]
    # obesity argument |beta|^4 - |alpha|^2 with alpha, beta read from the amplitudes
    a2 = np.abs(psi[:, 1] / psi[:, 7]) ** 2
    b2 = np.abs(psi[:, 2] / psi[:, 7]) ** 2
    v = b2**2 - a2
    return int(np.sum(v[:-1] * v[1:] < 0))


def test_criterion_7_obesity_zero_duplication():
    counts = {J: (len(obesity_zeros(P(J), (0.01, 2.0), TOL)), _dense_oracle(J)) for J in JS}
    ok = all(a == b for a, b in counts.values())
    report(7, ok, "; ".join(f"J={J:g}: {a} found vs {b} oracle" for J, (a, b) in counts.items()))


def test_criterion_8_probability_bookkeeping():
    w_sum = w_ex = w_rng = 0.0
    for J in JS:
        for jc in GRID:
            g = ground_state(P(J, jc))
            p = basis_probabilities(g)
            w_sum = max(w_sum, abs(sum(p) - 1))
            w_ex = max(w_ex, abs(p[1] - p[2]))
            for d, _ in superposition_probabilities(g).values():
                w_rng = max(w_rng, -d, d - 1)
    ok = w_sum <= 1e-12 and w_ex <= 1e-12 and w_rng <= 0
    report(8, ok, f"sum err {w_sum:.2e}, |P010-P100| {w_ex:.2e} (tol 1e-12), direct outside [0,1] by {max(w_rng, 0):.2e}")


def test_criterion_9_circuit_mapping():
    q = circuit.Transmon(0.25, 50.0)
    t = circuit.TransmonParams(q, q, circuit.Transmon(0.3, 45.0))
    g_half = circuit.coupling(t, circuit.CouplerParams(10.0, 0.5, 0.5, 0.5), "AB")
    g0 = circuit.coupling(t, circuit.CouplerParams(10.0, 0.0, 0.0, 0.0), "AC")
    w_ratio = max(
        abs(circuit.coupling(t, circuit.CouplerParams(10.0, 0.0, f, f), "AC") / g0 - abs(math.cos(math.pi * f)))
        for f in np.linspace(-1, 1, 101)
    )
    m = circuit.effective_params(t, circuit.CouplerParams(10.0, 0.2, 0.3, 0.3))
    sx = lambda s: embed(pauli("x"), s)
    H = sum(m.omega[s] / 2 * embed(pauli("z"), s) for s in "ABC")
    H = H + m.g_AB * sx("A") @ sx("B") + m.g_AC * sx("A") @ sx("C") + m.g_BC * sx("B") @ sx("C")
    w_h = float(np.abs(build_hamiltonian(m.params) - H).max())
    ok = g_half == 0.0 and w_ratio <= 1e-12 and w_h <= 1e-12
    report(9, ok, f"g(1/2) = {g_half}, ratio err {w_ratio:.2e}, Hamiltonian err {w_h:.2e} (tol 1e-12)")


def test_criterion_10_performance():
    t0 = time.perf_counter()
    run_checks()
    t_verify = time.perf_counter() - t0
    t0 = time.perf_counter()
    sweep(P(0.1), np.linspace(0.01, 2.0, 200), workers=1)
    t_sweep = time.perf_counter() - t0
    report(10, t_verify < 10 and t_sweep < 2, f"verify {t_verify:.2f} s (< 10 s), 200-point sweep {t_sweep:.2f} s (< 2 s), single core")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
