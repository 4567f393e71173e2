"""Self-consistency suite: every quantity is checked against an independent route.

A check passes when its residual is at most its tolerance.  Setting a
tolerance to 0 therefore fails any check whose residual is not exactly 0.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import circuit, geometry
from .crossover import (
    KINDS,
    basis_probabilities,
    bipartition_entropy,
    entropy_crossings,
    fi_zeros,
    find_extrema,
    local_vector_crossings,
    local_vector_norm,
    obesity_zeros,
    superposition_probabilities,
)
from .lindblad import build_jump_operators, build_liouvillian, steady_state, trace_distance
from .metrology import fisher_report
from .model import SystemParams, build_hamiltonian, embed, pauli
from .spectral import fidelity, ground_state, ground_state_numeric, partial_trace

GROUPS = (
    "ground_state",
    "closed_forms",
    "lindblad",
    "crossings",
    "fisher",
    "sensitivity",
    "obesity_zeros",
    "probabilities",
    "circuit",
)

DEFAULT_TOLERANCES = {
    "ground_state.fidelity": 1e-10,
    "closed_forms.omega": 1e-9,
    "closed_forms.volume_printed": 1e-6,
    "closed_forms.volume_axes": 1e-6,
    "closed_forms.volume_reduced": 1e-6,
    "lindblad.steady_state": 1e-8,
    "lindblad.mu_independence": 1e-9,
    "crossings.coincidence": 1e-7,
    "crossings.exists": 0.0,
    "crossings.entropy_identity": 1e-10,
    "fisher.population_vs_vector": 1e-4,
    "fisher.exchange": 1e-12,
    "fisher.qfi_bound": 1e-6,
    "sensitivity.fi_zero_vs_extremum": 1e-6,
    "obesity_zeros.count": 0.0,
    "obesity_zeros.omega_at_root": 2e-4,
    "probabilities.normalization": 1e-12,
    "probabilities.exchange": 1e-12,
    "probabilities.born_range": 0.0,
    "circuit.half_flux": 0.0,
    "circuit.cos_ratio": 1e-12,
    "circuit.hamiltonian": 1e-12,
}

ORACLE_SCAN_POINTS = 10_000
Y_EDGE = 1e-6


@dataclass(frozen=True)
class CheckResult:
    name: str
    group: str
    passed: bool | None  # None when skipped
    residual: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "SKIP" if self.passed is None else ("PASS" if self.passed else "FAIL")
        if self.passed is None:
            return f"[{status}] {self.name}"
        return f"[{status}] {self.name}: residual {self.residual:.3e} (tol {self.tolerance:.1e}) {self.detail}".rstrip()


@dataclass(frozen=True)
class VerifyConfig:
    omega0: float = 0.1
    omegaC: float = 5.0
    J_values: tuple[float, ...] = (0.1, 1.0)
    jc_min: float = 0.01
    jc_max: float = 3.0
    points: int = 200
    crossing_bracket: tuple[float, float] = (0.01, 2.0)
    lindblad_jc: tuple[float, ...] = (0.2, 0.5, 1.0)
    sensitivity_J: float = 1.0
    tol: float = 1e-8
    scan_points: int = 512

    def grid(self) -> np.ndarray:
        return np.linspace(self.jc_min, self.jc_max, self.points)

    def params(self, J: float, jc: float = 0.0) -> SystemParams:
        return SystemParams(self.omega0, self.omegaC, J, jc)


class _Collector:
    def __init__(self, group: str, tolerances: dict[str, float]):
        self.group, self.tolerances, self.results = group, tolerances, []

    def add(self, key: str, residual: float, detail: str = "") -> None:
        name = f"{self.group}.{key}"
        tol = self.tolerances[name]
        passed = bool(residual <= tol) if math.isfinite(residual) else False
        self.results.append(CheckResult(name, self.group, passed, float(residual), tol, detail))


def _check_ground_state(cfg: VerifyConfig, c: _Collector) -> None:
    worst, fallbacks = 0.0, 0
    for J in cfg.J_values:
        for jc in cfg.grid():
            p = cfg.params(J, jc)
            g = ground_state(p)
            fallbacks += g.provenance != "analytic"
            ref = ground_state_numeric(build_hamiltonian(p))
            worst = max(worst, 1 - fidelity(g.amplitudes, ref.amplitudes))
    c.add("fidelity", worst, f"({fallbacks} numeric fallbacks)")


def _check_closed_forms(cfg: VerifyConfig, c: _Collector) -> None:
    w_omega = w_printed = w_axes = w_reduced = 0.0
    for J in cfg.J_values:
        for jc in cfg.grid():
            g = ground_state(cfg.params(J, jc))
            rho = g.density_matrix
            cf = geometry.closed_forms(g.alpha, g.beta, g.normN)
            pairs = (
                ("AB", cf.omega_AB, cf.V_AB, cf.V_AB_reduced),
                ("AC", cf.omega_AC, cf.V_AC, cf.V_AC_reduced),
            )
            for keep, omega_cf, v_printed, v_reduced in pairs:
                f = geometry.fano(partial_trace(rho, keep))
                ell = geometry.ellipsoid(f, "first")
                w_omega = max(w_omega, abs(omega_cf - ell.obesity))
                if np.linalg.norm(f.y) >= 1 - Y_EDGE or ell.degenerate:
                    continue
                scale = max(ell.volume, 1e-300)
                w_printed = max(w_printed, abs(v_printed - ell.volume) / scale)
                w_axes = max(w_axes, abs(ell.axes_volume - ell.volume) / scale)
                w_reduced = max(w_reduced, abs(v_reduced - ell.volume) / scale)
    c.add("omega", w_omega, "closed-form obesity vs |det R|^(1/4)")
    c.add("volume_printed", w_printed, "printed volume expressions vs (4pi/3) gamma^2 Omega^4")
    c.add("volume_axes", w_axes, "(4pi/3) s1 s2 s3 vs (4pi/3) gamma^2 Omega^4")
    c.add("volume_reduced", w_reduced, "reduced alpha/beta volumes vs pipeline")


def _check_lindblad(cfg: VerifyConfig, c: _Collector) -> None:
    J = cfg.J_values[0]
    w_ss = w_mu = 0.0
    for jc in cfg.lindblad_jc:
        H = build_hamiltonian(cfg.params(J, jc))
        psi = ground_state_numeric(H).amplitudes
        target = np.outer(psi, psi.conj())
        rho1 = steady_state(build_liouvillian(H, build_jump_operators(H, 1.0)))
        rho2 = steady_state(build_liouvillian(H, build_jump_operators(H, 0.37)))
        w_ss = max(w_ss, trace_distance(rho1, target))
        w_mu = max(w_mu, trace_distance(rho1, rho2))
    c.add("steady_state", w_ss, "trace distance to the ground state")
    c.add("mu_independence", w_mu, "mu = 1 vs mu = 0.37")


def _check_crossings(cfg: VerifyConfig, c: _Collector) -> None:
    J = cfg.J_values[0]
    p = cfg.params(J)
    ent = entropy_crossings(p, cfg.crossing_bracket, cfg.tol, cfg.scan_points)
    vec = local_vector_crossings(p, cfg.crossing_bracket, cfg.tol, cfg.scan_points)
    if len(ent) != len(vec) or not ent:
        gap = math.inf
    else:
        gap = max(abs(a.JC_star - b.JC_star) for a, b in zip(ent, vec))
    stars = ", ".join(f"{x.JC_star:.9f}" for x in ent)
    c.add("coincidence", gap, f"entropy crossings [{stars}]")
    c.add("exists", 0.0 if ent else 1.0, f"{len(ent)} crossing(s) at J = {J:g}")
    worst = 0.0
    for jc in cfg.grid():
        rho = ground_state(cfg.params(J, jc)).density_matrix
        y_c = np.linalg.norm(geometry.fano(partial_trace(rho, "AC")).y)
        e = bipartition_entropy(cfg.params(J), "AB")(jc)
        worst = max(worst, abs(e - (1 - y_c**2) / 2))
    c.add("entropy_identity", worst, "E_C|AB vs (1 - |y_C|^2) / 2")


def _check_fisher(cfg: VerifyConfig, c: _Collector) -> None:
    w_rel = w_ex = w_qfi = 0.0
    for J in cfg.J_values:
        for jc in cfg.grid():
            p = cfg.params(J, jc)
            r = fisher_report(p)
            rho = ground_state(p, "symmetric").density_matrix
            for site, f_pop, f_vec in (("A", r.F_pop_A, r.F_vec_A), ("C", r.F_pop_C, r.F_vec_C)):
                y = abs(np.trace(partial_trace(rho, site) @ pauli("z")).real)
                if 1e-3 <= y <= 1 - 1e-3:
                    w_rel = max(w_rel, abs(f_pop - f_vec) / max(abs(f_pop), abs(f_vec), 1e-300))
            w_ex = max(w_ex, abs(r.F_pop_A - r.F_pop_B))
            top = max(r.F_pop_A, r.F_pop_B, r.F_pop_C)
            w_qfi = max(w_qfi, (top - r.QFI_global) / max(top, 1e-300))
    c.add("population_vs_vector", w_rel, "relative")
    c.add("exchange", w_ex, "|F_A - F_B|")
    c.add("qfi_bound", max(w_qfi, 0.0), "relative excess of site FI over QFI")


def _check_sensitivity(cfg: VerifyConfig, c: _Collector) -> None:
    p = cfg.params(cfg.sensitivity_J)
    bracket = cfg.crossing_bracket
    zeros = fi_zeros(p, bracket, cfg.tol, cfg.scan_points, site="A")
    ext = find_extrema(local_vector_norm(p, "A"), bracket, cfg.tol, cfg.scan_points)
    # |y_A| also has a kink wherever y_A = 0; only smooth extrema are compared
    if not zeros or len(zeros) != len(ext):
        gap = math.inf
    else:
        gap = max(abs(a.JC_star - b.JC_star) for a, b in zip(zeros, ext))
    detail = f"F_A zeros {[round(z.JC_star, 9) for z in zeros]}, |y_A| extrema {[round(e.JC_star, 9) for e in ext]}"
    c.add("fi_zero_vs_extremum", gap, detail)


def _oracle_obesity_signs(cfg: VerifyConfig, J: float, xs: np.ndarray) -> np.ndarray:
    """|beta|^4 - |alpha|^2 on a dense grid from a batched eigensolver."""
    base = build_hamiltonian(cfg.params(J, 0.0))
    probe = build_hamiltonian(cfg.params(J, 1.0)) - base
    H = base[None] + xs[:, None, None] * probe[None]
    _, vecs = np.linalg.eigh(H)
    psi = vecs[:, :, 0]
    a111 = np.abs(psi[:, 7]) ** 2
    alpha2 = np.abs(psi[:, 1]) ** 2 / a111
    beta2 = np.abs(psi[:, 2]) ** 2 / a111
    return beta2**2 - alpha2


def _check_obesity_zeros(cfg: VerifyConfig, c: _Collector) -> None:
    count_gap, omega_worst, found = 0, 0.0, []
    lo, hi = cfg.crossing_bracket
    xs = np.linspace(lo, hi, ORACLE_SCAN_POINTS)
    for J in cfg.J_values:
        v = _oracle_obesity_signs(cfg, J, xs)
        oracle = int(np.sum(v[:-1] * v[1:] < 0))
        roots = obesity_zeros(cfg.params(J), cfg.crossing_bracket, cfg.tol, cfg.scan_points)
        count_gap = max(count_gap, abs(len(roots) - oracle))
        found.append(f"J={J:g}: {len(roots)} vs oracle {oracle}")
        for r in roots:
            rho = ground_state(cfg.params(J, r.JC_star)).density_matrix
            omega_worst = max(omega_worst, geometry.obesity(geometry.fano(partial_trace(rho, "AB"))))
    c.add("count", float(count_gap), "; ".join(found))
    c.add("omega_at_root", omega_worst, "Omega_AB at the refined roots (scales as sqrt of the residual)")


def _check_probabilities(cfg: VerifyConfig, c: _Collector) -> None:
    w_sum = w_ex = w_range = 0.0
    for J in cfg.J_values:
        for jc in cfg.grid():
            g = ground_state(cfg.params(J, jc))
            P = basis_probabilities(g)
            w_sum = max(w_sum, abs(sum(P) - 1))
            w_ex = max(w_ex, abs(P[1] - P[2]))
            for direct, _ in superposition_probabilities(g).values():
                w_range = max(w_range, -direct, direct - 1)
    c.add("normalization", w_sum)
    c.add("exchange", w_ex, "|P_010 - P_100|")
    c.add("born_range", max(w_range, 0.0), "distance of direct probabilities outside [0, 1]")


def _explicit_hamiltonian(m: circuit.CircuitMapping) -> np.ndarray:
    """Effective circuit Hamiltonian assembled directly from Kronecker products."""
    sz, sx, one = pauli("z"), pauli("x"), np.eye(2)
    z = {"A": np.kron(np.kron(sz, one), one), "B": np.kron(np.kron(one, sz), one), "C": np.kron(np.kron(one, one), sz)}
    x = {"A": np.kron(np.kron(sx, one), one), "B": np.kron(np.kron(one, sx), one), "C": np.kron(np.kron(one, one), sx)}
    H = sum(m.omega[q] / 2 * z[q] for q in "ABC")
    H = H + m.g_AB * x["A"] @ x["B"] + m.g_AC * x["A"] @ x["C"] + m.g_BC * x["B"] @ x["C"]
    return H


def _check_circuit(cfg: VerifyConfig, c: _Collector) -> None:
    tq = circuit.Transmon(0.25, 50.0)
    t = circuit.TransmonParams(tq, tq, circuit.Transmon(0.3, 45.0))
    off = circuit.CouplerParams(10.0, 0.5, 0.5, 0.5)
    c.add("half_flux", max(abs(circuit.coupling(t, off, pr)) for pr in circuit.PAIRS), "g at half flux")
    g0 = circuit.coupling(t, circuit.CouplerParams(10.0, 0.0, 0.0, 0.0), "AC")
    worst = 0.0
    for phi in np.linspace(-1.0, 1.0, 81):
        g = circuit.coupling(t, circuit.CouplerParams(10.0, 0.0, phi, phi), "AC")
        worst = max(worst, abs(g / g0 - abs(math.cos(math.pi * phi))))
    c.add("cos_ratio", worst, "g(flux) / g(0) vs |cos(pi flux)|")
    worst = 0.0
    for fab, fc in ((0.0, 0.3), (0.2, 0.1), (0.45, 0.0)):
        m = circuit.effective_params(t, circuit.CouplerParams(10.0, fab, fc, fc))
        H = build_hamiltonian(m.params)
        worst = max(worst, float(np.abs(H - _explicit_hamiltonian(m)).max()) / max(1.0, np.abs(H).max()))
    c.add("hamiltonian", worst, "mapped model Hamiltonian vs explicit effective Hamiltonian")


_RUNNERS = {
    "ground_state": _check_ground_state,
    "closed_forms": _check_closed_forms,
    "lindblad": _check_lindblad,
    "crossings": _check_crossings,
    "fisher": _check_fisher,
    "sensitivity": _check_sensitivity,
    "obesity_zeros": _check_obesity_zeros,
    "probabilities": _check_probabilities,
    "circuit": _check_circuit,
}


def run_checks(
    cfg: VerifyConfig | None = None,
    tolerances: dict[str, float] | None = None,
    skip: Iterable[str] = (),
) -> list[CheckResult]:
    """Run every check group not listed in ``skip``; returns results in group order."""
    cfg = VerifyConfig() if cfg is None else cfg
    tols = dict(DEFAULT_TOLERANCES)
    for key, value in (tolerances or {}).items():
        if key not in tols:
            raise KeyError(f"unknown tolerance {key!r}")
        if not value >= 0:
            raise ValueError(f"tolerance {key!r} must be nonnegative")
        tols[key] = float(value)
    skip = set(skip)
    unknown = skip - set(GROUPS)
    if unknown:
        raise KeyError(f"unknown check groups {sorted(unknown)}")
    out: list[CheckResult] = []
    for group in GROUPS:
        if group in skip:
            for name in (k for k in tols if k.startswith(group + ".")):
                out.append(CheckResult(name, group, None, math.nan, tols[name], "skipped"))
            continue
        col = _Collector(group, tols)
        t0 = time.perf_counter()
        _RUNNERS[group](cfg, col)
        elapsed = time.perf_counter() - t0
        out.extend(
            CheckResult(r.name, r.group, r.passed, r.residual, r.tolerance, f"{r.detail} [{elapsed:.2f} s]".strip())
            for r in col.results
        )
    return out


def all_passed(results: Iterable[CheckResult]) -> bool:
    return all(r.passed is not False for r in results)


__all__ = ["CheckResult", "VerifyConfig", "DEFAULT_TOLERANCES", "GROUPS", "KINDS", "run_checks", "all_passed"]
