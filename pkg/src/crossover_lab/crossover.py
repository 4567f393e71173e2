"""JC sweeps and detection of crossover signatures."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Callable, Sequence

import numpy as np

from . import geometry
from .metrology import bloch_vector, default_step, fisher_report, richardson
from .model import SystemParams
from .spectral import (
    I001,
    I010,
    I100,
    I111,
    GroundState,
    ground_state,
    linear_entropy,
    partial_trace,
)

DEFAULT_SCAN_POINTS = 512
DEFAULT_TOL = 1e-8
KINDS = ("entropy_crossing", "local_vector_crossing", "fi_zero", "obesity_zero", "probability_inversion")


@dataclass(frozen=True)
class SweepRecord:
    JC: float
    omega_AB: float
    omega_AC: float
    V_AB: float
    V_AC: float
    E_C_given_AB: float
    E_B_given_AC: float
    y_A_norm: float
    y_C_norm: float
    F_A: float
    F_C: float
    QFI: float
    P_001: float
    P_010: float
    P_100: float
    P_111: float
    P_sym_010_100_direct: float
    P_sym_010_100_paper: float
    P_001_111_direct: float
    P_001_111_paper: float
    P_010_001_direct: float
    P_010_001_paper: float
    degenerate_AB: bool
    degenerate_AC: bool
    provenance: str

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class CriticalPoint:
    JC_star: float
    kind: str
    bracket: tuple[float, float]
    residual: float


def basis_probabilities(g: GroundState) -> tuple[float, float, float, float]:
    """Occupations of |001>, |010>, |100>, |111>."""
    a = np.abs(g.amplitudes) ** 2
    return float(a[I001]), float(a[I010]), float(a[I100]), float(a[I111])


_SUPERPOSITIONS = {
    "010_100": (I010, I100),
    "001_111": (I001, I111),
    "010_001": (I010, I001),
}


def superposition_probabilities(g: GroundState) -> dict[str, tuple[float, float]]:
    """Overlaps with (|i> + |j>)/sqrt(2) as ``(direct, paper_form)`` pairs.

    ``direct`` is the Born-rule value from the amplitudes.  ``paper_form``
    is the printed closed form, which omits the interference terms.
    """
    psi = g.amplitudes
    a2, b2, N = abs(g.alpha) ** 2, abs(g.beta) ** 2, g.normN
    printed = {
        "010_100": b2 / N,
        "001_111": (a2 + 1) / (2 * N),
        "010_001": (a2 + b2) / (2 * N),
    }
    out = {}
    for key, (i, j) in _SUPERPOSITIONS.items():
        direct = abs(psi[i] + psi[j]) ** 2 / 2
        out[key] = (float(direct), float(printed[key]))
    return out


def evaluate_point(p: SystemParams, step: float | None = None, fi_method: str = "symmetric") -> SweepRecord:
    g = ground_state(p)
    rho = g.density_matrix
    rho_ab = partial_trace(rho, "AB")
    rho_ac = partial_trace(rho, "AC")
    f_ab = geometry.fano(rho_ab)
    f_ac = geometry.fano(rho_ac)
    ell_ab = geometry.ellipsoid(f_ab, "first")
    ell_ac = geometry.ellipsoid(f_ac, "first")
    y_a = float(np.linalg.norm(bloch_vector(partial_trace(rho, "A"))))
    y_c = float(np.linalg.norm(bloch_vector(partial_trace(rho, "C"))))
    fr = fisher_report(p, step, fi_method)
    P = basis_probabilities(g)
    sup = superposition_probabilities(g)
    return SweepRecord(
        JC=p.JC,
        omega_AB=ell_ab.obesity,
        omega_AC=ell_ac.obesity,
        V_AB=ell_ab.volume,
        V_AC=ell_ac.volume,
        E_C_given_AB=linear_entropy(rho_ab),
        E_B_given_AC=linear_entropy(rho_ac),
        y_A_norm=y_a,
        y_C_norm=y_c,
        F_A=fr.F_pop_A,
        F_C=fr.F_pop_C,
        QFI=fr.QFI_global,
        P_001=P[0],
        P_010=P[1],
        P_100=P[2],
        P_111=P[3],
        P_sym_010_100_direct=sup["010_100"][0],
        P_sym_010_100_paper=sup["010_100"][1],
        P_001_111_direct=sup["001_111"][0],
        P_001_111_paper=sup["001_111"][1],
        P_010_001_direct=sup["010_001"][0],
        P_010_001_paper=sup["010_001"][1],
        degenerate_AB=ell_ab.degenerate,
        degenerate_AC=ell_ac.degenerate,
        provenance=g.provenance,
    )


def default_workers() -> int:
    n = os.cpu_count() or 1
    cap = os.environ.get("CROSSOVER_LAB_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def sweep(
    p_base: SystemParams,
    jc_grid: Sequence[float],
    step: float | None = None,
    workers: int | None = 1,
) -> list[SweepRecord]:
    """One :class:`SweepRecord` per grid point, in grid order.

    ``step`` fixes the finite-difference stride; by default it scales with
    each point's JC.  ``workers=None`` uses :func:`default_workers`.
    """
    grid = [float(x) for x in jc_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("JC grid must be strictly increasing")
    params = [p_base.with_jc(x) for x in grid]
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(params) < 2:
        return [evaluate_point(p, step) for p in params]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda p: evaluate_point(p, step), params))


def _bisect(fn: Callable[[float], float], lo: float, hi: float, flo: float, tol: float, max_iter: int = 200):
    """Shrink a sign-change bracket until it is narrower than ``tol`` and |fn| <= tol.

    Returns ``(x, lo, hi, fn(x))`` with ``lo < x < hi``.
    """
    mid, fmid = 0.5 * (lo + hi), flo
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        fmid = fn(mid)
        if fmid == 0 or (hi - lo <= tol and abs(fmid) <= tol):
            break
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return mid, lo, hi, fmid


def _sign_change_roots(fn, bracket, tol, scan_points, kind) -> list[CriticalPoint]:
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    xs = np.linspace(lo, hi, scan_points)
    vals = np.array([fn(x) for x in xs])
    out = []
    for k in range(len(xs) - 1):
        a, b = vals[k], vals[k + 1]
        if a * b < 0:
            star, blo, bhi, res = _bisect(fn, xs[k], xs[k + 1], a, tol)
            out.append(CriticalPoint(float(star), kind, (float(blo), float(bhi)), float(abs(res))))
        elif b == 0 and 0 < k + 1 < len(xs) - 1 and a * vals[k + 2] < 0:
            out.append(CriticalPoint(float(xs[k + 1]), kind, (float(xs[k]), float(xs[k + 2])), 0.0))
    return out


def find_crossings(
    f: Callable[[float], float],
    g: Callable[[float], float],
    bracket: tuple[float, float],
    tol: float = DEFAULT_TOL,
    scan_points: int = DEFAULT_SCAN_POINTS,
    kind: str = "entropy_crossing",
) -> list[CriticalPoint]:
    """Points where ``f`` and ``g`` cross, by scan then bisection.

    Each root is refined until its bracket is narrower than ``tol`` and
    ``|f - g| <= tol`` (or floating-point resolution is reached).  Touching
    without a sign change is not reported.
    """
    return _sign_change_roots(lambda x: f(x) - g(x), bracket, tol, scan_points, kind)


def find_extrema(
    f: Callable[[float], float],
    bracket: tuple[float, float],
    tol: float = DEFAULT_TOL,
    scan_points: int = DEFAULT_SCAN_POINTS,
    h: float | None = None,
    kind: str = "extremum",
) -> list[CriticalPoint]:
    """Local extrema of ``f``: sign changes of its central-difference derivative."""
    lo, hi = map(float, bracket)
    h = 1e-5 * max(1.0, abs(lo), abs(hi)) if h is None else h

    def slope(x):
        return float(richardson({k: f(x + k * h) for k in (-1.0, -0.5, 0.5, 1.0)}, h))

    return _sign_change_roots(slope, (lo, hi), tol, scan_points, kind)


def _reduced_ground(p_base: SystemParams, method: str = "auto"):
    def at(jc: float) -> GroundState:
        return ground_state(p_base.with_jc(jc), method)

    return at


def local_vector_norm(p_base: SystemParams, site: str, method: str = "auto") -> Callable[[float], float]:
    at = _reduced_ground(p_base, method)
    return lambda jc: float(np.linalg.norm(bloch_vector(partial_trace(at(jc).density_matrix, site))))


def bipartition_entropy(p_base: SystemParams, keep: str, method: str = "auto") -> Callable[[float], float]:
    """Linear entropy of the two-qubit reduced state on ``keep``."""
    at = _reduced_ground(p_base, method)
    return lambda jc: linear_entropy(partial_trace(at(jc).density_matrix, keep))


def population_slope(p_base: SystemParams, site: str, step: float | None = None) -> Callable[[float], float]:
    """d P_{1,site} / dJC; its square over the populations is the population FI."""
    at = _reduced_ground(p_base, "symmetric")

    def slope(jc):
        h = default_step(jc) if step is None else step
        samples = {k: partial_trace(at(jc + k * h).density_matrix, site)[1, 1].real for k in (-1.0, -0.5, 0.5, 1.0)}
        return float(richardson(samples, h))

    return slope


def entropy_crossings(p_base, bracket, tol=DEFAULT_TOL, scan_points=DEFAULT_SCAN_POINTS):
    """JC where E_{C|AB} = E_{B|AC}."""
    return find_crossings(
        bipartition_entropy(p_base, "AB"), bipartition_entropy(p_base, "AC"),
        bracket, tol, scan_points, kind="entropy_crossing",
    )


def local_vector_crossings(p_base, bracket, tol=DEFAULT_TOL, scan_points=DEFAULT_SCAN_POINTS):
    """JC where |y_A| = |y_C|."""
    return find_crossings(
        local_vector_norm(p_base, "A"), local_vector_norm(p_base, "C"),
        bracket, tol, scan_points, kind="local_vector_crossing",
    )


def fi_zeros(p_base, bracket, tol=DEFAULT_TOL, scan_points=DEFAULT_SCAN_POINTS, site="A"):
    """Zeros of the population FI on ``site``, located as sign changes of dP_1/dJC."""
    return _sign_change_roots(population_slope(p_base, site), bracket, tol, scan_points, "fi_zero")


def obesity_zero_function(p_base: SystemParams, method: str = "auto") -> Callable[[float], float]:
    """|beta|^4 - |alpha|^2, whose zeros are the zeros of the AB obesity."""

    def fn(jc):
        g = ground_state(p_base.with_jc(jc), method)
        return abs(g.beta) ** 4 - abs(g.alpha) ** 2

    return fn


def obesity_zeros(p_base, bracket, tol=DEFAULT_TOL, scan_points=DEFAULT_SCAN_POINTS):
    return _sign_change_roots(obesity_zero_function(p_base), bracket, tol, scan_points, "obesity_zero")


def probability_inversions(p_base, bracket, tol=DEFAULT_TOL, scan_points=DEFAULT_SCAN_POINTS):
    """JC where the Born-rule occupation of (|010> + |100>)/sqrt(2) crosses P_001."""
    at = _reduced_ground(p_base)

    def diff(jc):
        g = at(jc)
        return superposition_probabilities(g)["010_100"][0] - basis_probabilities(g)[0]

    return _sign_change_roots(diff, bracket, tol, scan_points, "probability_inversion")


def critical_points(
    p_base: SystemParams,
    bracket: tuple[float, float],
    tol: float = DEFAULT_TOL,
    scan_points: int = DEFAULT_SCAN_POINTS,
) -> list[CriticalPoint]:
    """All detected signatures, grouped by kind in :data:`KINDS` order, then by JC."""
    found = []
    found += entropy_crossings(p_base, bracket, tol, scan_points)
    found += local_vector_crossings(p_base, bracket, tol, scan_points)
    found += fi_zeros(p_base, bracket, tol, scan_points)
    found += obesity_zeros(p_base, bracket, tol, scan_points)
    found += probability_inversions(p_base, bracket, tol, scan_points)
    return sorted(found, key=lambda c: (KINDS.index(c.kind), c.JC_star))


def dense_scan_zero_count(values: np.ndarray) -> int:
    """Number of strict sign changes in a sampled sequence."""
    v = np.asarray(values, dtype=float)
    v = v[v != 0]
    return int(np.sum(v[:-1] * v[1:] < 0))


def is_finite_record(r: SweepRecord) -> bool:
    return all(math.isfinite(getattr(r, n)) for n in SweepRecord.field_names() if isinstance(getattr(r, n), float))
