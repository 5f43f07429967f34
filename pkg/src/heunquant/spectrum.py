"""Root selection, eigenvalues, eigenfunctions and (N, L) spectrum grids."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .charpoly import Mode, QuantizationProblem, build_charpoly
from .core import (PhysicalParams, ScaledParams, SeriesCoefficients, coeff_A, coeff_B,
                   map_cornell, map_quark, map_scaled, to_fraction)
from .errors import DegreeZero, HeunQuantError, NoAdmissibleRoot, ResidualTooLarge
from .rootfind import RootEnclosure, RootSet, find_roots

RESIDUAL_TOL = 1e-8
_WORK_DPS = 40


@dataclass(frozen=True)
class SpectrumEntry:
    mode: Mode
    N: int
    L: int
    K: Optional[int]
    selected_root: float
    root_index: int
    all_roots: RootSet
    eigenvalue: float
    eigenfunction: SeriesCoefficients
    nodes: int  # positive real zeros of the eigenfunction, diagnostic only

    @property
    def n_real_roots(self) -> int:
        return len(self.all_roots)


def _fixed(mode: Mode, fixed: Dict) -> Dict[str, Fraction]:
    return {k: to_fraction(fixed[k]) for k in mode.fixed_keys}


def select_index(mode, rs: RootSet, K: int = 0) -> int:
    """Index into ``rs.roots`` of the root picked by the mode's rule."""
    mode = Mode.parse(mode)
    if len(rs) == 0:
        raise NoAdmissibleRoot("no real roots")
    if mode is Mode.QuantizeB:
        return len(rs) - 1
    positive = [i for i, r in enumerate(rs.roots) if r.lo > 0]
    if mode is Mode.QuantizeC:
        if not positive:
            raise NoAdmissibleRoot("no positive root c > 0")
        return positive[0]
    if K < 0 or K >= len(positive):
        raise NoAdmissibleRoot(f"K={K} but only {len(positive)} positive roots")
    return positive[K]


def select_root(mode, rs: RootSet, K: int = 0) -> float:
    """Smallest positive (c), largest (B) or K-th smallest positive (tension) root."""
    return rs.roots[select_index(mode, rs, K)].value


def eigenvalue(mode, root, N: int, L: int, fixed: Dict):
    """Closed-form eigenvalue: E-tilde, script E, or E^2/m^2 per mode."""
    mode = Mode.parse(mode)
    s = N + L + 1.5
    if mode is Mode.QuantizeC:
        b = float(to_fraction(fixed["b"]))
        return 2 * root * s - b * b / (4 * root * root)
    if mode is Mode.QuantizeB:
        return 2 * s - root * root / 4
    return 4 * root * s


def quantize_a_eigenvalue(N: int, L: int, B) -> float:
    """Spectrum when A is the accessory parameter and B is held fixed."""
    return 2 * (N + L + 1.5) - float(B) ** 2 / 4


def _bch_params(mode: Mode, root, N: int, L: int, fixed: Dict):
    """Instantiate the BCH parameters at a (high-precision) root value."""
    x = mpmath.mpf(root.numerator) / root.denominator if isinstance(root, Fraction) else mpmath.mpf(root)
    if mode is Mode.QuantizeC:
        a, b = (mpmath.mpf(fixed[k].numerator) / fixed[k].denominator for k in ("a", "b"))
        E = 2 * x * (N + L + mpmath.mpf(3) / 2) - b * b / (4 * x * x)
        return map_cornell(PhysicalParams(a=a, b=b, c=x, L=L, E=E))
    if mode is Mode.QuantizeB:
        A = mpmath.mpf(fixed["A"].numerator) / fixed["A"].denominator
        E = 2 * (N + L + mpmath.mpf(3) / 2) - x * x / 4
        return map_scaled(ScaledParams(A_bold=A, B_bold=x, E_script=E, L=L))
    m = mpmath.mpf(fixed["m"].numerator) / fixed["m"].denominator
    b = x * m * m
    E = mpmath.sqrt(4 * b * (N + L + mpmath.mpf(3) / 2))
    return map_quark(m, b, E, L)


def _coefficients(p, N: int) -> list:
    d = [mpmath.mpf(1)]
    d.append(coeff_A(0, p) * d[0])
    for n in range(1, N + 1):
        d.append(coeff_A(n, p) * d[n] + coeff_B(n, p) * d[n - 1])
    return d


def eigenfunction(mode, root, N: int, L: int, fixed: Dict) -> SeriesCoefficients:
    """d_0..d_N of the terminating series at ``root``; checks |d_{N+1}|."""
    mode = Mode.parse(mode)
    fixed = _fixed(mode, fixed)
    if isinstance(root, RootEnclosure):
        root = root.midpoint
    with mpmath.workdps(_WORK_DPS):
        p = _bch_params(mode, root, N, L, fixed)
        d = _coefficients(p, N)
        scale = max(abs(v) for v in d[: N + 1])
        if abs(d[N + 1]) > RESIDUAL_TOL * scale:
            raise ResidualTooLarge(
                f"|d_{N + 1}| = {mpmath.nstr(abs(d[N + 1]), 3)} vs max|d_n| = {mpmath.nstr(scale, 3)}")
        return SeriesCoefficients(d=tuple(float(v) for v in d[: N + 1]), nmax=N)


def count_positive_zeros(coeffs: SeriesCoefficients) -> int:
    d = np.asarray(coeffs.d, dtype=float)
    if len(d) < 2:
        return 0
    r = np.roots(d[::-1])
    real = r[np.abs(r.imag) <= 1e-9 * np.maximum(1.0, np.abs(r.real))].real
    return int(np.sum(real > 0))


def radial_wavefunction(entry: SpectrumEntry, r: float, fixed: Dict) -> float:
    """Unnormalized R(r) assembled from the polynomial eigenfunction.

    QuantizeC takes r in physical units (``alpha`` in ``fixed`` converts to
    r-tilde); QuantizeB works directly in rho; tension uses the quark form.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    y = lambda z: sum(dn * z ** n for n, dn in enumerate(entry.eigenfunction.d))
    L = entry.L
    if entry.mode is Mode.QuantizeC:
        alpha = float(to_fraction(fixed.get("alpha", 1)))
        b = float(to_fraction(fixed["b"]))
        c = entry.selected_root
        rt = r / alpha
        return rt ** L * math.exp(-c * rt * rt / 2 - b * rt / (2 * c)) * y(math.sqrt(c) * rt)
    if entry.mode is Mode.QuantizeB:
        B = entry.selected_root
        return r ** L * math.exp(-r * r / 2 - B * r / 2) * y(r)
    m = float(to_fraction(fixed["m"]))
    b = entry.selected_root * m * m
    return math.exp(-(b / 4) * (r + 2 * m / b) ** 2) * r ** L * y(r)


def compute_entry(mode, N: int, L: int, fixed: Dict, K: int = 0,
                  precision: float = 1e-12) -> SpectrumEntry:
    mode = Mode.parse(mode)
    q = QuantizationProblem(mode, N, L, fixed)
    try:
        poly = build_charpoly(q)
    except DegreeZero as exc:
        raise NoAdmissibleRoot(str(exc)) from exc
    rs = find_roots(poly, precision=precision)
    idx = select_index(mode, rs, K)
    enc = rs.roots[idx]
    root = enc.value
    ef = eigenfunction(mode, enc, N, L, q.fixed)
    return SpectrumEntry(mode=mode, N=N, L=L, K=K if mode is Mode.QuantizeTension else None,
                         selected_root=root, root_index=idx, all_roots=rs,
                         eigenvalue=eigenvalue(mode, root, N, L, q.fixed), eigenfunction=ef,
                         nodes=count_positive_zeros(ef))


def _grid(N_range: Iterable[int], L_max: Optional[int]) -> List[Tuple[int, int]]:
    cells = []
    for N in N_range:
        top = N if L_max is None else min(N, L_max)
        cells.extend((N, L) for L in range(top + 1))
    return cells


def _entry_or_error(args):
    mode, N, L, fixed, K, precision = args
    try:
        return compute_entry(mode, N, L, fixed, K, precision)
    except HeunQuantError as exc:
        return (N, L, f"{type(exc).__name__}: {exc}")


def enumerate_spectrum(mode, fixed: Dict, N_range: Iterable[int], K: int = 0,
                       L_max: Optional[int] = None, precision: float = 1e-12,
                       workers: int = 1, skipped: Optional[list] = None) -> List[SpectrumEntry]:
    """One entry per (N, L), L = 0..N, in (N, L) order.

    Cells without an admissible root are left out; pass a list as
    ``skipped`` to collect (N, L, reason) for them.
    """
    mode = Mode.parse(mode)
    fixed = _fixed(mode, fixed)
    jobs = [(mode, N, L, fixed, K, precision) for N, L in _grid(N_range, L_max)]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_entry_or_error, jobs, chunksize=4))
    else:
        results = [_entry_or_error(j) for j in jobs]
    out = []
    for res in results:
        if isinstance(res, SpectrumEntry):
            out.append(res)
        elif skipped is not None:
            skipped.append(res)
    return out


def gap_table(fixed: Dict, N_range: Iterable[int], mode=Mode.QuantizeC,
              precision: float = 1e-12) -> List[Tuple[int, float]]:
    """gap(N) = selected root at L = N minus selected root at L = 0."""
    mode = Mode.parse(mode)
    rows = []
    for N in N_range:
        top = compute_entry(mode, N, N, fixed, precision=precision).selected_root
        bottom = compute_entry(mode, N, 0, fixed, precision=precision).selected_root
        rows.append((N, top - bottom))
    return rows


def fmt12(x: float) -> str:
    return format(float(x), ".12g")


def spectrum_csv(entries: Sequence[SpectrumEntry]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mode", "N", "L", "K", "selected_root", "eigenvalue", "root_index", "n_real_roots"])
    for e in entries:
        w.writerow([e.mode.value, e.N, e.L, "" if e.K is None else e.K, fmt12(e.selected_root),
                    fmt12(e.eigenvalue), e.root_index, e.n_real_roots])
    return buf.getvalue()
