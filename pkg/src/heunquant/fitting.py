"""Least-squares surfaces over (N, L) root tables and curvature of spectra.

Three families:

    c    ~ s (N^p + u L^q + v) / (N^w + t)          (free: s, u, v)
    B    ~ s (N^p + v) / (N + u L^q + t)            (free: s, v)
    b/m^2 ~ (a1 L + a2 n + a3) / (n^2 + b1 n + b2),  n = N - 2K

The first two are linear in (s, s u, s v) once the exponents and the
denominator constants are fixed. The tension family has its free
coefficients in the denominator, so it is solved by a linearized
equation-error fit followed by a nonlinear refinement.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares

from .charpoly import Mode
from .core import to_fraction
from .errors import RankDeficient, TooFewPoints
from .spectrum import compute_entry, eigenvalue, enumerate_spectrum, quantize_a_eigenvalue

LINEAR_TOL = 1e-3


class Family(str, enum.Enum):
    CfitRational = "CfitRational"
    BfitRational = "BfitRational"
    TensionFit = "TensionFit"


class Curvature(str, enum.Enum):
    ConcaveUp = "ConcaveUp"
    ConcaveDown = "ConcaveDown"
    Linear = "Linear"
    Mixed = "Mixed"


# structural constants of the reference surfaces, keyed by the fixed inputs
REFERENCE_MODELS = {
    ("c", (Fraction(1), Fraction(1, 10))): {
        "p": Fraction(9, 10), "q": Fraction(3, 5), "w": Fraction(11, 10), "t": Fraction(8, 5)},
    ("c", (Fraction(1), Fraction(1, 30))): {
        "p": Fraction(1), "q": Fraction(11, 20), "w": Fraction(23, 20), "t": Fraction(74, 25)},
    ("B", (Fraction(1),)): {
        "p": Fraction(13, 10), "q": Fraction(23, 30), "u": Fraction(9, 5), "t": Fraction(6)},
    ("B", (Fraction(1, 50),)): {
        "p": Fraction(13, 10), "q": Fraction(17, 21), "u": Fraction(37, 25), "t": Fraction(29, 5)},
}

# reference coefficients, for comparison only
REFERENCE_COEFFS = {
    ("c", (Fraction(1), Fraction(1, 10))): {"s": 0.0652, "u": 37 / 25, "v": 19 / 8},
    ("c", (Fraction(1), Fraction(1, 30))): {"s": 0.02582, "u": 30 / 11, "v": 41 / 11},
    ("B", (Fraction(1),)): {"s": 5.87593, "v": 31 / 20},
    ("B", (Fraction(1, 50),)): {"s": 5.74785, "v": 18 / 25},
}

TENSION_TABLE = {
    0: (2.17476, 1.23455, 3.1316, 0.127159, -0.0365734),
    1: (2.07336, 1.30259, 6.42638, 0.115047, -0.0496256),
    2: (2.01984, 1.34965, 9.57483, 0.081705, -0.0383507),
    3: (1.9896, 1.3852, 12.6964, 0.0577076, -0.0279763),
    4: (1.97123, 1.41335, 15.8181, 0.0416747, -0.0205087),
    5: (1.95917, 1.43668, 18.9437, 0.0305489, -0.0151151),
    6: (1.95079, 1.45671, 22.0738, 0.0225566, -0.0111519),
    7: (1.94469, 1.47448, 25.2076, 0.0165878, -0.00814524),
    8: (1.94007, 1.49074, 28.3441, 0.0119884, -0.00580511),
    9: (1.93646, 1.50609, 31.4824, 0.00837235, -0.00396296),
    10: (1.93354, 1.5212, 34.6212, 0.00543953, -0.00247279),
}
TENSION_KEYS = ("alpha_L", "alpha_N", "alpha_0", "beta_1", "beta_2")


def reference_model_key(mode, fixed: Dict) -> tuple:
    mode = Mode.parse(mode)
    return (mode.value, tuple(to_fraction(fixed[k]) for k in mode.fixed_keys))


@dataclass(frozen=True)
class FitModel:
    family: Family
    fixed_exponents: Dict[str, Fraction]
    free_coeffs: Dict[str, float]
    K: int = 0
    rms_relative_residual: float = float("nan")
    rms_absolute_residual: float = float("nan")
    n_points: int = 0
    grid_spec: str = ""

    def __call__(self, N, L):
        N = np.asarray(N, dtype=float)
        L = np.asarray(L, dtype=float)
        e = {k: float(v) for k, v in self.fixed_exponents.items()}
        c = self.free_coeffs
        if self.family is Family.CfitRational:
            return c["s"] * (N ** e["p"] + c["u"] * L ** e["q"] + c["v"]) / (N ** e["w"] + e["t"])
        if self.family is Family.BfitRational:
            return c["s"] * (N ** e["p"] + c["v"]) / (N + e["u"] * L ** e["q"] + e["t"])
        n = N - 2 * self.K
        return (c["alpha_L"] * L + c["alpha_N"] * n + c["alpha_0"]) / (n * n + c["beta_1"] * n + c["beta_2"])

    def denominator(self, N, L):
        N = np.asarray(N, dtype=float)
        L = np.asarray(L, dtype=float)
        e = {k: float(v) for k, v in self.fixed_exponents.items()}
        if self.family is Family.CfitRational:
            return N ** e["w"] + e["t"]
        if self.family is Family.BfitRational:
            return N + e["u"] * L ** e["q"] + e["t"]
        n = N - 2 * self.K
        return n * n + self.free_coeffs["beta_1"] * n + self.free_coeffs["beta_2"]

    def to_json(self) -> str:
        return json.dumps({
            "family": self.family.value,
            "K": self.K,
            "fixed_exponents": {k: str(v) for k, v in self.fixed_exponents.items()},
            "coeffs": {k: float(format(v, ".12g")) for k, v in self.free_coeffs.items()},
            "rms_relative_residual": float(format(self.rms_relative_residual, ".6g")),
            "rms_absolute_residual": float(format(self.rms_absolute_residual, ".6g")),
            "n_points": self.n_points,
            "grid_spec": self.grid_spec,
        })


def _arrays(table):
    T = np.asarray([(float(n), float(l), float(v)) for n, l, v in table], dtype=float)
    if T.size == 0:
        raise TooFewPoints("empty table")
    return T[:, 0], T[:, 1], T[:, 2]


def _lstsq(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    if X.shape[0] < X.shape[1] or np.linalg.matrix_rank(X) < X.shape[1]:
        raise RankDeficient(f"design matrix {X.shape} has rank {np.linalg.matrix_rank(X)}")
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return coef


def _tension_fit(N, L, y, K):
    n = N - 2 * K
    X = np.column_stack([L, n, np.ones_like(n), -y * n, -y])
    start = _lstsq(X, y * n * n)

    def resid(c):
        return (c[0] * L + c[1] * n + c[2]) / (n * n + c[3] * n + c[4]) - y

    sol = least_squares(resid, start, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=20000)
    return dict(zip(TENSION_KEYS, (float(v) for v in sol.x)))


def fit(table: Sequence[Tuple[int, int, float]], family, fixed_exponents: Optional[Dict] = None,
        K: int = 0, grid_spec: str = "") -> FitModel:
    """Least-squares fit of one family to (N, L, value) rows (absolute residuals)."""
    family = Family(family)
    N, L, y = _arrays(table)
    fx = {k: to_fraction(v) for k, v in (fixed_exponents or {}).items()}
    if family is Family.CfitRational:
        e = {k: float(fx[k]) for k in ("p", "q", "w", "t")}
        den = N ** e["w"] + e["t"]
        X = np.column_stack([N ** e["p"] / den, L ** e["q"] / den, 1 / den])
        s, su, sv = _lstsq(X, y)
        if s == 0:
            raise RankDeficient("leading scale fitted to zero")
        coeffs = {"s": float(s), "u": float(su / s), "v": float(sv / s)}
    elif family is Family.BfitRational:
        e = {k: float(fx[k]) for k in ("p", "q", "u", "t")}
        den = N + e["u"] * L ** e["q"] + e["t"]
        X = np.column_stack([N ** e["p"] / den, 1 / den])
        s, sv = _lstsq(X, y)
        if s == 0:
            raise RankDeficient("leading scale fitted to zero")
        coeffs = {"s": float(s), "v": float(sv / s)}
    else:
        fx = {}
        coeffs = _tension_fit(N, L, y, K)
    model = FitModel(family=family, fixed_exponents=fx, free_coeffs=coeffs, K=K)
    pred = model(N, L)
    rel = np.sqrt(np.mean(((pred - y) / y) ** 2))
    absr = np.sqrt(np.mean((pred - y) ** 2))
    return FitModel(family=family, fixed_exponents=fx, free_coeffs=coeffs, K=K,
                    rms_relative_residual=float(rel), rms_absolute_residual=float(absr),
                    n_points=len(y), grid_spec=grid_spec)


def rss(model: FitModel, table) -> float:
    N, L, y = _arrays(table)
    return float(np.sum((model(N, L) - y) ** 2))


def fitted_spectrum(model: FitModel, mode, fixed: Dict, N: int, L: int, m=1) -> float:
    """Eigenvalue formula evaluated at the fitted accessory value.

    For the tension family this returns E^2 (E^2/m^2 times m^2).
    """
    mode = Mode.parse(mode)
    x = float(model(N, L))
    val = eigenvalue(mode, x, N, L, fixed)
    if mode is Mode.QuantizeTension:
        return val * float(to_fraction(fixed.get("m", m))) ** 2
    return val


def curvature_classify(values: Sequence[Tuple[float, float]], window: Optional[Tuple[float, float]] = None,
                       tol: float = LINEAR_TOL) -> Curvature:
    """Sign pattern of second differences of (N, E) points sorted by N."""
    pts = sorted((float(n), float(v)) for n, v in values)
    if window is not None:
        pts = [p for p in pts if window[0] <= p[0] <= window[1]]
    if len(pts) < 3:
        raise TooFewPoints(f"need >= 3 points, got {len(pts)}")
    v = np.array([p[1] for p in pts])
    d1 = np.diff(v)
    d2 = np.diff(v, 2)
    flat = np.abs(d2) < tol * np.maximum(np.abs(d1[:-1]), np.abs(d1[1:]))
    if flat.all():
        return Curvature.Linear
    signs = np.sign(d2[~flat])
    if (signs > 0).all():
        return Curvature.ConcaveUp
    if (signs < 0).all():
        return Curvature.ConcaveDown
    return Curvature.Mixed


def closed_tension_formula(K: int, N, L):
    """The K-interpolated closed form fitted across the per-K tension surfaces."""
    N = np.asarray(N, dtype=float)
    L = np.asarray(L, dtype=float)
    n = N - 2 * K
    num = (22 / 13 - (11 / 4) / (K + 6)) * n + (17 / 9 + 0.5 / (K + 7 / 4)) * L + 22 / 7 * K + 13 / 4
    den = n * n + (n - 0.5) / (K * K + 8)
    return num / den


def tension_table(K: int, N_max: int = 25, m=1, workers: int = 1) -> List[Tuple[int, int, float]]:
    if N_max < 2 * K + 1:
        raise ValueError(f"N_max must be >= 2K+1 = {2 * K + 1}")
    entries = enumerate_spectrum(Mode.QuantizeTension, {"m": m}, range(2 * K + 1, N_max + 1),
                                 K=K, workers=workers)
    return [(e.N, e.L, e.selected_root) for e in entries]


def tension_fit_table(K_range, N_max: int = 25, m=1, workers: int = 1) -> List[dict]:
    """Per-K tension fits plus the closed interpolation at the same points."""
    out = []
    for K in K_range:
        table = tension_table(K, N_max, m, workers)
        model = fit(table, Family.TensionFit, K=K,
                    grid_spec=f"tension m={m} K={K} {2 * K + 1}<=N<={N_max} 0<=L<=N")
        N, L, y = _arrays(table)
        closed = closed_tension_formula(K, N, L)
        out.append({
            "K": K,
            "model": model,
            "closed_rms_relative": float(np.sqrt(np.mean(((closed - y) / y) ** 2))),
        })
    return out


def grid_table(mode, fixed: Dict, N_max: int, workers: int = 1) -> List[Tuple[int, int, float]]:
    entries = enumerate_spectrum(mode, fixed, range(0, N_max + 1), workers=workers)
    return [(e.N, e.L, e.selected_root) for e in entries]


def curvature_report(L_values=range(0, 6), c_fixed=None, b_fixed=None) -> List[dict]:
    """Classification of c, B and A spectra at fixed L over 0 <= N <= L+5."""
    c_fixed = c_fixed or {"a": 1, "b": Fraction(1, 10)}
    b_fixed = b_fixed or {"A": 1}
    rows = []
    for L in L_values:
        Ns = range(0, L + 6)
        c_pts = [(N, compute_entry(Mode.QuantizeC, N, L, c_fixed).eigenvalue) for N in Ns]
        b_pts = [(N, compute_entry(Mode.QuantizeB, N, L, b_fixed).eigenvalue) for N in Ns]
        a_pts = [(N, quantize_a_eigenvalue(N, L, 1)) for N in Ns]  # B held at 1
        slope = float(np.polyfit([p[0] for p in a_pts], [p[1] for p in a_pts], 1)[0])
        rows.append({
            "L": L,
            "c": curvature_classify(c_pts).value,
            "B": curvature_classify(b_pts).value,
            "A": curvature_classify(a_pts).value,
            "A_slope": slope,
        })
    return rows
