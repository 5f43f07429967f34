"""Outward shooting for the rho-equation and its xi = rho^2 confluent form.

Two integrators: scipy's DOP853 for double precision and a Taylor-series
stepper in mpmath for runs that bisect the energy past ~15 digits. The
Taylor stepper expands about the current point z0, whose distance to the
singular point z = 0 bounds the radius of convergence, so steps stay
below z0/2.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

import mpmath
import numpy as np
from scipy.integrate import solve_ivp

from .core import ModifiedBCHParams, PhysicalParams, map_cornell, to_confluent, to_fraction
from .errors import SameClassification, StepFailure

BLOWUP = 1e6
E0_TABLE1 = Fraction("7.46")


class ICMode(str, enum.Enum):
    PaperFlat = "flat"
    SeriesConsistent = "series"


class Classification(str, enum.Enum):
    Overshoot = "overshoot"
    Undershoot = "undershoot"
    Flat = "flat"
    Indeterminate = "indeterminate"


@dataclass(frozen=True)
class ShootingConfig:
    params: PhysicalParams
    E_trial: object
    ic_mode: ICMode = ICMode.SeriesConsistent
    rho_start: float = 1e-6
    rho_max: float = 8.0
    rtol: float = 1e-12
    atol: float = 1e-14
    variable: str = "rho"  # "xi" integrates the confluent form (needs a = b = 0)
    flat_window: float = 6.0
    flat_tol: float = 1e-6
    sample_step: float = 0.02
    blowup: float = BLOWUP  # |y| beyond this ends the run
    dps: Optional[int] = None  # None: double precision; else mpmath digits
    target: Optional[Callable[[float], float]] = None  # default y = 1

    def __post_init__(self):
        if not self.rho_start > 0:
            raise ValueError("rho_start must be > 0: z = 0 is a singular point")
        if self.rho_max <= self.rho_start:
            raise ValueError("rho_max must exceed rho_start")
        if self.variable not in ("rho", "xi"):
            raise ValueError("variable must be 'rho' or 'xi'")

    def bch(self, num=None) -> ModifiedBCHParams:
        """Equation parameters, exact where possible or in the type ``num``."""
        E = self.E_trial if isinstance(self.E_trial, (float, mpmath.mpf)) else to_fraction(self.E_trial)
        phys = replace(self.params, E=E)
        if num is not None:
            phys = replace(phys, a=num(phys.a), b=num(phys.b), c=num(phys.c), E=num(phys.E))
        p = map_cornell(phys)
        return to_confluent(p) if self.variable == "xi" else p

    def with_energy(self, E) -> "ShootingConfig":
        return replace(self, E_trial=E)


@dataclass
class Trajectory:
    samples: List[Tuple[float, float, float]]
    classification: Classification
    blowup_rho: Optional[float] = None
    end_value: float = 0.0  # y - target at the last sample

    @property
    def rho(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples])

    @property
    def y(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rho", "y", "yprime"])
        for r, y, yp in self.samples:
            w.writerow([format(r, ".10g"), format(y, ".12g"), format(yp, ".12g")])
        return buf.getvalue()


def _start_values(p, cfg: ShootingConfig, num):
    """(y, y') at rho_start for the configured initial-condition mode."""
    z0 = num(cfg.rho_start)
    if cfg.ic_mode is ICMode.PaperFlat:
        return num(1), num(0)
    # Frobenius series: d_0 = 1, d_1 = A_0, d_{n+1} = A_n d_n + B_n d_{n-1}
    d = [num(1), -num(p.eps_omega) / num(p.nu)]
    for n in range(1, 12):
        den = (n + 1) * (n + num(p.nu))
        A = -(num(p.epsilon) * n + num(p.eps_omega)) / den
        B = -(num(p.Omega) + num(p.mu) * (n - 1)) / den
        d.append(A * d[n] + B * d[n - 1])
    y = sum(dn * z0 ** n for n, dn in enumerate(d))
    yp = sum(n * dn * z0 ** (n - 1) for n, dn in enumerate(d) if n)
    return y, yp


def _grid(cfg: ShootingConfig) -> List[float]:
    n = int(math.floor((cfg.rho_max - 1e-12) / cfg.sample_step))
    pts = [cfg.rho_start] + [k * cfg.sample_step for k in range(1, n + 1)
                             if k * cfg.sample_step > cfg.rho_start]
    if pts[-1] < cfg.rho_max:
        pts.append(cfg.rho_max)
    return pts


def _integrate_double(cfg: ShootingConfig, p) -> Tuple[list, Optional[float]]:
    mu, eps, nu, Om, ew = (float(v) for v in (p.mu, p.epsilon, p.nu, p.Omega, p.eps_omega))

    def rhs(z, u):
        y, yp = u
        return [yp, -((mu * z * z + eps * z + nu) * yp + (Om * z + ew) * y) / z]

    def blow(z, u):
        return abs(u[0]) - cfg.blowup
    blow.terminal = True

    y0, yp0 = _start_values(p, cfg, float)
    grid = _grid(cfg)
    sol = solve_ivp(rhs, (grid[0], grid[-1]), [y0, yp0], method="DOP853", t_eval=grid,
                    rtol=cfg.rtol, atol=cfg.atol, events=blow)
    if sol.status == -1:
        raise StepFailure(sol.message)
    samples = [(float(t), float(a), float(b)) for t, a, b in zip(sol.t, sol.y[0], sol.y[1])]
    blowup = None
    if sol.status == 1 and len(sol.t_events[0]):
        t_b = float(sol.t_events[0][0])
        yb, ypb = sol.y_events[0][0]
        samples.append((t_b, float(yb), float(ypb)))
        blowup = t_b
    return samples, blowup


def _taylor_step(p, z0, y, yp, h, tol):
    """Advance (y, y') from z0 to z0 + h with a local Taylor series."""
    q0 = p.mu * z0 * z0 + p.epsilon * z0 + p.nu
    q1 = 2 * p.mu * z0 + p.epsilon
    q2 = p.mu
    r0 = p.Omega * z0 + p.eps_omega
    r1 = p.Omega
    a_prev, a0, a1 = mpmath.mpf(0), y, yp
    ys, yps = a0 + a1 * h, a1
    hk = h  # h^(k+1) with k the index of a1's successor loop
    small = 0
    k = 0
    while True:
        a2 = -((k + 1) * (k + q0) * a1 + (q1 * k + r0) * a0 + (q2 * (k - 1) + r1) * a_prev) \
            / (z0 * (k + 2) * (k + 1))
        term_d = (k + 2) * a2 * hk
        hk = hk * h
        term = a2 * hk
        ys += term
        yps += term_d
        scale = max(abs(ys), 1)
        small = small + 1 if abs(term) < tol * scale and abs(term_d) * h < tol * scale else 0
        if small >= 3:
            break
        k += 1
        if k > 2000:
            raise StepFailure(f"Taylor series did not converge at z={mpmath.nstr(z0, 8)}")
        a_prev, a0, a1 = a0, a1, a2
    return ys, yps


def _mp(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def _integrate_mp(cfg: ShootingConfig) -> Tuple[list, Optional[float]]:
    with mpmath.workdps(cfg.dps):
        pm = cfg.bch(_mp)
        pm = ModifiedBCHParams(*(_mp(v) for v in (pm.mu, pm.epsilon, pm.nu, pm.Omega, pm.eps_omega)))
        tol = mpmath.mpf(10) ** (-cfg.dps)
        y, yp = _start_values(pm, cfg, _mp)
        grid = [_mp(Fraction(repr(g))) for g in _grid(cfg)]
        z = grid[0]
        samples = [(float(z), float(y), float(yp))]
        hmin = mpmath.mpf(10) ** (-cfg.dps)
        for target in grid[1:]:
            while z < target:
                h = min(z / 2, target - z, mpmath.mpf("0.25"))
                if h < hmin:
                    raise StepFailure(f"step underflow at z={mpmath.nstr(z, 8)}")
                y, yp = _taylor_step(pm, z, y, yp, h, tol)
                z = z + h if target - z - h > hmin else target
                if abs(y) > cfg.blowup:
                    samples.append((float(z), float(y), float(yp)))
                    return samples, float(z)
            samples.append((float(z), float(y), float(yp)))
        return samples, None


def _target(cfg: ShootingConfig, rho: float) -> float:
    return 1.0 if cfg.target is None else cfg.target(rho)


def flatness(traj: Trajectory, cfg: ShootingConfig) -> float:
    """max |y - target| over [rho_start, flat_window]; inf if it blew up inside."""
    if traj.blowup_rho is not None and traj.blowup_rho <= cfg.flat_window:
        return math.inf
    dev = [abs(y - _target(cfg, r)) for r, y, _ in traj.samples if r <= cfg.flat_window + 1e-12]
    return max(dev) if dev else math.inf


def reach(traj: Trajectory, cfg: ShootingConfig, tol: float = 1e-3) -> float:
    """Largest rho up to which y stays within ``tol`` of the target."""
    last = traj.samples[0][0]
    for r, y, _ in traj.samples:
        if abs(y - _target(cfg, r)) >= tol:
            return last
        last = r
    return last


def integrate(cfg: ShootingConfig) -> Trajectory:
    """Integrate outward and classify the trajectory.

    Undershoot: y runs off to +inf; Overshoot: y runs off to -inf (the
    |y| > 1e6 crossing decides). Flat: within ``flat_tol`` of the target
    over the flat window. Anything else is Indeterminate.
    """
    if cfg.dps is None:
        samples, blowup = _integrate_double(cfg, cfg.bch())
    else:
        samples, blowup = _integrate_mp(cfg)
    end = samples[-1]
    end_value = end[1] - _target(cfg, end[0])
    traj = Trajectory(samples=samples, classification=Classification.Indeterminate,
                      blowup_rho=blowup, end_value=end_value)
    if blowup is not None:
        traj.classification = Classification.Undershoot if end[1] > 0 else Classification.Overshoot
    elif flatness(traj, cfg) < cfg.flat_tol:
        traj.classification = Classification.Flat
    return traj


def _side(traj: Trajectory) -> int:
    if traj.classification is Classification.Undershoot:
        return 1
    if traj.classification is Classification.Overshoot:
        return -1
    if traj.classification is Classification.Flat:
        return 0
    return 1 if traj.end_value > 0 else -1 if traj.end_value < 0 else 0


@dataclass
class BisectionReport:
    E_star: Fraction
    E_lo: Fraction
    E_hi: Fraction
    iterations: int
    decades: List[dict] = field(default_factory=list)  # per 10x shrink of the bracket
    exact_hit: bool = False

    def E_star_decimal(self, digits: int = 25) -> str:
        with mpmath.workdps(digits + 5):
            v = mpmath.mpf(self.E_star.numerator) / self.E_star.denominator
            return mpmath.nstr(v, digits)

    @property
    def flatness(self) -> List[float]:
        return [d["flatness"] for d in self.decades]

    @property
    def saturation_rho(self) -> List[float]:
        return [d["reach_rho"] for d in self.decades]

    def saturated(self, last: int = 5, factor: float = 0.5) -> bool:
        """True when flatness failed to improve by ``factor`` over the last decades."""
        f = self.flatness
        if len(f) < last + 1:
            return False
        old, new = f[-last - 1], f[-1]
        return not (new < factor * old)

    def to_json(self, digits: int = 25) -> str:
        return json.dumps({
            "E_star_decimal": self.E_star_decimal(digits),
            "digits": digits,
            "iterations": self.iterations,
            "exact_hit": self.exact_hit,
            "saturation_rho": [round(r, 6) for r in self.saturation_rho],
            "flatness": [None if math.isinf(f) else float(format(f, ".6g")) for f in self.flatness],
        })


def bisect_energy(template: ShootingConfig, E_lo, E_hi, max_iter: int = 60,
                  reach_tol: float = 1e-3) -> BisectionReport:
    """Bisect E_trial between two differently classified energies.

    E is bisected exactly in rationals. Each time the bracket shrinks by
    another factor of 10 the flatness (worse of the two endpoints) and the
    reach in rho are recorded.
    """
    lo, hi = to_fraction(E_lo), to_fraction(E_hi)
    t_lo = integrate(template.with_energy(lo))
    t_hi = integrate(template.with_energy(hi))
    s_lo, s_hi = _side(t_lo), _side(t_hi)
    if s_lo == 0:
        return BisectionReport(lo, lo, lo, 0, exact_hit=True)
    if s_hi == 0:
        return BisectionReport(hi, hi, hi, 0, exact_hit=True)
    if s_lo == s_hi:
        raise SameClassification(
            f"E={float(lo)} and E={float(hi)} are both {t_lo.classification.value}")
    width0 = hi - lo
    report = BisectionReport(E_star=(lo + hi) / 2, E_lo=lo, E_hi=hi, iterations=0)
    next_decade = 1
    for it in range(1, max_iter + 1):
        mid = (lo + hi) / 2
        t_mid = integrate(template.with_energy(mid))
        s = _side(t_mid)
        if s == 0:
            report.E_star, report.E_lo, report.E_hi = mid, mid, mid
            report.iterations, report.exact_hit = it, True
            report.decades.append({"decade": next_decade, "flatness": flatness(t_mid, template),
                                   "reach_rho": reach(t_mid, template, reach_tol)})
            return report
        if s == s_lo:
            lo, t_lo = mid, t_mid
        else:
            hi, t_hi = mid, t_mid
        while hi - lo <= width0 / 10 ** next_decade:
            report.decades.append({
                "decade": next_decade,
                "flatness": max(flatness(t_lo, template), flatness(t_hi, template)),
                "reach_rho": max(reach(t_lo, template, reach_tol), reach(t_hi, template, reach_tol)),
            })
            next_decade += 1
        report.iterations = it
    report.E_star, report.E_lo, report.E_hi = (lo + hi) / 2, lo, hi
    return report


def scan_for_bracket(template: ShootingConfig, E_min, E_max, n: int = 57):
    """First adjacent pair of a uniform E grid whose sides differ."""
    Es = [to_fraction(E_min) + (to_fraction(E_max) - to_fraction(E_min)) * k / (n - 1)
          for k in range(n)]
    prev = None
    for E in Es:
        s = _side(integrate(template.with_energy(E)))
        if s == 0:
            return E, E
        if prev is not None and s != prev[1]:
            return prev[0], E
        prev = (E, s)
    raise SameClassification(f"no sign change of the trajectory side on [{E_min}, {E_max}]")


def demonstrate_two_parameter_failure(a, b, c_wrong, window: float = 6.0, digits: int = 12,
                                      L: int = 0, E_range=(5, 12)) -> dict:
    """Compare bisection with a mistuned c against the tuned and two-term controls.

    Returns the limit E and the per-decade reach in rho for three runs: the
    given (a, b, c_wrong), the tuned c = b(L+1)/a and the a = b = 0 equation
    at c_wrong (xi variable).
    """
    a, b, c_wrong = to_fraction(a), to_fraction(b), to_fraction(c_wrong)
    iters = int(math.ceil(digits * math.log2(10))) + 4
    out = {}
    runs = [("three_term", a, b, c_wrong, "rho")]
    if a != 0:
        runs.append(("tuned_control", a, b, b * (L + 1) / a, "rho"))
    runs.append(("two_term_control", Fraction(0), Fraction(0), c_wrong, "xi"))
    for name, aa, bb, cc, var in runs:
        cfg = ShootingConfig(params=PhysicalParams(a=aa, b=bb, c=cc, L=L, E=0), E_trial=0,
                             ic_mode=ICMode.PaperFlat, variable=var, flat_window=window,
                             rho_max=max(8.0, window))
        lo, hi = scan_for_bracket(cfg, *E_range)
        rep = bisect_energy(cfg, lo, hi, max_iter=iters)
        out[name] = {
            "c": str(cc),
            "E_star": rep.E_star_decimal(min(digits + 3, 25)),
            "saturation_rho": rep.saturation_rho,
            "flatness": rep.flatness,
            "saturated": rep.saturated(),
            "exact_hit": rep.exact_hit,
        }
    return out


# reproduction energy lists (c0 = 2.5, E0 = 7.46 for a = 2/5, b = 1)
TABLE1 = [E0_TABLE1 - Fraction(s) for s in (
    "0.19", "0.15", "0.18", "0.16", "0.17553", "0.17552", "0.1755298911", "0.1755298910",
    "0.175529891060062", "0.175529891060061", "0.17552989106006135211",
    "0.1755298910600613521149071")]
TABLE2 = [Fraction(s) for s in ("7.45", "7.461", "7.459", "7.4601", "7.4599", "7.46001",
                                "7.45999", "7.460001", "7.459999", "7.4600001", "7.4599999")]
TABLE3 = [Fraction(s) for s in ("7.4", "7.50", "7.49", "7.501", "7.499", "7.5001", "7.4999",
                                "7.50001")]
TABLE4 = [Fraction(s) for s in ("10.4", "10.6", "10.49", "10.51", "10.499", "10.501", "10.5000")]


def figure_runs(fig: int) -> List[Tuple[str, ShootingConfig]]:
    """(label, config) pairs reproducing the trajectory family of one figure.

    Set 4 is emitted for both c = 2.6 and c = 3.5.
    """
    a, b = Fraction(2, 5), Fraction(1)
    zero = Fraction(0)
    if fig in (1, 2):
        c = Fraction(7, 2) if fig == 1 else Fraction(5, 2)
        energies = TABLE1 if fig == 1 else TABLE2
        base = PhysicalParams(a=a, b=b, c=c, L=0, E=0)
        return [(f"fig{fig}_{i + 1}", ShootingConfig(params=base, E_trial=E, ic_mode=ICMode.PaperFlat,
                                                     dps=40 if fig == 1 and i >= 8 else None))
                for i, E in enumerate(energies)]
    if fig == 3:
        base = PhysicalParams(a=zero, b=zero, c=Fraction(5, 2), L=0, E=0)
        return [(f"fig3_{i + 1}", ShootingConfig(params=base, E_trial=E, ic_mode=ICMode.PaperFlat,
                                                 variable="xi"))
                for i, E in enumerate(TABLE3)]
    if fig == 4:
        runs = []
        for c, tag in ((Fraction(13, 5), "c2.6"), (Fraction(7, 2), "c3.5")):
            base = PhysicalParams(a=zero, b=zero, c=c, L=0, E=0)
            runs += [(f"fig4_{tag}_{i + 1}", ShootingConfig(params=base, E_trial=E,
                                                           ic_mode=ICMode.PaperFlat, variable="xi"))
                     for i, E in enumerate(TABLE4)]
        return runs
    raise ValueError("fig must be 1, 2, 3 or 4")
