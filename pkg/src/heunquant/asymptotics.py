"""Large-z behaviour of non-terminating solutions and the amplitude constant.

A non-polynomial solution grows like

    y(z) ~ A z~^(Omega/2mu - gamma) exp(z~),   z~ = -mu z^2 / 2,

up to a further factor exp(-eps z) that the leading balance
z S'^2 + (mu z^2 + eps z) S' = 0 also produces. ``verify_growth`` divides
that factor out before testing for a constant ratio and reports the drift
of the ratio without it separately.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import mpmath

from .core import ModifiedBCHParams
from .errors import NonConvergent, SummationUnreliable, ZeroMu


def _mp(v):
    if hasattr(v, "numerator") and hasattr(v, "denominator") and not isinstance(v, float):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


@dataclass(frozen=True)
class AsymptoticParams:
    mu: float
    epsilon: float
    gamma: float
    growth_exponent: float

    @classmethod
    def from_bch(cls, p: ModifiedBCHParams) -> "AsymptoticParams":
        return cls(mu=float(p.mu), epsilon=float(p.epsilon), gamma=(1 + float(p.nu)) / 2,
                   growth_exponent=float(growth_exponent(p)))

    def zTilde_of(self, z):
        return -self.mu * z * z / 2

    def epsTilde_of(self, z):
        return -self.epsilon * z / 2


def growth_exponent(p: ModifiedBCHParams):
    """Omega/(2 mu) - gamma with gamma = (1 + nu)/2."""
    if p.mu == 0:
        raise ZeroMu("mu = 0: no Gaussian growth law")
    return p.Omega / (2 * p.mu) - (1 + p.nu) / 2


def _series_sum(p, z, tol, nmax):
    """sum d_n z^n with a tail check; returns (value, last_term_ratio)."""
    mu, eps, nu, Om, ew = (_mp(v) for v in (p.mu, p.epsilon, p.nu, p.Omega, p.eps_omega))
    d_prev, d = mpmath.mpf(1), -ew / nu
    total = 1 + d * z
    zn = z
    peak = max(abs(total), 1)
    quiet = 0
    for n in range(1, nmax):
        den = (n + 1) * (n + nu)
        d_prev, d = d, -(eps * n + ew) / den * d - (Om + mu * (n - 1)) / den * d_prev
        zn *= z
        term = d * zn
        total += term
        peak = max(peak, abs(term))
        if abs(term) < tol * max(abs(total), 1) and n > 10:
            quiet += 1
            if quiet >= 4:
                return total, peak
        else:
            quiet = 0
    raise SummationUnreliable(f"series terms have not decayed after {nmax} terms at z={float(z)}")


@dataclass
class GrowthReport:
    exponent: float
    ratio_samples: List[Tuple[float, float]]  # with the exp(-eps z) factor removed
    bare_ratio_samples: List[Tuple[float, float]]  # z~^exponent exp(z~) only
    stabilized: bool
    spread: float  # (max - min)/|mean| of the ratio over the upper half-window
    bare_log_drift: float  # d ln(bare ratio)/dz over the upper half-window, ~ -eps
    diverges: bool  # exp(z~) grows, i.e. mu < 0
    decaying: bool  # ratio falls steadily: the terminating (polynomial) branch
    A_truncated: Optional[float] = None
    tail_estimate: Optional[float] = None

    def to_json(self) -> str:
        return json.dumps({
            "exponent": self.exponent,
            "ratio_samples": [[z, r] for z, r in self.ratio_samples],
            "bare_ratio_samples": [[z, r] for z, r in self.bare_ratio_samples],
            "stabilized": self.stabilized,
            "spread": self.spread,
            "bare_log_drift": self.bare_log_drift,
            "diverges": self.diverges,
            "polynomial_branch": self.decaying,
            "A_truncated": self.A_truncated,
            "tail_estimate": self.tail_estimate,
        })


def verify_growth(p: ModifiedBCHParams, z_lo: float, z_hi: float, samples: int = 9,
                  band: float = 0.05, nmax: int = 20000) -> GrowthReport:
    """Check that y(z) / (z~^k exp(z~ - eps z)) settles to a constant.

    The series is summed in extended precision; the working precision grows
    with the size of exp(z~) so cancellation between terms is absorbed.
    """
    k = growth_exponent(p)
    mu = float(p.mu)
    dps = 30 + int(abs(mu) * z_hi * z_hi / 2 / math.log(10)) + int(abs(float(p.epsilon)) * z_hi / 2.3)
    zs = [z_lo + (z_hi - z_lo) * i / (samples - 1) for i in range(samples)]
    ratios, bare = [], []
    with mpmath.workdps(dps):
        tol = mpmath.mpf(10) ** (-(dps - 10))
        kk, eps = _mp(k), _mp(p.epsilon)
        for z in zs:
            zm = _mp(z)
            y, peak = _series_sum(p, zm, tol, nmax)
            if peak * mpmath.mpf(10) ** (-(dps - 15)) > abs(y) and y != 0:
                raise SummationUnreliable(f"cancellation too severe at z={z}")
            zt = -_mp(p.mu) * zm * zm / 2
            base = zt ** kk * mpmath.exp(zt)
            bare.append((z, float(y / base)))
            ratios.append((z, float(y / (base * mpmath.exp(-eps * zm)))))
    upper = [r for z, r in ratios if z >= (z_lo + z_hi) / 2]
    mean = sum(upper) / len(upper)
    spread = (max(upper) - min(upper)) / abs(mean) if mean != 0 else math.inf
    up_bare = [(z, r) for z, r in bare if z >= (z_lo + z_hi) / 2]
    drift = math.nan
    if len(up_bare) >= 2 and all(r != 0 for _, r in up_bare) and \
            all((r > 0) == (up_bare[0][1] > 0) for _, r in up_bare):
        (z1, r1), (z2, r2) = up_bare[0], up_bare[-1]
        drift = (math.log(abs(r2)) - math.log(abs(r1))) / (z2 - z1)
    mags = [abs(r) for _, r in ratios]
    decaying = all(b < a for a, b in zip(mags, mags[1:])) and mags[-1] < band * mags[0]
    return GrowthReport(exponent=float(k), ratio_samples=ratios, bare_ratio_samples=bare,
                        stabilized=bool(spread < band) and not decaying, spread=float(spread),
                        bare_log_drift=drift, diverges=mu < 0, decaying=decaying)


def _F_ratio(a, k, j, gamma):
    """F_k(j+1)/F_k(j) for F_k(i) = (a + k/2)_i / ((1 + k/2)_i (gamma + k/2)_i)."""
    h = mpmath.mpf(k) / 2
    return (a + h + j) / ((1 + h + j) * (gamma + h + j))


def _w(k, i, omega, gamma):
    h = mpmath.mpf(k) / 2
    return (i + h + omega / 2) / ((i + h + mpmath.mpf(1) / 2) * (i + h + gamma - mpmath.mpf(1) / 2))


def _v(n, i, omega, gamma, a):
    h = mpmath.mpf(n) / 2
    return (i + h + omega / 2 - mpmath.mpf(1) / 2) * mpmath.gamma(i + h) \
        * mpmath.gamma(i + h - 1 + gamma) * mpmath.rgamma(i + h + a)


def _shell(n, a, gamma, omega, i_max):
    """Inner multi-sum of the n-th outer shell, all indices truncated at i_max."""
    idx = range(i_max + 1)
    # innermost level k = n-1: G(j) = sum_{i >= j} v_n(i) F_{n-1}(i)/F_{n-1}(j)
    G = [mpmath.mpf(0)] * (i_max + 2)
    for j in range(i_max, -1, -1):
        G[j] = _v(n, j, omega, gamma, a) + _F_ratio(a, n - 1, j, gamma) * G[j + 1]
    # middle levels k = n-2 .. 1 with weights w_k
    for k in range(n - 2, 0, -1):
        H = [mpmath.mpf(0)] * (i_max + 2)
        for j in range(i_max, -1, -1):
            H[j] = _w(k, j, omega, gamma) * G[j] + _F_ratio(a, k, j, gamma) * H[j + 1]
        G = H
    # outer index i_0 with weight F_0(i_0), and w_0 unless n == 1
    total = mpmath.mpf(0)
    F0 = mpmath.mpf(1)
    for i in idx:
        weight = G[i] if n == 1 else _w(0, i, omega, gamma) * G[i]
        total += F0 * weight
        F0 *= _F_ratio(a, 0, i, gamma)
    return total


def amplitude_truncated(p: ModifiedBCHParams, n_terms: int, i_max: int = 200,
                        dps: int = 30) -> Tuple[float, float]:
    """Truncated amplitude: outer shells n <= n_terms, inner indices <= i_max.

    Returns (value, |last shell|). The inner sums are not known to converge,
    so the value depends on i_max; only truncation behaviour is reported.
    """
    if p.mu == 0:
        raise ZeroMu("mu = 0")
    with mpmath.workdps(dps):
        mu, eps, nu, Om = (_mp(v) for v in (p.mu, p.epsilon, p.nu, p.Omega))
        gamma = (1 + nu) / 2
        a = Om / (2 * mu)
        value = mpmath.gamma(gamma) * mpmath.rgamma(a)
        tail = abs(value)
        if n_terms == 0 or eps == 0:
            return float(value), float(tail if n_terms == 0 else 0.0)
        omega = _mp(p.eps_omega) / eps
        s = -eps / mpmath.sqrt(-2 * mu)
        shells = []
        for n in range(1, n_terms + 1):
            term = s ** n * _shell(n, a, gamma, omega, i_max)
            shells.append(abs(term))
            value += term
        if len(shells) >= 3 and shells[-1] > shells[-2] > shells[-3]:
            raise NonConvergent(f"outer shells grow: {[mpmath.nstr(x, 3) for x in shells[-3:]]}")
        value = mpmath.re(value) if isinstance(value, mpmath.mpc) else value
        return float(value), float(shells[-1])
