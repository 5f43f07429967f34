"""Modified biconfluent Heun equation: parameters, recurrence and mappings.

The equation handled everywhere in the package is

    z y'' + (mu z^2 + eps z + nu) y' + (Omega z + eps*omega) y = 0

with the analytic-at-origin Frobenius solution y = sum d_n z^n, d_0 = 1,
d_1 = A_0 d_0 and d_{n+1} = A_n d_n + B_n d_{n-1}.

Parameters may be exact ``Fraction`` values, floats or mpmath numbers; the
arithmetic simply follows the type of the inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Union

from .errors import DegenerateOmega, NonPositiveTension, ZeroDenominator

Number = Union[int, float, Fraction]


def to_fraction(value) -> Fraction:
    """Parse ``value`` ("p/q", "0.4", int, Fraction or float) exactly.

    Floats go through ``repr`` so ``0.4`` becomes 2/5 rather than the
    nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(str(value).strip())


def exact_sqrt(x):
    """Square root that stays a Fraction when ``x`` is a rational square."""
    if isinstance(x, Fraction) and x >= 0:
        rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
        if rn * rn == x.numerator and rd * rd == x.denominator:
            return Fraction(rn, rd)
        return math.sqrt(x)
    if isinstance(x, (int, float, Fraction)):
        return math.sqrt(x)
    return x ** 0.5


@dataclass(frozen=True)
class ModifiedBCHParams:
    """The five scalars of the modified BCH equation.

    ``eps_omega`` (the product eps*omega) is stored instead of omega so that
    eps = 0 limits stay representable; ``omega`` is derived on demand.
    """

    mu: Number
    epsilon: Number
    nu: Number
    Omega: Number
    eps_omega: Number

    @classmethod
    def from_omega(cls, mu, epsilon, nu, omega, Omega) -> "ModifiedBCHParams":
        return cls(mu=mu, epsilon=epsilon, nu=nu, Omega=Omega, eps_omega=epsilon * omega)

    @property
    def omega(self):
        if self.epsilon == 0:
            raise DegenerateOmega("epsilon = 0: omega is undefined, use eps_omega")
        return self.eps_omega / self.epsilon

    def replace(self, **changes) -> "ModifiedBCHParams":
        fields = dict(mu=self.mu, epsilon=self.epsilon, nu=self.nu,
                      Omega=self.Omega, eps_omega=self.eps_omega)
        fields.update(changes)
        return ModifiedBCHParams(**fields)

    def check_denominators(self, nmax: int) -> None:
        """Raise ZeroDenominator if (n+1)(n+nu) vanishes for some 0 <= n <= nmax."""
        for n in range(nmax + 1):
            if (n + 1) * (n + self.nu) == 0:
                raise ZeroDenominator(f"(n+1)(n+nu) = 0 at n={n}, nu={self.nu}")


@dataclass(frozen=True)
class PhysicalParams:
    """Scaled Cornell-type inputs: a, b, c are the tilde quantities.

    ``alpha`` is hbar^2/2m and only enters when converting r to r-tilde.
    """

    a: Fraction
    b: Fraction
    c: Fraction
    L: int
    E: Number
    alpha: Fraction = Fraction(1)

    def __post_init__(self):
        if self.L < 0 or int(self.L) != self.L:
            raise ValueError(f"L must be a non-negative integer, got {self.L}")


@dataclass(frozen=True)
class ScaledParams:
    """Bold-face parameters: A = a/sqrt(c), B = b/c^{3/2}, E_script = E/c."""

    A_bold: Number
    B_bold: Number
    E_script: Number
    L: int


@dataclass(frozen=True)
class SeriesCoefficients:
    d: tuple
    nmax: int

    def __len__(self):
        return len(self.d)

    def __getitem__(self, n):
        return self.d[n]

    @property
    def degree(self) -> int:
        """Index of the last nonzero coefficient (-1 for the zero series)."""
        for n in range(len(self.d) - 1, -1, -1):
            if self.d[n] != 0:
                return n
        return -1


def coeff_A(n: int, p: ModifiedBCHParams):
    """A_n = -(eps n + eps*omega) / ((n+1)(n+nu))."""
    den = Fraction(n + 1) * (n + p.nu)  # stays in Q for int inputs
    if den == 0:
        raise ZeroDenominator(f"(n+1)(n+nu) = 0 at n={n}")
    return -(p.epsilon * n + p.eps_omega) / den


def coeff_B(n: int, p: ModifiedBCHParams):
    """B_n = -(Omega + mu (n-1)) / ((n+1)(n+nu)), n >= 1."""
    if n < 1:
        raise ValueError("B_n is defined for n >= 1")
    den = Fraction(n + 1) * (n + p.nu)  # stays in Q for int inputs
    if den == 0:
        raise ZeroDenominator(f"(n+1)(n+nu) = 0 at n={n}")
    return -(p.Omega + p.mu * (n - 1)) / den


def series_coefficients(p: ModifiedBCHParams, nmax: int, d0=1) -> SeriesCoefficients:
    """Frobenius coefficients d_0..d_nmax of the analytic solution."""
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    p.check_denominators(nmax)
    d = [d0]
    if nmax >= 1:
        d.append(coeff_A(0, p) * d0)
    for n in range(1, nmax):
        d.append(coeff_A(n, p) * d[n] + coeff_B(n, p) * d[n - 1])
    return SeriesCoefficients(d=tuple(d), nmax=nmax)


def evaluate_series(coeffs: SeriesCoefficients | Sequence, z):
    """Horner evaluation of sum d_n z^n."""
    d = coeffs.d if isinstance(coeffs, SeriesCoefficients) else coeffs
    acc = 0
    for dn in reversed(d):
        acc = acc * z + dn
    return acc


def evaluate_series_derivative(coeffs: SeriesCoefficients | Sequence, z):
    d = coeffs.d if isinstance(coeffs, SeriesCoefficients) else coeffs
    acc = 0
    for n in range(len(d) - 1, 0, -1):
        acc = acc * z + n * d[n]
    return acc


def ode_residual_coefficients(p: ModifiedBCHParams, d: Sequence) -> list:
    """Power-series coefficients of the ODE left-hand side for y = sum d_n z^n.

    The result has length len(d) + 1 (highest power nmax + 1).
    """
    nmax = len(d) - 1
    out = [0] * (nmax + 2)
    for n, dn in enumerate(d):
        # z y'' -> n(n-1) d_n z^{n-1}; nu y' -> nu n d_n z^{n-1}
        if n >= 1:
            out[n - 1] += (n * (n - 1) + p.nu * n) * dn
            out[n] += p.epsilon * n * dn
            out[n + 1] += p.mu * n * dn
        out[n] += p.eps_omega * dn
        out[n + 1] += p.Omega * dn
    return out


def map_cornell(p: PhysicalParams) -> ModifiedBCHParams:
    """BCH parameters of the rho-equation for V = c r^2 + b r - a/r.

    eps*omega = (a c - b(L+1)) / c^{3/2}; the numerator is formed first so it
    is exactly zero at c = b(L+1)/a for rational inputs.
    """
    a, b, c, L = p.a, p.b, p.c, p.L
    if c <= 0:
        raise ValueError("c must be positive")
    root_c = exact_sqrt(c)
    c32 = c * root_c
    return ModifiedBCHParams(
        mu=-2,
        epsilon=-b / c32,
        nu=2 * (L + 1),
        Omega=(p.E + b * b / (4 * c * c) - (2 * L + 3) * c) / c,
        eps_omega=(a * c - b * (L + 1)) / c32,
    )


def scale(p: PhysicalParams) -> ScaledParams:
    """Bold-face parameters from the tilde ones."""
    if p.c <= 0:
        raise ValueError("c must be positive")
    root_c = exact_sqrt(p.c)
    return ScaledParams(A_bold=p.a / root_c, B_bold=p.b / (p.c * root_c),
                        E_script=p.E / p.c, L=p.L)


def map_scaled(s: ScaledParams) -> ModifiedBCHParams:
    L = s.L
    return ModifiedBCHParams(
        mu=-2,
        epsilon=-s.B_bold,
        nu=2 * (L + 1),
        Omega=s.E_script + s.B_bold * s.B_bold / 4 - (2 * L + 3),
        eps_omega=s.A_bold - s.B_bold * (L + 1),
    )


def map_quark(m, b, E, L: int) -> ModifiedBCHParams:
    """Parameters of the scalar-confinement quark equation in r."""
    if b <= 0:
        raise NonPositiveTension(f"tension b must be positive, got {b}")
    return ModifiedBCHParams(
        mu=-b,
        epsilon=-2 * m,
        nu=2 * (L + 1),
        Omega=E * E / 4 - b * (L + Fraction(3, 2)),
        eps_omega=-2 * m * (L + 1),
    )


def to_confluent(p: ModifiedBCHParams) -> ModifiedBCHParams:
    """Rewrite an eps = eps*omega = 0 equation in xi = z^2.

    Gives xi y'' + ((1+nu)/2 + mu xi/2) y' + (Omega/4) y = 0, which is the
    confluent hypergeometric equation (a two-term recurrence).
    """
    if p.epsilon != 0 or p.eps_omega != 0:
        raise ValueError("xi = z^2 reduction needs eps = eps*omega = 0")
    half = Fraction(1, 2)
    return ModifiedBCHParams(mu=0, epsilon=p.mu * half, nu=(1 + p.nu) * half,
                             Omega=0, eps_omega=p.Omega / 4)
