"""Exact characteristic polynomials d_{N+1}(x) = 0 for the accessory parameter.

Omega is fixed first by B_{N+1} = 0 (Omega = -mu N); the three-term
recurrence is then run with polynomial-in-x coefficients over Q.

Quantize-c trick: with t = sqrt(c), A_n = alpha_n(c) / t^3 where alpha_n is
linear in c, and B_n is c-free. Putting e_n = t^{3n} d_n gives

    e_{n+1} = alpha_n(c) e_n + B_n c^3 e_{n-1},

a recurrence whose members are honest polynomials in c. So e_{N+1} is
d_{N+1} with the fractional prefactor c^{3(N+1)/2} cleared.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List

from . import polyarith as pa
from .core import to_fraction
from .errors import DegreeZero


class Mode(str, enum.Enum):
    QuantizeC = "c"
    QuantizeB = "B"
    QuantizeTension = "tension"

    @classmethod
    def parse(cls, text) -> "Mode":
        if isinstance(text, cls):
            return text
        key = str(text).strip()
        aliases = {"c": cls.QuantizeC, "quantizec": cls.QuantizeC,
                   "b": cls.QuantizeB, "quantizeb": cls.QuantizeB,
                   "tension": cls.QuantizeTension, "t": cls.QuantizeTension,
                   "quantizetension": cls.QuantizeTension}
        if key == "B":
            return cls.QuantizeB
        try:
            return aliases[key.lower()]
        except KeyError:
            raise ValueError(f"unknown mode {text!r}") from None

    @property
    def variable(self) -> str:
        return {"c": "cTilde", "B": "Bbold", "tension": "bOverM2"}[self.value]

    @property
    def fixed_keys(self) -> tuple:
        return {"c": ("a", "b"), "B": ("A",), "tension": ("m",)}[self.value]


@dataclass(frozen=True)
class QuantizationProblem:
    mode: Mode
    N: int
    L: int
    fixed: Dict[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        if self.N < 0 or self.L < 0:
            raise ValueError("N and L must be non-negative")
        missing = [k for k in self.mode.fixed_keys if k not in self.fixed]
        if missing:
            raise ValueError(f"mode {self.mode.value} needs fixed parameters {missing}")
        object.__setattr__(self, "fixed",
                           {k: to_fraction(self.fixed[k]) for k in self.mode.fixed_keys})
        if self.mode is Mode.QuantizeTension and self.fixed["m"] == 0:
            raise ValueError("quark mass m must be nonzero: b/m^2 is the accessory variable")


@dataclass(frozen=True)
class CharPolynomial:
    coeffs: tuple  # ascending, coprime integers, positive leading coefficient
    variable: str
    clearing_power: int  # power of sqrt(c) multiplied in (quantize-c only)
    problem: QuantizationProblem

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return pa.horner(self.coeffs, x)

    def to_json(self) -> str:
        q = self.problem
        return json.dumps({
            "mode": q.mode.value,
            "N": q.N,
            "L": q.L,
            "fixed": {k: str(v) for k, v in q.fixed.items()},
            "variable": self.variable,
            "coeffs": [str(c) for c in self.coeffs],
            "clearing_power": self.clearing_power,
        })

    @classmethod
    def from_json(cls, text: str) -> "CharPolynomial":
        doc = json.loads(text)
        q = QuantizationProblem(Mode.parse(doc["mode"]), int(doc["N"]), int(doc["L"]),
                                {k: Fraction(v) for k, v in doc["fixed"].items()})
        return cls(coeffs=tuple(int(c) for c in doc["coeffs"]), variable=q.mode.variable,
                   clearing_power=int(doc["clearing_power"]), problem=q)


def quantized_Omega(N: int, mu):
    """Omega making B_{N+1} vanish: Omega + mu N = 0."""
    if N < 0:
        raise ValueError("N must be >= 0")
    return -mu * N


def _recurrence_terms(q: QuantizationProblem):
    """Yield (alpha_n, beta_n) as polynomials in x for n = 0..N.

    e_{n+1} = alpha_n e_n + beta_n e_{n-1}; beta_0 is irrelevant (e_{-1} = 0).
    """
    N, L = q.N, q.L
    nu = 2 * (L + 1)
    for n in range(N + 1):
        den = Fraction(1, (n + 1) * (n + nu))
        if q.mode is Mode.QuantizeC:
            a, b = q.fixed["a"], q.fixed["b"]
            # -(eps n + eps*omega) t^3 = b(n+L+1) - a c
            alpha = [b * (n + L + 1) * den, -a * den]
            # B_n with Omega = 2N, times c^3
            beta = [0, 0, 0, -Fraction(2 * N - 2 * (n - 1)) * den]
        elif q.mode is Mode.QuantizeB:
            A = q.fixed["A"]
            alpha = [-A * den, (n + L + 1) * den]
            beta = [-Fraction(2 * N - 2 * (n - 1)) * den]
        else:
            # m scaled out: d_n = m^n f_n(b/m^2)
            alpha = [Fraction(2 * (n + L + 1)) * den]
            beta = [0, -Fraction(N - n + 1) * den]
        yield pa.trim(alpha), pa.trim(beta)


def raw_charpoly(q: QuantizationProblem) -> List[Fraction]:
    """e_{N+1}(x) over Q before content normalisation."""
    prev, cur = [], [Fraction(1)]
    for n, (alpha, beta) in enumerate(_recurrence_terms(q)):
        nxt = pa.mul(alpha, cur)
        if n >= 1:
            nxt = pa.add(nxt, pa.mul(beta, prev))
        prev, cur = cur, nxt
    return cur


def build_charpoly(q: QuantizationProblem) -> CharPolynomial:
    """Integer characteristic polynomial of ``q``; raises DegreeZero if constant."""
    raw = raw_charpoly(q)
    if pa.degree(raw) < 1:
        why = "identically zero" if not raw else f"constant {raw[0]}"
        hint = ""
        if q.mode is Mode.QuantizeTension and q.N == 0:
            hint = " (d_1 = m d_0 != 0: no solution as N=0)"
        elif q.mode is Mode.QuantizeC and not raw:
            hint = " (c is a free variable, not a quantized value)"
        raise DegreeZero(f"characteristic polynomial is {why}{hint}")
    clearing = 3 * (q.N + 1) if q.mode is Mode.QuantizeC else 0
    return CharPolynomial(coeffs=tuple(pa.primitive_int(raw)), variable=q.mode.variable,
                          clearing_power=clearing, problem=q)


def degree_bound(mode: Mode, N: int) -> int:
    """Degree law: ceil(3(N+1)/2), N+1 and floor((N+1)/2) per mode."""
    mode = Mode.parse(mode)
    if mode is Mode.QuantizeC:
        return -(-3 * (N + 1) // 2)
    if mode is Mode.QuantizeB:
        return N + 1
    return (N + 1) // 2
