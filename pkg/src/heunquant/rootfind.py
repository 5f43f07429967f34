"""Certified real-root isolation and refinement for integer polynomials.

Isolation is Descartes' rule of signs with interval bisection
(Collins-Akritas) after a squarefree decomposition; every enclosure has
exact rational endpoints. Refinement shrinks enclosures using exact sign
evaluations only, so a float Newton guess can speed things up but never
decide anything.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import polyarith as pa
from .errors import NoSignChange

DEFAULT_PRECISION = 1e-12


@dataclass(frozen=True)
class RootEnclosure:
    lo: Fraction
    hi: Fraction
    multiplicity: int = 1

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def value(self) -> float:
        return float(self.midpoint)

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class RootSet:
    roots: Tuple[RootEnclosure, ...]
    poly_ref: str = ""
    precision: float = DEFAULT_PRECISION

    @property
    def values(self) -> List[float]:
        return [r.value for r in self.roots]

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def positive(self) -> List[RootEnclosure]:
        return [r for r in self.roots if r.lo > 0]

    def to_json(self) -> str:
        return json.dumps({
            "poly_ref": self.poly_ref,
            "precision": self.precision,
            "roots": [
                {"lo": str(r.lo), "hi": str(r.hi), "multiplicity": r.multiplicity,
                 "midpoint": decimal_string(r.midpoint, 20)}
                for r in self.roots
            ],
        })

    @classmethod
    def from_json(cls, text: str) -> "RootSet":
        doc = json.loads(text)
        roots = tuple(RootEnclosure(Fraction(r["lo"]), Fraction(r["hi"]), int(r["multiplicity"]))
                      for r in doc["roots"])
        return cls(roots=roots, poly_ref=doc.get("poly_ref", ""), precision=float(doc["precision"]))


def decimal_string(x: Fraction, digits: int = 12) -> str:
    """``x`` rounded to ``digits`` significant digits, as a plain string."""
    x = Fraction(x)
    with localcontext() as ctx:
        ctx.prec = digits
        val = Decimal(x.numerator) / Decimal(x.denominator)
    return format(val, "g") if val != 0 else "0"


def _coeffs(p) -> List[int]:
    return list(getattr(p, "coeffs", p))


def _cauchy_bound_pow2(p: Sequence[int]) -> int:
    """Smallest 2^k strictly exceeding the Cauchy bound 1 + max|a_i/a_d|."""
    lead = abs(p[-1])
    m = max(abs(c) for c in p[:-1]) if len(p) > 1 else 0
    bound = 1 + Fraction(m, lead)
    k = 0
    while 2 ** k <= bound:
        k += 1
    return k


def _isolate_unit(p: List[int], d: int, scale_exp: int, negate: bool = False):
    """Descartes bisection for the roots of ``p`` in (0, 2^scale_exp).

    Yields (lo, hi) pairs; an exact dyadic root r comes back as (r, r).
    ``negate`` flips the result to the negative axis.
    """
    k = scale_exp
    q = [c * (2 ** (k * i)) for i, c in enumerate(p)]
    stack = [(q, 0, 0)]
    found = []
    while stack:
        poly, c, j = stack.pop()
        v = pa.sign_variations(pa.taylor_shift(poly[::-1], 1))
        if v == 0:
            continue
        lo = Fraction(c * 2 ** k, 2 ** j)
        hi = Fraction((c + 1) * 2 ** k, 2 ** j)
        if v == 1:
            found.append((lo, hi))
            continue
        left = [coef * 2 ** (d - i) for i, coef in enumerate(poly)]
        right = pa.taylor_shift(left, 1)
        if right[0] == 0:
            mid = (lo + hi) / 2
            found.append((mid, mid))
        stack.append((right, 2 * c + 1, j + 1))
        stack.append((left, 2 * c, j + 1))
    if negate:
        found = [(-hi, -lo) for lo, hi in found]
    return found


def _isolate_squarefree(f: List[int]) -> List[Tuple[Fraction, Fraction]]:
    """Isolating intervals for every real root of squarefree integer ``f``."""
    f = pa.trim(f)
    out: List[Tuple[Fraction, Fraction]] = []
    if len(f) < 2:
        return out
    if f[0] == 0:
        out.append((Fraction(0), Fraction(0)))
        f = f[1:]
    d = len(f) - 1
    if d == 0:
        return out
    if d == 1:
        r = Fraction(-f[0], f[1])
        return sorted(out + [(r, r)])
    k = _cauchy_bound_pow2(f)
    out += _isolate_unit(f, d, k)
    fneg = [c if i % 2 == 0 else -c for i, c in enumerate(f)]
    out += _isolate_unit(fneg, d, k, negate=True)
    return sorted(out)


def _sign(f: Sequence[int], x: Fraction) -> int:
    return pa.eval_sign_rational(f, x)


def _inner_signs(f: List[int], lo: Fraction, hi: Fraction) -> Tuple[int, int]:
    """Signs of f just inside lo and just inside hi (handles f(endpoint) = 0)."""
    s_lo = _sign(f, lo)
    if s_lo == 0:
        s_lo = _sign(pa.derivative(f), lo)
    s_hi = _sign(f, hi)
    if s_hi == 0:
        s_hi = -_sign(pa.derivative(f), hi)
    return s_lo, s_hi


def _float_newton(f: List[int], df: List[int], x: float) -> Optional[float]:
    try:
        fx = pa.horner([float(c) for c in f], x)
        dfx = pa.horner([float(c) for c in df], x)
    except OverflowError:
        return None
    if dfx == 0 or fx != fx or dfx != dfx:
        return None
    step = fx / dfx
    if step != step or abs(step) == float("inf"):
        return None
    return x - step


def _refine_interval(f: List[int], lo: Fraction, hi: Fraction, precision: float,
                     accelerate: bool = True) -> Tuple[Fraction, Fraction]:
    """Shrink an isolating interval of squarefree ``f`` to half-width <= precision."""
    if lo == hi:
        return lo, hi
    s_lo, s_hi = _inner_signs(f, lo, hi)
    if s_lo == 0 or s_lo == s_hi:
        raise NoSignChange(f"interval [{lo}, {hi}] does not bracket a simple root")
    width = Fraction(precision) * 2
    half_w = Fraction(precision) / 2
    df = pa.derivative(f) if accelerate else None
    step = 0
    while hi - lo > width:
        step += 1
        x = None
        if accelerate and step % 2 == 1:
            guess = _float_newton(f, df, float((lo + hi) / 2))
            if guess is not None:
                gx = Fraction(guess)
                if lo < gx < hi:
                    x = gx
        if x is None:
            x = (lo + hi) / 2
            s = _sign(f, x)
            if s == 0:
                return x, x
            if s == s_lo:
                lo = x
            else:
                hi = x
            continue
        xl, xh = max(lo, x - half_w), min(hi, x + half_w)
        sl, sh = _sign(f, xl), _sign(f, xh)
        if sl == 0 and xl != lo:
            return xl, xl
        if sh == 0 and xh != hi:
            return xh, xh
        if xl != lo and sl != s_lo:
            hi = xl
        elif xh != hi and sh == s_lo:
            lo = xh
        else:
            lo, hi = xl, xh
    return lo, hi


def isolate_real_roots(p) -> List[RootEnclosure]:
    """Disjoint isolating enclosures for the distinct real roots of ``p``.

    ``p`` is a CharPolynomial or an ascending integer/rational coefficient
    list. Multiple roots are isolated once, with their multiplicity.
    """
    coeffs = pa.trim(_coeffs(p))
    if len(coeffs) < 2:
        raise ValueError("polynomial must be nonconstant")
    return [enc for enc, _ in _isolate_with_factors(coeffs)]


def _isolate_with_factors(coeffs) -> List[Tuple[RootEnclosure, List[int]]]:
    items = []
    for f, mult in pa.squarefree_decomposition(coeffs):
        for lo, hi in _isolate_squarefree(f):
            items.append([lo, hi, mult, f])
    items.sort(key=lambda it: (it[0], it[1]))
    # enclosures from different factors may overlap: shrink until disjoint
    changed = True
    while changed:
        changed = False
        for a, b in zip(items, items[1:]):
            if a[1] >= b[0] and not (a[0] == a[1] == b[0] == b[1]):
                for it in (a, b):
                    if it[0] != it[1]:
                        it[0], it[1] = _refine_interval(it[3], it[0], it[1],
                                                        float(it[1] - it[0]) / 4)
                changed = True
        items.sort(key=lambda it: (it[0], it[1]))
    return [(RootEnclosure(lo, hi, mult), f) for lo, hi, mult, f in items]


def refine_root(p, interval, precision: float = DEFAULT_PRECISION,
                accelerate: bool = True) -> float:
    """Refined midpoint of the single simple root of ``p`` in ``interval``."""
    lo, hi = (interval.lo, interval.hi) if isinstance(interval, RootEnclosure) else interval
    f = pa.trim(_coeffs(p))
    lo, hi = _refine_interval(f, Fraction(lo), Fraction(hi), precision, accelerate)
    return float((lo + hi) / 2)


def _clear_endpoint_zeros(P, f, lo, hi):
    """Move enclosure endpoints off roots of the full polynomial P."""
    if lo == hi:
        return lo, hi
    s_lo, _ = _inner_signs(f, lo, hi)
    while _sign(P, hi) == 0:
        m = hi - (hi - lo) / 4
        if _sign(f, m) == s_lo:
            lo = m
        else:
            hi = m
    while _sign(P, lo) == 0:
        m = lo + (hi - lo) / 4
        if _sign(f, m) == s_lo:
            lo = m
        else:
            hi = m
    return lo, hi


def find_roots(p, precision: float = DEFAULT_PRECISION, accelerate: bool = True,
               poly_ref: str = "") -> RootSet:
    """Isolate and refine every real root of ``p`` into a RootSet."""
    coeffs = pa.trim(_coeffs(p))
    if len(coeffs) < 2:
        raise ValueError("polynomial must be nonconstant")
    refined = []
    for enc, f in _isolate_with_factors(coeffs):
        lo, hi = _refine_interval(f, enc.lo, enc.hi, precision, accelerate)
        lo, hi = _clear_endpoint_zeros(coeffs, f, lo, hi)
        refined.append(RootEnclosure(lo, hi, enc.multiplicity))
    if not poly_ref and hasattr(p, "problem"):
        q = p.problem
        poly_ref = f"{q.mode.value}:N={q.N}:L={q.L}:" + ",".join(
            f"{k}={v}" for k, v in q.fixed.items())
    return RootSet(roots=tuple(sorted(refined, key=lambda r: r.lo)), poly_ref=poly_ref,
                   precision=precision)
