"""Dense univariate polynomials over Q and Z as ascending coefficient lists.

Small on purpose: only what the characteristic-polynomial builder and the
root isolator need. Lists are never mutated in place by these helpers.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import List, Sequence, Tuple


def trim(p: Sequence) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p: Sequence) -> int:
    return len(trim(p)) - 1


def add(p: Sequence, q: Sequence) -> list:
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def scale(p: Sequence, k) -> list:
    return trim([k * c for c in p])


def mul(p: Sequence, q: Sequence) -> list:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def derivative(p: Sequence) -> list:
    return trim([i * p[i] for i in range(1, len(p))])


def horner(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def eval_sign_rational(p: Sequence[int], x: Fraction) -> int:
    """Exact sign of an integer polynomial at a rational point.

    Uses the homogenised form sum c_i num^i den^(d-i) so everything stays in
    Python integers.
    """
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    acc, dpow = 0, 1
    for i in range(len(p) - 1, -1, -1):
        acc = acc * num + p[i] * dpow
        dpow *= den
    return (acc > 0) - (acc < 0)


def divmod_poly(p: Sequence, q: Sequence) -> Tuple[list, list]:
    """Polynomial long division over Q."""
    p = [Fraction(c) for c in trim(p)]
    q = [Fraction(c) for c in trim(q)]
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    if len(p) < len(q):
        return [], p
    quot = [Fraction(0)] * (len(p) - len(q) + 1)
    rem = p[:]
    lead = q[-1]
    for k in range(len(p) - len(q), -1, -1):
        coef = rem[k + len(q) - 1] / lead
        quot[k] = coef
        if coef:
            for j, qc in enumerate(q):
                rem[k + j] -= coef * qc
    return trim(quot), trim(rem[: len(q) - 1])


def monic(p: Sequence) -> list:
    p = [Fraction(c) for c in trim(p)]
    return [c / p[-1] for c in p]


def _pseudo_rem(a: List[int], b: List[int]) -> List[int]:
    """Integer pseudo-remainder lc(b)^k a mod b."""
    r = list(a)
    lead, db = b[-1], len(b) - 1
    while len(r) - 1 >= db and r:
        k = len(r) - 1 - db
        coef = r[-1]
        r = [c * lead for c in r]
        for j, bc in enumerate(b):
            r[k + j] -= coef * bc
        r = trim(r)
    return r


def gcd_poly(p: Sequence, q: Sequence) -> list:
    """Monic gcd over Q, computed with a primitive pseudo-remainder sequence."""
    a, b = primitive_int(p), primitive_int(q)
    if not a:
        return monic(b) if b else []
    if len(a) < len(b):
        a, b = b, a
    while b:
        a, b = b, primitive_int(_pseudo_rem(a, b))
    return monic(a)


def primitive_int(p: Sequence) -> List[int]:
    """Scale a rational polynomial to coprime integers with positive leading term."""
    p = [Fraction(c) for c in trim(p)]
    if not p:
        return []
    lcm = reduce(lambda x, y: x * y // math.gcd(x, y), (c.denominator for c in p), 1)
    ints = [int(c * lcm) for c in p]
    g = reduce(math.gcd, (abs(c) for c in ints if c), 0) or 1
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


def squarefree_decomposition(p: Sequence) -> List[Tuple[List[int], int]]:
    """Yun's algorithm: p = const * prod f_i^i with each f_i squarefree.

    Returns [(f_i as primitive integer poly, i)] for the nonconstant factors.
    """
    p = trim(p)
    if degree(p) < 1:
        return []
    out = []
    a = gcd_poly(p, derivative(p))
    b, _ = divmod_poly(p, a)
    c, _ = divmod_poly(derivative(p), a)
    d = add(c, scale(derivative(b), -1))
    i = 1
    while degree(b) >= 1:
        a = gcd_poly(b, d)
        if degree(a) >= 1:
            out.append((primitive_int(a), i))
        b, _ = divmod_poly(b, a)
        c, _ = divmod_poly(d, a)
        d = add(c, scale(derivative(b), -1))
        i += 1
    return out


def taylor_shift(p: Sequence[int], t: int = 1) -> List[int]:
    """Coefficients of p(x + t) by repeated synthetic division."""
    a = list(p)
    n = len(a)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            a[j] += t * a[j + 1]
    return a


def sign_variations(p: Sequence) -> int:
    count, last = 0, 0
    for c in p:
        if c == 0:
            continue
        s = 1 if c > 0 else -1
        if last and s != last:
            count += 1
        last = s
    return count
