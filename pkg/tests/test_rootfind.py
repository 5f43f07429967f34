from __future__ import annotations

from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heunquant.charpoly import QuantizationProblem, build_charpoly
from heunquant.errors import NoSignChange
from heunquant.polyarith import eval_sign_rational
from heunquant.rootfind import RootSet, find_roots, isolate_real_roots, refine_root


def charpoly(mode, N, L, **fixed):
    return build_charpoly(QuantizationProblem(mode, N, L, fixed))


def _mpq(v):
    v = Fraction(v)
    return mpmath.mpf(v.numerator) / v.denominator


def radical_N1_L0(a, b):
    """Cardano root of the N=1, L=0 cubic in c."""
    a, b = _mpq(a), _mpq(b)
    X = a ** 6 - 54 * a ** 3 * b + 432 * b ** 2 + 6 * b * mpmath.sqrt(mpmath.mpc(5184 * b ** 2 - 3 * a ** 6))
    c = (a ** 2 + (a ** 4 - 36 * a * b) * X ** (-mpmath.mpf(1) / 3) + X ** (mpmath.mpf(1) / 3)) / 12
    return float(mpmath.re(c))


def radical_N1_L1(a, b):
    a, b = _mpq(a), _mpq(b)
    X = (a ** 6 - 180 * a ** 3 * b + 5184 * b ** 2
         + 12 * mpmath.sqrt(3) * b * mpmath.sqrt(mpmath.mpc(62208 * b ** 2 - 320 * a ** 3 * b - a ** 6)))
    c = (a ** 2 + (a ** 4 - 120 * a * b) * X ** (-mpmath.mpf(1) / 3) + X ** (mpmath.mpf(1) / 3)) / 24
    return float(mpmath.re(c))


def test_linear():
    rs = find_roots([-1, 10])
    assert len(rs) == 1 and rs.roots[0].lo <= Fraction(1, 10) <= rs.roots[0].hi


def test_c_roots_N10():
    rs = find_roots(charpoly("c", 10, 10, a=1, b=Fraction(1, 10)))
    pos = [r.value for r in rs.positive()]
    printed = [0.0744463, 0.086344, 0.104144, 0.13491, 0.20725, 1.57137]
    assert len(pos) == 6
    for got, want in zip(pos, printed):
        decimals = len(str(want).split(".")[1])
        assert round(got, decimals) == want


def test_B_and_tension_counts_N10():
    assert len(find_roots(charpoly("B", 10, 10, A=1))) == 11
    assert len(find_roots(charpoly("tension", 10, 10, m=1))) == 5


@pytest.mark.parametrize("a,b", [(Fraction(2, 5), 1), (1, Fraction(1, 10))])
def test_N1_L0_matches_radical(a, b):
    rs = find_roots(charpoly("c", 1, 0, a=a, b=b))
    assert abs(rs.positive()[0].value - radical_N1_L0(a, b)) < 1e-10


@pytest.mark.parametrize("a,b", [(Fraction(2, 5), 1), (1, Fraction(1, 10)), (1, Fraction(1, 100))])
def test_N1_L1_matches_radical(a, b):
    rs = find_roots(charpoly("c", 1, 1, a=a, b=b))
    assert min(abs(r.value - radical_N1_L1(a, b)) for r in rs.positive()) < 1e-10


def test_radical_branch_is_largest_root_for_small_b():
    # with three positive roots the principal Cardano branch lands on the largest
    rs = find_roots(charpoly("c", 1, 0, a=1, b=Fraction(1, 100)))
    pos = rs.positive()
    assert len(pos) == 3
    assert abs(pos[-1].value - radical_N1_L0(1, Fraction(1, 100))) < 1e-10


def test_double_root():
    rs = find_roots([4, -4, 1])
    assert len(rs) == 1
    r = rs.roots[0]
    assert r.multiplicity == 2 and abs(r.value - 2) < 1e-12


def test_enclosure_width_and_soundness():
    p = charpoly("c", 10, 10, a=1, b=Fraction(1, 10))
    rs = find_roots(p, precision=1e-12)
    for r in rs:
        assert r.hi - r.lo <= Fraction(2e-12)
        if not r.is_exact:
            assert eval_sign_rational(p.coeffs, r.lo) * eval_sign_rational(p.coeffs, r.hi) < 0
    for r1, r2 in zip(rs.roots, rs.roots[1:]):
        assert r1.hi < r2.lo


def test_refine_root_and_defensive_error():
    p = charpoly("tension", 10, 10, m=1)
    enc = isolate_real_roots(p)[0]
    assert abs(refine_root(p, enc) - 0.366018460134) < 1e-11
    assert refine_root(p, enc, accelerate=False) == pytest.approx(0.366018460134, abs=1e-11)
    with pytest.raises(NoSignChange):
        refine_root([1, 0, 1], (Fraction(0), Fraction(1)))


def test_determinism_and_json():
    p = charpoly("B", 8, 3, A=Fraction(1, 50))
    a, b = find_roots(p), find_roots(p)
    assert a == b
    back = RootSet.from_json(a.to_json())
    assert back.roots == a.roots and back.poly_ref == "B:N=8:L=3:A=1/50"


def test_degree_25_c():
    rs = find_roots(charpoly("c", 25, 0, a=1, b=Fraction(1, 10)))
    assert rs.positive()


@pytest.mark.parametrize("A", [1, Fraction(1, 50), Fraction(5, 2)])
def test_B_has_N_plus_1_real_roots(A):
    for N in range(13):
        for L in (0, 4):
            assert len(find_roots(charpoly("B", N, L, A=A))) == N + 1


def _oracle_roots(coeffs):
    """Real roots with multiplicity: companion eigenvalues polished in high precision."""
    with mpmath.workdps(60):
        zs = mpmath.polyroots(list(reversed(coeffs)), maxsteps=400, extraprec=400)
        return sorted(float(mpmath.re(z)) for z in zs if abs(mpmath.im(z)) < mpmath.mpf(10) ** -25)


@settings(max_examples=60, deadline=None)
@given(roots=st.lists(st.integers(-6, 6), min_size=1, max_size=4),
       quad=st.lists(st.tuples(st.integers(-5, 5), st.integers(1, 9)), max_size=2),
       lead=st.integers(1, 5))
def test_constructed_roots_recovered(roots, quad, lead):
    # rational roots r/3 (possibly repeated) times irreducible-ish quadratics x^2 + px + q
    coeffs = [lead]
    def mul(p, q):
        out = [0] * (len(p) + len(q) - 1)
        for i, x in enumerate(p):
            for j, y in enumerate(q):
                out[i + j] += x * y
        return out
    for r in roots:
        coeffs = mul(coeffs, [-r, 3])
    for pq in quad:
        coeffs = mul(coeffs, [pq[1], pq[0], 1])
    rs = find_roots(coeffs)
    got = sorted(v for r in rs for v in [r.value] * r.multiplicity)
    want = sorted([r / 3 for r in roots] + [
        x for p, q in quad if p * p - 4 * q >= 0
        for x in ((-p - np.sqrt(p * p - 4 * q)) / 2, (-p + np.sqrt(p * p - 4 * q)) / 2)])
    assert len(got) == len(want)
    assert np.allclose(got, want, atol=1e-8)


@settings(max_examples=80, deadline=None)
@given(coeffs=st.lists(st.integers(-20, 20), min_size=2, max_size=9).filter(lambda c: c[-1] != 0))
def test_random_polynomials_vs_oracle(coeffs):
    rs = find_roots(coeffs)
    got = sorted(v for r in rs for v in [r.value] * r.multiplicity)
    want = _oracle_roots(coeffs)
    assert len(got) == len(want)
    assert np.allclose(got, want, rtol=0, atol=1e-8)
    # dense sampling: every sign change of p on a fine grid lies near a certified root
    xs = np.linspace(-25, 25, 20001)
    ys = np.polyval(list(reversed(coeffs)), xs)
    for k in np.nonzero(np.sign(ys[:-1]) * np.sign(ys[1:]) < 0)[0]:
        assert any(xs[k] - 1e-9 <= v <= xs[k + 1] + 1e-9 for v in got)
