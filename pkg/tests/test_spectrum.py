from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from heunquant.charpoly import Mode, QuantizationProblem, build_charpoly
from heunquant.core import coeff_A, coeff_B
from heunquant.errors import NoAdmissibleRoot, ResidualTooLarge
from heunquant.rootfind import find_roots
from heunquant.spectrum import (_bch_params, compute_entry, eigenfunction, eigenvalue,
                                enumerate_spectrum, gap_table, quantize_a_eigenvalue,
                                radial_wavefunction, select_root, spectrum_csv)

C1 = {"a": 1, "b": Fraction(1, 10)}
C2 = {"a": Fraction(2, 5), "b": 1}


def roots(mode, N, L, **fixed):
    return find_roots(build_charpoly(QuantizationProblem(mode, N, L, fixed)))


def test_selection_rules_N10():
    assert select_root("c", roots("c", 10, 10, **C1)) == pytest.approx(0.0744463, abs=5e-8)
    assert select_root("B", roots("B", 10, 10, A=1)) == pytest.approx(4.74264, abs=5e-6)
    assert select_root("tension", roots("tension", 10, 10, m=1), K=0) == pytest.approx(0.366018, abs=5e-7)
    with pytest.raises(NoAdmissibleRoot):
        select_root("tension", roots("tension", 10, 10, m=1), K=5)


def test_eigenvalue_examples():
    assert eigenvalue("c", 2.5, 0, 0, C2) == pytest.approx(7.46, abs=1e-12)
    for A in (1, Fraction(1, 50), Fraction(5, 2)):
        e = compute_entry("B", 0, 0, {"A": A})
        assert e.selected_root == pytest.approx(float(A), abs=1e-12)
        assert e.eigenvalue == pytest.approx(3 - float(A) ** 2 / 4, abs=1e-12)
    assert eigenvalue("c", 0.3, 4, 2, {"a": 1, "b": 0}) == pytest.approx(2 * 0.3 * 7.5)
    assert eigenvalue("tension", 0.25, 3, 1, {"m": 1}) == pytest.approx(4 * 0.25 * 5.5)
    assert quantize_a_eigenvalue(2, 1, 1) == pytest.approx(2 * 4.5 - 0.25)


def test_ground_state_entry():
    e = compute_entry("c", 0, 0, C2)
    assert e.selected_root == pytest.approx(2.5, abs=1e-12)
    assert e.eigenvalue == pytest.approx(7.46, abs=1e-10)
    assert e.eigenfunction.d == (1.0,)


@pytest.mark.parametrize("fixed", [C1, C2])
@pytest.mark.parametrize("L", [0, 1, 3])
def test_N1_eigenfunction_linear_coefficient(fixed, L):
    e = compute_entry("c", 1, L, fixed)
    a, b, c = float(fixed["a"]), float(fixed["b"]), e.selected_root
    # d1 = -eps*omega/nu with eps*omega = (a c - b(L+1)) / c^{3/2}
    assert e.eigenfunction.d[1] == pytest.approx((b * (L + 1) - a * c) / (2 * (L + 1) * c ** 1.5), rel=1e-10)


def test_N2_B_polynomial_solves_the_ode():
    e = compute_entry("B", 2, 0, {"A": 1})
    Bv = sp.Float(repr(e.selected_root), 30)
    r = sp.symbols("r")
    y = sum(sp.Float(repr(dn), 30) * r ** n for n, dn in enumerate(e.eigenfunction.d))
    E = 2 * sp.Rational(7, 2) - Bv ** 2 / 4
    ode = sp.expand(r * sp.diff(y, r, 2) + (-2 * r ** 2 - Bv * r + 2) * sp.diff(y, r)
                    + ((E + Bv ** 2 / 4 - 3) * r + 1 - Bv) * y)
    coeffs = sp.Poly(ode, r).all_coeffs()
    assert max(abs(float(c)) for c in coeffs) < 1e-9


def test_residual_too_large_for_unrefined_root():
    with pytest.raises(ResidualTooLarge):
        eigenfunction("c", Fraction(1, 13), 10, 10, C1)


def test_radial_ground_state_shape():
    e = compute_entry("c", 0, 0, C2)
    c = 2.5
    for r in (0.0, 0.3, 1.7):
        assert radial_wavefunction(e, r, C2) == pytest.approx(math.exp(-c * r * r / 2 - r / (2 * c)), rel=1e-12)


def test_radial_first_excited_shapes():
    a, b = 0.4, 1.0
    e0 = compute_entry("c", 1, 0, C2)
    e1 = compute_entry("c", 1, 1, C2)
    for r in (0.2, 0.9):
        c = e0.selected_root
        g = math.exp(-c * r * r / 2 - b * r / (2 * c))
        assert radial_wavefunction(e0, r, C2) == pytest.approx((1 + 0.5 * (b / c - a) * r) * g, rel=1e-10)
        c = e1.selected_root
        g = math.exp(-c * r * r / 2 - b * r / (2 * c))
        assert radial_wavefunction(e1, r, C2) == pytest.approx(r * (1 + 0.5 * (b / c - a / 2) * r) * g, rel=1e-10)
    assert radial_wavefunction(e1, 0.0, C2) == 0.0
    with pytest.raises(ValueError):
        radial_wavefunction(e1, -1.0, C2)


def test_radial_tension_form():
    e = compute_entry("tension", 1, 0, {"m": 1})
    b = e.selected_root
    r = 0.8
    y = sum(dn * r ** n for n, dn in enumerate(e.eigenfunction.d))
    assert radial_wavefunction(e, r, {"m": 1}) == pytest.approx(math.exp(-(b / 4) * (r + 2 / b) ** 2) * y)


def test_grid_counts(c_grid, b_grid, tension_grids):
    assert len(c_grid) == 231
    assert len(tension_grids[0]) == 350
    assert len(tension_grids[10]) == 120
    assert len(b_grid) == 276  # the full N = 0..22 triangle; see README on the 288 figure


def test_skipped_cells_are_reported():
    skipped = []
    out = enumerate_spectrum("tension", {"m": 1}, range(0, 3), skipped=skipped)
    assert [(e.N, e.L) for e in out] == [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2)]
    assert skipped and skipped[0][:2] == (0, 0) and "N=0" in skipped[0][2]


def test_invariants_on_c_grid(c_grid):
    by = {(e.N, e.L): e for e in c_grid}
    for e in c_grid:
        assert len(e.eigenfunction.d) == e.N + 1 and e.eigenfunction.d[-1] != 0
        assert e.eigenvalue == eigenvalue("c", e.selected_root, e.N, e.L, C1)
        # Omega rebuilt from the eigenvalue equals -mu N
        with mpmath.workdps(30):
            p = _bch_params(Mode.QuantizeC, e.selected_root, e.N, e.L, {k: Fraction(v) for k, v in C1.items()})
            assert abs(p.Omega - 2 * e.N) < 1e-10
    for L in range(0, 20):
        seq = [by[(N, L)].selected_root for N in range(max(L, 0), 21)]
        assert all(x > y for x, y in zip(seq, seq[1:]))


def test_invariants_on_b_grid(b_grid):
    for e in b_grid:
        assert e.n_real_roots == e.N + 1
        assert e.root_index == e.N


def test_cascade_vanishes_at_refined_roots(c_grid):
    for e in c_grid[::17]:
        with mpmath.workdps(40):
            p = _bch_params(Mode.QuantizeC, e.all_roots.roots[e.root_index].midpoint, e.N, e.L,
                            {k: Fraction(v) for k, v in C1.items()})
            d = [mpmath.mpf(1), coeff_A(0, p)]
            for n in range(1, e.N + 4):
                d.append(coeff_A(n, p) * d[n] + coeff_B(n, p) * d[n - 1])
            scale = max(abs(v) for v in d[: e.N + 1])
            assert all(abs(v) < 1e-8 * scale for v in d[e.N + 1:])


@settings(max_examples=25, deadline=None)
@given(a=st.fractions(min_value=Fraction(1, 20), max_value=5, max_denominator=20),
       b=st.fractions(min_value=Fraction(1, 20), max_value=5, max_denominator=20))
def test_ground_state_is_b_over_a(a, b):
    e = compute_entry("c", 0, 0, {"a": a, "b": b})
    assert e.selected_root == pytest.approx(float(b / a), rel=1e-12)


@pytest.mark.parametrize("fixed", [{"a": 0, "b": 1}, {"a": 1, "b": 0}])
def test_degenerate_fixed_parameters_have_no_N0_state(fixed):
    skipped = []
    out = enumerate_spectrum("c", fixed, range(0, 3), skipped=skipped)
    assert all(e.N > 0 for e in out)
    assert any(s[0] == 0 for s in skipped)


def test_gap_table_values():
    rows = dict(gap_table(C1, range(10, 21)))
    assert round(rows[10], 7) == 0.0265903
    assert round(rows[20], 7) == 0.0207981
    gaps = [rows[N] for N in range(10, 21)]
    assert all(x > y for x, y in zip(gaps, gaps[1:]))


def test_csv_is_stable():
    entries = enumerate_spectrum("tension", {"m": 1}, range(1, 3))
    text = spectrum_csv(entries)
    assert text.splitlines()[0] == "mode,N,L,K,selected_root,eigenvalue,root_index,n_real_roots"
    assert text == spectrum_csv(enumerate_spectrum("tension", {"m": 1}, range(1, 3)))
    assert len(text.splitlines()) == 6
