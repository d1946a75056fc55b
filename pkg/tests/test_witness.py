import json
import random
from math import comb, gcd

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from saddleorder.exactpoly import BivarPoly, Jet
from saddleorder.perturb import PerturbFamily, jet_saddle_values, linear_saddle_values
from saddleorder.resonance import resonance_data, row_index
from saddleorder.saddle import SaddleSystem, saddle_order, saddle_values_integral, saddle_values_nf
from saddleorder.witness import (CoeffMatrix, GateError, UnitPencil, WitnessError, base_unit,
                                 binomial_matrix, build_U, build_matrix_A, check_gate, choose_g,
                                 family_PQ, find_unit, lift_degree, random_g, rank_by_specialization,
                                 rank_exact, solve_target, synth_theorem1, synth_theorem2,
                                 theorem3_certificate, theorem4_certificate)

GRID = [(1, 1, 6), (1, 1, 8), (1, 2, 6), (1, 2, 9), (2, 3, 12), (1, 3, 7)]
# the closed binomial form needs N1 > p' + 2 so that no third binomial fits in a row
STRUCT_GRID = [(p, q, n) for q in range(1, 6) for p in range(1, q + 1) if gcd(p, q) == 1
               for n in range(p + q + 3, 16) if resonance_data(p, q, n).N1 > resonance_data(p, q, n).p_prime + 2]

x = BivarPoly.monomial(1, 0)
y = BivarPoly.monomial(0, 1)


def oracle_row_values(rd, U, xi):
    fam = PerturbFamily(rd.p, rd.q, *family_PQ(rd.n, xi), U)
    lin = linear_saddle_values(fam, (rd.n + 1) * rd.n1)
    return [lin[m * rd.n1 - 1] for m in range(1, rd.n + 2)]


# -- unit factor ----------------------------------------------------------------

def test_build_U_examples():
    rd = resonance_data(1, 1, 6)
    assert build_U(rd, 0) == BivarPoly({(5, 0): 1, (1, 4): 1})
    # table row p = p' = 1, d = 1 gives g = x^(n-5) y^4, which coincides with a monomial of f
    g, branch = choose_g(rd)
    assert g == BivarPoly({(1, 4): 1}) and branch.startswith("table")
    assert build_U(rd, 1) == BivarPoly({(5, 0): 1, (1, 4): 2})
    pencil = build_U(rd)
    assert isinstance(pencil, UnitPencil) and pencil.at("1/2") == build_U(rd, "1/2")


@pytest.mark.parametrize("p, q, n", STRUCT_GRID)
def test_base_unit_shape(p, q, n):
    f = build_U(resonance_data(p, q, n), 0)
    assert len(f) == 2 and f.is_homogeneous(n - 1)


@pytest.mark.parametrize("n", [9, 13])
def test_table_p2(n):
    rd = resonance_data(2, 3, n)
    assert (rd.p_prime, rd.d) == (1, 1)
    g, branch = choose_g(rd)
    assert branch == "table p=2,p'=1,d=1"
    assert g == BivarPoly({(n - 4, 3): 1, (n - 8, 7): 1})


def test_table_p1_d3():
    rd = resonance_data(1, 2, 10)
    j1, j2 = row_index(rd, 1).j_m, row_index(rd, 2).j_m
    g, branch = choose_g(rd)
    assert branch == "table p=p'=1,d=3"
    assert g == BivarPoly({(10 + 3 - j1, j1 - 4): 1, (10 - j2, j2 - 1): 1})


def test_generic_g_in_range_or_reported():
    seen_ok = 0
    for q in range(1, 8):
        for p in range(1, q + 1):
            if gcd(p, q) != 1:
                continue
            for n in range(p + q + 3, 25):
                rd = resonance_data(p, q, n)
                if not ((p - 1) * rd.p_prime > 1 or rd.d > 2 + rd.p_prime):
                    continue
                try:
                    g, branch = choose_g(rd)
                except WitnessError:
                    continue
                seen_ok += 1
                assert branch == "generic" and g.is_homogeneous(n - 1)
                assert all(0 < j < rd.N1 for (_, j) in g.terms)
    assert seen_ok > 20


def test_generic_failure_at_2_3_12_uses_fallback():
    rd = resonance_data(2, 3, 12)
    with pytest.raises(WitnessError):
        choose_g(rd)
    ch = find_unit(rd, seed=0)
    assert ch.pencil.branch == "random" and ch.pencil.seed == 0
    assert ch.symbolic_rank.rank == 13
    again = find_unit(rd, seed=0)
    assert again.pencil.g == ch.pencil.g and again.mu == ch.mu


# -- matrix A ----------------------------------------------------------------------

def test_matrix_single_entry_example():
    rd = resonance_data(1, 1, 4)
    A = build_matrix_A(rd, x.pow(3))
    assert A.shape == (5, 6)
    nz = [(m, j) for m in range(1, 6) for j in range(1, 7) if A.entry(m, j)]
    assert nz == [(1, 5)] and A.entry(1, 5) == 1


def test_matrix_rejects_wrong_degree():
    with pytest.raises(ValueError):
        build_matrix_A(resonance_data(1, 1, 6), x.pow(3))


@pytest.mark.parametrize("p, q, n", STRUCT_GRID)
def test_binomial_structure(p, q, n):
    rd = resonance_data(p, q, n)
    A = build_matrix_A(rd, base_unit(rd))
    assert A.rows == binomial_matrix(rd)
    for m in range(1, n + 2):
        r = row_index(rd, m)
        nz = [j for j in range(1, n + 3) if A.entry(m, j)]
        if r.j_m > 3 + rd.p_prime:
            assert nz in ([r.j_m], [])
            assert A.entry(m, r.j_m) == comb(r.i_m, r.l_m)


def test_binomial_structure_breaks_for_tiny_N1():
    rd = resonance_data(1, 1, 5)
    A = build_matrix_A(rd, base_unit(rd))
    assert A.rows != binomial_matrix(rd)
    # third binomial C(i, l - 2) in column j + 2 N1
    assert A.entry(4, 7) == comb(3, 1)


@pytest.mark.parametrize("p, q, n", GRID)
def test_permutation_block(p, q, n):
    rd = resonance_data(p, q, n)
    A = build_matrix_A(rd, base_unit(rd))
    block = [[A.entry(m, j) for j in range(1, rd.N1 + 1)] for m in range(1, rd.N1 + 1)]
    assert all(sum(1 for v in row if v) == 1 for row in block)
    assert all(sum(1 for row in block if row[j]) == 1 for j in range(rd.N1))


@pytest.mark.parametrize("p, q, n", GRID)
def test_matrix_matches_linearized_oracle(p, q, n):
    rd = resonance_data(p, q, n)
    rng = random.Random(p * 100 + q * 10 + n)
    units = [base_unit(rd), base_unit(rd) + random_g(rd, rng).scale(mpq(rng.randint(1, 5), rng.randint(1, 5)))]
    for U in units:
        A = build_matrix_A(rd, U)
        for _ in range(5):
            xi = [mpq(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n + 2)]
            assert A.apply(xi) == oracle_row_values(rd, U, xi)


@pytest.mark.parametrize("p, q, n", GRID[:4])
def test_symbolic_matrix_specializes(p, q, n):
    rd = resonance_data(p, q, n)
    pencil = find_unit(rd).pencil
    S = build_matrix_A(rd, pencil)
    for mu in ("0", "1/3", "-2"):
        assert S.at(mu).rows == build_matrix_A(rd, pencil.at(mu)).rows


# -- rank ------------------------------------------------------------------------------

def test_rank_identity():
    I2 = CoeffMatrix(None, [[mpq(1), mpq(0)], [mpq(0), mpq(1)]])
    assert rank_exact(I2).rank == 2
    assert rank_exact(CoeffMatrix(None, [[mpq(1), mpq(2)], [mpq(2), mpq(4)]])).rank == 1


@pytest.mark.parametrize("p, q, n", [(1, 3, 9), (1, 4, 11), (1, 5, 13)])
def test_rank_at_zero_when_d_large(p, q, n):
    rd = resonance_data(p, q, n)
    assert rd.d > 2 + rd.p_prime
    assert rank_exact(build_matrix_A(rd, base_unit(rd))).rank >= rd.N1


def test_symbolic_rank_1_1_8_with_spot_checks():
    rd = resonance_data(1, 1, 8)
    S = build_matrix_A(rd, build_U(rd))
    cert = rank_exact(S)
    assert cert.rank == 9 and cert.method == "bareiss over Q[mu]"
    assert len(cert.pivots) == 9
    rng = random.Random(8)
    for _ in range(3):
        mu = mpq(rng.randint(1, 9), rng.randint(1, 9))
        assert rank_exact(S.at(mu)).rank == 9
    spec = rank_by_specialization(S)
    assert spec.rank == 9 and spec.mu is not None


@pytest.mark.parametrize("p, q, n", GRID)
def test_symbolic_rank_grid(p, q, n):
    rd = resonance_data(p, q, n)
    ch = find_unit(rd)
    assert rank_exact(build_matrix_A(rd, ch.pencil)).rank == n + 1
    assert ch.specialized_rank.rank == n + 1


# -- solving ------------------------------------------------------------------------------

def test_solve_toy():
    A = CoeffMatrix(None, [[mpq(1), mpq(0), mpq(0)], [mpq(0), mpq(1), mpq(0)]])
    wv = solve_target(A, [0, 1])
    assert wv.xi == [0, 1, 0] and wv.free_column == 3


def test_solve_theorem1_target_and_oracle():
    rd = resonance_data(1, 1, 6)
    ch = find_unit(rd)
    A = build_matrix_A(rd, ch.U)
    target = [mpq(0)] * 6 + [mpq(1)]
    wv = solve_target(A, target)
    assert A.apply(wv.xi) == target
    assert wv.free_column == rd.N1 + 2 and wv.xi[rd.N1 + 1] == 0
    assert oracle_row_values(rd, ch.U, wv.xi) == target


def test_solve_rank_deficient():
    rd = resonance_data(1, 1, 4)
    with pytest.raises(WitnessError):
        solve_target(build_matrix_A(rd, x.pow(3)), [0, 0, 0, 0, 1])


# -- Theorem 1 ----------------------------------------------------------------------------

def test_gate():
    with pytest.raises(GateError):
        check_gate(1, 1, 4)
    check_gate(1, 1, 4, gate=4)
    with pytest.raises(GateError):
        synth_theorem1(1, 1, 4)


@pytest.mark.parametrize("p, q, n", [(1, 1, 6), (1, 2, 6)])
def test_theorem1_first_order(p, q, n):
    rep = synth_theorem1(p, q, n)
    rd = rep.resonance
    assert rd.d == 1 and rep.claimed_order == (n * n - 1) // rd.d == 35
    assert rep.ok, rep.checks
    assert rep.system.degree == n
    for k, v in rep.transcript:
        assert v[0] == 0
        assert v[1] == (1 if k == 35 else 0)
    json.dumps(rep.as_dict())


def test_theorem1_refined_second_order():
    rep = synth_theorem1(1, 1, 6, J=2)
    assert rep.ok
    vals = dict(rep.transcript)
    for m in range(1, 7):
        assert vals[5 * m].c == (0, 0, 0)
    assert vals[35][1] == 1
    assert len(rep.xi) == 2


def test_theorem1_witness_family_full_engine():
    # the same family run through the divided form at J = 1: jets (0,0), ..., (0,1)
    rep = synth_theorem1(1, 1, 6, cross_check=False)
    fam = PerturbFamily(1, 1, *family_PQ(6, rep.xi[0]), rep.unit.U)
    jets = jet_saddle_values(fam, 35, 1)
    assert [j.c for j in jets[4::5]] == [(0, 0)] * 6 + [(0, 1)]
    assert [j[1] for j in jets] == linear_saddle_values(fam, 35)


def test_concrete_system_is_rational():
    rep = synth_theorem1(1, 1, 6, epsilon="1/500")
    assert rep.concrete.jet_order is None
    assert rep.concrete.P.coeff(0, 6) == rep.xi[0][7] * mpq(1, 500)


# -- lift ---------------------------------------------------------------------------------

def test_lift_r0_and_linear():
    sys = SaddleSystem(1, 1, BivarPoly({(2, 1): 1}), BivarPoly())
    assert lift_degree(sys, 0) == sys
    lin = lift_degree(SaddleSystem(1, 1, BivarPoly(), BivarPoly()), 2)
    P, Q = lin.nonlinear()
    assert P == x.pow(3) and Q == -(x.pow(2) * y)
    assert all(r.value == 0 for r in saddle_values_nf(lin, 8))
    assert all(r.value == 0 for r in saddle_values_integral(lin, 8))
    with pytest.raises(ValueError):
        lift_degree(sys, -1)


@pytest.mark.parametrize("seed", range(8))
def test_lift_preserves_order(seed):
    from saddleorder.acceptance import random_system
    rng = random.Random(seed)
    p, q = [(1, 1), (1, 2), (2, 1), (2, 3)][seed % 4]
    sys = random_system(rng, p, q, max_deg=3)
    for r in (1, 2, 3):
        a, b = saddle_order(sys, 6), saddle_order(lift_degree(sys, r), 6)
        assert a.agree and b.agree and a.order == b.order


@pytest.mark.parametrize("r", [1, 2])
def test_theorem2_instance(r):
    # n' = 4 keeps d = gcd(n' - 1, 2) = 1, so the order is n'^2 - 1 = 15
    n = 4 + r
    rep = synth_theorem2(1, 1, n, r, gate=4)
    assert rep.ok and rep.system.degree == n
    first = next(k for k, v in rep.transcript if v)
    assert first == n * n - 2 * r * n + r * r - 1 == 15
    assert rep.as_dict()["matches_bound"]


def test_theorem2_with_even_d_reports_weaker_order():
    rep = synth_theorem2(1, 1, 6, 1)
    assert rep.ok and rep.base.resonance.d == 2 and rep.base.claimed_order == 12
    assert not rep.as_dict()["matches_bound"]


# -- Theorem 3 / 4 ------------------------------------------------------------------------

def test_certificate_1_1_6():
    cert = theorem3_certificate(1, 1, 6)
    rd = cert.resonance
    assert (rd.N2, rd.N1 + rd.N2) == (3, 7)
    assert cert.rows[3][:2] == (5, 4) and cert.rows[7][:2] == (13, 9)
    assert mpq(6, 4) != mpq(14, 9)
    assert cert.ratio_difference == mpq(14, 9) - mpq(6, 4) == mpq(1, 18)
    assert cert.k0 == 35 and cert.verdict


@pytest.mark.parametrize("n", [6, 8, 10, 12, 14])
def test_certificate_unit_p_k0(n):
    cert = theorem3_certificate(1, 1, n)
    d = cert.resonance.d
    assert cert.verdict
    assert cert.k0 * d == (2 * n - 4 - d) * (n - 1)


def test_certificate_forms_are_binomials():
    cert = theorem3_certificate(2, 3, 12)
    assert cert.verdict
    for m, (i, l, _) in cert.rows.items():
        assert cert.forms[m] == (comb(i, l), comb(i, l - 1))


def test_certificate_alarm_when_structure_breaks():
    cert = theorem3_certificate(1, 1, 5)
    assert not cert.matrix_matches_binomial and not cert.verdict


def test_theorem4_uses_lower_degree():
    cert = theorem4_certificate(1, 1, 9)
    assert cert.lifted_from == 8 and cert.resonance.n == 8 and cert.verdict


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 60), st.integers(1, 60))
def test_binomial_ratio_identity(i, l):
    if l <= i:
        assert mpq(comb(i, l), comb(i, l - 1)) == mpq(i - l + 1, l)
