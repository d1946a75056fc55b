from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from saddleorder.resonance import ResonanceError, find_p_prime, resonance_data, row_index


def grid(max_sum=7, max_n=20):
    for s in range(2, max_sum + 1):
        for p in range(1, s // 2 + 1):
            q = s - p
            if gcd(p, q) == 1:
                for n in range(p + q + 3, max_n + 1):
                    yield p, q, n


GRID = list(grid())


@st.composite
def triples(draw):
    q = draw(st.integers(1, 9))
    p = draw(st.integers(1, q).filter(lambda p: gcd(p, q) == 1))
    n = draw(st.integers(p + q + 3, 40))
    return p, q, n


def brute_p_prime(p, n):
    return [c for c in range(1, p + 1) if p % c == 0 and gcd(n - 1 - c, p * c) == 1]


def brute_j(rd, m):
    hits = [j for j in range(1, rd.N1 + 1) if (rd.d * (j - 2) - m * rd.p * rd.p_prime) % rd.N1 == 0]
    assert len(hits) == 1
    return hits[0]


def test_basic_1_1_4():
    rd = resonance_data(1, 1, 4)
    assert (rd.d, rd.n1, rd.q1, rd.p_prime, rd.N1) == (1, 3, 2, 1, 2)


def test_example_1_1_6():
    rd = resonance_data(1, 1, 6)
    assert (rd.d, rd.n1, rd.p_prime, rd.N1, rd.N2) == (1, 5, 1, 4, 3)
    assert rd.s_table == {1: 3, 3: 1, 4: 2}
    # brute force: 0 < s < 4 with s = j - 2 (mod 4)
    for j, s in rd.s_table.items():
        assert [t for t in range(1, 4) if (t - (j - 2)) % 4 == 0] == [s]


@pytest.mark.parametrize("n", [6, 8, 10, 12, 14])
def test_p_equal_one_closed_form(n):
    rd = resonance_data(1, 1, n)
    assert rd.N1 == n - 2
    assert rd.N2 == n - 2 - rd.d


def test_p_equal_one_closed_form_counterexample():
    # d = 2, N1 = 5: s_4 = 2d = 4 exceeds N1 - d = 3, so N2 = 4 rather than 3
    rd = resonance_data(1, 1, 7)
    assert (rd.d, rd.N1) == (2, 5)
    assert rd.s_table[4] == 4 and rd.N2 == 4 != rd.N1 - rd.d


@pytest.mark.parametrize("p, n, expected", [(1, 5, 1), (1, 17, 1), (2, 4, 2), (6, 13, 1)])
def test_find_p_prime_examples(p, n, expected):
    assert find_p_prime(p, n) == expected
    assert expected in brute_p_prime(p, n)


@pytest.mark.parametrize("p", range(1, 31))
def test_find_p_prime_property(p):
    for n in range(3, 40):
        pp = find_p_prime(p, n)
        assert p % pp == 0
        assert gcd(n - 1 - pp, p * pp) == 1


@pytest.mark.parametrize("m, expected", [(3, (5, 1, 4)), (7, (13, 1, 9))])
def test_row_index_examples(m, expected):
    r = row_index(resonance_data(1, 1, 6), m)
    assert (r.i_m, r.j_m, r.l_m) == expected
    assert r.j_m == brute_j(resonance_data(1, 1, 6), m)


@pytest.mark.parametrize("q, n", [(1, 6), (1, 8), (2, 6), (2, 9), (4, 11)])
def test_row_two_for_unit_p(q, n):
    rd = resonance_data(1, q, n)
    r = row_index(rd, 2)
    assert r.j_m == brute_j(rd, 2)
    if rd.d == 1:
        # d (j_2 - 2) = 2 p p' exactly, so the wrap term vanishes and l_2 = 2p / d
        assert r.j_m == 4 and rd.d * r.l_m == 2 * rd.p


@pytest.mark.parametrize("p, q, n", GRID)
def test_invariants_grid(p, q, n):
    rd = resonance_data(p, q, n)
    assert rd.d == gcd(n - 1, p + q)
    assert rd.n1 * rd.d == n - 1 and rd.q1 * rd.d == p + q
    assert p % rd.p_prime == 0 and gcd(rd.N1, p * rd.p_prime) == 1
    assert gcd(rd.N1, rd.d) == 1
    for j, s in rd.s_table.items():
        assert 0 < s <= rd.N1
        assert (s * p * rd.p_prime - rd.d * (j - 2)) % rd.N1 == 0
    assert rd.s_table[1] + rd.s_table[3] == rd.N1
    assert rd.N2 == max(rd.s_table.values())
    assert 2 * rd.N2 >= rd.N1


@pytest.mark.parametrize("p, q, n", GRID)
def test_j_is_a_bijection(p, q, n):
    rd = resonance_data(p, q, n)
    js = [row_index(rd, m).j_m for m in range(1, rd.N1 + 1)]
    assert sorted(js) == list(range(1, rd.N1 + 1))


@settings(max_examples=80, deadline=None)
@given(triples(), st.integers(1, 60))
def test_row_index_invariants(pqn, m):
    rd = resonance_data(*pqn)
    r = row_index(rd, m)
    assert r.j_m == brute_j(rd, m)
    assert r.i_m == m * (rd.p + rd.q) // rd.d - 1
    assert rd.d * r.l_m == m * rd.p + (m * rd.p * rd.p_prime - rd.d * (r.j_m - 2)) // rd.N1
    assert r.l_m >= 0


@pytest.mark.parametrize("args", [(2, 4, 9), (3, 2, 9), (0, 1, 9), (1, 1, 1)])
def test_errors(args):
    with pytest.raises(ResonanceError):
        resonance_data(*args)


def test_row_index_rejects_nonpositive_m():
    with pytest.raises(ResonanceError):
        row_index(resonance_data(1, 1, 6), 0)
