"""Number-theoretic invariants of a p:-q resonance at degree n."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd


class ResonanceError(ValueError):
    pass


@dataclass(frozen=True)
class RowIndexData:
    m: int
    i_m: int
    j_m: int
    l_m: int


@dataclass(frozen=True)
class ResonanceData:
    p: int
    q: int
    n: int
    d: int
    n1: int
    q1: int
    p_prime: int
    N1: int
    N2: int
    s_table: dict = field(default_factory=dict)

    def row(self, m: int) -> RowIndexData:
        return row_index(self, m)

    def as_dict(self) -> dict:
        return {
            "p": self.p, "q": self.q, "n": self.n, "d": self.d, "n1": self.n1,
            "q1": self.q1, "p_prime": self.p_prime, "N1": self.N1, "N2": self.N2,
            "s_table": {str(j): s for j, s in sorted(self.s_table.items())},
        }


def prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def find_p_prime(p: int, n: int) -> int:
    """Product of the primes of p that do not divide n - 1 (1 if none)."""
    if p < 1:
        raise ResonanceError("p must be positive")
    pp = 1
    for r in prime_factors(p):
        if (n - 1) % r:
            pp *= r
    return pp


def _check_pq(p: int, q: int) -> None:
    if p < 1 or q < 1:
        raise ResonanceError(f"p and q must be positive, got ({p}, {q})")
    if gcd(p, q) != 1:
        raise ResonanceError(f"p and q must be coprime, got gcd({p}, {q}) = {gcd(p, q)}")
    if p > q:
        raise ResonanceError(f"expected p <= q, got p={p} > q={q}")


def resonance_data(p: int, q: int, n: int) -> ResonanceData:
    _check_pq(p, q)
    if n < 2:
        raise ResonanceError(f"degree n must be at least 2, got {n}")
    d = gcd(n - 1, p + q)
    pp = find_p_prime(p, n)
    N1 = n - 1 - pp
    s_table: dict[int, int] = {}
    N2 = 0
    if N1 >= 1 and gcd(N1, p * pp) == 1:
        inv = pow(p * pp, -1, N1) if N1 > 1 else 0
        for j in range(1, 4 + pp):
            if j == 2:
                continue
            s = (d * (j - 2) * inv) % N1
            s_table[j] = s if s else N1
        N2 = max(s_table.values())
    return ResonanceData(p, q, n, d, (n - 1) // d, (p + q) // d, pp, N1, N2, s_table)


def row_index(rd: ResonanceData, m: int) -> RowIndexData:
    """Solve d(j - 2) = m p p' (mod N1) for j in [1, N1] and derive l_m."""
    if m < 1:
        raise ResonanceError("row index m must be positive")
    N1, d, ppp = rd.N1, rd.d, rd.p * rd.p_prime
    if N1 < 1 or gcd(d, N1) != 1:
        raise ResonanceError(f"congruence unsolvable: gcd(d={d}, N1={N1}) != 1")
    r = (m * ppp * pow(d, -1, N1)) % N1 if N1 > 1 else 0
    j = (r + 2) % N1
    if j < 1:
        j += N1
    num = m * ppp - d * (j - 2)
    if num % N1:
        raise ResonanceError("internal: congruence residue not divisible by N1")
    dl = m * rd.p + num // N1
    if dl % d:
        raise ResonanceError(f"l_m is not an integer at m={m}")
    i_m = m * rd.q1 - 1
    l = dl // d
    if l < 0:
        raise ResonanceError(f"l_m={l} is negative at m={m}")
    return RowIndexData(m, i_m, j, l)
