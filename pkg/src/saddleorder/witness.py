"""Coefficient matrix A, rank certificates, witness systems and the
first-order non-membership certificate.

For the family with P = xi_{n+2} y^n, Q = sum_{j<=n+1} xi_j x^(n-j+1) y^(j-1)
and a homogeneous unit factor U of degree n-1, the eps-linear parts of
L_{m n1} are (A xi)_m with a_{mj} the coefficient of
x^(q m n1 - n - 1 + j) y^(p m n1 + 2 - j) in U^(i_m).
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from math import comb

from flint import fmpq, fmpq_mat, fmpq_poly
from gmpy2 import mpq

from .exactpoly import BivarPoly, Jet, format_scalar, to_rational
from .perturb import PerturbFamily
from .resonance import ResonanceData, resonance_data, row_index
from .saddle import (SaddleSystem, first_nonzero, saddle_values_integral,
                     saddle_values_nf)

log = logging.getLogger(__name__)

MAX_FALLBACK_ATTEMPTS = 200
MU_CANDIDATES = ("1", "1/2", "2", "-1", "1/3", "3", "-1/2", "-2", "2/3", "3/2", "1/5", "5")


class WitnessError(RuntimeError):
    """A mathematical expectation failed (rank deficit, broken certificate)."""


class GateError(ValueError):
    pass


def check_gate(p: int, q: int, n: int, gate: int | None = None) -> None:
    lowest = p + q + 3 if gate is None else gate
    if n < lowest:
        raise GateError(f"n={n} is below the construction gate n >= {lowest}")


# -- unit factor U = f + mu g ---------------------------------------------

@dataclass(frozen=True)
class UnitPencil:
    """U = f + mu g with mu symbolic."""

    f: BivarPoly
    g: BivarPoly
    branch: str
    seed: int | None = None

    def at(self, mu) -> BivarPoly:
        return self.f + self.g.scale(to_rational(mu))


def base_unit(rd: ResonanceData) -> BivarPoly:
    """f = x^p' (x^N1 + y^N1)."""
    pp, N1 = rd.p_prime, rd.N1
    return BivarPoly({(pp + N1, 0): 1, (pp, N1): 1})


def _mono_of_y(n: int, e: int) -> tuple[int, int]:
    return (n - 1 - e, e)


def choose_g(rd: ResonanceData) -> tuple[BivarPoly, str]:
    """Perturbation direction g: the generic delta_m choice or the small-case table."""
    p, pp, d, n = rd.p, rd.p_prime, rd.d, rd.n
    j = {m: row_index(rd, m).j_m for m in range(1, 3 + pp)}
    if (p - 1) * pp > 1 or d > 2 + pp:
        deltas = [j[m] - (pp + 4 - m) for m in range(1, 2 + pp)] + [j[2 + pp] - 1]
        if not all(0 < dl < rd.N1 for dl in deltas):
            raise WitnessError(f"generic g: delta exponents {deltas} leave (0, N1={rd.N1})")
        return BivarPoly([(_mono_of_y(n, dl), 1) for dl in deltas]), "generic"
    if p == 1 and d == 1:
        exps, branch = [4], "table p=p'=1,d=1"
    elif p == 1 and d == 2:
        exps, branch = [j[1] - 4, j[3] - 1], "table p=p'=1,d=2"
    elif p == 1 and d == 3:
        exps, branch = [j[1] - 4, j[2] - 1], "table p=p'=1,d=3"
    elif p == 2 and pp == 1 and d == 1:
        exps, branch = [3, 7], "table p=2,p'=1,d=1"
    elif p == 2 and pp == 1 and d == 3:
        # printed x-exponent n - j_1 - 4 is not of degree n-1; use n+2-j_1
        exps, branch = [j[1] - 3, j[2] - 1], "table p=2,p'=1,d=3"
    else:
        raise WitnessError(f"no g-table row for p={p}, p'={pp}, d={d}")
    if not all(0 <= e <= n - 1 for e in exps):
        raise WitnessError(f"{branch}: exponents {exps} out of range for n={n}")
    return BivarPoly([(_mono_of_y(n, e), 1) for e in exps]), branch


def build_U(rd: ResonanceData, mu=None):
    """f + mu g; a :class:`UnitPencil` when mu is None (symbolic)."""
    if mu is not None and to_rational(mu) == 0:
        return base_unit(rd)
    g, branch = choose_g(rd)
    pencil = UnitPencil(base_unit(rd), g, branch)
    return pencil if mu is None else pencil.at(mu)


def random_g(rd: ResonanceData, rng: random.Random, coeffs=(-2, -1, 1, 2)) -> BivarPoly:
    n = rd.n
    terms = {}
    for e in rng.sample(range(n), k=min(n, rng.randint(2, 4))):
        terms[_mono_of_y(n, e)] = rng.choice(coeffs)
    return BivarPoly(terms)


# -- matrix A -----------------------------------------------------------------

@dataclass
class CoeffMatrix:
    rd: ResonanceData | None
    rows: list  # entries mpq, or fmpq_poly in mu
    symbolic: bool = False

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    def entry(self, m: int, j: int):
        """1-based access a_{mj}."""
        return self.rows[m - 1][j - 1]

    def at(self, mu) -> "CoeffMatrix":
        if not self.symbolic:
            return self
        x = _to_fmpq(to_rational(mu))
        return CoeffMatrix(self.rd, [[_from_fmpq(a(x)) for a in row] for row in self.rows])

    def apply(self, xi) -> list:
        return [sum((a * x for a, x in zip(row, xi)), mpq(0)) for row in self.rows]

    def to_strings(self) -> list[list[str]]:
        if self.symbolic:
            return [[_mu_poly_str(a) for a in row] for row in self.rows]
        return [[str(a) for a in row] for row in self.rows]

    def to_csv(self) -> str:
        return "\n".join(",".join(row) for row in self.to_strings()) + "\n"


def _to_fmpq(c) -> fmpq:
    return fmpq(int(c.numerator), int(c.denominator))


def _from_fmpq(c: fmpq) -> mpq:
    return mpq(int(c.p), int(c.q))


def _mu_poly_str(a: fmpq_poly) -> str:
    return str(a).replace("x", "mu") if a else "0"


def _y_poly(U: BivarPoly, n: int) -> fmpq_poly:
    if not U.is_homogeneous(n - 1):
        raise ValueError(f"U must be homogeneous of degree n-1 = {n - 1}")
    coeffs = [fmpq(0)] * n
    for (i, j), c in U.terms.items():
        coeffs[j] = _to_fmpq(c)
    return fmpq_poly(coeffs)


def _entry_exponent(rd: ResonanceData, m: int, j: int) -> int | None:
    """y-exponent of the monomial read from U^(i_m) for a_{mj}, or None if absent."""
    e = rd.p * m * rd.n1 + 2 - j
    xe = rd.q * m * rd.n1 - rd.n - 1 + j
    return e if e >= 0 and xe >= 0 else None


def build_matrix_A(rd: ResonanceData, U) -> CoeffMatrix:
    """(n+1) x (n+2) matrix; U a BivarPoly or a symbolic :class:`UnitPencil`."""
    n = rd.n
    rows_idx = [row_index(rd, m) for m in range(1, n + 2)]
    if isinstance(U, UnitPencil):
        fy, gy = _y_poly(U.f, n), _y_poly(U.g, n)
        top = max(r.i_m for r in rows_idx)
        fpow, gpow = [fmpq_poly([1])], [fmpq_poly([1])]
        for _ in range(top):
            fpow.append(fpow[-1] * fy)
            gpow.append(gpow[-1] * gy)
        rows = []
        for r in rows_idx:
            i = r.i_m
            exps = [_entry_exponent(rd, r.m, j) for j in range(1, n + 3)]
            cols = [[fmpq(0)] * (i + 1) for _ in exps]
            for k in range(i + 1):
                prod = fpow[i - k] * gpow[k]
                ck = comb(i, k)
                for col, e in zip(cols, exps):
                    if e is not None:
                        col[k] = prod[e] * ck
            rows.append([fmpq_poly(c) for c in cols])
        return CoeffMatrix(rd, rows, symbolic=True)
    uy = _y_poly(U, n)
    rows, power, done = [], fmpq_poly([1]), 0
    for r in rows_idx:
        power = power * uy ** (r.i_m - done)
        done = r.i_m
        rows.append([_from_fmpq(power[e]) if (e := _entry_exponent(rd, r.m, j)) is not None
                     else mpq(0) for j in range(1, n + 3)])
    return CoeffMatrix(rd, rows)


def binomial_matrix(rd: ResonanceData) -> list[list[mpq]]:
    """Closed form of A at U = f: C(i_m, l_m) at j_m and C(i_m, l_m - 1) at j_m + N1."""
    n = rd.n
    out = []
    for m in range(1, n + 2):
        r = row_index(rd, m)
        row = [mpq(0)] * (n + 2)
        row[r.j_m - 1] = mpq(_binom(r.i_m, r.l_m))
        if r.j_m + rd.N1 <= n + 2:
            row[r.j_m + rd.N1 - 1] = mpq(_binom(r.i_m, r.l_m - 1))
        out.append(row)
    return out


def _binom(i: int, l: int) -> int:
    return comb(i, l) if 0 <= l <= i else 0


# -- rank ---------------------------------------------------------------------

@dataclass
class RankCertificate:
    rank: int
    pivots: list  # (row, col) pairs, 1-based, in elimination order
    method: str
    mu: str | None = None

    def as_dict(self) -> dict:
        return {"rank": self.rank, "pivots": [list(p) for p in self.pivots],
                "method": self.method, "mu": self.mu}


def _exact_div(a, b):
    if isinstance(a, fmpq_poly):
        quo, rem = divmod(a, b)
        if rem:
            raise ArithmeticError("Bareiss division left a remainder")
        return quo
    return a / b


def bareiss_rank(rows: list, one) -> tuple[int, list]:
    """Fraction-free elimination with row pivoting; returns rank and pivot log."""
    M = [list(r) for r in rows]
    nr = len(M)
    nc = len(M[0]) if M else 0
    prev = one
    r = 0
    pivots = []
    order = list(range(nr))
    for c in range(nc):
        if r == nr:
            break
        piv = next((i for i in range(r, nr) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        order[r], order[piv] = order[piv], order[r]
        pivots.append((order[r] + 1, c + 1))
        pr = M[r]
        for i in range(r + 1, nr):
            Mi = M[i]
            a = Mi[c]
            for k in range(c + 1, nc):
                Mi[k] = _exact_div(pr[c] * Mi[k] - a * pr[k], prev)
            Mi[c] = one * 0
        prev = pr[c]
        r += 1
    return r, pivots


def rank_exact(A: CoeffMatrix) -> RankCertificate:
    if A.symbolic:
        rank, piv = bareiss_rank(A.rows, fmpq_poly([1]))
        return RankCertificate(rank, piv, "bareiss over Q[mu]")
    rank, piv = bareiss_rank(A.rows, mpq(1))
    return RankCertificate(rank, piv, "bareiss over Q")


def rank_by_specialization(A: CoeffMatrix, mus=MU_CANDIDATES) -> RankCertificate:
    """Rank at the first mu reaching full row rank (a lower bound on the symbolic rank)."""
    best = None
    for mu in mus:
        cert = rank_exact(A.at(mu))
        cert.mu, cert.method = str(to_rational(mu)), "specialization"
        if best is None or cert.rank > best.rank:
            best = cert
        if cert.rank == A.shape[0]:
            break
    return best


# -- solving ------------------------------------------------------------------

@dataclass
class WitnessVector:
    xi: list
    free_column: int  # 1-based column fixed to zero


def _solve_square(rows: list, rhs: list) -> list | None:
    M = fmpq_mat([[_to_fmpq(a) for a in row] for row in rows])
    if M.rank() < len(rows):
        return None
    b = fmpq_mat([[_to_fmpq(v)] for v in rhs])
    sol = M.solve(b)
    return [_from_fmpq(sol[i, 0]) for i in range(len(rows))]


def solve_target(A: CoeffMatrix, target: list, free_column: int | None = None) -> WitnessVector:
    """Solve A xi = target exactly with one column's unknown fixed to 0.

    The designated free column is N1 + 2; if deleting it leaves a singular
    square matrix the first column that works is used instead.
    """
    if A.symbolic:
        raise ValueError("specialize mu before solving")
    nr, nc = A.shape
    if nc != nr + 1:
        raise ValueError("expected an (n+1) x (n+2) matrix")
    target = [to_rational(t) for t in target]
    if free_column is None:
        free_column = A.rd.N1 + 2 if A.rd is not None else nc
    preferred = free_column
    candidates = [preferred] + [c for c in range(1, nc + 1) if c != preferred]
    for col in candidates:
        keep = [c for c in range(nc) if c != col - 1]
        sol = _solve_square([[row[c] for c in keep] for row in A.rows], target)
        if sol is None:
            continue
        xi = [mpq(0)] * nc
        for c, v in zip(keep, sol):
            xi[c] = v
        if A.apply(xi) != target:
            raise WitnessError("residual check failed after exact solve")
        return WitnessVector(xi, col)
    raise WitnessError("matrix is rank deficient; no square subsystem is solvable")


# -- witness synthesis --------------------------------------------------------

def family_PQ(n: int, xi: list) -> tuple[BivarPoly, BivarPoly]:
    """P = xi_{n+2} y^n, Q = sum_{j=1}^{n+1} xi_j x^(n-j+1) y^(j-1)."""
    P = BivarPoly({(0, n): xi[n + 1]})
    Q = BivarPoly({(n - j + 1, j - 1): xi[j - 1] for j in range(1, n + 2)})
    return P, Q


@dataclass
class UnitChoice:
    pencil: UnitPencil
    mu: mpq
    symbolic_rank: RankCertificate
    specialized_rank: RankCertificate
    attempts: list = field(default_factory=list)

    @property
    def U(self) -> BivarPoly:
        return self.pencil.at(self.mu)


def _try_pencil(rd: ResonanceData, pencil: UnitPencil, mus) -> tuple[RankCertificate, RankCertificate | None, dict]:
    A = build_matrix_A(rd, pencil)
    sym = rank_exact(A)
    entry = {"branch": pencil.branch, "g": pencil.g.to_records(), "symbolic_rank": sym.rank}
    spec = None
    if sym.rank == rd.n + 1:
        spec = rank_by_specialization(A, mus)
        entry["mu"], entry["rank_at_mu"] = spec.mu, spec.rank
    return sym, spec, entry


def find_unit(rd: ResonanceData, seed: int = 0, max_attempts: int = MAX_FALLBACK_ATTEMPTS,
              mu=None) -> UnitChoice:
    """Explicit f + mu g first, then randomized g drawn from a seeded generator."""
    full = rd.n + 1
    mus = (mu,) if mu is not None else MU_CANDIDATES
    attempts = []
    try:
        explicit = build_U(rd)
    except WitnessError as exc:
        attempts.append({"branch": "explicit", "error": str(exc)})
        explicit = None
    rng = random.Random(seed)
    for k in range(max_attempts + 1):
        if k == 0:
            if explicit is None:
                continue
            pencil = explicit
        else:
            pencil = UnitPencil(base_unit(rd), random_g(rd, rng), "random", seed)
        sym, spec, entry = _try_pencil(rd, pencil, mus)
        attempts.append(entry)
        if spec is not None and spec.rank == full:
            return UnitChoice(pencil, mpq(spec.mu), sym, spec, attempts)
        log.info("g branch %s: symbolic rank %d, need %d", pencil.branch, sym.rank, full)
    raise WitnessError(f"no unit factor with rank {full} found after {len(attempts)} attempts")


@dataclass
class WitnessReport:
    system: SaddleSystem          # polynomial form, Jet coefficients in eps
    concrete: SaddleSystem        # the same system at the chosen rational eps
    resonance: ResonanceData
    claimed_order: int
    transcript: list              # (k, Jet) from the normal-form engine on the polynomial form
    eps_order: int
    epsilon: mpq
    xi: list                      # xi_s vectors: xi(eps) = sum eps^s xi_s
    unit: UnitChoice
    free_column: int
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def as_dict(self) -> dict:
        return {
            "p": self.resonance.p, "q": self.resonance.q, "n": self.resonance.n,
            "resonance": self.resonance.as_dict(),
            "claimed_order": self.claimed_order,
            "eps_order": self.eps_order,
            "epsilon": str(self.epsilon),
            "mu": str(self.unit.mu),
            "g_branch": self.unit.pencil.branch,
            "fallback_seed": self.unit.pencil.seed,
            "U": self.unit.U.to_records(),
            "xi": [[str(v) for v in xs] for xs in self.xi],
            "free_column": self.free_column,
            "rank_certificate": self.unit.symbolic_rank.as_dict(),
            "rank_at_mu": self.unit.specialized_rank.as_dict(),
            "g_attempts": len(self.unit.attempts),
            "system_jet": system_to_doc(self.system),
            "system": system_to_doc(self.concrete),
            "transcript": [{"k": k, "L": format_scalar(v)} for k, v in self.transcript if v or k % self.resonance.n1 == 0],
            "checks": self.checks,
        }


def system_to_doc(sys: SaddleSystem) -> dict:
    doc = {"p": sys.p, "q": sys.q, "P": sys.P.to_records(), "Q": sys.Q.to_records()}
    if sys.unit is not None:
        doc["U"] = sys.unit.to_records()
    return doc


def _xi_series(xis: list, J: int) -> list:
    """Coefficients eps * xi(eps) as jets of order J."""
    out = []
    for idx in range(len(xis[0])):
        c = [mpq(0)] * (J + 1)
        for s, vec in enumerate(xis):
            if s + 1 <= J:
                c[s + 1] = vec[idx]
        out.append(Jet(c))
    return out


def witness_system(rd: ResonanceData, U: BivarPoly, xis: list, J: int) -> SaddleSystem:
    """x' = p x (1 - U) + eps p P, y' = -q y (1 - U) + eps q Q with P, Q built from xi(eps)."""
    p, q, n = rd.p, rd.q, rd.n
    coeffs = _xi_series(xis, J)
    P, Q = family_PQ(n, coeffs)
    return SaddleSystem(p, q, P.scale(p), Q.scale(q), U.map_coeffs(lambda c: Jet.constant(c, J)))


def _rescaled_values(rd: ResonanceData, U: BivarPoly, xis: list, J: int, K: int) -> list:
    """First-integral values of the divided-by-(1-U) field, normalized by 1/(p q)."""
    from .saddle import rescale_unit

    sys = witness_system(rd, U, xis, J)
    resc = rescale_unit(sys, K * (rd.p + rd.q))
    pq = rd.p * rd.q
    return [rec.value / pq for rec in saddle_values_integral(resc, K)]


def synth_theorem1(p: int, q: int, n: int, epsilon="1/1000", J: int = 1, *,
                   gate: int | None = None, seed: int = 0, mu=None,
                   cross_check: bool = True) -> WitnessReport:
    """Degree-n system with homogeneous nonlinearity and saddle order (n^2 - 1)/d
    through eps-order J."""
    check_gate(p, q, n, gate)
    if J < 1:
        raise ValueError("jet order must be at least 1")
    rd = resonance_data(p, q, n)
    eps = to_rational(epsilon)
    if eps == 0:
        raise ValueError("epsilon must be nonzero")
    choice = find_unit(rd, seed=seed, mu=mu)
    U = choice.U
    A = build_matrix_A(rd, U)
    target = [mpq(0)] * n + [mpq(1)]
    wv = solve_target(A, target)
    xis = [wv.xi]
    K = (n + 1) * rd.n1
    n1 = rd.n1
    # eps-refinement: kill the eps^(s+1) residual of L/eps with the same A
    for s in range(1, J):
        vals = _rescaled_values(rd, U, xis + [[mpq(0)] * (n + 2)], s + 1, K)
        resid = [vals[m * n1 - 1][s + 1] for m in range(1, n + 2)]
        step = solve_target(A, [-r for r in resid], free_column=wv.free_column)
        xis.append(step.xi)

    system = witness_system(rd, U, xis, J)
    transcript = [(rec.k, rec.value) for rec in saddle_values_nf(system, K)]
    checks = {}
    zero_jet = Jet.constant(0, J)
    checks["residual_A_xi"] = A.apply(wv.xi) == target
    checks["vanish_below_claim"] = all(v == zero_jet for k, v in transcript[:-1])
    top = transcript[-1][1]
    checks["unit_linear_part_at_claim"] = top[0] == 0 and top[1] == 1
    if cross_check:
        integ = saddle_values_integral(system, K)
        checks["integral_engine_same_order"] = first_nonzero(integ) == K
        checks["integral_engine_value"] = integ[-1].value[1] == p * q
        if J == 1:
            fam = PerturbFamily(p, q, *family_PQ(n, wv.xi), U)
            from .perturb import linear_saddle_values

            lin = linear_saddle_values(fam, K)
            checks["linearized_oracle"] = [lin[m * n1 - 1] for m in range(1, n + 2)] == target
    concrete = system.map_coeffs(lambda c: sum((v * eps ** e for e, v in enumerate(c.c)), mpq(0)))
    return WitnessReport(system, concrete, rd, K, transcript, J, eps, xis, choice,
                         wv.free_column, checks)


def lift_degree(sys: SaddleSystem, r: int) -> SaddleSystem:
    """Multiply both right-hand sides by (1 + x^r).

    For r = 0 the factor is the constant 2, which is normalized away, so the
    system is returned unchanged.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r == 0:
        return sys
    jet = sys.jet_order
    one = (lambda c: Jet.constant(c, jet)) if jet is not None else (lambda c: c)
    factor = BivarPoly({(0, 0): one(1), (r, 0): one(1)})
    xr = BivarPoly({(r, 0): one(1)})
    U = sys.unit if sys.unit is not None else BivarPoly()
    # p x (1 - U)(1 + x^r) = p x (1 - U') with U' = U + U x^r - x^r
    new_unit = U + U.mul(xr) - xr
    return SaddleSystem(sys.p, sys.q, sys.P.mul(factor), sys.Q.mul(factor), new_unit)


# -- non-membership certificate -----------------------------------------------

@dataclass
class NonMembershipCertificate:
    resonance: ResonanceData
    k0: int
    rows: dict          # m -> (i_m, l_m, j_m)
    forms: dict         # m -> (C(i_m, l_m), C(i_m, l_m - 1))
    ratio_difference: mpq
    determinant: int
    matrix_matches_binomial: bool
    j_in_range: bool
    bound: str
    lifted_from: int | None = None

    @property
    def verdict(self) -> bool:
        return (self.matrix_matches_binomial and self.j_in_range
                and self.ratio_difference != 0 and self.determinant != 0)

    def as_dict(self) -> dict:
        rd = self.resonance
        out = {
            "p": rd.p, "q": rd.q, "n": rd.n, "resonance": rd.as_dict(), "k0": self.k0,
            "rows": {str(m): {"i": i, "l": l, "j": j} for m, (i, l, j) in self.rows.items()},
            "forms": {str(m): [str(a), str(b)] for m, (a, b) in self.forms.items()},
            "ratio_difference": str(self.ratio_difference),
            "determinant": str(self.determinant),
            "matrix_matches_binomial": self.matrix_matches_binomial,
            "j_in_range": self.j_in_range,
            "verdict": self.verdict, "bound": self.bound,
        }
        if self.lifted_from is not None:
            out["lifted_from_degree"] = self.lifted_from
        return out


def theorem3_certificate(p: int, q: int, n: int, gate: int | None = None) -> NonMembershipCertificate:
    check_gate(p, q, n, gate)
    rd = resonance_data(p, q, n)
    N1, N2 = rd.N1, rd.N2
    A = build_matrix_A(rd, base_unit(rd))
    matches = A.rows == binomial_matrix(rd)
    lo, hi = row_index(rd, N2), row_index(rd, N1 + N2)
    j_ok = 0 < lo.j_m <= 3 + rd.p_prime and hi.j_m == lo.j_m
    forms = {m: (_binom(r.i_m, r.l_m), _binom(r.i_m, r.l_m - 1)) for m, r in ((N2, lo), (N1 + N2, hi))}
    if lo.l_m and hi.l_m:
        diff = mpq(hi.i_m + 1, hi.l_m) - mpq(lo.i_m + 1, lo.l_m)
    else:
        diff = mpq(0)
    det = forms[N1 + N2][0] * forms[N2][1] - forms[N1 + N2][1] * forms[N2][0]
    k0 = (N1 + N2) * rd.n1
    bound = ("M_h^I(1,q,n) >= 2n^2/d + O(n)" if p == 1 else "M_h^I(p,q,n) >= 3n^2/(2d) + O(n)")
    rows = {m: (r.i_m, r.l_m, r.j_m) for m, r in ((N2, lo), (N1 + N2, hi))}
    return NonMembershipCertificate(rd, k0, rows, forms, diff, det, matches, j_ok, bound)


def theorem4_certificate(p: int, q: int, n: int, gate: int | None = None) -> NonMembershipCertificate:
    """Certificate at n' = n - r (r = n mod (p+q)); the system is then lifted by (1 + x^r)."""
    r = n % (p + q)
    cert = theorem3_certificate(p, q, n - r, gate)
    cert.lifted_from = n - r
    cert.bound = ("M^I(1,q,n) >= 2n^2 + O(n)" if p == 1 else "M^I(p,q,n) >= 3n^2/2 + O(n)")
    return cert


@dataclass
class LiftReport:
    base: WitnessReport
    r: int
    system: SaddleSystem
    transcript: list
    checks: dict

    @property
    def degree(self) -> int:
        return self.base.resonance.n + self.r

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def as_dict(self) -> dict:
        n0, n, r = self.base.resonance.n, self.degree, self.r
        bound = n * n - 2 * r * n + r * r - 1
        return {
            "base_degree": n0, "r": r, "degree": n, "d": self.base.resonance.d,
            "claimed_order": self.base.claimed_order,
            "bound": f"n^2 - 2rn + r^2 - 1 = {bound}",
            # the bound needs gcd(n - r - 1, p + q) = 1, which r = n mod (p+q) guarantees
            "matches_bound": self.base.claimed_order == bound,
            "base": self.base.as_dict(),
            "system_jet": system_to_doc(self.system),
            "transcript": [{"k": k, "L": format_scalar(v)} for k, v in self.transcript
                           if v or k % self.base.resonance.n1 == 0],
            "checks": self.checks,
        }


def synth_theorem2(p: int, q: int, n: int, r: int, **kw) -> LiftReport:
    """Theorem 1 witness at degree n - r, lifted by (1 + x^r) to degree n."""
    if r < 0 or n - r < 2:
        raise ValueError("need 0 <= r <= n - 2")
    base = synth_theorem1(p, q, n - r, **kw)
    lifted = lift_degree(base.system, r)
    K = base.claimed_order
    transcript = [(rec.k, rec.value) for rec in saddle_values_nf(lifted, K)]
    checks = {
        "base_ok": base.ok,
        "degree": lifted.degree == n or r == 0,
        "transcript_preserved": [v for _, v in transcript] == [v for _, v in base.transcript],
    }
    return LiftReport(base, r, lifted, transcript, checks)
