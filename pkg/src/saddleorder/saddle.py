"""Saddle values of  x' = p x + P(x, y),  y' = -q y + Q(x, y).

Two independent engines:

* ``saddle_values_nf`` builds the formal normal form degree by degree and
  reads off pi_k = pi_{1,k} - pi_{2,k}.
* ``saddle_values_integral`` builds H = x^q y^p + h.o.t. degree by degree
  and reports the obstructions L_k in dH/dt = sum L_k (x^q y^p)^(k+1).

Both accept rational or :class:`~saddleorder.exactpoly.Jet` coefficients.
Only the index of the first nonzero value is comparable between them; at
that index L_k(integral) = p q pi_k(normal form).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from flint import fmpq, fmpq_poly
from gmpy2 import mpq

from .exactpoly import BivarPoly, Jet, format_scalar, geom_series, to_rational

NORMAL_FORM = "normal-form"
FIRST_INTEGRAL = "first-integral"


class SystemError_(ValueError):
    pass


@dataclass(frozen=True)
class SaddleSystem:
    """x' = p x (1 - U) + P,  y' = -q y (1 - U) + Q   (U = 0 if absent)."""

    p: int
    q: int
    P: BivarPoly
    Q: BivarPoly
    unit: BivarPoly | None = None

    def __post_init__(self):
        if self.p < 1 or self.q < 1 or gcd(self.p, self.q) != 1:
            raise SystemError_(f"p, q must be coprime positive integers, got ({self.p}, {self.q})")
        for name, poly in (("P", self.P), ("Q", self.Q)):
            if poly and poly.min_degree < 2:
                raise SystemError_(f"{name} must contain only terms of degree >= 2")
        if self.unit is not None and self.unit.coeff(0, 0):
            raise SystemError_("unit factor U must have no constant term")
        orders = {o for o in (self.P.jet_order(), self.Q.jet_order(),
                              self.unit.jet_order() if self.unit else None) if o is not None}
        if len(orders) > 1:
            raise SystemError_(f"mixed jet orders {sorted(orders)}")

    @property
    def jet_order(self) -> int | None:
        for poly in (self.P, self.Q, self.unit):
            if poly is not None and (o := poly.jet_order()) is not None:
                return o
        return None

    @property
    def degree(self) -> int:
        degs = [self.P.degree, self.Q.degree, 1]
        if self.unit:
            degs.append(self.unit.degree + 1)
        return max(degs)

    def nonlinear(self) -> tuple[BivarPoly, BivarPoly]:
        """Nonlinear parts of the expanded polynomial field."""
        if not self.unit:
            return self.P, self.Q
        xU = BivarPoly.monomial(1, 0).mul(self.unit).scale(self.p)
        yU = BivarPoly.monomial(0, 1).mul(self.unit).scale(self.q)
        return self.P - xU, self.Q + yU

    def map_coeffs(self, fn) -> "SaddleSystem":
        return SaddleSystem(self.p, self.q, self.P.map_coeffs(fn), self.Q.map_coeffs(fn),
                            self.unit.map_coeffs(fn) if self.unit is not None else None)


@dataclass(frozen=True)
class SaddleValueRecord:
    k: int
    value: object
    method: str

    def as_dict(self) -> dict:
        return {"k": self.k, "value": format_scalar(self.value), "method": self.method}


@dataclass
class NormalFormStep:
    degree: int
    phi: dict
    psi: dict
    resonant: dict


def _zero_like(sys_or_order):
    order = sys_or_order if isinstance(sys_or_order, int) or sys_or_order is None else sys_or_order.jet_order
    return mpq(0) if order is None else Jet.constant(0, order)


def _by_degree(terms: dict, cap: int) -> dict[int, dict]:
    out: dict[int, dict] = {}
    for (i, j), c in terms.items():
        if i + j <= cap:
            out.setdefault(i + j, {})[(i, j)] = c
    return out


# Normal-form kernel.  A homogeneous component of degree s is stored as a
# tuple of flint polynomials in t, one per eps-power, with t^i <-> x^i y^(s-i).
# Rational coefficients use a 1-tuple.

def _to_fmpq(c) -> fmpq:
    return fmpq(int(c.numerator), int(c.denominator))


def _from_fmpq(c: fmpq):
    return mpq(int(c.p), int(c.q))


def _scalar(c, E: int) -> tuple:
    if isinstance(c, Jet):
        return tuple(_to_fmpq(v) for v in c.c)
    return (_to_fmpq(to_rational(c)),) + (fmpq(0),) * (E - 1)


def _unscalar(s: tuple, jet: bool):
    if jet:
        return Jet(_from_fmpq(v) for v in s)
    return _from_fmpq(s[0])


def _cmul(A: tuple, B: tuple) -> tuple:
    if len(A) == 1:
        return (A[0] * B[0],)
    return tuple(sum((A[a] * B[e - a] for a in range(e + 1)), fmpq_poly())
                 for e in range(len(A)))


def _csmul(A: tuple, s: tuple) -> tuple:
    if len(A) == 1:
        return (A[0] * s[0],)
    return tuple(sum((A[a] * s[e - a] for a in range(e + 1)), fmpq_poly())
                 for e in range(len(A)))


def _cadd(A: tuple | None, B: tuple) -> tuple:
    if A is None:
        return B
    return tuple(a + b for a, b in zip(A, B))


def _tder(A: tuple) -> tuple:
    return tuple(_T * a.derivative() for a in A)


_T = fmpq_poly([0, 1])


def _field_by_mono(terms: dict, cap: int, E: int) -> dict:
    return {k: _scalar(v, E) for k, v in terms.items() if k[0] + k[1] <= cap}


def _normal_form(sys: SaddleSystem, K: int, steps: list | None = None):
    p, q = sys.p, sys.q
    D = 1 + K * (p + q)
    J = sys.jet_order
    E = 1 if J is None else J + 1
    P, Q = sys.nonlinear()
    F = _field_by_mono(P.terms, D, E)
    G = _field_by_mono(Q.terms, D, E)
    zero = (fmpq_poly(),) * E

    # x~ = X + phi, y~ = Y + psi as lazily revealed homogeneous components
    xt: dict[int, tuple] = {1: (_T,) + zero[1:]}
    yt: dict[int, tuple] = {1: (fmpq_poly([1]),) + zero[1:]}
    series: dict[tuple[int, int], dict[int, tuple]] = {(1, 0): xt, (0, 1): yt}
    plan: dict[tuple[int, int], tuple] = {}
    pending = list(set(F) | set(G))
    while pending:
        a, b = pending.pop()
        if (a, b) in series:
            continue
        parent = (a - 1, b) if a > 0 else (a, b - 1)
        series[(a, b)] = {}
        plan[(a, b)] = (parent, xt if a > 0 else yt)
        pending.append(parent)
    order = sorted(plan, key=lambda e: e[0] + e[1])

    pi1: dict[int, tuple] = {}
    pi2: dict[int, tuple] = {}
    for m in range(2, D + 1):
        for key in order:
            if key[0] + key[1] > m:
                break
            parent, factor = plan[key]
            comp = None
            for s, A in series[parent].items():
                B = factor.get(m - s)
                if B is not None and s < m:
                    comp = _cadd(comp, _cmul(A, B))
            if comp is not None and any(comp):
                series[key][m] = comp

        R = R2 = None
        for mono, c in F.items():
            comp = series[mono].get(m)
            if comp is not None:
                R = _cadd(R, _csmul(comp, c))
        for mono, c in G.items():
            comp = series[mono].get(m)
            if comp is not None:
                R2 = _cadd(R2, _csmul(comp, c))
        # subtract (D phi_a) . N for the nonlinear normal-form terms found so far
        for k in range(1, K + 1):
            a = m - k * (p + q)
            if a < 2:
                break
            a1, a2 = pi1.get(k), pi2.get(k)
            if a1 is None and a2 is None:
                continue
            a1 = a1 or (fmpq(0),) * E
            a2 = a2 or (fmpq(0),) * E
            lin = tuple(p * u + q * v for u, v in zip(a1, a2))
            const = tuple(-q * a * v for v in a2)
            shift = _T ** (k * q)
            for which, comp in ((0, xt.get(a)), (1, yt.get(a))):
                if comp is None:
                    continue
                delta = _cadd(_csmul(_tder(comp), lin), _csmul(comp, const))
                delta = tuple(-shift * d for d in delta)
                if which == 0:
                    R = _cadd(R, delta)
                else:
                    R2 = _cadd(R2, delta)

        phi, res_x = _solve_component(R, m, E, lambda i: p * (i - 1) - q * (m - i))
        psi, res_y = _solve_component(R2, m, E, lambda i: p * i - q * (m - i - 1))
        resonant = {}
        if res_x is not None:
            k = (m - 1) // (p + q)
            pi1[k] = tuple(v / p for v in res_x)
            resonant[("x", k)] = pi1[k]
        if res_y is not None:
            k = (m - 1) // (p + q)
            pi2[k] = tuple(-v / q for v in res_y)
            resonant[("y", k)] = pi2[k]
        if phi is not None:
            xt[m] = phi
        if psi is not None:
            yt[m] = psi
        if steps is not None and (phi or psi or resonant):
            steps.append(NormalFormStep(
                m, _comp_terms(phi, m, J), _comp_terms(psi, m, J),
                {key: _unscalar(v, J is not None) for key, v in resonant.items()}))
    jet = J is not None
    return ({k: _unscalar(v, jet) for k, v in pi1.items()},
            {k: _unscalar(v, jet) for k, v in pi2.items()})


def _solve_component(R, m: int, E: int, eigen):
    """Divide by homological eigenvalues; return (component, resonant scalar)."""
    if R is None or not any(R):
        return None, None
    rows = [r.coeffs() for r in R]
    width = max(len(c) for c in rows)
    out = [[fmpq(0)] * width for _ in range(E)]
    res = None
    for i in range(width):
        lam = eigen(i)
        vals = [c[i] if i < len(c) else fmpq(0) for c in rows]
        if lam == 0:
            if any(vals):
                res = tuple(vals)
            continue
        for e in range(E):
            if vals[e]:
                out[e][i] = vals[e] / lam
    comp = tuple(fmpq_poly(c) for c in out)
    return (comp if any(comp) else None), res


def _comp_terms(comp, m: int, J) -> dict:
    if comp is None:
        return {}
    rows = [c.coeffs() for c in comp]
    terms = {}
    for i in range(max(len(r) for r in rows)):
        vals = [r[i] if i < len(r) else fmpq(0) for r in rows]
        if any(vals):
            terms[(i, m - i)] = _unscalar(tuple(vals), J is not None)
    return terms


def saddle_values_nf(sys: SaddleSystem, K: int, steps: list | None = None) -> list[SaddleValueRecord]:
    if K < 1:
        raise ValueError("K must be at least 1")
    pi1, pi2 = _normal_form(sys, K, steps)
    zero = _zero_like(sys)
    out = []
    for k in range(1, K + 1):
        out.append(SaddleValueRecord(k, zero + pi1.get(k, 0) - pi2.get(k, 0), NORMAL_FORM))
    return out


def normal_form_coefficients(sys: SaddleSystem, K: int) -> tuple[dict, dict]:
    """The retained resonant coefficients (pi_{1,k}, pi_{2,k})."""
    return _normal_form(sys, K)


def saddle_values_integral(sys: SaddleSystem, K: int, with_H: bool = False):
    if K < 1:
        raise ValueError("K must be at least 1")
    p, q = sys.p, sys.q
    w = p + q
    D = (K + 1) * w
    P, Q = sys.nonlinear()
    Fc = _by_degree(P.terms, D - w + 1)
    Gc = _by_degree(Q.terms, D - w + 1)
    H: dict[int, dict] = {w: {(q, p): mpq(1)}}
    L: dict[int, object] = {}
    for m in range(w + 1, D + 1):
        S: dict = {}
        get = S.get
        for b in set(Fc) | set(Gc):
            Ha = H.get(m + 1 - b)
            if not Ha:
                continue
            Fb, Gb = Fc.get(b, {}), Gc.get(b, {})
            for (i, j), h in Ha.items():
                if i and Fb:
                    hi = h * i
                    for (i2, j2), c in Fb.items():
                        key = (i - 1 + i2, j + j2)
                        prev = get(key)
                        S[key] = hi * c if prev is None else prev + hi * c
                if j and Gb:
                    hj = h * j
                    for (i2, j2), c in Gb.items():
                        key = (i + i2, j - 1 + j2)
                        prev = get(key)
                        S[key] = hj * c if prev is None else prev + hj * c
        Hm = {}
        for (i, j), s in S.items():
            if not s:
                continue
            lam = p * i - q * j
            if lam == 0:
                L[i // q - 1] = s
            else:
                Hm[(i, j)] = -s / lam
        if Hm:
            H[m] = Hm
    zero = _zero_like(sys)
    records = [SaddleValueRecord(k, zero + L.get(k, 0), FIRST_INTEGRAL) for k in range(1, K + 1)]
    if with_H:
        terms = {}
        for comp in H.values():
            terms.update(comp)
        return records, BivarPoly(terms)
    return records


def first_nonzero(records) -> int | None:
    for rec in records:
        if rec.value:
            return rec.k
    return None


@dataclass(frozen=True)
class SaddleOrder:
    order: int | None
    K: int
    agree: bool
    nf_order: int | None = None
    integral_order: int | None = None

    def __str__(self):
        return str(self.order) if self.order is not None else f">={self.K + 1}"


def saddle_order(sys: SaddleSystem, K: int) -> SaddleOrder:
    a = first_nonzero(saddle_values_nf(sys, K))
    b = first_nonzero(saddle_values_integral(sys, K))
    found = [x for x in (a, b) if x is not None]
    return SaddleOrder(min(found) if found else None, K, a == b, a, b)


def rescale_unit(sys: SaddleSystem, cap: int) -> SaddleSystem:
    """Divide by (1 - U): x' = p x + P sum U^i, y' = -q y + Q sum U^i.

    ``cap`` bounds the weight (total degree minus one) of the kept terms,
    so a field exact through weight K(p+q) determines pi_1..pi_K.
    """
    if sys.unit is None or not sys.unit:
        return SaddleSystem(sys.p, sys.q, sys.P, sys.Q, None)
    if sys.unit.coeff(0, 0):
        raise SystemError_("unit factor U must have no constant term")
    low = min(d for d in (sys.P.min_degree, sys.Q.min_degree, 2) if d >= 0)
    series = geom_series(sys.unit, cap + 1 - low)
    return SaddleSystem(sys.p, sys.q, sys.P.mul(series, cap + 1), sys.Q.mul(series, cap + 1), None)


def default_max_order(sys: SaddleSystem) -> int:
    P, Q = sys.nonlinear()
    degs = {i + j for i, j in list(P.terms) + list(Q.terms)}
    if len(degs) == 1:
        n = degs.pop()
        return ((n - 1) // gcd(n - 1, sys.p + sys.q)) * (n + 2)
    return 12
