"""First-order (in eps) saddle values of perturbed families.

Two forms are supported::

    pertsys1:  x' = p x + eps p P,            y' = -q y + eps q Q
    pertsys2:  x' = p x + eps p P sum U^i,    y' = -q y + eps q Q sum U^i

The second is the division of the polynomial family
x' = p x (1 - U) + eps p P, y' = -q y (1 - U) + eps q Q by the unit 1 - U;
:meth:`PerturbFamily.unit_system` returns that polynomial form.
"""
from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .exactpoly import BivarPoly, Jet, geom_series
from .saddle import SaddleSystem, saddle_values_nf

PERTSYS1 = "pertsys1"
PERTSYS2 = "pertsys2"


@dataclass(frozen=True)
class PerturbFamily:
    p: int
    q: int
    P: BivarPoly
    Q: BivarPoly
    U: BivarPoly | None = None

    def __post_init__(self):
        for name, poly in (("P", self.P), ("Q", self.Q)):
            if poly and poly.min_degree < 2:
                raise ValueError(f"{name} must contain only nonlinear terms")
            if poly.jet_order() is not None:
                raise ValueError(f"{name} must have rational coefficients; eps enters linearly")
        if self.U is not None and self.U.coeff(0, 0):
            raise ValueError("U must have no constant term")

    @property
    def eps_form(self) -> str:
        return PERTSYS2 if self.U else PERTSYS1

    def _low_degree(self) -> int:
        return min(d for d in (self.P.min_degree, self.Q.min_degree, 2) if d >= 0)

    def system(self, J: int, cap: int) -> SaddleSystem:
        """The pertsys1/pertsys2 field with Jet coefficients, exact through weight ``cap``."""
        eps = Jet.eps(J)
        P, Q = self.P, self.Q
        if self.U:
            series = geom_series(self.U, cap + 1 - self._low_degree())
            P, Q = P.mul(series, cap + 1), Q.mul(series, cap + 1)
        return SaddleSystem(self.p, self.q, P.scale(eps * self.p), Q.scale(eps * self.q))

    def unit_system(self, J: int) -> SaddleSystem:
        """x' = p x (1 - U) + eps p P, y' = -q y (1 - U) + eps q Q with Jet coefficients."""
        eps = Jet.eps(J)
        U = self.U if self.U is not None else BivarPoly()
        return SaddleSystem(self.p, self.q, self.P.scale(eps * self.p), self.Q.scale(eps * self.q),
                            U.map_coeffs(lambda c: Jet.constant(c, J)))


def linear_saddle_coeff(fam: PerturbFamily, k: int) -> mpq:
    """c_k + d_k: the resonant coefficients of x (x^q y^p)^k in P and y (x^q y^p)^k in Q."""
    if k < 1:
        raise ValueError("k must be positive")
    p, q = fam.p, fam.q
    return mpq(fam.P.coeff(1 + k * q, k * p)) + mpq(fam.Q.coeff(k * q, 1 + k * p))


def _extraction_poly(fam: PerturbFamily) -> BivarPoly:
    p, q = fam.p, fam.q
    return (BivarPoly.monomial(q - 1, p).mul(fam.P)
            + BivarPoly.monomial(q, p - 1).mul(fam.Q))


def linear_saddle_values(fam: PerturbFamily, K: int) -> list[mpq]:
    """eps-linear parts of L_1..L_K, read off (x^(q-1) y^p P + x^q y^(p-1) Q) sum U^i."""
    if K < 1:
        raise ValueError("K must be positive")
    p, q = fam.p, fam.q
    top = (K + 1) * (p + q)
    base = _extraction_poly(fam)
    if fam.U:
        low = base.min_degree if base else top
        base = base.mul(geom_series(fam.U, top - low), top)
    return [mpq(base.coeff((k + 1) * q, (k + 1) * p)) for k in range(1, K + 1)]


def linear_saddle_value(fam: PerturbFamily, k: int) -> mpq:
    if k < 1:
        raise ValueError("k must be positive")
    return linear_saddle_values(fam, k)[k - 1]


def jet_saddle_values(fam: PerturbFamily, K: int, J: int = 1) -> list[Jet]:
    """Full normal-form engine on the family with eps carried as a jet of order J."""
    if K < 1 or J < 1:
        raise ValueError("K and J must be positive")
    sys = fam.system(J, K * (fam.p + fam.q))
    return [rec.value for rec in saddle_values_nf(sys, K)]
