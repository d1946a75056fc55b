"""Exact sparse bivariate polynomials and truncated epsilon-jets.

Coefficients are ``gmpy2.mpq`` rationals or :class:`Jet` objects.  Values
are immutable; every operation returns a fresh object.  Degree caps are
applied inside the multiplication loops, never as a post-filter.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Mapping

import gmpy2
from gmpy2 import mpq

Rational = type(mpq(0))

__all__ = [
    "Rational", "Jet", "BivarPoly", "JetOrderError", "to_rational",
    "poly_add", "poly_mul", "poly_pow", "coeff", "geom_series",
    "format_scalar", "parse_scalar",
]


class JetOrderError(ValueError):
    pass


def to_rational(value) -> Rational:
    """Coerce int, str ("num/den"), Fraction or mpq to an exact mpq."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(ch in text for ch in ".eE"):
            raise ValueError(f"not an exact rational literal: {value!r}")
        return mpq(text)
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return mpq(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


class Jet:
    """Truncated power series c_0 + c_1 eps + ... + c_J eps^J + O(eps^(J+1))."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable, order: int | None = None):
        c = [to_rational(v) for v in coeffs]
        if order is not None:
            if order < 0:
                raise ValueError("jet order must be nonnegative")
            c = (c + [mpq(0)] * (order + 1))[: order + 1]
        if not c:
            raise ValueError("a jet needs at least one coefficient")
        self.c = tuple(c)

    @classmethod
    def _raw(cls, c: tuple) -> "Jet":
        obj = object.__new__(cls)
        obj.c = c
        return obj

    @classmethod
    def constant(cls, value, order: int) -> "Jet":
        return cls._raw((to_rational(value),) + (mpq(0),) * order)

    @classmethod
    def eps(cls, order: int) -> "Jet":
        """The jet of eps itself (zero if order is 0)."""
        c = [mpq(0)] * (order + 1)
        if order >= 1:
            c[1] = mpq(1)
        return cls._raw(tuple(c))

    @property
    def order(self) -> int:
        return len(self.c) - 1

    def _check(self, other: "Jet") -> None:
        if len(other.c) != len(self.c):
            raise JetOrderError(f"jet order mismatch: {self.order} vs {other.order}")

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return Jet._raw(tuple(a + b for a, b in zip(self.c, other.c)))
        return Jet._raw((self.c[0] + other,) + self.c[1:])

    __radd__ = __add__

    def __neg__(self):
        return Jet._raw(tuple(-a for a in self.c))

    def __sub__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return Jet._raw(tuple(a - b for a, b in zip(self.c, other.c)))
        return Jet._raw((self.c[0] - other,) + self.c[1:])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            a, b = self.c, other.c
            n = len(a)
            if n == 2:
                return Jet._raw((a[0] * b[0], a[0] * b[1] + a[1] * b[0]))
            out = []
            for k in range(n):
                s = mpq(0)
                for i in range(k + 1):
                    if a[i] and b[k - i]:
                        s += a[i] * b[k - i]
                out.append(s)
            return Jet._raw(tuple(out))
        return Jet._raw(tuple(x * other for x in self.c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            raise TypeError("division by a jet is not supported")
        return Jet._raw(tuple(x / other for x in self.c))

    def __bool__(self):
        return any(self.c)

    def __eq__(self, other):
        if isinstance(other, Jet):
            return self.c == other.c
        if isinstance(other, (int, Rational)) or hasattr(other, "denominator"):
            return self.c[0] == other and not any(self.c[1:])
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise JetOrderError("cannot raise the order of a jet by truncation")
        return Jet._raw(self.c[: order + 1])

    def __getitem__(self, k: int) -> Rational:
        return self.c[k]

    def __repr__(self):
        return f"Jet({[str(x) for x in self.c]})"


def format_scalar(value) -> str | list[str]:
    if isinstance(value, Jet):
        return [str(x) for x in value.c]
    return str(value)


def parse_scalar(value):
    if isinstance(value, list):
        return Jet(value)
    return to_rational(value)


def _is_zero(c) -> bool:
    return not c


def _grlex_key(exp: tuple[int, int]):
    # graded lex with x > y, highest first
    return (-(exp[0] + exp[1]), -exp[0])


class BivarPoly:
    """Sparse polynomial sum c_ij x^i y^j with no stored zero coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple[int, int], object] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        d: dict[tuple[int, int], object] = {}
        for (i, j), c in items:
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent ({i}, {j})")
            if not isinstance(c, Jet):
                c = to_rational(c)
            key = (int(i), int(j))
            if key in d:
                c = d[key] + c
            d[key] = c
        self._terms = {k: v for k, v in d.items() if not _is_zero(v)}

    @classmethod
    def _wrap(cls, d: dict) -> "BivarPoly":
        obj = object.__new__(cls)
        obj._terms = d
        return obj

    @classmethod
    def monomial(cls, i: int, j: int, c=1) -> "BivarPoly":
        return cls({(i, j): c})

    @classmethod
    def one(cls) -> "BivarPoly":
        return cls({(0, 0): 1})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> Iterator:
        for k in sorted(self._terms, key=_grlex_key):
            yield k, self._terms[k]

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, BivarPoly):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        if not self._terms:
            return "BivarPoly(0)"
        parts = []
        for (i, j), c in self.items():
            mono = "*".join(s for s in (
                "" if i == 0 else ("x" if i == 1 else f"x^{i}"),
                "" if j == 0 else ("y" if j == 1 else f"y^{j}"),
            ) if s)
            parts.append(f"({format_scalar(c)})" + (f"*{mono}" if mono else ""))
        return "BivarPoly(" + " + ".join(parts) + ")"

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((i + j for i, j in self._terms), default=-1)

    @property
    def min_degree(self) -> int:
        return min((i + j for i, j in self._terms), default=-1)

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degs = {i + j for i, j in self._terms}
        if len(degs) > 1:
            return False
        return degree is None or not degs or degs == {degree}

    def coeff(self, i: int, j: int):
        return self._terms.get((i, j), 0)

    def homogeneous_part(self, m: int) -> "BivarPoly":
        return BivarPoly._wrap({k: v for k, v in self._terms.items() if k[0] + k[1] == m})

    def truncate(self, cap: int) -> "BivarPoly":
        return BivarPoly._wrap({k: v for k, v in self._terms.items() if k[0] + k[1] <= cap})

    def map_coeffs(self, fn) -> "BivarPoly":
        return BivarPoly._wrap({k: c for k, v in self._terms.items()
                                if not _is_zero(c := fn(v))})

    def jet_order(self) -> int | None:
        orders = {v.order for v in self._terms.values() if isinstance(v, Jet)}
        if len(orders) > 1:
            raise JetOrderError(f"mixed jet orders {sorted(orders)}")
        return orders.pop() if orders else None

    def __add__(self, other):
        if not isinstance(other, BivarPoly):
            other = BivarPoly.one().scale(other) if other else BivarPoly()
        d = dict(self._terms)
        for k, v in other._terms.items():
            if k in d:
                s = d[k] + v
                if _is_zero(s):
                    del d[k]
                else:
                    d[k] = s
            else:
                d[k] = v
        return BivarPoly._wrap(d)

    __radd__ = __add__

    def __neg__(self):
        return BivarPoly._wrap({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "BivarPoly":
        if not isinstance(c, Jet):
            c = to_rational(c)
        return BivarPoly._wrap({k: s for k, v in self._terms.items()
                                if not _is_zero(s := v * c)})

    def __mul__(self, other):
        if isinstance(other, BivarPoly):
            return self.mul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def mul(self, other: "BivarPoly", cap: int | None = None) -> "BivarPoly":
        return BivarPoly._wrap(_mul_dicts(self._terms, other._terms, cap))

    def __pow__(self, k: int):
        return self.pow(k)

    def pow(self, k: int, cap: int | None = None) -> "BivarPoly":
        if k < 0:
            raise ValueError("negative power")
        result = {(0, 0): mpq(1)}
        base = self._terms
        while k:
            if k & 1:
                result = _mul_dicts(result, base, cap)
            k >>= 1
            if k:
                base = _mul_dicts(base, base, cap)
        return BivarPoly._wrap(result)

    def to_records(self) -> list[dict]:
        return [{"i": i, "j": j, "c": format_scalar(c)} for (i, j), c in self.items()]

    @classmethod
    def from_records(cls, records: Iterable[Mapping]) -> "BivarPoly":
        terms = []
        for pos, rec in enumerate(records):
            try:
                i, j, c = rec["i"], rec["j"], rec["c"]
            except (KeyError, TypeError) as exc:
                raise ValueError(f"term #{pos}: expected an object with keys i, j, c") from exc
            if not isinstance(i, int) or not isinstance(j, int) or isinstance(i, bool) or isinstance(j, bool):
                raise ValueError(f"term #{pos}: exponents must be integers")
            if isinstance(c, (float,)):
                raise ValueError(f"term #{pos}: coefficient must be an exact string, got float")
            try:
                terms.append(((i, j), parse_scalar(c)))
            except (ValueError, TypeError) as exc:
                raise ValueError(f"term #{pos}: {exc}") from exc
        return cls(terms)


def _mul_dicts(a: dict, b: dict, cap: int | None) -> dict:
    if len(a) > len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    if cap is None:
        for (i1, j1), c1 in a.items():
            for (i2, j2), c2 in b.items():
                key = (i1 + i2, j1 + j2)
                prev = get(key)
                out[key] = c1 * c2 if prev is None else prev + c1 * c2
    else:
        bl = sorted(b.items(), key=lambda kv: kv[0][0] + kv[0][1])
        for (i1, j1), c1 in a.items():
            room = cap - i1 - j1
            if room < 0:
                continue
            for (i2, j2), c2 in bl:
                if i2 + j2 > room:
                    break
                key = (i1 + i2, j1 + j2)
                prev = get(key)
                out[key] = c1 * c2 if prev is None else prev + c1 * c2
    return {k: v for k, v in out.items() if v}


def poly_add(a: BivarPoly, b: BivarPoly) -> BivarPoly:
    return a + b


def poly_mul(a: BivarPoly, b: BivarPoly, cap: int | None = None) -> BivarPoly:
    return a.mul(b, cap)


def poly_pow(a: BivarPoly, k: int, cap: int | None = None) -> BivarPoly:
    return a.pow(k, cap)


def coeff(a: BivarPoly, i: int, j: int):
    return a.coeff(i, j)


def geom_series(U: BivarPoly, cap: int) -> BivarPoly:
    """Sum of U^i truncated to total degree <= cap (U must vanish at 0)."""
    if U.coeff(0, 0):
        raise ValueError("geometric series needs U(0,0) = 0")
    total = {(0, 0): mpq(1)}
    if not U or cap < 1:
        return BivarPoly._wrap(total if cap >= 0 else {})
    power = {(0, 0): mpq(1)}
    u = U.truncate(cap)._terms
    for _ in range(cap // U.min_degree):
        power = _mul_dicts(power, u, cap)
        if not power:
            break
        for k, v in power.items():
            prev = total.get(k)
            total[k] = v if prev is None else prev + v
    return BivarPoly._wrap({k: v for k, v in total.items() if v})
