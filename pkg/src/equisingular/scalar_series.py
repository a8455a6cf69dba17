"""Exact truncated Laurent series in z over rational polynomial coefficients.

The scalar ground ring is Q[L, v, s, t]: multivariate polynomials over
arbitrary-precision rationals in a fixed symbol set (L plays the role of a
log-scale parameter, v a fiber coordinate, s a section jet, t a flow
parameter).  On top of that sits ``LaurentSeries``: finitely many pole terms
z^-p .. z^-1 plus a regular tail truncated above a fixed order N (default 6).
All arithmetic is exact; floats only ever appear through ``eval_numeric``.

Values are immutable after construction and all operations are pure, so they
can be shared freely between threads.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import comb

SYMBOLS = ("L", "v", "s", "t")
DEFAULT_TRUNC = 6

_ZERO_EXP = (0, 0, 0, 0)


class SeriesError(Exception):
    """Base class for scalar-series errors."""


class InvertNonUnit(SeriesError):
    """Leading coefficient is zero or not purely rational, so no inverse."""


class SelfReference(SeriesError):
    """A symbol substitution whose replacement mentions the symbol itself."""


class ZeroPoint(SeriesError):
    """Numeric evaluation of a pole at z = 0."""


def _fr(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def rational_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def rational_from_str(s: str) -> Fraction:
    num, _, den = s.partition("/")
    return Fraction(int(num), int(den) if den else 1)


class PolyCoeff:
    """A polynomial in the symbols L, v, s, t with Fraction coefficients.

    Stored sparsely as exponent-tuple -> Fraction with no zero entries;
    monomial order for display and serialization is graded-lexicographic.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for exps, value in terms.items():
                value = _fr(value)
                if value:
                    exps = tuple(int(e) for e in exps)
                    if len(exps) != len(SYMBOLS) or any(e < 0 for e in exps):
                        raise ValueError(f"bad exponent tuple {exps}")
                    clean[exps] = value
        self._terms = clean

    @classmethod
    def const(cls, value) -> "PolyCoeff":
        return cls({_ZERO_EXP: _fr(value)})

    @classmethod
    def symbol(cls, name: str, power: int = 1, coeff=1) -> "PolyCoeff":
        exps = [0, 0, 0, 0]
        exps[SYMBOLS.index(name)] = power
        return cls({tuple(exps): _fr(coeff)})

    @classmethod
    def zero(cls) -> "PolyCoeff":
        return cls()

    @classmethod
    def one(cls) -> "PolyCoeff":
        return cls.const(1)

    @staticmethod
    def promote(value) -> "PolyCoeff":
        if isinstance(value, PolyCoeff):
            return value
        return PolyCoeff.const(value)

    def sorted_terms(self):
        """Terms in graded-lexicographic order (total degree, then exponents)."""
        return sorted(self._terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_rational(self) -> bool:
        return not self._terms or set(self._terms) == {_ZERO_EXP}

    def constant_term(self) -> Fraction:
        return self._terms.get(_ZERO_EXP, Fraction(0))

    def coefficient(self, exps) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = PolyCoeff.const(other)
        if not isinstance(other, PolyCoeff):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PolyCoeff.const(other)
        if not isinstance(other, PolyCoeff):
            return NotImplemented
        out = dict(self._terms)
        for exps, value in other._terms.items():
            out[exps] = out.get(exps, Fraction(0)) + value
        return PolyCoeff(out)

    __radd__ = __add__

    def __neg__(self):
        return PolyCoeff({e: -v for e, v in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PolyCoeff.const(other)
        if not isinstance(other, PolyCoeff):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return PolyCoeff.promote(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = _fr(other)
            return PolyCoeff({e: v * q for e, v in self._terms.items()})
        if not isinstance(other, PolyCoeff):
            return NotImplemented
        out = {}
        for e1, v1 in self._terms.items():
            for e2, v2 in other._terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                out[key] = out.get(key, Fraction(0)) + v1 * v2
        return PolyCoeff(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (Fraction(1) / _fr(other))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = PolyCoeff.one()
        for _ in range(n):
            out = out * self
        return out

    def mentions(self, name: str) -> bool:
        i = SYMBOLS.index(name)
        return any(e[i] for e in self._terms)

    def substitute_shift(self, name: str, shift: "PolyCoeff") -> "PolyCoeff":
        """Replace the symbol by (symbol + shift), expanded binomially."""
        shift = PolyCoeff.promote(shift)
        if shift.mentions(name):
            raise SelfReference(f"shift for {name} mentions {name}")
        i = SYMBOLS.index(name)
        out = PolyCoeff.zero()
        for exps, value in self._terms.items():
            j = exps[i]
            rest = list(exps)
            rest[i] = 0
            base = PolyCoeff({tuple(rest): value})
            for m in range(j + 1):
                # (X + shift)^j expands with X^m shift^(j-m)
                term = base * comb(j, m) * (shift ** (j - m))
                term = term * PolyCoeff.symbol(name, m) if m else term
                out = out + term
        return out

    def substitute_zero(self, name: str) -> "PolyCoeff":
        """Drop every monomial containing the symbol (set it to 0)."""
        i = SYMBOLS.index(name)
        return PolyCoeff({e: v for e, v in self._terms.items() if not e[i]})

    def eval(self, assignments: dict) -> float:
        total = 0.0
        for exps, value in self._terms.items():
            term = float(value)
            for name, e in zip(SYMBOLS, exps):
                if e:
                    if name not in assignments:
                        raise ValueError(f"no value assigned to symbol {name}")
                    term *= float(assignments[name]) ** e
            total += term
        return total

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for exps, value in self.sorted_terms():
            factors = [str(value)]
            for name, e in zip(SYMBOLS, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)


class LaurentSeries:
    """Truncated Laurent series sum_k c_k z^k with PolyCoeff coefficients.

    Finitely many k < 0 (the pole part), all k <= trunc; multiplication and
    friends drop anything above z^trunc.  The pole order is read off the
    stored support, so the leading stored coefficient is always nonzero.
    """

    __slots__ = ("trunc", "_coeffs")

    def __init__(self, coeffs=None, trunc: int = DEFAULT_TRUNC):
        self.trunc = int(trunc)
        clean = {}
        if coeffs:
            for k, c in coeffs.items():
                c = PolyCoeff.promote(c)
                if c and k <= self.trunc:
                    clean[int(k)] = c
        self._coeffs = clean

    @classmethod
    def zero(cls, trunc: int = DEFAULT_TRUNC) -> "LaurentSeries":
        return cls({}, trunc)

    @classmethod
    def one(cls, trunc: int = DEFAULT_TRUNC) -> "LaurentSeries":
        return cls({0: PolyCoeff.one()}, trunc)

    @classmethod
    def from_scalar(cls, value, trunc: int = DEFAULT_TRUNC) -> "LaurentSeries":
        return cls({0: PolyCoeff.promote(value)}, trunc)

    @classmethod
    def z_power(cls, k: int, coeff=1, trunc: int = DEFAULT_TRUNC) -> "LaurentSeries":
        return cls({k: PolyCoeff.promote(coeff)}, trunc)

    @staticmethod
    def promote(value, trunc: int = DEFAULT_TRUNC) -> "LaurentSeries":
        if isinstance(value, LaurentSeries):
            return value
        return LaurentSeries.from_scalar(value, trunc)

    @property
    def pole_order(self) -> int:
        if not self._coeffs:
            return 0
        return max(0, -min(self._coeffs))

    def coefficient(self, k: int) -> PolyCoeff:
        return self._coeffs.get(k, PolyCoeff.zero())

    def items(self):
        return sorted(self._coeffs.items())

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def is_regular(self) -> bool:
        return self.pole_order == 0

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, PolyCoeff)):
            other = LaurentSeries.promote(other, self.trunc)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(frozenset(self._coeffs.items()))

    def _binary_trunc(self, other) -> int:
        return min(self.trunc, other.trunc)

    def __add__(self, other):
        if isinstance(other, (int, Fraction, PolyCoeff)):
            other = LaurentSeries.promote(other, self.trunc)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            out[k] = out.get(k, PolyCoeff.zero()) + c
        return LaurentSeries(out, self._binary_trunc(other))

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries({k: -c for k, c in self._coeffs.items()}, self.trunc)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, PolyCoeff)):
            other = LaurentSeries.promote(other, self.trunc)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return LaurentSeries.promote(other, self.trunc) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PolyCoeff)):
            c = PolyCoeff.promote(other)
            return LaurentSeries(
                {k: v * c for k, v in self._coeffs.items()}, self.trunc
            )
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        trunc = self._binary_trunc(other)
        out = {}
        for k1, c1 in self._coeffs.items():
            for k2, c2 in other._coeffs.items():
                k = k1 + k2
                if k <= trunc:
                    out[k] = out.get(k, PolyCoeff.zero()) + c1 * c2
        return LaurentSeries(out, trunc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / _fr(other))
        if isinstance(other, LaurentSeries):
            return self * other.invert()
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        out = LaurentSeries.one(self.trunc)
        for _ in range(n):
            out = out * self
        return out

    def invert(self) -> "LaurentSeries":
        """Inverse by geometric series; needs a purely rational leading term."""
        if not self._coeffs:
            raise InvertNonUnit("cannot invert the zero series")
        low = min(self._coeffs)
        lead = self._coeffs[low]
        if not lead.is_rational():
            raise InvertNonUnit(f"leading coefficient {lead!r} is not rational")
        c = lead.constant_term()
        # x = c z^low (1 + u) with valuation(u) >= 1, so 1/x is an
        # alternating geometric sum 1 - u + u^2 - ... times c^-1 z^-low.
        inv_lead = LaurentSeries.z_power(-low, Fraction(1) / c, self.trunc)
        u = inv_lead * self - LaurentSeries.one(self.trunc)
        total = LaurentSeries.one(self.trunc)
        power = LaurentSeries.one(self.trunc)
        sign = 1
        for _ in range(2 * self.trunc + abs(low) + 1):
            power = power * u
            sign = -sign
            if power.is_zero():
                break
            total = total + (power * Fraction(sign))
        return total * inv_lead

    def differentiate(self) -> "LaurentSeries":
        """d/dz, term by term: z^k -> k z^(k-1)."""
        return LaurentSeries(
            {k - 1: c * Fraction(k) for k, c in self._coeffs.items() if k != 0},
            self.trunc,
        )

    def pole_part(self) -> "LaurentSeries":
        """Strict pole part: the z^-p .. z^-1 portion (minimal subtraction)."""
        return LaurentSeries(
            {k: c for k, c in self._coeffs.items() if k < 0}, self.trunc
        )

    def regular_part(self) -> "LaurentSeries":
        return LaurentSeries(
            {k: c for k, c in self._coeffs.items() if k >= 0}, self.trunc
        )

    def shift_symbol(self, name: str, shift) -> "LaurentSeries":
        """Substitute symbol -> symbol + shift in every coefficient."""
        shift = PolyCoeff.promote(shift)
        return LaurentSeries(
            {k: c.substitute_shift(name, shift) for k, c in self._coeffs.items()},
            self.trunc,
        )

    def substitute_zero(self, name: str) -> "LaurentSeries":
        return LaurentSeries(
            {k: c.substitute_zero(name) for k, c in self._coeffs.items()},
            self.trunc,
        )

    def exp(self) -> "LaurentSeries":
        """exp of a series with valuation >= 1 (finite sum under truncation)."""
        if self.pole_order > 0 or self.coefficient(0):
            raise ValueError("exp needs a regular series with zero constant term")
        out = LaurentSeries.one(self.trunc)
        power = LaurentSeries.one(self.trunc)
        fact = 1
        for j in range(1, self.trunc + 1):
            power = power * self
            fact *= j
            if power.is_zero():
                break
            out = out + power * Fraction(1, fact)
        return out

    def eval_numeric(self, z0: float, assignments: dict | None = None) -> float:
        """Evaluate as a float; truncation error is O(z0^(trunc+1))."""
        assignments = assignments or {}
        if z0 == 0 and self.pole_order > 0:
            raise ZeroPoint("pole at z = 0")
        total = 0.0
        for k, c in self._coeffs.items():
            total += c.eval(assignments) * z0**k
        return total

    # --- serialization -------------------------------------------------

    def to_obj(self):
        coeffs = []
        for k, c in self.items():
            monomials = [
                {
                    "L": e[0],
                    "v": e[1],
                    "s": e[2],
                    "t": e[3],
                    "value": rational_str(q),
                }
                for e, q in c.sorted_terms()
            ]
            coeffs.append({"z": k, "monomials": monomials})
        return {"pole_order": self.pole_order, "coeffs": coeffs}

    @classmethod
    def from_obj(cls, obj, trunc: int = DEFAULT_TRUNC) -> "LaurentSeries":
        coeffs = {}
        for entry in obj["coeffs"]:
            terms = {}
            for mono in entry["monomials"]:
                exps = tuple(int(mono.get(name, 0)) for name in SYMBOLS)
                terms[exps] = rational_from_str(mono["value"])
            coeffs[int(entry["z"])] = PolyCoeff(terms)
        return cls(coeffs, trunc)

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str, trunc: int = DEFAULT_TRUNC) -> "LaurentSeries":
        return cls.from_obj(json.loads(text), trunc)

    def __repr__(self):
        if not self._coeffs:
            return "LaurentSeries(0)"
        parts = []
        for k, c in self.items():
            body = repr(c)
            if "+" in body:
                body = f"({body})"
            if k == 0:
                parts.append(body)
            else:
                parts.append(f"{body}*z^{k}")
        return "LaurentSeries(" + " + ".join(parts) + ")"
