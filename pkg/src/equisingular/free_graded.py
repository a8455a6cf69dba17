"""Truncated series on noncommutative words over graded generators.

Words are tuples of positive integers (k1, ..., kn); the entry k names the
degree-k generator e_{-k} and the word degree is the sum of its entries.
``NCSeries`` is a sparse map word -> coefficient truncated at total degree N.
Coefficients are duck-typed: Fraction, PolyCoeff, LaurentSeries and plain
floats (for numeric oracles) all work, as long as they support +, *, == and
truth testing.

Group elements are series with unit constant term; Lie elements are series
whose coefficient functional kills proper shuffles (Ree's criterion), which
is how primitivity is checked without ever choosing a bracket basis.
"""

from __future__ import annotations

from fractions import Fraction

from .scalar_series import DEFAULT_TRUNC, LaurentSeries, PolyCoeff

Word = tuple

EMPTY_WORD: Word = ()


class BadConstantTerm(Exception):
    """exp needs constant term 0, log needs constant term 1."""


def word_degree(word: Word) -> int:
    return sum(word)


def word_key(word: Word):
    """Canonical sort key: by degree, then lexicographic on the entries."""
    return (word_degree(word), word)


def all_words(max_degree: int, include_empty: bool = False) -> list:
    """All words of degree <= max_degree in canonical order."""
    out = [EMPTY_WORD] if include_empty else []

    def rec(prefix, remaining):
        for k in range(1, remaining + 1):
            w = prefix + (k,)
            out.append(w)
            rec(w, remaining - k)

    rec(EMPTY_WORD, max_degree)
    out.sort(key=word_key)
    return out


def _is_zero(c) -> bool:
    if isinstance(c, float):
        return c == 0.0
    return not c


def _eq(a, b) -> bool:
    return a == b


class NCSeries:
    """Sparse noncommutative series, truncated at total word degree ``trunc``."""

    __slots__ = ("trunc", "_coeffs")

    def __init__(self, coeffs=None, trunc: int = DEFAULT_TRUNC):
        self.trunc = int(trunc)
        clean = {}
        if coeffs:
            for word, c in coeffs.items():
                word = tuple(int(k) for k in word)
                if any(k < 1 for k in word):
                    raise ValueError(f"word entries must be >= 1: {word}")
                if word_degree(word) <= self.trunc and not _is_zero(c):
                    clean[word] = c
        self._coeffs = clean

    @classmethod
    def zero(cls, trunc: int = DEFAULT_TRUNC) -> "NCSeries":
        return cls({}, trunc)

    @classmethod
    def one(cls, trunc: int = DEFAULT_TRUNC) -> "NCSeries":
        return cls({EMPTY_WORD: Fraction(1)}, trunc)

    @classmethod
    def generator(cls, n: int, coeff=Fraction(1), trunc: int = DEFAULT_TRUNC) -> "NCSeries":
        """The degree-n generator e_{-n} as a series."""
        return cls({(n,): coeff}, trunc)

    def coefficient(self, word: Word):
        return self._coeffs.get(tuple(word), Fraction(0))

    def terms(self):
        return sorted(self._coeffs.items(), key=lambda kv: word_key(kv[0]))

    def support(self):
        return sorted(self._coeffs, key=word_key)

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def max_degree(self) -> int:
        return max((word_degree(w) for w in self._coeffs), default=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NCSeries):
            return NotImplemented
        words = set(self._coeffs) | set(other._coeffs)
        for w in words:
            a = self._coeffs.get(w)
            b = other._coeffs.get(w)
            if a is None:
                if not _is_zero(b) and not _eq(b, 0):
                    return False
            elif b is None:
                if not _is_zero(a) and not _eq(a, 0):
                    return False
            elif not _eq(a, b):
                return False
        return True

    def _binary_trunc(self, other) -> int:
        return min(self.trunc, other.trunc)

    def __add__(self, other):
        if not isinstance(other, NCSeries):
            return NotImplemented
        out = dict(self._coeffs)
        for w, c in other._coeffs.items():
            out[w] = out[w] + c if w in out else c
        return NCSeries(out, self._binary_trunc(other))

    def __neg__(self):
        return NCSeries({w: -c for w, c in self._coeffs.items()}, self.trunc)

    def __sub__(self, other):
        if not isinstance(other, NCSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        """Concatenation product, truncated at total degree."""
        if not isinstance(other, NCSeries):
            return NotImplemented
        trunc = self._binary_trunc(other)
        out = {}
        for u, cu in self._coeffs.items():
            du = word_degree(u)
            if du > trunc:
                continue
            for v, cv in other._coeffs.items():
                if du + word_degree(v) > trunc:
                    continue
                w = u + v
                c = cu * cv
                out[w] = out[w] + c if w in out else c
        return NCSeries(out, trunc)

    def scale(self, factor) -> "NCSeries":
        """Multiply every coefficient by a scalar from the coefficient ring."""
        return NCSeries({w: factor * c for w, c in self._coeffs.items()}, self.trunc)

    def map_coefficients(self, fn) -> "NCSeries":
        return NCSeries({w: fn(c) for w, c in self._coeffs.items()}, self.trunc)

    def homogeneous_component(self, n: int) -> "NCSeries":
        return NCSeries(
            {w: c for w, c in self._coeffs.items() if word_degree(w) == n}, self.trunc
        )

    def graded_components(self) -> dict:
        """Nonzero homogeneous parts, keyed by degree (degree 0 excluded)."""
        out = {}
        for w, c in self._coeffs.items():
            n = word_degree(w)
            if n:
                out.setdefault(n, {})[w] = c
        return {n: NCSeries(d, self.trunc) for n, d in sorted(out.items())}

    def without_unit(self) -> "NCSeries":
        return NCSeries(
            {w: c for w, c in self._coeffs.items() if w != EMPTY_WORD}, self.trunc
        )

    # --- grading -------------------------------------------------------

    def apply_grading(self) -> "NCSeries":
        """The derivation Y: multiply each word by its degree."""
        return NCSeries(
            {w: c * Fraction(word_degree(w)) for w, c in self._coeffs.items()},
            self.trunc,
        )

    def grade_scale(self, u) -> "NCSeries":
        """u^Y: multiply the degree-n component by u^n.

        u may be a Fraction, a float, a PolyCoeff (e.g. the symbol v) or a
        LaurentSeries (e.g. a section value alpha(z)).
        """
        out = {}
        cache = [None]  # cache[n] = u^n, None standing for u^0 = 1
        for w, c in self._coeffs.items():
            n = word_degree(w)
            while len(cache) <= n:
                prev = cache[-1]
                cache.append(u if prev is None else prev * u)
            out[w] = c if cache[n] is None else cache[n] * c
        return NCSeries(out, self.trunc)

    def theta_action(self, exponent: LaurentSeries) -> "NCSeries":
        """theta flow: multiply degree n by exp(n * exponent), exponent in z."""
        return self.grade_scale(exponent.exp())

    # --- exp / log / inverse -------------------------------------------

    def exp(self) -> "NCSeries":
        c0 = self.coefficient(EMPTY_WORD)
        if not _is_zero(c0) and not _eq(c0, 0):
            raise BadConstantTerm("exp needs zero constant term")
        out = NCSeries.one(self.trunc)
        power = NCSeries.one(self.trunc)
        fact = 1
        for j in range(1, self.trunc + 1):
            power = power * self
            fact *= j
            if power.is_zero():
                break
            out = out + power.scale(Fraction(1, fact))
        return out

    def log(self) -> "NCSeries":
        c0 = self.coefficient(EMPTY_WORD)
        if not _eq(c0, 1):
            raise BadConstantTerm("log needs constant term 1")
        x = self.without_unit()
        out = NCSeries.zero(self.trunc)
        power = NCSeries.one(self.trunc)
        for j in range(1, self.trunc + 1):
            power = power * x
            if power.is_zero():
                break
            out = out + power.scale(Fraction((-1) ** (j + 1), j))
        return out

    def group_inverse(self) -> "NCSeries":
        c0 = self.coefficient(EMPTY_WORD)
        if not _eq(c0, 1):
            raise BadConstantTerm("group inverse needs constant term 1")
        x = self.without_unit()
        out = NCSeries.one(self.trunc)
        power = NCSeries.one(self.trunc)
        sign = 1
        for _ in range(self.trunc + 1):
            power = power * x
            sign = -sign
            if power.is_zero():
                break
            out = out + power.scale(Fraction(sign))
        return out

    def __repr__(self):
        if not self._coeffs:
            return "NCSeries(0)"
        bits = []
        for w, c in self.terms()[:12]:
            name = "1" if w == EMPTY_WORD else "e" + "e".join(str(k) for k in w)
            bits.append(f"({c!r})*{name}")
        tail = " + ..." if len(self._coeffs) > 12 else ""
        return "NCSeries(" + " + ".join(bits) + tail + ")"


def concat_mul(x: NCSeries, y: NCSeries) -> NCSeries:
    return x * y


def bracket(x: NCSeries, y: NCSeries) -> NCSeries:
    """Lie bracket xy - yx in the concatenation algebra."""
    return x * y - y * x


def shuffle(u: Word, w: Word, trunc: int = DEFAULT_TRUNC) -> NCSeries:
    """Sum over all riffle shuffles of two words, with multiplicity."""
    u, w = tuple(u), tuple(w)
    out = {}

    def rec(a, b, prefix):
        if not a:
            word = prefix + b
            out[word] = out.get(word, 0) + 1
            return
        if not b:
            word = prefix + a
            out[word] = out.get(word, 0) + 1
            return
        rec(a[1:], b, prefix + (a[0],))
        rec(a, b[1:], prefix + (b[0],))

    rec(u, w, EMPTY_WORD)
    return NCSeries({word: Fraction(m) for word, m in out.items()}, trunc)


def _shuffle_pairing(x: NCSeries, u: Word, w: Word):
    """< x, u shuffle w > computed through the shuffle multiplicities."""
    total = None
    for word, mult in shuffle(u, w, trunc=max(x.trunc, word_degree(u) + word_degree(w))).terms():
        contribution = x.coefficient(word) * mult
        total = contribution if total is None else total + contribution
    return Fraction(0) if total is None else total


def is_grouplike(g: NCSeries) -> bool:
    """True iff g(u shuffle w) = g(u) g(w) for all nonempty pairs within trunc."""
    if not _eq(g.coefficient(EMPTY_WORD), 1):
        return False
    words = all_words(g.trunc - 1)
    for u in words:
        du = word_degree(u)
        for w in words:
            if du + word_degree(w) > g.trunc:
                continue
            if not _eq(_shuffle_pairing(g, u, w), g.coefficient(u) * g.coefficient(w)):
                return False
    return True


def is_primitive(x: NCSeries) -> bool:
    """Ree's criterion: the functional vanishes on all proper shuffles."""
    c0 = x.coefficient(EMPTY_WORD)
    if not _is_zero(c0) and not _eq(c0, 0):
        return False
    words = all_words(x.trunc - 1)
    for u in words:
        du = word_degree(u)
        for w in words:
            if du + word_degree(w) > x.trunc:
                continue
            if not _eq(_shuffle_pairing(x, u, w), 0):
                return False
    return True


def grouplike_check(g: NCSeries) -> bool:
    return is_grouplike(g)


def birkhoff_series(g: NCSeries):
    """Birkhoff decomposition of a group-like series with Laurent coefficients.

    Returns (minus, plus) with g = minus^-1 * plus, computed word by word in
    increasing degree by minimal subtraction:

        minus(w) = -T[ g(w) + sum_{w=uv} minus(u) g(v) ]
        plus(w)  = (1-T)[ same bracket ]

    where T is the strict pole-part projection.
    """
    if not _eq(g.coefficient(EMPTY_WORD), 1):
        raise BadConstantTerm("Birkhoff decomposition needs constant term 1")
    trunc = g.trunc
    minus = {}
    plus = {}
    for w in all_words(trunc):
        val = g.coefficient(w)
        bar = LaurentSeries.promote(val, trunc)
        for i in range(1, len(w)):
            u, v = w[:i], w[i:]
            if u in minus:
                bar = bar + minus[u] * LaurentSeries.promote(g.coefficient(v), trunc)
        m = -bar.pole_part()
        p = bar.regular_part()
        if m:
            minus[w] = m
        if p:
            plus[w] = p
    one = Fraction(1)
    minus[EMPTY_WORD] = one
    plus[EMPTY_WORD] = one
    return NCSeries(minus, trunc), NCSeries(plus, trunc)


def series_to_laurent_coeffs(x: NCSeries, trunc: int | None = None) -> NCSeries:
    """Promote every coefficient to a LaurentSeries (identity on such)."""
    t = x.trunc if trunc is None else trunc
    return x.map_coefficients(lambda c: LaurentSeries.promote(c, t))


# --- serialization -----------------------------------------------------


def ncseries_to_obj(x: NCSeries):
    from .scalar_series import rational_str

    terms = []
    for w, c in x.terms():
        if isinstance(c, LaurentSeries):
            coeff = c.to_obj()
        elif isinstance(c, (int, Fraction)):
            coeff = rational_str(Fraction(c))
        elif isinstance(c, PolyCoeff):
            coeff = LaurentSeries({0: c}, x.trunc).to_obj()
        else:
            raise TypeError(f"cannot serialize coefficient {c!r}")
        terms.append({"word": list(w), "coeff": coeff})
    return {"trunc": x.trunc, "terms": terms}


def ncseries_from_obj(obj) -> NCSeries:
    from .scalar_series import rational_from_str

    trunc = int(obj["trunc"])
    coeffs = {}
    for entry in obj["terms"]:
        word = tuple(int(k) for k in entry["word"])
        raw = entry["coeff"]
        if isinstance(raw, str):
            coeffs[word] = rational_from_str(raw)
        else:
            coeffs[word] = LaurentSeries.from_obj(raw, trunc)
    return NCSeries(coeffs, trunc)
