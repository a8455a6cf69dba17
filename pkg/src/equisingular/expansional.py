"""Time-ordered exponentials with exact iterated integrals for graded kernels.

A graded kernel is built from a Lie series beta = sum of homogeneous parts
beta_n.  Two flows appear:

* ``theta_flow``:  alpha(t) dt with the degree-n part carrying e^(-n t); this
  is the flow of the grading automorphism group.
* ``power_flow``:  alpha(u) du/u with the degree-n part carrying u^(n-1) du;
  this is the radial flow u^Y(beta) du/u on the fiber.

The time-ordered exponential Te over [a, b] is the solution of dA = A alpha
with A = 1 at the lower bound; its word coefficients are iterated integrals
over the ordered simplex, computed here by exact antiderivative recursion
(polynomial antiderivatives for power flows, exponential sums for theta
flows).  Integration bounds may be exact rationals, +infinity (theta only),
the fiber symbol v, or a regular z-series such as -zL or a section value.

Both orientations of a bounds pair are meaningful: Te over [b, a] is the
group inverse of Te over [a, b], consistent with the composition law
Te[a,c] = Te[a,b] Te[b,c].
"""

from __future__ import annotations

import math
from fractions import Fraction

from .free_graded import (
    EMPTY_WORD,
    NCSeries,
    all_words,
    birkhoff_series,
    is_grouplike,
    word_degree,
)
from .scalar_series import DEFAULT_TRUNC, LaurentSeries, PolyCoeff

INF = math.inf


class DivergentBound(Exception):
    """An infinite bound where the integrand does not decay."""


class NotGrouplike(Exception):
    pass


class NotPolePure(Exception):
    pass


class ExpSum:
    """Exact finite sums  sum_r c_r e^(-r)  with rational r >= 0.

    Internal value type for theta-flow integrals with rational bounds; the
    keys are the literal exponents, so arithmetic needs no relations between
    different exponentials.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for r, c in terms.items():
                c = Fraction(c)
                if c:
                    clean[Fraction(r)] = c
        self._terms = clean

    @classmethod
    def constant(cls, c) -> "ExpSum":
        return cls({Fraction(0): Fraction(c)})

    @staticmethod
    def promote(value) -> "ExpSum":
        if isinstance(value, ExpSum):
            return value
        return ExpSum.constant(value)

    def items(self):
        return sorted(self._terms.items())

    def is_rational(self) -> bool:
        return set(self._terms) <= {Fraction(0)}

    def constant_term(self) -> Fraction:
        return self._terms.get(Fraction(0), Fraction(0))

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExpSum.constant(other)
        if not isinstance(other, ExpSum):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        other = ExpSum.promote(other)
        out = dict(self._terms)
        for r, c in other._terms.items():
            out[r] = out.get(r, Fraction(0)) + c
        return ExpSum(out)

    __radd__ = __add__

    def __neg__(self):
        return ExpSum({r: -c for r, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-ExpSum.promote(other))

    def __rsub__(self, other):
        return ExpSum.promote(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ExpSum({r: c * other for r, c in self._terms.items()})
        if not isinstance(other, ExpSum):
            return NotImplemented
        out = {}
        for r1, c1 in self._terms.items():
            for r2, c2 in other._terms.items():
                r = r1 + r2
                out[r] = out.get(r, Fraction(0)) + c1 * c2
        return ExpSum(out)

    __rmul__ = __mul__

    def to_float(self) -> float:
        return sum(float(c) * math.exp(-float(r)) for r, c in self._terms.items())

    def __repr__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"{c}*exp(-{r})" for r, c in self.items())


class GradedKernel:
    """A flow kernel: kind in {theta_flow, power_flow} plus a Lie series beta.

    beta must have no constant term; its homogeneous parts beta_n are read
    off the word degrees.  Coefficients may be rational or Laurent series
    (the latter is how invariant connections feed their b-part back in).
    """

    __slots__ = ("kind", "beta", "components")

    def __init__(self, kind: str, beta: NCSeries):
        if kind not in ("theta_flow", "power_flow"):
            raise ValueError(f"unknown kernel kind {kind!r}")
        if beta.coefficient(EMPTY_WORD):
            raise ValueError("kernel series must have zero constant term")
        self.kind = kind
        self.beta = beta
        self.components = beta.graded_components()

    def degrees(self):
        return sorted(self.components)


def theta_kernel(beta: NCSeries) -> GradedKernel:
    return GradedKernel("theta_flow", beta)


def power_kernel(beta: NCSeries) -> GradedKernel:
    return GradedKernel("power_flow", beta)


# --- exact iterated integrals -------------------------------------------


def _power_eval(poly, upper, trunc):
    """Evaluate a polynomial state {m: c} at the upper bound."""
    if upper is INF:
        raise DivergentBound("power flow with an infinite bound")
    if isinstance(upper, str):
        if upper != "v":
            raise ValueError(f"unknown symbolic bound {upper!r}")
        out = PolyCoeff.zero()
        for m, c in poly.items():
            out = out + PolyCoeff.symbol("v", m, 1) * c
        return out
    if isinstance(upper, LaurentSeries):
        out = LaurentSeries.zero(trunc)
        for m, c in poly.items():
            out = out + (upper**m) * c
        return out
    q = Fraction(upper)
    total = Fraction(0)
    for m, c in poly.items():
        total += c * q**m
    return total


def power_iterated_integral(word, lower, upper, trunc: int = DEFAULT_TRUNC):
    """Integral of u1^(k1-1)...un^(kn-1) over lower<=u1<=...<=un<=upper.

    The lower bound must be a rational; the upper bound may be a rational,
    the symbol "v", or a regular LaurentSeries.  For lower=0 the value for a
    single letter k is upper^k / k and in general carries the left partial
    sums k1 (k1+k2) ... in the denominator.
    """
    if lower is INF:
        raise DivergentBound("power flow with an infinite bound")
    lo = Fraction(lower)
    state = {0: Fraction(1)}
    for k in word:
        state = {m + k - 1: c for m, c in state.items()}
        integrated = {}
        const = Fraction(0)
        for m, c in state.items():
            integrated[m + 1] = integrated.get(m + 1, Fraction(0)) + c / (m + 1)
            const -= (c / (m + 1)) * lo ** (m + 1)
        if const:
            integrated[0] = integrated.get(0, Fraction(0)) + const
        state = {m: c for m, c in integrated.items() if c}
    return _power_eval(state, upper, trunc)


def _theta_eval(state, upper, trunc):
    """Evaluate an exponential state {m: coeff} at s = upper."""
    if upper is INF:
        value = state.get(0)
        return Fraction(0) if value is None else value
    if isinstance(upper, LaurentSeries):
        if upper.pole_order > 0 or upper.coefficient(0):
            raise ValueError("theta bound series must be regular with zero constant term")
        out = LaurentSeries.zero(trunc)
        for m, c in state.items():
            factor = LaurentSeries.one(trunc) if m == 0 else (-(upper * Fraction(m))).exp()
            out = out + factor * c
        return out
    q = Fraction(upper)
    out = ExpSum()
    for m, c in state.items():
        out = out + ExpSum({m * q: 1}) * c
    if out.is_rational():
        return out.constant_term()
    return out


def theta_iterated_integral(word, lower, upper, trunc: int = DEFAULT_TRUNC):
    """Integral of e^(-k1 s1)...e^(-kn sn) over lower<=s1<=...<=sn<=upper.

    With lower = 0 and upper = infinity this is the product of inverse
    suffix sums 1/(kn (kn+k(n-1)) ... (kn+...+k1)).  Finite rational bounds
    produce exact exponential sums; a regular z-series bound (such as -zL)
    produces a LaurentSeries through the truncated exponential.
    """
    if lower is INF:
        raise DivergentBound("theta flow starting at an infinite bound")
    lo = Fraction(lower)
    # state: {m: coeff} for sum coeff * e^(-m s); coeff rational or ExpSum
    state = {0: Fraction(1)}
    for k in word:
        state = {m + k: c for m, c in state.items()}
        integrated = {}
        const = Fraction(0) if lo == 0 else ExpSum()
        for m, c in state.items():
            integrated[m] = integrated.get(m, Fraction(0)) - c * Fraction(1, m)
            at_lower = c * Fraction(1, m)
            if lo != 0:
                at_lower = ExpSum({m * lo: 1}) * at_lower
            const = const + at_lower
        if const:
            integrated[0] = integrated.get(0, Fraction(0)) + const
        state = {m: c for m, c in integrated.items() if c}
    return _theta_eval(state, upper, trunc)


def time_ordered_exp(
    kernel: GradedKernel,
    bounds,
    letter_factor: LaurentSeries | None = None,
    trunc: int | None = None,
) -> NCSeries:
    """The expansional Te over the given bounds, word by word.

    The length-n contribution for component degrees (k1, ..., kn) is the
    iterated integral times beta_k1 beta_k2 ... beta_kn (in that order) and
    times letter_factor^n when a per-letter factor such as -1/z is given.
    Reversed bounds give the group inverse of the forward expansional.
    """
    lower, upper = bounds
    if trunc is None:
        trunc = kernel.beta.trunc
    reverse = False
    if isinstance(lower, (int, Fraction)) and isinstance(upper, (int, Fraction)):
        if Fraction(lower) > Fraction(upper):
            lower, upper = upper, lower
            reverse = True
    if lower is INF:
        if upper is INF:
            return NCSeries.one(trunc)
        lower, upper = upper, lower
        reverse = True
    integral = (
        theta_iterated_integral if kernel.kind == "theta_flow" else power_iterated_integral
    )
    degrees = kernel.degrees()
    out = NCSeries.one(trunc)

    def extend(tuple_so_far, deg_so_far, series_so_far):
        nonlocal out
        for k in degrees:
            deg = deg_so_far + k
            if deg > trunc:
                continue
            word = tuple_so_far + (k,)
            series = series_so_far * kernel.components[k]
            if series.is_zero():
                continue
            scalar = integral(word, lower, upper, trunc)
            term = series.scale(scalar) if not _is_one(scalar) else series
            if letter_factor is not None:
                term = term.scale(letter_factor ** len(word))
            out = out + term
            extend(word, deg, series)

    extend((), 0, NCSeries.one(trunc))
    return out.group_inverse() if reverse else out


def _is_one(scalar) -> bool:
    return isinstance(scalar, (int, Fraction)) and scalar == 1


# --- the universal singular frame ----------------------------------------


class FrameTable:
    """Rational coefficient table of the universal singular frame.

    Row for the word (k1, ..., kn): coefficient 1/(k1 (k1+k2) ... (k1+...+kn)),
    fiber exponent sum(k), and z exponent -n.
    """

    def __init__(self, order: int):
        if order < 1:
            raise ValueError("frame order must be >= 1")
        self.order = order
        self._rows = []
        for w in all_words(order):
            coeff = Fraction(1)
            total = 0
            for k in w:
                total += k
                coeff /= total
            self._rows.append((w, coeff, word_degree(w), -len(w)))

    def rows(self):
        return list(self._rows)

    def coefficient(self, word) -> Fraction:
        word = tuple(word)
        for w, coeff, _, _ in self._rows:
            if w == word:
                return coeff
        return Fraction(0)

    def group_element(self, trunc: int | None = None) -> NCSeries:
        """The frame as a series with v^sum(k) z^-n Laurent coefficients."""
        t = self.order if trunc is None else trunc
        coeffs = {EMPTY_WORD: Fraction(1)}
        for w, coeff, v_exp, z_exp in self._rows:
            coeffs[w] = LaurentSeries(
                {z_exp: PolyCoeff.symbol("v", v_exp, coeff)}, t
            )
        return NCSeries(coeffs, t)

    def to_csv(self) -> str:
        lines = []
        for w, coeff, v_exp, z_exp in self._rows:
            word = "(" + ",".join(str(k) for k in w) + ")"
            lines.append(f"{word};{coeff.numerator};{coeff.denominator};{v_exp};{z_exp}")
        return "\n".join(lines) + "\n"

    def to_obj(self):
        return {
            "order": self.order,
            "rows": [
                {
                    "word": list(w),
                    "coefficient": f"{c.numerator}/{c.denominator}",
                    "v_exp": v_exp,
                    "z_exp": z_exp,
                }
                for w, c, v_exp, z_exp in self._rows
            ],
        }


def universal_frame(order: int) -> FrameTable:
    """Closed-form frame table; cross-checkable against the power flow."""
    return FrameTable(order)


def universal_frame_from_flow(order: int) -> NCSeries:
    """Independent construction of the frame through iterated integrals.

    Runs the power flow of e = sum e_{-n} over [0, v] and attaches z^-n per
    letter; agrees with the closed-form table coefficient by coefficient.
    """
    beta = NCSeries.zero(order)
    for n in range(1, order + 1):
        beta = beta + NCSeries.generator(n, trunc=order)
    flow = time_ordered_exp(power_kernel(beta), (0, "v"), trunc=order)
    coeffs = {}
    for w, c in flow.terms():
        if w == EMPTY_WORD:
            coeffs[w] = c
        else:
            coeffs[w] = LaurentSeries({-len(w): PolyCoeff.promote(c)}, order)
    return NCSeries(coeffs, order)


# --- counterterm side ------------------------------------------------------


def gamma_minus_from_beta(beta: NCSeries, trunc: int | None = None) -> NCSeries:
    """Te of -(1/z) theta_(-t)(beta) dt over [0, infinity).

    Word coefficients are pure pole monomials: the length-n tuple carries
    (-1)^n z^-n times the suffix-sum integral, so a lone c e_1 contributes
    -c/z and the counterterm is manifestly free of L and v.
    """
    if trunc is None:
        trunc = beta.trunc
    minus_over_z = LaurentSeries({-1: Fraction(-1)}, trunc)
    return time_ordered_exp(
        theta_kernel(beta), (0, INF), letter_factor=minus_over_z, trunc=trunc
    )


def beta_extract(gamma_minus: NCSeries) -> NCSeries:
    """Invert gamma_minus_from_beta: read beta off the log's residue line.

    beta_n = -n z (log gamma_minus)_n restricted to its z^-1 part; only
    single-letter contributions reach the z^-1 line, which makes the
    reassembly exact at every degree.
    """
    if not is_grouplike(gamma_minus):
        raise NotGrouplike("input is not a group-like series")
    for w, c in gamma_minus.without_unit().terms():
        series = LaurentSeries.promote(c, gamma_minus.trunc)
        if not series.regular_part().is_zero():
            raise NotPolePure(f"coefficient of {w} has a regular part")
    logarithm = gamma_minus.log()
    trunc = gamma_minus.trunc
    out = NCSeries.zero(trunc)
    for n, component in logarithm.graded_components().items():
        residue_part = {}
        for w, c in component.terms():
            residue = LaurentSeries.promote(c, trunc).coefficient(-1)
            if residue:
                if not residue.is_rational():
                    raise NotPolePure("residue line carries symbols")
                residue_part[w] = residue.constant_term() * Fraction(-n)
        out = out + NCSeries(residue_part, trunc)
    return out


def gamma_mu(
    beta: NCSeries,
    gamma_reg: NCSeries | None = None,
    trunc: int | None = None,
) -> NCSeries:
    """The scale-dependent loop with L = log(mu) kept symbolic.

    Assembled as  (gamma_minus)^-1 . Te[0, -zL] . theta_{zL}(gamma_reg),
    using the composition law to split the flow from infinity at 0.  The
    regular input loop must have pole-free coefficients.
    """
    if trunc is None:
        trunc = beta.trunc
    if gamma_reg is None:
        gamma_reg = NCSeries.one(trunc)
    for w, c in gamma_reg.without_unit().terms():
        if LaurentSeries.promote(c, trunc).pole_order > 0:
            raise ValueError(f"regular loop has a pole at word {w}")
    zL = LaurentSeries({1: PolyCoeff.symbol("L")}, trunc)
    minus_over_z = LaurentSeries({-1: Fraction(-1)}, trunc)
    head = gamma_minus_from_beta(beta, trunc).group_inverse()
    flow = time_ordered_exp(
        theta_kernel(beta), (0, -zL), letter_factor=minus_over_z, trunc=trunc
    )
    tail = (
        gamma_reg.map_coefficients(lambda c: LaurentSeries.promote(c, trunc))
        .theta_action(zL)
    )
    return head * flow * tail


def rg_flow(t, trunc: int = DEFAULT_TRUNC) -> NCSeries:
    """The one-parameter subgroup exp(t sum_n e_{-n}); t rational or symbol."""
    if isinstance(t, str):
        t = PolyCoeff.symbol(t)
    generator_sum = NCSeries.zero(trunc)
    for n in range(1, trunc + 1):
        generator_sum = generator_sum + NCSeries.generator(n, trunc=trunc)
    return generator_sum.scale(t).exp()


# --- numeric oracles -------------------------------------------------------


def product_integral_oracle(
    kernel: GradedKernel,
    bounds,
    steps: int,
    letter_factor: float | None = None,
    trunc: int | None = None,
) -> NCSeries:
    """Discretized product integral A <- A (1 + alpha(s_i) ds), float arithmetic.

    Midpoint sampling keeps the O(ds) constant small; this is only ever used
    to cross-validate the exact iterated integrals.
    """
    a, b = float(bounds[0]), float(bounds[1])
    if steps < 1:
        raise ValueError("need at least one step")
    if trunc is None:
        trunc = kernel.beta.trunc
    ds = (b - a) / steps
    lf = 1.0 if letter_factor is None else float(letter_factor)
    comps = []
    for n, comp in kernel.components.items():
        words = [(w, float(c)) for w, c in comp.terms()]
        comps.append((n, words))
    A = {EMPTY_WORD: 1.0}
    for i in range(steps):
        s = a + (i + 0.5) * ds
        increments = {}
        for n, words in comps:
            weight = (math.exp(-n * s) if kernel.kind == "theta_flow" else s ** (n - 1)) * ds * lf
            for u, cu in A.items():
                du = word_degree(u)
                if du + n > trunc:
                    continue
                for w, cw in words:
                    word = u + w
                    increments[word] = increments.get(word, 0.0) + cu * cw * weight
        for word, val in increments.items():
            A[word] = A.get(word, 0.0) + val
    return NCSeries(A, trunc)


def scattering_flow(beta: NCSeries, t: float, z: Fraction) -> NCSeries:
    """e^(-t (beta/z + Z0)) e^(t Z0) evaluated as floats at time t.

    The conjugated flow V(t) solves dV/dt = -(beta/z) V - Y(V) with V(0)=1;
    each word coefficient is an exact exponential polynomial in e^(-t),
    computed by integrating the triangular system degree by degree, then
    evaluated numerically.  As t grows this converges to the counterterm
    series gamma_minus_from_beta(beta) at the same z.
    """
    z = Fraction(z)
    trunc = beta.trunc
    table = {EMPTY_WORD: {0: Fraction(1)}}
    beta_words = [(w, c) for w, c in beta.without_unit().terms()]
    for w in all_words(trunc):
        n = word_degree(w)
        source = {}
        for x, cx in beta_words:
            lx = len(x)
            if w[:lx] == x:
                y = w[lx:]
                if y in table:
                    for j, c in table[y].items():
                        source[j] = source.get(j, Fraction(0)) - (cx / z) * c
        if not source:
            continue
        coeffs = {}
        total = Fraction(0)
        for j, c in source.items():
            # particular solution c/(n-j) e^(-jt); j < n strictly
            coeffs[j] = c / (n - j)
            total += c / (n - j)
        coeffs[n] = coeffs.get(n, Fraction(0)) - total  # V_w(0) = 0
        table[w] = {j: c for j, c in coeffs.items() if c}
    out = {}
    for w, expo in table.items():
        out[w] = sum(float(c) * math.exp(-j * t) for j, c in expo.items())
    return NCSeries(out, trunc)
