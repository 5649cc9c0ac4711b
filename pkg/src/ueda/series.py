"""Exact truncated series over the Gaussian rationals.

Four shapes are provided:

* :class:`PSeries` -- power series ``sum a_n t^n + O(t^(N+1))``;
* :class:`LSeries` -- Laurent polynomials living on an explicit exponent
  window ``[lo, hi]``; products are truncated back to that window;
* :class:`MSeries` -- power series in a fiber variable ``w`` whose
  coefficients are :class:`LSeries` in ``zeta``;
* :class:`BSeries` -- bivariate polynomials in ``(x, y)`` truncated by total
  degree.

Coefficients are :class:`Scalar` values (pairs of ``gmpy2.mpq``), so every
operation is exact.  Values are immutable once constructed.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import gmpy2

from .errors import (
    CompositionDomainError,
    DomainError,
    NormalizationError,
    OutOfWindowError,
    ParseError,
    WindowMismatchError,
)

mpq = gmpy2.mpq
_MPQ = type(mpq(0))
_Q0 = mpq(0)
_Q1 = mpq(1)


def rational(x) -> mpq:
    """Convert ints, Fractions, mpq and ``"p/q"`` strings to ``mpq``.

    Floats are refused: nothing in the package may round.
    """
    if isinstance(x, _MPQ):
        return x
    if isinstance(x, bool):
        return mpq(int(x))
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        try:
            f = Fraction(x.strip())
        except ValueError as exc:
            raise ParseError(f"not a rational number: {x!r}") from exc
        return mpq(f.numerator, f.denominator)
    if isinstance(x, Rational):
        return mpq(int(x.numerator), int(x.denominator))
    if type(x).__name__ == "mpz":
        return mpq(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def to_fraction(q) -> Fraction:
    q = rational(q)
    return Fraction(int(q.numerator), int(q.denominator))


def format_rational(q) -> str:
    q = rational(q)
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


# --------------------------------------------------------------------------
# Scalars


class Scalar:
    """An exact complex rational ``re + i*im``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", rational(re))
        object.__setattr__(self, "im", rational(im))

    @classmethod
    def _make(cls, re, im) -> Scalar:
        s = object.__new__(cls)
        object.__setattr__(s, "re", re)
        object.__setattr__(s, "im", im)
        return s

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def __reduce__(self):
        return (Scalar, (to_fraction(self.re), to_fraction(self.im)))

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        return Scalar._make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        return Scalar._make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        return Scalar._make(o.re - self.re, o.im - self.im)

    def __neg__(self):
        return Scalar._make(-self.re, -self.im)

    def __mul__(self, other):
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        if not self.im and not o.im:
            return Scalar._make(self.re * o.re, _Q0)
        return Scalar._make(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> Scalar:
        d = self.re * self.re + self.im * self.im
        if not d:
            raise ZeroDivisionError("inverse of zero Scalar")
        return Scalar._make(self.re / d, -self.im / d)

    def conjugate(self) -> Scalar:
        return Scalar._make(self.re, -self.im)

    # comparisons ----------------------------------------------------------
    def __eq__(self, other):
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return not self.im

    def abs_upper(self) -> mpq:
        """A rational upper bound ``|re| + |im|`` for the modulus."""
        return abs(self.re) + abs(self.im)

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        if not self.im:
            return format_rational(self.re)
        if not self.re:
            return f"{format_rational(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        return f"{format_rational(self.re)}{sign}{format_rational(abs(self.im))}i"

    def to_json(self) -> list[int]:
        return [
            int(self.re.numerator),
            int(self.re.denominator),
            int(self.im.numerator),
            int(self.im.denominator),
        ]

    @classmethod
    def from_json(cls, data) -> Scalar:
        if isinstance(data, (int, str)):
            return cls(data)
        try:
            a, b, c, d = data
        except (TypeError, ValueError) as exc:
            raise ParseError(f"scalar must be [re_num, re_den, im_num, im_den], got {data!r}") from exc
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (a, b, c, d)):
            raise ParseError(f"scalar entries must be integers, got {data!r}")
        if b == 0 or d == 0:
            raise ParseError(f"zero denominator in scalar {data!r}")
        return cls._make(mpq(a, b), mpq(c, d))


ZERO = Scalar._make(_Q0, _Q0)
ONE = Scalar._make(_Q1, _Q0)
I = Scalar._make(_Q0, _Q1)


def _as_scalar(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction, _MPQ)) or type(x).__name__ == "mpz":
        return Scalar._make(rational(x), _Q0)
    return None


def to_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, complex):
        raise TypeError("complex floats are not exact; use Scalar(re, im)")
    if isinstance(x, tuple) and len(x) == 2:
        return Scalar(*x)
    return Scalar(x)


def abs_upper(s) -> mpq:
    return to_scalar(s).abs_upper()


# --------------------------------------------------------------------------
# generic truncated list arithmetic; coefficients only need +, *, bool


def _mul_lists(a, b, n, zero):
    out = [zero] * (n + 1)
    for i, ai in enumerate(a[: n + 1]):
        if not ai:
            continue
        for j in range(0, min(len(b) - 1, n - i) + 1):
            bj = b[j]
            if bj:
                out[i + j] = out[i + j] + ai * bj
    return out


def _compose_lists(outer, inner, n, zero, one):
    """``sum_k outer[k] * inner^k`` truncated at degree ``n``.

    ``inner[0]`` must be zero; the k-th power then has valuation >= k.
    """
    out = [zero] * (n + 1)
    if outer and outer[0]:
        out[0] = outer[0] * one
    power = [zero] * (n + 1)
    power[0] = one
    for k in range(1, min(len(outer) - 1, n) + 1):
        power = _mul_lists(power, inner, n, zero)
        ck = outer[k]
        if not ck:
            continue
        for m in range(k, n + 1):
            pm = power[m]
            if pm:
                out[m] = out[m] + ck * pm
    return out


def _revert_lists(s, n, zero, one):
    """Compositional inverse of ``t + s_2 t^2 + ...`` to degree ``n``.

    Order-by-order: with ``u = t + b_2 t^2 + ...`` and ``P[v][m] = [t^m] u^v``
    the identity ``s(u) = t`` gives ``b_m = -sum_{v>=2} s_v P[v][m]``, and
    ``P[v][m]`` for ``v >= 2`` only involves ``b_1 .. b_{m-1}``.
    """
    b = [zero] * (n + 1)
    if n >= 1:
        b[1] = one
    powers = {1: b}
    for v in range(2, n + 1):
        powers[v] = [zero] * (n + 1)
    for m in range(2, n + 1):
        acc = zero
        for v in range(2, m + 1):
            row = powers[v]
            prev = powers[v - 1]
            val = zero
            for i in range(1, m - v + 2):
                bi = b[i]
                if bi and prev[m - i]:
                    val = val + bi * prev[m - i]
            row[m] = val
            if v < len(s) and s[v] and val:
                acc = acc + s[v] * val
        b[m] = -acc
    return b


# --------------------------------------------------------------------------
# power series


class PSeries:
    """``sum_{n<=N} a_n t^n + O(t^(N+1))`` with exact Scalar coefficients."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order: int | None = None):
        cs = [to_scalar(c) for c in coeffs]
        if order is None:
            order = max(len(cs) - 1, 0)
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        if len(cs) > order + 1:
            if any(cs[order + 1 :]):
                raise OutOfWindowError(
                    f"coefficients beyond truncation order {order} are nonzero"
                )
            cs = cs[: order + 1]
        cs += [ZERO] * (order + 1 - len(cs))
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "order", order)

    @classmethod
    def _raw(cls, coeffs, order) -> PSeries:
        s = object.__new__(cls)
        object.__setattr__(s, "coeffs", tuple(coeffs))
        object.__setattr__(s, "order", order)
        return s

    def __setattr__(self, name, value):
        raise AttributeError("PSeries is immutable")

    @classmethod
    def zero(cls, order: int) -> PSeries:
        return cls._raw([ZERO] * (order + 1), order)

    @classmethod
    def one(cls, order: int) -> PSeries:
        return cls.monomial(0, order)

    @classmethod
    def variable(cls, order: int) -> PSeries:
        return cls.monomial(1, order)

    @classmethod
    def monomial(cls, n: int, order: int, c=1) -> PSeries:
        cs = [ZERO] * (order + 1)
        if n <= order:
            cs[n] = to_scalar(c)
        return cls._raw(cs, order)

    @classmethod
    def from_dict(cls, terms: dict, order: int) -> PSeries:
        cs = [ZERO] * (order + 1)
        for n, c in terms.items():
            if n < 0:
                raise OutOfWindowError(f"negative exponent {n} in a power series")
            c = to_scalar(c)
            if n > order:
                if c:
                    raise OutOfWindowError(f"exponent {n} beyond truncation order {order}")
                continue
            cs[n] = c
        return cls._raw(cs, order)

    def __getitem__(self, n: int) -> Scalar:
        return self.coeff(n)

    def coeff(self, n: int) -> Scalar:
        if not 0 <= n <= self.order:
            raise OutOfWindowError(f"coefficient {n} outside [0, {self.order}]")
        return self.coeffs[n]

    def truncate(self, order: int) -> PSeries:
        if order > self.order:
            raise OutOfWindowError(
                f"cannot raise truncation order {self.order} to {order}"
            )
        return PSeries._raw(self.coeffs[: order + 1], order)

    def valuation(self) -> int | None:
        for n, c in enumerate(self.coeffs):
            if c:
                return n
        return None

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def _binary(self, other, op):
        if isinstance(other, PSeries):
            n = min(self.order, other.order)
            return PSeries._raw(
                [op(a, b) for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])], n
            )
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        cs = list(self.coeffs)
        cs[0] = op(cs[0], o)
        return PSeries._raw(cs, self.order)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return PSeries._raw([-c for c in self.coeffs], self.order)

    def __mul__(self, other):
        if isinstance(other, PSeries):
            n = min(self.order, other.order)
            return PSeries._raw(_mul_lists(self.coeffs, other.coeffs, n, ZERO), n)
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        return PSeries._raw([c * o for c in self.coeffs], self.order)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = PSeries.one(self.order)
        for _ in range(k):
            out = out * self
        return out

    def inverse(self) -> PSeries:
        """Multiplicative inverse; needs a nonzero constant term."""
        c0 = self.coeffs[0]
        if not c0:
            raise DomainError("power series with zero constant term is not invertible")
        inv0 = c0.inverse()
        rest = (self * inv0) - 1
        geo = PSeries._raw([ONE if k % 2 == 0 else -ONE for k in range(self.order + 1)], self.order)
        return compose(geo, rest) * inv0

    def __truediv__(self, other):
        if isinstance(other, PSeries):
            return self * other.inverse()
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __eq__(self, other):
        if not isinstance(other, PSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def agrees_with(self, other: PSeries) -> bool:
        """Equality up to the smaller of the two truncation orders."""
        n = min(self.order, other.order)
        return self.coeffs[: n + 1] == other.coeffs[: n + 1]

    def derivative(self) -> PSeries:
        if self.order == 0:
            return PSeries.zero(0)
        return PSeries._raw(
            [self.coeffs[n] * n for n in range(1, self.order + 1)], self.order - 1
        )

    def support(self):
        return {n: c for n, c in enumerate(self.coeffs) if c}

    def __repr__(self):
        terms = " + ".join(f"({c})t^{n}" for n, c in enumerate(self.coeffs) if c) or "0"
        return f"PSeries({terms} + O(t^{self.order + 1}))"


# special series -------------------------------------------------------


def binomial_series(a, order: int) -> PSeries:
    """``(1 + t)^a`` for rational ``a``."""
    a = rational(a)
    cs = [ONE]
    c = _Q1
    for k in range(1, order + 1):
        c = c * (a - (k - 1)) / k
        cs.append(Scalar._make(c, _Q0))
    return PSeries._raw(cs, order)


def exp_series(order: int) -> PSeries:
    cs = []
    c = _Q1
    for k in range(order + 1):
        if k:
            c = c / k
        cs.append(Scalar._make(c, _Q0))
    return PSeries._raw(cs, order)


def log1p_series(order: int) -> PSeries:
    cs = [ZERO]
    for k in range(1, order + 1):
        cs.append(Scalar._make(mpq((-1) ** (k + 1), k), _Q0))
    return PSeries._raw(cs, order)


# --------------------------------------------------------------------------
# Laurent series on a window


class LSeries:
    """A Laurent polynomial ``sum_{lo<=m<=hi} c_m zeta^m`` on a fixed window.

    Sums require identical windows; products are computed exactly and then
    truncated back to the (shared) window.
    """

    __slots__ = ("terms", "lo", "hi")

    def __init__(self, terms=None, window=(0, 0)):
        lo, hi = (int(window[0]), int(window[1]))
        if lo > hi:
            raise WindowMismatchError(f"empty window [{lo}, {hi}]")
        clean = {}
        for m, c in (terms or {}).items():
            m = int(m)
            c = to_scalar(c)
            if not c:
                continue
            if not lo <= m <= hi:
                raise OutOfWindowError(f"exponent {m} outside window [{lo}, {hi}]")
            clean[m] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def _raw(cls, terms, lo, hi) -> LSeries:
        s = object.__new__(cls)
        object.__setattr__(s, "terms", terms)
        object.__setattr__(s, "lo", lo)
        object.__setattr__(s, "hi", hi)
        return s

    def __setattr__(self, name, value):
        raise AttributeError("LSeries is immutable")

    def __reduce__(self):
        return (LSeries, (dict(self.terms), (self.lo, self.hi)))

    @property
    def window(self) -> tuple[int, int]:
        return (self.lo, self.hi)

    @classmethod
    def zero(cls, window) -> LSeries:
        return cls._raw({}, int(window[0]), int(window[1]))

    @classmethod
    def constant(cls, c, window) -> LSeries:
        return cls({0: c}, window)

    @classmethod
    def monomial(cls, m: int, window, c=1) -> LSeries:
        return cls({m: c}, window)

    def __getitem__(self, m: int) -> Scalar:
        return self.coeff(m)

    def coeff(self, m: int) -> Scalar:
        if not self.lo <= m <= self.hi:
            raise OutOfWindowError(f"exponent {m} outside window [{self.lo}, {self.hi}]")
        return self.terms.get(m, ZERO)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def min_exponent(self) -> int | None:
        return min(self.terms) if self.terms else None

    def max_exponent(self) -> int | None:
        return max(self.terms) if self.terms else None

    def _check(self, other: LSeries):
        if self.lo != other.lo or self.hi != other.hi:
            raise WindowMismatchError(
                f"window [{self.lo}, {self.hi}] incompatible with [{other.lo}, {other.hi}]"
            )

    def __add__(self, other):
        if isinstance(other, LSeries):
            self._check(other)
            if not other.terms:
                return self
            if not self.terms:
                return other
            out = dict(self.terms)
            for m, c in other.terms.items():
                v = out.get(m)
                v = c if v is None else v + c
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
            return LSeries._raw(out, self.lo, self.hi)
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        return self + LSeries.constant(o, self.window)

    __radd__ = __add__

    def __neg__(self):
        return LSeries._raw({m: -c for m, c in self.terms.items()}, self.lo, self.hi)

    def __sub__(self, other):
        if isinstance(other, LSeries):
            return self + (-other)
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LSeries):
            self._check(other)
            if not self.terms or not other.terms:
                return LSeries._raw({}, self.lo, self.hi)
            lo, hi = self.lo, self.hi
            out = {}
            for a, ca in self.terms.items():
                for b, cb in other.terms.items():
                    m = a + b
                    if lo <= m <= hi:
                        v = out.get(m)
                        p = ca * cb
                        out[m] = p if v is None else v + p
            return LSeries._raw({m: c for m, c in out.items() if c}, lo, hi)
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        if not o:
            return LSeries._raw({}, self.lo, self.hi)
        return LSeries._raw({m: c * o for m, c in self.terms.items()}, self.lo, self.hi)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = LSeries.constant(1, self.window)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, LSeries):
            return NotImplemented
        return self.window == other.window and self.terms == other.terms

    def __hash__(self):
        return hash((self.window, tuple(sorted(self.terms.items()))))

    def shift(self, k: int) -> LSeries:
        """Multiply by ``zeta^k``, truncating to the window."""
        return LSeries._raw(
            {m + k: c for m, c in self.terms.items() if self.lo <= m + k <= self.hi},
            self.lo,
            self.hi,
        )

    def rewindow(self, window) -> LSeries:
        """Move to another window, dropping terms that fall outside it."""
        lo, hi = int(window[0]), int(window[1])
        return LSeries._raw({m: c for m, c in self.terms.items() if lo <= m <= hi}, lo, hi)

    def part(self, lo: int | None = None, hi: int | None = None) -> LSeries:
        """The terms with ``lo <= m <= hi`` (same window)."""
        return LSeries._raw(
            {
                m: c
                for m, c in self.terms.items()
                if (lo is None or m >= lo) and (hi is None or m <= hi)
            },
            self.lo,
            self.hi,
        )

    def to_pseries(self, order: int) -> PSeries:
        if self.terms and min(self.terms) < 0:
            raise OutOfWindowError("Laurent series has negative exponents")
        return PSeries.from_dict({m: c for m, c in self.terms.items() if m <= order}, order)

    @classmethod
    def from_pseries(cls, p: PSeries, window) -> LSeries:
        lo, hi = int(window[0]), int(window[1])
        return cls._raw(
            {n: c for n, c in enumerate(p.coeffs) if c and lo <= n <= hi}, lo, hi
        )

    def __repr__(self):
        terms = " + ".join(f"({self.terms[m]})z^{m}" for m in sorted(self.terms)) or "0"
        return f"LSeries({terms} on [{self.lo}, {self.hi}])"


# --------------------------------------------------------------------------
# mixed series


class MSeries:
    """``sum_{m<=N_w} c_m(zeta) w^m`` with LSeries coefficients on one window."""

    __slots__ = ("coeffs", "window")

    def __init__(self, coeffs, window=None):
        cs = list(coeffs)
        if not cs:
            raise ValueError("MSeries needs at least the w^0 coefficient")
        if window is None:
            window = cs[0].window
        window = (int(window[0]), int(window[1]))
        for k, c in enumerate(cs):
            if c.window != window:
                raise WindowMismatchError(
                    f"w^{k} coefficient lives on {c.window}, expected {window}"
                )
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "window", window)

    @classmethod
    def _raw(cls, coeffs, window) -> MSeries:
        s = object.__new__(cls)
        object.__setattr__(s, "coeffs", tuple(coeffs))
        object.__setattr__(s, "window", window)
        return s

    def __setattr__(self, name, value):
        raise AttributeError("MSeries is immutable")

    def __reduce__(self):
        return (MSeries, (list(self.coeffs), self.window))

    @property
    def N_w(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def zero(cls, N_w: int, window) -> MSeries:
        z = LSeries.zero(window)
        return cls._raw([z] * (N_w + 1), (int(window[0]), int(window[1])))

    @classmethod
    def from_terms(cls, terms: dict, N_w: int, window) -> MSeries:
        """Build from ``{(m, k): c}`` meaning ``c * w^m * zeta^k``."""
        rows: list[dict] = [{} for _ in range(N_w + 1)]
        for (m, k), c in terms.items():
            if m > N_w:
                if to_scalar(c):
                    raise OutOfWindowError(f"w-exponent {m} beyond N_w = {N_w}")
                continue
            rows[m][k] = c
        return cls([LSeries(r, window) for r in rows], window)

    @classmethod
    def from_lseries(cls, c: LSeries, N_w: int) -> MSeries:
        z = LSeries.zero(c.window)
        return cls._raw([c] + [z] * N_w, c.window)

    @classmethod
    def variable(cls, N_w: int, window, coefficient: LSeries | None = None) -> MSeries:
        """``w`` (or ``coefficient * w``)."""
        z = LSeries.zero(window)
        one = coefficient if coefficient is not None else LSeries.constant(1, window)
        cs = [z] * (N_w + 1)
        if N_w >= 1:
            cs[1] = one
        return cls._raw(cs, (int(window[0]), int(window[1])))

    def __getitem__(self, m: int) -> LSeries:
        return self.coeff(m)

    def coeff(self, m: int) -> LSeries:
        if not 0 <= m <= self.N_w:
            raise OutOfWindowError(f"w-exponent {m} outside [0, {self.N_w}]")
        return self.coeffs[m]

    def truncate(self, N_w: int) -> MSeries:
        if N_w > self.N_w:
            raise OutOfWindowError(f"cannot raise N_w from {self.N_w} to {N_w}")
        return MSeries._raw(self.coeffs[: N_w + 1], self.window)

    def rewindow(self, window) -> MSeries:
        window = (int(window[0]), int(window[1]))
        return MSeries._raw([c.rewindow(window) for c in self.coeffs], window)

    def valuation(self) -> int | None:
        for m, c in enumerate(self.coeffs):
            if c:
                return m
        return None

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def _zero(self) -> LSeries:
        return LSeries.zero(self.window)

    def _check(self, other: MSeries):
        if self.window != other.window:
            raise WindowMismatchError(
                f"zeta-window {self.window} incompatible with {other.window}"
            )

    def __add__(self, other):
        if isinstance(other, MSeries):
            self._check(other)
            n = min(self.N_w, other.N_w)
            return MSeries._raw(
                [a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])],
                self.window,
            )
        if isinstance(other, LSeries):
            cs = list(self.coeffs)
            cs[0] = cs[0] + other
            return MSeries._raw(cs, self.window)
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        cs = list(self.coeffs)
        cs[0] = cs[0] + o
        return MSeries._raw(cs, self.window)

    __radd__ = __add__

    def __neg__(self):
        return MSeries._raw([-c for c in self.coeffs], self.window)

    def __sub__(self, other):
        if isinstance(other, (MSeries, LSeries)):
            return self + (-other)
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, MSeries):
            self._check(other)
            n = min(self.N_w, other.N_w)
            return MSeries._raw(
                _mul_lists(self.coeffs, other.coeffs, n, self._zero()), self.window
            )
        if isinstance(other, LSeries):
            if other.window != self.window:
                raise WindowMismatchError(
                    f"zeta-window {self.window} incompatible with {other.window}"
                )
            return MSeries._raw([c * other for c in self.coeffs], self.window)
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        return MSeries._raw([c * o for c in self.coeffs], self.window)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = MSeries.from_lseries(LSeries.constant(1, self.window), self.N_w)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, MSeries):
            return NotImplemented
        return self.window == other.window and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.window, self.coeffs))

    def agrees_with(self, other: MSeries, order: int | None = None) -> bool:
        n = min(self.N_w, other.N_w)
        if order is not None:
            n = min(n, order)
        return self.window == other.window and self.coeffs[: n + 1] == other.coeffs[: n + 1]

    def scale_variable(self, k: LSeries) -> MSeries:
        """Substitute ``w -> k(zeta) * w``."""
        out = []
        p = LSeries.constant(1, self.window)
        for m, c in enumerate(self.coeffs):
            out.append(c * p if m else c)
            p = p * k
        return MSeries._raw(out, self.window)

    def __repr__(self):
        parts = [f"[{c!r}]w^{m}" for m, c in enumerate(self.coeffs) if c] or ["0"]
        return f"MSeries({' + '.join(parts)} + O(w^{self.N_w + 1}))"


# --------------------------------------------------------------------------
# bivariate polynomials


class BSeries:
    """``sum_{i+j<=N} c_ij x^i y^j`` truncated at total degree ``N``."""

    __slots__ = ("terms", "degree")

    def __init__(self, terms=None, degree: int = 0):
        if degree < 0:
            raise ValueError("degree must be >= 0")
        clean = {}
        for (i, j), c in (terms or {}).items():
            i, j = int(i), int(j)
            if i < 0 or j < 0:
                raise OutOfWindowError(f"negative exponent in x^{i} y^{j}")
            c = to_scalar(c)
            if not c:
                continue
            if i + j > degree:
                raise OutOfWindowError(f"x^{i} y^{j} exceeds total degree {degree}")
            clean[(i, j)] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "degree", int(degree))

    @classmethod
    def _raw(cls, terms, degree) -> BSeries:
        s = object.__new__(cls)
        object.__setattr__(s, "terms", terms)
        object.__setattr__(s, "degree", degree)
        return s

    def __setattr__(self, name, value):
        raise AttributeError("BSeries is immutable")

    def __reduce__(self):
        return (BSeries, (dict(self.terms), self.degree))

    @classmethod
    def x(cls, degree: int) -> BSeries:
        return cls({(1, 0): 1}, degree)

    @classmethod
    def y(cls, degree: int) -> BSeries:
        return cls({(0, 1): 1}, degree)

    @classmethod
    def constant(cls, c, degree: int) -> BSeries:
        return cls({(0, 0): c}, degree)

    def coeff(self, i: int, j: int) -> Scalar:
        if i < 0 or j < 0 or i + j > self.degree:
            raise OutOfWindowError(f"x^{i} y^{j} outside total degree {self.degree}")
        return self.terms.get((i, j), ZERO)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if isinstance(other, BSeries):
            n = min(self.degree, other.degree)
            out = {k: c for k, c in self.terms.items() if sum(k) <= n}
            for k, c in other.terms.items():
                if sum(k) > n:
                    continue
                v = out.get(k)
                v = c if v is None else v + c
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
            return BSeries._raw(out, n)
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        return self + BSeries.constant(o, self.degree)

    __radd__ = __add__

    def __neg__(self):
        return BSeries._raw({k: -c for k, c in self.terms.items()}, self.degree)

    def __sub__(self, other):
        if isinstance(other, BSeries):
            return self + (-other)
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, BSeries):
            n = min(self.degree, other.degree)
            out = {}
            for (i1, j1), a in self.terms.items():
                for (i2, j2), b in other.terms.items():
                    if i1 + i2 + j1 + j2 > n:
                        continue
                    k = (i1 + i2, j1 + j2)
                    v = out.get(k)
                    out[k] = a * b if v is None else v + a * b
            return BSeries._raw({k: c for k, c in out.items() if c}, n)
        o = _as_scalar(other)
        if o is None:
            return NotImplemented
        if not o:
            return BSeries._raw({}, self.degree)
        return BSeries._raw({k: c * o for k, c in self.terms.items()}, self.degree)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = BSeries.constant(1, self.degree)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, BSeries):
            return NotImplemented
        return self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.terms.items()))))

    def with_degree(self, degree: int) -> BSeries:
        """Re-truncate; raising the degree is only allowed when no term is lost."""
        return BSeries._raw(
            {k: c for k, c in self.terms.items() if sum(k) <= degree}, degree
        )

    def evaluate(self, X: MSeries, Y: MSeries) -> MSeries:
        """Substitute MSeries for ``x`` and ``y`` (exact polynomial evaluation)."""
        if X.window != Y.window:
            raise WindowMismatchError("X and Y live on different zeta-windows")
        N = min(X.N_w, Y.N_w)
        X, Y = X.truncate(N), Y.truncate(N)
        one = MSeries.from_lseries(LSeries.constant(1, X.window), N)
        if not self.terms:
            return MSeries.zero(N, X.window)
        max_i = max(i for i, _ in self.terms)
        max_j = max(j for _, j in self.terms)
        ypow = [one]
        for _ in range(max_j):
            ypow.append(ypow[-1] * Y)
        # Horner in x over polynomials in y
        by_i: dict[int, MSeries] = {}
        for (i, j), c in self.terms.items():
            term = ypow[j] * c
            by_i[i] = by_i[i] + term if i in by_i else term
        out = by_i.get(max_i, MSeries.zero(N, X.window))
        for i in range(max_i - 1, -1, -1):
            out = out * X
            if i in by_i:
                out = out + by_i[i]
        return out

    def weighted_norm(self, rx, ry) -> mpq:
        """``sum |c_ij| rx^i ry^j`` -- a sup bound on the polydisc of radii (rx, ry)."""
        rx, ry = rational(rx), rational(ry)
        if rx <= 0 or ry <= 0:
            raise DomainError("polydisc radii must be positive")
        total = _Q0
        for (i, j), c in self.terms.items():
            total += c.abs_upper() * rx**i * ry**j
        return total

    def __repr__(self):
        parts = [f"({c})x^{i}y^{j}" for (i, j), c in sorted(self.terms.items())] or ["0"]
        return f"BSeries({' + '.join(parts)}, deg<={self.degree})"


# --------------------------------------------------------------------------
# operations across shapes


def compose(outer, inner, order: int | None = None):
    """Substitute ``inner`` (zero constant term) for the variable of ``outer``.

    ``outer`` may be a PSeries (scalar coefficients) or an MSeries (LSeries
    coefficients, substitution in ``w``); ``inner`` is a PSeries or an
    MSeries.  The result is truncated to the smaller truncation order.
    """
    if isinstance(inner, PSeries):
        if not isinstance(outer, PSeries):
            raise TypeError("an MSeries cannot be composed with a PSeries")
        if inner.coeffs[0]:
            raise CompositionDomainError("inner series has a nonzero constant term")
        n = min(outer.order, inner.order)
        if order is not None:
            n = min(n, order)
        return PSeries._raw(_compose_lists(outer.coeffs, inner.coeffs, n, ZERO, ONE), n)
    if isinstance(inner, MSeries):
        if inner.coeffs[0]:
            raise CompositionDomainError("inner series has a nonzero w^0 term")
        zero = LSeries.zero(inner.window)
        one = LSeries.constant(1, inner.window)
        if isinstance(outer, PSeries):
            n = min(outer.order, inner.N_w)
            oc = outer.coeffs
        elif isinstance(outer, MSeries):
            if outer.window != inner.window:
                raise WindowMismatchError(
                    f"zeta-window {outer.window} incompatible with {inner.window}"
                )
            n = min(outer.N_w, inner.N_w)
            oc = outer.coeffs
        else:
            raise TypeError(f"cannot compose {type(outer).__name__}")
        if order is not None:
            n = min(n, order)
        return MSeries._raw(_compose_lists(oc, inner.coeffs, n, zero, one), inner.window)
    raise TypeError(f"cannot substitute a {type(inner).__name__}")


def reversion(s):
    """Compositional inverse of ``s = t + O(t^2)``.

    For an MSeries the linear coefficient must be exactly the constant LSeries
    ``1``; coefficients of higher powers may depend on ``zeta``.
    """
    if isinstance(s, PSeries):
        if s.order < 1 or s.coeffs[0] or s.coeffs[1] != ONE:
            raise NormalizationError("reversion needs s = t + O(t^2)")
        return PSeries._raw(_revert_lists(s.coeffs, s.order, ZERO, ONE), s.order)
    if isinstance(s, MSeries):
        one = LSeries.constant(1, s.window)
        if s.N_w < 1 or s.coeffs[0] or s.coeffs[1] != one:
            raise NormalizationError(
                "reversion needs w + O(w^2) with linear coefficient exactly 1"
            )
        return MSeries._raw(
            _revert_lists(s.coeffs, s.N_w, LSeries.zero(s.window), one), s.window
        )
    raise TypeError(f"cannot revert a {type(s).__name__}")


def coeff_extract(s, ell):
    """The exact coefficient ``[[s]]_ell`` (a Scalar, or an LSeries for MSeries).

    For a BSeries ``ell`` is an ``(i, j)`` pair.
    """
    if isinstance(s, BSeries):
        i, j = ell
        return s.coeff(i, j)
    return s.coeff(ell)


def circle_norm(s, r) -> mpq:
    """``sum_m abs_upper(c_m) r^m`` -- an upper bound of ``sup_{|zeta|=r} |s|``."""
    r = rational(r)
    if r <= 0:
        raise DomainError(f"circle radius must be positive, got {r}")
    if isinstance(s, LSeries):
        items = s.terms.items()
    elif isinstance(s, PSeries):
        items = ((n, c) for n, c in enumerate(s.coeffs) if c)
    else:
        raise TypeError(f"circle_norm is defined for LSeries and PSeries, not {type(s).__name__}")
    total = _Q0
    for m, c in items:
        total += c.abs_upper() * r**m
    return total


# --------------------------------------------------------------------------
# JSON


def series_to_json(s) -> dict:
    if isinstance(s, PSeries):
        return {
            "kind": "P",
            "order": s.order,
            "terms": [[n, c.to_json()] for n, c in enumerate(s.coeffs) if c],
        }
    if isinstance(s, LSeries):
        return {
            "kind": "L",
            "window": [s.lo, s.hi],
            "terms": [[m, s.terms[m].to_json()] for m in sorted(s.terms)],
        }
    if isinstance(s, MSeries):
        return {
            "kind": "M",
            "N_w": s.N_w,
            "window": list(s.window),
            "coeffs": [
                [[k, c.terms[k].to_json()] for k in sorted(c.terms)] for c in s.coeffs
            ],
        }
    if isinstance(s, BSeries):
        return {
            "kind": "B",
            "degree": s.degree,
            "terms": [[[i, j], s.terms[(i, j)].to_json()] for (i, j) in sorted(s.terms)],
        }
    raise TypeError(f"not a series: {type(s).__name__}")


def _field(d, key, where):
    if not isinstance(d, dict) or key not in d:
        raise ParseError(f"{where}: missing field {key!r}")
    return d[key]


def _int_field(d, key, where) -> int:
    v = _field(d, key, where)
    if not isinstance(v, int) or isinstance(v, bool):
        raise ParseError(f"{where}.{key}: expected an integer, got {v!r}")
    return v


def _window_field(d, where) -> tuple[int, int]:
    w = _field(d, "window", where)
    if (
        not isinstance(w, list)
        or len(w) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in w)
    ):
        raise ParseError(f"{where}.window: expected [lo, hi] integers, got {w!r}")
    return (w[0], w[1])


def _pairs(items, where):
    if not isinstance(items, list):
        raise ParseError(f"{where}: expected a list of [exponent, coefficient] pairs")
    for item in items:
        if not isinstance(item, list) or len(item) != 2:
            raise ParseError(f"{where}: malformed term {item!r}")
        yield item[0], Scalar.from_json(item[1])


def series_from_json(d, where: str = "series"):
    kind = _field(d, "kind", where)
    try:
        if kind == "P":
            order = _int_field(d, "order", where)
            return PSeries.from_dict(dict(_pairs(_field(d, "terms", where), f"{where}.terms")), order)
        if kind == "L":
            window = _window_field(d, where)
            return LSeries(dict(_pairs(_field(d, "terms", where), f"{where}.terms")), window)
        if kind == "M":
            window = _window_field(d, where)
            N_w = _int_field(d, "N_w", where)
            rows = _field(d, "coeffs", where)
            if not isinstance(rows, list) or len(rows) != N_w + 1:
                raise ParseError(f"{where}.coeffs: expected {N_w + 1} rows")
            return MSeries(
                [LSeries(dict(_pairs(r, f"{where}.coeffs[{k}]")), window) for k, r in enumerate(rows)],
                window,
            )
        if kind == "B":
            degree = _int_field(d, "degree", where)
            terms = {}
            for ij, c in _pairs(_field(d, "terms", where), f"{where}.terms"):
                if not isinstance(ij, list) or len(ij) != 2:
                    raise ParseError(f"{where}.terms: malformed exponent pair {ij!r}")
                terms[(ij[0], ij[1])] = c
            return BSeries(terms, degree)
    except (OutOfWindowError, WindowMismatchError) as exc:
        raise ParseError(f"{where}: {exc}") from exc
    raise ParseError(f"{where}.kind: unknown series kind {kind!r}")
