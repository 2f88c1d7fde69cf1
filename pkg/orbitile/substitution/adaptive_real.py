"""Adaptive-precision real numbers.

An ``AdaptiveReal`` is a rule that, given a precision in bits, returns a
closed interval of ``gmpy2.mpfr`` endpoints guaranteed to contain the value.
Endpoints are computed with directed rounding, so refinement never excludes
the true value. Comparisons refine until the enclosures separate; when they
keep overlapping, an optional exact ``sympy`` form is used to confirm
equality, and otherwise ``IndeterminateComparison`` is raised at the budget.
"""

import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import gmpy2
import sympy

from orbitile.config import config
from orbitile.util.exceptions import IndeterminateComparison

logger = logging.getLogger(__name__)

GUARD_BITS = 8
_X = sympy.Symbol('x')


@dataclass(frozen=True)
class Interval:
    lo: gmpy2.mpfr
    hi: gmpy2.mpfr

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def width(self) -> gmpy2.mpfr:
        with gmpy2.context(precision=64, round=gmpy2.RoundUp):
            return self.hi - self.lo

    def midpoint(self) -> gmpy2.mpfr:
        prec = max(self.lo.precision, self.hi.precision) + 2
        with gmpy2.context(precision=prec):
            return (self.lo + self.hi) / 2


def _down(prec: int):
    return gmpy2.context(precision=prec, round=gmpy2.RoundDown)


def _up(prec: int):
    return gmpy2.context(precision=prec, round=gmpy2.RoundUp)


def rational_interval(value: Fraction, prec: int) -> Interval:
    """Tightest pair of ``prec``-bit floats around an exact rational."""
    q = gmpy2.mpq(value.numerator, value.denominator)
    with _down(prec):
        lo = gmpy2.mpfr(q)
    with _up(prec):
        hi = gmpy2.mpfr(q)
    return Interval(lo, hi)


def _add(a: Interval, b: Interval, prec: int) -> Interval:
    with _down(prec):
        lo = a.lo + b.lo
    with _up(prec):
        hi = a.hi + b.hi
    return Interval(lo, hi)


def _neg(a: Interval) -> Interval:
    return Interval(-a.hi, -a.lo)


def _mul(a: Interval, b: Interval, prec: int) -> Interval:
    pairs = [(a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi)]
    with _down(prec):
        lo = min(x * y for x, y in pairs)
    with _up(prec):
        hi = max(x * y for x, y in pairs)
    return Interval(lo, hi)


def _div(a: Interval, b: Interval, prec: int) -> Interval:
    if b.contains_zero():
        return Interval(gmpy2.mpfr('-inf'), gmpy2.mpfr('inf'))
    pairs = [(a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi)]
    with _down(prec):
        lo = min(x / y for x, y in pairs)
    with _up(prec):
        hi = max(x / y for x, y in pairs)
    return Interval(lo, hi)


def _exp(a: Interval, prec: int) -> Interval:
    with _down(prec):
        lo = gmpy2.exp(a.lo)
    with _up(prec):
        hi = gmpy2.exp(a.hi)
    return Interval(lo, hi)


def _log(a: Interval, prec: int) -> Interval:
    if a.lo <= 0:
        lo = gmpy2.mpfr('-inf')
    else:
        with _down(prec):
            lo = gmpy2.log(a.lo)
    with _up(prec):
        hi = gmpy2.log(a.hi) if a.hi > 0 else gmpy2.mpfr('nan')
    return Interval(lo, hi)


def _pow(a: Interval, n: int, prec: int) -> Interval:
    result = Interval(gmpy2.mpfr(1), gmpy2.mpfr(1))
    base = a
    while n:
        if n & 1:
            result = _mul(result, base, prec)
        n >>= 1
        if n:
            base = _mul(base, base, prec)
    return result


class AdaptiveReal:
    """A real number known through enclosures of any requested precision."""

    def __init__(
        self,
        enclose: Callable[[int], Interval],
        exact: Callable[[], sympy.Expr | None] | sympy.Expr | None = None,
        label: str = '',
    ):
        self._enclose = enclose
        self._exact = exact
        self._exact_done = not callable(exact)
        self._cache: dict[int, Interval] = {}
        self._lock = threading.Lock()
        self.label = label

    # construction

    @classmethod
    def from_rational(cls, value, label: str = '') -> 'AdaptiveReal':
        q = Fraction(value)
        return cls(
            lambda prec: rational_interval(q, prec),
            sympy.Rational(q.numerator, q.denominator),
            label or str(q),
        )

    @classmethod
    def from_int(cls, value: int) -> 'AdaptiveReal':
        return cls.from_rational(Fraction(int(value)))

    @classmethod
    def algebraic(cls, poly: sympy.Poly, root_index: int = -1, label: str = '') -> 'AdaptiveReal':
        """The ``root_index``-th real root (ascending) of an irreducible polynomial."""
        poly = sympy.Poly(poly, _X) if not isinstance(poly, sympy.Poly) else poly
        if poly.degree() == 1:
            a, b = poly.all_coeffs()
            value = sympy.Rational(-b, a)
            return cls.from_rational(Fraction(int(value.p), int(value.q)), label)

        isolating = [iv for iv, _ in poly.intervals()]
        s, t = isolating[root_index]
        index = root_index % len(isolating)
        state = {'s': sympy.Rational(s), 't': sympy.Rational(t)}
        lock = threading.Lock()

        def enclose(prec: int) -> Interval:
            with lock:
                eps = sympy.Rational(1, 2 ** prec)
                if state['t'] - state['s'] > eps:
                    s_, t_ = poly.refine_root(state['s'], state['t'], eps=eps)
                    state['s'], state['t'] = sympy.Rational(s_), sympy.Rational(t_)
                s_, t_ = state['s'], state['t']
            lo = rational_interval(Fraction(int(s_.p), int(s_.q)), prec).lo
            hi = rational_interval(Fraction(int(t_.p), int(t_.q)), prec).hi
            return Interval(lo, hi)

        exact = sympy.CRootOf(poly.as_expr(), index)
        return cls(enclose, exact, label or f'root of {poly.as_expr()}')

    @staticmethod
    def coerce(value) -> 'AdaptiveReal':
        if isinstance(value, AdaptiveReal):
            return value
        if isinstance(value, (int, Fraction)):
            return AdaptiveReal.from_rational(value)
        if isinstance(value, sympy.Rational):
            return AdaptiveReal.from_rational(Fraction(int(value.p), int(value.q)))
        raise TypeError(f'cannot treat {type(value).__name__} as an exact real')

    # enclosures

    def enclosure(self, prec: int) -> Interval:
        with self._lock:
            cached = self._cache.get(prec)
        if cached is not None:
            return cached
        interval = self._enclose(prec)
        with self._lock:
            self._cache.setdefault(prec, interval)
        return interval

    def exact(self) -> sympy.Expr | None:
        if not self._exact_done:
            with self._lock:
                if not self._exact_done:
                    try:
                        self._exact = self._exact()
                    except (TypeError, ValueError, NotImplementedError) as e:
                        logger.debug('no exact form for %s: %s', self.label, e)
                        self._exact = None
                    self._exact_done = True
        return self._exact

    # arithmetic

    def _binary(self, other, op, exact_op, symbol: str) -> 'AdaptiveReal':
        other = AdaptiveReal.coerce(other)
        a, b = self, other

        def enclose(prec: int) -> Interval:
            return op(a.enclosure(prec + GUARD_BITS), b.enclosure(prec + GUARD_BITS), prec)

        def exact():
            ea, eb = a.exact(), b.exact()
            if ea is None or eb is None:
                return None
            return exact_op(ea, eb)

        return AdaptiveReal(enclose, exact, f'({a.label} {symbol} {b.label})')

    def __add__(self, other):
        return self._binary(other, _add, lambda x, y: x + y, '+')

    def __radd__(self, other):
        return AdaptiveReal.coerce(other) + self

    def __sub__(self, other):
        return self._binary(
            other, lambda a, b, p: _add(a, _neg(b), p), lambda x, y: x - y, '-'
        )

    def __rsub__(self, other):
        return AdaptiveReal.coerce(other) - self

    def __mul__(self, other):
        return self._binary(other, _mul, lambda x, y: x * y, '*')

    def __rmul__(self, other):
        return AdaptiveReal.coerce(other) * self

    def __truediv__(self, other):
        return self._binary(other, _div, lambda x, y: x / y, '/')

    def __rtruediv__(self, other):
        return AdaptiveReal.coerce(other) / self

    def __neg__(self):
        a = self
        return AdaptiveReal(
            lambda prec: _neg(a.enclosure(prec)),
            lambda: None if a.exact() is None else -a.exact(),
            f'-{a.label}',
        )

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError('only integer powers are supported')
        if n < 0:
            return AdaptiveReal.from_int(1) / (self ** (-n))
        if n == 0:
            return AdaptiveReal.from_int(1)
        a = self
        guard = GUARD_BITS + n.bit_length() * 2
        return AdaptiveReal(
            lambda prec: _pow(a.enclosure(prec + guard), n, prec + guard // 2),
            lambda: None if a.exact() is None else a.exact() ** n,
            f'{a.label}^{n}',
        )

    def exp(self) -> 'AdaptiveReal':
        a = self
        return AdaptiveReal(
            lambda prec: _exp(a.enclosure(prec + GUARD_BITS), prec),
            lambda: None if a.exact() is None else sympy.exp(a.exact()),
            f'exp({a.label})',
        )

    def log(self) -> 'AdaptiveReal':
        a = self
        return AdaptiveReal(
            lambda prec: _log(a.enclosure(prec + GUARD_BITS), prec),
            lambda: None if a.exact() is None else sympy.log(a.exact()),
            f'log({a.label})',
        )

    @staticmethod
    def linear_combination(
        coefficients: Sequence[int | Fraction], terms: Sequence['AdaptiveReal']
    ) -> 'AdaptiveReal':
        """Σ c_k · t_k with exact rational coefficients, as one node."""
        pairs = [(Fraction(c), t) for c, t in zip(coefficients, terms) if c]
        if not pairs:
            return AdaptiveReal.from_int(0)

        def enclose(prec: int) -> Interval:
            work = prec + GUARD_BITS + len(pairs).bit_length()
            total = Interval(gmpy2.mpfr(0), gmpy2.mpfr(0))
            for c, t in pairs:
                term = _mul(rational_interval(c, work), t.enclosure(work), work)
                total = _add(total, term, work)
            return total

        def exact():
            parts = [t.exact() for _, t in pairs]
            if any(e is None for e in parts):
                return None
            return sympy.Add(
                *[sympy.Rational(c.numerator, c.denominator) * e for (c, _), e in zip(pairs, parts)]
            )

        return AdaptiveReal(enclose, exact, 'linear combination')

    # comparison

    def compare(self, other, bits: int | None = None) -> int:
        """Return -1, 0 or +1; equality is only reported when proven exactly."""
        other = AdaptiveReal.coerce(other)
        params = config.get_precision_params()
        budget = bits or params.bit_budget
        prec = min(params.start_bits, budget)
        tried_exact = False
        while True:
            a, b = self.enclosure(prec), other.enclosure(prec)
            if a.hi < b.lo:
                return -1
            if a.lo > b.hi:
                return 1
            if a.lo == a.hi == b.lo == b.hi:
                return 0
            if not tried_exact and (prec >= params.exact_fallback_bits or prec >= budget):
                tried_exact = True
                if exactly_equal(self, other):
                    return 0
            if prec >= budget:
                raise IndeterminateComparison(budget, f'{self.label} vs {other.label}')
            prec = min(prec * 2, budget)

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def sign(self) -> int:
        return self.compare(0)

    def close_to(self, other, rel: float = 1e-9, prec: int = 128) -> bool:
        """Approximate agreement to relative precision ``rel`` (not a decision)."""
        other = AdaptiveReal.coerce(other)
        a, b = self.enclosure(prec), other.enclosure(prec)
        with _up(prec):
            spread = max(abs(a.hi - b.lo), abs(b.hi - a.lo))
            scale = max(abs(a.lo), abs(a.hi), abs(b.lo), abs(b.hi))
        return spread <= rel * scale or spread == 0

    # display

    def __float__(self) -> float:
        return float(self.enclosure(64).midpoint())

    def to_decimal(self, digits: int = 50) -> str:
        prec = int(digits * 3.33) + 16
        mid = self.enclosure(prec).midpoint()
        return format(mid, f'.{digits}g')

    def __repr__(self) -> str:
        return f'AdaptiveReal({self.to_decimal(17)})'


def exactly_equal(a: AdaptiveReal, b: AdaptiveReal) -> bool:
    """True only when the exact forms provably coincide."""
    ea, eb = a.exact(), b.exact()
    if ea is None or eb is None:
        return False
    difference = ea - eb
    if difference == 0:
        return True
    try:
        return sympy.minimal_polynomial(difference, _X) == _X
    except Exception as e:  # NotAlgebraic and sympy's assorted failures
        logger.debug('exact equality test gave up on %s: %s', difference, e)
        return False


def sum_reals(values: Iterable[AdaptiveReal]) -> AdaptiveReal:
    values = list(values)
    return AdaptiveReal.linear_combination([1] * len(values), values)
