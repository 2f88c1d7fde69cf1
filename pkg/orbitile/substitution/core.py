import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import gmpy2
import numpy as np
import sympy

from orbitile.config import config
from orbitile.substitution.adaptive_real import AdaptiveReal
from orbitile.substitution.system import SubstitutionSystem, Word
from orbitile.util.exceptions import (
    IndeterminateComparison,
    NotExpansive,
    NotPrimitive,
)

logger = logging.getLogger(__name__)

X = sympy.Symbol('x')


def substitution_matrix(sys_: SubstitutionSystem) -> np.ndarray:
    """Entry (i, j) counts letter i in the image of letter j."""
    n = sys_.size
    matrix = np.zeros((n, n), dtype=np.int64)
    for j, letter in enumerate(sys_.alphabet):
        for produced in sys_.image(letter):
            matrix[sys_.index(produced), j] += 1
    return matrix


def _boolean_power(pattern: np.ndarray, k: int) -> np.ndarray:
    result = np.eye(pattern.shape[0], dtype=np.int64)
    base = pattern.copy()
    while k:
        if k & 1:
            result = np.minimum(result @ base, 1)
        k >>= 1
        if k:
            base = np.minimum(base @ base, 1)
    return result


def is_primitive(sys_: SubstitutionSystem) -> bool:
    pattern = (substitution_matrix(sys_) > 0).astype(np.int64)
    k = (sys_.size - 1) ** 2 + 1
    return bool(np.all(_boolean_power(pattern, k) > 0))


def is_expansive(sys_: SubstitutionSystem) -> bool:
    if not is_primitive(sys_):
        raise NotPrimitive(sys_.name)
    return any(len(sys_.image(a)) > 1 for a in sys_.alphabet)


def require_valid(sys_: SubstitutionSystem) -> None:
    """Raise unless the system is primitive and expansive."""
    if not is_expansive(sys_):
        raise NotExpansive(sys_.name)


def apply(sys_: SubstitutionSystem, word, k: int = 1) -> Word:
    word = sys_.word(word)
    for _ in range(k):
        word = tuple(x for letter in word for x in sys_.image(letter))
    return word


def image_lengths(sys_: SubstitutionSystem, k: int) -> dict:
    """|σ^k(a)| for every letter, computed from count vectors with exact integers."""
    matrix = substitution_matrix(sys_).astype(object)
    counts = np.eye(sys_.size, dtype=object)
    for _ in range(k):
        counts = matrix.dot(counts)
    totals = counts.sum(axis=0)
    return {a: int(totals[j]) for j, a in enumerate(sys_.alphabet)}


# spectral data


def characteristic_polynomial(sys_: SubstitutionSystem) -> sympy.Poly:
    matrix = sympy.Matrix(substitution_matrix(sys_).tolist())
    return matrix.charpoly(X)


@lru_cache(maxsize=None)
def _perron(sys_: SubstitutionSystem) -> tuple[sympy.Poly, AdaptiveReal]:
    require_valid(sys_)
    _, factors = characteristic_polynomial(sys_).factor_list()
    best = None
    for factor, _multiplicity in factors:
        factor = sympy.Poly(factor, X).monic()
        if factor.count_roots() == 0:
            continue
        root = AdaptiveReal.algebraic(factor, -1, label=f'λ[{sys_.name}]')
        if best is None or root > best[1]:
            best = (factor, root)
    logger.debug('growth rate of %s has minimal polynomial %s', sys_.name, best[0].as_expr())
    return best


def minimal_polynomial(sys_: SubstitutionSystem) -> sympy.Poly:
    """The irreducible factor of the characteristic polynomial vanishing at λ."""
    return _perron(sys_)[0]


def growth_rate(sys_: SubstitutionSystem) -> AdaptiveReal:
    return _perron(sys_)[1]


def _field_eigenvector(matrix: sympy.Matrix, poly: sympy.Poly) -> list[list]:
    """Rational coordinates (in the basis 1, λ, …, λ^(m-1)) of a vector v with M v = λ v."""
    n = matrix.shape[0]
    m = poly.degree()
    coeffs = poly.monic().all_coeffs()
    # λ^m = Σ top[k] λ^k
    top = [-coeffs[m - k] for k in range(m)]

    rows = []
    for i in range(n):
        for t in range(m):
            row = [sympy.Integer(0)] * (n * m)
            for j in range(n):
                row[j * m + t] += matrix[i, j]
            if t >= 1:
                row[i * m + t - 1] -= 1
            row[i * m + m - 1] -= top[t]
            rows.append(row)

    null = sympy.Matrix(rows).nullspace()
    if not null:
        raise NotPrimitive()
    vector = null[0]
    return [[vector[j * m + k] for k in range(m)] for j in range(n)]


def _perron_vector(sys_: SubstitutionSystem, transpose: bool) -> list[AdaptiveReal]:
    poly, lam = _perron(sys_)
    matrix = sympy.Matrix(substitution_matrix(sys_).tolist())
    if transpose:
        matrix = matrix.T
    powers = [lam ** k for k in range(poly.degree())]
    coords = _field_eigenvector(matrix, poly)
    vector = [
        AdaptiveReal.linear_combination([sympy_fraction(c) for c in row], powers)
        for row in coords
    ]
    if vector[0].sign() < 0:
        vector = [-v for v in vector]
    return vector


def sympy_fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


@dataclass(frozen=True)
class Distribution:
    """Positive left eigenvector ν of the substitution matrix, keyed by letter."""

    system: SubstitutionSystem
    weights: Mapping = field(hash=False)
    lam: AdaptiveReal = field(hash=False, compare=False)

    def weight(self, letter) -> AdaptiveReal:
        self.system.index(letter)
        return self.weights[letter]

    def length(self, word) -> AdaptiveReal:
        return nu_length(self, word)

    def scaled(self, factor) -> 'Distribution':
        factor = AdaptiveReal.coerce(factor)
        return Distribution(
            self.system, {a: w * factor for a, w in self.weights.items()}, self.lam
        )

    def min_weight(self) -> AdaptiveReal:
        return _extreme(self.weights.values(), lower=True)

    def max_weight(self) -> AdaptiveReal:
        return _extreme(self.weights.values(), lower=False)

    def to_decimal(self, digits: int = 50) -> dict:
        return {str(a): self.weights[a].to_decimal(digits) for a in self.system.alphabet}


def _extreme(values: Iterable[AdaptiveReal], lower: bool) -> AdaptiveReal:
    values = list(values)
    best = values[0]
    for v in values[1:]:
        cmp = v.compare(best)
        if (lower and cmp < 0) or (not lower and cmp > 0):
            best = v
    return best


@lru_cache(maxsize=None)
def distribution(sys_: SubstitutionSystem) -> Distribution:
    """ν normalised so its smallest weight is 1."""
    vector = _perron_vector(sys_, transpose=True)
    smallest = _extreme(vector, lower=True)
    weights = {a: v / smallest for a, v in zip(sys_.alphabet, vector)}
    # the minimum letter divides to exactly 1
    for a, v in zip(sys_.alphabet, vector):
        if v is smallest:
            weights[a] = AdaptiveReal.from_int(1)
    return Distribution(sys_, weights, growth_rate(sys_))


def letter_frequencies(sys_: SubstitutionSystem) -> dict:
    """Right Perron eigenvector normalised to sum 1: asymptotic letter frequencies."""
    vector = _perron_vector(sys_, transpose=False)
    total = AdaptiveReal.linear_combination([1] * len(vector), vector)
    return {a: v / total for a, v in zip(sys_.alphabet, vector)}


def nu_length(dist: Distribution, word) -> AdaptiveReal:
    word = dist.system.word(word)
    if not word:
        return AdaptiveReal.from_int(0)
    counts = Counter(word)
    letters = [a for a in dist.system.alphabet if counts[a]]
    return AdaptiveReal.linear_combination(
        [counts[a] for a in letters], [dist.weights[a] for a in letters]
    )


# growth checks


@dataclass
class ThetaReport:
    constant: float
    ratios: dict
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def theta_bracket(sys_: SubstitutionSystem, k_lo: int = 5, k_hi: int = 15) -> ThetaReport:
    """Check that |σ^k(a)| / λ^k stays within [1/C, C], with C fixed at k_lo."""
    log_lam = np.log(float(growth_rate(sys_)))
    ratios = {a: [] for a in sys_.alphabet}
    for k in range(k_lo, k_hi + 1):
        for a, length in image_lengths(sys_, k).items():
            ratios[a].append(float(np.exp(np.log(float(length)) - k * log_lam)))

    first = [r[0] for r in ratios.values()]
    constant = 2.0 * max(max(first), 1.0 / min(first))
    violations = [
        (a, k_lo + idx, r)
        for a, rs in ratios.items()
        for idx, r in enumerate(rs)
        if not 1.0 / constant <= r <= constant
    ]
    return ThetaReport(constant, ratios, violations)


def _square_bounds(root) -> tuple:
    """Rational lower and upper bounds of |μ|² for a real interval or complex rectangle."""
    if isinstance(root[0], tuple):
        (x1, y1), (x2, y2) = root
        xs, ys = (x1, x2), (y1, y2)
    else:
        xs, ys = root, (0, 0)

    def span(a, b):
        a, b = sympy.Rational(a), sympy.Rational(b)
        hi = max(a * a, b * b)
        lo = 0 if a <= 0 <= b else min(a * a, b * b)
        return lo, hi

    xlo, xhi = span(*xs)
    ylo, yhi = span(*ys)
    return xlo + ylo, xhi + yhi


def _mpfr_rational(value) -> sympy.Rational:
    q = gmpy2.mpq(value)
    return sympy.Rational(int(q.numerator), int(q.denominator))


def eigenvalue_dominance(sys_: SubstitutionSystem, max_bits: int = 256) -> bool:
    """True iff λ is simple and strictly larger in modulus than every other root."""
    perron_factor, lam = _perron(sys_)
    _, factors = characteristic_polynomial(sys_).factor_list()
    for factor, multiplicity in factors:
        if sympy.Poly(factor, X).monic() == perron_factor and multiplicity > 1:
            return False

    bits = 16
    while bits <= max_bits:
        interval = (lam * lam).enclosure(bits + 32)
        lam_lo, lam_hi = _mpfr_rational(interval.lo), _mpfr_rational(interval.hi)
        eps = sympy.Rational(1, 2 ** bits)
        undecided = False
        for factor, _ in factors:
            poly = sympy.Poly(factor, X).monic()
            real, complex_ = poly.intervals(all=True, eps=eps)
            roots = [iv for iv, _ in real]
            if poly == perron_factor:
                roots = roots[:-1]
            roots += [rect for rect, _ in complex_]
            for root in roots:
                lo, hi = _square_bounds(root)
                if hi < lam_lo:
                    continue
                if lo >= lam_hi:
                    return False
                undecided = True
        if not undecided:
            return True
        bits *= 2
    raise IndeterminateComparison(max_bits, f'eigenvalue dominance of {sys_.name}')


# commensurability


@dataclass(frozen=True)
class IncommensurateUpTo:
    bound: int

    def __str__(self):
        return f'IncommensurateUpTo({self.bound})'


@dataclass(frozen=True)
class Commensurate:
    m: int
    n: int

    def __str__(self):
        return f'Commensurate({self.m},{self.n})'


@dataclass(frozen=True)
class Indeterminate:
    reason: str = ''

    def __str__(self):
        return 'Indeterminate'


def incommensurate(
    sys_a: SubstitutionSystem, sys_b: SubstitutionSystem, bound: int | None = None
):
    """Search m, n <= bound for λ^m = γ^n; equality is confirmed exactly."""
    bound = bound or config.bound
    lam, gam = growth_rate(sys_a), growth_rate(sys_b)
    lam_powers = [None] + [lam ** m for m in range(1, bound + 1)]
    gam_powers = [None] + [gam ** n for n in range(1, bound + 1)]
    try:
        for m in range(1, bound + 1):
            for n in range(1, bound + 1):
                if lam_powers[m].compare(gam_powers[n]) == 0:
                    logger.info(
                        'λ^%d = γ^%d for %s and %s', m, n, sys_a.name, sys_b.name,
                        extra={'msg_type': 'VERDICT'},
                    )
                    return Commensurate(m, n)
    except IndeterminateComparison as e:
        logger.warning('commensurability undecided: %s', e)
        return Indeterminate(str(e))
    return IncommensurateUpTo(bound)
