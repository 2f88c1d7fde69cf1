"""The overlay alphabet 𝒜_B built from two substitution systems.

A letter (α, β, p, s, δ) says that the 𝒜-tile α is covered by the row β of
ℬ-tiles, that its children start |p| tiles into ς^δ(β₁), and that the next
letter's children start |s| tiles into ς^δ(b) for the ℬ-tile b following β.
Rows are admissible when consecutive letters agree on s/p and δ; production
replaces α by σ(α) and β by the ς^δ-image trimmed by p and s.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from orbitile.config import config
from orbitile.orbit.window import OrbitWindow, Row, encode_letter, system_to_json
from orbitile.overlay.letter import OverlayLetter
from orbitile.substitution.adaptive_real import AdaptiveReal
from orbitile.substitution.core import (
    Distribution,
    apply,
    distribution,
    growth_rate,
    nu_length,
    require_valid,
)
from orbitile.substitution.system import SubstitutionSystem

logger = logging.getLogger(__name__)


def compute_K(lam: AdaptiveReal, gam: AdaptiveReal) -> int:
    """⌈log λ / log γ⌉, decided by comparing powers of γ with λ."""
    guess = int(np.ceil(np.log(float(lam)) / np.log(float(gam))))
    k = max(1, guess)
    while k > 1 and (gam ** (k - 1)).compare(lam) >= 0:
        k -= 1
    while (gam ** k).compare(lam) < 0:
        k += 1
    return k


def scale_distributions(
    nu: Distribution, eta: Distribution, gam: AdaptiveReal, slack: Fraction | None = None
) -> tuple[Distribution, Distribution]:
    """η' has smallest weight 1; ν' has smallest weight slack·γ·max η'."""
    slack = slack if slack is not None else config.get_orbit_params().scale_slack
    eta_scaled = eta.scaled(1 / eta.min_weight())
    target = gam * eta_scaled.max_weight() * AdaptiveReal.from_rational(slack)
    nu_scaled = nu.scaled(target / nu.min_weight())
    return nu_scaled, eta_scaled


@dataclass
class OverlaySystem:
    sys_a: SubstitutionSystem
    sys_b: SubstitutionSystem
    nu: Distribution
    eta: Distribution
    lam: AdaptiveReal
    gam: AdaptiveReal
    K: int
    N: int
    letters: tuple
    ties_excluded: int = 0
    _members: frozenset = field(default=frozenset(), repr=False)

    def __post_init__(self):
        self._members = frozenset(self.letters)

    def __contains__(self, letter) -> bool:
        return letter in self._members

    def image_b(self, word, delta: int) -> tuple:
        return apply(self.sys_b, word, delta)

    def sort_key(self, letter: OverlayLetter) -> tuple:
        b_index = self.sys_b.index
        return (
            self.sys_a.index(letter.alpha),
            len(letter.beta),
            tuple(b_index(x) for x in letter.beta),
            letter.delta,
            len(letter.p),
            tuple(b_index(x) for x in letter.p),
            len(letter.s),
            tuple(b_index(x) for x in letter.s),
        )

    def to_json(self) -> dict:
        return {
            'systems': {'a': self.sys_a.name, 'b': self.sys_b.name},
            'K': self.K,
            'N': self.N,
            'lambda': self.lam.to_decimal(),
            'gamma': self.gam.to_decimal(),
            'nu': self.nu.to_decimal(),
            'eta': self.eta.to_decimal(),
            'letters': [encode_letter(x) for x in self.letters],
            'ties_excluded': self.ties_excluded,
        }


class _Weigher:
    """η-lengths of ℬ-words through integer count vectors."""

    def __init__(self, eta: Distribution):
        self.eta = eta
        self.sys = eta.system
        self.terms = [eta.weights[b] for b in self.sys.alphabet]

    def counts(self, word) -> np.ndarray:
        vec = np.zeros(self.sys.size, dtype=np.int64)
        for x in word:
            vec[self.sys.index(x)] += 1
        return vec

    def length(self, counts: np.ndarray, scale: AdaptiveReal | None = None) -> AdaptiveReal:
        value = AdaptiveReal.linear_combination([int(c) for c in counts], self.terms)
        return value * scale if scale is not None else value


def _strictly_between(low: AdaptiveReal, value: AdaptiveReal, high: AdaptiveReal) -> bool | None:
    """low < value < high; None when a bound is met exactly."""
    below = low.compare(value)
    if below > 0:
        return False
    above = value.compare(high)
    if above > 0:
        return False
    if below == 0 or above == 0:
        return None
    return True


class _TieLog:
    """Candidates dropped because a strict bound holds with equality."""

    def __init__(self):
        self.count = 0

    def record(self, what: str, *candidate) -> None:
        self.count += 1
        logger.debug('exact tie in %s, candidate %s excluded', what, candidate)


def _beta_words(sys_b: SubstitutionSystem, weigher: _Weigher, bound: AdaptiveReal, ties: _TieLog):
    """Words β with |β_(2…)|_η < bound, by depth-first extension."""
    stack = [(b,) for b in reversed(sys_b.alphabet)]
    while stack:
        beta = stack.pop()
        yield beta
        tail = weigher.counts(beta[1:])
        for b in reversed(sys_b.alphabet):
            extended = tail.copy()
            extended[sys_b.index(b)] += 1
            side = weigher.length(extended).compare(bound)
            if side < 0:
                stack.append(beta + (b,))
            elif side == 0:
                ties.record('|β_(2…)|_η < |α|_ν', beta + (b,))


def enumerate_alphabet(
    sys_a: SubstitutionSystem,
    sys_b: SubstitutionSystem,
    slack: Fraction | None = None,
) -> OverlaySystem:
    require_valid(sys_a)
    require_valid(sys_b)
    lam, gam = growth_rate(sys_a), growth_rate(sys_b)
    K = compute_K(lam, gam)
    nu, eta = scale_distributions(distribution(sys_a), distribution(sys_b), gam, slack)
    weigher = _Weigher(eta)
    deltas = sorted({max(K - 1, 0), K})

    images = {
        (b, d): apply(sys_b, (b,), d) for b in sys_b.alphabet for d in deltas
    }
    image_counts = {key: weigher.counts(word) for key, word in images.items()}

    found = set()
    ties = _TieLog()
    for alpha in sys_a.alphabet:
        size = nu_length(nu, (alpha,))
        produced = nu_length(nu, apply(sys_a, (alpha,), 1))
        for beta in _beta_words(sys_b, weigher, size, ties):
            beta_counts = weigher.counts(beta)
            for b in sys_b.alphabet:
                first_upper = weigher.length(beta_counts + weigher.counts((b,)), gam)
                side = size.compare(first_upper)
                if side == 0:
                    ties.record('|α|_ν < γ|βb|_η', alpha, beta, b)
                if side >= 0:
                    continue
                for delta in deltas:
                    found.update(
                        _factorizations(
                            alpha, beta, b, delta, produced, images, image_counts, weigher, gam, ties
                        )
                    )
        logger.debug('α=%s: %d letters so far', alpha, len(found))

    if not found:
        logger.warning('overlay alphabet of %s over %s is empty', sys_a.name, sys_b.name)
    N = max((max(len(x.p), len(x.s)) for x in found), default=0) + 1
    ov = OverlaySystem(sys_a, sys_b, nu, eta, lam, gam, K, N, tuple(found), ties.count)
    ov.letters = tuple(sorted(found, key=ov.sort_key))
    logger.info(
        'overlay alphabet of %s over %s: %d letters, K=%d, N=%d, %d exact ties excluded',
        sys_a.name, sys_b.name, len(ov.letters), K, N, ties.count,
        extra={'msg_type': 'ALPHABET'},
    )
    return ov


def _factorizations(alpha, beta, b, delta, produced, images, image_counts, weigher, gam, ties):
    """All (p, s) splitting ς^δ(βb) = p q r s t inside both strict bounds."""
    head = images[(beta[0], delta)]
    tail = images[(b, delta)]
    r_counts = sum(
        (image_counts[(x, delta)] for x in beta[1:]), np.zeros(weigher.sys.size, dtype=np.int64)
    )
    for i in range(len(head)):
        q = head[i:]
        for j in range(len(tail)):
            s, t = tail[:j], tail[j:]
            lower = weigher.counts(q[1:]) + r_counts + weigher.counts(s)
            upper = weigher.counts(q) + r_counts + weigher.counts(s) + weigher.counts(t[:1])
            verdict = _strictly_between(weigher.length(lower), produced, weigher.length(upper, gam))
            if verdict is None:
                ties.record('|q₂…rs|_η < |σ(α)|_ν < γ|qrst₁|_η', alpha, beta, head[:i], s, delta)
            elif verdict:
                yield OverlayLetter(alpha, beta, head[:i], s, delta)


# row language and production rules


def adjacent(x: OverlayLetter, y: OverlayLetter) -> bool:
    return x.s == y.p and x.delta == y.delta


def concat_beta(word: Sequence[OverlayLetter]) -> tuple:
    return tuple(itertools.chain.from_iterable(x.beta for x in word))


def production_defect(ov: OverlaySystem, x: OverlayLetter, w: Sequence[OverlayLetter]) -> str | None:
    """Why ``w`` is not produced by ``x``, or None when it is."""
    if not w:
        return 'empty production'
    for k, (left, right) in enumerate(zip(w, w[1:])):
        if not adjacent(left, right):
            return f'children {k} and {k + 1} are not adjacent'
    if apply(ov.sys_a, (x.alpha,), 1) != tuple(y.alpha for y in w):
        return 'α-projection is not σ(α)'
    if x.p + concat_beta(w) != ov.image_b(x.beta, x.delta) + x.s:
        return 'β-concatenation does not match the ς^δ image'
    return None


def is_production(ov: OverlaySystem, x: OverlayLetter, w: Sequence[OverlayLetter]) -> bool:
    return production_defect(ov, x, w) is None


def approx_eq(u: Sequence, v: Sequence, N: int) -> bool:
    """u = p c s and v = p' c s' with all of p, s, p', s' shorter than N."""
    u, v = tuple(u), tuple(v)
    if u == v:
        return True
    for i in range(min(N, len(u) + 1)):
        for j in range(min(N, len(u) - i + 1)):
            common = u[i:len(u) - j]
            for i2 in range(min(N, len(v) + 1)):
                j2 = len(v) - i2 - len(common)
                if 0 <= j2 < N and v[i2:i2 + len(common)] == common:
                    return True
    return False


@dataclass
class Property3Report:
    ok: bool
    index: int | None = None


def verify_property3(
    ov: OverlaySystem, w: Sequence[OverlayLetter], w_prime: Sequence[OverlayLetter]
) -> Property3Report:
    """Check β(w') ≈_N ς^δ(β(w)); on failure locate the first deviating child."""
    if not w or not w_prime:
        return Property3Report(False, 0)
    expanded = ov.image_b(concat_beta(w), w[0].delta)
    produced = concat_beta(w_prime)
    if approx_eq(produced, expanded, ov.N):
        return Property3Report(True)

    expected = (expanded + w[-1].s)[len(w[0].p):]
    offset = 0
    for k, child in enumerate(w_prime):
        if expected[offset:offset + len(child.beta)] != child.beta:
            return Property3Report(False, k)
        offset += len(child.beta)
    return Property3Report(False, len(w_prime) - 1)


def check_letter(ov: OverlaySystem, letter: OverlayLetter) -> bool:
    """Re-derive membership of ``letter`` directly from both inequality chains."""
    if letter.delta not in (ov.K - 1, ov.K) or not letter.beta:
        return False
    size = nu_length(ov.nu, (letter.alpha,))
    produced = nu_length(ov.nu, apply(ov.sys_a, (letter.alpha,), 1))
    head = ov.image_b((letter.beta[0],), letter.delta)
    if len(letter.p) >= len(head) or head[:len(letter.p)] != letter.p:
        return False
    q = head[len(letter.p):]
    r = ov.image_b(letter.beta[1:], letter.delta)

    for b in ov.sys_b.alphabet:
        if not nu_length(ov.eta, letter.beta[1:]) < size:
            continue
        if not size < ov.gam * nu_length(ov.eta, letter.beta + (b,)):
            continue
        tail = ov.image_b((b,), letter.delta)
        if len(letter.s) >= len(tail) or tail[:len(letter.s)] != letter.s:
            continue
        t = tail[len(letter.s):]
        lower = nu_length(ov.eta, q[1:] + r + letter.s)
        upper = ov.gam * nu_length(ov.eta, q + r + letter.s + t[:1])
        if lower < produced < upper:
            return True
    return False


def project_alpha(window: OrbitWindow) -> OrbitWindow:
    """The 𝒜-orbit window carried by the α-labels of an overlay window."""
    ov = window.system
    rows = [Row(r.i, r.j_lo, tuple(x.alpha for x in r.letters), r.core, r.origin) for r in window.rows]
    metadata = {'systems': {'a': system_to_json(ov.sys_a)}, 'projected_from': 'overlay'}
    return OrbitWindow(rows, [list(p) for p in window.parents], kind='base', system=ov.sys_a, metadata=metadata)
