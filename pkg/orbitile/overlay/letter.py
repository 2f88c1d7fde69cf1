from dataclasses import dataclass

from orbitile.substitution.system import word_str


@dataclass(frozen=True)
class OverlayLetter:
    """A letter (α, β, p, s, δ) recording how a row of ℬ-tiles covers one 𝒜-tile."""

    alpha: object
    beta: tuple
    p: tuple
    s: tuple
    delta: int

    def __post_init__(self):
        object.__setattr__(self, 'beta', tuple(self.beta))
        object.__setattr__(self, 'p', tuple(self.p))
        object.__setattr__(self, 's', tuple(self.s))

    def __str__(self) -> str:
        parts = [word_str(w) or 'ε' for w in (self.beta, self.p, self.s)]
        return f'({self.alpha}|{parts[0]}|{parts[1]}|{parts[2]}|{self.delta})'
