"""Substitution systems and the ``.sys`` text format.

A file describes one system::

    # Fibonacci
    system fib
    letter a -> a b
    letter b -> a

Letters are whitespace-free tokens; their order of definition fixes the
alphabet order used for matrix rows and columns.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Iterable, Mapping, Sequence

from orbitile.util.exceptions import SystemParseError, UnknownLetter

logger = logging.getLogger(__name__)

Letter = Hashable
Word = tuple


@dataclass(frozen=True)
class SubstitutionSystem:
    name: str
    alphabet: tuple
    rules: Mapping

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        if not alphabet:
            raise SystemParseError(reason='the alphabet is empty')
        if len(set(alphabet)) != len(alphabet):
            raise SystemParseError(reason='the alphabet repeats a letter')
        rules = {}
        for letter in alphabet:
            if letter not in self.rules:
                raise SystemParseError(reason=f"no rule for letter '{letter}'")
            image = tuple(self.rules[letter])
            if not image:
                raise SystemParseError(reason=f"the image of '{letter}' is empty")
            for produced in image:
                if produced not in self.rules:
                    raise UnknownLetter(produced)
            rules[letter] = image
        object.__setattr__(self, 'alphabet', alphabet)
        object.__setattr__(self, 'rules', rules)

    def __hash__(self):
        return hash((self.alphabet, tuple(self.rules[a] for a in self.alphabet)))

    def __eq__(self, other):
        if not isinstance(other, SubstitutionSystem):
            return NotImplemented
        return self.alphabet == other.alphabet and self.rules == other.rules

    @property
    def size(self) -> int:
        return len(self.alphabet)

    def index(self, letter: Letter) -> int:
        try:
            return self.alphabet.index(letter)
        except ValueError:
            raise UnknownLetter(letter) from None

    def image(self, letter: Letter) -> Word:
        try:
            return self.rules[letter]
        except (KeyError, TypeError):
            raise UnknownLetter(letter) from None

    def word(self, text: str | Iterable) -> Word:
        """Coerce ``text`` into a word, checking every letter."""
        word = as_word(text)
        for letter in word:
            if letter not in self.rules:
                raise UnknownLetter(letter)
        return word


def as_word(text: str | Iterable) -> Word:
    """Strings with whitespace split into tokens; other strings split into characters."""
    if isinstance(text, str):
        return tuple(text.split()) if any(ch.isspace() for ch in text) else tuple(text)
    return tuple(text)


def word_str(word: Sequence) -> str:
    if all(isinstance(x, str) and len(x) == 1 for x in word):
        return ''.join(word)
    return ' '.join(str(x) for x in word)


def make_system(name: str, rules: Mapping) -> SubstitutionSystem:
    """Build a system from ``{letter: image}``; string images go through ``as_word``."""
    return SubstitutionSystem(
        name, tuple(rules), {a: as_word(img) for a, img in rules.items()}
    )


def parse_system(text: str) -> SubstitutionSystem:
    name = None
    alphabet: list = []
    rules: dict = {}
    lines: dict = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == 'system':
            if name is not None:
                raise SystemParseError(line_no, 'a second system header')
            if len(tokens) != 2:
                raise SystemParseError(line_no, 'expected "system <name>"')
            name = tokens[1]
        elif tokens[0] == 'letter':
            if name is None:
                raise SystemParseError(line_no, 'rule before the system header')
            if len(tokens) < 3 or tokens[2] != '->':
                raise SystemParseError(line_no, 'expected "letter <L> -> <L1> ... <Lk>"')
            letter, image = tokens[1], tokens[3:]
            if letter in rules:
                raise SystemParseError(line_no, f"letter '{letter}' defined twice")
            if not image:
                raise SystemParseError(line_no, f"empty image for '{letter}'")
            alphabet.append(letter)
            rules[letter] = tuple(image)
            lines[letter] = line_no
        else:
            raise SystemParseError(line_no, f"unknown keyword '{tokens[0]}'")

    if name is None:
        raise SystemParseError(reason='missing "system <name>" header')
    if not rules:
        raise SystemParseError(reason='no letters defined')
    for letter in alphabet:
        for produced in rules[letter]:
            if produced not in rules:
                raise SystemParseError(lines[letter], f"undefined letter '{produced}'")

    return SubstitutionSystem(name, tuple(alphabet), rules)


def load_system(path: str | Path) -> SubstitutionSystem:
    path = Path(path)
    sys_ = parse_system(path.read_text())
    logger.debug('loaded system %s (%d letters) from %s', sys_.name, sys_.size, path)
    return sys_


def dump_system(sys_: SubstitutionSystem) -> str:
    lines = [f'system {sys_.name}']
    for letter in sys_.alphabet:
        image = ' '.join(str(x) for x in sys_.image(letter))
        lines.append(f'letter {letter} -> {image}')
    return '\n'.join(lines) + '\n'
