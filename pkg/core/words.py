from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, List, Sequence, Tuple

from .errors import DomainError, LexicalError

logger = logging.getLogger(__name__)

Syllable = Tuple[str, int]

_TOKEN = re.compile(r"^[a-z][0-9]*$")
_INDEXED = re.compile(r"^([a-z])([0-9]+)$")


@dataclass(frozen=True)
class Alphabet:
    """Ordered generators of the ambient free group.

    Symbols are single lowercase letters or indexed tokens such as ``x1``.
    The order fixes canonical edge ordering in core graphs.
    """

    letters: Tuple[str, ...]

    def __post_init__(self) -> None:
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        if not letters:
            raise DomainError("Alphabet must contain at least one letter.")
        if len(set(letters)) != len(letters):
            raise DomainError(f"Alphabet has duplicate letters: {letters}")
        for letter in letters:
            if not _TOKEN.match(letter):
                raise DomainError(f"Invalid alphabet symbol {letter!r}")

    def __contains__(self, letter: object) -> bool:
        return letter in self.letters

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[str]:
        return iter(self.letters)

    def index(self, letter: str) -> int:
        return self.letters.index(letter)

    def union(self, other: "Alphabet") -> "Alphabet":
        merged = list(self.letters)
        merged.extend(l for l in other.letters if l not in self.letters)
        return Alphabet(tuple(merged))

    def fresh_letter(self, stem: str = "x") -> str:
        """Next unused indexed letter, e.g. ``x3`` when ``x1``, ``x2`` exist."""
        used = [int(m.group(2)) for m in map(_INDEXED.match, self.letters) if m and m.group(1) == stem]
        return f"{stem}{max(used, default=0) + 1}"

    def extend(self, stem: str = "x") -> Tuple["Alphabet", str]:
        letter = self.fresh_letter(stem)
        return Alphabet(self.letters + (letter,)), letter

    def is_indexed(self) -> bool:
        return all(_INDEXED.match(l) for l in self.letters)

    @classmethod
    def of(cls, *letters: str) -> "Alphabet":
        return cls(tuple(letters))

    @classmethod
    def indexed(cls, n: int, stem: str = "x") -> "Alphabet":
        return cls(tuple(f"{stem}{i}" for i in range(1, n + 1)))

    @classmethod
    def infer(cls, words: Iterable["Word"]) -> "Alphabet":
        seen: List[str] = []
        for w in words:
            for letter, _ in w.syllables:
                if letter not in seen:
                    seen.append(letter)
        if not seen:
            return cls(("x", "y"))
        return cls(tuple(sorted(seen, key=_letter_sort_key)))


def _letter_sort_key(letter: str) -> Tuple[str, int]:
    m = _INDEXED.match(letter)
    if m:
        return (m.group(1), int(m.group(2)))
    return (letter, 0)


XY = Alphabet(("x", "y"))
ABC = Alphabet(("a", "b", "c"))


@dataclass(frozen=True)
class Word:
    """A freely reduced word; construct through :func:`reduce` or :func:`parse_word`."""

    syllables: Tuple[Syllable, ...] = ()

    def __len__(self) -> int:
        return len(self.syllables)

    def __iter__(self) -> Iterator[Syllable]:
        return iter(self.syllables)

    def __str__(self) -> str:
        return format_word(self)

    def __mul__(self, other: "Word") -> "Word":
        return concat(self, other)

    def inverse(self) -> "Word":
        return invert(self)

    def is_empty(self) -> bool:
        return not self.syllables

    def letters(self) -> set:
        return {letter for letter, _ in self.syllables}


EMPTY = Word(())


def reduce(syllables: Iterable[Syllable]) -> Word:
    stack: List[Syllable] = []
    for letter, sign in syllables:
        if stack and stack[-1][0] == letter and stack[-1][1] == -sign:
            stack.pop()
        else:
            stack.append((letter, sign))
    return Word(tuple(stack))


def invert(w: Word) -> Word:
    return Word(tuple((letter, -sign) for letter, sign in reversed(w.syllables)))


def concat(*words: Word) -> Word:
    return reduce(itertools.chain.from_iterable(w.syllables for w in words))


def power(w: Word, n: int) -> Word:
    if n < 0:
        return power(invert(w), -n)
    return concat(*([w] * n)) if n else EMPTY


def cyclically_reduce(w: Word) -> Word:
    syl = list(w.syllables)
    while len(syl) >= 2 and syl[0][0] == syl[-1][0] and syl[0][1] == -syl[-1][1]:
        syl = syl[1:-1]
    return Word(tuple(syl))


def format_syllable(letter: str, sign: int) -> str:
    return letter if sign > 0 else letter[0].upper() + letter[1:]


def format_word(w: Word) -> str:
    return "".join(format_syllable(letter, sign) for letter, sign in w.syllables)


def tokenize(text: str) -> List[Tuple[str, int, int]]:
    """Split word text into (letter, sign, position) triples without reducing."""
    tokens: List[Tuple[str, int, int]] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if not ch.isascii() or not ch.isalpha():
            raise LexicalError(ch, i, text)
        j = i + 1
        while j < len(text) and text[j].isdigit():
            j += 1
        tokens.append((ch.lower() + text[i + 1:j], 1 if ch.islower() else -1, i))
        i = j
    return tokens


def parse_word(text: str, alphabet: Alphabet | None = None) -> Word:
    """Parse ``text`` (uppercase = inverse) into a reduced word over ``alphabet``."""
    syllables: List[Syllable] = []
    for letter, sign, position in tokenize(text):
        if alphabet is not None and letter not in alphabet:
            raise LexicalError(text[position:position + len(letter)], position, text)
        syllables.append((letter, sign))
    return reduce(syllables)


def parse_words(texts: Iterable[str], alphabet: Alphabet | None = None) -> List[Word]:
    return [parse_word(t, alphabet) for t in texts]


def theta_embed(w: Word, domain: Alphabet | None = None) -> Word:
    """Image under the two-vertex scheme: first letter -> cA, second letter -> cB."""
    domain = domain or (Alphabet.infer([w]) if len(w.letters()) == 2 else XY)
    if len(domain) != 2:
        raise DomainError(f"theta_embed needs a 2-letter domain alphabet, got {domain.letters}")
    if not w.letters() <= set(domain.letters):
        raise DomainError(f"Word {format_word(w)} uses letters outside {domain.letters}")
    images = {
        domain.letters[0]: (("c", 1), ("a", -1)),
        domain.letters[1]: (("c", 1), ("b", -1)),
    }
    out: List[Syllable] = []
    for letter, sign in w.syllables:
        image = images[letter]
        if sign < 0:
            image = tuple((l, -s) for l, s in reversed(image))
        out.extend(image)
    return reduce(out)


def rank2_embed(w: Word) -> Word:
    """Image under x_i -> y^-i x y^i; injective, so subgroup ranks are preserved."""
    out: List[Syllable] = []
    for letter, sign in w.syllables:
        m = _INDEXED.match(letter)
        if not m:
            raise DomainError(f"rank2_embed needs indexed letters, got {letter!r}")
        i = int(m.group(2))
        out.extend([("y", -1)] * i)
        out.append(("x", sign))
        out.extend([("y", 1)] * i)
    return reduce(out)


def relabel(w: Word, mapping: dict) -> Word:
    return reduce((mapping[letter], sign) for letter, sign in w.syllables)


def reduced_words(alphabet: Alphabet, max_length: int) -> Iterator[Word]:
    """All freely reduced words of length <= max_length, shortest first."""
    symbols = [(l, s) for l in alphabet.letters for s in (1, -1)]
    frontier: List[Tuple[Syllable, ...]] = [()]
    yield EMPTY
    for _ in range(max_length):
        nxt: List[Tuple[Syllable, ...]] = []
        for syl in frontier:
            for letter, sign in symbols:
                if syl and syl[-1] == (letter, -sign):
                    continue
                extended = syl + ((letter, sign),)
                nxt.append(extended)
                yield Word(extended)
        frontier = nxt


def parse_subgroup_text(text: str) -> Tuple[Alphabet, List[Word]]:
    """Read the subgroup file format: one word per line, '#' comments, optional alphabet header."""
    declared: Alphabet | None = None
    raw: List[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.lower().startswith("alphabet:"):
            declared = Alphabet(tuple(stripped.split(":", 1)[1].split()))
            continue
        raw.append(stripped)
    words = [parse_word(t, declared) for t in raw]
    alphabet = declared or Alphabet.infer(words)
    return alphabet, words


def read_subgroup_file(path: str | Path) -> Tuple[Alphabet, List[Word]]:
    text = Path(path).read_text(encoding="utf-8")
    alphabet, words = parse_subgroup_text(text)
    logger.debug(f"Read {len(words)} generators over {alphabet.letters} from {path}")
    return alphabet, words


def format_subgroup(words: Sequence[Word], alphabet: Alphabet | None = None) -> str:
    lines = []
    if alphabet is not None:
        lines.append("alphabet: " + " ".join(alphabet.letters))
    lines.extend(format_word(w) for w in words)
    return "\n".join(lines) + "\n"
