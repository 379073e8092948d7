"""Reduced words in a finite generating set and their evaluation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, TypeVar

T = TypeVar("T")


@dataclass(frozen=True, order=True)
class Word:
    """Letters are +i (generator i-1) or -i (its inverse), i >= 1."""

    letters: tuple[int, ...] = ()

    def __len__(self):
        return len(self.letters)

    def inverse(self) -> "Word":
        return Word(tuple(-a for a in reversed(self.letters)))

    def __mul__(self, other: "Word") -> "Word":
        out = list(self.letters)
        for a in other.letters:
            if out and out[-1] == -a:
                out.pop()
            else:
                out.append(a)
        return Word(tuple(out))

    def __pow__(self, n: int) -> "Word":
        base = self if n >= 0 else self.inverse()
        out = Word()
        for _ in range(abs(n)):
            out = out * base
        return out

    def format(self, names: Sequence[str]) -> str:
        if not self.letters:
            return "1"
        parts = []
        for a in self.letters:
            name = names[abs(a) - 1]
            parts.append(name if a > 0 else name + "^-1")
        return "*".join(parts)

    @staticmethod
    def parse(text: str, names: Sequence[str]) -> "Word":
        text = text.strip()
        if text == "1":
            return Word()
        letters = []
        for part in text.split("*"):
            part = part.strip()
            inv = part.endswith("^-1")
            name = part[:-3] if inv else part
            if name not in names:
                raise ValueError(f"unknown generator {name!r} in word {text!r}")
            i = list(names).index(name) + 1
            letters.append(-i if inv else i)
        return Word(tuple(letters))


def generator(i: int) -> Word:
    return Word((i + 1,))


def commutator(a: Word, b: Word) -> Word:
    """[a, b] = a b a^-1 b^-1."""
    return a * b * a.inverse() * b.inverse()


def _symbol_order(ngens: int) -> list[int]:
    out = []
    for i in range(1, ngens + 1):
        out += [i, -i]
    return out


def enumerate_words(ngens: int, max_len: int, include_identity: bool = False) -> Iterator[Word]:
    """Freely reduced words by length, then lexicographically in the symbol
    order g1, g1^-1, g2, g2^-1, ..."""
    if include_identity:
        yield Word()
    symbols = _symbol_order(ngens)
    layer = [()]
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for s in symbols:
                if w and w[-1] == -s:
                    continue
                nxt.append(w + (s,))
        for w in nxt:
            yield Word(w)
        layer = nxt


def evaluate(word: Word, gens: Sequence[T], mul: Callable[[T, T], T],
             inv: Callable[[T], T], identity: T) -> T:
    out = identity
    inverses: dict[int, T] = {}
    for a in word.letters:
        g = gens[a - 1] if a > 0 else inverses.setdefault(-a, inv(gens[-a - 1]))
        out = mul(out, g)
    return out
