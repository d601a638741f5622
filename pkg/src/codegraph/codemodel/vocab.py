from __future__ import annotations

from pathlib import Path
from typing import Iterable

UNK = "<UNK>"


class Vocabulary:
    """Dense token index with ``<UNK>`` reserved at index 0.

    Unknown tokens raise while the vocabulary is open and map to ``<UNK>``
    once it is frozen.
    """

    def __init__(self, tokens: Iterable[str] = (), frozen: bool = False):
        self.tokens: list[str] = [UNK]
        self.index: dict[str, int] = {UNK: 0}
        self.frozen = False
        for tok in tokens:
            self.add(tok)
        self.frozen = frozen

    def add(self, token: str) -> int:
        if self.frozen:
            raise ValueError("vocabulary is frozen")
        if "\n" in token:
            raise ValueError("tokens may not contain newlines")
        if token not in self.index:
            self.index[token] = len(self.tokens)
            self.tokens.append(token)
        return self.index[token]

    def freeze(self) -> Vocabulary:
        self.frozen = True
        return self

    def encode(self, token: str) -> int:
        idx = self.index.get(token)
        if idx is None:
            if self.frozen:
                return 0
            raise KeyError(token)
        return idx

    def decode(self, index: int) -> str:
        return self.tokens[index]

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.tokens == other.tokens

    def to_text(self) -> str:
        return "".join(t + "\n" for t in self.tokens)

    @classmethod
    def from_text(cls, text: str) -> Vocabulary:
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines or lines[0] != UNK:
            raise ValueError(f"vocabulary file must start with {UNK}")
        return cls(lines[1:], frozen=True)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> Vocabulary:
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


def build_vocab(corpus) -> Vocabulary:
    """Frozen vocabulary over every label in the given BlockAsts (sorted for stability)."""
    labels: set[str] = set()
    for block in corpus:
        labels.update(block.root.labels())
    labels.discard(UNK)
    return Vocabulary(sorted(labels), frozen=True)
