"""Base-p digit words and ultimately periodic subsets of the naturals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class DigitWord:
    """A word over d-tuples of base-p digits, most-significant column first."""

    base: int
    dim: int
    columns: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if self.dim < 0:
            raise ValueError(f"dim must be >= 0, got {self.dim}")
        for col in self.columns:
            if len(col) != self.dim:
                raise ValueError(f"column {col} does not have dimension {self.dim}")
            for digit in col:
                if not 0 <= digit < self.base:
                    raise ValueError(f"digit {digit} out of range for base {self.base}")

    @classmethod
    def from_str(cls, text: str, base: int = 2) -> "DigitWord":
        """Parse a one-track word such as ``"0110"`` (bases up to 10)."""
        return cls(base, 1, tuple((int(ch),) for ch in text))

    @classmethod
    def from_letters(cls, letters: Iterable[int], base: int, dim: int) -> "DigitWord":
        return cls(base, dim, tuple(letter_digits(a, base, dim) for a in letters))

    def __len__(self):
        return len(self.columns)

    def letters(self) -> list[int]:
        return [digits_letter(col, self.base) for col in self.columns]

    def track(self, i: int) -> "DigitWord":
        return DigitWord(self.base, 1, tuple((col[i],) for col in self.columns))

    def __add__(self, other: "DigitWord") -> "DigitWord":
        if (self.base, self.dim) != (other.base, other.dim):
            raise ValueError("cannot concatenate words over different alphabets")
        return DigitWord(self.base, self.dim, self.columns + other.columns)

    def __str__(self):
        if self.dim == 1 and self.base <= 10:
            return "".join(str(c[0]) for c in self.columns) or "ε"
        return "".join("(" + ",".join(map(str, c)) + ")" for c in self.columns) or "ε"


def letter_digits(letter: int, base: int, dim: int) -> tuple[int, ...]:
    """Inverse of :func:`digits_letter`; track 0 is the most significant position."""
    out = [0] * dim
    for i in range(dim - 1, -1, -1):
        letter, out[i] = divmod(letter, base)
    return tuple(out)


def digits_letter(digits: Sequence[int], base: int) -> int:
    # lexicographic order on digit tuples coincides with integer order on letters
    letter = 0
    for d in digits:
        letter = letter * base + d
    return letter


def decode(w: DigitWord) -> tuple[int, ...]:
    values = [0] * w.dim
    for col in w.columns:
        for i, d in enumerate(col):
            values[i] = values[i] * w.base + d
    return tuple(values)


def digit_length(n: int, base: int) -> int:
    """Number of base-p digits of n; zero has length 0."""
    length = 0
    while n:
        n //= base
        length += 1
    return length


def encode(v: Sequence[int], base: int, min_len: int = 0) -> DigitWord:
    if base < 2:
        raise ValueError(f"base must be >= 2, got {base}")
    if any(x < 0 for x in v):
        raise ValueError("only naturals can be encoded")
    length = max([min_len] + [digit_length(x, base) for x in v])
    tracks = []
    for x in v:
        digits = [0] * length
        for i in range(length - 1, -1, -1):
            x, digits[i] = divmod(x, base)
        tracks.append(digits)
    return DigitWord(base, len(v), tuple(zip(*tracks)) if v else ((),) * length)


@dataclass(frozen=True)
class UPSet:
    """Ultimately periodic set B ∪ {t + r + ℓ·i : r ∈ R, i ≥ 0}."""

    threshold: int
    period: int
    base_part: frozenset[int] = frozenset()
    residues: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.threshold < 0 or self.period < 1:
            raise ValueError("need threshold >= 0 and period >= 1")
        object.__setattr__(self, "base_part", frozenset(self.base_part))
        object.__setattr__(self, "residues", frozenset(self.residues))
        if any(not 0 <= b < self.threshold for b in self.base_part):
            raise ValueError(f"B must lie in [0, {self.threshold})")
        if any(not 0 <= r < self.period for r in self.residues):
            raise ValueError(f"R must lie in [0, {self.period})")

    def __contains__(self, n: int) -> bool:
        return upset_member(self, n)

    @property
    def is_empty(self) -> bool:
        return not self.base_part and not self.residues

    @property
    def is_finite(self) -> bool:
        return not self.residues

    def elements(self, upto: int) -> list[int]:
        return [n for n in range(upto + 1) if upset_member(self, n)]

    @classmethod
    def finite(cls, values: Iterable[int]) -> "UPSet":
        values = frozenset(values)
        t = max(values) + 1 if values else 0
        return upset_normalize(cls(t, 1, values, frozenset()))

    @classmethod
    def progression(cls, start: int, step: int) -> "UPSet":
        """The set {start + step·i : i ≥ 0}."""
        return upset_normalize(cls(start, step, frozenset(), frozenset({0})))

    def __str__(self):
        b = "{" + ",".join(map(str, sorted(self.base_part))) + "}"
        r = "{" + ",".join(map(str, sorted(self.residues))) + "}"
        return f"({self.threshold},{self.period},{b},{r})"


def upset_member(U: UPSet, n: int) -> bool:
    if n in U.base_part:
        return True
    return n >= U.threshold and (n - U.threshold) % U.period in U.residues


def upset_normalize(U: UPSet) -> UPSet:
    t, ell = U.threshold, U.period
    B, R = set(U.base_part), set(U.residues)
    for d in range(1, ell + 1):
        if ell % d == 0 and all((r in R) == (r % d in R) for r in range(ell)):
            R = {r for r in R if r < d}
            ell = d
            break
    # pull the threshold down while the element just below it follows the period
    while t > 0 and ((t - 1) in B) == ((ell - 1) in R):
        t -= 1
        B.discard(t)
        R = {(r + 1) % ell for r in R}
    return UPSet(t, ell, frozenset(B), frozenset(R))
