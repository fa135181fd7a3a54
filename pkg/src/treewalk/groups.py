"""Exact arithmetic and word metrics for the supported group catalog.

Two families are supported:

* free groups ``F_k`` (``k >= 2``), elements stored as reduced words over
  signed letters, and
* free products of abelian blocks (``Z^r`` or ``Z/m``), elements stored in
  alternating syllable normal form.

Normal forms are unique, so element equality is structural equality.  All
values are immutable and every operation is pure; everything here is safe to
share across threads.

Catalog entries are named by strings such as ``"free:2"``,
``"freeproduct:Z2,Z"`` or ``"freeproduct:Z/3,Z/4"`` (see :func:`parse_entry`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class GroupError(ValueError):
    """Raised on malformed words, unknown letters, or mismatched entries."""


_FREE_NAMES = "abcdefghijklm"
_VECTOR_NAMES = "xyzwuv"  # blocks Z^r with r >= 2
_SINGLE_NAMES = "tsrqpo"  # blocks Z and Z/m

_WORD_TOKEN = re.compile(r"([A-Za-z])(?:\^?(-?\d+))?")


# ---------------------------------------------------------------------------
# blocks of a free product


@dataclass(frozen=True)
class Block:
    """One abelian free factor: ``Z^rank`` (modulus 0) or ``Z/modulus``."""

    rank: int
    modulus: int
    names: tuple[str, ...]

    @property
    def is_cyclic(self) -> bool:
        return self.modulus > 0

    def label(self) -> str:
        if self.is_cyclic:
            return f"Z/{self.modulus}"
        return "Z" if self.rank == 1 else f"Z{self.rank}"

    def normalize(self, value):
        """Reduce a raw exponent vector / residue; return None if trivial."""
        if self.is_cyclic:
            v = value % self.modulus
            return v if v else None
        if isinstance(value, int):
            value = (value,)
        vec = tuple(int(c) for c in value)
        if len(vec) != self.rank:
            raise GroupError(f"expected {self.rank} exponents, got {vec}")
        return vec if any(vec) else None

    def invert(self, value):
        if self.is_cyclic:
            return (-value) % self.modulus
        return tuple(-c for c in value)

    def combine(self, a, b):
        if self.is_cyclic:
            return self.normalize(a + b)
        return self.normalize(tuple(x + y for x, y in zip(a, b)))

    def syllable_length(self, value) -> int:
        if self.is_cyclic:
            return min(value, self.modulus - value)
        return sum(abs(c) for c in value)

    def spell(self, value) -> list[str]:
        """Geodesic letters for one syllable, in the fixed generator order.

        Within ``Z^r`` the coordinates are emitted in name order; within
        ``Z/m`` the shorter direction wins and ties at ``m/2`` use positive
        powers.
        """
        letters: list[str] = []
        if self.is_cyclic:
            name = self.names[0]
            if value <= self.modulus - value:
                letters.extend([name] * value)
            else:
                letters.extend([name.upper()] * (self.modulus - value))
            return letters
        for name, c in zip(self.names, value):
            letters.extend([name if c > 0 else name.upper()] * abs(c))
        return letters

    def syllable_str(self, value) -> str:
        if self.is_cyclic:
            return f"{self.names[0]}{value}"
        return "".join(f"{n}{c}" for n, c in zip(self.names, value))


# ---------------------------------------------------------------------------
# free groups


class FreeGroup:
    """Free group of rank ``k`` with letters a, b, c, ... (uppercase inverts)."""

    kind = "free"

    def __init__(self, rank: int):
        if not 2 <= rank <= len(_FREE_NAMES):
            raise GroupError(f"free group rank must be in [2, {len(_FREE_NAMES)}]")
        self.rank = rank
        self.names = tuple(_FREE_NAMES[:rank])
        self.generator_names = tuple(
            n for name in self.names for n in (name, name.upper())
        )

        self.name = f"free:{self.rank}"

    def __repr__(self) -> str:
        return f"FreeGroup({self.rank})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FreeGroup) and other.rank == self.rank

    def __hash__(self) -> int:
        return hash(("free", self.rank))

    def identity(self) -> "FreeWord":
        return FreeWord(self, ())

    def generator(self, i: int) -> "FreeWord":
        return FreeWord(self, (i + 1,))

    def generators(self) -> list["FreeWord"]:
        return [self.generator(i) for i in range(self.rank)]

    def letter_of_name(self, name: str) -> int:
        low = name.lower()
        if low not in self.names:
            raise GroupError(f"unknown letter {name!r} in {self.name}")
        i = self.names.index(low) + 1
        return -i if name.isupper() else i

    def name_of_letter(self, letter: int) -> str:
        name = self.names[abs(letter) - 1]
        return name.upper() if letter < 0 else name

    def reduce(self, letters: Iterable) -> "FreeWord":
        """Fold a raw letter sequence (names or signed ints) to normal form."""
        stack: list[int] = []
        for item in letters:
            v = self.letter_of_name(item) if isinstance(item, str) else int(item)
            if not 1 <= abs(v) <= self.rank:
                raise GroupError(f"letter {item!r} outside {self.name}")
            if stack and stack[-1] == -v:
                stack.pop()
            else:
                stack.append(v)
        return FreeWord(self, tuple(stack))

    def from_string(self, text: str) -> "FreeWord":
        return self.reduce(_parse_letter_string(text, self.letter_of_name))

    def ball(self, radius: int, cap: int = 12) -> list["FreeWord"]:
        """All elements with word length <= radius, each exactly once."""
        if radius > cap:
            raise GroupError(f"radius {radius} over cap {cap}")
        out = [self.identity()]
        sphere: list[tuple[int, ...]] = [()]
        for _ in range(radius):
            nxt = []
            for word in sphere:
                last = word[-1] if word else 0
                for i in range(1, self.rank + 1):
                    for v in (i, -i):
                        if v != -last:
                            nxt.append(word + (v,))
            sphere = nxt
            out.extend(FreeWord(self, w) for w in sphere)
        return out

    def geodesic_word(self, x: "FreeWord", y: "FreeWord") -> list[str]:
        """Letters spelling a word-metric geodesic from x to y."""
        self._check(x), self._check(y)
        w = x.inverse() * y
        return [self.name_of_letter(v) for v in w.letters]

    def _check(self, el: "FreeWord") -> None:
        if el.entry != self:
            raise GroupError("element from a different catalog entry")


class FreeWord:
    """Reduced word in a free group; immutable and hashable."""

    __slots__ = ("entry", "letters", "_hash")

    def __init__(self, entry: FreeGroup, letters: tuple[int, ...]):
        self.entry = entry
        self.letters = letters
        self._hash = hash((entry.rank, letters))

    # -- group law ---------------------------------------------------------
    def __mul__(self, other: "FreeWord") -> "FreeWord":
        if self.entry != other.entry:
            raise GroupError("mismatched catalog entries")
        a = list(self.letters)
        for v in other.letters:
            if a and a[-1] == -v:
                a.pop()
            else:
                a.append(v)
        return FreeWord(self.entry, tuple(a))

    def inverse(self) -> "FreeWord":
        return FreeWord(self.entry, tuple(-v for v in reversed(self.letters)))

    def __pow__(self, n: int) -> "FreeWord":
        if n < 0:
            return self.inverse() ** (-n)
        out = self.entry.identity()
        for _ in range(n):
            out = out * self
        return out

    # -- metric ------------------------------------------------------------
    @property
    def length(self) -> int:
        return len(self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def cyclic_reduction(self) -> tuple["FreeWord", "FreeWord"]:
        """Return (u, c) with self == u * c * u^-1 and c cyclically reduced."""
        w = self.letters
        i, j = 0, len(w) - 1
        while i < j and w[i] == -w[j]:
            i += 1
            j -= 1
        u = FreeWord(self.entry, w[:i])
        core = FreeWord(self.entry, w[i : j + 1])
        return u, core

    # -- plumbing ----------------------------------------------------------
    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreeWord)
            and other.entry == self.entry
            and other.letters == self.letters
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"<{self.to_string()}>"

    def to_string(self) -> str:
        if not self.letters:
            return "1"
        parts = []
        for letter, run in _runs(self.letters):
            name = self.entry.name_of_letter(letter)
            parts.append(name if run == 1 else f"{name}{run}")
        return "".join(parts)

    def sort_key(self) -> tuple:
        """Deterministic total order: length first, then letter sequence."""
        return (len(self.letters), tuple(_letter_rank(v) for v in self.letters))


def _letter_rank(v: int) -> int:
    return 2 * (abs(v) - 1) + (0 if v > 0 else 1)


def _runs(seq: Sequence[int]) -> Iterator[tuple[int, int]]:
    run = 0
    prev = None
    for v in seq:
        if v == prev:
            run += 1
        else:
            if prev is not None:
                yield prev, run
            prev, run = v, 1
    if prev is not None:
        yield prev, run


# ---------------------------------------------------------------------------
# free products of abelian blocks


class FreeProduct:
    """Free product of abelian blocks, elements in syllable normal form."""

    kind = "freeproduct"

    def __init__(self, blocks: Sequence[Block]):
        if len(blocks) < 2:
            raise GroupError("a free product needs at least two blocks")
        if len(blocks) == 2 and all(b.modulus == 2 for b in blocks):
            raise GroupError("Z/2 * Z/2 is virtually cyclic and not supported")
        self.blocks = tuple(blocks)
        self._letters: dict[str, tuple[int, object]] = {}
        gen_names = []
        for bi, block in enumerate(self.blocks):
            for ci, name in enumerate(block.names):
                if block.is_cyclic:
                    plus, minus = 1, block.modulus - 1
                else:
                    unit = tuple(1 if k == ci else 0 for k in range(block.rank))
                    plus, minus = unit, tuple(-c for c in unit)
                self._letters[name] = (bi, plus)
                self._letters[name.upper()] = (bi, minus)
                gen_names.extend((name, name.upper()))
        self.generator_names = tuple(gen_names)
        self.name = "freeproduct:" + ",".join(b.label() for b in self.blocks)

    def __repr__(self) -> str:
        return f"FreeProduct({'*'.join(b.label() for b in self.blocks)})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FreeProduct) and other.blocks == self.blocks

    def __hash__(self) -> int:
        return hash(("freeproduct", self.blocks))

    def identity(self) -> "ProductWord":
        return ProductWord(self, ())

    def generators(self) -> list["ProductWord"]:
        out = []
        for name in self.generator_names:
            if name.islower():
                bi, val = self._letters[name]
                out.append(ProductWord(self, ((bi, val),)))
        return out

    def reduce(self, letters: Iterable[str]) -> "ProductWord":
        """Fold a letter-name sequence to syllable normal form."""
        syl: list[tuple[int, object]] = []
        for name in letters:
            if name not in self._letters:
                raise GroupError(f"unknown letter {name!r} in {self.name}")
            bi, val = self._letters[name]
            self._push(syl, bi, val)
        return ProductWord(self, tuple(syl))

    def _push(self, syl: list, bi: int, val) -> None:
        block = self.blocks[bi]
        if syl and syl[-1][0] == bi:
            merged = block.combine(syl[-1][1], val)
            syl.pop()
            if merged is not None:
                syl.append((bi, merged))
        else:
            norm = block.normalize(val)
            if norm is not None:
                syl.append((bi, norm))

    def from_string(self, text: str) -> "ProductWord":
        return self.reduce(_parse_letter_string(text, lambda n: self._name_check(n)))

    def _name_check(self, name: str) -> str:
        if name not in self._letters:
            raise GroupError(f"unknown letter {name!r} in {self.name}")
        return name

    def from_syllables(self, syllables: Iterable[tuple[int, object]]) -> "ProductWord":
        syl: list[tuple[int, object]] = []
        for bi, val in syllables:
            if not 0 <= bi < len(self.blocks):
                raise GroupError(f"block index {bi} out of range")
            norm = self.blocks[bi].normalize(val)
            if norm is None:
                continue
            self._push(syl, bi, norm)
        return ProductWord(self, tuple(syl))

    def ball(self, radius: int, cap: int = 9) -> list["ProductWord"]:
        if radius > cap:
            raise GroupError(f"radius {radius} over cap {cap}")
        gens = []
        for name in self.generator_names:
            bi, val = self._letters[name]
            gens.append((bi, val))
        seen = {self.identity(): 0}
        frontier = [self.identity()]
        for r in range(1, radius + 1):
            nxt = []
            for el in frontier:
                for bi, val in gens:
                    cand = el._append(bi, val)
                    if cand not in seen and cand.length == r:
                        seen[cand] = r
                        nxt.append(cand)
            frontier = nxt
        return list(seen)

    def geodesic_word(self, x: "ProductWord", y: "ProductWord") -> list[str]:
        self._check(x), self._check(y)
        w = x.inverse() * y
        letters: list[str] = []
        for bi, val in w.syllables:
            letters.extend(self.blocks[bi].spell(val))
        return letters

    def _check(self, el: "ProductWord") -> None:
        if el.entry != self:
            raise GroupError("element from a different catalog entry")


class ProductWord:
    """Alternating syllable word in a free product; immutable and hashable."""

    __slots__ = ("entry", "syllables", "_hash", "_len")

    def __init__(self, entry: FreeProduct, syllables: tuple):
        self.entry = entry
        self.syllables = syllables
        self._hash = hash((entry.name, syllables))
        self._len = -1

    def __mul__(self, other: "ProductWord") -> "ProductWord":
        if self.entry != other.entry:
            raise GroupError("mismatched catalog entries")
        syl = list(self.syllables)
        for bi, val in other.syllables:
            self.entry._push(syl, bi, val)
        return ProductWord(self.entry, tuple(syl))

    def _append(self, bi: int, val) -> "ProductWord":
        syl = list(self.syllables)
        self.entry._push(syl, bi, val)
        return ProductWord(self.entry, tuple(syl))

    def inverse(self) -> "ProductWord":
        out = tuple(
            (bi, self.entry.blocks[bi].invert(val))
            for bi, val in reversed(self.syllables)
        )
        return ProductWord(self.entry, out)

    def __pow__(self, n: int) -> "ProductWord":
        if n < 0:
            return self.inverse() ** (-n)
        out = self.entry.identity()
        for _ in range(n):
            out = out * self
        return out

    @property
    def length(self) -> int:
        if self._len < 0:
            self._len = sum(
                self.entry.blocks[bi].syllable_length(val)
                for bi, val in self.syllables
            )
        return self._len

    @property
    def syllable_count(self) -> int:
        return len(self.syllables)

    def is_identity(self) -> bool:
        return not self.syllables

    def cyclic_reduction(self) -> tuple["ProductWord", "ProductWord"]:
        """Return (u, c) with self == u * c * u^-1, c cyclically reduced.

        A syllable word is cyclically reduced when its first and last
        syllables lie in different blocks (or it has at most one syllable).
        """
        u = self.entry.identity()
        core = self
        while core.syllable_count >= 2 and core.syllables[0][0] == core.syllables[-1][0]:
            bi, val = core.syllables[0]
            head = ProductWord(self.entry, ((bi, val),))
            u = u * head
            core = head.inverse() * core * head
        return u, core

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ProductWord)
            and other.entry == self.entry
            and other.syllables == self.syllables
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"<{self.to_string()}>"

    def to_string(self) -> str:
        if not self.syllables:
            return "1"
        return "|".join(
            self.entry.blocks[bi].syllable_str(val) for bi, val in self.syllables
        )

    def sort_key(self) -> tuple:
        key = []
        for bi, val in self.syllables:
            block = self.entry.blocks[bi]
            if block.is_cyclic:
                key.append((bi, (val,)))
            else:
                key.append((bi, tuple(val)))
        return (self.length, tuple(key))


# ---------------------------------------------------------------------------
# parsing


def _parse_letter_string(text: str, check) -> list[str]:
    """Expand strings like ``a5b5a5`` or ``x2y-1|t3`` into letter-name lists.

    ``|`` is a cosmetic syllable separator and is ignored.
    """
    text = text.strip().replace("|", "")
    if text in ("", "1"):
        return []
    letters: list[str] = []
    pos = 0
    for m in _WORD_TOKEN.finditer(text):
        if m.start() != pos:
            raise GroupError(f"cannot parse element string {text!r}")
        pos = m.end()
        name = m.group(1)
        check(name)
        exp = int(m.group(2)) if m.group(2) is not None else 1
        if exp < 0:
            name = name.swapcase()
            exp = -exp
        letters.extend([name] * exp)
    if pos != len(text):
        raise GroupError(f"cannot parse element string {text!r}")
    return letters


def random_element(entry, rng, max_length: int):
    """Random normal-form element of length <= max_length (deterministic in rng).

    Free groups get a uniform non-backtracking word of uniform random length;
    free products reduce a uniform letter string, so the resulting length may
    fall slightly short of the draw.  This is a sampling convenience, not a
    uniform measure on balls.
    """
    n = int(rng.integers(0, max_length + 1))
    if isinstance(entry, FreeGroup):
        letters = []
        last = 0
        for _ in range(n):
            choices = [
                v for i in range(1, entry.rank + 1) for v in (i, -i) if v != -last
            ]
            v = choices[int(rng.integers(0, len(choices)))]
            letters.append(v)
            last = v
        return FreeWord(entry, tuple(letters))
    names = entry.generator_names
    return entry.reduce(names[int(rng.integers(0, len(names)))] for _ in range(n))


_BLOCK_TOKEN = re.compile(r"^Z(?:(\d+)|/(\d+))?$")


def parse_entry(name: str):
    """Parse a catalog entry name: ``free:K`` or ``freeproduct:B1,B2,...``.

    Block tokens: ``Z`` (infinite cyclic), ``Z<r>`` (free abelian of rank r),
    ``Z/<m>`` (finite cyclic).  Generator names are assigned deterministically:
    rank >= 2 blocks draw x, y, z, ...; single-generator blocks draw t, s, ...
    so e.g. ``freeproduct:Z2,Z`` has generators x, y and t.
    """
    name = name.strip()
    if name.startswith("free:"):
        try:
            rank = int(name.split(":", 1)[1])
        except ValueError as exc:
            raise GroupError(f"bad free group spec {name!r}") from exc
        return FreeGroup(rank)
    if name.startswith("freeproduct:"):
        tokens = [t.strip() for t in name.split(":", 1)[1].split(",") if t.strip()]
        blocks: list[Block] = []
        vec_pos = 0
        single_pos = 0
        for tok in tokens:
            m = _BLOCK_TOKEN.match(tok)
            if not m:
                raise GroupError(f"bad block token {tok!r} in {name!r}")
            if m.group(2) is not None:
                modulus = int(m.group(2))
                if modulus < 2:
                    raise GroupError(f"cyclic modulus must be >= 2 in {tok!r}")
                blocks.append(Block(1, modulus, (_SINGLE_NAMES[single_pos],)))
                single_pos += 1
            else:
                rank = int(m.group(1)) if m.group(1) is not None else 1
                if rank < 1:
                    raise GroupError(f"block rank must be >= 1 in {tok!r}")
                if rank == 1:
                    blocks.append(Block(1, 0, (_SINGLE_NAMES[single_pos],)))
                    single_pos += 1
                else:
                    names = tuple(_VECTOR_NAMES[vec_pos : vec_pos + rank])
                    if len(names) < rank:
                        raise GroupError("generator name pool exhausted")
                    vec_pos += rank
                    blocks.append(Block(rank, 0, names))
        return FreeProduct(blocks)
    raise GroupError(f"unknown catalog entry {name!r}")
