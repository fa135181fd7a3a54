"""Tree models acted on by catalog groups: Cayley trees of free groups and
Bass-Serre trees of two-block free products.

Both trees are 0-hyperbolic and all quantities here are exact integers (the
Gromov product can be a half-integer).  Vertices of the Cayley tree are group
elements; vertices of the Bass-Serre tree are cosets ``g * A_i`` of the block
subgroups, stored as (block tag, canonical representative) with the trailing
syllable from the tagged block stripped.

Axes of loxodromic elements are bi-infinite lines with an integer
parametrization; closest-point projections to axes are single vertices and are
computed by exact prefix matching (with an independent bisection fallback used
by the test-suite as an oracle).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .groups import FreeGroup, FreeProduct, FreeWord, GroupError, ProductWord


class TreeError(ValueError):
    """Raised on model mismatches or non-loxodromic axis requests."""


@dataclass(frozen=True)
class TreeVertex:
    """Vertex of a tree model.

    ``block`` is None for Cayley-tree vertices (rep is the group element) and
    a block index for Bass-Serre vertices (rep is the canonical coset
    representative).
    """

    block: Optional[int]
    rep: object

    def __repr__(self) -> str:
        if self.block is None:
            return f"v<{self.rep.to_string()}>"
        return f"v<{self.rep.to_string()}@{self.block}>"


class TreeModel:
    """Shared interface of the two tree kinds; instances are immutable."""

    def __init__(self, entry):
        self.entry = entry

    # subclasses: kind, basepoint, orbit_point, translate, distance,
    # geodesic_vertices, geodesic_edges, axis internals.

    def gromov_product(self, u: TreeVertex, v: TreeVertex, w: TreeVertex) -> float:
        """(u, v)_w = (d(u,w) + d(v,w) - d(u,v)) / 2."""
        return (self.distance(u, w) + self.distance(v, w) - self.distance(u, v)) / 2.0

    def is_loxodromic(self, g) -> bool:
        return self.translation_length(g) > 0

    def axis_of(self, g) -> "Axis":
        u, core = g.cyclic_reduction()
        if not self._core_is_loxodromic(core):
            raise TreeError(f"{g.to_string()} is not loxodromic on this tree")
        return Axis(self, u, core)

    def project_to_axis(self, v: TreeVertex, axis: "Axis") -> TreeVertex:
        return axis.vertex(self.axis_index(v, axis))

    def axis_index(self, v: TreeVertex, axis: "Axis") -> int:
        """Index on the axis of the (unique) closest vertex to v."""
        local = self.translate(axis.shift.inverse(), v)
        return self._anchored_index(local, axis)

    def project_by_search(self, v: TreeVertex, axis: "Axis") -> int:
        """Bisection oracle for axis_index: slope sign of d(v, axis(i))."""
        d0 = self.distance(v, axis.vertex(0))
        lo, hi = -2 * d0 - 1, 2 * d0 + 1

        def slope_up(i: int) -> bool:
            return self.distance(v, axis.vertex(i + 1)) > self.distance(v, axis.vertex(i))

        # first index where the profile starts increasing is the argmin
        while lo < hi:
            mid = (lo + hi) // 2
            if slope_up(mid):
                hi = mid
            else:
                lo = mid + 1
        return lo

    # -- serialization ------------------------------------------------------

    def vertex_to_string(self, v: TreeVertex) -> str:
        if v.block is None:
            return f"g:{v.rep.to_string()}"
        label = self.entry.blocks[v.block].label()
        return f"coset:{v.block}:{label}:{v.rep.to_string()}"

    def vertex_from_string(self, text: str) -> TreeVertex:
        parts = text.split(":")
        if parts[0] == "g" and len(parts) == 2 and self.kind == "cayley":
            return TreeVertex(None, self.entry.from_string(parts[1]))
        if parts[0] == "coset" and len(parts) == 4 and self.kind == "bass_serre":
            block = int(parts[1])
            if not 0 <= block < len(self.entry.blocks):
                raise TreeError(f"bad block index in {text!r}")
            if parts[2] != self.entry.blocks[block].label():
                raise TreeError(f"block label mismatch in {text!r}")
            return self._coset_vertex(block, self.entry.from_string(parts[3]))
        raise TreeError(f"cannot parse vertex string {text!r} for {self.kind} tree")


class CayleyTree(TreeModel):
    """Cayley graph of a free group: a (2k)-regular tree."""

    kind = "cayley"

    def __init__(self, entry: FreeGroup):
        if not isinstance(entry, FreeGroup):
            raise TreeError("CayleyTree requires a free group entry")
        super().__init__(entry)
        self.basepoint = TreeVertex(None, entry.identity())

    def orbit_point(self, g: FreeWord) -> TreeVertex:
        return TreeVertex(None, g)

    def translate(self, g: FreeWord, v: TreeVertex) -> TreeVertex:
        return TreeVertex(None, g * v.rep)

    def distance(self, u: TreeVertex, v: TreeVertex) -> int:
        self._check(u), self._check(v)
        return (u.rep.inverse() * v.rep).length

    def geodesic_vertices(self, u: TreeVertex, v: TreeVertex) -> list[TreeVertex]:
        self._check(u), self._check(v)
        w = u.rep.inverse() * v.rep
        out = [u]
        cur = u.rep
        for letter in w.letters:
            cur = cur * FreeWord(self.entry, (letter,))
            out.append(TreeVertex(None, cur))
        return out

    def translation_length(self, g: FreeWord) -> int:
        _, core = g.cyclic_reduction()
        return core.length

    def _core_is_loxodromic(self, core: FreeWord) -> bool:
        return core.length > 0

    def _check(self, v: TreeVertex) -> None:
        if v.block is not None:
            raise TreeError("vertex from a different tree model")

    # -- axis internals ------------------------------------------------------

    def _axis_vertex(self, core: FreeWord, i: int) -> TreeVertex:
        """Vertex at index i on the axis of a cyclically reduced core."""
        period = core.length
        word = core.letters if i >= 0 else core.inverse().letters
        n = abs(i)
        q, r = divmod(n, period)
        letters = word * q + word[:r]
        return TreeVertex(None, FreeWord(self.entry, tuple(letters)))

    def _anchored_index(self, v: TreeVertex, axis: "Axis") -> int:
        """Index of the projection of v onto the anchored (shift-free) axis.

        The axis passes the identity vertex, so the projection is the longest
        prefix of v's word tracking either periodic direction.
        """
        word = v.rep.letters
        fwd = _letter_lcp(word, axis._fwd_letters)
        if fwd:
            return fwd
        return -_letter_lcp(word, axis._bwd_letters)


def _letter_lcp(word, pattern) -> int:
    """Length of the common prefix of a word with a periodic letter pattern."""
    period = len(pattern)
    n = 0
    for v in word:
        if v != pattern[n % period]:
            break
        n += 1
    return n


class BassSerreTree(TreeModel):
    """Bass-Serre tree of a two-block free product with trivial edge groups.

    Vertices are cosets ``g * A_i``; every group element g is an edge joining
    ``g * A_0`` and ``g * A_1``.  The tree is bipartite and not locally
    finite (vertex stabilizers are the infinite block subgroups), so distances
    are computed combinatorially from syllable normal forms instead of by
    neighbor traversal.
    """

    kind = "bass_serre"

    def __init__(self, entry: FreeProduct):
        if not isinstance(entry, FreeProduct):
            raise TreeError("BassSerreTree requires a free product entry")
        if len(entry.blocks) != 2:
            raise TreeError(
                "Bass-Serre tree models are implemented for exactly two blocks; "
                f"{entry.name} has {len(entry.blocks)}"
            )
        super().__init__(entry)
        self.basepoint = self._coset_vertex(0, entry.identity())

    def _coset_vertex(self, block: int, g: ProductWord) -> TreeVertex:
        syl = g.syllables
        if syl and syl[-1][0] == block:
            g = ProductWord(self.entry, syl[:-1])
        return TreeVertex(block, g)

    def orbit_point(self, g: ProductWord) -> TreeVertex:
        return self._coset_vertex(0, g)

    def translate(self, g: ProductWord, v: TreeVertex) -> TreeVertex:
        return self._coset_vertex(v.block, g * v.rep)

    def _stripped(self, u: TreeVertex, v: TreeVertex) -> tuple:
        """Syllables of rep(u)^-1 rep(v) with block-i / block-j ends absorbed."""
        w = u.rep.inverse() * v.rep
        syl = list(w.syllables)
        if syl and syl[0][0] == u.block:
            syl.pop(0)
        if syl and syl[-1][0] == v.block:
            syl.pop()
        return tuple(syl)

    def distance(self, u: TreeVertex, v: TreeVertex) -> int:
        self._check(u), self._check(v)
        syl = self._stripped(u, v)
        if not syl:
            return 0 if u.block == v.block else 1
        return len(syl) + 1

    def geodesic_vertices(self, u: TreeVertex, v: TreeVertex) -> list[TreeVertex]:
        self._check(u), self._check(v)
        w = u.rep.inverse() * v.rep
        syl = list(w.syllables)
        alpha = self.entry.identity()
        if syl and syl[0][0] == u.block:
            bi, val = syl.pop(0)
            alpha = ProductWord(self.entry, ((bi, val),))
        if syl and syl[-1][0] == v.block:
            syl.pop()
        base = u.rep * alpha
        if not syl:
            if u.block == v.block:
                return [u]
            return [u, self._coset_vertex(v.block, base)]
        out = [u]
        cur = base
        for bi, val in syl:
            out.append(self._coset_vertex(bi, cur))
            cur = cur * ProductWord(self.entry, ((bi, val),))
        out.append(self._coset_vertex(1 - syl[-1][0], cur))
        return out

    def geodesic_edges(self, u: TreeVertex, v: TreeVertex) -> list[ProductWord]:
        """Edge elements along the geodesic (edges of the tree are elements)."""
        self._check(u), self._check(v)
        w = u.rep.inverse() * v.rep
        syl = list(w.syllables)
        alpha = self.entry.identity()
        if syl and syl[0][0] == u.block:
            bi, val = syl.pop(0)
            alpha = ProductWord(self.entry, ((bi, val),))
        if syl and syl[-1][0] == v.block:
            syl.pop()
        base = u.rep * alpha
        if not syl:
            return [] if u.block == v.block else [base]
        edges = [base]
        cur = base
        for bi, val in syl:
            cur = cur * ProductWord(self.entry, ((bi, val),))
            edges.append(cur)
        return edges

    def geodesic_increments(self, u: TreeVertex, v: TreeVertex):
        """(first edge element, stripped syllable tuple) along the geodesic.

        Consecutive geodesic edge elements differ by exactly one syllable of
        the stripped normal form, so the increment sequence is returned raw
        for cheap pattern scans; ``edges[k] == first * prefix_k``.
        """
        self._check(u), self._check(v)
        w = u.rep.inverse() * v.rep
        syl = list(w.syllables)
        alpha = self.entry.identity()
        if syl and syl[0][0] == u.block:
            bi, val = syl.pop(0)
            alpha = ProductWord(self.entry, ((bi, val),))
        if syl and syl[-1][0] == v.block:
            syl.pop()
        return u.rep * alpha, tuple(syl)

    def translation_length(self, g: ProductWord) -> int:
        _, core = g.cyclic_reduction()
        return core.syllable_count if self._core_is_loxodromic(core) else 0

    def _core_is_loxodromic(self, core: ProductWord) -> bool:
        return core.syllable_count >= 2

    def _check(self, v: TreeVertex) -> None:
        if v.block is None:
            raise TreeError("vertex from a different tree model")

    # -- axis internals ------------------------------------------------------

    def _axis_vertex(self, core: ProductWord, i: int) -> TreeVertex:
        """Vertex at index i: prefixes of core^inf, one vertex per syllable.

        V(i) carries the block of the next syllable to be crossed.  Cyclic
        reduction makes the concatenations below alternate already, so the
        syllable tuples are assembled flat with no cancellation.
        """
        period = core.syllable_count
        q, r = divmod(i, period)
        if q >= 0:
            syls = core.syllables * q + core.syllables[:r]
        else:
            inv = core.inverse().syllables
            blocks = self.entry.blocks
            suffix_inv = tuple(
                (bi, blocks[bi].invert(val)) for bi, val in reversed(core.syllables[r:])
            )
            syls = inv * (-q - 1) + suffix_inv
        prefix = ProductWord(self.entry, syls)
        return self._coset_vertex(core.syllables[r][0], prefix)

    def _anchored_index(self, v: TreeVertex, axis: "Axis") -> int:
        core: ProductWord = axis.core
        fwd = core.syllables
        bwd = core.inverse().syllables
        syl = v.rep.syllables
        if not syl:
            # the vertex is 1 * A_tag: V(0) on the forward side, else V(-1)
            return 0 if v.block == fwd[0][0] else -1
        if syl[0][0] == fwd[0][0]:
            return _syllable_lcp(syl, fwd)
        return -(_syllable_lcp(syl, bwd) + 1)


def _syllable_lcp(syl, pattern) -> int:
    period = len(pattern)
    n = 0
    for s in syl:
        if s != pattern[n % period]:
            break
        n += 1
    return n


class Axis:
    """Bi-infinite invariant line of a loxodromic element.

    ``shift * core * shift^-1`` is the (root of the) translating element; the
    anchored axis of the cyclically reduced core passes the basepoint-side
    entry vertex at index 0, and ``vertex(i + period) == germ * vertex(i)``.
    """

    __slots__ = ("model", "shift", "core", "period", "_fwd_letters", "_bwd_letters")

    def __init__(self, model: TreeModel, shift, core):
        self.model = model
        self.shift = shift
        self.core = core
        if isinstance(core, FreeWord):
            self.period = core.length
            self._fwd_letters = core.letters
            self._bwd_letters = core.inverse().letters
        else:
            self.period = core.syllable_count
            self._fwd_letters = None
            self._bwd_letters = None

    @property
    def germ(self):
        return self.shift * self.core * self.shift.inverse()

    def vertex(self, i: int) -> TreeVertex:
        local = self.model._axis_vertex(self.core, i)
        return self.model.translate(self.shift, local)

    def translated(self, g) -> "Axis":
        return Axis(self.model, g * self.shift, self.core)

    def __repr__(self) -> str:
        return f"Axis({self.germ.to_string()})"


def cayley_tree(entry: FreeGroup) -> CayleyTree:
    return CayleyTree(entry)


def bass_serre_tree(entry: FreeProduct) -> BassSerreTree:
    return BassSerreTree(entry)


def tree_for(entry) -> TreeModel:
    """The canonical hyperbolic space acted on by a catalog entry."""
    if isinstance(entry, FreeGroup):
        return CayleyTree(entry)
    return BassSerreTree(entry)
