"""Coset projection calculus on tree models.

Given a loxodromic germ ``g`` with primitive root ``g0``, the cosets
``h <g0>`` carry translated axes.  This module computes closest-point
projections to those axes, projection distances, the threshold-T family of
cosets separating two elements (with its geodesic order), distance-formula
sums, and randomized checkers for the strong Behrstock inequality and its
consequences.

Projections of points are single vertices (unique in a tree); projections of
a whole coset onto another coset's axis form an index interval, which for the
validated free-group germs always has diameter zero.  The Behrstock constant
is configurable because distinct-coset axes in Bass-Serre trees may share an
edge, making the sharp constant 1 rather than 0 for some germs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import FreeGroup, FreeProduct, random_element
from .trees import Axis, TreeModel, TreeVertex


class ProjectionError(ValueError):
    """Raised on invalid systems or non-loxodromic germs."""


def root_of(model: TreeModel, g):
    """The primitive root g0 with g == g0^k, k >= 1 maximal."""
    u, core = g.cyclic_reduction()
    if not model._core_is_loxodromic(core):
        raise ProjectionError(f"{g.to_string()} is not loxodromic; no root")
    if isinstance(model.entry, FreeGroup):
        seq = core.letters
    else:
        seq = core.syllables
    n = len(seq)
    for d in range(1, n + 1):
        if n % d:
            continue
        if seq == seq[:d] * (n // d):
            prim = seq[:d]
            break
    if isinstance(model.entry, FreeGroup):
        from .groups import FreeWord

        c0 = FreeWord(model.entry, tuple(prim))
    else:
        from .groups import ProductWord

        c0 = ProductWord(model.entry, tuple(prim))
    if not model._core_is_loxodromic(c0):
        # a primitive sub-period of a loxodromic core can fail the two-syllable
        # requirement only in degenerate cases ruled out by alternation
        raise ProjectionError("primitive root is not loxodromic")
    return u * c0 * u.inverse()


@dataclass(frozen=True, eq=False)
class CosetMarking:
    """A coset h<g0> with its canonical representative and translated axis."""

    rep: object
    axis: Axis

    def __eq__(self, other) -> bool:
        return isinstance(other, CosetMarking) and other.rep == self.rep

    def __hash__(self) -> int:
        return hash(self.rep)

    def __repr__(self) -> str:
        return f"coset<{self.rep.to_string()}>"


@dataclass(frozen=True)
class ProjectionChain:
    """Cosets with projection distance >= threshold, ordered along [o, p]."""

    o: object
    p: object
    threshold: int
    markings: tuple
    distances: tuple

    def __len__(self) -> int:
        return len(self.markings)

    def to_json_dict(self) -> dict:
        return {
            "o": self.o.to_string(),
            "p": self.p.to_string(),
            "threshold": self.threshold,
            "cosets": [
                {"index": i, "rep": m.rep.to_string(), "distance": d}
                for i, (m, d) in enumerate(zip(self.markings, self.distances))
            ],
        }


class ProjectionSystem:
    """Projection data for one loxodromic germ on one tree model."""

    def __init__(self, model: TreeModel, germ, behrstock_constant: int = 0,
                 threshold: int = 10):
        if behrstock_constant < 0:
            raise ProjectionError("behrstock constant must be >= 0")
        if threshold < max(3, 10 * behrstock_constant):
            raise ProjectionError(
                "threshold must be >= 3 and >= 10 * behrstock constant"
            )
        self.model = model
        self.germ = germ
        self.behrstock_constant = behrstock_constant
        self.threshold = threshold
        self.root = root_of(model, germ)
        power = self._power_of_root(germ)
        if power < 1:
            raise ProjectionError("germ is not a positive power of its root")
        self.root_power = power
        self.axis0 = model.axis_of(self.root)
        self.period = self.axis0.period
        self._shift_len = self.axis0.shift.length
        self._canon_lookahead = 2 * self._shift_len + 2
        # precomputed anchored axis edge data used by candidate recovery
        self._anchor_elements = [
            self._anchored_element(j) for j in range(self.period)
        ]
        self._anchor_inverses = [
            (self.axis0.shift * a).inverse() for a in self._anchor_elements
        ]
        self.axis_inverter_possible = self._axis_inverter_check()

    # -- construction helpers ------------------------------------------------

    def _power_of_root(self, g) -> int:
        cur = self.model.entry.identity()
        for k in range(1, 4096):
            cur = cur * self.root
            if cur == g:
                return k
        return 0

    def _anchored_element(self, j: int):
        """Group element of the anchored axis vertex (Cayley) or edge (BS)."""
        core = self.axis0.core
        if isinstance(self.model.entry, FreeGroup):
            from .groups import FreeWord

            return FreeWord(self.model.entry, core.letters[:j])
        from .groups import ProductWord

        return ProductWord(self.model.entry, core.syllables[:j])

    def _axis_inverter_check(self):
        """For free groups: is the root conjugate to its inverse?

        Conjugacy of cyclically reduced words is cyclic rotation; free groups
        are biorderable so this never fires, but the check documents the
        assumption that no element swaps the axis ends.  Returns None when the
        check does not apply (free products).
        """
        if not isinstance(self.model.entry, FreeGroup):
            return None
        fwd = self.axis0.core.letters
        bwd = self.axis0.core.inverse().letters
        n = len(fwd)
        return any(bwd == fwd[i:] + fwd[:i] for i in range(n))

    # -- cosets ---------------------------------------------------------------

    def coset_representative(self, h):
        """Minimal-length representative of h<root>, ties broken lexically."""
        root, root_inv = self.root, self.root.inverse()
        ties = [h]
        best_len = h.length
        for step in (root, root_inv):
            cur = h
            stall = 0
            while stall <= self._canon_lookahead:
                cur = cur * step
                n = cur.length
                if n < best_len:
                    best_len, ties, stall = n, [cur], 0
                elif n == best_len:
                    ties.append(cur)
                    stall += 1
                else:
                    stall += 1
        if len(ties) == 1:
            return ties[0]
        return min(ties, key=lambda w: w.sort_key())

    def marking(self, h) -> CosetMarking:
        rep = self.coset_representative(h)
        return CosetMarking(rep, self.axis0.translated(rep))

    # -- projections ----------------------------------------------------------

    def projection_index(self, m: CosetMarking, x) -> int:
        """Index on m's axis of the projection of the orbit point of x."""
        return self.model.axis_index(self.model.orbit_point(x), m.axis)

    def project_coset(self, m: CosetMarking, x) -> TreeVertex:
        return m.axis.vertex(self.projection_index(m, x))

    def coset_distance(self, m: CosetMarking, x, y) -> int:
        return abs(self.projection_index(m, x) - self.projection_index(m, y))

    def axis_interval(self, m: CosetMarking, other: CosetMarking) -> tuple[int, int]:
        """Index interval on m's axis of the projection of other's axis.

        Exact: beyond a bounded window the projection of a distinct-coset axis
        is constant (primitive periods overlap in fewer than two periods), so
        the ray limits are reached at finite parameters; stabilization is
        verified and a failure raises.
        """
        d0 = self.model.distance(m.axis.vertex(0), other.axis.vertex(0))
        reach = d0 + 4 * (self.period + other.axis.period) + 16
        ends = []
        for sign in (-1, 1):
            i1 = self.model.axis_index(other.axis.vertex(sign * reach), m.axis)
            i2 = self.model.axis_index(
                other.axis.vertex(sign * (reach + other.axis.period)), m.axis
            )
            if i1 != i2:
                raise ProjectionError("axis projection failed to stabilize")
            ends.append(i1)
        return (min(ends), max(ends))

    def point_to_interval_distance(self, i: int, interval: tuple[int, int]) -> int:
        """diam({i} union [lo, hi]) measured along the axis."""
        lo, hi = interval
        return max(i, hi) - min(i, lo)

    # -- the threshold family ---------------------------------------------------

    def large_projections(self, o, p) -> ProjectionChain:
        """All cosets with coset_distance(o, p) >= threshold, in geodesic order.

        Slides along the tree geodesic and detects maximal subsegments lying
        on translates of the germ axis.  In a tree the overlap of the geodesic
        with a translate is exactly the segment between the two endpoint
        projections, so only runs of length >= threshold can qualify; each
        detected coset is still re-measured exactly before inclusion.
        """
        found: dict = {}
        for base, target in ((o, p), (p, o)):
            for h_raw in self._scan_cosets(base, target):
                m = self.marking(h_raw)
                if m in found:
                    continue
                io = self.projection_index(m, o)
                ip = self.projection_index(m, p)
                if abs(io - ip) >= self.threshold:
                    found[m] = (io, ip)
        return self._chain(o, p, found)

    def enumerate_large_projections(self, o, p) -> ProjectionChain:
        """Brute-force oracle for large_projections.

        Enumerates, for every edge of the geodesic, all coset translates whose
        axis contains that edge (finitely many: axis edges are determined by
        label matching on the Cayley tree and by trivial edge stabilizers on
        the Bass-Serre tree), then filters by exact measurement.  Complete
        because a coset with a nonzero gap overlaps the geodesic in an edge.
        """
        raw: dict = {}
        if isinstance(self.model.entry, FreeGroup):
            self._cayley_edge_candidates(o, p, raw)
        else:
            u = self.model.orbit_point(o)
            v = self.model.orbit_point(p)
            for e in self.model.geodesic_edges(u, v):
                for j in range(self.period):
                    h = e * self._anchor_inverses[j]
                    raw.setdefault(h.syllables, h)
        found: dict = {}
        for raw_h in raw.values():
            m = self.marking(raw_h)
            if m in found:
                continue
            io = self.projection_index(m, o)
            ip = self.projection_index(m, p)
            if abs(io - ip) >= self.threshold:
                found[m] = (io, ip)
        return self._chain(o, p, found)

    def _chain(self, o, p, found: dict) -> ProjectionChain:
        u = self.model.orbit_point(o)
        order = []
        for m, (io, ip) in found.items():
            near = self.model.distance(u, m.axis.vertex(io))
            far = self.model.distance(u, m.axis.vertex(ip))
            order.append((near, far, m.rep.sort_key(), m, abs(io - ip)))
        order.sort(key=lambda t: t[:3])
        return ProjectionChain(
            o, p, self.threshold,
            tuple(t[3] for t in order),
            tuple(t[4] for t in order),
        )

    def _cayley_edge_candidates(self, o, p, raw: dict) -> None:
        from .groups import FreeWord

        entry = self.model.entry
        fwd = self.axis0.core.letters
        tau = self.period
        w = (o.inverse() * p).letters
        cur = o
        for letter in w:
            nxt = cur * FreeWord(entry, (letter,))
            for j in range(tau):
                if fwd[j] == letter:
                    h = cur * self._anchor_inverses[j]
                    raw.setdefault(h.letters, h)
                elif fwd[j] == -letter:
                    h = nxt * self._anchor_inverses[j]
                    raw.setdefault(h.letters, h)
            cur = nxt

    def distance_formula_sum(self, chain: ProjectionChain, z1, z2) -> int:
        """Sum of coset distances over the chain (zero-gap cosets drop out)."""
        return sum(self.coset_distance(m, z1, z2) for m in chain.markings)

    def projection_sum_endpoints(self, o, w) -> int:
        """Fast Sum over large_projections(o, w) of coset_distance(o, w).

        For free-group models this is a pure label scan: each maximal overlap
        of length >= threshold contributes exactly its length.
        """
        if not isinstance(self.model.entry, FreeGroup):
            chain = self.large_projections(o, w)
            return sum(chain.distances)
        word = (o.inverse() * w).letters
        total = 0
        for seq in (word, tuple(-x for x in reversed(word))):
            total += _run_scan_sum(seq, self.axis0.core.letters, self.threshold)
        return total

    def _scan_cosets(self, base, target):
        """Raw coset translates carrying runs long enough to qualify.

        Scans the geodesic labels (letters on a Cayley tree, edge-element
        increments equal to stripped syllables on a Bass-Serre tree) against
        the periodic axis pattern in the base-to-target direction.  A run of
        L matched labels means L overlap edges (L + 1 on the Bass-Serre side),
        so shorter runs cannot reach the threshold and are dropped early.
        """
        entry = self.model.entry
        if isinstance(entry, FreeGroup):
            from .groups import FreeWord

            seq = (base.inverse() * target).letters
            pattern = self.axis0.core.letters
            min_run = self.threshold
        else:
            from .groups import ProductWord

            ub = self.model.orbit_point(base)
            vt = self.model.orbit_point(target)
            first_edge, seq = self.model.geodesic_increments(ub, vt)
            pattern = self.axis0.core.syllables
            min_run = self.threshold - 1
        tau = len(pattern)
        n = len(seq)
        out = []
        for diag in range(tau):
            k = 0
            while k < n:
                if seq[k] != pattern[(k + diag) % tau]:
                    k += 1
                    continue
                start = k
                while k < n and seq[k] == pattern[(k + diag) % tau]:
                    k += 1
                if k - start < min_run:
                    continue
                phase = (start + diag) % tau
                if isinstance(entry, FreeGroup):
                    at_run = base * FreeWord(entry, seq[:start])
                else:
                    at_run = first_edge * ProductWord(entry, seq[:start])
                out.append(at_run * self._anchor_inverses[phase])
        return out

    # -- randomized checkers ----------------------------------------------------

    def behrstock_violations(self, sample_size: int, rng_seed: int,
                             max_length: int = 12, max_witnesses: int = 10):
        """Count failures of the strong Behrstock inequality at the configured
        constant over randomized (x, h coset, h' coset) triples.

        A violation is a triple with distinct cosets where the projection gap
        d_{h}(x, h') exceeds the constant yet the projection of x onto h' is
        not contained in the projection of h onto h'.
        """
        rng = np.random.default_rng(np.random.SeedSequence([rng_seed]))
        entry = self.model.entry
        violations = 0
        witnesses = []
        for _ in range(sample_size):
            x = random_element(entry, rng, max_length)
            m1 = self.marking(random_element(entry, rng, max_length))
            m2 = self.marking(random_element(entry, rng, max_length))
            if m1 == m2:
                continue
            gap = self.point_to_interval_distance(
                self.projection_index(m1, x), self.axis_interval(m1, m2)
            )
            if gap <= self.behrstock_constant:
                continue
            lo, hi = self.axis_interval(m2, m1)
            ix = self.projection_index(m2, x)
            if not lo <= ix <= hi:
                violations += 1
                if len(witnesses) < max_witnesses:
                    witnesses.append(
                        {
                            "x": x.to_string(),
                            "h": m1.rep.to_string(),
                            "h_prime": m2.rep.to_string(),
                            "gap": gap,
                            "x_on_h_prime": ix,
                            "h_on_h_prime": [lo, hi],
                        }
                    )
        return violations, witnesses

    def middle_coset_excess(self, sample_size: int, rng_seed: int,
                            max_length: int = 12, max_witnesses: int = 10):
        """Count samples where more than two chain cosets see a third point
        project off both endpoints' projections."""
        rng = np.random.default_rng(np.random.SeedSequence([rng_seed]))
        entry = self.model.entry
        bad = 0
        witnesses = []
        for _ in range(sample_size):
            o = random_element(entry, rng, max_length)
            p = random_element(entry, rng, max_length)
            a = random_element(entry, rng, max_length)
            chain = self.large_projections(o, p)
            if not chain.markings:
                continue
            middles = 0
            for m in chain.markings:
                ia = self.projection_index(m, a)
                if ia != self.projection_index(m, o) and ia != self.projection_index(m, p):
                    middles += 1
            if middles > 2:
                bad += 1
                if len(witnesses) < max_witnesses:
                    witnesses.append(
                        {"o": o.to_string(), "p": p.to_string(), "a": a.to_string(),
                         "middles": middles}
                    )
        return bad, witnesses


def _run_scan_sum(seq, pattern, threshold: int) -> int:
    """Total length of maximal periodic-factor runs of length >= threshold."""
    tau = len(pattern)
    n = len(seq)
    total = 0
    for diag in range(tau):
        k = 0
        while k < n:
            if seq[k] != pattern[(k + diag) % tau]:
                k += 1
                continue
            start = k
            while k < n and seq[k] == pattern[(k + diag) % tau]:
                k += 1
            if k - start >= threshold:
                total += k - start
    return total
