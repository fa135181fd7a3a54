"""Randomized verification suites for the geometric and probabilistic
invariants: tree axioms, equivariance, axis behaviour, the projection-calculus
lemmas, and kernel contracts.

Each check returns a list of witness strings (empty means it passed); suites
are deterministic in their seed and scale with a sample-size knob so the same
code backs the command-line `verify` subcommand, the pytest suite, and the
acceptance run.
"""

from __future__ import annotations

import math

import numpy as np

from . import radial
from .groups import FreeGroup, parse_entry, random_element
from .kernels import (exact_distribution, kernel_from_descriptor, srw_kernel,
                      suffix_swap)
from .projections import ProjectionSystem
from .sampling import endpoint_histogram, sample_path, total_variation
from .trees import tree_for

PROJECTION_CATALOG = [
    ("free:2", "a"),
    ("free:2", "ab"),
    ("freeproduct:Z2,Z", "xt"),
]


def _rng(seed, tag):
    return np.random.default_rng(np.random.SeedSequence([seed, tag]))


def structured_pair(entry, system, rng, germ, max_len: int = 6,
                    max_inserts: int = 2):
    """Random element with germ-power segments spliced in, so that chains of
    threshold-sized projections actually occur in the sample."""
    out = random_element(entry, rng, max_len)
    for _ in range(int(rng.integers(0, max_inserts + 1))):
        k = int(rng.integers(system.threshold, system.threshold + 4))
        out = out * (germ ** k) * random_element(entry, rng, max_len)
    return out


# ---------------------------------------------------------------------------
# geometry suite


def check_four_point(seed, samples) -> list:
    out = []
    for name in ("free:2", "freeproduct:Z2,Z"):
        entry = parse_entry(name)
        model = tree_for(entry)
        rng = _rng(seed, 1)
        for _ in range(samples):
            pts = [model.orbit_point(random_element(entry, rng, 8)) for _ in range(4)]
            u, v, w, z = pts
            lhs = model.distance(u, v) + model.distance(w, z)
            rhs = max(
                model.distance(u, w) + model.distance(v, z),
                model.distance(u, z) + model.distance(v, w),
            )
            if lhs > rhs:
                out.append(f"{name}: four-point fails at {pts}")
    return out


def check_metric_axioms(seed, samples) -> list:
    out = []
    for name in ("free:2", "freeproduct:Z2,Z"):
        entry = parse_entry(name)
        model = tree_for(entry)
        rng = _rng(seed, 2)
        for _ in range(samples):
            g, x, y, z = (random_element(entry, rng, 6) for _ in range(4))
            vx, vy, vz = (model.orbit_point(e) for e in (x, y, z))
            if model.distance(vx, vy) != model.distance(vy, vx):
                out.append(f"{name}: symmetry fails")
            if model.distance(vx, vz) > model.distance(vx, vy) + model.distance(vy, vz):
                out.append(f"{name}: triangle inequality fails")
            if (model.distance(vx, vy) == 0) != (vx == vy):
                out.append(f"{name}: separation fails")
            gx, gy = model.translate(g, vx), model.translate(g, vy)
            if model.distance(gx, gy) != model.distance(vx, vy):
                out.append(f"{name}: left invariance fails")
    return out


def check_translation_lengths(seed, samples) -> list:
    out = []
    for name in ("free:2", "freeproduct:Z2,Z"):
        entry = parse_entry(name)
        model = tree_for(entry)
        rng = _rng(seed, 3)
        for _ in range(samples):
            g = random_element(entry, rng, 6)
            h = random_element(entry, rng, 6)
            tau = model.translation_length(g)
            if model.translation_length(h * g * h.inverse()) != tau:
                out.append(f"{name}: tau not conjugation invariant at {g.to_string()}")
            k = int(rng.integers(1, 5))
            if model.translation_length(g ** k) != k * tau:
                out.append(f"{name}: tau(g^{k}) != {k} tau(g) at {g.to_string()}")
            # orbit-growth oracle: d(x0, g^n x0) grows by tau per step eventually
            if tau > 0:
                base = model.basepoint
                d64 = model.distance(base, model.translate(g ** 64, base))
                d65 = model.distance(base, model.translate(g ** 65, base))
                if d65 - d64 != tau:
                    out.append(f"{name}: orbit growth oracle fails at {g.to_string()}")
    return out


def check_axis_invariants(seed, samples) -> list:
    out = []
    for name in ("free:2", "freeproduct:Z2,Z"):
        entry = parse_entry(name)
        model = tree_for(entry)
        rng = _rng(seed, 4)
        for _ in range(samples):
            g = random_element(entry, rng, 6)
            if model.translation_length(g) == 0:
                continue
            axis = model.axis_of(g)
            tau = model.translation_length(g)
            for i in range(-4, 5):
                if model.distance(axis.vertex(i), axis.vertex(i + 1)) != 1:
                    out.append(f"{name}: axis not a path at {g.to_string()} i={i}")
                if model.translate(g, axis.vertex(i)) != axis.vertex(i + tau):
                    out.append(f"{name}: axis not translated by germ at {g.to_string()}")
                if model.distance(axis.vertex(i),
                                  model.translate(g, axis.vertex(i))) != tau:
                    out.append(f"{name}: displacement on axis != tau at {g.to_string()}")
    return out


def check_projection_formula(seed, samples) -> list:
    """Closest-point projection: prefix-matching formula vs bisection vs a
    brute argmin over an index window."""
    out = []
    for name in ("free:2", "freeproduct:Z2,Z"):
        entry = parse_entry(name)
        model = tree_for(entry)
        rng = _rng(seed, 5)
        for _ in range(samples):
            g = random_element(entry, rng, 6)
            if model.translation_length(g) == 0:
                continue
            axis = model.axis_of(g).translated(random_element(entry, rng, 6))
            v = model.orbit_point(random_element(entry, rng, 9))
            i1 = model.axis_index(v, axis)
            i2 = model.project_by_search(v, axis)
            if i1 != i2:
                out.append(f"{name}: projection formula != bisection at {v}")
                continue
            d0 = model.distance(v, axis.vertex(0))
            window = range(-2 * d0 - 1, 2 * d0 + 2)
            best = min(window, key=lambda i: (model.distance(v, axis.vertex(i)), i))
            if best != i1:
                out.append(f"{name}: projection formula != window argmin at {v}")
    return out


def check_equivariance(seed, samples) -> list:
    out = []
    for name in ("free:2", "freeproduct:Z2,Z"):
        entry = parse_entry(name)
        model = tree_for(entry)
        rng = _rng(seed, 6)
        for _ in range(samples):
            g = random_element(entry, rng, 6)
            h = random_element(entry, rng, 6)
            if model.translation_length(g) == 0:
                continue
            axis = model.axis_of(g)
            v = model.orbit_point(random_element(entry, rng, 8))
            lhs = model.translate(h, model.project_to_axis(v, axis))
            rhs = model.project_to_axis(model.translate(h, v), axis.translated(h))
            if lhs != rhs:
                out.append(f"{name}: projection not equivariant at {v}")
    return out


def check_morse_property(seed, samples) -> list:
    """Any bounded walk between points with distinct projections passes the
    projection of its start (exhaustive enumeration of short walks)."""
    entry = parse_entry("free:2")
    model = tree_for(entry)
    rng = _rng(seed, 7)
    axis = model.axis_of(entry.from_string("a"))
    out = []
    for _ in range(min(samples, 12)):
        u = random_element(entry, rng, 3)
        v = random_element(entry, rng, 3)
        pu = model.project_to_axis(model.orbit_point(u), axis)
        pv = model.project_to_axis(model.orbit_point(v), axis)
        if pu == pv:
            continue
        target_hits = []

        def walks(cur, visited_pu, depth):
            if cur == v:
                target_hits.append(visited_pu)
                return
            if depth == 0:
                return
            for letter in (1, -1, 2, -2):
                nxt = cur * entry.reduce([letter])
                walks(nxt, visited_pu or model.orbit_point(nxt) == pu, depth - 1)

        span = (u.inverse() * v).length
        walks(u, model.orbit_point(u) == pu, min(span + 2, 8))
        if not all(target_hits):
            out.append(f"walk from {u.to_string()} to {v.to_string()} avoided the projection")
    return out


def check_bfs_distance_oracle(seed, samples) -> list:
    """Graph-BFS distances on ball-restricted trees agree with the formulas."""
    out = []
    entry = parse_entry("free:2")
    model = tree_for(entry)
    ball = entry.ball(5)
    rng = _rng(seed, 8)
    idx = {g: i for i, g in enumerate(ball)}
    for _ in range(min(samples, 30)):
        g = ball[int(rng.integers(0, len(ball)))]
        dist = _bfs_free(entry, ball, idx, g, 5)
        for h in ball:
            if (g.inverse() * h).length <= 2:
                if dist[idx[h]] != (g.inverse() * h).length:
                    out.append(f"free:2 bfs mismatch at {g.to_string()},{h.to_string()}")
    entry = parse_entry("freeproduct:Z2,Z")
    model = tree_for(entry)
    verts, adj = _restricted_bs_graph(entry, model, radius=4)
    vidx = {v: i for i, v in enumerate(verts)}
    for start in list(vidx)[:: max(1, len(verts) // min(samples, 20))]:
        dist = _bfs_graph(adj, vidx[start])
        for v in verts:
            exact = model.distance(start, v)
            if exact <= 2 and dist[vidx[v]] != exact:
                out.append(
                    f"bass-serre bfs {dist[vidx[v]]} != formula {exact} at "
                    f"{model.vertex_to_string(start)} -> {model.vertex_to_string(v)}"
                )
    return out


def _bfs_free(entry, ball, idx, start, radius):
    from collections import deque

    dist = [-1] * len(ball)
    dist[idx[start]] = 0
    q = deque([start])
    letters = [entry.reduce([v]) for v in (1, -1, 2, -2)]
    while q:
        g = q.popleft()
        for s in letters:
            h = g * s
            j = idx.get(h)
            if j is not None and dist[j] < 0:
                dist[j] = dist[idx[g]] + 1
                q.append(h)
    return dist


def _restricted_bs_graph(entry, model, radius):
    elements = entry.ball(radius)
    verts = set()
    for g in elements:
        for block in (0, 1):
            verts.add(model._coset_vertex(block, g))
    verts = sorted(verts, key=lambda v: (v.block, v.rep.sort_key()))
    vidx = {v: i for i, v in enumerate(verts)}
    adj = [[] for _ in verts]
    for g in elements:
        a = model._coset_vertex(0, g)
        b = model._coset_vertex(1, g)
        adj[vidx[a]].append(vidx[b])
        adj[vidx[b]].append(vidx[a])
    return verts, adj


def _bfs_graph(adj, start):
    from collections import deque

    dist = [-1] * len(adj)
    dist[start] = 0
    q = deque([start])
    while q:
        i = q.popleft()
        for j in adj[i]:
            if dist[j] < 0:
                dist[j] = dist[i] + 1
                q.append(j)
    return dist


def check_sphere_sizes(seed, samples) -> list:
    entry = parse_entry("free:2")
    out = []
    prev = 1
    for n in range(1, 9):
        size = len(entry.ball(n)) - len(entry.ball(n - 1))
        if size != 4 * 3 ** (n - 1):
            out.append(f"sphere({n}) = {size} != {4 * 3 ** (n - 1)}")
    return out


def check_vertex_serialization(seed, samples) -> list:
    out = []
    for name in ("free:2", "freeproduct:Z2,Z"):
        entry = parse_entry(name)
        model = tree_for(entry)
        rng = _rng(seed, 9)
        for _ in range(samples):
            v = model.orbit_point(random_element(entry, rng, 8))
            text = model.vertex_to_string(v)
            if model.vertex_from_string(text) != v:
                out.append(f"{name}: vertex round-trip fails for {text}")
    return out


# ---------------------------------------------------------------------------
# projection suite


def _systems(threshold=10, behrstock_constant=0):
    systems = []
    for group, germ in PROJECTION_CATALOG:
        entry = parse_entry(group)
        model = tree_for(entry)
        systems.append(
            (group, germ,
             ProjectionSystem(model, entry.from_string(germ),
                              behrstock_constant=behrstock_constant,
                              threshold=threshold))
        )
    return systems


def check_behrstock(seed, samples, threshold=10, behrstock_constant=0,
                    catalog=None) -> list:
    out = []
    for group, germ, sys in _systems(threshold, behrstock_constant):
        if catalog is not None and (group, germ) not in catalog:
            continue
        count, witnesses = sys.behrstock_violations(samples, rng_seed=seed)
        if count:
            out.append(f"{group} <{germ}>: {count} Behrstock violations at "
                       f"B={behrstock_constant}; first: {witnesses[0]}")
    return out


def check_order_consistency(seed, samples, threshold=10) -> list:
    out = []
    for group, germ, sys in _systems(threshold):
        entry = sys.model.entry
        g = entry.from_string(germ)
        rng = _rng(seed, 10)
        for _ in range(samples):
            o = structured_pair(entry, sys, rng, g)
            p = structured_pair(entry, sys, rng, g)
            chain = sys.large_projections(o, p)
            for m, m2 in zip(chain.markings, chain.markings[1:]):
                iv_m = sys.axis_interval(m, m2)
                iv_m2 = sys.axis_interval(m2, m)
                conds = [
                    sys.point_to_interval_distance(sys.projection_index(m, o), iv_m)
                    > sys.behrstock_constant,
                    iv_m2[0] <= sys.projection_index(m2, o) <= iv_m2[1],
                    sys.point_to_interval_distance(sys.projection_index(m2, p), iv_m2)
                    > sys.behrstock_constant,
                    iv_m[0] <= sys.projection_index(m, p) <= iv_m[1],
                ]
                if not all(conds):
                    out.append(
                        f"{group} <{germ}>: order conditions {conds} for adjacent "
                        f"{m.rep.to_string()} < {m2.rep.to_string()} "
                        f"(o={o.to_string()}, p={p.to_string()})"
                    )
    return out


def check_distance_lower_bound(seed, samples, threshold=10) -> list:
    out = []
    for group, germ, sys in _systems(threshold):
        entry = sys.model.entry
        g = entry.from_string(germ)
        rng = _rng(seed, 11)
        for _ in range(samples):
            o = structured_pair(entry, sys, rng, g)
            p = structured_pair(entry, sys, rng, g)
            chain = sys.large_projections(o, p)
            total = sum(chain.distances)
            d = sys.model.distance(
                sys.model.orbit_point(o), sys.model.orbit_point(p)
            )
            if 2 * d < total:
                out.append(f"{group} <{germ}>: d={d} < half the sum {total}")
    return out


def check_middle_cosets(seed, samples, threshold=10) -> list:
    out = []
    for group, germ, sys in _systems(threshold):
        entry = sys.model.entry
        g = entry.from_string(germ)
        rng = _rng(seed, 12)
        for _ in range(samples):
            o = structured_pair(entry, sys, rng, g)
            p = structured_pair(entry, sys, rng, g)
            a = random_element(entry, rng, 8)
            chain = sys.large_projections(o, p)
            middles = 0
            for m in chain.markings:
                ia = sys.projection_index(m, a)
                if ia != sys.projection_index(m, o) and ia != sys.projection_index(m, p):
                    middles += 1
            if middles > 2:
                out.append(
                    f"{group} <{germ}>: {middles} middle cosets for "
                    f"o={o.to_string()} p={p.to_string()} a={a.to_string()}"
                )
    return out


def check_sum_lipschitz(seed, samples, threshold=10, slope=10) -> list:
    out = []
    for group, germ, sys in _systems(threshold):
        entry = sys.model.entry
        g = entry.from_string(germ)
        rng = _rng(seed, 13)
        for _ in range(samples):
            o = structured_pair(entry, sys, rng, g)
            p = structured_pair(entry, sys, rng, g)
            a = structured_pair(entry, sys, rng, g)
            b = structured_pair(entry, sys, rng, g)
            chain = sys.large_projections(o, p)
            total = sys.distance_formula_sum(chain, a, b)
            d = sys.model.distance(
                sys.model.orbit_point(a), sys.model.orbit_point(b)
            )
            if total > slope * d + slope:
                out.append(
                    f"{group} <{germ}>: sum {total} > {slope} d + {slope} (d={d})"
                )
    return out


def check_chain_oracle(seed, samples, thresholds=(3, 5, 10)) -> list:
    """Run-detection chains match the brute-force per-edge enumeration."""
    out = []
    for group, germ, sys0 in _systems(3):
        entry = sys0.model.entry
        g = entry.from_string(germ)
        rng = _rng(seed, 14)
        for T in thresholds:
            sys = ProjectionSystem(sys0.model, g, threshold=T)
            for _ in range(samples):
                o = random_element(entry, rng, 10)
                w = random_element(entry, rng, 20)
                if int(rng.integers(0, 2)):
                    k = int(rng.integers(T, T + 4))
                    w = w * (g ** k) * random_element(entry, rng, 6)
                p = o * w
                c1 = sys.large_projections(o, p)
                c2 = sys.enumerate_large_projections(o, p)
                if ([m.rep for m in c1.markings] != [m.rep for m in c2.markings]
                        or c1.distances != c2.distances):
                    out.append(
                        f"{group} <{germ}> T={T}: chain mismatch at "
                        f"o={o.to_string()} p={p.to_string()}"
                    )
    return out


def check_chain_equivariance(seed, samples, threshold=10) -> list:
    out = []
    for group, germ, sys in _systems(threshold):
        entry = sys.model.entry
        g = entry.from_string(germ)
        rng = _rng(seed, 15)
        for _ in range(samples):
            o = structured_pair(entry, sys, rng, g)
            p = structured_pair(entry, sys, rng, g)
            t = random_element(entry, rng, 6)
            c1 = sys.large_projections(o, p)
            c2 = sys.large_projections(t * o, t * p)
            reps1 = [sys.coset_representative(t * m.rep) for m in c1.markings]
            reps2 = [m.rep for m in c2.markings]
            if reps1 != reps2 or c1.distances != c2.distances:
                out.append(f"{group} <{germ}>: chain not equivariant under "
                           f"{t.to_string()}")
    return out


def check_canonical_representatives(seed, samples) -> list:
    out = []
    for group, germ, sys in _systems(3):
        entry = sys.model.entry
        rng = _rng(seed, 16)
        for _ in range(samples):
            h = random_element(entry, rng, 10)
            rep = sys.coset_representative(h)
            for j in (-3, -1, 1, 2, 5):
                other = sys.coset_representative(h * (sys.root ** j))
                if other != rep:
                    out.append(
                        f"{group} <{germ}>: canonical rep unstable for "
                        f"{h.to_string()} shift {j}"
                    )
                    break
    return out


# ---------------------------------------------------------------------------
# kernel suite


def check_kernel_probabilities(seed, samples) -> list:
    out = []
    entry = parse_entry("free:2")
    rng = _rng(seed, 17)
    kernels = [
        kernel_from_descriptor(entry, "srw:uniform"),
        kernel_from_descriptor(entry, "parity:0.4,0.2,0.2,0.2|0.1,0.3,0.3,0.3"),
        kernel_from_descriptor(entry, "pushforward:suffix_swap:srw:uniform"),
        kernel_from_descriptor(entry, "pushforward:depth_relabel:5:srw:uniform"),
    ]
    for kernel in kernels:
        for _ in range(samples):
            g = random_element(entry, rng, 10)
            sup = kernel.support(g)
            total = sum(p for _, p in sup)
            if abs(total - 1.0) > 1e-12:
                out.append(f"{kernel.descriptor}: probabilities sum to {total}")
            if any(p <= 0 for _, p in sup):
                out.append(f"{kernel.descriptor}: nonpositive probability")
            if len({h for h, _ in sup}) != len(sup):
                out.append(f"{kernel.descriptor}: duplicate targets at {g.to_string()}")
            for h, _ in sup:
                if (g.inverse() * h).length > kernel.jump_bound:
                    out.append(f"{kernel.descriptor}: jump bound violated")
    return out


def check_srw_equivariance(seed, samples) -> list:
    entry = parse_entry("free:2")
    kernel = srw_kernel(entry)
    rng = _rng(seed, 18)
    out = []
    for _ in range(samples):
        g = random_element(entry, rng, 8)
        sup_g = kernel.support(g)
        sup_1 = kernel.support(entry.identity())
        if [(g * h, p) for h, p in sup_1] != sup_g:
            out.append(f"srw support not equivariant at {g.to_string()}")
    return out


def check_parity_floor(seed, samples) -> list:
    """Every transition probability of the parity kernel is >= 1/10 on a ball."""
    entry = parse_entry("free:2")
    kernel = kernel_from_descriptor(
        entry, "parity:0.4,0.2,0.2,0.2|0.1,0.3,0.3,0.3"
    )
    out = []
    for g in entry.ball(8):
        for _, p in kernel.support(g):
            if p < 0.1 - 1e-12:
                out.append(f"parity kernel probability {p} < 1/10 at {g.to_string()}")
                return out
    return out


def check_markov_property(seed, samples) -> list:
    """Empirical conditional laws match exact laws from the new basepoint."""
    entry = parse_entry("free:2")
    out = []
    for desc in ("srw:uniform", "parity:0.4,0.2,0.2,0.2|0.1,0.3,0.3,0.3"):
        kernel = kernel_from_descriptor(entry, desc)
        k, m = 1, 2
        trials = max(samples, 20000)
        hist: dict = {}
        for i in range(trials):
            path = sample_path(kernel, entry.identity(), k + m, (seed, 19, i))
            hist.setdefault(path[k], {})
            hist[path[k]][path[k + m]] = hist[path[k]].get(path[k + m], 0) + 1
        h = max(hist, key=lambda g: sum(hist[g].values()))
        count = sum(hist[h].values())
        emp = {g: c / count for g, c in hist[h].items()}
        exact = exact_distribution(kernel, h, m)
        tv = total_variation(emp, exact)
        if tv > 0.05:
            out.append(f"{desc}: conditional law TV {tv:.4f} > 0.05 "
                       f"({count} conditioned samples)")
    return out


def check_exact_vs_sampled(seed, samples) -> list:
    entry = parse_entry("free:2")
    out = []
    trials = max(samples * 10, 100_000)
    for desc in ("srw:uniform", "parity:0.4,0.2,0.2,0.2|0.1,0.3,0.3,0.3",
                 "pushforward:suffix_swap:srw:uniform"):
        kernel = kernel_from_descriptor(entry, desc)
        hist = endpoint_histogram(kernel, entry.identity(), 5, trials, (seed, 20))
        emp = {g: c / trials for g, c in hist.items()}
        exact = exact_distribution(kernel, entry.identity(), 5)
        tv = total_variation(emp, exact)
        bound = 0.03 if trials >= 10**6 else 3.0 * math.sqrt(200.0 / trials)
        if tv > bound:
            out.append(f"{desc}: TV(empirical, exact) = {tv:.4f} > {bound:.4f}")
    return out


def check_epsilon_length_bound(seed, samples) -> list:
    """max_k P[w_k = g y] >= eps0^{|y|} for short y, from the exact laws."""
    entry = parse_entry("free:2")
    kernel = srw_kernel(entry)
    eps0 = 0.25
    out = []
    rng = _rng(seed, 21)
    from .kernels import exact_distributions

    for _ in range(min(samples, 12)):
        g = random_element(entry, rng, 5)
        y = random_element(entry, rng, 3)
        if y.is_identity():
            continue
        steps = 2 * y.length + 2
        laws = exact_distributions(kernel, g, steps, cap=steps)
        best = max(law.get(g * y, 0.0) for law in laws[1:])
        if best < eps0 ** y.length - 1e-12:
            out.append(
                f"P[w_k = g y] max {best:.5f} < {eps0 ** y.length:.5f} "
                f"for y = {y.to_string()}"
            )
    return out


def check_determinism(seed, samples) -> list:
    entry = parse_entry("free:2")
    out = []
    for desc in ("srw:uniform", "pushforward:suffix_swap:srw:uniform"):
        kernel = kernel_from_descriptor(entry, desc)
        a = sample_path(kernel, entry.identity(), 200, (seed, 22, 0))
        b = sample_path(kernel, entry.identity(), 200, (seed, 22, 0))
        if a != b:
            out.append(f"{desc}: identical seeds gave different paths")
    return out


def check_radial_agreement(seed, samples) -> list:
    """Monte Carlo moments of |w_n| match the exact radial law within 3 se."""
    from .sampling import bulk_walk

    entry = parse_entry("free:2")
    kernel = srw_kernel(entry)
    n, trials = 500, max(samples * 20, 4000)
    snaps, _ = bulk_walk(kernel, entry.identity(), n, trials, seed, 23,
                         snapshot_steps=[n])
    lengths = snaps[n].lengths.astype(float)
    mean_exact = radial.mean_length(n)
    se = math.sqrt(radial.variance_length(n) / trials)
    out = []
    if abs(lengths.mean() - mean_exact) > 3 * se:
        out.append(
            f"MC mean {lengths.mean():.2f} vs radial exact {mean_exact:.2f} "
            f"outside 3 se = {3 * se:.2f}"
        )
    return out


# ---------------------------------------------------------------------------
# suites


SUITES = {
    "geometry": [
        check_four_point,
        check_metric_axioms,
        check_translation_lengths,
        check_axis_invariants,
        check_projection_formula,
        check_equivariance,
        check_morse_property,
        check_bfs_distance_oracle,
        check_sphere_sizes,
        check_vertex_serialization,
    ],
    "projections": [
        check_behrstock,
        check_order_consistency,
        check_distance_lower_bound,
        check_middle_cosets,
        check_sum_lipschitz,
        check_chain_oracle,
        check_chain_equivariance,
        check_canonical_representatives,
    ],
    "kernels": [
        check_kernel_probabilities,
        check_srw_equivariance,
        check_parity_floor,
        check_markov_property,
        check_exact_vs_sampled,
        check_epsilon_length_bound,
        check_determinism,
        check_radial_agreement,
    ],
}


def run_suite(name: str, seed: int = 0, samples: int = 200):
    """Run one named suite (or 'all'); returns (violations, messages)."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(f"unknown suite {name!r}")
    messages = []
    violations = 0
    for suite in names:
        for check in SUITES[suite]:
            witnesses = check(seed, samples)
            status = "ok" if not witnesses else f"{len(witnesses)} violations"
            messages.append(f"[{suite}] {check.__name__}: {status}")
            for w in witnesses[:5]:
                messages.append(f"    witness: {w}")
            violations += len(witnesses)
    return violations, messages
