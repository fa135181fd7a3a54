"""Exact law of the distance process |w_n| for the uniform simple random walk
on the free group of rank 2.

The radial projection of that walk is itself a Markov chain on the
nonnegative integers: away from 0 it steps +1 with probability 3/4 and -1
with probability 1/4, and from 0 it steps to 1.  Everything here is plain
1-D convolution kept deliberately independent of the group machinery, so it
can serve as an oracle for the simulation engine.
"""

from __future__ import annotations

import numpy as np

UP = 0.75
DOWN = 0.25


def length_law(n: int, cap: int = 100_000) -> np.ndarray:
    """Exact distribution of |w_n|: index k holds P[|w_n| = k]."""
    if n > cap:
        raise ValueError(f"step count {n} over cap {cap}")
    return _laws(n, keep={n})[-1]


def length_laws(steps: list[int]) -> list[np.ndarray]:
    """Laws at several step counts from one forward pass."""
    top = max(steps) if steps else 0
    all_laws = _laws(top, keep=set(steps))
    by_n = {}
    want = sorted(set(steps))
    for n, law in zip(want, all_laws):
        by_n[n] = law
    return [by_n[n] for n in steps]


def _laws(n: int, keep=None):
    """Forward convolution on the parity-compressed lattice.

    After s steps only distances k == s (mod 2) carry mass, so the law is
    stored as c[j] = P[|w_s| = 2j + (s % 2)].
    """
    half = n // 2 + 2
    cur = np.zeros(half)
    nxt = np.zeros(half)
    cur[0] = 1.0

    def expand(c, step):
        law = np.zeros(n + 1)
        top = step // 2 + 1
        law[step % 2 : step % 2 + 2 * top : 2] = c[:top]
        return law

    out = []
    if keep in (None, set()) or 0 in keep:
        out.append(expand(cur, 0))
    for step in range(1, n + 1):
        q = (step - 1) % 2  # parity before the step
        top = (step - 1) // 2 + 1  # occupied compressed slots before the step
        if q == 0:
            # k = 2j -> 2j + 1 (up, forced from 0) or 2j - 1 (down, j >= 1)
            nxt[1:top] = UP * cur[1:top] + DOWN * cur[2 : top + 1]
            nxt[0] = cur[0] + DOWN * cur[1]
            nxt[top] = 0.0
        else:
            # k = 2j + 1 -> 2j + 2 (up) or 2j (down)
            nxt[1 : top + 1] = UP * cur[:top] + DOWN * cur[1 : top + 1]
            nxt[0] = DOWN * cur[0]
            nxt[top + 1] = 0.0
        cur, nxt = nxt, cur
        if keep is None or step in keep:
            out.append(expand(cur, step))
    return out


def mean_length(n: int) -> float:
    law = length_law(n)
    return float(np.dot(np.arange(n + 1), law))


def variance_length(n: int) -> float:
    law = length_law(n)
    ks = np.arange(n + 1)
    m = float(np.dot(ks, law))
    return float(np.dot((ks - m) ** 2, law))


def return_probability(n: int) -> float:
    """P[|w_n| = 0] (nonzero only for even n)."""
    return float(length_law(n)[0])


def return_ratio(n: int) -> float:
    """P[|w_{n+2}| = 0] / P[|w_n| = 0], an estimator of the squared spectral
    radius (3/4 in the limit)."""
    laws = length_laws([n, n + 2])
    r0, r1 = float(laws[0][0]), float(laws[1][0])
    if r0 == 0.0:
        raise ValueError("return probability vanishes at odd n")
    return r1 / r0


def cdf_points(n: int):
    """Support and cumulative probabilities of |w_n| (zero atoms dropped)."""
    law = length_law(n)
    support = np.nonzero(law > 0)[0]
    return support, np.cumsum(law[support])


def tail_below(n: int, k: int) -> float:
    """P[|w_n| < k], exactly."""
    law = length_law(n)
    return float(law[: max(k, 0)].sum())
