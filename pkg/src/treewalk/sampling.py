"""Trajectory sampling with reproducible splittable randomness.

Every trajectory draws its randomness from a counter-based Philox generator
keyed by (master seed, experiment key, trajectory index), and consumes one
uniform per step through the inverse CDF over the kernel's ordered support.
The scalar sampler and the vectorized bulk engine therefore produce
byte-identical paths, and results never depend on scheduling, block size or
thread count.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .groups import FreeGroup
from .kernels import LetterModel, TransitionKernel, code_letter, letter_code

RNG_FAMILY = "philox4x64 / numpy SeedSequence substreams"


def experiment_key(name: str) -> int:
    """Stable 63-bit key for an experiment id string."""
    return int.from_bytes(hashlib.sha256(name.encode()).digest()[:8], "big") >> 1


def substream(master_seed: int, exp_key: int, index: int) -> np.random.Generator:
    """Per-trajectory generator; pure function of its three keys."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence([master_seed, exp_key, index]))
    )


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, (tuple, list)):
        return np.random.SeedSequence(list(seed))
    return np.random.SeedSequence([int(seed)])


def sample_path(kernel: TransitionKernel, o, n: int, seed, cache_cap: int = 65536):
    """One trajectory w_0..w_n; deterministic in (kernel descriptor, o, n, seed).

    ``seed`` is either an int or a (master_seed, experiment_key, index) tuple;
    the tuple form reproduces exactly the corresponding bulk-engine column.
    """
    rng = np.random.Generator(np.random.Philox(_seed_sequence(seed)))
    us = rng.random(n)
    path = [o]
    state = o
    cache: dict = {}
    for t in range(n):
        entry = cache.get(state)
        if entry is None:
            sup = kernel.support(state)
            entry = ([h for h, _ in sup], np.cumsum([p for _, p in sup]))
            if len(cache) < cache_cap:
                cache[state] = entry
        targets, cum = entry
        idx = int(np.searchsorted(cum, us[t], side="right"))
        state = targets[min(idx, len(targets) - 1)]
        path.append(state)
    return path


def endpoint_histogram(kernel: TransitionKernel, o, n: int, trials: int, seed) -> dict:
    """Empirical law of w_n over ``trials`` independent trajectories.

    Trajectories are aggregated per state level by level (a multinomial
    cascade), which has exactly the law of ``trials`` independent runs of
    sample_path while touching each reachable state once per step.
    """
    rng = np.random.Generator(np.random.Philox(_seed_sequence(seed)))
    counts = {o: trials}
    for _ in range(n):
        nxt: dict = {}
        for state in sorted(counts, key=lambda g: g.sort_key()):
            c = counts[state]
            sup = kernel.support(state)
            draws = rng.multinomial(c, [p for _, p in sup])
            for (h, _), k in zip(sup, draws):
                if k:
                    nxt[h] = nxt.get(h, 0) + int(k)
        counts = nxt
    return counts


def total_variation(law_a: dict, law_b: dict) -> float:
    keys = set(law_a) | set(law_b)
    return 0.5 * sum(abs(law_a.get(k, 0.0) - law_b.get(k, 0.0)) for k in keys)


# ---------------------------------------------------------------------------
# vectorized bulk engine for letter-model kernels


@dataclass
class Snapshot:
    """State of all trajectories at one step: reduced words as letter-code
    rows (entries beyond the row length are zero) plus lengths."""

    step: int
    lengths: np.ndarray
    words: Optional[np.ndarray] = None


class StepObserver:
    """Per-block observer of the raw (pre-transform) walk.

    ``init`` sees the initial buffers; ``step`` runs after each update with
    the chosen letter codes and the cancellation mask; ``finish`` returns the
    per-trajectory results for the block.
    """

    def init(self, words, lengths):  # pragma: no cover - interface
        pass

    def step(self, t, words, lengths, codes, cancelled):  # pragma: no cover
        pass

    def finish(self):  # pragma: no cover - interface
        return None


def bulk_walk(kernel: TransitionKernel, o, n: int, trajectories: int,
              master_seed: int, exp_key: int, snapshot_steps: Sequence[int] = (),
              word_steps: Sequence[int] = (), observer_factory=None,
              block_size: int = 0, threads: int = 1):
    """Run many trajectories of a letter-model kernel on a free group.

    Returns (snapshots, observer_results): snapshots maps each requested step
    to a Snapshot (with word arrays only for steps in ``word_steps``);
    observer results are concatenated in trajectory order.  Output snapshots
    have the kernel's output bijection applied; observers always watch the
    underlying base walk, so they cannot be combined with a transforming
    kernel.
    """
    model = kernel.letter_model()
    if model is None:
        raise ValueError(f"kernel {kernel.descriptor} has no letter model")
    if model.transform is not None and observer_factory is not None:
        raise ValueError("observers watch the base walk; not valid with a transform")
    if not isinstance(kernel.entry, FreeGroup):
        raise ValueError("bulk engine requires a free group")
    snapshot_steps = sorted(set(snapshot_steps) | set(word_steps))
    word_steps = set(word_steps)
    o_codes = np.array([letter_code(v) for v in o.letters], dtype=np.int8)

    if block_size <= 0:
        block_size = max(256, min(32768, 20_000_000 // max(n, 1)))
    blocks = [
        (i, min(i + block_size, trajectories))
        for i in range(0, trajectories, block_size)
    ]

    def run_block(rng_range):
        lo, hi = rng_range
        return _run_block(model, o_codes, n, lo, hi, master_seed, exp_key,
                          snapshot_steps, word_steps, observer_factory)

    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_block, blocks))
    else:
        results = [run_block(b) for b in blocks]

    snapshots: dict[int, Snapshot] = {}
    for k in snapshot_steps:
        lengths = np.concatenate([r[0][k].lengths for r in results])
        words = None
        if k in word_steps:
            width = max(r[0][k].words.shape[1] for r in results)
            words = np.zeros((trajectories, width), dtype=np.int8)
            at = 0
            for r in results:
                blk = r[0][k].words
                words[at : at + blk.shape[0], : blk.shape[1]] = blk
                at += blk.shape[0]
        snapshots[k] = Snapshot(k, lengths, words)
    observed = None
    if observer_factory is not None:
        observed = _concat_observations([r[1] for r in results])
    return snapshots, observed


def _run_block(model: LetterModel, o_codes, n, lo, hi, master_seed, exp_key,
               snapshot_steps, word_steps, observer_factory):
    count = hi - lo
    cap = len(o_codes) + n + 2
    words = np.zeros((count, cap), dtype=np.int8)
    words[:, : len(o_codes)] = o_codes[None, :]
    lengths = np.full(count, len(o_codes), dtype=np.int64)
    us = np.empty((count, n), dtype=np.float64)
    for i in range(count):
        us[i] = substream(master_seed, exp_key, lo + i).random(n)

    observer = observer_factory(lo, hi) if observer_factory is not None else None
    if observer is not None:
        observer.init(words, lengths)

    rows = np.arange(count)
    same_profile = model.cum_even is model.cum_odd or np.array_equal(
        model.cum_even, model.cum_odd
    )
    snaps: dict[int, Snapshot] = {}
    if 0 in snapshot_steps:
        snaps[0] = _snapshot(model, words, lengths, 0, 0 in word_steps, len(o_codes))
    for t in range(n):
        u = us[:, t]
        if same_profile:
            codes = np.searchsorted(model.cum_even, u, side="right").astype(np.int8)
        else:
            even_codes = np.searchsorted(model.cum_even, u, side="right")
            odd_codes = np.searchsorted(model.cum_odd, u, side="right")
            codes = np.where(lengths % 2 == 0, even_codes, odd_codes).astype(np.int8)
        np.minimum(codes, 2 * model.rank - 1, out=codes)
        top = np.where(lengths > 0, words[rows, np.maximum(lengths - 1, 0)], -1)
        cancelled = (lengths > 0) & (top == (codes ^ 1))
        lengths[cancelled] -= 1
        push = ~cancelled
        words[rows[push], lengths[push]] = codes[push]
        lengths[push] += 1
        if observer is not None:
            observer.step(t, words, lengths, codes, cancelled)
        step = t + 1
        if step in snapshot_steps:
            snaps[step] = _snapshot(
                model, words, lengths, step, step in word_steps, len(o_codes)
            )
    return snaps, (observer.finish() if observer is not None else None)


def _snapshot(model, words, lengths, step, keep_words, start_len) -> Snapshot:
    out_words = None
    out_lengths = lengths.copy()
    if keep_words or model.transform is not None:
        width = min(words.shape[1], start_len + step + 2)
        out_words = words[:, :width].copy()
    if model.transform is not None:
        out_words, out_lengths = model.transform.transform_codes(out_words, out_lengths)
        _zero_tail(out_words, out_lengths)
    if not keep_words:
        out_words = None
    return Snapshot(step, out_lengths, out_words)


def _zero_tail(words, lengths):
    cols = np.arange(words.shape[1])[None, :]
    words[cols >= lengths[:, None]] = 0


# ---------------------------------------------------------------------------
# snapshot helpers


def snapshot_elements(entry: FreeGroup, snap: Snapshot, limit: Optional[int] = None):
    """Decode snapshot rows back to group elements (words must be kept)."""
    if snap.words is None:
        raise ValueError("snapshot kept lengths only")
    from .groups import FreeWord

    count = snap.words.shape[0] if limit is None else min(limit, snap.words.shape[0])
    out = []
    for i in range(count):
        codes = snap.words[i, : snap.lengths[i]]
        out.append(FreeWord(entry, tuple(code_letter(int(c)) for c in codes)))
    return out


def pairwise_lcp(words_a, lengths_a, words_b, lengths_b) -> np.ndarray:
    """Row-wise common prefix length of two code matrices."""
    n = words_a.shape[0]
    width = min(words_a.shape[1], words_b.shape[1])
    limit = np.minimum(lengths_a, lengths_b)
    diff = words_a[:, :width] != words_b[:, :width]
    cols = np.arange(width)[None, :]
    diff |= cols >= limit[:, None]
    sentinel = np.ones((n, 1), dtype=bool)
    return np.argmax(np.concatenate([diff, sentinel], axis=1), axis=1)


def tree_distances(words_a, lengths_a, words_b, lengths_b) -> np.ndarray:
    """Row-wise word-metric distance d(a, b) = |a| + |b| - 2 lcp."""
    lcp = pairwise_lcp(words_a, lengths_a, words_b, lengths_b)
    return lengths_a + lengths_b - 2 * lcp


def _concat_observations(parts):
    if all(p is None for p in parts):
        return None
    if isinstance(parts[0], dict):
        out = {}
        for key in parts[0]:
            out[key] = np.concatenate([p[key] for p in parts])
        return out
    return np.concatenate(parts)


# ---------------------------------------------------------------------------
# observers


class AxisOffsetTracker(StepObserver):
    """Tracks, for a fixed family of axis patterns, the projection offset of
    the moving word on each axis, the per-step distance-formula sum against a
    reference offset, and its running maximum.

    A pattern is (codes array P, split): P spells the vertex words along one
    ray of the line through its closest point to the identity (the bridge has
    length ``split``); the offset of a word is
    max(lcp(w, P+) - split, 0) - max(lcp(w, P-) - split, 0).
    """

    def __init__(self, patterns, ref_offsets, lo, hi):
        self.patterns = patterns  # list of (plus_codes, minus_codes, split)
        self.ref = ref_offsets
        self.count = hi - lo

    def init(self, words, lengths):
        start = words[0, : lengths[0]]
        self.lcps = []
        for plus, minus, _split in self.patterns:
            lp = _scalar_lcp(start, plus)
            lm = _scalar_lcp(start, minus)
            self.lcps.append(
                [np.full(self.count, lp, dtype=np.int64),
                 np.full(self.count, lm, dtype=np.int64)]
            )
        self.current = np.zeros(self.count, dtype=np.int64)
        self.running_max = np.zeros(self.count, dtype=np.int64)
        self._recompute(lengths)

    def step(self, t, words, lengths, codes, cancelled):
        pushed = ~cancelled
        m_push = lengths - 1  # position just written on pushed rows
        for (plus, minus, _split), pair in zip(self.patterns, self.lcps):
            for pat, lcp in zip((plus, minus), pair):
                hit = pushed & (lcp == m_push) & (pat[np.minimum(m_push, len(pat) - 1)] == codes)
                lcp[hit] += 1
                np.minimum(lcp, lengths, out=lcp)
        self._recompute(lengths)

    def _recompute(self, lengths):
        total = np.zeros(self.count, dtype=np.int64)
        for (plus, minus, split), (lp, lm), ref in zip(
            self.patterns, self.lcps, self.ref
        ):
            off = np.maximum(lp - split, 0) - np.maximum(lm - split, 0)
            total += np.abs(off - ref)
        self.current = total
        np.maximum(self.running_max, total, out=self.running_max)

    def finish(self):
        return {"max_sum": self.running_max, "final_sum": self.current}


def _scalar_lcp(word_codes, pattern) -> int:
    n = 0
    for c in word_codes:
        if n >= len(pattern) or pattern[n] != int(c):
            break
        n += 1
    return n
