"""Monte Carlo and exact experiments probing the probabilistic behaviour of
tame chains on tree models: linear progress, the shape of the CLT, translation
length genericity, deviation from geodesics, coset backtracking tails and the
moment-contraction grid, plus subword occurrence statistics.

Every experiment is a pure function of its config (master seed included) and
returns an ExperimentReport whose JSON form is byte-stable across reruns and
thread counts.  Runs on the rank-2 free group with the uniform walk also pass
through a cross-oracle guard against the exact radial law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import radial, stats
from .groups import FreeGroup, parse_entry, random_element
from .kernels import (SuffixSwap, TransitionKernel, kernel_from_descriptor,
                      letter_code, suffix_swap, tameness_probe)
from .projections import ProjectionSystem
from .sampling import (RNG_FAMILY, AxisOffsetTracker, bulk_walk, experiment_key,
                       sample_path, substream, tree_distances)
from .trees import tree_for

CODE_VERSION = "0.1.0"



DEFAULT_TOLERANCES = {
    "linear_progress": {"drift_target": 0.5, "drift_window": 0.02},
    "clt": {"ks_max": 0.02, "sigma2_window": [0.675, 0.825]},
    "translation_length": {"tau_cut": None, "generic_fraction": 0.999},
    "deviation": {
        "fit_window": [2, 10],
        "residual_max": 0.15,
        "ratio_window": [0.25, 0.45],
        "push_mean_gap": 1.0,
    },
    "gromov_tail": {"eps_ref": 0.1, "prob_max": 1e-3},
    "subword": {"occurrence_min": 0.999},
    "backtracking": {"prob_at_20": 0.01},
    "moment_contraction": {},
}


def merged_tolerances(kind: str, overrides: dict) -> dict:
    tol = {k: (list(v) if isinstance(v, list) else v)
           for k, v in DEFAULT_TOLERANCES.get(kind, {}).items()}
    tol.update(overrides)
    return tol


class ExperimentError(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    experiment_id: str
    kind: str
    group: str = "free:2"
    kernel: str = "srw:uniform"
    germ: str = "a"
    threshold: int = 10
    behrstock_constant: int = 0
    n_grid: list = field(default_factory=lambda: [1000])
    trajectories: int = 1000
    master_seed: int = 0
    threads: int = 1
    params: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "kind": self.kind,
            "group": self.group,
            "kernel": self.kernel,
            "germ": self.germ,
            "threshold": self.threshold,
            "behrstock_constant": self.behrstock_constant,
            "n_grid": list(self.n_grid),
            "trajectories": self.trajectories,
            "master_seed": self.master_seed,
            "threads": self.threads,
            "params": dict(self.params),
            "tolerances": dict(self.tolerances),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ExperimentError(f"unknown experiment config keys: {sorted(unknown)}")
        if "experiment_id" not in d or "kind" not in d:
            raise ExperimentError("experiment config needs experiment_id and kind")
        return cls(**d)


@dataclass
class ExperimentReport:
    experiment_id: str
    kind: str
    config: dict
    statistics: dict
    fits: dict
    checks: list
    passed: bool
    provenance: dict

    def to_json_dict(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "kind": self.kind,
            "config": self.config,
            "statistics": self.statistics,
            "fits": self.fits,
            "checks": self.checks,
            "passed": self.passed,
            "provenance": self.provenance,
        }


def _provenance(cfg: ExperimentConfig) -> dict:
    return {
        "master_seed": cfg.master_seed,
        "experiment_key": experiment_key(cfg.experiment_id),
        "rng_family": RNG_FAMILY,
        "code_version": CODE_VERSION,
    }


def _check(checks: list, name: str, passed, detail: str, informational=False):
    checks.append(
        {
            "name": name,
            "passed": None if informational else bool(passed),
            "detail": detail,
        }
    )


def _finish(cfg, statistics, fits, checks) -> ExperimentReport:
    passed = all(c["passed"] for c in checks if c["passed"] is not None)
    return ExperimentReport(
        experiment_id=cfg.experiment_id,
        kind=cfg.kind,
        config=cfg.to_dict(),
        statistics=statistics,
        fits=fits,
        checks=checks,
        passed=passed,
        provenance=_provenance(cfg),
    )


class Context:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.entry = parse_entry(cfg.group)
        self.model = tree_for(self.entry)
        self.kernel = kernel_from_descriptor(self.entry, cfg.kernel)
        self.exp_key = experiment_key(cfg.experiment_id)
        self._system = None

    @property
    def system(self) -> ProjectionSystem:
        if self._system is None:
            self._system = ProjectionSystem(
                self.model,
                self.entry.from_string(self.cfg.germ),
                behrstock_constant=self.cfg.behrstock_constant,
                threshold=self.cfg.threshold,
            )
        return self._system

    def is_flat_srw(self) -> bool:
        """Uniform SRW on free:2, where the radial oracle applies."""
        return self.cfg.group == "free:2" and self.cfg.kernel == "srw:uniform"

    def start_element(self):
        return self.entry.from_string(self.cfg.params.get("start", "1"))

    def walk(self, o, n, word_steps=(), lengths_steps=(), observer_factory=None):
        """Bulk snapshots when a letter model exists, else a scalar fallback."""
        model = self.kernel.letter_model()
        if model is not None and isinstance(self.entry, FreeGroup):
            return bulk_walk(
                self.kernel, o, n, self.cfg.trajectories, self.cfg.master_seed,
                self.exp_key, snapshot_steps=lengths_steps, word_steps=word_steps,
                observer_factory=observer_factory, threads=self.cfg.threads,
            )
        if observer_factory is not None:
            raise ExperimentError("observers need a letter-model kernel")
        return self._scalar_walk(o, n, set(word_steps) | set(lengths_steps))

    def _scalar_walk(self, o, n, steps):
        from .sampling import Snapshot

        steps = sorted(steps)
        base = self.model.basepoint
        elements = {k: [] for k in steps}
        for i in range(self.cfg.trajectories):
            path = sample_path(
                self.kernel, o, n, (self.cfg.master_seed, self.exp_key, i)
            )
            for k in steps:
                elements[k].append(path[k])
        snaps = {}
        for k in steps:
            lengths = np.array(
                [self.model.distance(base, self.model.orbit_point(g))
                 for g in elements[k]],
                dtype=np.int64,
            )
            snaps[k] = Snapshot(k, lengths, None)
            snaps[k].elements = elements[k]
        return snaps, None


def _radial_guard(checks, lengths, n):
    """Every |w_n| statistic for the flat SRW must match the radial oracle."""
    mean_exact = radial.mean_length(n)
    var_exact = radial.variance_length(n)
    m, _ = stats.mean_standard_error(lengths)
    se_exact = math.sqrt(var_exact / len(lengths))
    _check(
        checks, f"radial_guard_mean_n{n}",
        abs(m - mean_exact) <= 3 * se_exact,
        f"mean {m:.3f} vs exact {mean_exact:.3f} (3se = {3 * se_exact:.3f})",
    )


# ---------------------------------------------------------------------------
# linear progress


def linear_progress_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    ctx = Context(cfg)
    o = ctx.start_element()
    grid = sorted(cfg.n_grid)
    snaps, _ = ctx.walk(o, grid[-1], lengths_steps=grid)
    checks: list = []
    per_n = {}
    n_top = grid[-1]
    top = snaps[n_top].lengths.astype(float)
    drift, drift_se = stats.mean_standard_error(top / n_top)
    failure_hits = []
    for n in grid:
        lengths = snaps[n].lengths
        cutoff = drift * n / 2.0
        hits = int(np.count_nonzero(lengths < cutoff))
        failure_hits.append(hits)
        m, se = stats.mean_standard_error(lengths.astype(float))
        per_n[str(n)] = {
            "mean": m,
            "se": se,
            "failure_cutoff": cutoff,
            "failure_hits": hits,
            "failure_prob": hits / cfg.trajectories,
        }
    fit = stats.tail_fit(grid, failure_hits, cfg.trajectories, min_points=3)
    tol = merged_tolerances(cfg.kind, cfg.tolerances)
    if ctx.is_flat_srw():
        _radial_guard(checks, snaps[n_top].lengths, n_top)
        _check(
            checks, "drift_estimate",
            abs(drift - tol["drift_target"]) <= tol["drift_window"],
            f"drift {drift:.4f} target {tol['drift_target']} +- {tol['drift_window']}",
        )
    statistics = {
        "per_n": per_n,
        "drift": drift,
        "drift_se": drift_se,
        "start": o.to_string(),
    }
    fits = {"failure_decay": fit.to_json_dict()}
    return _finish(cfg, statistics, fits, checks)


# ---------------------------------------------------------------------------
# central limit behaviour


def clt_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    ctx = Context(cfg)
    o = ctx.start_element()
    n = max(cfg.n_grid)
    snaps, _ = ctx.walk(o, n, lengths_steps=[n])
    lengths = snaps[n].lengths.astype(float)
    checks: list = []
    variance = float(lengths.var(ddof=1)) if len(lengths) > 1 else 0.0
    sigma2 = variance / n
    statistics = {
        "n": n,
        "mean": float(lengths.mean()),
        "sigma2_per_step": sigma2,
        "degenerate": variance == 0.0,
    }
    fits: dict = {}
    tol = merged_tolerances(cfg.kind, cfg.tolerances)
    if variance == 0.0:
        _check(checks, "variance_positive", False,
               "variance is 0: no CLT normalization exists for this kernel")
        return _finish(cfg, statistics, fits, checks)

    drift_fit = float(lengths.mean()) / n
    sigma_fit = math.sqrt(sigma2)
    standardized_fit = (lengths - drift_fit * n) / (sigma_fit * math.sqrt(n))
    fits["ks_fitted_normalization"] = stats.ks_statistic(
        standardized_fit, stats.normal_cdf
    )
    standardized = (lengths - 0.5 * n) / math.sqrt(0.75 * n)
    ks_known = stats.ks_statistic(standardized, stats.normal_cdf)
    fits["ks_known_normalization"] = ks_known
    centered = standardized - standardized.mean()
    fits["skewness"] = float(np.mean(centered**3) / np.std(standardized) ** 3)
    fits["excess_kurtosis"] = float(
        np.mean(centered**4) / np.std(standardized) ** 4 - 3.0
    )
    if ctx.is_flat_srw():
        _radial_guard(checks, snaps[n].lengths, n)
        exact_law = radial.length_law(n)
        ks_exact = stats.ks_discrete(
            (np.arange(n + 1) - 0.5 * n) / math.sqrt(0.75 * n),
            exact_law, stats.normal_cdf,
        )
        fits["ks_exact_law_vs_normal"] = ks_exact
        _check(checks, "sigma2",
               tol["sigma2_window"][0] <= sigma2 <= tol["sigma2_window"][1],
               f"sigma2 {sigma2:.4f} in {tol['sigma2_window']}")
        _check(checks, "ks_normal", ks_known <= tol["ks_max"],
               f"KS {ks_known:.4f} <= {tol['ks_max']}")
    return _finish(cfg, statistics, fits, checks)


# ---------------------------------------------------------------------------
# translation length


def _tau_and_depth(words, lengths):
    """Cyclically reduced length and conjugator depth per row of a code matrix."""
    n = words.shape[0]
    taus = np.empty(n, dtype=np.int64)
    depths = np.empty(n, dtype=np.int64)
    for r in range(n):
        w = words[r, : lengths[r]]
        i, j = 0, int(lengths[r]) - 1
        while i < j and w[i] == w[j] ^ 1:
            i += 1
            j -= 1
        taus[r] = max(j - i + 1, 0)
        depths[r] = i
    return taus, depths


def translation_length_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    ctx = Context(cfg)
    if not isinstance(ctx.entry, FreeGroup):
        raise ExperimentError("translation-length experiment runs on Cayley trees")
    o = ctx.start_element()
    n = max(cfg.n_grid)
    snaps, _ = ctx.walk(o, n, word_steps=[n])
    snap = snaps[n]
    taus, depths = _tau_and_depth(snap.words, snap.lengths)
    lengths = snap.lengths
    checks: list = []
    tol = merged_tolerances(cfg.kind, cfg.tolerances)
    if tol.get("tau_cut") is None:
        tol["tau_cut"] = n // 4
    frac_fast = float(np.mean(taus > tol["tau_cut"]))
    frac_lox = float(np.mean(taus >= 1))
    # tau == |w| - 2 * (basepoint, w^2)_{w} holds with equality on a tree
    pointwise_ok = int(np.count_nonzero(taus >= lengths - 2 * depths))
    exact_eq = int(np.count_nonzero(taus == lengths - 2 * depths))
    _check(checks, "tau_fraction",
           frac_fast >= tol["generic_fraction"],
           f"P[tau > {tol['tau_cut']}] = {frac_fast:.05f} >= {tol['generic_fraction']}")
    _check(checks, "loxodromic_fraction",
           frac_lox >= tol["generic_fraction"],
           f"P[tau >= 1] = {frac_lox:.5f}")
    _check(checks, "length_bound", bool(np.all(taus <= lengths)),
           "tau(w) <= |w| on every sample")
    _check(checks, "gromov_inequality_pointwise",
           pointwise_ok == cfg.trajectories,
           f"tau >= |w| - 2 (x0, w^2)_w on {pointwise_ok}/{cfg.trajectories} "
           f"(equality on {exact_eq}; slack 0 expected on a tree)")
    statistics = {
        "n": n,
        "tau_mean_per_step": float(taus.mean()) / n,
        "fraction_tau_above_cut": frac_fast,
        "fraction_loxodromic": frac_lox,
        "conjugator_depth_mean": float(depths.mean()),
    }
    return _finish(cfg, statistics, {}, checks)


# ---------------------------------------------------------------------------
# deviation from geodesics


def _deviations(words_k, len_k, words_n, len_n):
    d_kn = tree_distances(words_k, len_k, words_n, len_n)
    dev2 = len_k + d_kn - len_n
    return dev2 // 2


def deviation_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    ctx = Context(cfg)
    if not isinstance(ctx.entry, FreeGroup):
        raise ExperimentError("deviation experiment runs on Cayley trees")
    o = ctx.entry.identity()
    n = max(cfg.n_grid)
    k = int(cfg.params.get("k", n // 2))
    l_max = int(cfg.params.get("l_max", 12))
    snaps, _ = ctx.walk(o, n, word_steps=[k, n])
    wk, wn = snaps[k], snaps[n]
    devs = _deviations(wk.words, wk.lengths, wn.words, wn.lengths)
    levels = list(range(0, l_max + 1))
    hits, probs = stats.empirical_ccdf(devs, levels)
    tol = merged_tolerances(cfg.kind, cfg.tolerances)
    fit = stats.tail_fit(levels, hits, cfg.trajectories,
                         window=tuple(tol["fit_window"]))
    checks: list = []
    _check(checks, "tail_monotone",
           all(probs[i] >= probs[i + 1] for i in range(len(probs) - 1)),
           "ccdf non-increasing in the level")
    _check(checks, "fit_ok", fit.ok, fit.reason or "tail fit available")
    if fit.ok:
        _check(checks, "fit_residual", fit.residual_rms <= tol["residual_max"],
               f"residual {fit.residual_rms:.4f} <= {tol['residual_max']}")
        _check(checks, "per_step_ratio",
               tol["ratio_window"][0] <= fit.ratio <= tol["ratio_window"][1],
               f"ratio {fit.ratio:.4f} in {tol['ratio_window']}")
    statistics = {
        "n": n, "k": k,
        "deviation_mean": float(devs.mean()),
        "tail": {"levels": levels, "hits": hits, "probs": probs},
    }
    fits = {"tail": fit.to_json_dict()}

    if cfg.params.get("compare_pushforward", False):
        swap = suffix_swap(ctx.entry)
        pk_words, pk_len = swap.transform_codes(wk.words, wk.lengths)
        pn_words, pn_len = swap.transform_codes(wn.words, wn.lengths)
        push_devs = _deviations(pk_words, pk_len, pn_words, pn_len)
        push_hits, push_probs = stats.empirical_ccdf(push_devs, levels)
        push_fit = stats.tail_fit(levels, push_hits, cfg.trajectories,
                                  window=tuple(tol["fit_window"]))
        gap = np.abs(push_devs - devs)
        _check(checks, "push_coupling_pathwise", bool(np.max(gap) <= 2),
               f"per-sample |dev_push - dev| max {int(np.max(gap))} <= 2 "
               "(suffix swap moves both endpoints by at most one)")
        mean_gap = abs(float(push_devs.mean()) - float(devs.mean()))
        _check(checks, "push_mean_gap", mean_gap <= tol["push_mean_gap"],
               f"|mean dev difference| = {mean_gap:.4f} <= {tol['push_mean_gap']}")
        if push_fit.ok:
            _check(checks, "push_ratio",
                   tol["ratio_window"][0] <= push_fit.ratio <= tol["ratio_window"][1],
                   f"pushforward ratio {push_fit.ratio:.4f}")
        statistics["pushforward"] = {
            "deviation_mean": float(push_devs.mean()),
            "tail": {"levels": levels, "hits": push_hits, "probs": push_probs},
            "max_pathwise_gap": int(np.max(gap)),
        }
        fits["pushforward_tail"] = push_fit.to_json_dict()
    return _finish(cfg, statistics, fits, checks)


# ---------------------------------------------------------------------------
# Gromov product tails


def gromov_tail_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    ctx = Context(cfg)
    if not isinstance(ctx.entry, FreeGroup):
        raise ExperimentError("gromov tail experiment runs on Cayley trees")
    o = ctx.entry.identity()
    n = max(cfg.n_grid)
    snaps, _ = ctx.walk(o, n, word_steps=[n])
    snap = snaps[n]
    taus, depths = _tau_and_depth(snap.words, snap.lengths)
    eps_grid = cfg.params.get("eps_grid", [0.02, 0.05, 0.1, 0.2])
    tol = merged_tolerances(cfg.kind, cfg.tolerances)
    tail = {}
    for eps in eps_grid:
        tail[str(eps)] = float(np.mean(depths >= eps * n))
    levels = list(range(0, int(cfg.params.get("l_max", 14)) + 1))
    hits, probs = stats.empirical_ccdf(depths, levels)
    fit = stats.tail_fit(levels, hits, cfg.trajectories)
    checks: list = []
    ref = tail[str(tol["eps_ref"])] if str(tol["eps_ref"]) in tail else None
    if ref is not None:
        _check(checks, "tail_at_reference_eps", ref <= tol["prob_max"],
               f"P[(x0,w^2)_w >= {tol['eps_ref']} n] = {ref:.5f} <= {tol['prob_max']}")
    _check(checks, "pointwise_consistency",
           bool(np.all(taus >= snap.lengths - 2 * depths)),
           "tau(w) >= |w| - 2 (x0, w^2)_w pointwise (zero slack on a tree)")
    statistics = {
        "n": n,
        "tails_at_eps": tail,
        "depth_tail": {"levels": levels, "hits": hits, "probs": probs},
        "depth_mean": float(depths.mean()),
    }
    return _finish(cfg, statistics, {"depth_tail": fit.to_json_dict()}, checks)


# ---------------------------------------------------------------------------
# subword occurrence


class _PeriodicPattern:
    """Precomputed KMP tables for matching suffixes against one rotation of
    the periodic axis word; match states live on a per-path stack so they
    survive the walk's backtracking."""

    def __init__(self, pattern_codes, horizon):
        reps = max(2, horizon // max(len(pattern_codes), 1) + 2)
        self.pat = (list(pattern_codes) * reps)[: horizon + len(pattern_codes)]
        self.fail = _kmp_failure(self.pat)


class _PeriodicMatcher:
    def __init__(self, pattern: _PeriodicPattern):
        self.pat = pattern.pat
        self.fail = pattern.fail
        self.stack = [0]

    def push(self, code):
        state = self.stack[-1]
        while state and (state >= len(self.pat) or self.pat[state] != code):
            state = self.fail[state - 1]
        if state < len(self.pat) and self.pat[state] == code:
            state += 1
        self.stack.append(state)
        return state

    def pop(self):
        self.stack.pop()


def _kmp_failure(pat):
    fail = [0] * len(pat)
    k = 0
    for i in range(1, len(pat)):
        while k and pat[i] != pat[k]:
            k = fail[k - 1]
        if pat[i] == pat[k]:
            k += 1
        fail[i] = k
    return fail


def subword_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Occurrence of a fixed relative subword and of logarithmic projections.

    Tracks, per trajectory, (a) whether w_i^-1 w_j = y for some i, j <= n via
    a trie over the visited subtree, and (b) the largest projection gap onto
    any germ-axis translate created by step m <= n, which equals the largest
    factor of the word matching the periodic axis label word.
    """
    ctx = Context(cfg)
    if not isinstance(ctx.entry, FreeGroup):
        raise ExperimentError("subword experiment runs on Cayley trees")
    y = ctx.entry.from_string(cfg.params.get("y", "ab"))
    if y.is_identity():
        raise ExperimentError("y = identity occurs trivially at i = j")
    n = max(cfg.n_grid)
    o = ctx.entry.identity()
    sys = ctx.system
    core = sys.axis0.core.letters
    y_codes = [letter_code(v) for v in y.letters]
    y_inv_codes = [letter_code(v) for v in y.inverse().letters]

    model = ctx.kernel.letter_model()
    if model is None:
        raise ExperimentError("subword experiment needs a letter-model kernel")
    same = np.array_equal(model.cum_even, model.cum_odd)

    eta_hat = float(cfg.params.get("eta_hat", 0.4))
    run_target = max(1, math.ceil(eta_hat * math.log(max(n, 2))))
    found = 0
    first_hits = []
    best_runs = np.zeros(cfg.trajectories, dtype=np.int64)
    core_codes = [letter_code(v) for v in core]
    inv_codes = [c ^ 1 for c in reversed(core_codes)]
    rotations = [core_codes[r:] + core_codes[:r] for r in range(len(core_codes))]
    rotations += [inv_codes[r:] + inv_codes[:r] for r in range(len(inv_codes))]
    patterns = [_PeriodicPattern(rot, n + 4) for rot in rotations]

    for i in range(cfg.trajectories):
        rng = substream(cfg.master_seed, ctx.exp_key, i)
        us = rng.random(n)
        hit_step = _trie_walk(
            us, model, same, y_codes, y_inv_codes, patterns, n, best_runs, i
        )
        if hit_step >= 0:
            found += 1
            first_hits.append(hit_step)
    prob = found / cfg.trajectories
    run_prob = float(np.mean(best_runs >= run_target))
    eta_emp = float(np.median(best_runs)) / math.log(max(n, 2))
    tol = merged_tolerances(cfg.kind, cfg.tolerances)
    checks: list = []
    _check(checks, "occurrence_probability", prob >= tol["occurrence_min"],
           f"P[y occurs] = {prob:.4f} >= {tol['occurrence_min']}")
    _check(checks, "projection_growth", None,
           f"P[max run >= {run_target} = ceil(eta_hat log n)] = {run_prob:.4f}",
           informational=True)
    statistics = {
        "n": n, "y": y.to_string(),
        "occurrence_probability": prob,
        "first_hit_median": float(np.median(first_hits)) if first_hits else None,
        "projection_run_target": run_target,
        "projection_run_probability": run_prob,
        "eta_hat_config": eta_hat,
        "eta_hat_empirical": eta_emp,
    }
    return _finish(cfg, statistics, {}, checks)


def _trie_walk(us, model, same, y_codes, y_inv_codes, patterns, n, best_runs, row):
    """Scalar walk maintaining a trie of visited vertices and periodic-match
    stacks; returns the first step at which v and v*y are both visited."""
    cum_e, cum_o = model.cum_even, model.cum_odd
    root: dict = {"_visited": True}
    node = root
    parents = []  # stack of (parent, code taken)
    matchers = [_PeriodicMatcher(p) for p in patterns]
    best = 0
    hit = -1
    length = 0
    for t in range(n):
        cum = cum_e if (same or length % 2 == 0) else cum_o
        code = int(np.searchsorted(cum, us[t], side="right"))
        code = min(code, len(cum) - 1)
        if parents and parents[-1][1] == code ^ 1:
            # backtrack one edge
            node = parents.pop()[0]
            length -= 1
            for m in matchers:
                m.pop()
        else:
            parents.append((node, code))
            child = node.get(code)
            if child is None:
                child = {}
                node[code] = child
            node = child
            length += 1
            for m in matchers:
                best = max(best, m.push(code))
        if hit < 0 and not node.get("_visited", False):
            node["_visited"] = True
            if _trie_probe(node, parents, y_codes) or _trie_probe(
                node, parents, y_inv_codes
            ):
                hit = t + 1
    best_runs[row] = best
    return hit


def _trie_probe(node, parents, rel_codes):
    """Walk the trie from ``node`` along a reduced relative word.

    Up-moves follow the walk's parent stack, down-moves a local stack; if the
    target vertex is visited, every vertex on the way exists in the trie (a
    walk between two visited vertices of a tree covers the geodesic)."""
    cur = node
    up = len(parents)
    local = []
    for code in rel_codes:
        if local:
            pnode, pcode = local[-1]
            if pcode == code ^ 1:
                local.pop()
                cur = pnode
                continue
        elif up and parents[up - 1][1] == code ^ 1:
            up -= 1
            cur = parents[up][0]
            continue
        nxt = cur.get(code)
        if not isinstance(nxt, dict):
            return False
        local.append((cur, code))
        cur = nxt
    return cur.get("_visited", False)


# ---------------------------------------------------------------------------
# backtracking of distance-formula sums


def backtracking_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    ctx = Context(cfg)
    if not isinstance(ctx.entry, FreeGroup):
        raise ExperimentError("vectorized backtracking runs on Cayley trees; "
                              "Bass-Serre configs use the verification suite")
    sys = ctx.system
    o = ctx.entry.from_string(cfg.params.get("o", "1"))
    p = ctx.entry.from_string(cfg.params.get("p", "a5b5a5"))
    n = max(cfg.n_grid)
    chain = sys.large_projections(o, p)
    t_grid = list(range(0, int(cfg.params.get("t_max", 24)) + 1, 2))
    checks: list = []
    statistics = {
        "o": o.to_string(), "p": p.to_string(), "n": n,
        "chain": chain.to_json_dict(),
    }
    fits: dict = {}
    tol = merged_tolerances(cfg.kind, cfg.tolerances)
    if not chain.markings:
        statistics["tail"] = {"levels": t_grid,
                              "probs": [1.0] + [0.0] * (len(t_grid) - 1)}
        _check(checks, "empty_chain", True, "no cosets above threshold; sums are 0")
        return _finish(cfg, statistics, fits, checks)

    patterns = []
    refs = []
    horizon = n + p.length + 6
    for m in chain.markings:
        j0 = sys.projection_index(m, ctx.entry.identity())
        plus = m.axis.vertex(j0 + horizon).rep.letters
        minus = m.axis.vertex(j0 - horizon).rep.letters
        split = m.axis.vertex(j0).rep.length
        patterns.append(
            (np.array([letter_code(v) for v in plus], dtype=np.int8),
             np.array([letter_code(v) for v in minus], dtype=np.int8),
             split)
        )
        refs.append(sys.projection_index(m, p) - j0)

    def factory(lo, hi):
        return AxisOffsetTracker(patterns, refs, lo, hi)

    _, observed = ctx.walk(p, n, observer_factory=factory)
    max_sum = observed["max_sum"]
    hits, probs = stats.empirical_ccdf(max_sum, t_grid)
    fit = stats.tail_fit(t_grid, hits, cfg.trajectories)
    _check(checks, "tail_monotone",
           all(probs[i] >= probs[i + 1] for i in range(len(probs) - 1)),
           "running-max ccdf is non-increasing")
    at20 = float(np.mean(max_sum >= 20))
    _check(checks, "prob_at_20", at20 <= tol["prob_at_20"],
           f"P[max sum >= 20] = {at20:.5f} <= {tol['prob_at_20']}")
    if fit.ok:
        _check(checks, "positive_decay", fit.rate > 0,
               f"fitted decay rate {fit.rate:.4f} > 0")
    statistics["tail"] = {"levels": t_grid, "hits": hits, "probs": probs}
    statistics["max_sum_mean"] = float(np.mean(max_sum))
    fits["tail"] = fit.to_json_dict()
    return _finish(cfg, statistics, fits, checks)


# ---------------------------------------------------------------------------
# moment contraction grid


def moment_contraction_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    ctx = Context(cfg)
    if not isinstance(ctx.entry, FreeGroup):
        raise ExperimentError("moment contraction experiment runs on Cayley trees")
    sys = ctx.system
    rng = np.random.default_rng(
        np.random.SeedSequence([cfg.master_seed, ctx.exp_key, 0xA])
    )
    pair_count = int(cfg.params.get("pairs", 20))
    lam_grid = list(cfg.params.get("lambda_grid", [0.05, 0.1, 0.2, 0.4]))
    m_grid = sorted(cfg.params.get("m_grid", [25, 50, 100, 200]))
    samples = int(cfg.params.get("samples", 400))
    eps_min = float(cfg.params.get("eps_min", 0.05))
    pairs = []
    for _ in range(pair_count):
        o = random_element(ctx.entry, rng, 8)
        p = o * random_element(ctx.entry, rng, 20)
        pairs.append((o, p))

    estimates = np.zeros((len(lam_grid), len(m_grid)))
    for pi, (o, p) in enumerate(pairs):
        s0 = sys.projection_sum_endpoints(o, p)
        sums = np.zeros((len(m_grid), samples), dtype=np.int64)
        o_inv = o.inverse()
        for si in range(samples):
            path = sample_path(
                ctx.kernel, p, m_grid[-1],
                (cfg.master_seed, ctx.exp_key, pi * samples + si + 1),
            )
            for mi, m in enumerate(m_grid):
                sums[mi, si] = sys.projection_sum_endpoints(o, path[m])
        for li, lam in enumerate(lam_grid):
            for mi in range(len(m_grid)):
                vals = np.exp(lam * (s0 - sums[mi]))
                estimates[li, mi] = max(estimates[li, mi], float(vals.mean()))

    region = [
        {"lambda": lam_grid[li], "m": m_grid[mi],
         "max_estimate": estimates[li, mi]}
        for li in range(len(lam_grid))
        for mi in range(len(m_grid))
        if estimates[li, mi] <= 1.0 - eps_min
    ]
    checks: list = []
    _check(checks, "region_nonempty", len(region) > 0,
           f"(lambda, m) region with max estimate <= {1 - eps_min}: "
           f"{len(region)} grid points",
           informational=not cfg.params.get("require_region", True))
    small_lam = estimates[0]
    _check(checks, "trend_in_m", None,
           f"estimates at lambda={lam_grid[0]}: "
           + ", ".join(f"m={m}: {v:.4f}" for m, v in zip(m_grid, small_lam)),
           informational=True)
    statistics = {
        "pairs": [[o.to_string(), p.to_string()] for o, p in pairs],
        "lambda_grid": lam_grid,
        "m_grid": m_grid,
        "max_estimates": [[float(v) for v in row] for row in estimates],
        "region": region,
        "eps_min": eps_min,
        "best_epsilon": float(1.0 - estimates.min()),
    }
    return _finish(cfg, statistics, {}, checks)


# ---------------------------------------------------------------------------
# registry


EXPERIMENTS = {
    "linear_progress": linear_progress_experiment,
    "clt": clt_experiment,
    "translation_length": translation_length_experiment,
    "deviation": deviation_experiment,
    "gromov_tail": gromov_tail_experiment,
    "subword": subword_experiment,
    "backtracking": backtracking_experiment,
    "moment_contraction": moment_contraction_experiment,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    if cfg.kind not in EXPERIMENTS:
        raise ExperimentError(f"unknown experiment kind {cfg.kind!r}")
    return EXPERIMENTS[cfg.kind](cfg)
