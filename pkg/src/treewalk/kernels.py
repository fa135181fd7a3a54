"""Transition kernels on catalog groups and their certification.

Kernels are pure functions ``state -> finite distribution over targets`` plus
a structured descriptor; the state space is the whole (infinite) group, so no
matrix representation exists.  The module provides simple random walks,
exotic position-dependent chains, push-forwards through bijections of the
group, exact n-step laws by sparse forward convolution, and a tameness probe
reporting bounded jumps, irreducibility constants and the max-atom decay fit.

Descriptors double as a persistence format, e.g. ``srw:uniform``,
``parity:0.4,0.2,0.2,0.2|0.1,0.3,0.3,0.3``,
``pushforward:suffix_swap:srw:uniform`` and
``pushforward:depth_relabel:7:srw:uniform``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .groups import FreeGroup, FreeWord, GroupError


class KernelError(ValueError):
    """Raised on invalid measures, profiles, or descriptor strings."""


# ---------------------------------------------------------------------------
# letter models (vectorizable description for free-group kernels)


@dataclass(frozen=True)
class LetterModel:
    """A free-group kernel that appends one letter per step, with letter
    probabilities depending only on the parity of the current word length,
    optionally composed with an output bijection applied to snapshots."""

    rank: int
    cum_even: np.ndarray
    cum_odd: np.ndarray
    transform: Optional["QiBijection"] = None


def letter_code(letter: int) -> int:
    """Signed letter to code: a=0, a^-1=1, b=2, b^-1=3, ...; inverse is ^1."""
    return 2 * (abs(letter) - 1) + (0 if letter > 0 else 1)


def code_letter(code: int) -> int:
    i = code // 2 + 1
    return i if code % 2 == 0 else -i


# ---------------------------------------------------------------------------
# transition kernels


class TransitionKernel:
    """Base interface; subclasses are immutable and safe to share."""

    entry = None
    descriptor = ""
    jump_bound = 0
    irreducibility_note = "sampled"

    def support(self, g):
        """Ordered list of (target, probability); probabilities sum to 1."""
        raise NotImplementedError

    def letter_model(self) -> Optional[LetterModel]:
        return None


class SRWKernel(TransitionKernel):
    """Random walk: p(g, h) = mu(g^-1 h) for a finite driving measure mu."""

    def __init__(self, entry, measure: dict, check_support: bool = True):
        total = sum(measure.values())
        if abs(total - 1.0) > 1e-12:
            raise KernelError(f"driving measure sums to {total}, not 1")
        if any(p <= 0 for p in measure.values()):
            raise KernelError("driving measure must be strictly positive")
        for s in measure:
            if s.entry != entry:
                raise KernelError("measure supported outside the group")
        if check_support:
            _check_semigroup_support(entry, list(measure))
        self.entry = entry
        self.steps = tuple(sorted(measure.items(), key=lambda kv: kv[0].sort_key()))
        self.jump_bound = max(s.length for s, _ in self.steps)
        self.descriptor = "srw:custom"
        self.irreducibility_note = (
            "structural: driving measure support generates the semigroup"
            if check_support
            else "sampled"
        )

    def support(self, g):
        return [(g * s, p) for s, p in self.steps]

    def letter_model(self):
        if not isinstance(self.entry, FreeGroup):
            return None
        if any(s.length != 1 for s, _ in self.steps):
            return None
        probs = np.zeros(2 * self.entry.rank)
        for s, p in self.steps:
            probs[letter_code(s.letters[0])] = p
        cum = np.cumsum(probs)
        return LetterModel(self.entry.rank, cum, cum)


def srw_kernel(entry, measure=None, check_support: bool = True) -> SRWKernel:
    """Simple random walk; default measure is uniform on the generators and
    their inverses."""
    if measure is None:
        gens = []
        for name in entry.generator_names:
            gens.append(entry.from_string(name))
        measure = {g: 1.0 / len(gens) for g in gens}
        kernel = SRWKernel(entry, measure, check_support=check_support)
        kernel.descriptor = "srw:uniform"
        return kernel
    return SRWKernel(entry, measure, check_support=check_support)


def _check_semigroup_support(entry, support, rounds: int = 8, cap: int = 200_000):
    """Verify that iterated support products reach the ball of radius 2."""
    target = set(entry.ball(2))
    reached = {entry.identity()}
    frontier = [entry.identity()]
    for _ in range(rounds):
        if target <= reached:
            return
        nxt = []
        for g in frontier:
            for s in support:
                h = g * s
                if h not in reached:
                    reached.add(h)
                    nxt.append(h)
                    if len(reached) > cap:
                        raise KernelError("semigroup probe exceeded cap")
        frontier = nxt
    if not target <= reached:
        missing = next(iter(target - reached))
        raise KernelError(
            f"support fails the semigroup probe: {missing.to_string()} unreached"
        )


class ParityKernel(TransitionKernel):
    """Position-dependent chain on F2: the letter distribution over
    (a, a^-1, b, b^-1) switches between two profiles by the parity of |g|.

    All profile entries are multiples of 1/10 in [1/10, 9/10], so every
    transition probability is bounded below by 1/10 everywhere.
    """

    irreducibility_note = "structural: all neighbor probabilities >= 1/10"

    def __init__(self, entry, even_profile, odd_profile):
        if not isinstance(entry, FreeGroup) or entry.rank != 2:
            raise KernelError("parity kernel is defined on free:2")
        self.entry = entry
        self.even = _check_profile(even_profile)
        self.odd = _check_profile(odd_profile)
        self.jump_bound = 1
        self.descriptor = (
            "parity:" + ",".join(f"{p:g}" for p in self.even)
            + "|" + ",".join(f"{p:g}" for p in self.odd)
        )
        self._letters = [
            FreeWord(entry, (code_letter(c),)) for c in range(4)
        ]

    def support(self, g):
        profile = self.even if g.length % 2 == 0 else self.odd
        return [(g * s, p) for s, p in zip(self._letters, profile)]

    def letter_model(self):
        return LetterModel(
            2, np.cumsum(self.even), np.cumsum(self.odd)
        )


def _check_profile(profile):
    probs = tuple(float(p) for p in profile)
    if len(probs) != 4:
        raise KernelError("profile needs 4 probabilities over (a, a^-1, b, b^-1)")
    for p in probs:
        if not (0.1 - 1e-9 <= p <= 0.9 + 1e-9):
            raise KernelError(f"profile entry {p} outside [1/10, 9/10]")
        if abs(p * 10 - round(p * 10)) > 1e-9:
            raise KernelError(f"profile entry {p} is not a multiple of 1/10")
    if abs(sum(probs) - 1.0) > 1e-12:
        raise KernelError("profile does not sum to 1")
    return probs


def parity_kernel(entry, even_profile, odd_profile) -> ParityKernel:
    return ParityKernel(entry, even_profile, odd_profile)


class DeterministicKernel(TransitionKernel):
    """Always steps by one fixed generator; degenerate control for the CLT
    experiment (violates irreducibility on purpose)."""

    irreducibility_note = "structural: reducible by construction"

    def __init__(self, entry, letter_name: str):
        self.entry = entry
        self.step = entry.from_string(letter_name)
        if self.step.length != 1:
            raise KernelError("deterministic kernel needs a single letter")
        self.jump_bound = 1
        self.descriptor = f"deterministic:{letter_name}"

    def support(self, g):
        return [(g * self.step, 1.0)]

    def letter_model(self):
        if not isinstance(self.entry, FreeGroup):
            return None
        probs = np.zeros(2 * self.entry.rank)
        probs[letter_code(self.step.letters[0])] = 1.0
        cum = np.cumsum(probs)
        return LetterModel(self.entry.rank, cum, cum)


# ---------------------------------------------------------------------------
# bijective quasi-isometries of the group


class QiBijection:
    """Bijection of a group with controlled metric distortion."""

    descriptor = ""
    displacement: Optional[int] = None  # max d(x, f(x)) when finite
    is_isometry = False

    def forward(self, x):
        raise NotImplementedError

    def inverse(self, x):
        raise NotImplementedError

    def transform_codes(self, words: np.ndarray, lengths: np.ndarray):
        """Vectorized action on code arrays; None if unsupported."""
        return None


class SuffixSwap(QiBijection):
    """Involution of a free group: words ending in the letter b gain a
    trailing a, words ending in the suffix b a lose it, all others are fixed.
    Displacement exactly 1; not a group homomorphism."""

    displacement = 1
    is_isometry = False
    descriptor = "suffix_swap"

    def __init__(self, entry):
        if not isinstance(entry, FreeGroup):
            raise KernelError("suffix swap is defined on free groups")
        self.entry = entry

    def forward(self, x):
        w = x.letters
        if w and w[-1] == 2:
            return FreeWord(self.entry, w + (1,))
        if len(w) >= 2 and w[-1] == 1 and w[-2] == 2:
            return FreeWord(self.entry, w[:-1])
        return x

    inverse = forward  # involution

    def transform_codes(self, words, lengths):
        words = words.copy()
        lengths = lengths.copy()
        rows = np.arange(words.shape[0])
        last = np.where(lengths > 0, words[rows, np.maximum(lengths - 1, 0)], -1)
        second = np.where(lengths > 1, words[rows, np.maximum(lengths - 2, 0)], -1)
        grow = last == letter_code(2)
        shrink = (last == letter_code(1)) & (second == letter_code(2))
        words[rows[grow], lengths[grow]] = letter_code(1)
        lengths[grow] += 1
        lengths[shrink] -= 1
        return words, lengths


class DepthRelabel(QiBijection):
    """Basepoint-fixing automorphism of the Cayley tree that is not a group
    map: letters are relabeled by one of two permutations chosen by position
    parity.  The odd-position permutation is the even one conjugated by
    inversion, which keeps images reduced; distances are exactly preserved.
    """

    displacement = None  # unbounded, but an exact isometry
    is_isometry = True

    def __init__(self, entry, rule_seed: int = 0, table=None):
        if not isinstance(entry, FreeGroup):
            raise KernelError("depth relabel is defined on free groups")
        self.entry = entry
        k2 = 2 * entry.rank
        if table is None:
            rng = np.random.default_rng(np.random.SeedSequence([rule_seed]))
            table = [int(v) for v in rng.permutation(k2)]
        if sorted(table) != list(range(k2)):
            raise KernelError("relabel table is not a permutation of the codes")
        self.descriptor = f"depth_relabel:{rule_seed}"
        even = np.array(table, dtype=np.int8)
        odd = np.empty_like(even)
        for c in range(k2):
            odd[c] = even[c ^ 1] ^ 1
        self._tables = np.stack([even, odd])
        inv_even = np.empty_like(even)
        inv_odd = np.empty_like(odd)
        inv_even[even] = np.arange(k2, dtype=np.int8)
        inv_odd[odd] = np.arange(k2, dtype=np.int8)
        self._inv_tables = np.stack([inv_even, inv_odd])

    def _apply(self, x, tables):
        out = tuple(
            code_letter(int(tables[i % 2][letter_code(v)]))
            for i, v in enumerate(x.letters)
        )
        return FreeWord(self.entry, out)

    def forward(self, x):
        return self._apply(x, self._tables)

    def inverse(self, x):
        return self._apply(x, self._inv_tables)

    def transform_codes(self, words, lengths):
        parities = (np.arange(words.shape[1]) % 2)[None, :]
        out = self._tables[parities, words]
        return out.astype(np.int8), lengths.copy()


def suffix_swap(entry) -> SuffixSwap:
    return SuffixSwap(entry)


def depth_relabel(entry, rule_seed: int = 0, table=None) -> DepthRelabel:
    return DepthRelabel(entry, rule_seed, table)


class PushforwardKernel(TransitionKernel):
    """p(g, h) = p_base(f^-1(g), f^-1(h)) for a bijection f of the group."""

    def __init__(self, f: QiBijection, base: TransitionKernel):
        if f.entry != base.entry:
            raise KernelError("bijection and base kernel on different entries")
        self.entry = base.entry
        self.mapping = f
        self.base = base
        if f.is_isometry:
            self.jump_bound = base.jump_bound
        elif f.displacement is not None:
            self.jump_bound = base.jump_bound + 2 * f.displacement
        else:
            raise KernelError("pushforward needs an isometry or bounded displacement")
        self.descriptor = f"pushforward:{f.descriptor}:{base.descriptor}"
        self.irreducibility_note = "sampled"

    def support(self, g):
        z = self.mapping.inverse(g)
        return [(self.mapping.forward(t), p) for t, p in self.base.support(z)]

    def letter_model(self):
        base_model = self.base.letter_model()
        if base_model is None or base_model.transform is not None:
            return None
        return LetterModel(
            base_model.rank, base_model.cum_even, base_model.cum_odd, self.mapping
        )


def pushforward_kernel(f: QiBijection, base: TransitionKernel) -> PushforwardKernel:
    return PushforwardKernel(f, base)


class IdentityBijection(QiBijection):
    descriptor = "identity"
    displacement = 0
    is_isometry = True

    def __init__(self, entry):
        self.entry = entry

    def forward(self, x):
        return x

    inverse = forward

    def transform_codes(self, words, lengths):
        return words, lengths


# ---------------------------------------------------------------------------
# exact laws


def exact_distribution(kernel: TransitionKernel, o, n: int, cap: int = 10) -> dict:
    """Exact n-step law from o by sparse forward convolution."""
    return exact_distributions(kernel, o, n, cap)[-1]


def exact_distributions(kernel: TransitionKernel, o, n: int, cap: int = 10) -> list:
    """Laws at steps 0..n (one forward pass)."""
    if n > cap:
        raise KernelError(f"exact law cap exceeded: {n} > {cap}")
    law = {o: 1.0}
    out = [law]
    for _ in range(n):
        nxt: dict = {}
        for g, p in law.items():
            for h, q in kernel.support(g):
                nxt[h] = nxt.get(h, 0.0) + p * q
        law = nxt
        out.append(law)
    total = sum(law.values())
    if abs(total - 1.0) > 1e-9:
        raise KernelError(f"probability leak in forward convolution: {total}")
    return out


# ---------------------------------------------------------------------------
# tameness certification


@dataclass
class TamenessReport:
    descriptor: str
    jump_bound: int
    irreducibility: dict
    irreducibility_note: str
    atom_fit: dict
    verdict: str
    failures: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "descriptor": self.descriptor,
            "jump_bound": self.jump_bound,
            "irreducibility": {
                s: {"epsilon": e, "steps": k} for s, (e, k) in self.irreducibility.items()
            },
            "irreducibility_note": self.irreducibility_note,
            "atom_fit": self.atom_fit,
            "verdict": self.verdict,
            "failures": list(self.failures),
        }


def tameness_probe(kernel: TransitionKernel, basepoints=None,
                   irreducibility_steps: int = 6, atom_steps: int = 10,
                   seed: int = 0) -> TamenessReport:
    """Certify the three tameness clauses at desk scale.

    Bounded jumps are scanned over sampled states; irreducibility constants
    (eps_s, K_s) per generator come from exact small-step laws at sampled
    basepoints; the non-amenability clause is a least-squares fit of the exact
    max-atom sequence to A * rho^n, reported together with a late-window ratio
    estimate (the plain fit is biased upward in decay by the polynomial
    correction at small n, so the verdict only requires rho < 1).
    """
    entry = kernel.entry
    from .groups import random_element

    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    if basepoints is None:
        basepoints = [entry.identity()]
        basepoints += [entry.from_string(n) for n in entry.generator_names[:4]]
        basepoints += [random_element(entry, rng, 6) for _ in range(3)]

    failures = []

    # bounded jumps, rescanned over the sampled states
    jump = 0
    for g in basepoints:
        total = 0.0
        for h, p in kernel.support(g):
            jump = max(jump, (g.inverse() * h).length)
            total += p
        if abs(total - 1.0) > 1e-12:
            failures.append(f"probabilities at {g.to_string()} sum to {total}")
    if jump > kernel.jump_bound:
        failures.append(
            f"observed jump {jump} exceeds declared bound {kernel.jump_bound}"
        )

    # irreducibility per generator over the basepoint sample
    irreducibility = {}
    gen_names = list(entry.generator_names)
    laws_by_base = {
        g: exact_distributions(kernel, g, irreducibility_steps,
                               cap=irreducibility_steps)
        for g in basepoints
    }
    for name in gen_names:
        s = entry.from_string(name)
        eps, steps = math.inf, 0
        for g, laws in laws_by_base.items():
            target = g * s
            best_p, best_k = 0.0, 0
            for k in range(1, irreducibility_steps + 1):
                p = laws[k].get(target, 0.0)
                if p > best_p:
                    best_p, best_k = p, k
            if best_p < eps:
                eps, steps = best_p, best_k
        irreducibility[name] = (eps, steps)
        if eps <= 0.0:
            failures.append(f"irreducibility fails for generator {name}")

    # non-amenability: max-atom decay of the exact laws from the identity
    laws = exact_distributions(kernel, entry.identity(), atom_steps, cap=atom_steps)
    atoms = [max(law.values()) for law in laws[1:]]
    ns = np.arange(1, atom_steps + 1, dtype=float)
    logs = np.log(atoms)
    slope, intercept = np.polyfit(ns, logs, 1)
    fitted = slope * ns + intercept
    residual = float(np.sqrt(np.mean((logs - fitted) ** 2)))
    rho = float(np.exp(slope))
    ratio_window = None
    if atom_steps >= 4:
        ratio_window = float(np.sqrt(atoms[-1] / atoms[-3]))
    if rho >= 1.0:
        failures.append(f"max-atom decay fit rho = {rho:.4f} >= 1")
    atom_fit = {
        "amplitude": float(np.exp(intercept)),
        "rho": rho,
        "residual_rms": residual,
        "ratio_estimate": ratio_window,
        "steps": atom_steps,
        "atoms": [float(a) for a in atoms],
    }

    verdict = "tame" if not failures else "not tame"
    return TamenessReport(
        descriptor=kernel.descriptor,
        jump_bound=max(jump, kernel.jump_bound),
        irreducibility=irreducibility,
        irreducibility_note=kernel.irreducibility_note,
        atom_fit=atom_fit,
        verdict=verdict,
        failures=failures,
    )


# ---------------------------------------------------------------------------
# descriptor parsing


def kernel_from_descriptor(entry, descriptor: str) -> TransitionKernel:
    """Build a kernel from its structured name."""
    desc = descriptor.strip()
    if desc == "srw:uniform":
        return srw_kernel(entry)
    if desc.startswith("parity:"):
        body = desc.split(":", 1)[1]
        try:
            even_s, odd_s = body.split("|")
            even = [float(x) for x in even_s.split(",")]
            odd = [float(x) for x in odd_s.split(",")]
        except ValueError as exc:
            raise KernelError(f"bad parity descriptor {descriptor!r}") from exc
        return parity_kernel(entry, even, odd)
    if desc.startswith("deterministic:"):
        return DeterministicKernel(entry, desc.split(":", 1)[1])
    if desc.startswith("pushforward:"):
        rest = desc.split(":", 1)[1]
        if rest.startswith("suffix_swap:"):
            base = kernel_from_descriptor(entry, rest.split(":", 1)[1])
            return pushforward_kernel(suffix_swap(entry), base)
        if rest.startswith("depth_relabel:"):
            _, seed_s, base_desc = rest.split(":", 2)
            base = kernel_from_descriptor(entry, base_desc)
            return pushforward_kernel(depth_relabel(entry, int(seed_s)), base)
        if rest.startswith("identity:"):
            base = kernel_from_descriptor(entry, rest.split(":", 1)[1])
            return pushforward_kernel(IdentityBijection(entry), base)
        raise KernelError(f"unknown pushforward map in {descriptor!r}")
    raise KernelError(f"unknown kernel descriptor {descriptor!r}")
