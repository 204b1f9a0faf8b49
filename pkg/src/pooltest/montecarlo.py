"""Seeded trial harnesses for the decoder and for the exact ensemble formulas.

Every trial derives its own RNG seed from (master seed, trial index), so
results do not depend on execution order and splitting the index range
across workers cannot change any count.  The worker pool honours the
POOLTEST_THREADS environment variable (0 = one worker per CPU); it exists
for the reproducible-splitting contract, not for throughput.
"""

from __future__ import annotations

import hashlib
import math
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

from .ensemble import SystemParams, forward_or, sample_graph
from .errors import ConfigurationError, InputError
from .estimators import (
    ENUMERATION_LIMIT,
    TypicalSetSpec,
    _check_guard,
    estimate_noiseless,
    estimate_noisy,
    typical_weight_set,
)

Z_GATE = 4.0
CONFIDENCE_FACTOR = 1.96  # two-sided 95% normal quantile


def derive_seed(master_seed: int, label: str, index: int) -> int:
    """Stable per-trial seed; independent draws for distinct (label, index)."""
    data = f"{master_seed}:{label}:{index}".encode()
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "big")


def resolve_workers(workers: int | None = None) -> int:
    if workers is None:
        raw = os.environ.get("POOLTEST_THREADS", "").strip()
        workers = int(raw) if raw else 1
    if workers == 0:
        return os.cpu_count() or 1
    if workers < 0:
        raise InputError("worker count must be nonnegative")
    return workers


def _chunk_ranges(trials: int, workers: int) -> list[tuple[int, int]]:
    size = (trials + workers - 1) // workers if workers else trials
    ranges = []
    lo = 0
    while lo < trials:
        hi = min(lo + size, trials)
        ranges.append((lo, hi))
        lo = hi
    return ranges


def _run_chunks(chunk_fn: Callable, trials: int, workers: int | None):
    workers = resolve_workers(workers)
    ranges = _chunk_ranges(trials, workers)
    if len(ranges) <= 1:
        return [chunk_fn(lo, hi) for lo, hi in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda span: chunk_fn(*span), ranges))


@dataclass(frozen=True)
class TrialReport:
    """Outcome counts of a batch of decoding trials.

    error_rate and confidence_halfwidth are None when trials == 0 rather
    than propagating a 0/0.  Errors are split by first cause: the drawn
    input fell outside the typicality window, the drawn noise did, or the
    decision set was not the correct singleton."""

    trials: int
    errors: int
    error_rate: float | None
    confidence_halfwidth: float | None
    master_seed: int
    errors_source_atypical: int
    errors_noise_atypical: int
    errors_ambiguous: int
    config: dict

    def to_json_dict(self) -> dict:
        return {
            "trials": self.trials,
            "errors": self.errors,
            "error_rate": self.error_rate,
            "confidence_halfwidth": self.confidence_halfwidth,
            "master_seed": self.master_seed,
            "errors_source_atypical": self.errors_source_atypical,
            "errors_noise_atypical": self.errors_noise_atypical,
            "errors_ambiguous": self.errors_ambiguous,
            "config": dict(self.config),
        }


def _finish_report(
    trials: int,
    master_seed: int,
    source_atypical: int,
    noise_atypical: int,
    ambiguous: int,
    config: dict,
) -> TrialReport:
    errors = source_atypical + noise_atypical + ambiguous
    if trials > 0:
        rate = errors / trials
        halfwidth = CONFIDENCE_FACTOR * math.sqrt(rate * (1 - rate) / trials)
    else:
        rate = None
        halfwidth = None
    return TrialReport(
        trials=trials,
        errors=errors,
        error_rate=rate,
        confidence_halfwidth=halfwidth,
        master_seed=master_seed,
        errors_source_atypical=source_atypical,
        errors_noise_atypical=noise_atypical,
        errors_ambiguous=ambiguous,
        config=config,
    )


def _check_mode(graph_mode: str) -> None:
    if graph_mode not in ("fixed", "fresh"):
        raise ConfigurationError(f"graph_mode {graph_mode!r} is not 'fixed' or 'fresh'")


def run_noiseless_trials(
    params: SystemParams,
    epsilon: float,
    trials: int,
    master_seed: int,
    graph_mode: str = "fresh",
    enumeration_limit: int = ENUMERATION_LIMIT,
    workers: int | None = None,
) -> TrialReport:
    """Decode `trials` random noiseless observations and count failures."""
    _check_mode(graph_mode)
    if trials < 0:
        raise InputError("trials must be nonnegative")
    _check_guard(params.n, enumeration_limit)
    spec = TypicalSetSpec(params.n, params.p, epsilon)
    x_weights = typical_weight_set(spec)
    fixed = (
        sample_graph(params, derive_seed(master_seed, "fixed-graph", 0))
        if graph_mode == "fixed"
        else None
    )
    n, p = params.n, params.p

    def chunk(lo: int, hi: int) -> tuple[int, int]:
        source_atypical = ambiguous = 0
        for i in range(lo, hi):
            rng = random.Random(derive_seed(master_seed, "trial", i))
            x = tuple(1 if rng.random() < p else 0 for _ in range(n))
            graph = fixed or sample_graph(params, derive_seed(master_seed, "graph", i))
            y = forward_or(graph, x)
            if sum(x) not in x_weights:
                source_atypical += 1
                continue
            est = estimate_noiseless(graph, spec, y, enumeration_limit, cap=2)
            if est.failed or est.value != x:
                ambiguous += 1
        return source_atypical, ambiguous

    parts = _run_chunks(chunk, trials, workers)
    source_atypical = sum(a for a, _ in parts)
    ambiguous = sum(b for _, b in parts)
    config = {
        "mode": "noiseless",
        "l": params.l,
        "r": params.r,
        "n": params.n,
        "p": params.p,
        "epsilon": epsilon,
        "trials": trials,
        "master_seed": master_seed,
        "graph_mode": graph_mode,
        "enumeration_limit": enumeration_limit,
    }
    return _finish_report(trials, master_seed, source_atypical, 0, ambiguous, config)


def run_noisy_trials(
    params: SystemParams,
    epsilon_input: float,
    epsilon_noise: float,
    trials: int,
    master_seed: int,
    graph_mode: str = "fresh",
    enumeration_limit: int = ENUMERATION_LIMIT,
    workers: int | None = None,
) -> TrialReport:
    """Decode `trials` random observations with flipped outcomes and count
    failures.  With q = 0 only the all-zero flip pattern is typical, so the
    run reproduces run_noiseless_trials trial for trial at the same seed."""
    _check_mode(graph_mode)
    if trials < 0:
        raise InputError("trials must be nonnegative")
    _check_guard(params.n, enumeration_limit)
    spec = TypicalSetSpec(params.n, params.p, epsilon_input)
    noise_spec = TypicalSetSpec(params.m, params.q, epsilon_noise)
    x_weights = typical_weight_set(spec)
    e_weights = typical_weight_set(noise_spec)
    fixed = (
        sample_graph(params, derive_seed(master_seed, "fixed-graph", 0))
        if graph_mode == "fixed"
        else None
    )
    n, m, p, q = params.n, params.m, params.p, params.q

    def chunk(lo: int, hi: int) -> tuple[int, int, int]:
        source_atypical = noise_atypical = ambiguous = 0
        for i in range(lo, hi):
            rng = random.Random(derive_seed(master_seed, "trial", i))
            x = tuple(1 if rng.random() < p else 0 for _ in range(n))
            e = tuple(1 if rng.random() < q else 0 for _ in range(m))
            graph = fixed or sample_graph(params, derive_seed(master_seed, "graph", i))
            clean = forward_or(graph, x)
            y = tuple(a ^ b for a, b in zip(clean, e))
            if sum(x) not in x_weights:
                source_atypical += 1
                continue
            if sum(e) not in e_weights:
                noise_atypical += 1
                continue
            est = estimate_noisy(graph, spec, noise_spec, y, enumeration_limit, cap=2)
            if est.failed or est.value != x:
                ambiguous += 1
        return source_atypical, noise_atypical, ambiguous

    parts = _run_chunks(chunk, trials, workers)
    source_atypical = sum(a for a, _, _ in parts)
    noise_atypical = sum(b for _, b, _ in parts)
    ambiguous = sum(c for _, _, c in parts)
    config = {
        "mode": "noisy",
        "l": params.l,
        "r": params.r,
        "n": params.n,
        "p": params.p,
        "q": params.q,
        "epsilon_input": epsilon_input,
        "epsilon_noise": epsilon_noise,
        "trials": trials,
        "master_seed": master_seed,
        "graph_mode": graph_mode,
        "enumeration_limit": enumeration_limit,
    }
    return _finish_report(
        trials, master_seed, source_atypical, noise_atypical, ambiguous, config
    )


# ---------------------------------------------------------------------------
# empirical validation of the exact ensemble formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EventRateCheck:
    """Empirical event frequency against its exact ensemble average, gated at
    |z| <= 4 standard errors."""

    empirical: float
    exact: float
    z_score: float
    passed: bool
    trials: int
    config: dict

    def to_json_dict(self) -> dict:
        return {
            "empirical": self.empirical,
            "exact": self.exact,
            "z_score": self.z_score,
            "pass": self.passed,
            "trials": self.trials,
            "config": dict(self.config),
        }


def _gate(hits: int, trials: int, exact: float, config: dict) -> EventRateCheck:
    empirical = hits / trials
    if 0 < exact < 1:
        z = (empirical - exact) / math.sqrt(exact * (1 - exact) / trials)
        passed = abs(z) <= Z_GATE
    else:
        z = 0.0
        passed = empirical == exact
    return EventRateCheck(empirical, exact, z, passed, trials, config)


def validate_event_probability(
    params: SystemParams,
    w: int,
    s: int,
    trials: int,
    master_seed: int,
    workers: int | None = None,
) -> EventRateCheck:
    """Check the exact noiseless event probability for canonical weight-w
    input and weight-s output against fresh-graph sampling."""
    from .genfunc import ensemble_event_probability

    if trials < 1:
        raise InputError("trials must be positive")
    exact = float(ensemble_event_probability(params, w, s))
    l, r = params.l, params.r
    defect_sockets = range(w * l)
    target = (1 << s) - 1

    def chunk(lo: int, hi: int) -> int:
        hits = 0
        for i in range(lo, hi):
            graph = sample_graph(params, derive_seed(master_seed, "graph", i))
            wiring = graph.wiring
            mask = 0
            for k in defect_sockets:
                mask |= 1 << (wiring[k] // r)
            if mask == target:
                hits += 1
        return hits

    hits = sum(_run_chunks(chunk, trials, workers))
    config = {
        "check": "noiseless-event-rate",
        "l": l,
        "r": r,
        "n": params.n,
        "w": w,
        "s": s,
        "trials": trials,
        "master_seed": master_seed,
    }
    return _gate(hits, trials, exact, config)


def validate_noisy_event_probability(
    params: SystemParams,
    w: int,
    s: int,
    trials: int,
    master_seed: int,
    workers: int | None = None,
) -> EventRateCheck:
    """Check the exact noisy event probability against sampling of both the
    graph and the flip pattern."""
    from .genfunc import noisy_ensemble_event_probability

    if trials < 1:
        raise InputError("trials must be positive")
    exact = float(noisy_ensemble_event_probability(params, w, s))
    l, r, m, q = params.l, params.r, params.m, float(params.q)
    defect_sockets = range(w * l)
    target = (1 << s) - 1

    def chunk(lo: int, hi: int) -> int:
        hits = 0
        for i in range(lo, hi):
            rng = random.Random(derive_seed(master_seed, "noise", i))
            graph = sample_graph(params, derive_seed(master_seed, "graph", i))
            wiring = graph.wiring
            mask = 0
            for k in defect_sockets:
                mask |= 1 << (wiring[k] // r)
            for j in range(m):
                if rng.random() < q:
                    mask ^= 1 << j
            if mask == target:
                hits += 1
        return hits

    hits = sum(_run_chunks(chunk, trials, workers))
    config = {
        "check": "noisy-event-rate",
        "l": l,
        "r": r,
        "n": params.n,
        "q": float(params.q),
        "w": w,
        "s": s,
        "trials": trials,
        "master_seed": master_seed,
    }
    return _gate(hits, trials, exact, config)
