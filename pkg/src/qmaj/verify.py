"""Exhaustive verification of the major-index identities.

Every ``verify_*`` function returns a :class:`VerificationReport`.  Runs
over S_n are split into lexicographic blocks by first entry; blocks can be
handed to a process pool, and results are merged in block order, so a
report never depends on the degree of parallelism.
"""

from __future__ import annotations

import enum
import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from math import comb, factorial
from typing import Any, Callable, Iterable, Sequence

from .bijections import (
    Decomposition,
    InsertionTrace,
    LabeledPartition,
    phi_decompose,
    phi_insert,
    psi,
    psi_inv,
    sort_columns,
    sort_columns_inv,
)
from .combinat import (
    check_guard,
    iter_compositions,
    iter_derangements,
    iter_partitions_with_sum,
    iter_permutations,
    iter_permutations_with_prefix,
    major_index,
    dp_reduce,
    format_sequence,
)
from .errors import MalformedInputError, QmajError
from .qpoly import (
    QPoly,
    q_binomial,
    q_derangement_bruteforce,
    q_derangement_formula,
    q_derangement_recurrence,
    q_factorial,
)

Progress = Callable[[str], None]

PART_BOUND = 20
DEFAULT_SEED = 42
DEFAULT_TRIALS = 200


class Identity(str, enum.Enum):
    EQ1 = "EQ1"
    EQ2 = "EQ2"
    EQ3 = "EQ3"
    THM1 = "THM1"
    EQ5 = "EQ5"
    ROUNDTRIP_PSI = "ROUNDTRIP_PSI"
    ROUNDTRIP_PHI = "ROUNDTRIP_PHI"
    WEIGHT_EQ6 = "WEIGHT_EQ6"


@dataclass
class VerificationReport:
    identity: Identity
    params: dict[str, int]
    passed: bool
    witness: Any = None
    elapsed_ms: int | None = None

    def __post_init__(self):
        if not self.passed and self.witness is None:
            raise ValueError("a failed report must carry a witness")

    def to_dict(self, *, timing: bool = True) -> dict:
        return {
            "identity": self.identity.value,
            "params": dict(self.params),
            "passed": self.passed,
            "witness": self.witness,
            "elapsed_ms": self.elapsed_ms if timing else None,
        }

    def to_json(self, *, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing=timing))


class _Timer:
    def __enter__(self):
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = int(round((time.perf_counter() - self._t0) * 1000))
        return False


def default_threads() -> int:
    return os.cpu_count() or 1


def permutation_blocks(n: int) -> list[tuple[int, ...]]:
    """Lexicographic blocks of S_n, keyed by first entry."""
    if n == 0:
        return [()]
    return [(v,) for v in range(1, n + 1)]


def _run_blocks(
    worker: Callable[[Any], Any],
    blocks: Sequence[Any],
    threads: int,
    progress: Progress | None,
    label: str,
) -> list[Any]:
    results = []
    total = len(blocks)
    if threads <= 1 or total <= 1:
        mapped: Iterable[Any] = map(worker, blocks)
        pool = None
    else:
        pool = ProcessPoolExecutor(max_workers=min(threads, total))
        mapped = pool.map(worker, blocks)
    try:
        for i, (block, res) in enumerate(zip(blocks, mapped), 1):
            results.append(res)
            if progress is not None:
                progress(f"{label}: block {i}/{total} {_block_name(block)} done")
    finally:
        if pool is not None:
            pool.shutdown()
    return results


def _block_name(block: Any) -> str:
    if isinstance(block, tuple):
        return "prefix " + format_sequence(block)
    return f"k={block}"


def _first_difference(a: QPoly, b: QPoly) -> int:
    i = 0
    while a[i] == b[i]:
        i += 1
    return i


# -- maj distribution over S_n ---------------------------------------------


def _maj_counts_block(n: int, prefix: tuple[int, ...]) -> list[int]:
    counts = [0] * (comb(n, 2) + 1)
    for p in iter_permutations_with_prefix(n, prefix):
        counts[major_index(p)] += 1
    return counts


def verify_eq1(
    n: int,
    *,
    threads: int = 1,
    guard: int | None = None,
    progress: Progress | None = None,
) -> VerificationReport:
    check_guard(n, guard)
    with _Timer() as timer:
        parts = _run_blocks(
            partial(_maj_counts_block, n), permutation_blocks(n), threads, progress, "eq1"
        )
        total = [sum(col) for col in zip(*parts)]
        lhs = QPoly(tuple(total))
        rhs = q_factorial(n)
        witness = None
        if lhs != rhs:
            i = _first_difference(lhs, rhs)
            witness = {
                "coefficient": i,
                "enumerated": lhs[i],
                "q_factorial": rhs[i],
                "replay": f"qmaj verify eq1 --n {n}",
            }
    return VerificationReport(Identity.EQ1, {"n": n}, witness is None, witness, timer.ms)


# -- coefficient counting through column sorting ------------------------------


def _sequence_count(n: int, m: int) -> int:
    if n == 0:
        return 1 if m == 0 else 0
    return comb(m + n - 1, n - 1)


def verify_eq2(n: int, m_max: int, *, guard: int | None = None) -> VerificationReport:
    """For every m <= m_max, count pairs (lambda, pi) with |lambda| + maj(pi) = m
    directly, and again as images of all length-n sequences of sum m under
    column sorting followed by psi inverse; both must equal the number of
    such sequences."""
    check_guard(n, guard)
    if m_max < 0:
        raise MalformedInputError(f"m_max must be nonnegative, got {m_max}")
    params = {"n": n, "m_max": m_max}
    with _Timer() as timer:
        perms = [(p, major_index(p)) for p in iter_permutations(n, guard=guard)]
        witness = None
        for m in range(m_max + 1):
            direct = set()
            for p, maj in perms:
                if maj <= m:
                    for lam in iter_partitions_with_sum(n, m - maj):
                        direct.add((lam, p))

            images = set()
            sequences = 0
            bad = None
            for a in iter_compositions(n, m):
                sequences += 1
                lp = sort_columns(a)
                if not lp.is_standard() or sort_columns_inv(lp) != a:
                    bad = {"sequence": list(a), "reason": "column sorting not invertible"}
                    break
                lam = psi_inv(lp)
                if sum(lam) + major_index(lp.pi) != m:
                    bad = {"sequence": list(a), "reason": "weight not preserved"}
                    break
                images.add((lam, lp.pi))

            expected = _sequence_count(n, m)
            if bad is None and not (
                len(direct) == len(images) == sequences == expected and direct == images
            ):
                bad = {
                    "direct": len(direct),
                    "via_sort_columns": len(images),
                    "sequences": sequences,
                    "binomial": expected,
                }
            if bad is not None:
                witness = {"m": m, **bad, "replay": f"qmaj verify eq2 --n {n} --m-max {m}"}
                break
    return VerificationReport(Identity.EQ2, params, witness is None, witness, timer.ms)


# -- three routes to d_n(q) ----------------------------------------------------


def verify_eq3(n: int, *, guard: int | None = None) -> VerificationReport:
    check_guard(n, guard)
    with _Timer() as timer:
        brute = q_derangement_bruteforce(n, guard=guard)
        formula = q_derangement_formula(n)
        recur = q_derangement_recurrence(n)
        witness = None
        if not brute == formula == recur:
            witness = {
                "bruteforce": list(brute.coeffs),
                "formula": list(formula.coeffs),
                "recurrence": list(recur.coeffs),
                "replay": f"qmaj verify eq3 --n {n}",
            }
    return VerificationReport(Identity.EQ3, {"n": n}, witness is None, witness, timer.ms)


# -- dp buckets --------------------------------------------------------------------


def _dp_buckets_block(n: int, prefix: tuple[int, ...]) -> dict[tuple[int, ...], list[int]]:
    width = comb(n, 2) + 1
    buckets: dict[tuple[int, ...], list[int]] = {}
    for p in iter_permutations_with_prefix(n, prefix):
        key = dp_reduce(p)
        counts = buckets.get(key)
        if counts is None:
            counts = buckets[key] = [0] * width
        counts[major_index(p)] += 1
    return buckets


def dp_bucket_sums(
    n: int,
    *,
    threads: int = 1,
    guard: int | None = None,
    progress: Progress | None = None,
) -> dict[tuple[int, ...], QPoly]:
    """``sum of q^maj(pi)`` over each class of S_n with the same ``dp(pi)``."""
    check_guard(n, guard)
    parts = _run_blocks(
        partial(_dp_buckets_block, n), permutation_blocks(n), threads, progress, "thm1"
    )
    merged: dict[tuple[int, ...], list[int]] = {}
    for part in parts:
        for key, counts in part.items():
            acc = merged.get(key)
            if acc is None:
                merged[key] = list(counts)
            else:
                for i, c in enumerate(counts):
                    acc[i] += c
    return {key: QPoly(tuple(c)) for key, c in merged.items()}


def verify_thm1(
    n: int,
    *,
    threads: int = 1,
    guard: int | None = None,
    progress: Progress | None = None,
) -> VerificationReport:
    """One pass over S_n, bucketed by derangement part; each bucket sigma in D_k
    must sum to ``q^maj(sigma) [n, k]``."""
    check_guard(n, guard)
    with _Timer() as timer:
        merged = dp_bucket_sums(n, threads=threads, guard=guard, progress=progress)
        total = sum(p.evaluate(1) for p in merged.values())
        expected_keys = [s for k in range(n + 1) for s in iter_derangements(k, guard=guard)]
        params = {"n": n, "permutations": total, "buckets": len(merged)}
        witness = None
        missing = [s for s in expected_keys if s not in merged]
        extra = sorted(set(merged) - set(expected_keys), key=lambda s: (len(s), s))
        if missing:
            witness = {"missing_bucket": list(missing[0])}
        elif extra:
            witness = {"unexpected_bucket": list(extra[0])}
        elif total != factorial(n):
            witness = {"bucket_total": total, "n_factorial": factorial(n)}
        else:
            binoms = [q_binomial(n, k) for k in range(n + 1)]
            for sigma in expected_keys:
                got = merged[sigma]
                want = binoms[len(sigma)].shift(major_index(sigma))
                if got != want:
                    witness = {
                        "sigma": list(sigma),
                        "bucket": list(got.coeffs),
                        "expected": list(want.coeffs),
                    }
                    break
        if witness is not None:
            witness["replay"] = f"qmaj verify thm1 --n {n}"
    return VerificationReport(Identity.THM1, params, witness is None, witness, timer.ms)


# -- q-factorial inversion ---------------------------------------------------------


def verify_eq5(n: int, *, guard: int | None = None) -> VerificationReport:
    check_guard(n, guard)
    with _Timer() as timer:
        lhs = q_factorial(n)
        rhs = QPoly(())
        for k in range(n + 1):
            rhs = rhs + q_binomial(n, k) * q_derangement_formula(k)
        witness = None
        if lhs != rhs:
            i = _first_difference(lhs, rhs)
            witness = {
                "coefficient": i,
                "q_factorial": lhs[i],
                "binomial_sum": rhs[i],
                "replay": f"qmaj verify eq5 --n {n}",
            }
    return VerificationReport(Identity.EQ5, {"n": n}, witness is None, witness, timer.ms)


# -- round trips ------------------------------------------------------------------


def random_partition(rng: random.Random, length: int, bound: int = PART_BOUND) -> tuple[int, ...]:
    return tuple(sorted((rng.randint(0, bound) for _ in range(length)), reverse=True))


def _rng(seed: int, *key: Any) -> random.Random:
    # str seeds hash through sha512, so streams agree across processes
    return random.Random("/".join([str(seed), *map(str, key)]))


@dataclass
class _Tally:
    instances: dict[str, int] = field(default_factory=lambda: {"psi": 0, "phi": 0, "weight": 0})
    insertions: int = 0
    single_candidate: int = 0
    multi_candidate: int = 0
    failures: dict[str, dict] = field(default_factory=dict)

    def fail(self, which: str, witness: dict) -> None:
        self.failures.setdefault(which, witness)

    def absorb(self, trace: InsertionTrace) -> None:
        for step in trace.steps:
            self.insertions += 1
            if len(step.candidates) == 1:
                self.single_candidate += 1
            else:
                self.multi_candidate += 1

    def merge(self, other: _Tally) -> None:
        for k, v in other.instances.items():
            self.instances[k] += v
        self.insertions += other.insertions
        self.single_candidate += other.single_candidate
        self.multi_candidate += other.multi_candidate
        for k, v in other.failures.items():
            self.failures.setdefault(k, v)


def _psi_replay(lam, pi) -> str:
    return "qmaj bij psi " + json.dumps({"lambda": list(lam), "pi": list(pi)}, separators=(",", ":"))


def _forward_block(n: int, trials: int, seed: int, prefix: tuple[int, ...]) -> _Tally:
    tally = _Tally()
    for pi in iter_permutations_with_prefix(n, prefix):
        rng = _rng(seed, "forward", n, pi)
        maj_pi = major_index(pi)
        for _ in range(trials):
            lam = random_partition(rng, n)
            where = {"lambda": list(lam), "pi": list(pi), "replay": _psi_replay(lam, pi)}
            stage = "psi"
            try:
                lp = psi(lam, pi)
                tally.instances["psi"] += 1
                if lp.weight != sum(lam) + maj_pi:
                    tally.fail("psi", {**where, "reason": "weight law"})
                elif not lp.is_standard():
                    tally.fail("psi", {**where, "reason": "psi image not standard"})
                elif psi_inv(lp) != lam or psi(psi_inv(lp), pi) != lp:
                    tally.fail("psi", {**where, "reason": "round trip"})

                stage = "phi"
                tally.instances["phi"] += 1
                dec = phi_decompose(lp)
                trace = InsertionTrace()
                if sum(dec.beta) + sum(dec.gamma) != lp.weight:
                    tally.fail("phi", {**where, "reason": "|beta|+|gamma| != |mu|"})
                elif phi_insert(dec.beta, dec.sigma, dec.gamma, trace=trace) != lp:
                    tally.fail("phi", {**where, "reason": "phi_insert(phi_decompose(x)) != x"})
                tally.absorb(trace)

                stage = "weight"
                tally.instances["weight"] += 1
                alpha = psi_inv(LabeledPartition(dec.beta, dec.sigma))
                if sum(lam) + maj_pi != sum(alpha) + sum(dec.gamma) + major_index(dec.sigma):
                    tally.fail("weight", {**where, "alpha": list(alpha), "gamma": list(dec.gamma)})
            except (QmajError, AssertionError) as exc:
                tally.fail(stage, {**where, "error": str(exc)})
    return tally


def _insert_block(n: int, trials: int, seed: int, k: int) -> _Tally:
    tally = _Tally()
    for sigma in iter_derangements(k, guard=n):
        rng = _rng(seed, "insert", n, sigma)
        for _ in range(trials):
            alpha = random_partition(rng, k)
            gamma = random_partition(rng, n - k)
            beta = psi(alpha, sigma).mu
            where = {
                "beta": list(beta),
                "gamma": list(gamma),
                "sigma": list(sigma),
                "replay": "qmaj bij insert "
                + json.dumps(
                    {"beta": list(beta), "sigma": list(sigma), "gamma": list(gamma)},
                    separators=(",", ":"),
                ),
            }
            stage = "phi"
            try:
                tally.instances["phi"] += 1
                trace = InsertionTrace()
                lp = phi_insert(beta, sigma, gamma, trace=trace)
                tally.absorb(trace)
                if not lp.is_standard():
                    tally.fail("phi", {**where, "reason": "phi_insert result not standard"})
                elif phi_decompose(lp) != Decomposition(beta, gamma, sigma):
                    tally.fail("phi", {**where, "reason": "phi_decompose(phi_insert(x)) != x"})
                elif lp.weight != sum(beta) + sum(gamma):
                    tally.fail("phi", {**where, "reason": "weight"})

                stage = "weight"
                tally.instances["weight"] += 1
                lam = psi_inv(lp)
                lhs = sum(lam) + major_index(lp.pi)
                if lhs != sum(alpha) + sum(gamma) + major_index(sigma):
                    tally.fail("weight", {**where, "alpha": list(alpha), "lambda": list(lam)})
            except (QmajError, AssertionError) as exc:
                tally.fail(stage, {**where, "error": str(exc)})
    return tally


def verify_roundtrips(
    n: int,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    *,
    threads: int = 1,
    guard: int | None = None,
    progress: Progress | None = None,
) -> list[VerificationReport]:
    """Run the psi, phi and weight-chain checks in one pass.

    Forward direction: every pi in S_n with ``trials`` seeded partitions each.
    Inverse direction: every sigma in D_k for k <= n with ``trials`` seeded
    (alpha, gamma) pairs each.  Returns the ROUNDTRIP_PSI, ROUNDTRIP_PHI and
    WEIGHT_EQ6 reports in that order.
    """
    check_guard(n, guard)
    if trials < 0:
        raise MalformedInputError(f"trials must be nonnegative, got {trials}")
    with _Timer() as timer:
        forward = _run_blocks(
            partial(_forward_block, n, trials, seed),
            permutation_blocks(n),
            threads,
            progress,
            "roundtrip forward",
        )
        inverse = _run_blocks(
            partial(_insert_block, n, trials, seed),
            list(range(n + 1)),
            threads,
            progress,
            "roundtrip insert",
        )
        tally = _Tally()
        for t in forward + inverse:
            tally.merge(t)
    base = {"n": n, "trials": trials, "seed": seed}
    reports = []
    for ident, key in (
        (Identity.ROUNDTRIP_PSI, "psi"),
        (Identity.ROUNDTRIP_PHI, "phi"),
        (Identity.WEIGHT_EQ6, "weight"),
    ):
        params = {**base, "instances": tally.instances[key]}
        if key == "phi":
            params.update(
                insertions=tally.insertions,
                single_candidate=tally.single_candidate,
                multi_candidate=tally.multi_candidate,
            )
        witness = tally.failures.get(key)
        reports.append(VerificationReport(ident, params, witness is None, witness, timer.ms))
    return reports


def verify_roundtrip_psi(n: int, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED, **kw):
    return verify_roundtrips(n, trials, seed, **kw)[0]


def verify_roundtrip_phi(n: int, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED, **kw):
    return verify_roundtrips(n, trials, seed, **kw)[1]


def verify_weight_eq6(n: int, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED, **kw):
    return verify_roundtrips(n, trials, seed, **kw)[2]
