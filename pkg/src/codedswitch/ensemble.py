"""Randomized-instance ensembles and scheme comparisons.

Draws random placements, solves each instance, and aggregates per-(load,
scheme) statistics into CSV-ready rows.  Two entry points mirror the
standard experiments: ``compare_mds_replication`` (coding gain at equal
storage overhead) and ``compare_schemes`` (write-policy flexibility).

Reproducibility contract: instance index ``idx`` at load ``L`` always uses
the seed tuple ``(master_seed, L, idx)``, and every scheme at that index
draws from an identical fresh stream, so scheme comparisons are paired
sample by sample.  Worker processes (``CODED_SWITCH_THREADS``) only change
wall time, never output bytes.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .bounds import hall_full_throughput_upper_bound, lower_bound_expected
from .core import (
    BLOCKS,
    CONSECUTIVE,
    MDS,
    Replication,
    SwitchInstance,
    UNRESTRICTED,
    WRITE_POLICIES,
)
from .solvers import SolveResult, dispatch_solver

DEFAULT_SEED = 0x5EEDC0DE

METRICS = (
    "mean_Lstar",
    "mean_throughput",
    "full_throughput_fraction",
    "mean_lower_bound",
    "hall_upper_bound",
)

CSV_HEADER = (
    "scheme,N,k,n,L,samples,mean_Lstar,std_Lstar,mean_throughput,"
    "full_fraction,lower_bound_mean,hall_upper_bound,budget_flagged"
)


def _uniform_subset(n_units: int, n: int, rng: np.random.Generator) -> frozenset[int]:
    # partial Fisher-Yates over 0..N-1, sparse via dict
    swapped: dict[int, int] = {}
    picked = []
    for i in range(n):
        j = i + int(rng.integers(n_units - i))
        vi = swapped.get(i, i)
        vj = swapped.get(j, j)
        swapped[i] = vj
        swapped[j] = vi
        picked.append(vj + 1)
    return frozenset(picked)


def _replication_groups(units: frozenset[int], k: int) -> tuple[frozenset[int], ...]:
    ordered = sorted(units)
    width = len(ordered) // k
    return tuple(frozenset(ordered[g * width : (g + 1) * width]) for g in range(k))


def random_instance(
    n_units: int,
    k: int,
    n: int,
    load: int,
    rng: np.random.Generator,
    write_policy: str = UNRESTRICTED,
    coding: str = "mds",
) -> SwitchInstance:
    """Draw ``load`` packets with uniformly random placements.

    Unrestricted: a uniform n-subset of MUs.  Consecutive: a uniform
    window of n adjacent MUs.  Blocks: a uniform aligned block.  With
    ``coding="replication"`` the drawn units are split, in sorted order,
    into k contiguous replica groups of n/k units each.
    """
    if not 1 <= k <= n <= n_units:
        raise ValueError("need 1 <= k <= n <= N")
    if load < 0:
        raise ValueError("load must be nonnegative")
    if write_policy not in WRITE_POLICIES:
        raise ValueError(f"unknown write policy {write_policy!r}")
    if write_policy == BLOCKS and n_units % n != 0:
        raise ValueError("blocks policy needs n dividing N")
    if coding not in ("mds", "replication"):
        raise ValueError(f"unknown coding {coding!r}")
    if coding == "replication" and n % k != 0:
        raise ValueError("replication needs k dividing n")

    packets = []
    for _ in range(load):
        if write_policy == UNRESTRICTED:
            units = _uniform_subset(n_units, n, rng)
        elif write_policy == CONSECUTIVE:
            start = 1 + int(rng.integers(n_units - n + 1))
            units = frozenset(range(start, start + n))
        else:
            block = int(rng.integers(n_units // n))
            units = frozenset(range(block * n + 1, block * n + n + 1))
        packets.append(units)

    if coding == "mds":
        coding_obj: str | Replication = MDS
    else:
        coding_obj = Replication(tuple(_replication_groups(p, k) for p in packets))
    return SwitchInstance(
        n_units=n_units,
        k=k,
        n=n,
        packets=packets,
        write_policy=write_policy,
        coding=coding_obj,
    )


@dataclass(frozen=True)
class SchemeSpec:
    """One storage scheme in a comparison: placement policy plus coding."""

    name: str
    k: int
    n: int
    write_policy: str = UNRESTRICTED
    coding: str = "mds"
    solver: str = "auto"


@dataclass(frozen=True)
class EnsembleConfig:
    """Single-scheme ensemble description, loadable from JSON by the CLI."""

    n_units: int
    k: int
    n: int
    loads: tuple[int, ...]
    instances_per_point: int
    write_policy: str = UNRESTRICTED
    coding: str = "mds"
    master_seed: int = DEFAULT_SEED
    solver: str = "auto"
    metrics: tuple[str, ...] = METRICS
    node_budget: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "loads", tuple(int(x) for x in self.loads))
        object.__setattr__(self, "metrics", tuple(self.metrics))
        for m in self.metrics:
            if m not in METRICS:
                raise ValueError(f"unknown metric {m!r}")

    def scheme(self) -> SchemeSpec:
        name = self.write_policy
        if self.coding == "replication":
            name = f"{self.write_policy}-replication"
        return SchemeSpec(
            name=name,
            k=self.k,
            n=self.n,
            write_policy=self.write_policy,
            coding=self.coding,
            solver=self.solver,
        )


@dataclass(frozen=True)
class EnsembleRow:
    """Aggregates for one (scheme, load) grid point; None renders empty."""

    scheme: str
    n_units: int
    k: int
    n: int
    load: int
    samples: int
    mean_lstar: float | None
    std_lstar: float | None
    mean_throughput: float | None
    full_fraction: float | None
    lower_bound_mean: float | None
    hall_upper_bound: float | None
    budget_flagged: int

    def csv_line(self) -> str:
        def cell(v) -> str:
            if v is None:
                return ""
            if isinstance(v, float):
                return repr(v)
            return str(v)

        return ",".join(
            cell(v)
            for v in (
                self.scheme,
                self.n_units,
                self.k,
                self.n,
                self.load,
                self.samples,
                self.mean_lstar,
                self.std_lstar,
                self.mean_throughput,
                self.full_fraction,
                self.lower_bound_mean,
                self.hall_upper_bound,
                self.budget_flagged,
            )
        )


@dataclass(frozen=True)
class PairedDifference:
    """Mean served-count gap between two schemes on shared instance draws."""

    load: int
    scheme_a: str
    scheme_b: str
    mean_diff: float
    std_error: float
    samples: int


@dataclass(frozen=True)
class EnsembleStats:
    rows: tuple[EnsembleRow, ...]
    paired: tuple[PairedDifference, ...] = field(default_factory=tuple)

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        lines.extend(row.csv_line() for row in self.rows)
        return "\n".join(lines) + "\n"


def thread_width() -> int:
    """Worker count: CODED_SWITCH_THREADS if set, else all cores."""
    raw = os.environ.get("CODED_SWITCH_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        width = int(raw)
    except ValueError:
        raise ValueError(f"CODED_SWITCH_THREADS must be a positive integer, got {raw!r}")
    if width < 1:
        raise ValueError(f"CODED_SWITCH_THREADS must be a positive integer, got {raw!r}")
    return width


def _solve_one(
    n_units: int,
    scheme: SchemeSpec,
    load: int,
    idx: int,
    master_seed: int,
    node_budget: int | None,
    want_lower: bool,
) -> tuple[int, bool, float | None]:
    rng = np.random.default_rng(np.random.SeedSequence((master_seed, load, idx)))
    inst = random_instance(
        n_units, scheme.k, scheme.n, load, rng, scheme.write_policy, scheme.coding
    )
    result: SolveResult = dispatch_solver(scheme.solver, inst, node_budget=node_budget)
    lower = None
    if want_lower and not inst.is_replication:
        lower = lower_bound_expected(inst)
    return result.optimal_count, result.budget_exceeded, lower


def _chunk_worker(args) -> list[list[tuple[int, bool, float | None]]]:
    n_units, schemes, load, lo, hi, master_seed, node_budget, want_lower = args
    out = []
    for idx in range(lo, hi):
        out.append(
            [
                _solve_one(n_units, scheme, load, idx, master_seed, node_budget, want_lower)
                for scheme in schemes
            ]
        )
    return out


def _collect_point(
    n_units: int,
    schemes: Sequence[SchemeSpec],
    load: int,
    samples: int,
    master_seed: int,
    node_budget: int | None,
    want_lower: bool,
    pool: ProcessPoolExecutor | None,
    width: int,
) -> list[list[tuple[int, bool, float | None]]]:
    if pool is None:
        args = (n_units, tuple(schemes), load, 0, samples, master_seed, node_budget, want_lower)
        return _chunk_worker(args)
    chunk = max(1, math.ceil(samples / (4 * width)))
    jobs = []
    for lo in range(0, samples, chunk):
        hi = min(samples, lo + chunk)
        jobs.append(
            pool.submit(
                _chunk_worker,
                (n_units, tuple(schemes), load, lo, hi, master_seed, node_budget, want_lower),
            )
        )
    results: list[list[tuple[int, bool, float | None]]] = []
    for job in jobs:
        results.extend(job.result())
    return results


def _mean_std(values: Sequence[float]) -> tuple[float, float]:
    count = len(values)
    mean = math.fsum(values) / count
    if count < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (count - 1)
    return mean, math.sqrt(var)


def _aggregate_point(
    scheme: SchemeSpec,
    n_units: int,
    load: int,
    outcomes: Sequence[tuple[int, bool, float | None]],
    metrics: Sequence[str],
) -> EnsembleRow:
    kept = [(served, lower) for served, flagged, lower in outcomes if not flagged]
    flagged = len(outcomes) - len(kept)
    samples = len(kept)

    mean_lstar = std_lstar = mean_tp = full_fraction = lower_mean = hall = None
    if samples:
        lstars = [float(served) for served, _ in kept]
        if "mean_Lstar" in metrics:
            mean_lstar, std_lstar = _mean_std(lstars)
        if "mean_throughput" in metrics:
            mean_tp = math.fsum(lstars) / samples * scheme.k / n_units
        if "full_throughput_fraction" in metrics:
            full_fraction = sum(1 for v, _ in kept if v == load) / samples
        if "mean_lower_bound" in metrics and scheme.coding == "mds":
            lower_mean = math.fsum(lower for _, lower in kept) / samples
    if "hall_upper_bound" in metrics:
        hall = hall_full_throughput_upper_bound(load, scheme.k, scheme.n, n_units)
    return EnsembleRow(
        scheme=scheme.name,
        n_units=n_units,
        k=scheme.k,
        n=scheme.n,
        load=load,
        samples=samples,
        mean_lstar=mean_lstar,
        std_lstar=std_lstar,
        mean_throughput=mean_tp,
        full_fraction=full_fraction,
        lower_bound_mean=lower_mean,
        hall_upper_bound=hall,
        budget_flagged=flagged,
    )


def _paired_rows(
    schemes: Sequence[SchemeSpec],
    load: int,
    outcomes: Sequence[Sequence[tuple[int, bool, float | None]]],
) -> list[PairedDifference]:
    pairs = []
    for a in range(len(schemes)):
        for b in range(a + 1, len(schemes)):
            diffs = [
                float(row[a][0] - row[b][0])
                for row in outcomes
                if not row[a][1] and not row[b][1]
            ]
            if not diffs:
                continue
            mean, std = _mean_std(diffs)
            pairs.append(
                PairedDifference(
                    load=load,
                    scheme_a=schemes[a].name,
                    scheme_b=schemes[b].name,
                    mean_diff=mean,
                    std_error=std / math.sqrt(len(diffs)),
                    samples=len(diffs),
                )
            )
    return pairs


def run_schemes(
    n_units: int,
    schemes: Sequence[SchemeSpec],
    loads: Iterable[int],
    instances_per_point: int,
    master_seed: int = DEFAULT_SEED,
    metrics: Sequence[str] = METRICS,
    node_budget: int | None = None,
) -> EnsembleStats:
    """Shared driver: paired instance streams, one row per (load, scheme)."""
    loads = tuple(int(x) for x in loads)
    if instances_per_point < 1:
        raise ValueError("instances_per_point must be positive")
    want_lower = "mean_lower_bound" in metrics
    width = thread_width()
    rows: list[EnsembleRow] = []
    paired: list[PairedDifference] = []
    pool = ProcessPoolExecutor(max_workers=width) if width > 1 else None
    try:
        for load in loads:
            outcomes = _collect_point(
                n_units,
                schemes,
                load,
                instances_per_point,
                master_seed,
                node_budget,
                want_lower,
                pool,
                width,
            )
            for s, scheme in enumerate(schemes):
                rows.append(
                    _aggregate_point(
                        scheme, n_units, load, [row[s] for row in outcomes], metrics
                    )
                )
            paired.extend(_paired_rows(schemes, load, outcomes))
    finally:
        if pool is not None:
            pool.shutdown()
    return EnsembleStats(rows=tuple(rows), paired=tuple(paired))


def run_ensemble(config: EnsembleConfig) -> EnsembleStats:
    """Run the single scheme described by ``config`` over its load grid."""
    return run_schemes(
        n_units=config.n_units,
        schemes=(config.scheme(),),
        loads=config.loads,
        instances_per_point=config.instances_per_point,
        master_seed=config.master_seed,
        metrics=config.metrics,
        node_budget=config.node_budget,
    )


def default_loads(n_units: int, k: int) -> tuple[int, ...]:
    """Load grid reaching two past saturation: 1..(floor(N/k) + 2)."""
    return tuple(range(1, n_units // k + 3))


def compare_mds_replication(
    n_units: int = 16,
    k: int = 2,
    n: int = 4,
    loads: Iterable[int] | None = None,
    instances_per_point: int = 1000,
    master_seed: int = DEFAULT_SEED,
    metrics: Sequence[str] = METRICS,
) -> EnsembleStats:
    """[n,k] MDS coding versus n/k-way replication on identical placements.

    Both schemes see the same drawn unit sets at every (load, idx), so the
    served-count gap is the pure coding gain at equal storage overhead.
    """
    if loads is None:
        loads = default_loads(n_units, k)
    schemes = (
        SchemeSpec(name="mds", k=k, n=n, write_policy=UNRESTRICTED, coding="mds"),
        SchemeSpec(
            name="replication", k=k, n=n, write_policy=UNRESTRICTED, coding="replication"
        ),
    )
    return run_schemes(n_units, schemes, loads, instances_per_point, master_seed, metrics)


def compare_schemes(
    n_units: int = 16,
    k: int = 3,
    n: int = 4,
    loads: Iterable[int] | None = None,
    instances_per_point: int = 500,
    master_seed: int = DEFAULT_SEED,
    metrics: Sequence[str] = METRICS,
) -> EnsembleStats:
    """Unrestricted vs consecutive vs aligned-block placement, MDS coding."""
    if n_units % n != 0:
        raise ValueError("scheme comparison needs n dividing N for the blocks policy")
    if loads is None:
        loads = default_loads(n_units, k)
    schemes = (
        SchemeSpec(name="unrestricted", k=k, n=n, write_policy=UNRESTRICTED),
        SchemeSpec(name="consecutive", k=k, n=n, write_policy=CONSECUTIVE),
        SchemeSpec(name="blocks", k=k, n=n, write_policy=BLOCKS),
    )
    return run_schemes(n_units, schemes, loads, instances_per_point, master_seed, metrics)


def sweep_hall_bound(
    n_units: int = 16,
    k: int = 2,
    n_values: Sequence[int] = (2, 3, 4),
    loads: Iterable[int] | None = None,
    instances_per_point: int = 10000,
    master_seed: int = DEFAULT_SEED,
) -> EnsembleStats:
    """Empirical full-throughput fraction against the union-size upper bound.

    One unrestricted-MDS ensemble per n; rows carry both the measured
    fraction and the analytic bound for the same (L, n).
    """
    if loads is None:
        loads = default_loads(n_units, k)
    all_rows: list[EnsembleRow] = []
    metrics = ("mean_Lstar", "mean_throughput", "full_throughput_fraction", "hall_upper_bound")
    for n in n_values:
        scheme = SchemeSpec(name="unrestricted", k=k, n=n, write_policy=UNRESTRICTED)
        stats = run_schemes(n_units, (scheme,), loads, instances_per_point, master_seed, metrics)
        all_rows.extend(stats.rows)
    return EnsembleStats(rows=tuple(all_rows))
