"""Benchmark grid runner: timing and op counts over (L, m) scenarios.

One dataset is generated per (L, m) cell and reused across every loss kind
and repetition, so timing differences come from the implementations alone.
The timed region is exactly one loss+gradient evaluation on an in-memory
set; for the bucketed kinds that includes sorting and bucket allocation,
never file I/O. Kernels are warmed before any timing so JIT compilation
cannot pollute the first cell.
"""

from __future__ import annotations

import dataclasses
import os
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor

from . import _kernels
from .api import evaluate_kind
from .model import DetectionSet
from .oracle import SIZE_GUARD
from .synth import SyntheticConfig, generate

__all__ = [
    "CSV_HEADER",
    "DEFAULT_L",
    "DEFAULT_M",
    "DEFAULT_LOSSES",
    "BenchRecord",
    "record_to_csv",
    "run_grid",
    "summarize",
    "thread_cap",
]

CSV_HEADER = "loss,L,m,delta,seed,rep,wall_time_s,diff_ops,sort_ops,total_ops,loss_value"

DEFAULT_L = (10_000, 100_000, 1_000_000)
DEFAULT_M = (0.1, 1.0, 2.0, 5.0)
DEFAULT_LOSSES = ("ap", "bap")

# benchmark default: the exact-equivalence regime, where the bucketed and
# reference paths are provably interchangeable and the comparison is pure
DEFAULT_DELTA = 0.0


@dataclasses.dataclass(frozen=True)
class BenchRecord:
    loss_kind: str
    L: int
    m: float
    delta: float
    seed: int
    rep: int
    wall_time_s: float
    diff_ops: int
    sort_ops: int
    total_ops: int
    loss_value: float


def record_to_csv(r: BenchRecord) -> str:
    return (
        f"{r.loss_kind},{r.L},{r.m},{r.delta},{r.seed},{r.rep},"
        f"{r.wall_time_s!r},{r.diff_ops},{r.sort_ops},{r.total_ops},{r.loss_value!r}"
    )


def thread_cap() -> int:
    """Worker cap: RANKBUCKET_THREADS if set, else the CPU count."""
    raw = os.environ.get("RANKBUCKET_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    cap = int(raw)
    if cap < 1:
        raise ValueError("RANKBUCKET_THREADS must be >= 1")
    return cap


def _warmup(losses: Sequence[str]) -> None:
    _kernels.warmup()
    cfg = SyntheticConfig(num_logits=64, positive_pct=10.0, seed=1)
    ds = generate(cfg, delta=0.0)
    for kind in losses:
        evaluate_kind(ds, kind)


def run_grid(
    sizes: Sequence[int] = DEFAULT_L,
    pcts: Sequence[float] = DEFAULT_M,
    losses: Sequence[str] = DEFAULT_LOSSES,
    reps: int = 3,
    delta: float = DEFAULT_DELTA,
    base_seed: int = 20_240,
    parallel_gen: bool = False,
    progress: Callable[[str], None] | None = None,
) -> list[BenchRecord]:
    """Run the full grid and return one record per (loss, L, m, rep)."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    oversize = [L for L in sizes if L > SIZE_GUARD]
    if oversize and any(kind.startswith("oracle-") for kind in losses):
        raise ValueError(
            f"oracle kinds refuse L > {SIZE_GUARD} (requested {max(oversize)})"
        )

    scenarios = [
        (L, m, base_seed + i)
        for i, (L, m) in enumerate((L, m) for L in sizes for m in pcts)
    ]

    def _gen(args: tuple[int, float, int]) -> DetectionSet:
        L, m, seed = args
        return generate(SyntheticConfig(num_logits=L, positive_pct=m, seed=seed), delta=delta)

    _warmup(losses)

    if parallel_gen:
        with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
            datasets = list(pool.map(_gen, scenarios))
    else:
        datasets = [_gen(s) for s in scenarios]

    records: list[BenchRecord] = []
    for (L, m, seed), ds in zip(scenarios, datasets):
        for kind in losses:
            for rep in range(1, reps + 1):
                t0 = time.perf_counter()
                result, counters = evaluate_kind(ds, kind)
                dt = time.perf_counter() - t0
                records.append(
                    BenchRecord(
                        loss_kind=kind,
                        L=L,
                        m=m,
                        delta=delta,
                        seed=seed,
                        rep=rep,
                        wall_time_s=dt,
                        diff_ops=counters.diff_ops,
                        sort_ops=counters.sort_ops,
                        total_ops=counters.total_ops,
                        loss_value=result.loss,
                    )
                )
            if progress is not None:
                progress(f"{kind} L={L} m={m}: done {reps} reps")
    return records


_PAIRS = (("ap", "bap"), ("rs", "brs"))


def summarize(records: Sequence[BenchRecord]) -> dict:
    """Per-scenario mean/min wall time plus reference/bucketed speedups."""
    cells: dict[tuple[str, int, float], list[BenchRecord]] = {}
    for r in records:
        cells.setdefault((r.loss_kind, r.L, r.m), []).append(r)

    scenarios = []
    for (kind, L, m), rs in sorted(cells.items(), key=lambda kv: (kv[0][1], kv[0][2], kv[0][0])):
        times = [r.wall_time_s for r in rs]
        scenarios.append(
            {
                "loss": kind,
                "L": L,
                "m": m,
                "reps": len(rs),
                "mean_wall_time_s": sum(times) / len(times),
                "min_wall_time_s": min(times),
                "diff_ops": rs[0].diff_ops,
                "sort_ops": rs[0].sort_ops,
                "total_ops": rs[0].total_ops,
            }
        )

    by_key = {(s["loss"], s["L"], s["m"]): s for s in scenarios}
    speedups = []
    for ref, fast in _PAIRS:
        lms = sorted(
            {(s["L"], s["m"]) for s in scenarios if s["loss"] == ref}
            & {(s["L"], s["m"]) for s in scenarios if s["loss"] == fast}
        )
        for L, m in lms:
            slow_t = by_key[(ref, L, m)]["mean_wall_time_s"]
            fast_t = by_key[(fast, L, m)]["mean_wall_time_s"]
            speedups.append(
                {
                    "pair": f"{fast} vs {ref}",
                    "L": L,
                    "m": m,
                    "speedup": slow_t / fast_t if fast_t > 0 else float("inf"),
                }
            )
    return {"scenarios": scenarios, "speedups": speedups}


def summary_lines(summary: dict) -> list[str]:
    lines = ["scenario mean/min wall time:"]
    for s in summary["scenarios"]:
        lines.append(
            f"  {s['loss']:>9}  L={s['L']:<9} m={s['m']:<4} "
            f"mean={s['mean_wall_time_s']:.6f}s min={s['min_wall_time_s']:.6f}s "
            f"diff_ops={s['diff_ops']}"
        )
    if summary["speedups"]:
        lines.append("speedups (reference mean / bucketed mean):")
        for sp in summary["speedups"]:
            lines.append(
                f"  {sp['pair']:>10}  L={sp['L']:<9} m={sp['m']:<4} {sp['speedup']:.2f}x"
            )
    return lines
