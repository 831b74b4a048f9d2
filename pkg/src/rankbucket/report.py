"""Figure rendering for benchmark CSV output.

Consumes the bench CSV (file or already-parsed rows) and writes a small
set of matplotlib figures next to a derived summary table. Kept separate
from the bench itself so CSV stays the interchange format and plotting
never runs inside a timed path.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

__all__ = ["load_csv", "render_figures", "write_summary_csv"]

_EXPECTED_FIELDS = [
    "loss", "L", "m", "delta", "seed", "rep",
    "wall_time_s", "diff_ops", "sort_ops", "total_ops", "loss_value",
]


def load_csv(path) -> list[dict]:
    """Parse a bench CSV into typed row dicts."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != _EXPECTED_FIELDS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        for raw in reader:
            rows.append(
                {
                    "loss": raw["loss"],
                    "L": int(raw["L"]),
                    "m": float(raw["m"]),
                    "delta": float(raw["delta"]),
                    "seed": int(raw["seed"]),
                    "rep": int(raw["rep"]),
                    "wall_time_s": float(raw["wall_time_s"]),
                    "diff_ops": int(raw["diff_ops"]),
                    "sort_ops": int(raw["sort_ops"]),
                    "total_ops": int(raw["total_ops"]),
                    "loss_value": float(raw["loss_value"]),
                }
            )
    if not rows:
        raise ValueError("CSV contains no data rows")
    return rows


def _cell_means(rows: list[dict]) -> dict[tuple[str, int, float], dict]:
    cells: dict[tuple[str, int, float], list[dict]] = defaultdict(list)
    for r in rows:
        cells[(r["loss"], r["L"], r["m"])].append(r)
    out = {}
    for key, rs in cells.items():
        out[key] = {
            "mean_wall_time_s": sum(r["wall_time_s"] for r in rs) / len(rs),
            "min_wall_time_s": min(r["wall_time_s"] for r in rs),
            "diff_ops": rs[0]["diff_ops"],
            "total_ops": rs[0]["total_ops"],
            "reps": len(rs),
        }
    return out


def write_summary_csv(rows: list[dict], out_path: Path) -> Path:
    cells = _cell_means(rows)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("loss,L,m,reps,mean_wall_time_s,min_wall_time_s,diff_ops,total_ops\n")
        for (loss, L, m), c in sorted(cells.items(), key=lambda kv: (kv[0][1], kv[0][2], kv[0][0])):
            fh.write(
                f"{loss},{L},{m},{c['reps']},{c['mean_wall_time_s']!r},"
                f"{c['min_wall_time_s']!r},{c['diff_ops']},{c['total_ops']}\n"
            )
    return out_path


def render_figures(rows: list[dict], out_dir, formats: tuple[str, ...] = ("png",)) -> list[Path]:
    """Write wall-time, op-count, and speedup figures; returns the paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cells = _cell_means(rows)
    losses = sorted({k[0] for k in cells})
    ms = sorted({k[2] for k in cells})
    written: list[Path] = []

    def _save(fig, stem: str) -> None:
        for fmt in formats:
            path = out_dir / f"{stem}.{fmt}"
            fig.savefig(path, bbox_inches="tight", dpi=150)
            written.append(path)
        plt.close(fig)

    fig, ax = plt.subplots(figsize=(7, 5))
    for loss in losses:
        for m in ms:
            pts = sorted(
                (L, c["mean_wall_time_s"])
                for (lk, L, mm), c in cells.items()
                if lk == loss and mm == m
            )
            if len(pts) >= 1:
                ax.plot(*zip(*pts), marker="o", label=f"{loss}, m={m}%")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("logits L")
    ax.set_ylabel("mean wall time per evaluation (s)")
    ax.set_title("Loss evaluation time")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    _save(fig, "wall_time")

    fig, ax = plt.subplots(figsize=(7, 5))
    for loss in losses:
        for m in ms:
            pts = sorted(
                (L, c["diff_ops"])
                for (lk, L, mm), c in cells.items()
                if lk == loss and mm == m and c["diff_ops"] > 0
            )
            if len(pts) >= 1:
                ax.plot(*zip(*pts), marker="s", label=f"{loss}, m={m}%")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("logits L")
    ax.set_ylabel("difference-transform evaluations")
    ax.set_title("Pairwise work")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    _save(fig, "diff_ops")

    pairs = [(a, b) for a, b in (("ap", "bap"), ("rs", "brs")) if a in losses and b in losses]
    if pairs:
        fig, ax = plt.subplots(figsize=(7, 5))
        for ref, fast in pairs:
            for m in ms:
                pts = []
                for (lk, L, mm), c in cells.items():
                    if lk == ref and mm == m and (fast, L, m) in cells:
                        pts.append((L, c["mean_wall_time_s"] / cells[(fast, L, m)]["mean_wall_time_s"]))
                pts.sort()
                if pts:
                    ax.plot(*zip(*pts), marker="^", label=f"{fast} vs {ref}, m={m}%")
        ax.set_xscale("log")
        ax.set_xlabel("logits L")
        ax.set_ylabel("speedup (reference / bucketed)")
        ax.set_title("Bucketing speedup")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize=8)
        _save(fig, "speedup")

    write_summary_csv(rows, out_dir / "summary.csv")
    written.append(out_dir / "summary.csv")
    return written
