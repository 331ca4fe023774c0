"""Frontier reports: sweep the throughput target, chart the winners.

For each SLO value in a sweep the planner is re-run and the winning
instance's price, predicted TPS, and cost efficiency are collected. The
report writer emits a delimited CSV next to a rendered PNG figure so the
same numbers can feed both spreadsheets and humans. Infeasible SLO points
appear as gaps, not errors.
"""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .calibration import CalibrationStore
from .catalog import Catalog
from .model_registry import ModelSpec, WorkloadSpec
from .planner import PlannerOptions, recommend

CSV_COLUMNS = (
    "slo_tps",
    "winner",
    "price_per_hour_usd",
    "predicted_tps",
    "c_off",
    "billed_cost_usd",
    "cost_efficiency_tokens_per_usd",
)


@dataclass(frozen=True)
class FrontierPoint:
    """Winner summary at one SLO setting; winner is None when infeasible."""

    slo_tps: float
    winner: str | None
    price_per_hour: float | None = None
    predicted_tps: float | None = None
    c_off: float | None = None
    billed_cost: float | None = None
    cost_efficiency: float | None = None
    cause: str | None = None


def sweep_frontier(
    model: ModelSpec,
    workload: WorkloadSpec,
    catalog: Catalog,
    store: CalibrationStore | None,
    slo_values: list[float],
    options: PlannerOptions | None = None,
) -> list[FrontierPoint]:
    """Re-plan the same workload across a range of throughput targets."""
    points: list[FrontierPoint] = []
    for slo in slo_values:
        rec = recommend(
            model,
            dataclasses.replace(workload, slo_tps=slo),
            catalog,
            store,
            options,
        )
        if rec.winner is None:
            points.append(FrontierPoint(slo_tps=slo, winner=None, cause=rec.no_feasible_cause))
            continue
        win = rec.winner
        points.append(
            FrontierPoint(
                slo_tps=slo,
                winner=win.name,
                price_per_hour=win.candidate.instance.price_per_hour,
                predicted_tps=win.prediction.tps,
                c_off=win.candidate.c_off,
                billed_cost=win.cost.billed_cost,
                cost_efficiency=win.cost.cost_efficiency,
            )
        )
    return points


def write_frontier_csv(points: list[FrontierPoint], path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for p in points:
            writer.writerow(
                [
                    p.slo_tps,
                    p.winner or "",
                    _blank(p.price_per_hour),
                    _blank(p.predicted_tps),
                    _blank(p.c_off),
                    _blank(p.billed_cost),
                    _blank(p.cost_efficiency),
                ]
            )


def _blank(value: float | None) -> object:
    return "" if value is None else value


def render_frontier_figure(points: list[FrontierPoint], path: str | Path) -> None:
    """Two stacked panels: winner billed cost and winner TPS against the SLO."""
    feasible = [p for p in points if p.winner is not None]
    fig, (ax_cost, ax_tps) = plt.subplots(2, 1, sharex=True, figsize=(8, 6))

    if feasible:
        slos = [p.slo_tps for p in feasible]
        ax_cost.step(slos, [p.billed_cost for p in feasible], where="post", color="tab:blue")
        ax_cost.scatter(slos, [p.billed_cost for p in feasible], color="tab:blue", s=18)
        ax_tps.step(slos, [p.predicted_tps for p in feasible], where="post", color="tab:green")
        ax_tps.scatter(slos, [p.predicted_tps for p in feasible], color="tab:green", s=18)
        ax_tps.plot(
            [p.slo_tps for p in points],
            [p.slo_tps for p in points],
            linestyle="--",
            color="grey",
            linewidth=1,
            label="target",
        )
        seen: set[str] = set()
        for p in feasible:
            if p.winner not in seen:
                seen.add(p.winner)
                ax_cost.annotate(
                    p.winner,
                    (p.slo_tps, p.billed_cost),
                    textcoords="offset points",
                    xytext=(4, 6),
                    fontsize=8,
                )
        ax_tps.legend(loc="upper left", fontsize=8)

    for p in points:
        if p.winner is None:
            ax_cost.axvline(p.slo_tps, color="tab:red", alpha=0.2, linewidth=4)

    ax_cost.set_ylabel("winner billed cost (USD)")
    ax_tps.set_ylabel("winner predicted TPS")
    ax_tps.set_xlabel("SLO target (tokens/s)")
    ax_cost.set_title("Cheapest SLO-meeting instance across throughput targets")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_frontier_report(
    points: list[FrontierPoint], out_dir: str | Path
) -> tuple[Path, Path]:
    """Write frontier.csv and frontier.png into out_dir; returns both paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "frontier.csv"
    png_path = out / "frontier.png"
    write_frontier_csv(points, csv_path)
    render_frontier_figure(points, png_path)
    return csv_path, png_path
