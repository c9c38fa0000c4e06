"""Report emission: JSON documents, CSV summaries, and rendered figures.

JSON output is deterministic (sorted keys) so identical manifests produce
byte-identical reports apart from recorded runtimes.  Wherever the CLI
writes delimited data it also renders a matplotlib figure next to it.
"""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

TREND_COLUMNS = ["n", "B", "s", "epsilon_measured", "epsilon_bound"]


@dataclass
class RunManifest:
    """Everything needed to replay a CLI invocation."""

    command: str
    config: dict
    outputs: list = field(default_factory=list)
    version: str = "0.1.0"

    def to_dict(self) -> dict:
        return asdict(self)


def write_json_report(path, manifest: RunManifest, payload: dict) -> None:
    doc = {"manifest": manifest.to_dict(), **payload}
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def write_csv_row(path, payload: dict) -> None:
    """Flatten one report into a single CSV row of its scalar fields."""
    scalars = {
        k: v for k, v in payload.items() if isinstance(v, (int, float, str, bool)) or v is None
    }
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(scalars))
        writer.writeheader()
        writer.writerow(scalars)


def write_trend_csv(path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TREND_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def figure_path_for(out_path, suffix: str = "") -> Path:
    p = Path(out_path)
    stem = p.stem + (f"_{suffix}" if suffix else "")
    return p.with_name(stem + ".png")


def render_trend_figure(path, rows: list[dict]) -> None:
    """Measured error and its bound versus code length, log-scale y."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ns = [row["n"] for row in rows]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(ns, [row["epsilon_measured"] for row in rows], "o-", label="measured error")
    ax.plot(ns, [row["epsilon_bound"] for row in rows], "s--", label="2s bound")
    ax.set_xlabel("code length n")
    ax.set_ylabel("identity-decoder error")
    ax.set_yscale("log")
    ax.set_xscale("log", base=2)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_residual_histogram(path, residuals_by_grid: dict[str, list[float]]) -> None:
    """Distribution of phase-alignment residuals for each angle grid."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    for label, residuals in residuals_by_grid.items():
        ax.hist(residuals, bins=32, alpha=0.6, label=f"{label} grid")
    ax.set_xlabel("alignment residual (radians)")
    ax.set_ylabel("basis states")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
