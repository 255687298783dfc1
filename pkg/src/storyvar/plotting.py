"""Figures for evaluation reports, written next to the delimited output."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .evaluation import ConversationMetrics, SimilarityReport  # noqa: E402

RC = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
    "savefig.dpi": 150,
}

_PANELS = (
    ("Implications applied (step 3)", ("n_imp_rule", "n_imp_llm", "n_imp_both"), ("RuleEng", "LLM", "both")),
    ("User stories (step 3)", ("n_us_rule", "n_us_llm", "n_us_both"), ("RuleEng", "LLM", "both")),
    ("User stories (steps 3 and 4)", ("n_us_step3", "n_us_step4", "n_us_both34"), ("step 3", "step 4", "both")),
)


def _grouped_bars(ax, rows, cols, names):
    x = np.arange(len(rows))
    width = 0.8 / len(cols)
    for k, (col, name) in enumerate(zip(cols, names)):
        ax.bar(x + (k - 1) * width, [getattr(r, col) for r in rows], width, label=name)
    ax.set_xticks(x)
    ax.set_xticklabels([r.conversation_id for r in rows], rotation=90 if len(rows) > 12 else 0)


def plot_metrics(rows: Sequence[ConversationMetrics], path: str | Path) -> Path:
    """One panel per comparison table, conversations on the x axis."""
    path = Path(path)
    with plt.rc_context(RC):
        fig, axes = plt.subplots(len(_PANELS), 1, figsize=(max(6.0, 0.4 * len(rows) + 2), 8), sharex=True)
        for ax, (title, cols, names) in zip(axes, _PANELS):
            _grouped_bars(ax, rows, cols, names)
            ax.set_title(title)
            ax.set_ylabel("count")
            ax.legend(ncol=3, loc="upper right")
        axes[-1].set_xlabel("conversation")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def plot_option_counts(sim: SimilarityReport, path: str | Path) -> Path:
    path = Path(path)
    with plt.rc_context(RC):
        fig, (left, right) = plt.subplots(1, 2, figsize=(9, 3.5))
        counts = np.array(sim.option_counts)
        bins = np.arange(counts.min(), counts.max() + 2) - 0.5
        left.hist(counts, bins=bins, rwidth=0.85)
        left.axvline(sim.mean_option_count, color="k", ls="--", lw=1)
        left.set_xlabel("options per summary")
        left.set_ylabel("summaries")
        left.set_title(f"mean {sim.mean_option_count:.2f}")

        top = sorted(sim.clusters, key=lambda c: -c.frequency)[:12]
        right.barh([c.label for c in top][::-1], [c.frequency for c in top][::-1])
        right.axvline(sim.n_summaries / 2, color="k", ls=":", lw=1)
        right.set_xlabel("summaries containing the option")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path
