"""
Distribution charts for a detection run (headless matplotlib + seaborn)
"""
import logging
from pathlib import Path
from typing import List, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns

from .model import Composite, CompositeKind

logger = logging.getLogger(__name__)


def _frame(composites: List[Composite]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "kind": [c.kind.display_name for c in composites],
            "size": [c.size for c in composites],
            "age_days": [c.age_days for c in composites],
            "multi_commit": [c.is_multi_commit for c in composites],
        }
    )


def plot_size_distribution(composites: List[Composite], path: Path) -> Optional[Path]:
    """Strip chart of composite sizes per kind; None when there is nothing to draw"""
    if not composites:
        logger.info("💤 No composites, skipping the size chart")
        return None
    frame = _frame(composites)
    order = [kind.display_name for kind in CompositeKind if kind.display_name in set(frame["kind"])]

    fig, ax = plt.subplots(figsize=(10, 4.5), constrained_layout=True)
    sns.stripplot(data=frame, x="size", y="kind", order=order, jitter=0.25, alpha=0.7, ax=ax)
    ax.set_xlabel("Single refactorings per composite")
    ax.set_ylabel("")
    ax.grid(True, axis="x", alpha=0.3)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    logger.info(f"📈 Size chart saved: {path}")
    return Path(path)


def plot_age_distribution(composites: List[Composite], path: Path) -> Optional[Path]:
    """Histogram of ages (days) of multi-commit composites; skipped when no age is defined"""
    frame = _frame(composites)
    frame = frame[frame["multi_commit"] & frame["age_days"].notna()] if not frame.empty else frame
    if frame.empty:
        logger.info("💤 No composite has a defined age, skipping the age chart")
        return None

    fig, ax = plt.subplots(figsize=(8, 4), constrained_layout=True)
    sns.histplot(data=frame, x="age_days", bins=min(30, max(5, len(frame))), ax=ax)
    ax.set_xlabel("Age (days)")
    ax.set_ylabel("Composites")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    logger.info(f"📈 Age chart saved: {path}")
    return Path(path)
