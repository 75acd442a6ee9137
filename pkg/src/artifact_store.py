"""
Output directory layout for detection runs: JSON and markdown reports,
per-composite DOT graphs and distribution charts
"""
import logging
from collections import Counter
from pathlib import Path
from typing import Union

import config

logger = logging.getLogger(__name__)


class ArtifactStore:
    """Writes the artifacts of one run into a single output directory.

    One store per directory; callers write in a fixed order so repeated runs
    produce the same tree. OSError propagates to the caller.
    """

    def __init__(self, out_dir: Union[str, Path]):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.dot_dir = self.out_dir / config.DOT_DIR
        self._dot_counts = Counter()

    @property
    def plots_dir(self) -> Path:
        path = self.out_dir / config.PLOTS_DIR
        path.mkdir(exist_ok=True)
        return path

    def _write(self, path: Path, content: str) -> Path:
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(content)
        except OSError as e:
            logger.error(f"❌ Error saving {path}: {e}")
            raise
        logger.info(f"📁 Saved: {path}")
        return path

    def save_text(self, filename: str, text: str) -> Path:
        return self._write(self.out_dir / filename, text)

    def save_json(self, text: str, filename: str = config.REPORT_JSON) -> Path:
        return self.save_text(filename, text)

    def save_markdown(self, text: str, filename: str = config.REPORT_MARKDOWN) -> Path:
        return self.save_text(filename, text)

    def next_dot_index(self, kind: str) -> int:
        """1-based position of the next graph of this composite kind"""
        return self._dot_counts[kind] + 1

    def save_dot(self, kind: str, n: int, text: str) -> Path:
        self.dot_dir.mkdir(exist_ok=True)
        self._dot_counts[kind] = max(self._dot_counts[kind], n)
        return self._write(self.dot_dir / f"composite_{kind}_{n}.dot", text)
