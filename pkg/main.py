#!/usr/bin/env python3
"""
Composite Refactoring Miner
Groups single refactorings reported by a miner or an oracle into composite
refactorings and reports how often each kind occurs
"""
import sys
import logging
from datetime import datetime
from pathlib import Path
from typing import List, Optional, Sequence

import click

import config
from src import __version__
from src.artifact_store import ArtifactStore
from src.cluster import cluster
from src.ingest import FORMATS, FilterConfig, MinerContext, apply_filters, load_records
from src.metrics import corpus_stats
from src.model import CompositeMinerError, ConfigError, SchemaError, parse_timestamp
from src.plots import plot_age_distribution, plot_size_distribution
from src.report import build_bundle, emit_dot, emit_json, emit_markdown, format_stats_text, parse_json_report
from src.synth import generate_dataset, parse_mix

logger = logging.getLogger(__name__)

LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "warning": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def setup_logging(level_name: str = config.LOG_LEVEL):
    """Log to standard error (and LOG_FILE when set); standard output carries results only"""
    level = LOG_LEVELS.get((level_name or "").strip().lower())
    handlers = [logging.StreamHandler(sys.stderr)]
    if config.LOG_FILE:
        handlers.append(logging.FileHandler(config.LOG_FILE))
    logging.basicConfig(level=level or logging.WARNING, format=config.LOG_FORMAT, handlers=handlers)
    logging.getLogger().setLevel(level or logging.WARNING)
    if level is None:
        logger.warning(f"⚠️ Unknown COMPOSITE_MINER_LOG level {level_name!r}, using 'warn'")


class CompositeMinerApp:
    """Detection, statistics and synthesis runs behind the command line"""

    def detect(
        self,
        input_path: Path,
        fmt: str,
        out_dir: Path,
        emits: Sequence[str],
        filters: FilterConfig,
        min_size: int = config.DEFAULT_MIN_SIZE,
        context: Optional[MinerContext] = None,
        generated_at: Optional[datetime] = None,
    ) -> str:
        """Run ingest -> filter -> cluster -> metrics -> report and return the one-line summary"""
        logger.info(f"🚀 Detecting composites in {input_path}...")
        loaded = load_records(input_path, fmt, context)
        if loaded.skipped_total:
            logger.warning(f"⚠️ Skipped {loaded.skipped_total} unsupported operations: {loaded.skipped}")

        filtered = apply_filters(loaded.records, filters)
        singles = filtered.records
        composites = cluster(singles, min_size=min_size)
        stats = corpus_stats(singles, composites)
        bundle = build_bundle(singles, composites, stats, filters, generated_at, ingested=loaded.records)

        self.write_artifacts(bundle, out_dir, emits)
        logger.info("✅ Detection complete")
        return (
            f"{stats.singles_total} singles, {stats.composites_total} composites, "
            f"{stats.singles_in_composites_percent:.1f}% coverage"
        )

    def write_artifacts(self, bundle, out_dir: Path, emits: Sequence[str]):
        store = ArtifactStore(out_dir)
        if "json" in emits:
            store.save_json(emit_json(bundle))
        if "markdown" in emits:
            store.save_markdown(emit_markdown(bundle))
        if "dot" in emits:
            for composite in bundle.composites:
                n = store.next_dot_index(composite.kind.value)
                name = f"composite_{composite.kind.value}_{n}"
                store.save_dot(composite.kind.value, n, emit_dot(composite, name))
        if "plots" in emits:
            plot_size_distribution(bundle.composites, store.plots_dir / "size_distribution.png")
            plot_age_distribution(bundle.composites, store.plots_dir / "age_distribution.png")

    def stats(self, report_path: Path) -> str:
        """Statistics of a previous detect run, without clustering again"""
        try:
            with open(report_path, "r", encoding="utf-8") as f:
                text = f.read()
        except UnicodeDecodeError as e:
            raise SchemaError(f"malformed report ({report_path} is not valid UTF-8: {e.reason})") from None
        document = parse_json_report(text)
        return format_stats_text(document.stats)

    def synth(
        self,
        seed: int,
        singles: int,
        mix_text: Optional[str],
        noise: float,
        multi_commit: float,
        out_dir: Path,
    ) -> str:
        mix = parse_mix(mix_text) if mix_text is not None else None
        dataset = generate_dataset(seed, singles, mix, noise, multi_commit)
        store = ArtifactStore(out_dir)
        dataset_path = store.save_text(config.SYNTH_DATASET, dataset.to_jsonl())
        store.save_text(config.SYNTH_TRUTH, dataset.truth_json())
        return f"{len(dataset.records)} records, {len(dataset.planted)} planted composites -> {dataset_path}"


def build_filters(no_default_filters: bool, exclude_packages: Sequence[str], keep_constructors: bool,
                  only_projects: Sequence[str]) -> FilterConfig:
    fragments: List[str] = [] if no_default_filters else list(config.DEFAULT_EXCLUDED_PACKAGES)
    fragments.extend(exclude_packages)
    exclude_constructors = config.DEFAULT_EXCLUDE_CONSTRUCTORS and not (no_default_filters or keep_constructors)
    return FilterConfig(
        excluded_package_fragments=tuple(fragments),
        exclude_constructors=exclude_constructors,
        projects_allowlist=frozenset(only_projects) if only_projects else None,
    )


@click.group()
@click.version_option(__version__, prog_name="composite-miner")
def cli():
    """Composite refactoring detection over single-refactoring datasets."""


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False, path_type=Path),
              help="Refactoring records to analyze")
@click.option("--format", "fmt", required=True, type=click.Choice(FORMATS), help="Input format")
@click.option("--project", default=None, help="Project of miner-text input")
@click.option("--commit", default=None, help="Commit of miner-text input")
@click.option("--timestamp", default=None, help="Commit time of miner-text input (ISO-8601)")
@click.option("--out", "out_dir", default=config.DEFAULT_OUT_DIR, show_default=True,
              type=click.Path(file_okay=False, path_type=Path), help="Output directory")
@click.option("--emit", "emits", multiple=True, type=click.Choice(config.EMIT_CHOICES),
              help="Artifact to write (repeatable; default json and markdown)")
@click.option("--no-default-filters", is_flag=True, help="Keep test/sample/docs packages and constructors")
@click.option("--exclude-package", "exclude_packages", multiple=True,
              help="Package or path segment to drop (repeatable)")
@click.option("--keep-constructors", is_flag=True, help="Do not drop refactorings on constructors")
@click.option("--only-project", "only_projects", multiple=True, help="Keep only these projects (repeatable)")
@click.option("--min-size", default=config.DEFAULT_MIN_SIZE, show_default=True, type=click.IntRange(min=2),
              help="Smallest composite to report")
@click.option("--pin-timestamp", default=None, help="Generation time written to reports (ISO-8601)")
def detect(input_path, fmt, project, commit, timestamp, out_dir, emits, no_default_filters,
           exclude_packages, keep_constructors, only_projects, min_size, pin_timestamp):
    """Detect composite refactorings and write reports."""
    context = None
    if fmt == "miner-text":
        if not project or not commit:
            raise ConfigError("miner-text input needs --project and --commit")
        context = MinerContext(project, commit, parse_timestamp(timestamp))

    filters = build_filters(no_default_filters, exclude_packages, keep_constructors, only_projects)
    summary = CompositeMinerApp().detect(
        input_path,
        fmt,
        out_dir,
        list(emits) or config.DEFAULT_EMITS,
        filters,
        min_size=min_size,
        context=context,
        generated_at=parse_timestamp(pin_timestamp),
    )
    click.echo(summary)
    return 0


@cli.command()
@click.option("--report", "report_path", required=True, type=click.Path(dir_okay=False, path_type=Path),
              help="report.json written by detect")
def stats(report_path):
    """Print the frequency table and distributions of a report."""
    click.echo(CompositeMinerApp().stats(report_path), nl=False)
    return 0


@cli.command()
@click.option("--seed", required=True, type=click.IntRange(min=0, max=2**64 - 1))
@click.option("--singles", default=config.DEFAULT_SYNTH_SINGLES, show_default=True, type=click.IntRange(min=0))
@click.option("--composite-mix", "mix_text", default=None, help="kind=weight,... (default: every kind equally)")
@click.option("--noise", default=0.0, show_default=True, type=float, help="Fraction of singleton records")
@click.option("--multi-commit", default=0.0, show_default=True, type=float,
              help="Fraction of composites spread over several commits")
@click.option("--out", "out_dir", default=config.SYNTH_OUT_DIR, show_default=True,
              type=click.Path(file_okay=False, path_type=Path), help="Output directory")
def synth(seed, singles, mix_text, noise, multi_commit, out_dir):
    """Write a synthetic dataset and the composites planted in it."""
    click.echo(CompositeMinerApp().synth(seed, singles, mix_text, noise, multi_commit, out_dir))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point; returns 0 on success, 1 on input/usage errors, 2 on I/O errors"""
    try:
        setup_logging()
        result = cli.main(args=list(argv) if argv is not None else None, prog_name="composite-miner",
                          standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except CompositeMinerError as e:
        logger.error(f"❌ {e}")
        click.echo(f"error: {e}", err=True)
        return 1
    except OSError as e:
        logger.error(f"❌ I/O error: {e}")
        click.echo(f"error: {e}", err=True)
        return 2
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(main())
