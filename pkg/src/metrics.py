"""
Per-composite characteristics (age, scope) and corpus-level statistics
"""
import logging
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

import config
from .model import (
    Composite, CompositeKind, IntegrityError, RefactoringKind, RefactoringRecord, Scope,
)

logger = logging.getLogger(__name__)

SIZE_PERCENTILES = (("median", 50), ("p90", 90))
AGE_PERCENTILES = (("median", 50), ("p75", 75), ("p90", 90))


def member_age_days(members: Iterable[RefactoringRecord]) -> Optional[int]:
    timestamps = [member.timestamp for member in members if member.timestamp is not None]
    if len(timestamps) < 2:
        return None
    # timedelta.days floors to whole days
    return (max(timestamps) - min(timestamps)).days


def member_scope(kind: CompositeKind, members: Iterable[RefactoringRecord]) -> Optional[Scope]:
    if not kind.has_scope:
        return None
    labels = {member.source.class_fqn == member.target.class_fqn for member in members}
    if labels == {True}:
        return Scope.INTRA_CLASS
    if labels == {False}:
        return Scope.INTER_CLASS
    return Scope.MIXED


def composite_age_days(c: Composite) -> Optional[int]:
    """Whole days between the oldest and the most recent member; None with fewer than two timestamps"""
    return member_age_days(c.members)


def classify_scope(c: Composite) -> Optional[Scope]:
    """intra_class / inter_class / mixed for extraction composites, None (not applicable) otherwise"""
    return member_scope(c.kind, c.members)


def percent(part: int, whole: int) -> float:
    return round(100.0 * part / whole, 1) if whole else 0.0


@dataclass
class Distribution:
    count: int = 0
    histogram: Dict[int, int] = field(default_factory=dict)
    minimum: Optional[int] = None
    maximum: Optional[int] = None
    percentiles: Dict[str, Optional[int]] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["histogram"] = {str(value): count for value, count in self.histogram.items()}
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "Distribution":
        return cls(
            count=data["count"],
            histogram={int(value): count for value, count in data["histogram"].items()},
            minimum=data["minimum"],
            maximum=data["maximum"],
            percentiles=dict(data["percentiles"]),
        )


def distribution(values: Sequence[int], percentiles: Sequence[Tuple[str, int]]) -> Distribution:
    """Histogram plus nearest-rank percentiles"""
    if not values:
        return Distribution(percentiles={name: None for name, _ in percentiles})
    ordered = np.sort(np.asarray(values, dtype=np.int64))
    return Distribution(
        count=len(values),
        histogram=dict(sorted(Counter(int(value) for value in values).items())),
        minimum=int(ordered[0]),
        maximum=int(ordered[-1]),
        # inverted_cdf is the nearest-rank estimator
        percentiles={name: int(np.percentile(ordered, q, method="inverted_cdf")) for name, q in percentiles},
    )


@dataclass
class KindStats:
    composite_count: int = 0
    operation_count: int = 0
    project_count: int = 0
    percent_of_composites: float = 0.0


@dataclass
class OperationStats:
    projects: int = 0
    commits: int = 0
    occurrences: int = 0
    percent: float = 0.0


@dataclass
class ProjectStats:
    singles: int = 0
    composites: int = 0
    singles_in_composites: int = 0
    scopes: Dict[str, Dict[str, int]] = field(default_factory=dict)


@dataclass
class CorpusStats:
    per_kind: Dict[CompositeKind, KindStats]
    singles_total: int
    singles_in_composites: int
    singles_in_composites_percent: float
    composites_total: int
    projects_with_composites: int
    single_composite_projects: int
    size_distribution: Distribution
    size_by_kind: Dict[CompositeKind, Distribution]
    small_composite_count: int
    small_composite_percent: float
    age_distribution: Distribution
    scope_breakdown: Dict[CompositeKind, Dict[Scope, int]]
    multi_commit_count: int
    multi_commit_percent: float
    multi_commit_single_day_count: int
    operations: Dict[RefactoringKind, OperationStats]
    per_project: Dict[str, ProjectStats]

    def to_dict(self) -> Dict:
        return {
            "per_kind": {kind.value: asdict(stats) for kind, stats in self.per_kind.items()},
            "singles_total": self.singles_total,
            "singles_in_composites": self.singles_in_composites,
            "singles_in_composites_percent": self.singles_in_composites_percent,
            "composites_total": self.composites_total,
            "projects_with_composites": self.projects_with_composites,
            "single_composite_projects": self.single_composite_projects,
            "size_distribution": self.size_distribution.to_dict(),
            "size_by_kind": {kind.value: dist.to_dict() for kind, dist in self.size_by_kind.items()},
            "small_composite_count": self.small_composite_count,
            "small_composite_percent": self.small_composite_percent,
            "age_distribution": self.age_distribution.to_dict(),
            "scope_breakdown": {
                kind.value: {scope.value: count for scope, count in scopes.items()}
                for kind, scopes in self.scope_breakdown.items()
            },
            "multi_commit_count": self.multi_commit_count,
            "multi_commit_percent": self.multi_commit_percent,
            "multi_commit_single_day_count": self.multi_commit_single_day_count,
            "operations": {kind.value: asdict(stats) for kind, stats in self.operations.items()},
            "per_project": {project: asdict(stats) for project, stats in self.per_project.items()},
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "CorpusStats":
        return cls(
            per_kind={CompositeKind(kind): KindStats(**stats) for kind, stats in data["per_kind"].items()},
            singles_total=data["singles_total"],
            singles_in_composites=data["singles_in_composites"],
            singles_in_composites_percent=data["singles_in_composites_percent"],
            composites_total=data["composites_total"],
            projects_with_composites=data["projects_with_composites"],
            single_composite_projects=data["single_composite_projects"],
            size_distribution=Distribution.from_dict(data["size_distribution"]),
            size_by_kind={CompositeKind(kind): Distribution.from_dict(dist) for kind, dist in data["size_by_kind"].items()},
            small_composite_count=data["small_composite_count"],
            small_composite_percent=data["small_composite_percent"],
            age_distribution=Distribution.from_dict(data["age_distribution"]),
            scope_breakdown={
                CompositeKind(kind): {Scope(scope): count for scope, count in scopes.items()}
                for kind, scopes in data["scope_breakdown"].items()
            },
            multi_commit_count=data["multi_commit_count"],
            multi_commit_percent=data["multi_commit_percent"],
            multi_commit_single_day_count=data["multi_commit_single_day_count"],
            operations={RefactoringKind(kind): OperationStats(**stats) for kind, stats in data["operations"].items()},
            per_project={project: ProjectStats(**stats) for project, stats in data["per_project"].items()},
        )


def corpus_stats(singles: List[RefactoringRecord], composites: List[Composite]) -> CorpusStats:
    """Frequency tables and distributions over a clustered corpus"""
    known_ids = {record.id for record in singles}
    in_composites = set()
    for composite in composites:
        unknown = [member_id for member_id in composite.member_ids if member_id not in known_ids]
        if unknown:
            raise IntegrityError(
                f"{composite.kind.value} at {composite.anchor.label} references unknown record(s): {', '.join(unknown)}"
            )
        in_composites.update(composite.member_ids)

    total = len(composites)
    per_kind = {kind: KindStats() for kind in CompositeKind}
    kind_projects = {kind: set() for kind in CompositeKind}
    for composite in composites:
        stats = per_kind[composite.kind]
        stats.composite_count += 1
        stats.operation_count += composite.size
        kind_projects[composite.kind].add(composite.project)
    for kind, stats in per_kind.items():
        stats.project_count = len(kind_projects[kind])
        stats.percent_of_composites = percent(stats.composite_count, total)

    composites_per_project = Counter(composite.project for composite in composites)
    sizes = [composite.size for composite in composites]
    small = sum(1 for size in sizes if size <= config.SMALL_COMPOSITE_MAX_SIZE)
    multi_commit = [composite for composite in composites if composite.is_multi_commit]

    scope_breakdown = {
        kind: {scope: 0 for scope in Scope} for kind in CompositeKind if kind.has_scope
    }
    for composite in composites:
        if composite.scope is not None:
            scope_breakdown[composite.kind][composite.scope] += 1

    stats = CorpusStats(
        per_kind=per_kind,
        singles_total=len(singles),
        singles_in_composites=len(in_composites),
        singles_in_composites_percent=percent(len(in_composites), len(singles)),
        composites_total=total,
        projects_with_composites=len(composites_per_project),
        single_composite_projects=sum(1 for count in composites_per_project.values() if count == 1),
        size_distribution=distribution(sizes, SIZE_PERCENTILES),
        size_by_kind={
            kind: distribution([c.size for c in composites if c.kind is kind], SIZE_PERCENTILES)
            for kind in CompositeKind
        },
        small_composite_count=small,
        small_composite_percent=percent(small, total),
        age_distribution=distribution(
            [c.age_days for c in composites if c.age_days is not None], AGE_PERCENTILES
        ),
        scope_breakdown=scope_breakdown,
        multi_commit_count=len(multi_commit),
        multi_commit_percent=percent(len(multi_commit), total),
        multi_commit_single_day_count=sum(1 for c in multi_commit if c.age_days == 0),
        operations=operation_table(singles),
        per_project=project_table(singles, composites, in_composites),
    )
    logger.info(
        f"📊 {stats.singles_in_composites}/{stats.singles_total} singles in {stats.composites_total} composites"
    )
    return stats


def operation_table(singles: List[RefactoringRecord]) -> Dict[RefactoringKind, OperationStats]:
    """Projects, commits and occurrences per single refactoring kind"""
    table = {kind: OperationStats() for kind in RefactoringKind}
    if not singles:
        return table
    # commits are identified within their project
    frame = pd.DataFrame(
        [(record.kind.value, record.project, f"{record.project}@{record.commit}") for record in singles],
        columns=["kind", "project", "commit"],
    )
    grouped = frame.groupby("kind").agg(
        projects=("project", "nunique"),
        commits=("commit", "nunique"),
        occurrences=("project", "size"),
    )
    for kind_value, row in grouped.iterrows():
        table[RefactoringKind(kind_value)] = OperationStats(
            projects=int(row["projects"]),
            commits=int(row["commits"]),
            occurrences=int(row["occurrences"]),
            percent=percent(int(row["occurrences"]), len(singles)),
        )
    return table


def project_table(
    singles: List[RefactoringRecord], composites: List[Composite], in_composites: set
) -> Dict[str, ProjectStats]:
    table: Dict[str, ProjectStats] = {}
    for record in singles:
        stats = table.setdefault(record.project, ProjectStats())
        stats.singles += 1
        if record.id in in_composites:
            stats.singles_in_composites += 1
    for composite in composites:
        stats = table.setdefault(composite.project, ProjectStats())
        stats.composites += 1
        if composite.scope is not None:
            scopes = stats.scopes.setdefault(composite.kind.value, {scope.value: 0 for scope in Scope})
            scopes[composite.scope.value] += 1
    return dict(sorted(table.items()))
