"""
Composite detection: every single refactoring contributes one grouping key
per composite kind it can take part in, and records sharing a key form a
composite. No time or commit constraint is applied.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

import config
from .metrics import member_age_days, member_scope
from .model import (
    Composite, CompositeKind, ElementRef, IntegrityError, RefactoringKind, RefactoringRecord,
)

logger = logging.getLogger(__name__)

EXTRACTIONS = (RefactoringKind.EXTRACT, RefactoringKind.EXTRACT_MOVE)
MOVES = (RefactoringKind.MOVE, RefactoringKind.MOVE_RENAME)


@dataclass(frozen=True)
class ClusterKey:
    """Grouping key; records are only clustered within the system (project) they were mined from"""
    kind: CompositeKind
    element: ElementRef
    project: str = ""


def keys_for(record: RefactoringRecord) -> List[ClusterKey]:
    """Every (composite kind, anchor) the record can contribute to"""
    kind, project = record.kind, record.project
    if kind in EXTRACTIONS:
        return [
            ClusterKey(CompositeKind.METHOD_COMPOSITION, record.target, project),
            ClusterKey(CompositeKind.METHOD_DECOMPOSITION, record.source, project),
        ]
    if kind in MOVES:
        return [ClusterKey(CompositeKind.CLASS_DECOMPOSITION, ElementRef.for_class(record.source.class_fqn), project)]
    if kind is RefactoringKind.INLINE:
        return [ClusterKey(CompositeKind.COMPOSITE_INLINE_METHOD, record.source, project)]
    if kind is RefactoringKind.PULL_UP_METHOD:
        return [ClusterKey(CompositeKind.COMPOSITE_PULL_UP_METHOD, record.target, project)]
    if kind is RefactoringKind.PUSH_DOWN_METHOD:
        return [ClusterKey(CompositeKind.COMPOSITE_PUSH_DOWN_METHOD, record.source, project)]
    if kind is RefactoringKind.PULL_UP_FIELD:
        return [ClusterKey(CompositeKind.COMPOSITE_PULL_UP_FIELD, record.target, project)]
    return [ClusterKey(CompositeKind.COMPOSITE_PUSH_DOWN_FIELD, record.source, project)]


def make_composite(kind: CompositeKind, anchor: ElementRef, records: List[RefactoringRecord]) -> Composite:
    members = tuple(sorted(records, key=lambda record: record.sort_key()))
    return Composite(
        kind=kind,
        anchor=anchor,
        members=members,
        commits=frozenset(member.commit for member in members),
        age_days=member_age_days(members),
        scope=member_scope(kind, members),
    )


def composite_sort_key(composite: Composite) -> Tuple:
    return (
        composite.kind.order,
        composite.anchor.class_fqn,
        composite.anchor.member,
        composite.project,
        composite.members[0].sort_key(),
    )


def cluster(records: List[RefactoringRecord], min_size: int = config.DEFAULT_MIN_SIZE) -> List[Composite]:
    """Group records sharing a key into composites, in canonical order"""
    if min_size < 2:
        raise ValueError("a composite has at least two members")
    groups: Dict[ClusterKey, List[RefactoringRecord]] = defaultdict(list)
    for record in records:
        for key in keys_for(record):
            groups[key].append(record)

    composites = [
        make_composite(key.kind, key.element, members)
        for key, members in groups.items()
        if len(members) >= min_size
    ]
    composites.sort(key=composite_sort_key)
    logger.info(f"🧩 Clustered {len(records)} records into {len(composites)} composites")
    return composites


# ---------------------------------------------------------------------------
# Brute-force oracle: pairwise conditions plus transitive closure
# ---------------------------------------------------------------------------

class UnionFind:
    """Disjoint sets over record positions"""

    def __init__(self):
        self.parent = {}

    def find(self, x):
        if x not in self.parent:
            self.parent[x] = x
            return x
        if self.parent[x] != x:
            self.parent[x] = self.find(self.parent[x])
        return self.parent[x]

    def union(self, x, y):
        px = self.find(x)
        py = self.find(y)
        self.parent[px] = self.parent[py] = min(px, py)


def _same_element(a: ElementRef, b: ElementRef) -> bool:
    # same declaring class and same normalized member
    return a.member == b.member and a.class_fqn == b.class_fqn


Pairwise = Tuple[Tuple[RefactoringKind, ...], Callable[[RefactoringRecord, RefactoringRecord], bool], Callable]

_CONDITIONS: Dict[CompositeKind, Pairwise] = {
    CompositeKind.METHOD_COMPOSITION: (
        EXTRACTIONS, lambda r1, r2: _same_element(r1.target, r2.target), lambda r: r.target,
    ),
    CompositeKind.METHOD_DECOMPOSITION: (
        EXTRACTIONS, lambda r1, r2: _same_element(r1.source, r2.source), lambda r: r.source,
    ),
    CompositeKind.CLASS_DECOMPOSITION: (
        MOVES,
        lambda r1, r2: r1.source.class_fqn == r2.source.class_fqn,
        lambda r: ElementRef.for_class(r.source.class_fqn),
    ),
    CompositeKind.COMPOSITE_INLINE_METHOD: (
        (RefactoringKind.INLINE,), lambda r1, r2: _same_element(r1.source, r2.source), lambda r: r.source,
    ),
    CompositeKind.COMPOSITE_PULL_UP_METHOD: (
        (RefactoringKind.PULL_UP_METHOD,), lambda r1, r2: _same_element(r1.target, r2.target), lambda r: r.target,
    ),
    CompositeKind.COMPOSITE_PUSH_DOWN_METHOD: (
        (RefactoringKind.PUSH_DOWN_METHOD,), lambda r1, r2: _same_element(r1.source, r2.source), lambda r: r.source,
    ),
    CompositeKind.COMPOSITE_PULL_UP_FIELD: (
        (RefactoringKind.PULL_UP_FIELD,), lambda r1, r2: _same_element(r1.target, r2.target), lambda r: r.target,
    ),
    CompositeKind.COMPOSITE_PUSH_DOWN_FIELD: (
        (RefactoringKind.PUSH_DOWN_FIELD,), lambda r1, r2: _same_element(r1.source, r2.source), lambda r: r.source,
    ),
}


def pair_clusters(kind: CompositeKind, r1: RefactoringRecord, r2: RefactoringRecord) -> bool:
    """True when the two records satisfy the clustering condition for `kind`"""
    ref_types, condition, _ = _CONDITIONS[kind]
    return (
        r1.kind in ref_types
        and r2.kind in ref_types
        and r1.project == r2.project
        and condition(r1, r2)
    )


def brute_force_cluster(records: List[RefactoringRecord]) -> List[Composite]:
    """O(n²) reference implementation of `cluster` for tests"""
    if len(records) > config.BRUTE_FORCE_MAX_RECORDS:
        raise IntegrityError(
            f"brute-force clustering is limited to {config.BRUTE_FORCE_MAX_RECORDS} records, got {len(records)}"
        )

    composites = []
    for kind, (ref_types, _, anchor_of) in _CONDITIONS.items():
        candidates = [record for record in records if record.kind in ref_types]
        sets = UnionFind()
        for i in range(len(candidates)):
            sets.find(i)
            for j in range(i + 1, len(candidates)):
                if pair_clusters(kind, candidates[i], candidates[j]):
                    sets.union(i, j)

        components: Dict[int, List[RefactoringRecord]] = defaultdict(list)
        for i, record in enumerate(candidates):
            components[sets.find(i)].append(record)
        composites.extend(
            make_composite(kind, anchor_of(members[0]), members)
            for members in components.values()
            if len(members) >= 2
        )

    composites.sort(key=composite_sort_key)
    return composites
