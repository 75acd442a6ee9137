"""
Shared test support: the brute-force clustering oracle, worked-example
fixtures with their expected composites, and a record generator with
frequent key collisions
"""
import json
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

import config
from .cluster import brute_force_cluster
from .ingest import parse_jsonl
from .model import (
    Composite, CompositeKind, ElementRef, MemberKind, RefactoringKind, RefactoringRecord, Scope,
)

__all__ = [
    "ExpectedComposite", "Fixture", "brute_force_cluster", "check_expectations",
    "colliding_records", "fixture_names", "fixtures", "load_fixture",
]


@dataclass(frozen=True)
class ExpectedComposite:
    kind: CompositeKind
    anchor: ElementRef
    size: int
    scope: Optional[Scope] = None

    @classmethod
    def from_dict(cls, data: Dict) -> "ExpectedComposite":
        anchor = data["anchor"]
        if not anchor.get("member"):
            element = ElementRef.for_class(anchor["class"])
        elif data["kind"] in (CompositeKind.COMPOSITE_PULL_UP_FIELD.value, CompositeKind.COMPOSITE_PUSH_DOWN_FIELD.value):
            element = ElementRef.for_field(anchor["class"], anchor["member"])
        else:
            element = ElementRef.for_method(anchor["class"], anchor["member"])
        return cls(
            kind=CompositeKind(data["kind"]),
            anchor=element,
            size=int(data["size"]),
            scope=Scope(data["scope"]) if data.get("scope") else None,
        )

    def matches(self, composite: Composite) -> bool:
        return (
            composite.kind is self.kind
            and composite.anchor == self.anchor
            and composite.size == self.size
            and composite.scope == self.scope
        )


@dataclass
class Fixture:
    name: str
    records: List[RefactoringRecord]
    expected: List[ExpectedComposite]


def fixture_names(fixtures_dir: Path = config.FIXTURES_DIR) -> List[str]:
    return sorted(path.name[: -len(".jsonl")] for path in Path(fixtures_dir).glob("*.jsonl"))


def load_fixture(name: str, fixtures_dir: Path = config.FIXTURES_DIR) -> Fixture:
    fixtures_dir = Path(fixtures_dir)
    with open(fixtures_dir / f"{name}.jsonl", "r", encoding="utf-8") as f:
        records = parse_jsonl(f)
    with open(fixtures_dir / f"{name}.expected.json", "r", encoding="utf-8") as f:
        expected = [ExpectedComposite.from_dict(item) for item in json.load(f)["composites"]]
    return Fixture(name, records, expected)


def fixtures(fixtures_dir: Path = config.FIXTURES_DIR) -> Dict[str, Fixture]:
    """Every worked example under the fixtures directory, by name"""
    return {name: load_fixture(name, fixtures_dir) for name in fixture_names(fixtures_dir)}


def check_expectations(fixture: Fixture, composites: Sequence[Composite]) -> List[str]:
    """Problems found comparing composites with the fixture's expectations; empty when they match exactly"""
    problems = []
    unmatched = list(composites)
    for expected in fixture.expected:
        match = next((c for c in unmatched if expected.matches(c)), None)
        if match is None:
            problems.append(
                f"{fixture.name}: missing {expected.kind.value} at {expected.anchor.label} "
                f"(size {expected.size}, scope {expected.scope.value if expected.scope else None})"
            )
        else:
            unmatched.remove(match)
    problems.extend(
        f"{fixture.name}: unexpected {c.kind.value} at {c.anchor.label} (size {c.size})" for c in unmatched
    )
    return problems


# ---------------------------------------------------------------------------
# Colliding records
# ---------------------------------------------------------------------------

_CLASSES = ("pkg.A", "pkg.B", "pkg.C", "pkg.Inner$D")
_METHODS = ("m()", "m(int)", "n(String)", "k(List<String>)", "run()")
_FIELDS = ("f", "g", "count")
_PROJECTS = ("alpha", "beta")
_COMMITS = ("a1", "b2", "c3", "d4", "e5")
_EPOCH = datetime(2016, 3, 1, tzinfo=timezone.utc)


def colliding_records(seed: int, count: int) -> List[RefactoringRecord]:
    """Records drawn from small element pools so every kind occurs and keys collide often"""
    rng = np.random.default_rng(seed)
    kinds = list(RefactoringKind)

    def pick(pool, exclude=None):
        choices = [item for item in pool if item != exclude]
        return choices[int(rng.integers(0, len(choices)))]

    records = []
    for index in range(1, count + 1):
        kind = kinds[int(rng.integers(0, len(kinds)))]
        source_class = pick(_CLASSES)
        if kind is RefactoringKind.EXTRACT:
            target_class = source_class
        elif kind in (RefactoringKind.EXTRACT_MOVE, RefactoringKind.MOVE, RefactoringKind.MOVE_RENAME):
            target_class = pick(_CLASSES, exclude=source_class)
        else:
            target_class = pick(_CLASSES)

        if kind.is_field_level:
            member_kind = MemberKind.FIELD
            source_member = pick(_FIELDS)
            target_member = source_member
        else:
            member_kind = MemberKind.METHOD
            source_member = pick(_METHODS)
            if kind is RefactoringKind.MOVE:
                target_member = source_member
            else:
                target_member = pick(_METHODS, exclude=source_member)

        timestamp = None
        if rng.random() < 0.9:
            timestamp = _EPOCH + timedelta(days=int(rng.integers(0, 900)), seconds=int(rng.integers(0, 86400)))
        records.append(RefactoringRecord(
            id=f"r{index}",
            project=pick(_PROJECTS),
            commit=pick(_COMMITS),
            timestamp=timestamp,
            kind=kind,
            source=ElementRef(source_class, member_kind, source_member),
            target=ElementRef(target_class, member_kind, target_member),
        ))
    return records
