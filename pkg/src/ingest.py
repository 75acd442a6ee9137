"""
Readers for refactoring-tool output (miner text, JSON lines, oracle CSV
export) and the dataset filters applied before clustering
"""
import re
import json
import hashlib
import logging
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

import pandas as pd

import config
from .model import (
    ConfigError, ElementRef, MemberKind, ParseError, RefactoringKind, RefactoringRecord,
    SchemaError, UnsupportedOperationError, parse_timestamp,
)

logger = logging.getLogger(__name__)

FORMATS = ("jsonl", "csv", "miner-text")

ORACLE_COLUMNS = (
    "project", "commit", "refactoring_type",
    "source_class", "source_member", "target_class", "target_member",
)


@dataclass(frozen=True)
class MinerContext:
    """Commit context for miner messages, which do not carry it per line"""
    project: str
    commit: str
    timestamp: Optional[datetime] = None


@dataclass
class IngestResult:
    records: List[RefactoringRecord]
    skipped: Dict[str, int] = field(default_factory=dict)

    @property
    def skipped_total(self) -> int:
        return sum(self.skipped.values())


@dataclass(frozen=True)
class FilterConfig:
    excluded_package_fragments: Tuple[str, ...] = field(
        default_factory=lambda: tuple(config.DEFAULT_EXCLUDED_PACKAGES)
    )
    exclude_constructors: bool = config.DEFAULT_EXCLUDE_CONSTRUCTORS
    projects_allowlist: Optional[FrozenSet[str]] = None

    def __post_init__(self):
        fragments = tuple(fragment.strip().lower() for fragment in self.excluded_package_fragments)
        if any(not fragment for fragment in fragments):
            raise ConfigError("excluded package fragments must be non-empty")
        object.__setattr__(self, "excluded_package_fragments", fragments)
        if self.projects_allowlist is not None:
            object.__setattr__(self, "projects_allowlist", frozenset(self.projects_allowlist))

    def to_dict(self) -> Dict:
        return {
            "excluded_package_fragments": list(self.excluded_package_fragments),
            "exclude_constructors": self.exclude_constructors,
            "projects_allowlist": sorted(self.projects_allowlist) if self.projects_allowlist is not None else None,
        }


@dataclass
class FilterResult:
    records: List[RefactoringRecord]
    dropped: Dict[str, int] = field(default_factory=dict)

    @property
    def dropped_total(self) -> int:
        return sum(self.dropped.values())


# ---------------------------------------------------------------------------
# Miner messages
# ---------------------------------------------------------------------------

_KIND_PHRASES = [
    (RefactoringKind.EXTRACT_MOVE, r"extract\s+and\s+move\s+method"),
    (RefactoringKind.EXTRACT, r"extract\s+method"),
    (RefactoringKind.MOVE_RENAME, r"move\s+and\s+rename\s+method"),
    (RefactoringKind.MOVE, r"move\s+method"),
    (RefactoringKind.INLINE, r"inline\s+method"),
    (RefactoringKind.PULL_UP_METHOD, r"pull\s+up\s+method"),
    (RefactoringKind.PUSH_DOWN_METHOD, r"push\s+down\s+method"),
    (RefactoringKind.PULL_UP_FIELD, r"pull\s+up\s+(?:attribute|field)"),
    (RefactoringKind.PUSH_DOWN_FIELD, r"push\s+down\s+(?:attribute|field)"),
]
_KIND_MESSAGES = [
    (kind, re.compile(rf"^\s*{phrase}\s+(?P<body>.+?)\s*$", re.IGNORECASE))
    for kind, phrase in _KIND_PHRASES
]
_LEADING_PHRASE = re.compile(r"^\s*((?:[A-Z][A-Za-z]*\s+)*[A-Z][A-Za-z]*)")

# `<src> from class A to <tgt> from|in class B`
_FROM_TO = re.compile(
    r"^(?P<src>.+?)\s+from\s+class\s+(?P<src_cls>\S+)\s+to\s+(?P<tgt>.+?)\s+(?:from|in)\s+class\s+(?P<tgt_cls>\S+)$",
    re.IGNORECASE,
)
# `<extracted> [extracted] from <origin> in class A`
_EXTRACTED = re.compile(
    r"^(?P<tgt>.+?)\s+(?:extracted\s+)?from\s+(?P<src>.+?)\s+in\s+class\s+(?P<src_cls>\S+)$",
    re.IGNORECASE,
)
# `<extracted> extracted from <origin> in class A & moved to class B`
_EXTRACTED_AND_MOVED = re.compile(
    r"^(?P<tgt>.+?)\s+extracted\s+from\s+(?P<src>.+?)\s+in\s+class\s+(?P<src_cls>\S+)"
    r"\s+&\s+moved\s+to\s+class\s+(?P<tgt_cls>\S+)$",
    re.IGNORECASE,
)
# `<inlined> inlined to <caller> in class A`
_INLINED = re.compile(
    r"^(?P<src>.+?)\s+inlined\s+to\s+(?P<tgt>.+?)\s+in\s+class\s+(?P<src_cls>\S+)$",
    re.IGNORECASE,
)

_MESSAGE_SHAPES = {
    RefactoringKind.EXTRACT: (_FROM_TO, _EXTRACTED),
    RefactoringKind.EXTRACT_MOVE: (_EXTRACTED_AND_MOVED, _FROM_TO),
    RefactoringKind.INLINE: (_FROM_TO, _INLINED),
}


def parse_miner_message(text: str, ctx: MinerContext, record_id: Optional[str] = None) -> RefactoringRecord:
    """Parse one refactoring-miner message into a normalized record.

    Extract Method messages name the extracted method first and the origin
    second; the origin becomes the record's source.
    """
    kind, body = _message_kind(text)
    for shape in _MESSAGE_SHAPES.get(kind, (_FROM_TO,)):
        match = shape.match(body)
        if match:
            break
    else:
        raise ParseError(f"malformed {kind.display_name} message: {text.strip()!r}")

    parts = match.groupdict()
    source_class = parts["src_cls"]
    target_class = parts.get("tgt_cls") or source_class
    make = ElementRef.for_field if kind.is_field_level else ElementRef.for_method
    if record_id is None:
        digest = hashlib.sha1(f"{ctx.project}\n{ctx.commit}\n{text.strip()}".encode("utf-8"))
        record_id = digest.hexdigest()[:12]

    return RefactoringRecord(
        id=record_id,
        project=ctx.project,
        commit=ctx.commit,
        timestamp=ctx.timestamp,
        kind=kind,
        source=make(source_class, parts["src"]),
        target=make(target_class, parts["tgt"]),
        raw=text,
    )


def _message_kind(text: str) -> Tuple[RefactoringKind, str]:
    for kind, pattern in _KIND_MESSAGES:
        match = pattern.match(text)
        if match:
            return kind, match.group("body")
    raise UnsupportedOperationError(f"unsupported refactoring type {_phrase_of(text)!r}")


def _phrase_of(text: str) -> str:
    phrase = _LEADING_PHRASE.match(text)
    return phrase.group(1) if phrase else text.strip()[:40]


def parse_miner_text(stream: Iterable[str], ctx: MinerContext) -> IngestResult:
    """Parse one miner message per line; unsupported operations are skipped with a warning"""
    records, skipped = [], Counter()
    for line_number, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            records.append(parse_miner_message(line.rstrip("\r\n"), ctx, record_id=str(line_number)))
        except UnsupportedOperationError as e:
            logger.warning(f"⚠️ Skipping line {line_number}: {e.detail}")
            skipped[_phrase_of(line)] += 1
        except ParseError as e:
            raise ParseError(e.detail, line=line_number) from e
    return IngestResult(records, dict(skipped))


# ---------------------------------------------------------------------------
# JSON lines
# ---------------------------------------------------------------------------

def parse_jsonl(stream: Iterable[str]) -> List[RefactoringRecord]:
    """Read one record object per line; ids default to the line number"""
    records, seen = [], set()
    for line_number, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(f"malformed JSON ({e.msg})", line=line_number) from None
        if not isinstance(data, dict):
            raise ParseError("expected a JSON object", line=line_number)

        try:
            record = record_from_dict(data, default_id=str(line_number))
        except ParseError as e:
            raise type(e)(e.detail, line=line_number) from e
        if record.id in seen:
            raise ParseError(f"duplicate record id {record.id!r}", line=line_number)
        seen.add(record.id)
        records.append(record)
    return records


def record_from_dict(data: Dict, default_id: Optional[str] = None) -> RefactoringRecord:
    missing = [key for key in ("project", "commit", "type", "source", "target") if key not in data]
    if missing:
        raise ParseError(f"missing field(s): {', '.join(missing)}")
    try:
        kind = RefactoringKind(data["type"])
    except ValueError:
        raise UnsupportedOperationError(f"unsupported refactoring type {data['type']!r}") from None

    for key in ("project", "commit"):
        if not isinstance(data[key], str):
            raise ParseError(f"{key} must be a string, got {data[key]!r}")

    record_id = data.get("id", default_id)
    return RefactoringRecord(
        id=str(record_id) if record_id is not None else "",
        project=data["project"],
        commit=data["commit"],
        timestamp=parse_timestamp(data.get("timestamp")),
        kind=kind,
        source=ElementRef.from_dict(data["source"]),
        target=ElementRef.from_dict(data["target"]),
    )


# ---------------------------------------------------------------------------
# Oracle CSV export
# ---------------------------------------------------------------------------

def _csv_type_names() -> Dict[str, RefactoringKind]:
    names = {}
    for kind in RefactoringKind:
        names[kind.value.replace("_", " ")] = kind
        names[kind.display_name.lower()] = kind
    names["pull up attribute"] = RefactoringKind.PULL_UP_FIELD
    names["push down attribute"] = RefactoringKind.PUSH_DOWN_FIELD
    return names


_CSV_TYPES = _csv_type_names()


def parse_oracle_csv(stream) -> IngestResult:
    """Load the normalized oracle export; rows outside the nine selected kinds are skipped and counted"""
    try:
        frame = pd.read_csv(stream, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise SchemaError("oracle CSV has no header row") from None
    except pd.errors.ParserError as e:
        raise ParseError(f"malformed CSV ({e})") from None

    frame.columns = [str(column).strip().lower() for column in frame.columns]
    missing = [column for column in ORACLE_COLUMNS if column not in frame.columns]
    if missing:
        raise SchemaError(f"oracle CSV is missing column(s): {', '.join(missing)}")

    records, skipped, seen = [], Counter(), set()
    for row_number, row in enumerate(frame.to_dict("records"), start=1):
        line_number = row_number + 1
        type_name = row["refactoring_type"].strip()
        kind = _CSV_TYPES.get(re.sub(r"[\s_]+", " ", type_name.lower()))
        if kind is None:
            skipped[type_name or "<empty>"] += 1
            continue

        make = ElementRef.for_field if kind.is_field_level else ElementRef.for_method
        try:
            record = RefactoringRecord(
                id=(row.get("id") or "").strip() or str(row_number),
                project=row["project"].strip(),
                commit=row["commit"].strip(),
                timestamp=parse_timestamp(row.get("timestamp")),
                kind=kind,
                source=make(row["source_class"], row["source_member"]),
                target=make(row["target_class"], row["target_member"]),
            )
        except ParseError as e:
            raise ParseError(e.detail, line=line_number) from e
        if record.id in seen:
            raise ParseError(f"duplicate record id {record.id!r}", line=line_number)
        seen.add(record.id)
        records.append(record)

    if skipped:
        logger.info(f"⏭️ Skipped {sum(skipped.values())} oracle rows outside the selected operations")
    return IngestResult(records, dict(skipped))


def load_records(path: Union[str, Path], fmt: str, ctx: Optional[MinerContext] = None) -> IngestResult:
    """Read a whole input file in one of the supported formats"""
    if fmt not in FORMATS:
        raise ConfigError(f"unknown input format {fmt!r} (expected one of {', '.join(FORMATS)})")
    if fmt == "miner-text" and ctx is None:
        raise ConfigError("miner-text input needs --project and --commit")
    try:
        with open(path, "r", encoding="utf-8") as f:
            if fmt == "jsonl":
                result = IngestResult(parse_jsonl(f))
            elif fmt == "csv":
                result = parse_oracle_csv(f)
            else:
                result = parse_miner_text(f, ctx)
    except UnicodeDecodeError as e:
        raise ParseError(f"{path} is not valid UTF-8 ({e.reason} at byte {e.start})") from None
    logger.info(f"📥 Loaded {len(result.records)} records from {path}")
    return result


# ---------------------------------------------------------------------------
# Filters
# ---------------------------------------------------------------------------

def apply_filters(records: List[RefactoringRecord], cfg: FilterConfig) -> FilterResult:
    """Drop records outside the core system: excluded package segments, constructors, other projects"""
    kept, dropped = [], Counter()
    fragments = set(cfg.excluded_package_fragments)
    for record in records:
        if cfg.projects_allowlist is not None and record.project not in cfg.projects_allowlist:
            dropped["project"] += 1
        elif any(fragments & _segments(element) for element in (record.source, record.target)):
            dropped["package"] += 1
        elif cfg.exclude_constructors and any(_is_constructor(e) for e in (record.source, record.target)):
            dropped["constructor"] += 1
        else:
            kept.append(record)

    if dropped:
        logger.info(f"🧹 Filtered out {sum(dropped.values())} records: {dict(dropped)}")
    return FilterResult(kept, dict(dropped))


def _segments(element: ElementRef) -> set:
    segments = {segment.lower() for segment in element.class_fqn.split(".")}
    if element.file_path:
        segments.update(segment.lower() for segment in re.split(r"[\\/]", element.file_path) if segment)
    return segments


def _is_constructor(element: ElementRef) -> bool:
    return element.member_kind is MemberKind.METHOD and element.member_name == element.simple_class_name
