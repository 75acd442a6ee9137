"""
Report rendering: one-line composite messages, the JSON report and its
parse-back, markdown tables, per-composite DOT graphs and the plain-text
statistics view
"""
import json
import hashlib
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Dict, List, Optional

import pandas as pd

import config
from . import __version__
from .ingest import FilterConfig
from .metrics import AGE_PERCENTILES, SIZE_PERCENTILES, CorpusStats, Distribution, corpus_stats
from .model import (
    Composite, CompositeKind, ElementRef, MemberKind, RefactoringKind, RefactoringRecord,
    SchemaError, format_timestamp, natural_key,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Messages
# ---------------------------------------------------------------------------

def _short(element: ElementRef) -> str:
    if element.member_kind is MemberKind.CLASS:
        return element.simple_class_name
    return f"{element.simple_class_name}.{element.member}"


def _element_key(element: ElementRef):
    return (element.class_fqn, element.member)


def _unique(items: List[str]) -> List[str]:
    return list(dict.fromkeys(items))


def _shared_classes(elements: List[ElementRef], anchor: ElementRef) -> str:
    # members with the anchor's own name are listed by class only
    ordered = sorted(elements, key=_element_key)
    return ", ".join(_unique([
        element.simple_class_name if element.member == anchor.member else _short(element)
        for element in ordered
    ]))


def _labels(elements: List[ElementRef]) -> str:
    return ", ".join(_unique([_short(element) for element in sorted(elements, key=_element_key)]))


def render_composite_message(c: Composite) -> str:
    """One comprehensive message for a composite, members ordered by class then signature"""
    anchor = c.anchor
    sources = [member.source for member in c.members]
    targets = [member.target for member in c.members]

    if c.kind is CompositeKind.METHOD_COMPOSITION:
        return f"Compose method {_short(anchor)} From: {_labels(sources)}"
    if c.kind is CompositeKind.METHOD_DECOMPOSITION:
        return f"Decompose method {_short(anchor)} Into: {_labels(targets)}"
    if c.kind is CompositeKind.CLASS_DECOMPOSITION:
        moves = []
        for member in sorted(c.members, key=lambda m: (m.source.member, m.target.class_fqn, m.target.member)):
            move = f"{member.source.member} to {member.target.simple_class_name}"
            if member.target.member != member.source.member:
                move += f" as {member.target.member}"
            moves.append(move)
        return f"Decompose class {anchor.simple_class_name} Moving: {', '.join(_unique(moves))}"
    if c.kind is CompositeKind.COMPOSITE_INLINE_METHOD:
        return f"Inline method {_short(anchor)} Into: {_labels(targets)}"

    noun = "field" if anchor.member_kind is MemberKind.FIELD else "method"
    if c.kind in (CompositeKind.COMPOSITE_PULL_UP_METHOD, CompositeKind.COMPOSITE_PULL_UP_FIELD):
        return (
            f"Pull Up {noun} {anchor.member} From: {_shared_classes(sources, anchor)} "
            f"To: {anchor.member} in {anchor.simple_class_name}"
        )
    return (
        f"Push Down {noun} {anchor.member} From: {anchor.member} in {anchor.simple_class_name} "
        f"To: {_shared_classes(targets, anchor)}"
    )


_RECORD_PHRASES = {
    RefactoringKind.MOVE: "Move Method",
    RefactoringKind.MOVE_RENAME: "Move And Rename Method",
    RefactoringKind.INLINE: "Inline Method",
    RefactoringKind.PULL_UP_METHOD: "Pull Up Method",
    RefactoringKind.PUSH_DOWN_METHOD: "Push Down Method",
    RefactoringKind.PULL_UP_FIELD: "Pull Up Attribute",
    RefactoringKind.PUSH_DOWN_FIELD: "Push Down Attribute",
}


def render_record_message(record: RefactoringRecord) -> str:
    """Render a single refactoring the way the miner prints it"""
    source, target = record.source, record.target
    if record.kind is RefactoringKind.EXTRACT:
        return f"Extract Method {target.member} from {source.member} in class {source.class_fqn}"
    if record.kind is RefactoringKind.EXTRACT_MOVE:
        return (
            f"Extract And Move Method {target.member} extracted from {source.member} "
            f"in class {source.class_fqn} & moved to class {target.class_fqn}"
        )
    return (
        f"{_RECORD_PHRASES[record.kind]} {source.member} from class {source.class_fqn} "
        f"to {target.member} from class {target.class_fqn}"
    )


# ---------------------------------------------------------------------------
# Bundle and JSON report
# ---------------------------------------------------------------------------

@dataclass
class ReportBundle:
    stats: CorpusStats
    composites: List[Composite]
    metadata: Dict = field(default_factory=dict)


def input_digest(records: List[RefactoringRecord]) -> str:
    """SHA-256 over the canonical JSON of the records, sorted by id"""
    canonical = [record.to_dict() for record in sorted(records, key=lambda record: natural_key(record.id))]
    payload = json.dumps(canonical, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def build_bundle(
    singles: List[RefactoringRecord],
    composites: List[Composite],
    stats: Optional[CorpusStats] = None,
    filters: Optional[FilterConfig] = None,
    generated_at: Optional[datetime] = None,
    ingested: Optional[List[RefactoringRecord]] = None,
) -> ReportBundle:
    """Stats and metadata for the renderers; the digest covers `ingested` (before filtering) when given"""
    if stats is None:
        stats = corpus_stats(singles, composites)
    generated_at = generated_at or datetime.now(timezone.utc).replace(microsecond=0)
    return ReportBundle(
        stats=stats,
        composites=list(composites),
        metadata={
            "tool_version": __version__,
            "input_digest": input_digest(ingested if ingested is not None else singles),
            "generated_at": format_timestamp(generated_at),
            "filters": filters.to_dict() if filters is not None else None,
        },
    )


@dataclass
class CompositeEntry:
    """A composite as stored in the JSON report (members by id)"""
    kind: CompositeKind
    anchor_class: str
    anchor_member: str
    size: int
    commits: List[str]
    members: List[str]
    message: str
    scope: Optional[str] = None
    age_days: Optional[int] = None

    @classmethod
    def from_composite(cls, c: Composite) -> "CompositeEntry":
        return cls(
            kind=c.kind,
            anchor_class=c.anchor.class_fqn,
            anchor_member=c.anchor.member,
            size=c.size,
            commits=sorted(c.commits),
            members=c.member_ids,
            message=render_composite_message(c),
            scope=c.scope.value if c.scope is not None else None,
            age_days=c.age_days,
        )

    def to_dict(self) -> Dict:
        data = {
            "kind": self.kind.value,
            "anchor": {"class": self.anchor_class, "member": self.anchor_member},
            "size": self.size,
        }
        if self.scope is not None:
            data["scope"] = self.scope
        if self.age_days is not None:
            data["age_days"] = self.age_days
        data["commits"] = list(self.commits)
        data["members"] = list(self.members)
        data["message"] = self.message
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "CompositeEntry":
        return cls(
            kind=CompositeKind(data["kind"]),
            anchor_class=data["anchor"]["class"],
            anchor_member=data["anchor"]["member"],
            size=int(data["size"]),
            commits=list(data["commits"]),
            members=[str(member) for member in data["members"]],
            message=data["message"],
            scope=data.get("scope"),
            age_days=data.get("age_days"),
        )


@dataclass
class ReportDocument:
    """A JSON report read back from disk"""
    schema_version: str
    metadata: Dict
    stats: CorpusStats
    composites: List[CompositeEntry]

    @classmethod
    def from_bundle(cls, bundle: ReportBundle) -> "ReportDocument":
        return cls(
            schema_version=config.REPORT_SCHEMA_VERSION,
            metadata=dict(bundle.metadata),
            stats=bundle.stats,
            composites=[CompositeEntry.from_composite(c) for c in bundle.composites],
        )

    def to_dict(self) -> Dict:
        return {
            "schema_version": self.schema_version,
            "metadata": self.metadata,
            "stats": self.stats.to_dict(),
            "composites": [entry.to_dict() for entry in self.composites],
        }


def emit_json(bundle: ReportBundle) -> str:
    document = ReportDocument.from_bundle(bundle)
    return json.dumps(document.to_dict(), indent=2, ensure_ascii=False) + "\n"


def parse_json_report(text: str) -> ReportDocument:
    """Read a JSON report back; malformed documents and other schema versions raise SchemaError"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"malformed report ({e.msg} at line {e.lineno})") from None
    if not isinstance(data, dict):
        raise SchemaError("malformed report (top level is not an object)")

    version = data.get("schema_version")
    if version != config.REPORT_SCHEMA_VERSION:
        raise SchemaError(
            f"unsupported report schema_version {version!r} (expected {config.REPORT_SCHEMA_VERSION!r})"
        )
    try:
        return ReportDocument(
            schema_version=version,
            metadata=dict(data["metadata"]),
            stats=CorpusStats.from_dict(data["stats"]),
            composites=[CompositeEntry.from_dict(entry) for entry in data["composites"]],
        )
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise SchemaError(f"malformed report ({type(e).__name__}: {e})") from None


# ---------------------------------------------------------------------------
# Markdown
# ---------------------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.1f}"
    return str(value)


def _table(headers: List[str], rows: List[List]) -> List[str]:
    lines = [
        "| " + " | ".join(headers) + " |",
        "|" + "|".join("---" for _ in headers) + "|",
    ]
    lines.extend("| " + " | ".join(_cell(value) for value in row) + " |" for row in rows)
    return lines


def frequency_rows(stats: CorpusStats) -> List[List]:
    """Name, Projects, Operations, Occurrences, % per composite kind plus the All row"""
    rows = [
        [kind.display_name, s.project_count, s.operation_count, s.composite_count, s.percent_of_composites]
        for kind, s in stats.per_kind.items()
    ]
    rows.append([
        "All",
        stats.projects_with_composites,
        stats.singles_in_composites,
        stats.composites_total,
        100.0 if stats.composites_total else 0.0,
    ])
    return rows


def _distribution_row(name: str, dist: Distribution, names: List[str]) -> List:
    return [name, dist.count, dist.minimum] + [dist.percentiles.get(p) for p in names] + [dist.maximum]


def emit_markdown(bundle: ReportBundle) -> str:
    stats = bundle.stats
    meta = bundle.metadata
    lines = [
        "# Composite Refactoring Report",
        "",
        f"- Generated: {meta.get('generated_at')}",
        f"- Tool version: {meta.get('tool_version')}",
        f"- Input digest: `{meta.get('input_digest')}`",
        f"- Single refactorings: {stats.singles_total}",
        f"- Singles in composites: {stats.singles_in_composites} ({_cell(stats.singles_in_composites_percent)}%)",
        f"- Composites: {stats.composites_total} in {stats.projects_with_composites} project(s), "
        f"{stats.single_composite_projects} with exactly one",
        "",
        "## Composite kinds",
        "",
    ]
    lines += _table(["Name", "Projects", "Operations", "Occurrences", "%"], frequency_rows(stats))

    lines += ["", "## Selected operations", ""]
    lines += _table(
        ["Operation", "Projects", "Commits", "Occurrences", "%"],
        [[kind.display_name, s.projects, s.commits, s.occurrences, s.percent] for kind, s in stats.operations.items()],
    )

    size_names = [name for name, _ in SIZE_PERCENTILES]
    lines += ["", "## Composite size", ""]
    lines += _table(
        ["Kind", "Count", "Min"] + [name.capitalize() for name in size_names] + ["Max"],
        [_distribution_row(kind.display_name, dist, size_names) for kind, dist in stats.size_by_kind.items()]
        + [_distribution_row("All", stats.size_distribution, size_names)],
    )
    lines += [
        "",
        f"{stats.small_composite_count} composite(s) ({_cell(stats.small_composite_percent)}%) "
        f"have at most {config.SMALL_COMPOSITE_MAX_SIZE} members.",
    ]

    age_names = [name for name, _ in AGE_PERCENTILES]
    lines += ["", "## Composite age (days)", ""]
    lines += _table(
        ["Count", "Min"] + [name.capitalize() for name in age_names] + ["Max"],
        [_distribution_row("", stats.age_distribution, age_names)[1:]],
    )
    lines += [
        "",
        f"{stats.multi_commit_count} composite(s) ({_cell(stats.multi_commit_percent)}%) span more than one commit, "
        f"{stats.multi_commit_single_day_count} of them within a single day.",
    ]

    lines += ["", "## Extraction scope", ""]
    lines += _table(
        ["Kind", "Intra-class", "Inter-class", "Mixed"],
        [[kind.display_name] + list(scopes.values()) for kind, scopes in stats.scope_breakdown.items()],
    )

    lines += ["", "## Projects", ""]
    lines += _table(
        ["Project", "Singles", "In composites", "Composites"],
        [[project, s.singles, s.singles_in_composites, s.composites] for project, s in stats.per_project.items()],
    )

    for n, composite in enumerate(bundle.composites, start=1):
        lines += [
            "",
            f"## composite-{n}",
            "",
            render_composite_message(composite),
            "",
            f"- Kind: {composite.kind.display_name}",
            f"- Anchor: `{composite.anchor.label}`",
            f"- Project: {composite.project}",
            f"- Size: {composite.size}",
        ]
        if composite.scope is not None:
            lines.append(f"- Scope: {composite.scope.value}")
        if composite.age_days is not None:
            lines.append(f"- Age: {composite.age_days} day(s)")
        lines.append(f"- Commits: {', '.join(sorted(composite.commits))}")
        lines += ["", "Members:", ""]
        lines += [f"- `{member.id}` {render_record_message(member)}" for member in composite.members]

    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# DOT
# ---------------------------------------------------------------------------

def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def emit_dot(c: Composite, name: str = "composite") -> str:
    """One digraph per composite: element nodes, one source -> target edge per member"""
    nodes: Dict[ElementRef, str] = {}
    for member in c.members:
        for element in (member.source, member.target):
            if element not in nodes:
                nodes[element] = f"n{len(nodes) + 1}"

    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", f"  label={_quote(render_composite_message(c))};"]
    for element, node_id in nodes.items():
        shape = "box" if element == c.anchor else "ellipse"
        lines.append(f"  {node_id} [label={_quote(element.label)}, shape={shape}];")
    for member in c.members:
        label = f"{member.kind.value} {member.commit[:7]}"
        lines.append(f"  {nodes[member.source]} -> {nodes[member.target]} [label={_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Plain text (stats command)
# ---------------------------------------------------------------------------

def format_stats_text(stats: CorpusStats) -> str:
    """Frequency table and distributions as plain text"""
    frequency = pd.DataFrame(frequency_rows(stats), columns=["Name", "Projects", "Operations", "Occurrences", "%"])
    frequency["%"] = frequency["%"].map(lambda value: f"{value:.1f}")

    def describe(title: str, dist: Distribution) -> str:
        if not dist.count:
            return f"{title}: none"
        parts = [f"min {dist.minimum}"]
        parts += [f"{name} {value}" for name, value in dist.percentiles.items()]
        parts.append(f"max {dist.maximum}")
        return f"{title} (n={dist.count}): " + ", ".join(parts)

    lines = [
        f"Singles: {stats.singles_total}, in composites: {stats.singles_in_composites} "
        f"({stats.singles_in_composites_percent:.1f}%)",
        f"Composites: {stats.composites_total}",
        "",
        frequency.to_string(index=False),
        "",
        describe("Size", stats.size_distribution),
        f"Small composites (<= {config.SMALL_COMPOSITE_MAX_SIZE}): {stats.small_composite_count} "
        f"({stats.small_composite_percent:.1f}%)",
        describe("Age (days)", stats.age_distribution),
        f"Multi-commit composites: {stats.multi_commit_count} ({stats.multi_commit_percent:.1f}%), "
        f"{stats.multi_commit_single_day_count} within one day",
    ]
    for kind, scopes in stats.scope_breakdown.items():
        counts = ", ".join(f"{scope.value} {count}" for scope, count in scopes.items())
        lines.append(f"{kind.display_name} scope: {counts}")
    return "\n".join(lines) + "\n"
