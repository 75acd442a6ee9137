"""
Seeded synthetic datasets with planted composites and non-colliding noise,
used by the `synth` command and the recovery tests
"""
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Dict, List, Optional

import numpy as np

from .model import (
    CompositeKind, ConfigError, ElementRef, RefactoringKind, RefactoringRecord, natural_key,
)

logger = logging.getLogger(__name__)

DEFAULT_MIX = {kind: 1.0 for kind in CompositeKind}
PROJECTS = ("synth-alpha", "synth-beta", "synth-gamma")
EPOCH = datetime(2015, 1, 1, tzinfo=timezone.utc)
PARAMETER_TYPES = ("", "int", "String", "List<String>", "Map<String,Object>", "long[]")


def parse_mix(text: str) -> Dict[CompositeKind, float]:
    """Parse `kind=weight,...`; weights must be non-negative and sum to a positive value"""
    mix: Dict[CompositeKind, float] = {}
    for item in (text or "").split(","):
        if not item.strip():
            continue
        name, sep, weight = item.partition("=")
        if not sep:
            raise ConfigError(f"composite mix entry {item.strip()!r} is not kind=weight")
        try:
            kind = CompositeKind(name.strip())
        except ValueError:
            raise ConfigError(f"unknown composite kind {name.strip()!r}") from None
        try:
            value = float(weight)
        except ValueError:
            raise ConfigError(f"weight for {kind.value} is not a number: {weight.strip()!r}") from None
        if value < 0 or not np.isfinite(value):
            raise ConfigError(f"weight for {kind.value} must be a non-negative number")
        mix[kind] = value
    if sum(mix.values()) <= 0:
        raise ConfigError("composite mix weights must sum to a positive value")
    return mix


@dataclass
class PlantedComposite:
    kind: CompositeKind
    anchor: ElementRef
    members: List[str]

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind.value,
            "anchor": {"class": self.anchor.class_fqn, "member": self.anchor.member},
            "members": list(self.members),
        }


@dataclass
class SynthDataset:
    records: List[RefactoringRecord]
    planted: List[PlantedComposite] = field(default_factory=list)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(record.to_dict(), sort_keys=True) + "\n" for record in self.records)

    def truth_json(self) -> str:
        return json.dumps({"planted": [p.to_dict() for p in self.planted]}, indent=2) + "\n"


class _Builder:
    """Accumulates records with sequential ids"""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.records: List[RefactoringRecord] = []

    def signature(self, name: str) -> str:
        count = int(self.rng.integers(0, 3))
        types = [PARAMETER_TYPES[int(i)] for i in self.rng.integers(1, len(PARAMETER_TYPES), size=count)]
        return f"{name}({', '.join(types)})"

    def add(self, project, commit, timestamp, kind, source, target) -> str:
        record_id = f"r{len(self.records) + 1}"
        self.records.append(RefactoringRecord(
            id=record_id, project=project, commit=commit, timestamp=timestamp,
            kind=kind, source=source, target=target,
        ))
        return record_id


def _plant(builder: _Builder, index: int, kind: CompositeKind, size: int, multi_commit: bool) -> PlantedComposite:
    rng = builder.rng
    ns = f"synth.c{index}"
    project = PROJECTS[int(rng.integers(0, len(PROJECTS)))]
    day = int(rng.integers(0, 3000))

    def context(m: int):
        if multi_commit:
            return f"{index:08x}{m + 1:04x}", EPOCH + timedelta(days=day + int(rng.integers(0, 400)))
        return f"{index:08x}0000", EPOCH + timedelta(days=day)

    host = f"{ns}.Host"
    members = []

    if kind in (CompositeKind.METHOD_COMPOSITION, CompositeKind.METHOD_DECOMPOSITION):
        anchor = ElementRef.for_method(host, builder.signature("anchor"))
        for m in range(size):
            moved = bool(rng.random() < 0.5)
            record_kind = RefactoringKind.EXTRACT_MOVE if moved else RefactoringKind.EXTRACT
            part = ElementRef.for_method(f"{ns}.Other{m}" if moved else host, builder.signature(f"part{m}"))
            # composition: duplicated code leaves every part for the anchor
            source, target = (part, anchor) if kind is CompositeKind.METHOD_COMPOSITION else (anchor, part)
            members.append(builder.add(project, *context(m), record_kind, source, target))

    elif kind is CompositeKind.CLASS_DECOMPOSITION:
        anchor = ElementRef.for_class(host)
        for m in range(size):
            source = ElementRef.for_method(host, builder.signature(f"moved{m}"))
            target_class = f"{ns}.Target{int(rng.integers(0, 3))}"
            if rng.random() < 0.3:
                target = ElementRef.for_method(target_class, source.member.replace(f"moved{m}", f"renamed{m}"))
                record_kind = RefactoringKind.MOVE_RENAME
            else:
                target = ElementRef.for_method(target_class, source.member)
                record_kind = RefactoringKind.MOVE
            members.append(builder.add(project, *context(m), record_kind, source, target))

    elif kind is CompositeKind.COMPOSITE_INLINE_METHOD:
        anchor = ElementRef.for_method(host, builder.signature("inlined"))
        for m in range(size):
            target = ElementRef.for_method(f"{ns}.Caller{m % 2}", builder.signature(f"caller{m}"))
            members.append(builder.add(project, *context(m), RefactoringKind.INLINE, anchor, target))

    else:
        field_level = kind in (CompositeKind.COMPOSITE_PULL_UP_FIELD, CompositeKind.COMPOSITE_PUSH_DOWN_FIELD)
        pull_up = kind in (CompositeKind.COMPOSITE_PULL_UP_METHOD, CompositeKind.COMPOSITE_PULL_UP_FIELD)
        if field_level:
            record_kind = RefactoringKind.PULL_UP_FIELD if pull_up else RefactoringKind.PUSH_DOWN_FIELD
            anchor = ElementRef.for_field(f"{ns}.Super", "shared")
        else:
            record_kind = RefactoringKind.PULL_UP_METHOD if pull_up else RefactoringKind.PUSH_DOWN_METHOD
            anchor = ElementRef.for_method(f"{ns}.Super", builder.signature("shared"))
        for m in range(size):
            sub = ElementRef(f"{ns}.Sub{m}", anchor.member_kind, anchor.member)
            source, target = (sub, anchor) if pull_up else (anchor, sub)
            members.append(builder.add(project, *context(m), record_kind, source, target))

    return PlantedComposite(kind, anchor, sorted(members, key=natural_key))


_NOISE_KINDS = list(RefactoringKind)


def _noise(builder: _Builder, index: int) -> None:
    rng = builder.rng
    ns = f"noise.n{index}"
    kind = _NOISE_KINDS[int(rng.integers(0, len(_NOISE_KINDS)))]
    project = PROJECTS[int(rng.integers(0, len(PROJECTS)))]
    commit = f"{int(rng.integers(0, 2**32)):08x}"
    timestamp = EPOCH + timedelta(days=int(rng.integers(0, 3000)))

    if kind.is_field_level:
        source = ElementRef.for_field(f"{ns}.Origin", "value")
        target = ElementRef.for_field(f"{ns}.Destination", "value")
    else:
        source = ElementRef.for_method(f"{ns}.Origin", builder.signature("origin"))
        target_class = f"{ns}.Origin" if kind is RefactoringKind.EXTRACT else f"{ns}.Destination"
        target = ElementRef.for_method(target_class, builder.signature("destination"))
    builder.add(project, commit, timestamp, kind, source, target)


def generate_dataset(
    seed: int,
    singles: int,
    mix: Optional[Dict[CompositeKind, float]] = None,
    noise: float = 0.0,
    multi_commit: float = 0.0,
) -> SynthDataset:
    """Build `singles` records; a `noise` fraction are singletons, the rest form planted composites.

    The result is a pure function of the arguments.
    """
    mix = dict(DEFAULT_MIX if mix is None else mix)
    if singles < 0:
        raise ConfigError("singles must not be negative")
    if not 0.0 <= noise <= 1.0:
        raise ConfigError(f"noise must be within [0, 1], got {noise}")
    if not 0.0 <= multi_commit <= 1.0:
        raise ConfigError(f"multi-commit fraction must be within [0, 1], got {multi_commit}")
    if sum(mix.values()) <= 0:
        raise ConfigError("composite mix weights must sum to a positive value")

    rng = np.random.default_rng(seed)
    kinds = [kind for kind in CompositeKind if mix.get(kind, 0) > 0]
    weights = np.array([mix[kind] for kind in kinds], dtype=float)
    weights /= weights.sum()

    noise_count = int(round(singles * noise))
    remaining = singles - noise_count
    if remaining == 1:
        noise_count, remaining = noise_count + 1, 0

    builder = _Builder(rng)
    planted = []
    while remaining >= 2:
        kind = kinds[int(rng.choice(len(kinds), p=weights))]
        size = min(remaining, 2 + int(rng.poisson(1.5)))
        if remaining - size == 1:
            size += 1
        planted.append(_plant(builder, len(planted) + 1, kind, size, bool(rng.random() < multi_commit)))
        remaining -= size
    for index in range(1, noise_count + 1):
        _noise(builder, index)

    records = [builder.records[int(i)] for i in rng.permutation(len(builder.records))]
    logger.info(f"🎲 Generated {len(records)} records with {len(planted)} planted composites (seed {seed})")
    return SynthDataset(records, planted)
