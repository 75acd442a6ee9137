"""
Domain types shared by every stage of the composite refactoring pipeline:
refactoring and composite kinds, program element identities, single
refactoring records and detected composites
"""
import re
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

logger = logging.getLogger(__name__)


class CompositeMinerError(Exception):
    """Base class for every error raised by the miner"""


class ParseError(CompositeMinerError):
    """Input text (signature, message, JSON line, CSV row) could not be read"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        self.detail = message
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnsupportedOperationError(ParseError):
    """Refactoring type outside the nine supported single operations"""


class SchemaError(CompositeMinerError):
    """A file does not follow the expected column set or report schema"""


class IntegrityError(CompositeMinerError):
    """Records and composites disagree (unknown or duplicate ids)"""


class ConfigError(CompositeMinerError):
    """Invalid filter or generator settings"""


class RefactoringKind(str, Enum):
    EXTRACT = "extract"
    EXTRACT_MOVE = "extract_move"
    MOVE = "move"
    MOVE_RENAME = "move_rename"
    INLINE = "inline"
    PULL_UP_METHOD = "pull_up_method"
    PUSH_DOWN_METHOD = "push_down_method"
    PULL_UP_FIELD = "pull_up_field"
    PUSH_DOWN_FIELD = "push_down_field"

    @property
    def display_name(self) -> str:
        return _REFACTORING_NAMES[self]

    @property
    def is_field_level(self) -> bool:
        return self in (RefactoringKind.PULL_UP_FIELD, RefactoringKind.PUSH_DOWN_FIELD)


_REFACTORING_NAMES = {
    RefactoringKind.EXTRACT: "Extract Method",
    RefactoringKind.EXTRACT_MOVE: "Extract and Move Method",
    RefactoringKind.MOVE: "Move Method",
    RefactoringKind.MOVE_RENAME: "Move and Rename Method",
    RefactoringKind.INLINE: "Inline Method",
    RefactoringKind.PULL_UP_METHOD: "Pull Up Method",
    RefactoringKind.PUSH_DOWN_METHOD: "Push Down Method",
    RefactoringKind.PULL_UP_FIELD: "Pull Up Field",
    RefactoringKind.PUSH_DOWN_FIELD: "Push Down Field",
}


class CompositeKind(str, Enum):
    # Declaration order is the canonical report order
    METHOD_COMPOSITION = "method_composition"
    METHOD_DECOMPOSITION = "method_decomposition"
    CLASS_DECOMPOSITION = "class_decomposition"
    COMPOSITE_INLINE_METHOD = "composite_inline_method"
    COMPOSITE_PULL_UP_METHOD = "composite_pull_up_method"
    COMPOSITE_PUSH_DOWN_METHOD = "composite_push_down_method"
    COMPOSITE_PULL_UP_FIELD = "composite_pull_up_field"
    COMPOSITE_PUSH_DOWN_FIELD = "composite_push_down_field"

    @property
    def display_name(self) -> str:
        return _COMPOSITE_NAMES[self]

    @property
    def order(self) -> int:
        return list(CompositeKind).index(self)

    @property
    def has_scope(self) -> bool:
        return self in (CompositeKind.METHOD_COMPOSITION, CompositeKind.METHOD_DECOMPOSITION)


_COMPOSITE_NAMES = {
    CompositeKind.METHOD_COMPOSITION: "Method Composition",
    CompositeKind.METHOD_DECOMPOSITION: "Method Decomposition",
    CompositeKind.CLASS_DECOMPOSITION: "Class Decomposition",
    CompositeKind.COMPOSITE_INLINE_METHOD: "Composite Inline Method",
    CompositeKind.COMPOSITE_PULL_UP_METHOD: "Composite Pull Up Method",
    CompositeKind.COMPOSITE_PUSH_DOWN_METHOD: "Composite Push Down Method",
    CompositeKind.COMPOSITE_PULL_UP_FIELD: "Composite Pull Up Field",
    CompositeKind.COMPOSITE_PUSH_DOWN_FIELD: "Composite Push Down Field",
}


class Scope(str, Enum):
    INTRA_CLASS = "intra_class"
    INTER_CLASS = "inter_class"
    MIXED = "mixed"


class MemberKind(str, Enum):
    METHOD = "method"
    FIELD = "field"
    CLASS = "class"


# ---------------------------------------------------------------------------
# Signature and name normalization
# ---------------------------------------------------------------------------

_IDENTIFIER = re.compile(r"^[A-Za-z_$][\w$]*$")
_ANNOTATION = re.compile(r"@[\w.$]+(?:\([^()]*\))?")
_NAME_LIKE = re.compile(r"^[a-z_$][\w$]*(?:\[\])*$")
_PRIMITIVES = frozenset({"boolean", "byte", "char", "short", "int", "long", "float", "double", "void"})
_PARAMETER_MODIFIERS = frozenset({"final"})


def normalize_signature(raw: str) -> str:
    """Reduce a method signature to `name(T1, T2, ...)`.

    Visibility and other modifiers, return types (Java prefix or `: type`
    suffix), parameter names, annotations and whitespace variation are
    dropped. Generic arguments stay inside their type token.
    """
    text = _ANNOTATION.sub(" ", raw or "").strip()
    open_at = text.find("(")
    if open_at < 0:
        raise ParseError(f"malformed method signature (no parameter list): {raw!r}")
    close_at = _matching_paren(text, open_at)
    if close_at < 0:
        raise ParseError(f"malformed method signature (unbalanced parentheses): {raw!r}")

    head = text[:open_at].split()
    if not head or not _IDENTIFIER.match(head[-1]):
        raise ParseError(f"malformed method signature (no method name): {raw!r}")

    types = [_parameter_type(param, raw) for param in _split_parameters(text[open_at + 1:close_at], raw)]
    return f"{head[-1]}({', '.join(types)})"


def normalize_field_name(raw: str) -> str:
    """Reduce a field declaration (`private name : String`, `String name`) to its bare name"""
    text = _ANNOTATION.sub(" ", raw or "").split(":", 1)[0]
    tokens = text.split()
    if not tokens or not _IDENTIFIER.match(tokens[-1]):
        raise ParseError(f"malformed field name: {raw!r}")
    return tokens[-1]


def _matching_paren(text: str, open_at: int) -> int:
    depth = 0
    for index in range(open_at, len(text)):
        if text[index] == "(":
            depth += 1
        elif text[index] == ")":
            depth -= 1
            if depth == 0:
                return index
    return -1


def _split_parameters(text: str, raw: str) -> List[str]:
    if not text.strip():
        return []
    params, depth, current = [], 0, []
    for char in text:
        if char in "<([":
            depth += 1
        elif char in ">)]":
            depth -= 1
        if char == "," and depth == 0:
            params.append("".join(current))
            current = []
        else:
            current.append(char)
    params.append("".join(current))
    if any(not param.strip() for param in params):
        raise ParseError(f"malformed method signature (empty parameter): {raw!r}")
    return params


def _parameter_type(param: str, raw: str) -> str:
    text = re.sub(r"\s+", " ", param.strip())
    text = re.sub(r"\s*([<,\[])\s*", r"\1", text)
    text = re.sub(r"\s+([>\]])", r"\1", text)
    text = re.sub(r"\s*\.\.\.\s*", "... ", text).strip()

    tokens = [token for token in _split_outside_generics(text) if token not in _PARAMETER_MODIFIERS]
    if len(tokens) == 1:
        return tokens[0]
    if len(tokens) != 2:
        raise ParseError(f"malformed method signature (cannot read parameter {param.strip()!r}): {raw!r}")

    first, second = tokens
    if _looks_like_name(first) and _looks_like_type(second):
        type_token, name_token = second, first
    else:
        type_token, name_token = first, second
    # `int values[]` declares an array type
    while name_token.endswith("[]"):
        name_token = name_token[:-2]
        type_token += "[]"
    return type_token


def _split_outside_generics(text: str) -> List[str]:
    tokens, depth, current = [], 0, []
    for char in text:
        if char == "<":
            depth += 1
        elif char == ">":
            depth -= 1
        if char == " " and depth == 0:
            if current:
                tokens.append("".join(current))
            current = []
        else:
            current.append(char)
    if current:
        tokens.append("".join(current))
    return tokens


def _looks_like_name(token: str) -> bool:
    return bool(_NAME_LIKE.match(token)) and token.rstrip("[]") not in _PRIMITIVES


def _looks_like_type(token: str) -> bool:
    base = token.rstrip("[]").rstrip(".")
    return (
        token[:1].isupper()
        or base in _PRIMITIVES
        or any(char in token for char in "<[.")
    )


def parse_timestamp(value: Union[str, datetime, None]) -> Optional[datetime]:
    """Read an ISO-8601 instant as a UTC datetime with second precision"""
    if value is None:
        return None
    if isinstance(value, datetime):
        moment = value
    else:
        text = str(value).strip()
        if not text:
            return None
        if text[-1] in "Zz":
            text = text[:-1] + "+00:00"
        try:
            moment = datetime.fromisoformat(text)
        except ValueError:
            raise ParseError(f"malformed ISO-8601 timestamp: {value!r}") from None
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    return moment.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(moment: Optional[datetime]) -> Optional[str]:
    if moment is None:
        return None
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def natural_key(text: str) -> Tuple:
    """Sort key that orders `r2` before `r10`"""
    return tuple(int(part) if index % 2 else part for index, part in enumerate(re.split(r"(\d+)", text)))


# ---------------------------------------------------------------------------
# Element identities and records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ElementRef:
    """Identity of a program element: a class, or a method/field inside one.

    Equality is (class_fqn, member_kind, member); the file path is carried
    for filtering only.
    """
    class_fqn: str
    member_kind: MemberKind
    member: str = ""
    file_path: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        class_fqn = (self.class_fqn or "").strip()
        if not class_fqn:
            raise ParseError("element class name must not be empty")
        object.__setattr__(self, "class_fqn", class_fqn)
        object.__setattr__(self, "member_kind", MemberKind(self.member_kind))

        if self.member_kind is MemberKind.METHOD:
            object.__setattr__(self, "member", normalize_signature(self.member))
        elif self.member_kind is MemberKind.FIELD:
            object.__setattr__(self, "member", normalize_field_name(self.member))
        elif self.member:
            raise ParseError(f"class element {class_fqn} cannot carry member {self.member!r}")

    @classmethod
    def for_method(cls, class_fqn: str, signature: str, file_path: Optional[str] = None) -> "ElementRef":
        return cls(class_fqn, MemberKind.METHOD, signature, file_path)

    @classmethod
    def for_field(cls, class_fqn: str, name: str, file_path: Optional[str] = None) -> "ElementRef":
        return cls(class_fqn, MemberKind.FIELD, name, file_path)

    @classmethod
    def for_class(cls, class_fqn: str, file_path: Optional[str] = None) -> "ElementRef":
        return cls(class_fqn, MemberKind.CLASS, "", file_path)

    @property
    def label(self) -> str:
        return f"{self.class_fqn}.{self.member}" if self.member else self.class_fqn

    @property
    def simple_class_name(self) -> str:
        return re.split(r"[.$]", self.class_fqn)[-1]

    @property
    def member_name(self) -> str:
        """Method name without parameters, or the field name"""
        return self.member.split("(", 1)[0]

    def to_dict(self) -> Dict[str, str]:
        data = {"class": self.class_fqn}
        if self.member_kind is not MemberKind.CLASS:
            data[self.member_kind.value] = self.member
        if self.file_path:
            data["file"] = self.file_path
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "ElementRef":
        if not isinstance(data, dict) or not isinstance(data.get("class"), str):
            raise ParseError(f"element must be an object with a 'class' string: {data!r}")
        file_path = data.get("file")
        if "method" in data and "field" in data:
            raise ParseError(f"element cannot be both method and field: {data!r}")
        if "method" in data:
            return cls.for_method(data["class"], str(data["method"]), file_path)
        if "field" in data:
            return cls.for_field(data["class"], str(data["field"]), file_path)
        return cls.for_class(data["class"], file_path)


_COMMIT = re.compile(r"^[0-9a-fA-F]{1,40}$")


@dataclass(frozen=True)
class RefactoringRecord:
    """One single refactoring operation reported by a miner or an oracle"""
    id: str
    project: str
    commit: str
    kind: RefactoringKind
    source: ElementRef
    target: ElementRef
    timestamp: Optional[datetime] = None
    raw: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.id:
            raise ParseError("record id must not be empty")
        if not self.project:
            raise ParseError(f"record {self.id}: project must not be empty")
        if not _COMMIT.match(self.commit or ""):
            raise ParseError(f"record {self.id}: commit must be a hex id, got {self.commit!r}")
        object.__setattr__(self, "commit", self.commit.lower())
        object.__setattr__(self, "kind", RefactoringKind(self.kind))
        object.__setattr__(self, "timestamp", parse_timestamp(self.timestamp))

        expected = MemberKind.FIELD if self.kind.is_field_level else MemberKind.METHOD
        if self.source.member_kind is not expected or self.target.member_kind is not expected:
            raise ParseError(
                f"record {self.id}: {self.kind.value} relates two {expected.value}s, "
                f"got {self.source.member_kind.value} -> {self.target.member_kind.value}"
            )
        same_class = self.source.class_fqn == self.target.class_fqn
        if self.kind is RefactoringKind.EXTRACT and not same_class:
            raise ParseError(f"record {self.id}: extract must stay within {self.source.class_fqn}")
        if self.kind is RefactoringKind.EXTRACT_MOVE and same_class:
            raise ParseError(f"record {self.id}: extract_move must leave {self.source.class_fqn}")

    def sort_key(self) -> Tuple:
        return (
            self.timestamp is None,
            self.timestamp or datetime.min.replace(tzinfo=timezone.utc),
            self.commit,
            natural_key(self.id),
        )

    def to_dict(self) -> Dict:
        data = {
            "id": self.id,
            "project": self.project,
            "commit": self.commit,
            "type": self.kind.value,
            "source": self.source.to_dict(),
            "target": self.target.to_dict(),
        }
        if self.timestamp is not None:
            data["timestamp"] = format_timestamp(self.timestamp)
        return data


@dataclass(frozen=True)
class Composite:
    """A cluster of two or more single refactorings sharing one anchor"""
    kind: CompositeKind
    anchor: ElementRef
    members: Tuple[RefactoringRecord, ...]
    commits: FrozenSet[str]
    age_days: Optional[int] = None
    scope: Optional[Scope] = None

    def __post_init__(self):
        if len(self.members) < 2:
            raise IntegrityError(f"{self.kind.value} at {self.anchor.label} needs at least two members")
        if self.age_days is not None and self.age_days < 0:
            raise IntegrityError(f"{self.kind.value} at {self.anchor.label} has negative age")
        if (self.scope is not None) != self.kind.has_scope:
            raise IntegrityError(f"{self.kind.value} at {self.anchor.label}: scope set for the wrong kind")

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def project(self) -> str:
        return self.members[0].project

    @property
    def member_ids(self) -> List[str]:
        return [member.id for member in self.members]

    @property
    def is_multi_commit(self) -> bool:
        return len(self.commits) > 1
